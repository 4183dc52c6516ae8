#include "kcsep/lattice.hpp"

#include <algorithm>
#include <bit>

#include "kcsep/errors.hpp"

namespace kcsep {

Configuration::Configuration(int n_sites, bool filled) : n_(n_sites) {
  if (n_sites <= 0) throw ConfigError("lattice size must be positive");
  words_.assign((static_cast<std::size_t>(n_sites) + 63) / 64, filled ? ~std::uint64_t{0} : 0);
  if (filled && (n_sites & 63)) words_.back() &= (std::uint64_t{1} << (n_sites & 63)) - 1;
}

Configuration Configuration::from_string(std::string_view bits) {
  Configuration cfg(static_cast<int>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw ConfigError("configuration strings use only '0' and '1'");
    cfg.set(static_cast<std::int64_t>(i), bits[i] == '1');
  }
  return cfg;
}

Configuration Configuration::from_bits(const std::vector<int>& bits) {
  Configuration cfg(static_cast<int>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw ConfigError("occupations must be 0 or 1");
    cfg.set(static_cast<std::int64_t>(i), bits[i]);
  }
  return cfg;
}

Configuration Configuration::from_mask(int n_sites, std::uint64_t mask) {
  if (n_sites > 64) throw SizeError("from_mask supports at most 64 sites");
  Configuration cfg(n_sites);
  if (n_sites < 64) mask &= (std::uint64_t{1} << n_sites) - 1;
  cfg.words_[0] = mask;
  return cfg;
}

void Configuration::set(std::int64_t x, int value) {
  const int s = wrap(x);
  const std::uint64_t bit = std::uint64_t{1} << (s & 63);
  if (value) {
    words_[s >> 6] |= bit;
  } else {
    words_[s >> 6] &= ~bit;
  }
}

void Configuration::exchange(std::int64_t x, std::int64_t y) {
  const int a = occupation(x);
  const int b = occupation(y);
  if (a == b) return;
  set(x, b);
  set(y, a);
}

int Configuration::particle_count() const {
  int total = 0;
  for (auto w : words_) total += std::popcount(w);
  return total;
}

namespace {

// Occupied sites in [lo, hi) with 0 <= lo <= hi <= N, no wrap.
int count_linear(const std::vector<std::uint64_t>& words, int lo, int hi) {
  if (lo >= hi) return 0;
  int total = 0;
  int w = lo >> 6;
  const int last = (hi - 1) >> 6;
  for (; w <= last; ++w) {
    std::uint64_t word = words[w];
    const int base = w << 6;
    if (lo > base) word &= ~std::uint64_t{0} << (lo - base);
    if (hi < base + 64) word &= (std::uint64_t{1} << (hi - base)) - 1;
    total += std::popcount(word);
  }
  return total;
}

}  // namespace

int Configuration::count_range(std::int64_t start, int length) const {
  if (length <= 0) return 0;
  if (length >= n_) return particle_count();
  const int s = wrap(start);
  const int end = s + length;
  if (end <= n_) return count_linear(words_, s, end);
  return count_linear(words_, s, n_) + count_linear(words_, 0, end - n_);
}

std::uint64_t Configuration::extract(std::int64_t start, int length) const {
  std::uint64_t out = 0;
  int s = wrap(start);
  if (length <= n_) {
    // at most two contiguous runs, each read straight from the words
    auto run = [this](int from, int len) -> std::uint64_t {
      if (len == 0) return 0;
      const int w = from >> 6;
      const int off = from & 63;
      std::uint64_t v = words_[w] >> off;
      if (off != 0 && off + len > 64) v |= words_[w + 1] << (64 - off);
      return len == 64 ? v : v & ((std::uint64_t{1} << len) - 1);
    };
    const int first = std::min(length, n_ - s);
    out = run(s, first);
    if (first < length) out |= run(0, length - first) << first;
    return out;
  }
  for (int i = 0; i < length; ++i) {
    out |= static_cast<std::uint64_t>((words_[s >> 6] >> (s & 63)) & 1U) << i;
    if (++s == n_) s = 0;
  }
  return out;
}

std::string Configuration::to_string() const {
  std::string out(static_cast<std::size_t>(n_), '0');
  for (int x = 0; x < n_; ++x) out[static_cast<std::size_t>(x)] = occupation(x) ? '1' : '0';
  return out;
}

Window node_window(int j, int width) {
  return Window{-j, width + 2, {0, 1}};
}

int occupation(const Configuration& cfg, std::int64_t x) { return cfg.occupation(x); }

Configuration exchange(Configuration cfg, std::int64_t x, std::int64_t y) {
  cfg.exchange(x, y);
  return cfg;
}

Configuration complement(const Configuration& cfg) {
  Configuration out(cfg.size());
  for (int x = 0; x < cfg.size(); ++x) out.set(x, 1 - cfg.occupation(x));
  return out;
}

Configuration shift(const Configuration& cfg, std::int64_t k) {
  Configuration out(cfg.size());
  for (int x = 0; x < cfg.size(); ++x) out.set(x, cfg.occupation(x + k));
  return out;
}

namespace {

bool in_window(const Window& w, int offset) {
  return offset >= w.anchor && offset < w.anchor + w.length;
}

// Effective size (box minus excluded offsets) must leave room for a node.
void check_window(const Configuration& cfg, const Window& w) {
  if (w.length < 0) throw ConfigError("window length must be nonnegative");
  int removed = 0;
  for (std::size_t i = 0; i < w.excluded.size(); ++i) {
    const int off = w.excluded[i];
    if (in_window(w, off) && std::find(w.excluded.begin(), w.excluded.begin() + i, off) == w.excluded.begin() + i)
      ++removed;
  }
  if (w.length > cfg.size() || w.length - removed > cfg.size() - 2) {
    throw SizeError("window of length " + std::to_string(w.length) + " does not fit on a lattice of " +
                    std::to_string(cfg.size()) + " sites");
  }
}

}  // namespace

int window_count(const Configuration& cfg, std::int64_t x, const Window& w) {
  check_window(cfg, w);
  int total = cfg.count_range(x + w.anchor, w.length);
  std::vector<int> seen;
  for (int off : w.excluded) {
    if (!in_window(w, off) || std::find(seen.begin(), seen.end(), off) != seen.end()) continue;
    seen.push_back(off);
    total -= cfg.occupation(x + off);
  }
  return total;
}

int window_count_naive(const Configuration& cfg, std::int64_t x, const Window& w) {
  check_window(cfg, w);
  int total = 0;
  for (int off = w.anchor; off < w.anchor + w.length; ++off) {
    if (std::find(w.excluded.begin(), w.excluded.end(), off) != w.excluded.end()) continue;
    total += cfg.occupation(x + off);
  }
  return total;
}

double local_average(const Configuration& cfg, std::int64_t x, int ell) {
  if (ell < 1 || ell > cfg.size()) throw ConfigError("local_average needs 1 <= ell <= N");
  return static_cast<double>(cfg.count_range(x, ell)) / ell;
}

}  // namespace kcsep
