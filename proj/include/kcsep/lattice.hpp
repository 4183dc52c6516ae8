#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kcsep {

/// Occupation configuration on the periodic lattice {0, ..., N-1}.
///
/// Occupations are stored bit-packed, site x in bit (x % 64) of word (x / 64).
/// Every site argument is reduced modulo N, so negative offsets are legal.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(int n_sites, bool filled = false);

  static Configuration from_string(std::string_view bits);
  static Configuration from_bits(const std::vector<int>& bits);
  /// Low N bits of `mask`, site 0 in bit 0. Requires N <= 64.
  static Configuration from_mask(int n_sites, std::uint64_t mask);

  int size() const { return n_; }
  int wrap(std::int64_t x) const {
    std::int64_t r = x % n_;
    return static_cast<int>(r < 0 ? r + n_ : r);
  }

  int occupation(std::int64_t x) const {
    const int s = wrap(x);
    return static_cast<int>((words_[s >> 6] >> (s & 63)) & 1U);
  }
  void set(std::int64_t x, int value);
  void exchange(std::int64_t x, std::int64_t y);

  int particle_count() const;
  /// Number of occupied sites in [start, start + length), wrapping around.
  int count_range(std::int64_t start, int length) const;
  /// Bits of sites start, start+1, ..., start+length-1 (length <= 64).
  std::uint64_t extract(std::int64_t start, int length) const;

  std::string to_string() const;

  bool operator==(const Configuration&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// A box of sites relative to a reference site with some offsets removed.
struct Window {
  int anchor = 0;
  int length = 0;
  std::vector<int> excluded;
};

/// The window of width `width` at position j around the node {0, 1}:
/// the box [-j, -j + width + 1] minus the two node sites.
Window node_window(int j, int width);

int occupation(const Configuration& cfg, std::int64_t x);
Configuration exchange(Configuration cfg, std::int64_t x, std::int64_t y);
Configuration complement(const Configuration& cfg);
/// The shift tau: occupation(shift(cfg, k), x) == occupation(cfg, x + k).
Configuration shift(const Configuration& cfg, std::int64_t k);

/// Particles in the window anchored at site x. Throws SizeError when the
/// window does not fit on the lattice with room for the node.
int window_count(const Configuration& cfg, std::int64_t x, const Window& w);
/// Site-by-site reference used to cross-check the popcount path.
int window_count_naive(const Configuration& cfg, std::int64_t x, const Window& w);

/// Average occupation of the ball {x, ..., x + ell - 1}.
double local_average(const Configuration& cfg, std::int64_t x, int ell);

}  // namespace kcsep
