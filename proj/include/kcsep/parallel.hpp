#pragma once

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace kcsep {

/// Every exhaustive kernel ships a serial reference and an OpenMP version.
enum class Exec { kSerial, kParallel };

namespace detail {
inline constexpr std::int64_t kBlocks = 256;
}

/// Sum of fn(i) over [0, count). The range is cut into a fixed number of blocks
/// and block sums are added in block order, so the result does not depend on
/// the thread count.
template <typename Fn>
double reduce_sum(std::int64_t count, Exec exec, Fn&& fn) {
  if (exec == Exec::kSerial || count < detail::kBlocks) {
    double total = 0.0;
    for (std::int64_t i = 0; i < count; ++i) total += fn(i);
    return total;
  }
  std::vector<double> partial(detail::kBlocks, 0.0);
  const std::int64_t chunk = (count + detail::kBlocks - 1) / detail::kBlocks;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < detail::kBlocks; ++b) {
    const std::int64_t lo = b * chunk;
    const std::int64_t hi = std::min(count, lo + chunk);
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += fn(i);
    partial[b] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

/// Maximum of fn(i) over [0, count) together with the first index attaining it.
struct ArgMax {
  double value = 0.0;
  std::int64_t index = -1;
};

template <typename Fn>
ArgMax reduce_max(std::int64_t count, Exec exec, Fn&& fn) {
  auto better = [](const ArgMax& a, const ArgMax& b) {
    if (b.index < 0) return a;
    if (a.index < 0) return b;
    if (b.value > a.value || (b.value == a.value && b.index < a.index)) return b;
    return a;
  };
  if (exec == Exec::kSerial || count < detail::kBlocks) {
    ArgMax best;
    for (std::int64_t i = 0; i < count; ++i) best = better(best, ArgMax{fn(i), i});
    return best;
  }
  std::vector<ArgMax> partial(detail::kBlocks);
  const std::int64_t chunk = (count + detail::kBlocks - 1) / detail::kBlocks;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < detail::kBlocks; ++b) {
    const std::int64_t lo = b * chunk;
    const std::int64_t hi = std::min(count, lo + chunk);
    ArgMax best;
    for (std::int64_t i = lo; i < hi; ++i) best = better(best, ArgMax{fn(i), i});
    partial[b] = best;
  }
  ArgMax best;
  for (const auto& p : partial) best = better(best, p);
  return best;
}

}  // namespace kcsep
