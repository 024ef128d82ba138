#pragma once

// Independent reference computations. Nothing here calls the code under test.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mrr::testing {

// Number of endorsements for a per-tick contact schedule: each maximal run
// of contact ticks endorses once when it lasts at least `required` ticks.
inline std::uint64_t interval_scan_endorsements(const std::vector<bool>& contact,
                                                std::uint64_t required) {
  std::uint64_t count = 0;
  std::uint64_t run = 0;
  for (bool c : contact) {
    run = c ? run + 1 : 0;
    if (run == required) ++count;
  }
  return count;
}

struct MeanSd {
  double mean;
  double sd;
};

// Two-pass population mean and standard deviation in long double.
inline MeanSd brute_force_mean_sd(const std::vector<double>& xs) {
  long double sum = 0.0L;
  for (double x : xs) sum += x;
  const long double mean = sum / static_cast<long double>(xs.size());
  long double ss = 0.0L;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {static_cast<double>(mean),
          static_cast<double>(std::sqrt(ss / static_cast<long double>(xs.size())))};
}

// Least-squares slope of y against t, plain normal equations.
inline double ls_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace mrr::testing
