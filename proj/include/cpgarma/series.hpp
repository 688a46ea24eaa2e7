#ifndef CPGARMA_SERIES_HPP
#define CPGARMA_SERIES_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace cpgarma {

struct CountSeries {
  std::vector<long> values;
  std::string name;
  std::string source_path;

  std::size_t size() const { return values.size(); }
};

inline double sample_mean(const std::vector<long>& v) {
  double s = 0.0;
  for (long x : v) s += static_cast<double>(x);
  return s / static_cast<double>(v.size());
}

// Denominator n-1.
inline double sample_variance(const std::vector<long>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (long x : v) {
    const double d = static_cast<double>(x) - m;
    s += d * d;
  }
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace cpgarma

#endif  // CPGARMA_SERIES_HPP
