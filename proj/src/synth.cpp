#include "edwsvr/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "edwsvr/rng.hpp"

namespace edwsvr {

TwoLines synth_two_lines(Eigen::Index n, double frac_a, double frac_b, double frac_outlier,
                         double offset, double noise_sd, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("synth_two_lines: need n >= 1");
  if (frac_a < 0 || frac_b < 0 || frac_outlier < 0)
    throw std::invalid_argument("synth_two_lines: fractions must be nonnegative");
  if (frac_a + frac_b + frac_outlier > 1.0 + 1e-12)
    throw std::invalid_argument("synth_two_lines: fractions must sum to at most 1");
  if (noise_sd < 0) throw std::invalid_argument("synth_two_lines: noise_sd must be nonnegative");

  auto count_a = static_cast<Eigen::Index>(std::llround(frac_a * static_cast<double>(n)));
  auto count_b = static_cast<Eigen::Index>(std::llround(frac_b * static_cast<double>(n)));
  auto count_out = static_cast<Eigen::Index>(std::llround(frac_outlier * static_cast<double>(n)));
  if (count_a + count_b + count_out > n)
    throw std::invalid_argument("synth_two_lines: rounded counts exceed n");
  count_a += n - (count_a + count_b + count_out);  // remainder to line A

  TwoLines out;
  out.count_a = count_a;
  out.count_b = count_b;
  out.count_outlier = count_out;
  out.data.features.resize(n, 1);
  out.data.targets.resize(n);
  out.data.feature_names = {"x"};
  out.data.target_name = "y";

  Rng rng(seed);
  auto emit = [&](Eigen::Index row, double shift) {
    double x = rng.unit();
    out.data.features(row, 0) = x;
    out.data.targets(row) = x + shift + (noise_sd > 0 ? noise_sd * rng.gaussian() : 0.0);
  };
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < count_a; ++i) emit(row++, 0.0);
  for (Eigen::Index i = 0; i < count_b; ++i) emit(row++, offset);
  for (Eigen::Index i = 0; i < count_out; ++i) emit(row++, kOutlierShift);
  return out;
}

}  // namespace edwsvr
