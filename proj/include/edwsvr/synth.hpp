#pragma once

#include <cstdint>

#include "edwsvr/dataset.hpp"

namespace edwsvr {

// Two parallel lines plus a small cloud of gross outliers, the scenario used
// to contrast squared-loss against e-tube fitting. Rows come out grouped:
// first count_a points on line A (y = x), then count_b on line B
// (y = x + offset), then count_outlier displaced far above line A. Any
// rounding remainder joins line A. x is uniform on [0,1]; both lines carry
// gaussian noise of sd noise_sd; everything is a pure function of the seed.
struct TwoLines {
  Dataset data;
  Eigen::Index count_a = 0, count_b = 0, count_outlier = 0;
};

inline constexpr double kOutlierShift = 5.0;

TwoLines synth_two_lines(Eigen::Index n, double frac_a, double frac_b, double frac_outlier,
                         double offset, double noise_sd, std::uint64_t seed);

}  // namespace edwsvr
