#pragma once

#include <cstdint>
#include <vector>

namespace edwsvr {

// Balanced k-fold assignment: a seeded Fisher-Yates shuffle of [0,n) dealt
// round-robin into folds, so sizes differ by at most one and the plan is a
// pure function of (n, k, seed).
struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // n entries in [0,k)
  std::uint64_t seed = 0;

  std::vector<std::size_t> fold_indices(int fold) const;
  std::vector<std::size_t> complement_indices(int fold) const;
};

FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed);

}  // namespace edwsvr
