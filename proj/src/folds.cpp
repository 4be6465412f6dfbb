#include "edwsvr/folds.hpp"

#include <numeric>
#include <stdexcept>

#include "edwsvr/rng.hpp"

namespace edwsvr {

std::vector<std::size_t> FoldPlan::fold_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::complement_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) out.push_back(i);
  return out;
}

FoldPlan make_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("make_folds: need k >= 2");
  if (n < static_cast<std::size_t>(k)) throw std::invalid_argument("make_folds: n < k");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = rng.index(i + 1);
    std::swap(perm[i], perm[j]);
  }

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) plan.assignments[perm[i]] = static_cast<int>(i % k);
  return plan;
}

}  // namespace edwsvr
