#include "csecoc/dataset.hpp"
#include "csecoc/error.hpp"
#include "csecoc/rng.hpp"

namespace csecoc {

std::vector<std::size_t> FoldPlan::test_indices(int repeat, int fold) const {
  std::vector<std::size_t> out;
  const auto& a = assignment.at(static_cast<std::size_t>(repeat));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int repeat, int fold) const {
  std::vector<std::size_t> out;
  const auto& a = assignment.at(static_cast<std::size_t>(repeat));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan stratified_folds(std::span<const int> labels, int class_count, int k, int repeats,
                          std::uint64_t seed) {
  if (k < 2) fail(ErrorCode::invalid_argument, "fold count must be >= 2");
  if (repeats < 1) fail(ErrorCode::invalid_argument, "repeat count must be >= 1");
  if (class_count < 1) fail(ErrorCode::invalid_argument, "class count must be >= 1");

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int c = labels[i];
    if (c < 0 || c >= class_count) fail(ErrorCode::invalid_argument, "label out of range");
    members[static_cast<std::size_t>(c)].push_back(i);
  }
  const bool leave_one_out = static_cast<std::size_t>(k) == labels.size();
  for (int c = 0; c < class_count; ++c) {
    const auto n = members[static_cast<std::size_t>(c)].size();
    if (n < static_cast<std::size_t>(k) && !leave_one_out) {
      fail(ErrorCode::data, "class " + std::to_string(c) + " has " + std::to_string(n) +
                                " samples, fewer than k=" + std::to_string(k));
    }
  }

  FoldPlan plan;
  plan.k = k;
  plan.repeats = repeats;
  plan.seed = seed;
  plan.assignment.assign(static_cast<std::size_t>(repeats), std::vector<int>(labels.size(), -1));

  for (int r = 0; r < repeats; ++r) {
    std::size_t dealt = 0;
    auto& fold_of = plan.assignment[static_cast<std::size_t>(r)];
    for (int c = 0; c < class_count; ++c) {
      std::vector<std::size_t> order = members[static_cast<std::size_t>(c)];
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c)}));
      rng.shuffle(std::span<std::size_t>(order));
      for (std::size_t p = 0; p < order.size(); ++p) {
        fold_of[order[p]] = static_cast<int>((dealt + p) % static_cast<std::size_t>(k));
      }
      dealt += order.size();
    }
  }
  return plan;
}

FoldPlan stratified_folds(const Dataset& ds, int k, int repeats, std::uint64_t seed) {
  return stratified_folds(ds.labels(), ds.class_count(), k, repeats, seed);
}

}  // namespace csecoc
