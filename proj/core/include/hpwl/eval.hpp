#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "hpwl/dataset.hpp"
#include "hpwl/solver.hpp"

namespace hpwl {

/// Accuracy of one selector variant across repeated half splits and feature
/// counts. mean/stddev are per feature count over the repeats (population
/// convention, so a single repeat yields zero deviation).
struct SweepResult {
  Variant variant = Variant::full;
  std::vector<std::uint64_t> seeds;
  std::vector<int> feature_counts;
  Eigen::MatrixXd accuracies;  // repeats x counts, entries in [0, 1]
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
  int knn_k = 5;
};

/// Majority vote over the k nearest training rows by Euclidean distance.
/// Distance ties prefer the lower training index; vote ties the smallest
/// label value. Requires 1 <= k_neighbors <= |train|.
Eigen::VectorXi knn_predict(const Eigen::MatrixXd& train_x, const Eigen::VectorXi& train_y,
                            const Eigen::MatrixXd& test_x, int k_neighbors);

/// Fraction of exact label matches.
double accuracy(const Eigen::VectorXi& predicted, const Eigen::VectorXi& expected);

/// The evaluation grid {10, 20, ..., 200} restricted to [1, d]. Counts
/// beyond d are dropped (callers log the skip).
std::vector<int> sweep_feature_counts(Eigen::Index d);

/// The half-split evaluation protocol: for each seed, split the labeled data
/// 50/50, fit the selector on the training features alone (labels never
/// reach the selector), then for every feature count classify the test half
/// with KNN on the top-ranked features. Standardization statistics, when
/// enabled, come from the training half only and are applied to both halves.
SweepResult run_sweep(const DataMatrix& x, const HpwlParams& params, Variant variant,
                      const std::vector<std::uint64_t>& seeds, int knn_k = 5,
                      bool standardize_features = true);

/// One row per (seed, feature count): variant,seed,feature_count,accuracy.
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);

/// Mean/stddev per feature count plus run metadata.
void write_summary_json(const std::filesystem::path& path, const SweepResult& result);

}  // namespace hpwl
