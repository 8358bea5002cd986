#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "hpwl/dataset.hpp"

namespace hpwl {

/// Output of Lloyd clustering plus centroid snapping. After snap_centroids,
/// `centroids` holds actual data rows (rows of X at `centroid_indices`) and
/// clusters whose means snapped to the same row have been merged, so the
/// effective cluster count may be smaller than requested.
struct ClusterModel {
  Eigen::MatrixXd means;                       // m x d cluster means
  std::vector<int> assignments;                // n, values in [0, m)
  std::vector<Eigen::Index> centroid_indices;  // m row indices into X
  Eigen::MatrixXd centroids;                   // m x d rows of X

  int cluster_count() const { return static_cast<int>(means.rows()); }
};

/// Lloyd iterations with seeded initialization from m distinct data rows.
/// Assignment ties break to the lowest cluster index; the loop exits when
/// assignments stop changing or max_iter is reached. An emptied cluster is
/// re-seeded with the point farthest from its current mean and iteration
/// continues. `sse_trace`, when given, receives the within-cluster sum of
/// squares after every iteration.
ClusterModel kmeans(const DataMatrix& x, int m, std::uint64_t seed, int max_iter = 100,
                    std::vector<double>* sse_trace = nullptr);

/// Replaces each mean with the nearest data row (ties to the lowest row
/// index), merging clusters whose means snap to the same row. Assignments
/// are remapped onto the merged clusters.
ClusterModel snap_centroids(const DataMatrix& x, const ClusterModel& model);

/// Default cluster count: floor(n/10) clamped to [2, n].
int default_cluster_count(Eigen::Index n);

}  // namespace hpwl
