#include "hpwl/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "hpwl/errors.hpp"

namespace hpwl {

namespace {

int nearest_row(const Eigen::MatrixXd& rows, const Eigen::RowVectorXd& point) {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double dist = (rows.row(i) - point).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

int default_cluster_count(Eigen::Index n) {
  const int m = static_cast<int>(n / 10);
  return std::clamp(m, 2, static_cast<int>(n));
}

ClusterModel kmeans(const DataMatrix& x, int m, std::uint64_t seed, int max_iter,
                    std::vector<double>* sse_trace) {
  const Eigen::Index n = x.rows();
  if (m < 1 || m > n)
    throw ConfigError("cluster count must be in [1, n], got " + std::to_string(m) + " for n=" +
                      std::to_string(n));
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (sse_trace) sse_trace->clear();

  // Seeded initialization from m distinct rows.
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  ClusterModel model;
  model.means.resize(m, x.cols());
  for (int j = 0; j < m; ++j) model.means.row(j) = x.values.row(idx[static_cast<size_t>(j)]);
  model.assignments.assign(static_cast<size_t>(n), -1);

  std::vector<int> counts(static_cast<size_t>(m), 0);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int best = nearest_row(model.means, x.values.row(i));
      if (best != model.assignments[static_cast<size_t>(i)]) {
        model.assignments[static_cast<size_t>(i)] = best;
        changed = true;
      }
      ++counts[static_cast<size_t>(best)];
    }

    // Re-seed any emptied cluster with the point farthest from its mean,
    // preferring points whose own cluster keeps at least one member.
    std::vector<char> stolen(static_cast<size_t>(n), 0);
    for (int j = 0; j < m; ++j) {
      if (counts[static_cast<size_t>(j)] > 0) continue;
      std::vector<Eigen::Index> by_dist(static_cast<size_t>(n));
      std::iota(by_dist.begin(), by_dist.end(), Eigen::Index{0});
      std::sort(by_dist.begin(), by_dist.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double da = (x.values.row(a) - model.means.row(j)).squaredNorm();
        const double db = (x.values.row(b) - model.means.row(j)).squaredNorm();
        if (da != db) return da > db;
        return a < b;
      });
      for (Eigen::Index cand : by_dist) {
        const int owner = model.assignments[static_cast<size_t>(cand)];
        if (stolen[static_cast<size_t>(cand)] || counts[static_cast<size_t>(owner)] < 2) continue;
        stolen[static_cast<size_t>(cand)] = 1;
        --counts[static_cast<size_t>(owner)];
        model.assignments[static_cast<size_t>(cand)] = j;
        ++counts[static_cast<size_t>(j)];
        changed = true;
        break;
      }
    }

    model.means.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      model.means.row(model.assignments[static_cast<size_t>(i)]) += x.values.row(i);
    for (int j = 0; j < m; ++j)
      if (counts[static_cast<size_t>(j)] > 0) model.means.row(j) /= counts[static_cast<size_t>(j)];

    if (sse_trace) {
      double sse = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        sse += (x.values.row(i) - model.means.row(model.assignments[static_cast<size_t>(i)]))
                   .squaredNorm();
      sse_trace->push_back(sse);
    }
    if (!changed) break;
  }
  return model;
}

ClusterModel snap_centroids(const DataMatrix& x, const ClusterModel& model) {
  const int m = model.cluster_count();
  if (m < 1) throw ConfigError("snap_centroids needs a populated model");

  // Nearest data row per mean, ties to the lowest row index.
  std::vector<Eigen::Index> snapped(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j)
    snapped[static_cast<size_t>(j)] = nearest_row(x.values, model.means.row(j));

  // Merge clusters whose means landed on the same row, keeping first occurrence order.
  std::vector<Eigen::Index> kept_rows;
  std::vector<int> kept_mean;     // original cluster index whose mean is kept
  std::vector<int> remap(static_cast<size_t>(m));
  std::unordered_map<Eigen::Index, int> seen;
  for (int j = 0; j < m; ++j) {
    const Eigen::Index row = snapped[static_cast<size_t>(j)];
    auto it = seen.find(row);
    if (it == seen.end()) {
      const int merged = static_cast<int>(kept_rows.size());
      seen.emplace(row, merged);
      kept_rows.push_back(row);
      kept_mean.push_back(j);
      remap[static_cast<size_t>(j)] = merged;
    } else {
      remap[static_cast<size_t>(j)] = it->second;
    }
  }

  ClusterModel out;
  const int merged_m = static_cast<int>(kept_rows.size());
  out.means.resize(merged_m, x.cols());
  out.centroids.resize(merged_m, x.cols());
  out.centroid_indices = kept_rows;
  for (int a = 0; a < merged_m; ++a) {
    out.means.row(a) = model.means.row(kept_mean[static_cast<size_t>(a)]);
    out.centroids.row(a) = x.values.row(kept_rows[static_cast<size_t>(a)]);
  }
  out.assignments.resize(model.assignments.size());
  for (size_t i = 0; i < model.assignments.size(); ++i)
    out.assignments[i] = remap[static_cast<size_t>(model.assignments[i])];
  return out;
}

}  // namespace hpwl
