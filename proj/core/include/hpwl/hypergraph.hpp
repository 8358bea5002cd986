#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

namespace hpwl {

/// Gaussian affinity exp(-squared_distance / sigma^2). Equals 1 at distance 0
/// and exp(-1) at distance sigma.
inline double gaussian_affinity(double squared_distance, double sigma) {
  return std::exp(-squared_distance / (sigma * sigma));
}

/// Soft hypergraph over m centroids: one vertex and one hyperedge per
/// centroid. Column e of `incidence` is the hyperedge of centroid e; it holds
/// the Gaussian affinities of the l nearest centroids plus a unit diagonal
/// entry (a centroid always belongs to its own hyperedge), zero elsewhere.
///
/// Invariants:
///   - incidence entries lie in [0, 1]; incidence(i, i) == 1
///   - each column has exactly min(l + 1, m) nonzeros
///   - weights lie on the probability simplex (maintained by the solver)
///   - edge_degrees(e)  = sum_v incidence(v, e)  > 0
///   - vertex_degrees(v) = sum_e weights(e) * incidence(v, e)
struct SoftHypergraph {
  Eigen::MatrixXd incidence;      // m x m
  Eigen::VectorXd weights;        // m
  Eigen::VectorXd vertex_degrees; // m
  Eigen::VectorXd edge_degrees;   // m
  double sigma = 0.0;             // Gaussian bandwidth
  int l = 0;                      // neighbor count per hyperedge

  int size() const { return static_cast<int>(incidence.rows()); }
};

/// Unweighted column sums of an incidence matrix.
Eigen::VectorXd compute_edge_degrees(const Eigen::MatrixXd& incidence);

/// Weighted row sums: degree(v) = sum_e weights(e) * incidence(v, e).
Eigen::VectorXd compute_vertex_degrees(const Eigen::MatrixXd& incidence,
                                       const Eigen::VectorXd& weights);

/// Builds the soft hypergraph over the given centroid rows. The bandwidth
/// sigma is the mean Euclidean distance over all unordered centroid pairs.
/// Weights start uniform at 1/m. Requires m >= 2 and 1 <= l <= m-1; throws
/// NumericError when all centroids coincide (sigma would be zero).
SoftHypergraph build_incidence(const Eigen::MatrixXd& centroids, int l);

/// Recomputes both degree vectors from the current incidence and weights.
/// Must be called after every weight change. Throws NumericError if any
/// hyperedge has zero degree (violates the column-nonzero invariant).
void degrees(SoftHypergraph& h);

/// Hypergraph Laplacian I - Dv^{-1} H W De^{-1} H^T. Vertices with zero
/// weighted degree (possible when the solver zeroes every edge covering
/// them) use the pseudo-inverse convention 1/0 -> 0 and log a warning.
Eigen::MatrixXd laplacian(const SoftHypergraph& h);

/// Symmetric part (delta + delta^T) / 2. The trace objective is invariant
/// under this symmetrization.
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& delta);

/// Embeds an m x m centroid Laplacian into an n x n matrix that is zero
/// except at centroid rows/columns, so that X^T delta_n X == C^T delta C.
Eigen::MatrixXd extend_laplacian(const Eigen::MatrixXd& delta,
                                 std::span<const Eigen::Index> centroid_indices,
                                 Eigen::Index n);

/// Ablation: collapse the soft hypergraph to an ordinary one by mapping
/// every nonzero incidence entry to 1. Degrees are recomputed.
void binarize_incidence(SoftHypergraph& h);

}  // namespace hpwl
