#include "hpwl/hypergraph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "hpwl/errors.hpp"
#include "hpwl/log.hpp"

namespace hpwl {

Eigen::VectorXd compute_edge_degrees(const Eigen::MatrixXd& incidence) {
  return incidence.colwise().sum();
}

Eigen::VectorXd compute_vertex_degrees(const Eigen::MatrixXd& incidence,
                                       const Eigen::VectorXd& weights) {
  return incidence * weights;
}

SoftHypergraph build_incidence(const Eigen::MatrixXd& centroids, int l) {
  const int m = static_cast<int>(centroids.rows());
  if (m < 2) throw ConfigError("need at least 2 centroids, got " + std::to_string(m));
  if (l < 1 || l > m - 1)
    throw ConfigError("neighbor count must be in [1, m-1], got " + std::to_string(l));

  Eigen::MatrixXd sq_dist(m, m);
  double sigma = 0.0;
  for (int i = 0; i < m; ++i) {
    sq_dist(i, i) = 0.0;
    for (int j = i + 1; j < m; ++j) {
      const double sq = (centroids.row(i) - centroids.row(j)).squaredNorm();
      sq_dist(i, j) = sq_dist(j, i) = sq;
      sigma += std::sqrt(sq);
    }
  }
  sigma /= m * (m - 1) / 2.0;
  if (sigma <= 0.0)
    throw NumericError(
        "all centroids coincide (zero bandwidth); the data needs more variance or fewer clusters");

  SoftHypergraph h;
  h.sigma = sigma;
  h.l = l;
  h.incidence = Eigen::MatrixXd::Zero(m, m);
  std::vector<int> order;
  for (int e = 0; e < m; ++e) {
    order.resize(static_cast<size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    order.erase(order.begin() + e);
    // l nearest centroids of centroid e; ties prefer the lower index.
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (sq_dist(a, e) != sq_dist(b, e)) return sq_dist(a, e) < sq_dist(b, e);
      return a < b;
    });
    h.incidence(e, e) = 1.0;
    for (int t = 0; t < l; ++t) {
      const int v = order[static_cast<size_t>(t)];
      h.incidence(v, e) = gaussian_affinity(sq_dist(v, e), sigma);
    }
  }
  h.weights = Eigen::VectorXd::Constant(m, 1.0 / m);
  degrees(h);
  return h;
}

void degrees(SoftHypergraph& h) {
  h.edge_degrees = compute_edge_degrees(h.incidence);
  h.vertex_degrees = compute_vertex_degrees(h.incidence, h.weights);
  for (int e = 0; e < h.size(); ++e)
    if (h.edge_degrees(e) <= 0.0)
      throw NumericError("hyperedge " + std::to_string(e) + " has zero degree");
}

Eigen::MatrixXd laplacian(const SoftHypergraph& h) {
  const int m = h.size();
  Eigen::VectorXd dv_inv(m);
  int zero_degree = 0;
  for (int v = 0; v < m; ++v) {
    if (h.vertex_degrees(v) > 0.0) {
      dv_inv(v) = 1.0 / h.vertex_degrees(v);
    } else {
      dv_inv(v) = 0.0;  // pseudo-inverse convention for fully de-weighted vertices
      ++zero_degree;
    }
  }
  if (zero_degree > 0)
    log_warn(std::to_string(zero_degree) +
             " vertex(es) lost all hyperedge weight; using pseudo-inverse degrees");

  Eigen::MatrixXd a = dv_inv.asDiagonal() * h.incidence * h.weights.asDiagonal() *
                      h.edge_degrees.cwiseInverse().asDiagonal() * h.incidence.transpose();
  return Eigen::MatrixXd::Identity(m, m) - a;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& delta) {
  return 0.5 * (delta + delta.transpose());
}

Eigen::MatrixXd extend_laplacian(const Eigen::MatrixXd& delta,
                                 std::span<const Eigen::Index> centroid_indices,
                                 Eigen::Index n) {
  const Eigen::Index m = delta.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b)
      out(centroid_indices[static_cast<size_t>(a)], centroid_indices[static_cast<size_t>(b)]) =
          delta(a, b);
  return out;
}

void binarize_incidence(SoftHypergraph& h) {
  h.incidence = (h.incidence.array() != 0.0).cast<double>();
  degrees(h);
}

}  // namespace hpwl
