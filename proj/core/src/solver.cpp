#include "hpwl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>

#include "hpwl/errors.hpp"
#include "hpwl/log.hpp"

namespace hpwl {

void HpwlParams::validate() const {
  if (tau < 0.0 || rho < 0.0) throw ConfigError("tau and rho must be >= 0");
  if (kappa <= 0.0) throw ConfigError("kappa must be > 0");
  if (rank_r < 0 || embed_k < 0 || m < 0)
    throw ConfigError("rank_r, embed_k and m must be positive, or 0 for automatic");
  if (rank_r > 0 && embed_k > 0 && rank_r > embed_k)
    throw ConfigError("rank_r must not exceed embed_k");
  if (l < 1) throw ConfigError("neighbor count l must be >= 1");
  if (outer_max < 1 || inner_pq_max < 1) throw ConfigError("iteration caps must be >= 1");
  if (tol <= 0.0) throw ConfigError("tol must be > 0");
  if (eps_b <= 0.0) throw ConfigError("eps_b must be > 0");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::identity_d: return "identity_d";
    case Variant::binary_h: return "binary_h";
    case Variant::no_global: return "no_global";
  }
  return "full";
}

Variant variant_from_string(const std::string& name) {
  if (name == "full") return Variant::full;
  if (name == "identity_d") return Variant::identity_d;
  if (name == "binary_h") return Variant::binary_h;
  if (name == "no_global") return Variant::no_global;
  throw ConfigError("unknown variant \"" + name +
                    "\" (expected full, identity_d, binary_h or no_global)");
}

Eigen::VectorXd build_point_weights(const DataMatrix& x, const ClusterModel& model,
                                    double sigma) {
  if (sigma <= 0.0) throw ConfigError("point weights need a positive bandwidth");
  const Eigen::Index n = x.rows();
  std::unordered_set<Eigen::Index> centroid_rows(model.centroid_indices.begin(),
                                                 model.centroid_indices.end());
  Eigen::VectorXd d_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (centroid_rows.count(i)) {
      d_diag(i) = 1.0;
    } else {
      const int cluster = model.assignments[static_cast<size_t>(i)];
      const double sq = (x.values.row(i) - model.centroids.row(cluster)).squaredNorm();
      d_diag(i) = gaussian_affinity(sq, sigma);
    }
  }
  return d_diag;
}

Eigen::MatrixXd build_global_target(const Eigen::MatrixXd& x, const Eigen::VectorXd& d_diag,
                                    int embed_k) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (embed_k < 1) throw ConfigError("embed_k must be >= 1");
  if (embed_k > n)
    throw ConfigError("embed_k (" + std::to_string(embed_k) + ") exceeds sample count (" +
                      std::to_string(n) + ")");

  const Eigen::VectorXd dsqrt = d_diag.cwiseSqrt();
  const Eigen::MatrixXd gram = (static_cast<double>(embed_k) / static_cast<double>(d)) *
                               (dsqrt.asDiagonal() * (x * x.transpose()) * dsqrt.asDiagonal());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition of the gram matrix failed");

  // Descending eigenvalues; equal values keep the decomposition's order.
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return es.eigenvalues()(a) > es.eigenvalues()(b); });

  Eigen::MatrixXd z(n, embed_k);
  for (int t = 0; t < embed_k; ++t) {
    const int src = order[static_cast<size_t>(t)];
    Eigen::VectorXd v = es.eigenvectors().col(src);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    z.col(t) = std::sqrt(std::max(0.0, es.eigenvalues()(src))) * v;
  }
  return z;
}

Eigen::VectorXd refresh_b(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, double eps_b) {
  if (eps_b <= 0.0) throw ConfigError("eps_b must be > 0");
  const Eigen::MatrixXd t = p * q;
  Eigen::VectorXd b(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    b(i) = 1.0 / (2.0 * std::max(t.row(i).norm(), eps_b));
  return b;
}

PqSolver::PqSolver(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids,
                   std::vector<Eigen::Index> centroid_indices, const Eigen::VectorXd& d_diag,
                   const Eigen::MatrixXd& z_k, double tau, double rho)
    : x_(x),
      centroids_(centroids),
      centroid_indices_(std::move(centroid_indices)),
      d_diag_(d_diag),
      z_k_(z_k),
      tau_(tau),
      rho_(rho) {
  if (tau_ < 0.0 || rho_ < 0.0) throw ConfigError("tau and rho must be >= 0");
  dsqrt_zk_ = d_diag_.cwiseSqrt().asDiagonal() * z_k_;
  xt_dsqrt_zk_ = x_.transpose() * dsqrt_zk_;
  if (!fast_path()) xtdx_ = x_.transpose() * d_diag_.asDiagonal() * x_;
}

void PqSolver::set_delta_prime(const Eigen::MatrixXd& delta_prime) {
  delta_prime_n_ = extend_laplacian(delta_prime, centroid_indices_, x_.rows());
  // The d x d representation is skipped for very wide data where only the
  // n x n formulation is practical.
  if (x_.cols() <= 4096)
    ct_dp_c_ = centroids_.transpose() * delta_prime * centroids_;
  else
    ct_dp_c_.resize(0, 0);
}

Eigen::MatrixXd PqSolver::system_matrix(const Eigen::VectorXd& b_diag) const {
  if (ct_dp_c_.size() == 0)
    throw NumericError("direct update requested but the d x d system was not assembled");
  if (xtdx_.size() == 0) xtdx_ = x_.transpose() * d_diag_.asDiagonal() * x_;
  Eigen::MatrixXd m = ct_dp_c_ + tau_ * xtdx_;
  m.diagonal() += rho_ * b_diag;
  return m;
}

Eigen::MatrixXd PqSolver::right_pinv(const Eigen::MatrixXd& q) const {
  const Eigen::MatrixXd qqt = q * q.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(qqt);
  if (!lu.isInvertible())
    throw NumericError("Q Q^T is singular (rank-deficient transform); re-initialize the solver");
  return q.transpose() * lu.inverse();
}

Eigen::MatrixXd PqSolver::left_pinv_apply(const Eigen::MatrixXd& p,
                                          const Eigen::MatrixXd& rhs) const {
  const Eigen::MatrixXd ptp = p.transpose() * p;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ptp);
  if (!lu.isInvertible())
    throw NumericError("P^T P is singular (rank-deficient transform); re-initialize the solver");
  return lu.solve(p.transpose() * rhs);
}

Eigen::MatrixXd PqSolver::solve_fast_core(const Eigen::VectorXd& b_diag) const {
  // Reformulation that inverts an n x n system instead of d x d:
  //   core = (1/rho) B^{-1} X^T [ (1/rho)(delta'_n + tau D) X B^{-1} X^T + I_n ]^{-1} D^{1/2} Z_k
  if (rho_ <= 0.0) throw ConfigError("the n x n formulation requires rho > 0");
  const Eigen::Index n = x_.rows();
  const Eigen::VectorXd b_inv = b_diag.cwiseInverse();
  const Eigen::MatrixXd binv_xt = b_inv.asDiagonal() * x_.transpose();  // d x n
  const Eigen::MatrixXd xbxt = x_ * binv_xt;                            // n x n
  Eigen::MatrixXd k = (1.0 / rho_) *
                      ((delta_prime_n_ + Eigen::MatrixXd(tau_ * d_diag_.asDiagonal())) * xbxt);
  k += Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd sol = k.partialPivLu().solve(dsqrt_zk_);
  if (!sol.allFinite()) throw NumericError("n x n system solve produced non-finite values");
  return (1.0 / rho_) * (binv_xt * sol);
}

Eigen::MatrixXd PqSolver::update_p_direct(const Eigen::MatrixXd& q,
                                          const Eigen::VectorXd& b_diag) const {
  if (tau_ == 0.0) return Eigen::MatrixXd::Zero(x_.cols(), q.rows());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system_matrix(b_diag));
  if (!lu.isInvertible()) throw NumericError("singular system matrix in the transform update");
  return tau_ * lu.solve(xt_dsqrt_zk_) * right_pinv(q);
}

Eigen::MatrixXd PqSolver::update_p_fast(const Eigen::MatrixXd& q,
                                        const Eigen::VectorXd& b_diag) const {
  if (tau_ == 0.0) return Eigen::MatrixXd::Zero(x_.cols(), q.rows());
  return tau_ * solve_fast_core(b_diag) * right_pinv(q);
}

Eigen::MatrixXd PqSolver::update_q_direct(const Eigen::MatrixXd& p,
                                          const Eigen::VectorXd& b_diag) const {
  if (tau_ == 0.0) return Eigen::MatrixXd::Zero(p.cols(), z_k_.cols());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system_matrix(b_diag));
  if (!lu.isInvertible()) throw NumericError("singular system matrix in the transform update");
  return tau_ * left_pinv_apply(p, lu.solve(xt_dsqrt_zk_));
}

Eigen::MatrixXd PqSolver::update_q_fast(const Eigen::MatrixXd& p,
                                        const Eigen::VectorXd& b_diag) const {
  if (tau_ == 0.0) return Eigen::MatrixXd::Zero(p.cols(), z_k_.cols());
  return tau_ * left_pinv_apply(p, solve_fast_core(b_diag));
}

Eigen::MatrixXd PqSolver::update_p(const Eigen::MatrixXd& q,
                                   const Eigen::VectorXd& b_diag) const {
  return fast_path() ? update_p_fast(q, b_diag) : update_p_direct(q, b_diag);
}

Eigen::MatrixXd PqSolver::update_q(const Eigen::MatrixXd& p,
                                   const Eigen::VectorXd& b_diag) const {
  return fast_path() ? update_q_fast(p, b_diag) : update_q_direct(p, b_diag);
}

std::pair<double, double> pair_weight_update(double omega_i, double omega_j, double kappa,
                                             double c) {
  if (kappa <= 0.0) throw ConfigError("kappa must be > 0");
  if (2.0 * kappa * c <= omega_i - omega_j) return {0.0, c};
  if (2.0 * kappa * c <= omega_j - omega_i) return {c, 0.0};
  double wi = (-omega_i + omega_j + 2.0 * kappa * c) / (4.0 * kappa);
  wi = std::clamp(wi, 0.0, c);
  return {wi, c - wi};
}

Eigen::VectorXd edge_weight_gradient(const SoftHypergraph& h, const Eigen::MatrixXd& centroids,
                                     const Eigen::MatrixXd& t) {
  const int m = h.size();
  Eigen::VectorXd dv_inv(m);
  for (int v = 0; v < m; ++v)
    dv_inv(v) = h.vertex_degrees(v) > 0.0 ? 1.0 / h.vertex_degrees(v) : 0.0;

  const Eigen::MatrixXd f = centroids * t;  // m x k, transformed centroids
  const Eigen::MatrixXd r = f.transpose() * dv_inv.asDiagonal() * h.incidence;          // k x m
  const Eigen::MatrixXd s =
      h.edge_degrees.cwiseInverse().asDiagonal() * h.incidence.transpose() * f;          // m x k

  Eigen::VectorXd omega(m);
  for (int e = 0; e < m; ++e) omega(e) = r.col(e).dot(s.row(e).transpose());
  return omega;
}

void update_w(SoftHypergraph& h, const Eigen::MatrixXd& centroids, const Eigen::MatrixXd& t,
              double kappa) {
  const Eigen::VectorXd omega = edge_weight_gradient(h, centroids, t);
  const int m = h.size();
  for (int i = 0; i + 1 < m; ++i) {
    const double c = h.weights(i) + h.weights(i + 1);
    const auto [wi, wj] = pair_weight_update(omega(i), omega(i + 1), kappa, c);
    h.weights(i) = wi;
    h.weights(i + 1) = wj;
  }
}

ObjectiveParts objective_parts(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids,
                               const Eigen::MatrixXd& delta, const Eigen::VectorXd& d_diag,
                               const Eigen::MatrixXd& z_k, const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& b_diag, const Eigen::MatrixXd& t) {
  ObjectiveParts parts;
  const Eigen::MatrixXd f = centroids * t;
  parts.local = (f.transpose() * delta * f).trace();
  parts.global = (d_diag.cwiseSqrt().asDiagonal() * (x * t) - z_k).squaredNorm();
  parts.weight_reg = weights.squaredNorm();
  parts.l21_surrogate = (b_diag.asDiagonal() * t).cwiseProduct(t).sum();
  for (Eigen::Index i = 0; i < t.rows(); ++i) parts.l21 += t.row(i).norm();
  return parts;
}

double objective(const SolverState& state, const Eigen::MatrixXd& x,
                 const Eigen::MatrixXd& delta) {
  const ObjectiveParts parts =
      objective_parts(x, state.clusters.centroids, delta, state.d_diag, state.z_k,
                      state.hypergraph.weights, state.b_diag, state.transform());
  return parts.value(state.resolved.tau, state.resolved.rho, state.resolved.kappa);
}

FeatureRanking rank_features(const Eigen::MatrixXd& t) {
  FeatureRanking ranking;
  ranking.scores.resize(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) ranking.scores(i) = t.row(i).norm();
  ranking.order.resize(static_cast<size_t>(t.rows()));
  std::iota(ranking.order.begin(), ranking.order.end(), 0);
  std::sort(ranking.order.begin(), ranking.order.end(), [&](int a, int b) {
    if (ranking.scores(a) != ranking.scores(b)) return ranking.scores(a) > ranking.scores(b);
    return a < b;
  });
  return ranking;
}

FeatureRanking feature_scores(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  return rank_features(p * q);
}

FeatureRanking fit(const DataMatrix& x, const HpwlParams& params, std::uint64_t seed,
                   Variant variant, SolverState* state_out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 4) throw ConfigError("fit requires at least 4 samples");
  params.validate();

  HpwlParams hp = params;
  if (variant == Variant::no_global) hp.tau = 0.0;

  const int m_requested = hp.m > 0 ? hp.m : default_cluster_count(n);
  ClusterModel model = snap_centroids(x, kmeans(x, m_requested, seed));
  const int m = model.cluster_count();
  if (m < 2)
    throw NumericError("clustering collapsed to a single centroid; the data has too little spread");
  hp.m = m;
  hp.l = std::clamp(hp.l, 1, m - 1);

  int embed_k = hp.embed_k;
  if (embed_k <= 0) embed_k = std::min({m, 30, static_cast<int>(n), static_cast<int>(d)});
  if (embed_k > d) throw ConfigError("embed_k exceeds the feature count");
  int rank_r = hp.rank_r > 0 ? hp.rank_r : embed_k;
  if (rank_r > embed_k) throw ConfigError("rank_r must not exceed embed_k");
  hp.embed_k = embed_k;
  hp.rank_r = rank_r;

  SoftHypergraph hypergraph = build_incidence(model.centroids, hp.l);
  if (variant == Variant::binary_h) binarize_incidence(hypergraph);

  const Eigen::VectorXd d_diag = variant == Variant::identity_d
                                     ? Eigen::VectorXd::Ones(n)
                                     : build_point_weights(x, model, hypergraph.sigma);
  const Eigen::MatrixXd z_k = build_global_target(x.values, d_diag, embed_k);

  PqSolver solver(x.values, model.centroids, model.centroid_indices, d_diag, z_k, hp.tau, hp.rho);

  SolverState state;
  state.d_diag = d_diag;
  state.z_k = z_k;
  state.clusters = model;
  state.hypergraph = hypergraph;
  state.resolved = hp;
  state.q = Eigen::MatrixXd::Zero(rank_r, embed_k);
  state.q.leftCols(rank_r).setIdentity();
  state.b_diag = Eigen::VectorXd::Constant(d, 0.5);

  Eigen::MatrixXd t_prev_outer = Eigen::MatrixXd::Zero(d, embed_k);
  Eigen::MatrixXd t = t_prev_outer;
  bool have_t = false;

  for (int outer = 1; outer <= hp.outer_max; ++outer) {
    const Eigen::MatrixXd delta = laplacian(state.hypergraph);
    solver.set_delta_prime(symmetrized(delta));

    state.step2_traces.emplace_back();
    Eigen::MatrixXd t_inner = have_t ? t : Eigen::MatrixXd::Zero(d, embed_k);
    for (int inner = 0; inner < hp.inner_pq_max; ++inner) {
      state.p = solver.update_p(state.q, state.b_diag);
      state.q = solver.update_q(state.p, state.b_diag);
      t = state.p * state.q;
      have_t = true;

      const ObjectiveParts parts =
          objective_parts(x.values, model.centroids, delta, d_diag, z_k,
                          state.hypergraph.weights, state.b_diag, t);
      state.step2_traces.back().push_back(parts.descent_value(hp.tau, hp.rho));

      state.b_diag = refresh_b(state.p, state.q, hp.eps_b);
      const double rel_change = (t - t_inner).norm() / std::max(t_inner.norm(), 1e-30);
      t_inner = t;
      if (rel_change < hp.tol) break;
    }

    update_w(state.hypergraph, model.centroids, t, hp.kappa);
    degrees(state.hypergraph);

    const Eigen::MatrixXd delta_next = laplacian(state.hypergraph);
    const ObjectiveParts parts =
        objective_parts(x.values, model.centroids, delta_next, d_diag, z_k,
                        state.hypergraph.weights, state.b_diag, t);
    const double obj = parts.value(hp.tau, hp.rho, hp.kappa);
    if (!std::isfinite(obj))
      throw NumericError("objective diverged at outer iteration " + std::to_string(outer) +
                         " (check the hyperparameters)");

    const double err =
        (t - t_prev_outer).squaredNorm() / (static_cast<double>(d) * static_cast<double>(embed_k));
    state.objective_trace.push_back(obj);
    state.err_trace.push_back(err);
    state.iterations = outer;
    t_prev_outer = t;
    if (err < hp.tol) break;
  }

  FeatureRanking ranking = feature_scores(state.p, state.q);
  if (state_out) *state_out = std::move(state);
  return ranking;
}

}  // namespace hpwl
