#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hpwl/clustering.hpp"
#include "hpwl/dataset.hpp"
#include "hpwl/hypergraph.hpp"

namespace hpwl {

/// Hyperparameters of the selector. A value of 0 for rank_r, embed_k, or m
/// means "derive at fit time": m = floor(n/10) clamped to [2, n],
/// embed_k = min(m, 30, n, d), rank_r = embed_k. The neighbor count l is
/// clamped to [1, m-1] once the effective centroid count is known.
struct HpwlParams {
  double tau = 1.0;    // weight of the global correlation term
  double rho = 1.0;    // weight of the row-sparsity regularizer
  double kappa = 1.0;  // weight of the hyperedge-weight regularizer
  int rank_r = 0;      // rank bound of the transform, <= embed_k
  int embed_k = 0;     // embedding dimension
  int l = 5;           // neighbors per hyperedge
  int m = 0;           // centroid count
  int outer_max = 20;
  int inner_pq_max = 10;
  double tol = 1e-4;   // convergence threshold on the normalized transform change
  double eps_b = 1e-8; // zero-row guard in the sparsity surrogate

  /// Throws ConfigError when explicitly-set fields are inconsistent.
  void validate() const;
};

/// Ablation switches used by the evaluation protocol.
enum class Variant { full, identity_d, binary_h, no_global };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// Per-feature scores (l2 norms of the rows of the learned transform) and
/// the descending score order, ties broken toward lower feature index.
struct FeatureRanking {
  Eigen::VectorXd scores;
  std::vector<int> order;
};

/// Full optimizer state, exposed for inspection and diagnostics.
struct SolverState {
  Eigen::MatrixXd p;               // d x r
  Eigen::MatrixXd q;               // r x k
  Eigen::VectorXd b_diag;          // d, surrogate diagonal
  Eigen::VectorXd d_diag;          // n, point weights in (0, 1]
  Eigen::MatrixXd z_k;             // n x k, global embedding target
  SoftHypergraph hypergraph;
  ClusterModel clusters;
  HpwlParams resolved;             // parameter values actually used
  std::vector<double> objective_trace;              // one entry per outer iteration
  std::vector<double> err_trace;                    // normalized transform change per outer iteration
  std::vector<std::vector<double>> step2_traces;    // descent quantity after each inner update
  int iterations = 0;

  Eigen::MatrixXd transform() const { return p * q; }
};

/// Diagonal point weights: 1 for centroid rows, Gaussian affinity to the
/// assigned centroid elsewhere. All entries lie in (0, 1].
Eigen::VectorXd build_point_weights(const DataMatrix& x, const ClusterModel& model,
                                    double sigma);

/// Top-k scaled eigenvector target Z_k of (k/d) D^{1/2} X X^T D^{1/2}:
/// eigenvalues sorted descending (ties keep the decomposition's order),
/// each eigenvector's sign fixed so its largest-magnitude entry is positive,
/// columns scaled by sqrt(eigenvalue). Fitting D^{1/2} X T to Z_k preserves
/// the weighted inter-point correlation structure.
Eigen::MatrixXd build_global_target(const Eigen::MatrixXd& x, const Eigen::VectorXd& d_diag,
                                    int embed_k);

/// Sparsity-surrogate diagonal: b(i) = 1 / (2 * max(||t_i||, eps_b)) where
/// t_i is row i of P*Q.
Eigen::VectorXd refresh_b(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, double eps_b);

/// Closed-form solver for the alternating P/Q updates. Constructed once per
/// fit; the centroid Laplacian is refreshed per outer iteration. Each update
/// minimizes its convex subproblem exactly: the d x d normal-equations path
/// is used by default, and an equivalent formulation needing only an n x n
/// inverse is selected automatically when d > n (both paths are exposed for
/// verification).
class PqSolver {
 public:
  PqSolver(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids,
           std::vector<Eigen::Index> centroid_indices, const Eigen::VectorXd& d_diag,
           const Eigen::MatrixXd& z_k, double tau, double rho);

  void set_delta_prime(const Eigen::MatrixXd& delta_prime);

  Eigen::MatrixXd update_p(const Eigen::MatrixXd& q, const Eigen::VectorXd& b_diag) const;
  Eigen::MatrixXd update_q(const Eigen::MatrixXd& p, const Eigen::VectorXd& b_diag) const;

  Eigen::MatrixXd update_p_direct(const Eigen::MatrixXd& q, const Eigen::VectorXd& b_diag) const;
  Eigen::MatrixXd update_p_fast(const Eigen::MatrixXd& q, const Eigen::VectorXd& b_diag) const;
  Eigen::MatrixXd update_q_direct(const Eigen::MatrixXd& p, const Eigen::VectorXd& b_diag) const;
  Eigen::MatrixXd update_q_fast(const Eigen::MatrixXd& p, const Eigen::VectorXd& b_diag) const;

  bool fast_path() const { return x_.cols() > x_.rows() && rho_ > 0.0; }

  double tau() const { return tau_; }
  double rho() const { return rho_; }

 private:
  Eigen::MatrixXd system_matrix(const Eigen::VectorXd& b_diag) const;             // d x d
  Eigen::MatrixXd solve_fast_core(const Eigen::VectorXd& b_diag) const;           // d x k
  Eigen::MatrixXd right_pinv(const Eigen::MatrixXd& q) const;                     // q^T (q q^T)^{-1}
  Eigen::MatrixXd left_pinv_apply(const Eigen::MatrixXd& p, const Eigen::MatrixXd& rhs) const;

  Eigen::MatrixXd x_;                       // n x d
  Eigen::MatrixXd centroids_;               // m x d
  std::vector<Eigen::Index> centroid_indices_;
  Eigen::VectorXd d_diag_;                  // n
  Eigen::MatrixXd z_k_;                     // n x k
  double tau_;
  double rho_;

  mutable Eigen::MatrixXd xtdx_;            // X^T D X, d x d (direct path, lazy)
  Eigen::MatrixXd xt_dsqrt_zk_;             // X^T D^{1/2} Z_k, d x k
  Eigen::MatrixXd dsqrt_zk_;                // D^{1/2} Z_k, n x k
  Eigen::MatrixXd ct_dp_c_;                 // C^T delta' C, d x d (direct path)
  Eigen::MatrixXd delta_prime_n_;           // n x n extension (fast path)
};

/// Closed-form minimizer of  omega_i*w_i + omega_j*w_j + kappa*(w_i^2 + w_j^2)
/// subject to w_i + w_j = c, w_i, w_j >= 0. Returns {w_i, w_j}.
std::pair<double, double> pair_weight_update(double omega_i, double omega_j, double kappa,
                                             double c);

/// Linear coefficients of the hyperedge-weight subproblem at fixed transform:
/// omega(e) = sum_j R(j,e) * S(e,j) with R = Q^T P^T C^T Dv^{-1} H and
/// S = De^{-1} H^T C P Q. Uses the degrees currently stored in h.
Eigen::VectorXd edge_weight_gradient(const SoftHypergraph& h, const Eigen::MatrixXd& centroids,
                                     const Eigen::MatrixXd& t);

/// One coordinate-descent pass over consecutive hyperedge-weight pairs
/// (0,1), (1,2), ..., (m-2, m-1). Preserves the simplex exactly and never
/// increases the subproblem objective. Degrees are NOT refreshed here; call
/// degrees() afterwards.
void update_w(SoftHypergraph& h, const Eigen::MatrixXd& centroids, const Eigen::MatrixXd& t,
              double kappa);

/// Additive pieces of the objective, reported separately so both the full
/// value and the surrogate-free descent quantity can be monitored.
struct ObjectiveParts {
  double local = 0;          // tr(T^T C^T delta C T)
  double global = 0;         // ||D^{1/2} X T - Z_k||_F^2
  double weight_reg = 0;     // ||w||_2^2
  double l21_surrogate = 0;  // tr(T^T B T)
  double l21 = 0;            // sum of row norms of T

  double value(double tau, double rho, double kappa) const {
    return local + tau * global + kappa * weight_reg + rho * l21_surrogate;
  }
  double descent_value(double tau, double rho) const { return local + tau * global + rho * l21; }
};

ObjectiveParts objective_parts(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids,
                               const Eigen::MatrixXd& delta, const Eigen::VectorXd& d_diag,
                               const Eigen::MatrixXd& z_k, const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& b_diag, const Eigen::MatrixXd& t);

/// Scalar objective with the surrogate diagonal frozen at its current value.
double objective(const SolverState& state, const Eigen::MatrixXd& x,
                 const Eigen::MatrixXd& delta);

/// Scores features by the l2 norm of their rows in t = p*q.
FeatureRanking feature_scores(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q);
FeatureRanking rank_features(const Eigen::MatrixXd& t);

/// Runs the full alternating optimization: clustering, hypergraph
/// construction, repeated P/Q/B refinement, hyperedge-weight descent and
/// Laplacian refresh, until the normalized transform change falls below
/// params.tol or outer_max is reached. Deterministic given the seed.
/// When `state_out` is non-null the final state and traces are stored there.
FeatureRanking fit(const DataMatrix& x, const HpwlParams& params, std::uint64_t seed,
                   Variant variant = Variant::full, SolverState* state_out = nullptr);

}  // namespace hpwl
