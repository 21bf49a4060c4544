#pragma once

#include "ticc/toeplitz.hpp"

#include <functional>
#include <span>

namespace ticc {

struct AdmmConfig {
  double rho = 1.0;
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iter = 1000;

  void validate() const;
};

/// minimize  -log det(Theta) + tr(S Theta) + ||lambda o Theta||_1
/// subject to Theta symmetric block Toeplitz.
///
/// `lambda` is the penalty as seen by this problem; the clustering driver
/// passes 2 * penalty / |P| for a cluster of size |P|.
struct GlassoProblem {
  Matrix S;
  Matrix lambda;
  Index n = 0;
  Index w = 0;

  /// Checks shapes, symmetry, finiteness, and lambda >= 0.
  void validate() const;
};

/// ADMM iterate. `z` is stored dense but is exactly block Toeplitz after
/// every Z-update; `u` is the scaled dual variable.
struct AdmmState {
  Matrix theta;
  Matrix z;
  Matrix u;
  double rho = 1.0;
  int iter = 0;
  double primal_res = 0.0;
  double dual_res = 0.0;
};

struct AdmmTraceRow {
  int iter = 0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double eps_primal = 0.0;
  double eps_dual = 0.0;
  double objective = 0.0;
  /// theta_stationarity_residual of this iteration's Theta-update.
  double stationarity = 0.0;
};

using AdmmTraceSink = std::function<void(const AdmmTraceRow&)>;

struct GlassoResult {
  BlockToeplitzMatrix theta;
  AdmmState state;
  bool converged = false;
};

/// argmin_Theta -log det Theta + tr(S Theta) + rho/2 ||Theta - Z + U||_F^2,
/// via the eigendecomposition of rho (Z - U) - S. Always symmetric PD.
Matrix theta_update(const Matrix& z, const Matrix& u, const Matrix& S, double rho);

/// Block-Toeplitz constrained soft threshold of Theta + U. Each occurrence
/// set gets one shared value; the sets are independent of each other.
Matrix z_update(const Matrix& theta, const Matrix& u, const Matrix& lambda, double rho,
                std::span<const OccurrenceSet> occurrences);

/// ||-Theta^{-1} + S + rho (Theta - Z + U)||_F.
double theta_stationarity_residual(const Matrix& theta, const Matrix& z, const Matrix& u,
                                   const Matrix& S, double rho);

/// -log det(Theta) + tr(S Theta) + sum |lambda o Theta|; +inf when Theta is
/// not positive definite.
double glasso_objective(const Matrix& theta, const Matrix& S, const Matrix& lambda);

class ToeplitzGlassoSolver {
 public:
  explicit ToeplitzGlassoSolver(AdmmConfig config = {});

  const AdmmConfig& config() const noexcept { return config_; }

  /// Runs ADMM from `warm_start` (or Theta = Z = I, U = 0). On hitting
  /// max_iter the last iterate is returned with converged == false.
  /// Throws Error(numerical_failure) when S is not finite.
  GlassoResult solve(const GlassoProblem& problem, const AdmmState* warm_start = nullptr,
                     const AdmmTraceSink& trace = {}) const;

 private:
  AdmmConfig config_;
};

}  // namespace ticc
