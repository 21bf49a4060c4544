#include "ticc/glasso.hpp"

#include "ticc/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ticc {

namespace {

bool is_positive_definite(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

void require_square(const Matrix& m, Index d, const char* what) {
  if (m.rows() != d || m.cols() != d) {
    std::ostringstream msg;
    msg << what << " must be " << d << " x " << d << ", got " << m.rows() << " x " << m.cols();
    throw Error(ErrorCode::dimension_mismatch, msg.str());
  }
}

// Last-resort repair for a non-converged solve whose iterate is indefinite.
Matrix shift_to_positive_definite(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  const double floor = 1e-6 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  const double shift = std::max(0.0, floor - eig.eigenvalues().minCoeff());
  return m + shift * Matrix::Identity(m.rows(), m.cols());
}

}  // namespace

void AdmmConfig::validate() const {
  if (!(rho > 0.0) || !(eps_abs > 0.0) || !(eps_rel >= 0.0) || max_iter < 1) {
    throw Error(ErrorCode::invalid_argument,
                "ADMM config needs rho > 0, eps_abs > 0, eps_rel >= 0, max_iter >= 1");
  }
}

void GlassoProblem::validate() const {
  if (n < 1 || w < 1) throw Error(ErrorCode::invalid_argument, "n and w must be positive");
  const Index d = n * w;
  require_square(S, d, "S");
  require_square(lambda, d, "lambda");
  if (!S.allFinite()) throw Error(ErrorCode::numerical_failure, "S has non-finite entries");
  if (!lambda.allFinite() || lambda.minCoeff() < 0.0) {
    throw Error(ErrorCode::invalid_argument, "lambda must be finite and non-negative");
  }
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::invalid_argument, "S must be symmetric");
  }
  if ((lambda - lambda.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw Error(ErrorCode::invalid_argument, "lambda must be symmetric");
  }
}

Matrix theta_update(const Matrix& z, const Matrix& u, const Matrix& S, double rho) {
  Matrix target = rho * (z - u) - S;
  target = (0.5 * (target + target.transpose())).eval();
  if (!target.allFinite()) {
    throw Error(ErrorCode::numerical_failure, "theta update input is not finite");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(target);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::numerical_failure, "eigendecomposition failed in theta update");
  }
  // Each eigenvalue solves rho * t - 1/t = d; the two branches are the same
  // root, written to avoid cancellation for d < 0.
  Vector values = eig.eigenvalues().unaryExpr([rho](double d) {
    const double root = std::sqrt(d * d + 4.0 * rho);
    return d >= 0.0 ? (d + root) / (2.0 * rho) : 2.0 / (root - d);
  });
  const Matrix& q = eig.eigenvectors();
  Matrix theta = q * values.asDiagonal() * q.transpose();
  return 0.5 * (theta + theta.transpose());
}

Matrix z_update(const Matrix& theta, const Matrix& u, const Matrix& lambda, double rho,
                std::span<const OccurrenceSet> occurrences) {
  Matrix z(theta.rows(), theta.cols());
  for (const OccurrenceSet& set : occurrences) {
    double sum = 0.0;
    double penalty = 0.0;
    for (const Position& p : set.positions) {
      sum += theta(p.row, p.col) + u(p.row, p.col);
      penalty += lambda(p.row, p.col);
    }
    const double denom = rho * static_cast<double>(set.count());
    const double upper = (rho * sum - penalty) / denom;
    const double lower = (rho * sum + penalty) / denom;
    const double value = upper > 0.0 ? upper : (lower < 0.0 ? lower : 0.0);
    for (const Position& p : set.positions) z(p.row, p.col) = value;
  }
  return z;
}

double theta_stationarity_residual(const Matrix& theta, const Matrix& z, const Matrix& u,
                                   const Matrix& S, double rho) {
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const Matrix inverse = llt.solve(Matrix::Identity(theta.rows(), theta.cols()));
  return (-inverse + S + rho * (theta - z + u)).norm();
}

double glasso_objective(const Matrix& theta, const Matrix& S, const Matrix& lambda) {
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -log_det + S.cwiseProduct(theta).sum() + lambda.cwiseProduct(theta.cwiseAbs()).sum();
}

ToeplitzGlassoSolver::ToeplitzGlassoSolver(AdmmConfig config) : config_(config) {
  config_.validate();
}

GlassoResult ToeplitzGlassoSolver::solve(const GlassoProblem& problem,
                                         const AdmmState* warm_start,
                                         const AdmmTraceSink& trace) const {
  problem.validate();
  const Index d = problem.n * problem.w;
  const double rho = config_.rho;
  const auto occurrences = shared_occurrence_sets(problem.n, problem.w);

  AdmmState state;
  state.rho = rho;
  if (warm_start != nullptr && warm_start->z.rows() == d && warm_start->u.rows() == d) {
    state.theta = warm_start->theta;
    state.z = warm_start->z;
    // U is the dual scaled by 1/rho.
    state.u = warm_start->u * (warm_start->rho / rho);
  } else {
    state.theta = Matrix::Identity(d, d);
    state.z = Matrix::Identity(d, d);
    state.u = Matrix::Zero(d, d);
  }

  const double sqrt_d = std::sqrt(static_cast<double>(d));
  bool converged = false;
  for (int k = 1; k <= config_.max_iter; ++k) {
    state.theta = theta_update(state.z, state.u, problem.S, rho);
    const double stationarity =
        trace ? theta_stationarity_residual(state.theta, state.z, state.u, problem.S, rho) : 0.0;
    Matrix z_next = z_update(state.theta, state.u, problem.lambda, rho, *occurrences);
    state.u += state.theta - z_next;

    state.primal_res = (state.theta - z_next).norm();
    state.dual_res = rho * (z_next - state.z).norm();
    state.z = std::move(z_next);
    state.iter = k;

    const double eps_primal =
        sqrt_d * config_.eps_abs + config_.eps_rel * std::max(state.theta.norm(), state.z.norm());
    const double eps_dual = sqrt_d * config_.eps_abs + config_.eps_rel * rho * state.u.norm();

    if (trace) {
      trace({k, state.primal_res, state.dual_res, eps_primal, eps_dual,
             glasso_objective(state.z, problem.S, problem.lambda), stationarity});
    }
    if (state.primal_res <= eps_primal && state.dual_res <= eps_dual &&
        is_positive_definite(state.z)) {
      converged = true;
      break;
    }
  }

  Matrix solution = state.z;
  if (!converged && !is_positive_definite(solution)) {
    Matrix projected = nearest_toeplitz(state.theta, problem.n, problem.w).assemble();
    solution = is_positive_definite(projected) ? std::move(projected)
                                               : shift_to_positive_definite(solution);
  }
  return {toeplitz_from_dense(solution, problem.n, problem.w), std::move(state), converged};
}

}  // namespace ticc
