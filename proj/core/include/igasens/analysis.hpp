#pragma once

#include <optional>
#include <vector>

#include "igasens/sensitivity.hpp"

namespace igasens {

/// Truncated Taylor data of one tracked eigenpair about t0. lambda[k] holds
/// derivative values (not series coefficients); vectors are optional.
struct TaylorModel {
  double t0 = 0.0;
  Eigen::VectorXd lambda;
  std::optional<Eigen::MatrixXd> vectors;
};

TaylorModel make_taylor_model(const EigenpairJet& jet, double t0, bool with_vectors = true);

/// sum_k lambda[k] (t - t0)^k / k!.
double taylor_eval(const TaylorModel& model, double t);

/// Componentwise Taylor evaluation of the eigenvector.
Eigen::VectorXd taylor_eval_vector(const TaylorModel& model, double t);

/// Exact mean of the Taylor polynomial under a uniform distribution on
/// [a, b] in the model's own parameter: closed-form monomial integration,
/// no quadrature. Throws DomainError when a >= b.
double uniform_expectation(const TaylorModel& model, double a, double b);

/// M-weighted modal assurance criterion
/// |u1^T M u2| / sqrt(u1^T M u1 * u2^T M u2), in [0, 1], scale invariant.
double correlation(const Eigen::VectorXd& u1, const Eigen::VectorXd& u2,
                   const Eigen::SparseMatrix<double>& M);

struct TrackOptions {
  int steps = 10;               // uniform step points t_s = s/steps
  int order = 1;                // Taylor prediction order
  double match_threshold = 0.8; // abort a mode below this correlation
  double gap_tol = 1e-6;
  int quad_points = 0;
  int num_candidates = 0;       // 0: max tracked mode + 3
  double solver_tol = 1e-9;
};

struct TrackedMode {
  int initial_mode = 1;                 // 1-based index at t = 0
  std::vector<int> matched_index;       // per step, 1-based candidate index
  std::vector<double> lambda;           // per step
  std::vector<double> correlation;      // score of the accepted match (1 at step 0)
};

struct TrackingRun {
  std::vector<double> t;
  std::vector<TrackedMode> modes;
};

/// Multi-step eigenvalue tracking: per step, assemble and solve, predict
/// each tracked pair at the next step with an order-n Taylor expansion, and
/// match predictions to fresh candidates greedily by descending correlation,
/// one-to-one. Throws MultiplicityError if a tracked mode loses simplicity
/// and NoMatchError if the best remaining score falls below the threshold.
TrackingRun track(const MorphGeometry& geom, const DiscreteSpace& space,
                  const std::vector<int>& modes, const TrackOptions& options);

struct PredictionStudy {
  std::vector<int> orders;
  std::vector<double> deltas;
  Eigen::MatrixXd lambda_error;  // orders x deltas, relative
  Eigen::MatrixXd vector_error;  // orders x deltas, relative Euclidean
};

struct StudyOptions {
  double t0 = 0.0;
  double gap_tol = 1e-6;
  int quad_points = 0;
  double solver_tol = 1e-9;
};

/// Order-n Taylor prediction error against fresh solves at t0 + delta, for
/// n = 0..max_order and each step size. Fresh eigenvectors are rescaled to
/// the frozen-u_star normalization (which also aligns signs) before the
/// Euclidean error is taken.
PredictionStudy prediction_error_study(const MorphGeometry& geom, const DiscreteSpace& space,
                                       int mode, int max_order,
                                       const std::vector<double>& deltas,
                                       const StudyOptions& options = {});

}  // namespace igasens
