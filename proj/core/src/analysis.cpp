#include "igasens/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "igasens/jets.hpp"

namespace igasens {

TaylorModel make_taylor_model(const EigenpairJet& jet, double t0, bool with_vectors) {
  TaylorModel model;
  model.t0 = t0;
  model.lambda = jet.lambda;
  if (with_vectors) model.vectors = jet.vectors;
  return model;
}

double taylor_eval(const TaylorModel& model, double t) {
  const double delta = t - model.t0;
  double acc = 0.0;
  double power = 1.0;
  double factorial = 1.0;
  for (int k = 0; k < model.lambda.size(); ++k) {
    if (k > 0) {
      power *= delta;
      factorial *= k;
    }
    acc += model.lambda(k) * power / factorial;
  }
  return acc;
}

Eigen::VectorXd taylor_eval_vector(const TaylorModel& model, double t) {
  if (!model.vectors) throw ValidationError("taylor_eval_vector: model has no vector data");
  const double delta = t - model.t0;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(model.vectors->rows());
  double power = 1.0;
  double factorial = 1.0;
  for (int k = 0; k < model.vectors->cols(); ++k) {
    if (k > 0) {
      power *= delta;
      factorial *= k;
    }
    acc += (power / factorial) * model.vectors->col(k);
  }
  return acc;
}

double uniform_expectation(const TaylorModel& model, double a, double b) {
  if (!(a < b)) throw DomainError("uniform_expectation: requires a < b");
  // (1/(b-a)) integral of sum_k c_k (r - t0)^k dr, integrated monomial by
  // monomial in closed form.
  double acc = 0.0;
  double factorial = 1.0;
  double pow_b = b - model.t0;
  double pow_a = a - model.t0;
  for (int k = 0; k < model.lambda.size(); ++k) {
    if (k > 0) factorial *= k;
    acc += model.lambda(k) / factorial * (pow_b - pow_a) / ((k + 1) * (b - a));
    pow_b *= (b - model.t0);
    pow_a *= (a - model.t0);
  }
  return acc;
}

double correlation(const Eigen::VectorXd& u1, const Eigen::VectorXd& u2,
                   const Eigen::SparseMatrix<double>& M) {
  const double n1 = u1.dot(M * u1);
  const double n2 = u2.dot(M * u2);
  if (!(n1 > 0.0) || !(n2 > 0.0))
    throw DomainError("correlation: vectors must be nonzero in the M inner product");
  return std::abs(u1.dot(M * u2)) / std::sqrt(n1 * n2);
}

namespace {

// Greedy one-to-one assignment by descending score. Returns, per tracked
// mode, the chosen candidate column; throws when the best available score
// drops below the threshold.
std::vector<int> greedy_match(const Eigen::MatrixXd& scores, double threshold, int step) {
  const int n_modes = static_cast<int>(scores.rows());
  const int n_cand = static_cast<int>(scores.cols());
  struct Entry {
    double score;
    int mode, cand;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(n_modes * n_cand));
  for (int i = 0; i < n_modes; ++i)
    for (int j = 0; j < n_cand; ++j) entries.push_back({scores(i, j), i, j});
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.score > b.score; });

  std::vector<int> match(static_cast<std::size_t>(n_modes), -1);
  std::vector<char> taken(static_cast<std::size_t>(n_cand), 0);
  int assigned = 0;
  for (const Entry& e : entries) {
    if (match[static_cast<std::size_t>(e.mode)] >= 0 || taken[static_cast<std::size_t>(e.cand)])
      continue;
    if (e.score < threshold)
      throw NoMatchError(fmt::format(
          "tracking step {}: best correlation {:.4f} for tracked mode {} fell below the "
          "threshold {:.4f}",
          step, e.score, e.mode + 1, threshold));
    match[static_cast<std::size_t>(e.mode)] = e.cand;
    taken[static_cast<std::size_t>(e.cand)] = 1;
    if (++assigned == n_modes) break;
  }
  return match;
}

}  // namespace

TrackingRun track(const MorphGeometry& geom, const DiscreteSpace& space,
                  const std::vector<int>& modes, const TrackOptions& options) {
  if (modes.empty()) throw DomainError("track: no modes requested");
  if (options.steps < 1) throw DomainError("track: steps must be >= 1");
  const int max_mode = *std::max_element(modes.begin(), modes.end());
  if (max_mode < 1) throw DomainError("track: mode indices are 1-based");
  const int count = std::min<long>(space.num_dofs(),
                                   options.num_candidates > 0 ? options.num_candidates
                                                              : max_mode + 3);

  TrackingRun run;
  run.modes.reserve(modes.size());
  for (int m : modes) run.modes.push_back(TrackedMode{m, {m}, {}, {1.0}});
  for (int s = 0; s <= options.steps; ++s)
    run.t.push_back(static_cast<double>(s) / options.steps);

  AssembledSystem system = assemble(space, geom, run.t[0], options.order, options.quad_points);
  EigenSolution solution = solve_gevp(system, count, options.solver_tol);
  for (auto& tm : run.modes) tm.lambda.push_back(solution.values(tm.initial_mode - 1));

  std::vector<int> current(modes.begin(), modes.end());
  for (int s = 0; s < options.steps; ++s) {
    const double t_next = run.t[static_cast<std::size_t>(s + 1)];

    // Predict every tracked pair at the next step.
    std::vector<Eigen::VectorXd> predicted_vec;
    predicted_vec.reserve(run.modes.size());
    for (std::size_t i = 0; i < run.modes.size(); ++i) {
      EigenpairJet jet;
      try {
        jet = eigenpair_derivatives(system, solution, current[i], options.order,
                                    options.gap_tol);
      } catch (const MultiplicityError& e) {
        throw MultiplicityError(fmt::format("tracking step {}: {}", s, e.what()));
      }
      const TaylorModel model = make_taylor_model(jet, run.t[static_cast<std::size_t>(s)]);
      predicted_vec.push_back(taylor_eval_vector(model, t_next));
    }

    AssembledSystem next_system =
        assemble(space, geom, t_next, options.order, options.quad_points);
    EigenSolution next_solution = solve_gevp(next_system, count, options.solver_tol);

    Eigen::MatrixXd scores(run.modes.size(), count);
    for (std::size_t i = 0; i < run.modes.size(); ++i)
      for (int j = 0; j < count; ++j)
        scores(static_cast<Eigen::Index>(i), j) =
            correlation(predicted_vec[i], next_solution.vectors.col(j), next_system.M[0]);

    const std::vector<int> match = greedy_match(scores, options.match_threshold, s + 1);
    for (std::size_t i = 0; i < run.modes.size(); ++i) {
      current[i] = match[i] + 1;
      run.modes[i].matched_index.push_back(current[i]);
      run.modes[i].lambda.push_back(next_solution.values(match[i]));
      run.modes[i].correlation.push_back(scores(static_cast<Eigen::Index>(i), match[i]));
    }
    system = std::move(next_system);
    solution = std::move(next_solution);
  }
  return run;
}

PredictionStudy prediction_error_study(const MorphGeometry& geom, const DiscreteSpace& space,
                                       int mode, int max_order,
                                       const std::vector<double>& deltas,
                                       const StudyOptions& options) {
  if (deltas.empty()) throw DomainError("prediction_error_study: no step sizes given");
  const int count = std::min<long>(space.num_dofs(), mode + 3);

  AssembledSystem system = assemble(space, geom, options.t0, max_order, options.quad_points);
  EigenSolution base = solve_gevp(system, count, options.solver_tol);
  const EigenpairJet jet = eigenpair_derivatives(system, base, mode, max_order, options.gap_tol);
  const Eigen::VectorXd& u_star = jet.u_star;

  PredictionStudy study;
  for (int n = 0; n <= max_order; ++n) study.orders.push_back(n);
  study.deltas = deltas;
  study.lambda_error = Eigen::MatrixXd::Zero(max_order + 1, static_cast<Eigen::Index>(deltas.size()));
  study.vector_error = Eigen::MatrixXd::Zero(max_order + 1, static_cast<Eigen::Index>(deltas.size()));

  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const double t = options.t0 + deltas[di];
    AssembledSystem fresh_sys = assemble(space, geom, t, 0, options.quad_points);
    EigenSolution fresh = solve_gevp(fresh_sys, count, options.solver_tol);

    // Locate the followed mode among the fresh candidates using the
    // highest-order prediction.
    TaylorModel full = make_taylor_model(jet, options.t0);
    const Eigen::VectorXd predicted_full = taylor_eval_vector(full, t);
    int best = 0;
    double best_score = -1.0;
    for (int j = 0; j < count; ++j) {
      const double score = correlation(predicted_full, fresh.vectors.col(j), fresh_sys.M[0]);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    const double lambda_ref = fresh.values(best);
    // Rescale the fresh eigenvector to the tracked normalization
    // u_star^T M[t] u = 1; this also fixes the sign.
    const double scale = u_star.dot(fresh_sys.M[0] * fresh.vectors.col(best));
    if (scale == 0.0)
      throw NumericalRankError("prediction_error_study: candidate orthogonal to u_star");
    const Eigen::VectorXd u_ref = fresh.vectors.col(best) / scale;

    for (int n = 0; n <= max_order; ++n) {
      TaylorModel truncated;
      truncated.t0 = options.t0;
      truncated.lambda = jet.lambda.head(n + 1);
      truncated.vectors = jet.vectors.leftCols(n + 1);
      const double lambda_hat = taylor_eval(truncated, t);
      const Eigen::VectorXd u_hat = taylor_eval_vector(truncated, t);
      study.lambda_error(n, static_cast<Eigen::Index>(di)) =
          std::abs(lambda_hat - lambda_ref) / std::abs(lambda_ref);
      study.vector_error(n, static_cast<Eigen::Index>(di)) =
          (u_hat - u_ref).norm() / u_ref.norm();
    }
  }
  return study;
}

}  // namespace igasens
