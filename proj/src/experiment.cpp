#include "basislab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

#include "basislab/ack_projection.hpp"
#include "basislab/csv_io.hpp"
#include "basislab/errors.hpp"
#include "basislab/kernel_regression.hpp"
#include "basislab/logistic_map.hpp"
#include "basislab/matrix_factorization.hpp"
#include "basislab/tensor_decomposition.hpp"

namespace basislab {

namespace {

using DominanceSamples = std::vector<std::vector<std::pair<double, double>>>;

void fit_dominance(const DominanceSamples& samples, RunSummary& summary) {
  for (const auto& series : samples) {
    std::vector<std::pair<double, double>> positive;
    for (const auto& [beta, grad] : series) {
      if (beta > 0.0 && grad > 0.0) {
        positive.push_back({beta, grad});
      }
    }
    if (positive.size() >= 2) {
      try {
        summary.dominance_per_signal.push_back(dominance_fit(positive));
      } catch (const InputError&) {
        // degenerate series (constant coefficient); nothing to report
      }
    }
  }
}

void fill_crossings(const CoefficientTrajectory& traj, const Eigen::VectorXd& targets,
                    const std::vector<double>& thresholds, RunSummary& summary) {
  summary.thresholds = thresholds;
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(traj.labels.size());
  padded.head(targets.size()) = targets;  // auxiliary columns carry no target
  for (const double fraction : thresholds) {
    auto all = crossing_times(traj, padded, fraction);
    all.resize(static_cast<std::size_t>(targets.size()));
    summary.crossing_times.push_back(std::move(all));
  }
}

ExperimentResult run_kr_experiment(const ExperimentConfig& cfg) {
  Eigen::VectorXd theta_star = Eigen::VectorXd::Zero(cfg.d);
  theta_star.head(cfg.sigma.size()) = cfg.sigma;
  const KRProblem problem = make_kr_problem(theta_star);

  ExperimentResult result;
  result.trajectory = run_kr(problem, cfg.alpha, cfg.eta, cfg.max_iters, cfg.record_every);

  const IndependenceScore independence =
      gradient_independence_score(kr_coefficient_gradients(cfg.d));
  result.summary.independence_score_max = independence.score;

  DominanceSamples samples(static_cast<std::size_t>(problem.k));
  for (std::size_t t = 0; t < result.trajectory.size(); ++t) {
    for (std::size_t i = 0; i < problem.k; ++i) {
      // gradient rows are unit coordinate directions
      samples[i].push_back(
          {std::abs(result.trajectory.coefficients[t](static_cast<Eigen::Index>(i))), 1.0});
    }
  }
  fit_dominance(samples, result.summary);
  fill_crossings(result.trajectory, cfg.sigma, cfg.thresholds, result.summary);
  return result;
}

ExperimentResult run_smf_experiment(const ExperimentConfig& cfg) {
  const SMFProblem problem = make_smf_problem(cfg.d, cfg.r_over, cfg.sigma, cfg.seed);
  ExperimentResult result;
  DominanceSamples samples(static_cast<std::size_t>(problem.r));
  double independence_max = 0.0;
  double coupling_max = 0.0;

  const auto observe = [&](std::size_t t, const SMFState& state, const BetaMatrix& beta) {
    if (beta.B(1, 1) > 0.0) {
      coupling_max = std::max(coupling_max, smf_coupling_ratio(beta));
    }
    if (t % cfg.record_every != 0 && t != cfg.max_iters) {
      return;
    }
    Eigen::MatrixXd rows(problem.r, problem.d * problem.r_over);
    for (Eigen::Index i = 0; i < problem.r; ++i) {
      const Eigen::MatrixXd grad = smf_coefficient_gradient(state, problem, i, i);
      rows.row(i) = Eigen::Map<const Eigen::VectorXd>(grad.data(), grad.size());
      samples[static_cast<std::size_t>(i)].push_back({std::abs(beta.B(i, i)), grad.norm()});
    }
    independence_max = std::max(independence_max, gradient_independence_score(rows).score);
  };

  result.trajectory =
      run_smf(problem, cfg.alpha, cfg.eta, cfg.max_iters, cfg.seed, cfg.record_every, observe);
  result.summary.independence_score_max = independence_max;
  result.summary.coupling_ratio_max = coupling_max;
  fit_dominance(samples, result.summary);
  fill_crossings(result.trajectory, cfg.sigma, cfg.thresholds, result.summary);
  return result;
}

ExperimentResult run_ostd_experiment(const ExperimentConfig& cfg) {
  const OSTDProblem problem =
      make_ostd_problem(cfg.d, cfg.r_over, cfg.order_l, cfg.sigma, cfg.seed);
  ExperimentResult result;
  DominanceSamples samples(static_cast<std::size_t>(problem.r));
  double independence_max = 0.0;
  std::size_t checked = 0;
  std::size_t passed = 0;
  bool have_previous = false;
  VMatrix previous;

  const auto observe = [&](std::size_t t, const OSTDState&, const VMatrix& v) {
    if (have_previous) {
      const StepMonitor monitor = ostd_step_monitor(previous, v, problem, cfg.eta);
      if (monitor.applicable) {
        ++checked;
        if (monitor.signal_ok && monitor.diag_residual_ok && monitor.offdiag_ok) {
          ++passed;
        }
      }
    }
    previous = v;
    have_previous = true;

    if (t % cfg.record_every != 0 && t != cfg.max_iters) {
      return;
    }
    Eigen::MatrixXd rows(problem.r, problem.d * problem.r_over);
    for (Eigen::Index i = 0; i < problem.r; ++i) {
      const Eigen::MatrixXd grad = ostd_signal_gradient(v, problem, i);
      rows.row(i) = Eigen::Map<const Eigen::VectorXd>(grad.data(), grad.size());
      double beta = 0.0;
      for (Eigen::Index j = 0; j < problem.r_over; ++j) {
        double term = 1.0;
        for (int p = 0; p < problem.order_l; ++p) {
          term *= v.V(j, i);
        }
        beta += term;
      }
      samples[static_cast<std::size_t>(i)].push_back({std::abs(beta), grad.norm()});
    }
    independence_max = std::max(independence_max, gradient_independence_score(rows).score);
  };

  result.trajectory = run_ostd(problem, cfg.alpha, cfg.gamma_align, cfg.eta, cfg.max_iters,
                               cfg.seed, cfg.record_every, observe);
  result.summary.independence_score_max = independence_max;
  result.summary.monitor_steps_checked = checked;
  result.summary.monitor_steps_passed = passed;
  fit_dominance(samples, result.summary);
  fill_crossings(result.trajectory, cfg.sigma, cfg.thresholds, result.summary);
  return result;
}

ExperimentResult run_logistic_experiment(const ExperimentConfig& cfg) {
  const LogisticConfig logistic{cfg.sigma(0), cfg.eta, cfg.alpha};
  const std::vector<double> xs = logistic_iterate(logistic, cfg.max_iters);

  ExperimentResult result;
  result.trajectory.labels = {"x"};
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (t % cfg.record_every != 0 && t + 1 != xs.size()) {
      continue;
    }
    Eigen::VectorXd row(1);
    row(0) = xs[t];
    const double gap = std::abs(logistic.sigma - xs[t]);
    result.trajectory.append(t, row, 0.5 * gap * gap, gap);
  }
  fill_crossings(result.trajectory, cfg.sigma, cfg.thresholds, result.summary);
  return result;
}

ExperimentResult run_ack_experiment(const ExperimentConfig& cfg) {
  const std::vector<FeatureSnapshot> snapshots = synth_linear_trajectory(
      cfg.classes, cfg.features, cfg.samples, cfg.max_iters, cfg.eta, cfg.seed);
  const AckBasis basis = build_ack_basis(snapshots.back());
  const Eigen::MatrixXd& psi = snapshots.front().Psi;
  const Eigen::MatrixXd& w_star_proxy = snapshots.back().W;  // converged layer

  ExperimentResult result;
  for (std::size_t i = 0; i < basis.triplets.size(); ++i) {
    result.trajectory.labels.push_back("beta_" + std::to_string(i + 1));
  }
  const double n = static_cast<double>(cfg.samples);
  for (std::size_t t = 0; t < snapshots.size(); ++t) {
    if (t % cfg.record_every != 0 && t + 1 != snapshots.size()) {
      continue;
    }
    const SnapshotProjection projection = project_snapshot(snapshots[t], basis);
    const double gap = ((snapshots[t].W - w_star_proxy) * psi).norm() / std::sqrt(n);
    result.trajectory.append(t, projection.coefficients, 0.5 * gap * gap, gap);
  }
  Eigen::VectorXd targets(static_cast<Eigen::Index>(basis.triplets.size()));
  for (std::size_t i = 0; i < basis.triplets.size(); ++i) {
    targets(static_cast<Eigen::Index>(i)) = basis.triplets[i].s;
  }
  fill_crossings(result.trajectory, targets, cfg.thresholds, result.summary);
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentResult result;
  switch (cfg.kind) {
    case ExperimentKind::kKernelRegression:
      result = run_kr_experiment(cfg);
      break;
    case ExperimentKind::kMatrixFactorization:
      result = run_smf_experiment(cfg);
      break;
    case ExperimentKind::kTensorDecomposition:
      result = run_ostd_experiment(cfg);
      break;
    case ExperimentKind::kLogistic:
      result = run_logistic_experiment(cfg);
      break;
    case ExperimentKind::kAckSynthetic:
      result = run_ack_experiment(cfg);
      break;
  }
  result.summary.final_loss = result.trajectory.loss.back();
  result.summary.final_error = result.trajectory.error.back();
  if (!cfg.output_path.empty()) {
    emit_csv(result.trajectory, cfg.output_path);
  }
  result.summary.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace basislab
