// Command-line front end: experiment runner, logistic-map bounds, basis
// extraction/projection on snapshot matrices, and trajectory summaries.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "basislab/ack_projection.hpp"
#include "basislab/config.hpp"
#include "basislab/csv_io.hpp"
#include "basislab/errors.hpp"
#include "basislab/experiment.hpp"
#include "basislab/logistic_map.hpp"
#include "basislab/matrix_io.hpp"
#include "basislab/svg.hpp"
#include "basislab/trajectory.hpp"

namespace {

using namespace basislab;

nlohmann::json load_params(const std::string& path, const std::vector<std::string>& keys) {
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open params file: " + path);
  }
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("params: not valid JSON: ") + e.what());
  }
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw InputError("params: unknown key '" + key + "'");
    }
  }
  for (const std::string& key : keys) {
    if (!j.contains(key)) {
      throw InputError("params: missing key '" + key + "'");
    }
    if (!j.at(key).is_number()) {
      throw InputError("params: key '" + key + "' must be a number");
    }
  }
  return j;
}

void print_crossings(const RunSummary& summary) {
  for (std::size_t f = 0; f < summary.thresholds.size(); ++f) {
    std::printf("  crossings at fraction %g:", summary.thresholds[f]);
    for (const auto& t : summary.crossing_times[f]) {
      if (t.has_value()) {
        std::printf(" %zu", *t);
      } else {
        std::printf(" -");
      }
    }
    std::printf("\n");
  }
}

int run_command(const std::string& kind, const std::string& config_path,
                const std::string& out_path, const std::string& svg_path, bool svg_log) {
  ExperimentConfig cfg = parse_config(config_path);
  if (kind_name(cfg.kind) != kind) {
    throw InputError("config kind '" + kind_name(cfg.kind) + "' does not match subcommand '" +
                     kind + "'");
  }
  if (!out_path.empty()) {
    cfg.output_path = out_path;
  }
  if (cfg.output_path.empty()) {
    cfg.output_path = kind + "_trajectory.csv";
  }
  const ExperimentResult result = run_experiment(cfg);
  std::printf("wrote %s (%zu rows)\n", cfg.output_path.c_str(), result.trajectory.size());
  std::printf("final loss %.6e, final error %.6e, wall time %.2fs\n", result.summary.final_loss,
              result.summary.final_error, result.summary.wall_time_seconds);
  print_crossings(result.summary);
  if (result.summary.independence_score_max > 0.0 || !result.summary.dominance_per_signal.empty()) {
    std::printf("  max |cos| between coefficient gradients: %.3e\n",
                result.summary.independence_score_max);
  }
  for (std::size_t i = 0; i < result.summary.dominance_per_signal.size(); ++i) {
    const DominanceFit& fit = result.summary.dominance_per_signal[i];
    std::printf("  dominance fit signal %zu: C=%.4f gamma=%.4f r2=%.6f (n=%zu)\n", i + 1, fit.C,
                fit.gamma_exponent, fit.r_squared, fit.sample_count);
  }
  if (result.summary.monitor_steps_checked > 0) {
    std::printf("  one-step monitors: %zu/%zu passed\n", result.summary.monitor_steps_passed,
                result.summary.monitor_steps_checked);
  }
  if (result.summary.coupling_ratio_max > 0.0) {
    std::printf("  max coupling ratio B_12^2/B_22: %.6e\n", result.summary.coupling_ratio_max);
  }
  if (!svg_path.empty()) {
    SvgOptions options;
    options.log_y = svg_log;
    emit_svg(result.trajectory, svg_path, options);
    std::printf("wrote %s\n", svg_path.c_str());
  }
  return 0;
}

int logistic_command(const std::string& mode, const std::string& params_path,
                     const std::string& out_path) {
  if (mode == "bound") {
    const auto j = load_params(params_path, {"sigma", "eta", "alpha", "eps"});
    const std::size_t t = first_passage_bound(j["alpha"], j["eps"], j["sigma"], j["eta"]);
    std::printf("first-passage bound: %zu iterations\n", t);
    return 0;
  }
  if (mode == "separation") {
    const auto j = load_params(params_path, {"sigma1", "sigma2", "eta", "alpha", "eps"});
    const SeparationBound bound =
        separation_bound(j["sigma1"], j["sigma2"], j["eta"], j["alpha"], j["eps"]);
    std::printf("separation: T=%zu, y_bound=%.10g\n", bound.iterations, bound.y_bound);
    return 0;
  }
  // simulate
  const auto j = load_params(params_path, {"sigma", "eta", "alpha", "iterations"});
  const LogisticConfig cfg{j["sigma"], j["eta"], j["alpha"]};
  const std::vector<double> xs = logistic_iterate(cfg, j["iterations"].get<std::size_t>());
  CoefficientTrajectory traj;
  traj.labels = {"x"};
  for (std::size_t t = 0; t < xs.size(); ++t) {
    Eigen::VectorXd row(1);
    row(0) = xs[t];
    const double gap = std::abs(cfg.sigma - xs[t]);
    traj.append(t, row, 0.5 * gap * gap, gap);
  }
  const std::string path = out_path.empty() ? "logistic_trajectory.csv" : out_path;
  emit_csv(traj, path);
  std::printf("wrote %s (final x = %.10g)\n", path.c_str(), xs.back());
  return 0;
}

int ack_build_command(const std::string& w_path, const std::string& psi_path,
                      const std::string& out_path, double rank_tol) {
  FeatureSnapshot snapshot;
  snapshot.W = read_matrix_file(w_path);
  snapshot.Psi = read_matrix_file(psi_path);
  const AckBasis basis = build_ack_basis(snapshot, rank_tol);
  save_ack_basis(out_path, basis);
  std::printf("basis: rank %td, %zu triplets, wrote %s\n", basis.V_right.cols(),
              basis.triplets.size(), out_path.c_str());
  std::printf("singular values:");
  for (const BasisTriplet& triplet : basis.triplets) {
    std::printf(" %.10g", triplet.s);
  }
  std::printf("\n");
  return 0;
}

int ack_project_command(const std::string& w_path, const std::string& psi_path,
                        const std::string& basis_path, const std::string& out_path) {
  FeatureSnapshot snapshot;
  snapshot.W = read_matrix_file(w_path);
  snapshot.Psi = read_matrix_file(psi_path);
  const AckBasis basis = load_ack_basis(basis_path);
  const SnapshotProjection projection = project_snapshot(snapshot, basis);
  write_matrix_file(out_path, projection.coefficients.transpose());
  std::printf("coefficients:");
  for (Eigen::Index i = 0; i < projection.coefficients.size(); ++i) {
    std::printf(" %.10g", projection.coefficients(i));
  }
  std::printf("\noutside-span residual: %.6e\nwrote %s\n", projection.outside_span,
              out_path.c_str());
  return 0;
}

int diagnose_command(const std::string& traj_path, const std::string& targets_csv,
                     double fraction) {
  const CoefficientTrajectory traj = read_csv(traj_path);
  std::printf("%s: %zu rows, %zu coefficient columns, steps %zu..%zu\n", traj_path.c_str(),
              traj.size(), traj.labels.size(), traj.steps.front(), traj.steps.back());
  std::printf("final loss %.6e, final error %.6e\n", traj.loss.back(), traj.error.back());
  for (std::size_t c = 0; c < traj.labels.size(); ++c) {
    double lo = traj.coefficients[0](static_cast<Eigen::Index>(c));
    double hi = lo;
    double worst_backstep = 0.0;
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const double v = traj.coefficients[t](static_cast<Eigen::Index>(c));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (t > 0) {
        worst_backstep = std::max(
            worst_backstep, traj.coefficients[t - 1](static_cast<Eigen::Index>(c)) - v);
      }
    }
    std::printf("  %-18s final %.10g  range [%.4g, %.4g]  max backstep %.3e\n",
                traj.labels[c].c_str(),
                traj.coefficients.back()(static_cast<Eigen::Index>(c)), lo, hi, worst_backstep);
  }
  if (!targets_csv.empty()) {
    std::stringstream ss(targets_csv);
    std::vector<double> targets;
    std::string token;
    while (std::getline(ss, token, ',')) {
      targets.push_back(std::stod(token));
    }
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(traj.labels.size());
    for (std::size_t i = 0; i < targets.size() && i < traj.labels.size(); ++i) {
      padded(static_cast<Eigen::Index>(i)) = targets[i];
    }
    const auto crossings = crossing_times(traj, padded, fraction);
    std::printf("crossings at fraction %g:", fraction);
    for (std::size_t i = 0; i < targets.size() && i < crossings.size(); ++i) {
      if (crossings[i].has_value()) {
        std::printf(" %zu", *crossings[i]);
      } else {
        std::printf(" -");
      }
    }
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient-descent trajectory laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_path, svg_path, run_kind;
  bool svg_log = false;
  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("kind", run_kind, "kr|smf|ostd|ack-synthetic|logistic")
      ->required()
      ->check(CLI::IsMember({"kr", "smf", "ostd", "ack-synthetic", "logistic"}));
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--out", out_path, "trajectory CSV path (overrides config)");
  run->add_option("--svg", svg_path, "also write an SVG line plot");
  run->add_flag("--svg-log", svg_log, "log-scale y axis for the SVG");

  std::string logistic_mode, params_path, logistic_out;
  CLI::App* logistic = app.add_subcommand("logistic", "logistic-map bounds and simulation");
  logistic->add_option("mode", logistic_mode, "bound|separation|simulate")
      ->required()
      ->check(CLI::IsMember({"bound", "separation", "simulate"}));
  logistic->add_option("--params", params_path, "JSON parameter file")->required();
  logistic->add_option("--out", logistic_out, "CSV path for simulate");

  std::string w_path, psi_path, basis_path, ack_out;
  double rank_tol = 1e-12;
  CLI::App* ack = app.add_subcommand("ack", "basis extraction and projection");
  ack->require_subcommand(1);
  CLI::App* ack_build = ack->add_subcommand("build", "build a basis from a final snapshot");
  ack_build->add_option("--w", w_path, "last-layer matrix file")->required();
  ack_build->add_option("--psi", psi_path, "feature matrix file")->required();
  ack_build->add_option("--out", ack_out, "basis output file")->required();
  ack_build->add_option("--rank-tol", rank_tol, "relative singular value cutoff");
  CLI::App* ack_project = ack->add_subcommand("project", "project a snapshot onto a basis");
  ack_project->add_option("--w", w_path, "last-layer matrix file")->required();
  ack_project->add_option("--psi", psi_path, "feature matrix file")->required();
  ack_project->add_option("--basis", basis_path, "basis file from 'ack build'")->required();
  ack_project->add_option("--out", ack_out, "coefficient output matrix file")->required();

  std::string traj_path, targets_csv;
  double fraction = 0.99;
  CLI::App* diagnose = app.add_subcommand("diagnose", "summarize a trajectory CSV");
  diagnose->add_option("--traj", traj_path, "trajectory CSV")->required();
  diagnose->add_option("--targets", targets_csv, "comma-separated crossing targets");
  diagnose->add_option("--fraction", fraction, "crossing fraction (default 0.99)");

  try {
    app.parse(argc, argv);
    if (run->parsed()) {
      return run_command(run_kind, config_path, out_path, svg_path, svg_log);
    }
    if (logistic->parsed()) {
      return logistic_command(logistic_mode, params_path, logistic_out);
    }
    if (ack->parsed()) {
      if (ack_build->parsed()) {
        return ack_build_command(w_path, psi_path, ack_out, rank_tol);
      }
      return ack_project_command(w_path, psi_path, basis_path, ack_out);
    }
    if (diagnose->parsed()) {
      return diagnose_command(traj_path, targets_csv, fraction);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
