#include "basislab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "basislab/errors.hpp"

namespace basislab {

using nlohmann::json;

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kKernelRegression:
      return "kr";
    case ExperimentKind::kMatrixFactorization:
      return "smf";
    case ExperimentKind::kTensorDecomposition:
      return "ostd";
    case ExperimentKind::kLogistic:
      return "logistic";
    case ExperimentKind::kAckSynthetic:
      return "ack-synthetic";
  }
  return "unknown";
}

namespace {

ExperimentKind kind_from_name(const std::string& name) {
  if (name == "kr") return ExperimentKind::kKernelRegression;
  if (name == "smf") return ExperimentKind::kMatrixFactorization;
  if (name == "ostd") return ExperimentKind::kTensorDecomposition;
  if (name == "logistic") return ExperimentKind::kLogistic;
  if (name == "ack-synthetic") return ExperimentKind::kAckSynthetic;
  throw InputError("config: unknown kind '" + name + "'");
}

double require_positive_number(const json& j, const std::string& key) {
  if (!j.at(key).is_number()) {
    throw InputError("config: key '" + key + "' must be a number");
  }
  const double value = j.at(key).get<double>();
  if (!(value > 0.0)) {
    throw InputError("config: key '" + key + "' must be > 0");
  }
  return value;
}

Eigen::Index require_positive_integer(const json& j, const std::string& key) {
  if (!j.at(key).is_number_integer()) {
    throw InputError("config: key '" + key + "' must be an integer");
  }
  const long long value = j.at(key).get<long long>();
  if (value <= 0) {
    throw InputError("config: key '" + key + "' must be > 0");
  }
  return static_cast<Eigen::Index>(value);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw InputError("config: top level must be an object");
  }
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw InputError("config: missing string key 'kind'");
  }
  ExperimentConfig cfg;
  cfg.kind = kind_from_name(j.at("kind").get<std::string>());

  std::set<std::string> allowed = {"kind",      "eta",          "max_iters", "seed",
                                   "thresholds", "record_every", "output_path"};
  std::set<std::string> required = {"kind", "eta", "max_iters", "seed"};
  switch (cfg.kind) {
    case ExperimentKind::kKernelRegression:
      allowed.insert({"d", "sigma", "alpha"});
      required.insert({"d", "sigma", "alpha"});
      break;
    case ExperimentKind::kMatrixFactorization:
      allowed.insert({"d", "r_over", "sigma", "alpha"});
      required.insert({"d", "r_over", "sigma", "alpha"});
      break;
    case ExperimentKind::kTensorDecomposition:
      allowed.insert({"d", "r_over", "order_l", "sigma", "alpha", "gamma_align"});
      required.insert({"d", "r_over", "order_l", "sigma", "alpha", "gamma_align"});
      break;
    case ExperimentKind::kLogistic:
      allowed.insert({"sigma", "alpha"});
      required.insert({"sigma", "alpha"});
      break;
    case ExperimentKind::kAckSynthetic:
      allowed.insert({"classes", "features", "samples"});
      required.insert({"classes", "features", "samples"});
      break;
  }
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw InputError("config: unknown key '" + key + "' for kind " + kind_name(cfg.kind));
    }
  }
  for (const std::string& key : required) {
    if (!j.contains(key)) {
      throw InputError("config: missing required key '" + key + "'");
    }
  }

  if (j.contains("d")) cfg.d = require_positive_integer(j, "d");
  if (j.contains("r_over")) cfg.r_over = require_positive_integer(j, "r_over");
  if (j.contains("order_l")) {
    cfg.order_l = static_cast<int>(require_positive_integer(j, "order_l"));
    if (cfg.order_l < 3) {
      throw InputError("config: key 'order_l' must be >= 3");
    }
  }
  if (j.contains("classes")) cfg.classes = require_positive_integer(j, "classes");
  if (j.contains("features")) cfg.features = require_positive_integer(j, "features");
  if (j.contains("samples")) cfg.samples = require_positive_integer(j, "samples");
  if (j.contains("alpha")) cfg.alpha = require_positive_number(j, "alpha");
  cfg.eta = require_positive_number(j, "eta");
  if (j.contains("gamma_align")) {
    cfg.gamma_align = require_positive_number(j, "gamma_align");
    if (cfg.gamma_align >= 1.0) {
      throw InputError("config: key 'gamma_align' must lie in (0, 1)");
    }
  }

  if (!j.at("max_iters").is_number_integer() || j.at("max_iters").get<long long>() <= 0) {
    throw InputError("config: key 'max_iters' must be a positive integer");
  }
  cfg.max_iters = j.at("max_iters").get<std::size_t>();
  if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0) {
    throw InputError("config: key 'seed' must be a non-negative integer");
  }
  cfg.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("sigma")) {
    if (!j.at("sigma").is_array() || j.at("sigma").empty()) {
      throw InputError("config: key 'sigma' must be a non-empty array");
    }
    cfg.sigma.resize(static_cast<Eigen::Index>(j.at("sigma").size()));
    Eigen::Index i = 0;
    for (const auto& entry : j.at("sigma")) {
      if (!entry.is_number() || !(entry.get<double>() > 0.0)) {
        throw InputError("config: key 'sigma' entries must be positive numbers");
      }
      cfg.sigma(i++) = entry.get<double>();
    }
    for (Eigen::Index n = 1; n < cfg.sigma.size(); ++n) {
      if (cfg.sigma(n) > cfg.sigma(n - 1)) {
        throw InputError("config: key 'sigma' must be non-increasing");
      }
    }
    if (cfg.kind == ExperimentKind::kLogistic && cfg.sigma.size() != 1) {
      throw InputError("config: key 'sigma' must hold exactly one value for kind logistic");
    }
    if (cfg.d > 0 && cfg.sigma.size() > cfg.d) {
      throw InputError("config: key 'sigma' has more entries than 'd'");
    }
  }
  if (cfg.r_over > 0 && cfg.sigma.size() > 0 && cfg.r_over < cfg.sigma.size()) {
    throw InputError("config: key 'r_over' must be >= the number of sigma entries");
  }

  if (j.contains("thresholds")) {
    if (!j.at("thresholds").is_array() || j.at("thresholds").empty()) {
      throw InputError("config: key 'thresholds' must be a non-empty array");
    }
    cfg.thresholds.clear();
    for (const auto& entry : j.at("thresholds")) {
      if (!entry.is_number()) {
        throw InputError("config: key 'thresholds' entries must be numbers");
      }
      const double f = entry.get<double>();
      if (!(f > 0.0) || f > 1.0) {
        throw InputError("config: key 'thresholds' entries must lie in (0, 1]");
      }
      cfg.thresholds.push_back(f);
    }
  }
  if (j.contains("record_every")) {
    if (!j.at("record_every").is_number_integer() ||
        j.at("record_every").get<long long>() <= 0) {
      throw InputError("config: key 'record_every' must be a positive integer");
    }
    cfg.record_every = j.at("record_every").get<std::size_t>();
  }
  if (j.contains("output_path")) {
    if (!j.at("output_path").is_string()) {
      throw InputError("config: key 'output_path' must be a string");
    }
    cfg.output_path = j.at("output_path").get<std::string>();
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open config: " + path.string());
  }
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return parse_config_text(buffer.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  j["kind"] = kind_name(cfg.kind);
  j["eta"] = cfg.eta;
  j["max_iters"] = cfg.max_iters;
  j["seed"] = cfg.seed;
  j["thresholds"] = cfg.thresholds;
  j["record_every"] = cfg.record_every;
  if (!cfg.output_path.empty()) {
    j["output_path"] = cfg.output_path;
  }
  switch (cfg.kind) {
    case ExperimentKind::kKernelRegression:
      j["d"] = cfg.d;
      j["alpha"] = cfg.alpha;
      break;
    case ExperimentKind::kMatrixFactorization:
      j["d"] = cfg.d;
      j["r_over"] = cfg.r_over;
      j["alpha"] = cfg.alpha;
      break;
    case ExperimentKind::kTensorDecomposition:
      j["d"] = cfg.d;
      j["r_over"] = cfg.r_over;
      j["order_l"] = cfg.order_l;
      j["alpha"] = cfg.alpha;
      j["gamma_align"] = cfg.gamma_align;
      break;
    case ExperimentKind::kLogistic:
      j["alpha"] = cfg.alpha;
      break;
    case ExperimentKind::kAckSynthetic:
      j["classes"] = cfg.classes;
      j["features"] = cfg.features;
      j["samples"] = cfg.samples;
      break;
  }
  if (cfg.sigma.size() > 0) {
    std::vector<double> sigma(cfg.sigma.data(), cfg.sigma.data() + cfg.sigma.size());
    j["sigma"] = sigma;
  }
  return j.dump(2) + "\n";
}

}  // namespace basislab
