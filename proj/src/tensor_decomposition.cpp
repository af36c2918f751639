#include "basislab/tensor_decomposition.hpp"

#include <cmath>
#include <string>

#include "basislab/errors.hpp"
#include "basislab/random.hpp"

namespace basislab {

namespace {

double ipow(double x, int n) {
  double out = 1.0;
  for (int i = 0; i < n; ++i) {
    out *= x;
  }
  return out;
}

Eigen::MatrixXd elementwise_ipow(const Eigen::MatrixXd& m, int n) {
  return m.unaryExpr([n](double x) { return ipow(x, n); });
}

double offdiag_abs_max(const Eigen::MatrixXd& v) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (i != j) {
        out = std::max(out, std::abs(v(i, j)));
      }
    }
  }
  return out;
}

}  // namespace

OSTDProblem make_ostd_problem(const Eigen::MatrixXd& Z, Eigen::Index r_over, int order_l,
                              const Eigen::VectorXd& sigma_head) {
  const Eigen::Index d = Z.rows();
  if (Z.cols() != d || d == 0) {
    throw InputError("ostd problem: Z must be square");
  }
  if ((Z.transpose() * Z - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12) {
    throw InputError("ostd problem: Z is not orthonormal");
  }
  if (order_l < 3) {
    throw InputError("ostd problem: tensor order must be >= 3");
  }
  const Eigen::Index r = sigma_head.size();
  if (r == 0 || r > d) {
    throw InputError("ostd problem: invalid rank");
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    if (!(sigma_head(i) > 0.0)) {
      throw InputError("ostd problem: nonzero sigma entries must be positive");
    }
    if (i > 0 && sigma_head(i) > sigma_head(i - 1)) {
      throw InputError("ostd problem: sigma must be non-increasing");
    }
  }
  if (r_over < r) {
    throw InputError("ostd problem: r_over must be >= the true rank");
  }
  OSTDProblem problem;
  problem.d = d;
  problem.r = r;
  problem.r_over = r_over;
  problem.order_l = order_l;
  problem.Z = Z;
  problem.sigma = Eigen::VectorXd::Zero(d);
  problem.sigma.head(r) = sigma_head;
  problem.kappa = sigma_head(0) / sigma_head(r - 1);
  return problem;
}

OSTDProblem make_ostd_problem(Eigen::Index d, Eigen::Index r_over, int order_l,
                              const Eigen::VectorXd& sigma_head, std::uint64_t seed) {
  Rng rng(seed);
  return make_ostd_problem(random_orthonormal(d, rng), r_over, order_l, sigma_head);
}

double ostd_loss(const OSTDState& state, const OSTDProblem& problem) {
  if (state.U.rows() != problem.d || state.U.cols() != problem.r_over) {
    throw InputError("ostd_loss: factor dimensions do not match the problem");
  }
  const int l = problem.order_l;
  const Eigen::MatrixXd gram = state.U.transpose() * state.U;      // r' x r'
  const Eigen::MatrixXd v = state.U.transpose() * problem.Z;       // r' x d
  const double self_term = elementwise_ipow(gram, l).sum();
  const double cross_term = (elementwise_ipow(v, l) * problem.sigma).sum();
  return 0.5 * (self_term - 2.0 * cross_term + problem.sigma.squaredNorm());
}

Eigen::MatrixXd ostd_gradient(const OSTDState& state, const OSTDProblem& problem) {
  if (state.U.rows() != problem.d || state.U.cols() != problem.r_over) {
    throw InputError("ostd_gradient: factor dimensions do not match the problem");
  }
  const int l = problem.order_l;
  const Eigen::MatrixXd gram = state.U.transpose() * state.U;
  const Eigen::MatrixXd v = state.U.transpose() * problem.Z;  // r' x d
  // target side: column i needs sum_j sigma_j V_ij^{l-1} z_j
  const Eigen::MatrixXd weights =
      problem.sigma.asDiagonal() * elementwise_ipow(v, l - 1).transpose();  // d x r'
  return static_cast<double>(l) *
         (state.U * elementwise_ipow(gram, l - 1) - problem.Z * weights);
}

OSTDState ostd_gd_step(const OSTDState& state, const OSTDProblem& problem, double eta) {
  if (!(eta > 0.0)) {
    throw InputError("ostd_gd_step: eta must be > 0");
  }
  OSTDState next;
  next.U = state.U - eta * ostd_gradient(state, problem);
  next.iteration = state.iteration + 1;
  if (next.U.cwiseAbs().maxCoeff() > kDivergenceLimit) {
    throw DivergenceError("ostd_gd_step: iterate exceeded divergence limit at step " +
                          std::to_string(next.iteration));
  }
  return next;
}

VMatrix v_matrix(const OSTDState& state, const OSTDProblem& problem) {
  if (state.U.rows() != problem.d) {
    throw InputError("v_matrix: factor dimension mismatch");
  }
  VMatrix out;
  out.V = state.U.transpose() * problem.Z;
  out.offdiag_max = offdiag_abs_max(out.V);
  return out;
}

MultiIndex make_multi_index(std::vector<int> entries, Eigen::Index d) {
  if (entries.empty()) {
    throw InputError("multi index: must be non-empty");
  }
  MultiIndex lambda;
  lambda.counts.assign(static_cast<std::size_t>(d), 0);
  for (const int k : entries) {
    if (k < 0 || k >= d) {
      throw InputError("multi index: entry out of range");
    }
    ++lambda.counts[static_cast<std::size_t>(k)];
  }
  lambda.entries = std::move(entries);
  return lambda;
}

double beta_lambda(const VMatrix& v, const MultiIndex& lambda) {
  if (static_cast<Eigen::Index>(lambda.counts.size()) != v.V.cols()) {
    throw InputError("beta_lambda: multi index dimension mismatch");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < v.V.rows(); ++i) {
    double prod = 1.0;
    for (std::size_t k = 0; k < lambda.counts.size(); ++k) {
      if (lambda.counts[k] > 0) {
        prod *= ipow(v.V(i, static_cast<Eigen::Index>(k)), lambda.counts[k]);
      }
    }
    total += prod;
  }
  return total;
}

VMatrix v_step_reference(const VMatrix& v, const OSTDProblem& problem, double eta) {
  const Eigen::Index d = problem.d;
  const int l = problem.order_l;
  const Eigen::Index rp = problem.r_over;
  if (v.V.rows() != rp || v.V.cols() != d) {
    throw InputError("v_step_reference: V dimension mismatch");
  }
  double count = 1.0;
  for (int k = 0; k < l; ++k) {
    count *= static_cast<double>(d);
    if (count > 1e6) {
      throw InputError("v_step_reference: enumeration over d^l multi-indices is infeasible");
    }
  }

  Eigen::MatrixXd increment = Eigen::MatrixXd::Zero(rp, d);
  std::vector<int> entries(static_cast<std::size_t>(l), 0);
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  counts[0] = l;
  while (true) {
    // beta for this multi-index and its true value
    double beta = 0.0;
    for (Eigen::Index i = 0; i < rp; ++i) {
      double prod = 1.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const int c = counts[static_cast<std::size_t>(k)];
        if (c > 0) {
          prod *= ipow(v.V(i, k), c);
        }
      }
      beta += prod;
    }
    const bool pure = counts[static_cast<std::size_t>(entries[0])] == l;
    const double beta_true =
        pure && entries[0] < problem.r ? problem.sigma(entries[0]) : 0.0;
    const double mismatch = beta_true - beta;

    for (Eigen::Index j = 0; j < d; ++j) {
      const int s = counts[static_cast<std::size_t>(j)];
      if (s == 0) {
        continue;
      }
      for (Eigen::Index i = 0; i < rp; ++i) {
        double prod = 1.0;
        for (Eigen::Index k = 0; k < d; ++k) {
          const int c = counts[static_cast<std::size_t>(k)];
          if (c > 0 && k != j) {
            prod *= ipow(v.V(i, k), c);
          }
        }
        increment(i, j) += static_cast<double>(s) * mismatch * prod * ipow(v.V(i, j), s - 1);
      }
    }

    // odometer over ordered multi-indices
    int pos = l - 1;
    while (pos >= 0) {
      --counts[static_cast<std::size_t>(entries[static_cast<std::size_t>(pos)])];
      if (entries[static_cast<std::size_t>(pos)] + 1 < d) {
        ++entries[static_cast<std::size_t>(pos)];
        ++counts[static_cast<std::size_t>(entries[static_cast<std::size_t>(pos)])];
        break;
      }
      entries[static_cast<std::size_t>(pos)] = 0;
      ++counts[0];
      --pos;
    }
    if (pos < 0) {
      break;
    }
  }

  VMatrix out;
  out.V = v.V + eta * increment;
  out.offdiag_max = offdiag_abs_max(out.V);
  return out;
}

OSTDState ostd_aligned_init(const OSTDProblem& problem, double alpha, double gamma_align,
                            std::uint64_t seed) {
  if (!(alpha > 0.0)) {
    throw InputError("ostd_aligned_init: alpha must be > 0");
  }
  if (!(gamma_align >= 0.0 && gamma_align < 1.0)) {
    throw InputError("ostd_aligned_init: gamma_align must lie in [0, 1)");
  }
  if (problem.r_over > problem.d) {
    throw InputError("ostd_aligned_init: alignment needs r_over <= d");
  }
  if (problem.d == 1 && gamma_align > 0.0) {
    throw InputError("ostd_aligned_init: no direction orthogonal to z_1 in dimension 1");
  }
  const double norm0 = std::pow(alpha, 1.0 / static_cast<double>(problem.order_l));
  const double cosine = std::sqrt(1.0 - gamma_align * gamma_align);
  Rng rng(seed);
  OSTDState state;
  state.U.resize(problem.d, problem.r_over);
  for (Eigen::Index i = 0; i < problem.r_over; ++i) {
    const Eigen::VectorXd zi = problem.Z.col(i);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(problem.d);
    if (gamma_align > 0.0) {
      double norm = 0.0;
      do {
        const Eigen::VectorXd g = gaussian_vector(problem.d, rng);
        w = g - g.dot(zi) * zi;
        norm = w.norm();
      } while (norm < 1e-12);
      w /= norm;
    }
    state.U.col(i) = norm0 * (cosine * zi + gamma_align * w);
  }
  state.iteration = 0;
  return state;
}

EnvelopeCheck beta_envelope_check(const VMatrix& v, const OSTDProblem& problem) {
  const Eigen::Index d = problem.d;
  const int l = problem.order_l;
  const Eigen::Index diag_count = std::min(problem.r_over, d);
  const double mu = std::pow(problem.sigma(0), 1.0 / static_cast<double>(l));
  const double voff = v.offdiag_max;

  double diag_residual_pow = 0.0;  // max_{j > r} |v_jj|^l
  for (Eigen::Index j = problem.r; j < diag_count; ++j) {
    diag_residual_pow = std::max(diag_residual_pow, ipow(std::abs(v.V(j, j)), l));
  }
  const double mu_lm1 = std::pow(problem.sigma(0),
                                 static_cast<double>(l - 1) / static_cast<double>(l));

  EnvelopeCheck out;
  out.applicable =
      voff <= mu * std::pow(static_cast<double>(d), -1.0 / static_cast<double>(l - 1)) &&
      diag_residual_pow <= mu_lm1 * voff;
  if (!out.applicable) {
    return out;
  }

  const double voff_pow = ipow(voff, l);
  out.diag_ok = true;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double vjj = j < problem.r_over ? v.V(j, j) : 0.0;
    MultiIndex lambda;
    lambda.entries.assign(static_cast<std::size_t>(l), static_cast<int>(j));
    lambda.counts.assign(static_cast<std::size_t>(d), 0);
    lambda.counts[static_cast<std::size_t>(j)] = l;
    const double beta = beta_lambda(v, lambda);
    if (std::abs(beta - ipow(vjj, l)) > static_cast<double>(problem.r_over) * voff_pow) {
      out.diag_ok = false;
      break;
    }
  }

  const double mixed_cap = 2.0 * static_cast<double>(problem.r) * mu_lm1 * voff;
  out.offdiag_ok = true;
  // All (a once, b l-1 times) patterns plus a fixed pseudo-random batch of
  // general mixed multi-indices.
  auto check_lambda = [&](const MultiIndex& lambda) {
    if (std::abs(beta_lambda(v, lambda)) > mixed_cap) {
      out.offdiag_ok = false;
    }
  };
  for (Eigen::Index a = 0; a < d && out.offdiag_ok; ++a) {
    for (Eigen::Index b = 0; b < d && out.offdiag_ok; ++b) {
      if (a == b) {
        continue;
      }
      std::vector<int> entries(static_cast<std::size_t>(l), static_cast<int>(b));
      entries[0] = static_cast<int>(a);
      check_lambda(make_multi_index(std::move(entries), d));
    }
  }
  Rng rng(0x6d69786564u);  // fixed seed: the sample is part of the definition
  for (int trial = 0; trial < 100 && out.offdiag_ok; ++trial) {
    std::vector<int> entries(static_cast<std::size_t>(l));
    bool mixed = false;
    for (int k = 0; k < l; ++k) {
      entries[static_cast<std::size_t>(k)] =
          static_cast<int>(rng.uniform() * static_cast<double>(d));
      if (entries[static_cast<std::size_t>(k)] != entries[0]) {
        mixed = true;
      }
    }
    if (!mixed) {
      entries[0] = (entries[0] + 1) % static_cast<int>(d);
    }
    check_lambda(make_multi_index(std::move(entries), d));
  }
  return out;
}

StepMonitor ostd_step_monitor(const VMatrix& current, const VMatrix& next,
                              const OSTDProblem& problem, double eta) {
  const Eigen::Index d = problem.d;
  const int l = problem.order_l;
  const double sigma1 = problem.sigma(0);
  const double mu = std::pow(sigma1, 1.0 / static_cast<double>(l));
  const double mu_lm1 =
      std::pow(sigma1, static_cast<double>(l - 1) / static_cast<double>(l));
  const Eigen::Index diag_count = std::min(problem.r_over, d);
  const double voff = current.offdiag_max;

  StepMonitor out;
  const double pre_tol = 1e-12 * (1.0 + mu);  // exact fixed points sit on the boundary
  bool preconditions =
      eta > 0.0 && eta <= 1.0 / (static_cast<double>(l) * sigma1) &&
      voff <= mu * std::pow(static_cast<double>(d), -1.0 / static_cast<double>(l - 1)) + pre_tol;
  for (Eigen::Index i = 0; i < diag_count && preconditions; ++i) {
    if (current.V(i, i) > mu + pre_tol) {
      preconditions = false;
    }
  }
  out.applicable = preconditions;
  if (!preconditions) {
    return out;
  }

  const double voff_pow = ipow(voff, l);
  const double d_pow_lm1 = ipow(static_cast<double>(d), l - 1);
  const double d_pow_l = ipow(static_cast<double>(d), l);
  const double eta_l = eta * static_cast<double>(l);
  // Slack guards against false negatives at exact fixed points.
  auto tol = [](double reference) { return 1e-10 * (1.0 + std::abs(reference)); };

  out.signal_ok = true;
  for (Eigen::Index i = 0; i < problem.r; ++i) {
    const double vii = current.V(i, i);
    const double floor =
        vii +
        eta_l * (problem.sigma(i) - ipow(vii, l) - 2.0 * d_pow_lm1 * ipow(vii, l - 2) * voff * voff) *
            ipow(vii, l - 1) -
        static_cast<double>(l) * d_pow_l * eta * mu_lm1 * voff_pow;
    if (next.V(i, i) < floor - tol(floor)) {
      out.signal_ok = false;
      break;
    }
  }

  out.diag_residual_ok = true;
  for (Eigen::Index i = problem.r; i < diag_count; ++i) {
    const double vii = std::abs(current.V(i, i));
    const double cap = vii - eta_l * ipow(vii, 2 * l - 1) +
                       2.0 * eta_l * d_pow_l * mu_lm1 * voff_pow;
    if (std::abs(next.V(i, i)) > cap + tol(cap)) {
      out.diag_residual_ok = false;
      break;
    }
  }

  const double off_cap = voff + 3.0 * eta_l * sigma1 * ipow(voff, l - 1);
  out.offdiag_ok = next.offdiag_max <= off_cap + tol(off_cap);
  return out;
}

double ostd_tensor_error(const OSTDState& state, const OSTDProblem& problem) {
  return 2.0 * ostd_loss(state, problem);
}

Eigen::MatrixXd ostd_signal_gradient(const VMatrix& v, const OSTDProblem& problem,
                                     Eigen::Index i) {
  if (i < 0 || i >= problem.d) {
    throw InputError("ostd_signal_gradient: index out of range");
  }
  const int l = problem.order_l;
  Eigen::RowVectorXd scale(v.V.rows());
  for (Eigen::Index j = 0; j < v.V.rows(); ++j) {
    scale(j) = static_cast<double>(l) * ipow(v.V(j, i), l - 1);
  }
  return problem.Z.col(i) * scale;  // d x r_over
}

double ostd_signal_gradient_norm(const VMatrix& v, const OSTDProblem& problem, Eigen::Index i) {
  if (i < 0 || i >= problem.d) {
    throw InputError("ostd_signal_gradient_norm: index out of range");
  }
  const int l = problem.order_l;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < v.V.rows(); ++j) {
    sum += ipow(v.V(j, i), 2 * (l - 1));
  }
  return static_cast<double>(l) * std::sqrt(sum);
}

CoefficientTrajectory run_ostd(const OSTDProblem& problem, double alpha, double gamma_align,
                               double eta, std::size_t iterations, std::uint64_t seed,
                               std::size_t record_every, const OSTDObserver& observe) {
  if (record_every == 0) {
    throw InputError("run_ostd: record_every must be >= 1");
  }
  if (!(eta > 0.0)) {
    throw InputError("run_ostd: eta must be > 0");
  }
  OSTDState state = ostd_aligned_init(problem, alpha, gamma_align, seed);

  CoefficientTrajectory traj;
  for (Eigen::Index i = 0; i < problem.r; ++i) {
    traj.labels.push_back("beta_" + std::to_string(i + 1));
  }
  traj.labels.push_back("offdiag_max");
  traj.labels.push_back("diag_residual_max");

  const int l = problem.order_l;
  const Eigen::Index r = problem.r;
  const Eigen::Index diag_count = std::min(problem.r_over, problem.d);
  for (std::size_t t = 0;; ++t) {
    const VMatrix v = v_matrix(state, problem);
    if (observe) {
      observe(t, state, v);
    }
    if (t % record_every == 0 || t == iterations) {
      Eigen::VectorXd row(r + 2);
      for (Eigen::Index i = 0; i < r; ++i) {
        double beta = 0.0;
        for (Eigen::Index j = 0; j < problem.r_over; ++j) {
          beta += ipow(v.V(j, i), l);
        }
        row(i) = beta;
      }
      row(r) = v.offdiag_max;
      double diag_residual = 0.0;
      for (Eigen::Index j = r; j < diag_count; ++j) {
        diag_residual = std::max(diag_residual, std::abs(v.V(j, j)));
      }
      row(r + 1) = diag_residual;
      const double loss = ostd_loss(state, problem);
      traj.append(t, row, loss, 2.0 * loss);
    }
    if (t == iterations) {
      break;
    }
    state = ostd_gd_step(state, problem, eta);
  }
  return traj;
}

}  // namespace basislab
