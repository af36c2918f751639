#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "basislab/errors.hpp"
#include "basislab/kernel_regression.hpp"
#include "basislab/trajectory.hpp"

using namespace basislab;

namespace {

KRProblem reference_problem() {
  Eigen::VectorXd theta_star = Eigen::VectorXd::Zero(20);
  theta_star(0) = 10.0;
  theta_star(1) = 5.0;
  theta_star(2) = 3.0;
  theta_star(3) = 1.0;
  return make_kr_problem(theta_star);
}

}  // namespace

TEST_CASE("problem validation") {
  Eigen::VectorXd interior_zero(3);
  interior_zero << 1.0, 0.0, 2.0;
  CHECK_THROWS_AS(make_kr_problem(interior_zero), InputError);

  Eigen::VectorXd increasing(3);
  increasing << 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(make_kr_problem(increasing), InputError);
}

TEST_CASE("gd step: fixed point and forced arithmetic") {
  const KRProblem one = make_kr_problem(Eigen::VectorXd::Ones(1));
  CHECK(kr_gd_step(Eigen::VectorXd::Ones(1), 0.5, one)(0) == doctest::Approx(1.0));
  CHECK(kr_gd_step(Eigen::VectorXd::Zero(1), 0.5, one)(0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(kr_gd_step(Eigen::VectorXd::Zero(1), 1.5, one), InputError);
}

TEST_CASE("closed form: identity at t=0 and frozen evaluations") {
  const KRProblem problem = reference_problem();
  const Eigen::VectorXd theta0 = Eigen::VectorXd::Constant(20, 5e-7);
  CHECK(kr_closed_form(0, 0, theta0, 0.4, problem) == doctest::Approx(5e-7));
  // signal: 10 - 0.6^5 (10 - 5e-7)
  CHECK(kr_closed_form(0, 5, theta0, 0.4, problem) ==
        doctest::Approx(9.22240003888).epsilon(1e-12));
  // residual: 5e-7 * 0.6^10
  CHECK(kr_closed_form(7, 10, theta0, 0.4, problem) ==
        doctest::Approx(3.0233088e-9).epsilon(1e-9));
  CHECK_THROWS_AS(kr_closed_form(20, 0, theta0, 0.4, problem), InputError);
}

TEST_CASE("iterated dynamics match the closed form to 1e-12") {
  const KRProblem problem = reference_problem();
  const double eta = 0.4;
  const double alpha = 5e-7;
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(20, alpha);
  const Eigen::VectorXd theta0 = theta;
  double worst = 0.0;
  for (std::size_t t = 0; t <= 100; ++t) {
    for (Eigen::Index i = 0; i < 20; ++i) {
      worst = std::max(worst, std::abs(theta(i) - kr_closed_form(i, t, theta0, eta, problem)));
    }
    theta = kr_gd_step(theta, eta, problem);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("pure residual problem decays geometrically") {
  // theta* = 0 is all-residual (k = 0)
  const KRProblem problem = make_kr_problem(Eigen::VectorXd::Zero(5));
  const CoefficientTrajectory traj = run_kr(problem, 0.3, 0.25, 20);
  const double start = traj.error.front();
  for (std::size_t t = 0; t < traj.size(); ++t) {
    CHECK(traj.error[t] ==
          doctest::Approx(std::pow(0.75, static_cast<double>(t)) * start).epsilon(1e-12));
  }
}

TEST_CASE("reference run: equal-rate learning and terminal accuracy") {
  const KRProblem problem = reference_problem();
  const CoefficientTrajectory traj = run_kr(problem, 5e-7, 0.4, 60);
  REQUIRE(traj.size() == 61);
  CHECK(traj.labels.size() == 5);  // 4 signals + residual envelope

  // signal columns strictly increase
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (std::size_t t = 1; t < traj.size(); ++t) {
      CHECK(traj.coefficients[t](i) > traj.coefficients[t - 1](i));
    }
  }
  CHECK(traj.error.back() <= 1e-6);

  // non-increasing error sequence
  for (std::size_t t = 1; t < traj.size(); ++t) {
    CHECK(traj.error[t] <= traj.error[t - 1]);
  }

  // all signals cross half their target within one step of each other
  Eigen::VectorXd targets = Eigen::VectorXd::Zero(5);
  targets.head(4) << 10.0, 5.0, 3.0, 1.0;
  const auto crossings = crossing_times(traj, targets, 0.5);
  std::size_t lo = *crossings[0];
  std::size_t hi = *crossings[0];
  for (int i = 1; i < 4; ++i) {
    REQUIRE(crossings[i].has_value());
    lo = std::min(lo, *crossings[i]);
    hi = std::max(hi, *crossings[i]);
  }
  CHECK(hi - lo <= 1);
}

TEST_CASE("iteration bound: frozen value, ceiling law, and simulation dominance") {
  CHECK(kr_iteration_bound(1e-6, 0.4, 4, 10.0) == 44);

  // doubling alpha lowers the bound by about (1/eta) log 2
  const std::size_t base = kr_iteration_bound(1e-6, 0.4, 4, 10.0);
  const std::size_t doubled = kr_iteration_bound(2e-6, 0.4, 4, 10.0);
  const std::size_t expected_drop = static_cast<std::size_t>(std::ceil(std::log(2.0) / 0.4));
  CHECK(base - doubled <= expected_drop);
  CHECK(base - doubled + 1 >= expected_drop);

  CHECK_THROWS_AS(kr_iteration_bound(50.0, 0.4, 4, 10.0), InputError);

  const KRProblem problem = reference_problem();
  const double alpha = 5e-7;
  const std::size_t budget = kr_iteration_bound(alpha, 0.4, 4, 10.0);
  const CoefficientTrajectory traj = run_kr(problem, alpha, 0.4, budget);
  std::size_t reached = budget + 1;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    if (traj.error[t] <= std::sqrt(2.0) * alpha) {
      reached = traj.steps[t];
      break;
    }
  }
  CHECK(reached <= budget);
}
