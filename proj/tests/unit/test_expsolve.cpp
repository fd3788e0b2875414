#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "gsis/error.hpp"
#include "gsis/expsolve.hpp"
#include "support.hpp"

using namespace gsis;
using gsis::test::Gen;

namespace {

const cplx I{0.0, 1.0};

MomentProblem problem_for(const GaussianSignal& s, const std::vector<double>& gammas) {
  MomentProblem p;
  p.gammas = gammas;
  for (double g : gammas) p.values.push_back(std::exp(2.0 * s.lambda() * g * g) * std::norm(evaluate(s, g)));
  p.m_min = 2 * s.k_min();
  p.m_max = 2 * s.k_max();
  p.lambda = s.lambda();
  p.beta = s.beta();
  return p;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("one node, one unknown") {
  MomentProblem p;
  p.gammas = {0.4};
  p.values = {2.5};
  const MomentSolution s = solve_moments(p);
  REQUIRE(s.coeffs.size() == 1);
  CHECK(s.coeffs[0] == doctest::Approx(2.5));
  CHECK(s.condition == doctest::Approx(1.0));
}

TEST_CASE("solve recovers A of [1, i] on three default nodes") {
  const GaussianSignal f(1.0, 1.0, 0, {1.0, I});
  const MomentSolution s = solve_moments(problem_for(f, default_sampling_grid(0, 1, 1.0)));
  REQUIRE(s.coeffs.size() == 3);
  CHECK(std::abs(s.coeffs[0] - 1.0) < 1e-10);
  CHECK(std::abs(s.coeffs[1]) < 1e-10);
  CHECK(std::abs(s.coeffs[2] - std::exp(-2.0)) < 1e-10);
}

TEST_CASE("zero right-hand side gives zero coefficients") {
  for (std::size_t n : {1u, 3u, 5u, 9u}) {
    MomentProblem p;
    p.gammas = sampling_grid(-1, static_cast<int>(n) / 2 - 1, 1.0, n);
    p.values.assign(n, 0.0);
    p.m_min = -2;
    p.m_max = p.m_min + static_cast<int>(n) - 1;
    for (double c : solve_moments(p).coeffs) CHECK(c == 0.0);
  }
}

TEST_CASE("node errors") {
  MomentProblem p;
  p.gammas = {0.0, 0.5, 0.0};
  p.values = {1.0, 1.0, 1.0};
  p.m_max = 2;
  CHECK(kind_of([&] { (void)solve_moments(p); }) == ErrorKind::DuplicateNodes);

  p.gammas = {0.0, 1e-15, 1.0};
  CHECK(kind_of([&] { (void)solve_moments(p); }) == ErrorKind::RankDeficient);

  p.gammas = {0.0, 1.0};
  p.values = {1.0, 1.0};
  CHECK(kind_of([&] { (void)solve_moments(p); }) == ErrorKind::InsufficientSamples);
}

TEST_CASE("square residual certificate and permutation invariance") {
  Gen gen(31);
  for (int trial = 0; trial < 50; ++trial) {
    const GaussianSignal f = gen.signal(gen.integer(-3, 3), gen.integer(0, 6), gen.uniform(0.5, 2.0));
    MomentProblem p = problem_for(f, default_sampling_grid(f.k_min(), f.k_max(), f.beta()));
    const MomentSolution s = solve_moments(p);
    CHECK(s.residual <= 1e-10);

    std::vector<std::size_t> order(p.gammas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
    std::swap(order.front(), order[order.size() / 2]);
    MomentProblem q = p;
    for (std::size_t i = 0; i < order.size(); ++i) {
      q.gammas[i] = p.gammas[order[i]];
      q.values[i] = p.values[order[i]];
    }
    const MomentSolution t = solve_moments(q);
    const double scale = gsis::test::max_abs(s.coeffs);
    for (std::size_t m = 0; m < s.coeffs.size(); ++m) CHECK(std::abs(t.coeffs[m] - s.coeffs[m]) <= 1e-12 * scale);
  }
}

TEST_CASE("oversampled least squares is no worse than the square solve") {
  Gen gen(32);
  for (int trial = 0; trial < 30; ++trial) {
    const GaussianSignal f = gen.signal(gen.integer(-2, 2), gen.integer(1, 5), gen.uniform(0.5, 2.0));
    const std::size_t n = 2 * f.size() - 1;
    const auto truth = gsis::test::direct_sums(f).A;
    const MomentSolution sq = solve_moments(problem_for(f, sampling_grid(f.k_min(), f.k_max(), f.beta(), n)));
    const MomentSolution ov = solve_moments(problem_for(f, sampling_grid(f.k_min(), f.k_max(), f.beta(), 2 * n)));
    CHECK(ov.residual <= std::max(sq.residual, 1e-13));
    CHECK(gsis::test::seq_err(ov.coeffs, truth) <= std::max(10.0 * gsis::test::seq_err(sq.coeffs, truth), 1e-10));
  }
}

TEST_CASE("condition_report matches a dense inverse at 3x3") {
  // gamma = 0, 1/2, 1 gives u = 1, e, e^2; centring divides every node by e.
  const std::vector<double> g{0.0, 0.5, 1.0};
  Eigen::Matrix3d m;
  for (int n = 0; n < 3; ++n) {
    const double u = std::exp(2.0 * (g[n] - 0.5));
    const double row = std::max(1.0, u * u);
    for (int j = 0; j < 3; ++j) m(n, j) = std::pow(u, j) / row;
  }
  const double dense = m.cwiseAbs().colwise().sum().maxCoeff() * m.inverse().cwiseAbs().colwise().sum().maxCoeff();
  CHECK(condition_report(g, 1.0, 1.0, 3) == doctest::Approx(dense).epsilon(1e-10));
}

TEST_CASE("condition_report bounds and growth") {
  const std::vector<double> one{0.3};
  CHECK(condition_report(one, 1.0, 1.0, 1) == doctest::Approx(1.0));
  double prev = 1.0;
  for (int n = 1; n <= 12; ++n) {
    const auto g = default_sampling_grid(0, n, 1.0);
    const double c = condition_report(g, 1.0, 1.0, 2 * n + 1);
    CHECK(std::isfinite(c));
    CHECK(c > prev);
    prev = c;
  }
  const auto g6 = default_sampling_grid(0, 6, 1.0);
  CHECK(condition_report(g6, 1.0, 1.0, 13) > 1.0);
  const auto g12 = default_sampling_grid(0, 12, 1.0);
  CHECK(condition_report(g12, 1.0, 1.0, 25) > kConditionWarning);
  CHECK(condition_report(g6, 1.0, 1.0, 13) < kConditionWarning);
}

TEST_CASE("condition_report grows as nodes crowd together") {
  double prev = condition_report(std::vector<double>{-0.5, 0.0, 0.5}, 1.0, 1.0, 3);
  for (double s : {0.5, 0.25, 0.1}) {
    const std::vector<double> h{-0.5 * s, 0.0, 0.5 * s};
    const double c = condition_report(h, 1.0, 1.0, 3);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("recover_A and recover_B on exact samples") {
  const GaussianSignal c(1.0, 1.0, 0, {1.0, I});
  const SampleSet s = hermite_samples(c, default_sampling_grid(0, 1, 1.0));
  const MomentRecovery ra = recover_A(s, 0, 1, 1.0, 1.0);
  const MomentRecovery rb = recover_B(s, ra.data, 0, 1);
  const std::vector<double> wa{1.0, 0.0, std::exp(-2.0)};
  const std::vector<double> wb{0.0, 0.0, std::exp(-2.0)};
  for (int p = 0; p < 3; ++p) {
    CHECK(std::abs(ra.data.A[p] - wa[p]) < 1e-8);
    CHECK(std::abs(rb.data.B[p] - wb[p]) < 1e-8);
  }
  CHECK(rb.data.A == ra.data.A);

  const GaussianSignal g(1.0, 1.0, 0, {1.7});
  const std::vector<double> pt{0.2};
  const SampleSet sg = hermite_samples(g, pt);
  const MomentRecovery rg = recover_A(sg, 0, 0, 1.0, 1.0);
  CHECK(rg.data.A[0] == doctest::Approx(1.7 * 1.7));
  CHECK(std::abs(recover_B(sg, rg.data, 0, 0).data.B[0]) < 1e-12);
}

TEST_CASE("recover_A and recover_B match the forward sequences") {
  Gen gen(33);
  for (double lb2 : {0.5, 1.0, 2.0}) {
    for (int trial = 0; trial < 20; ++trial) {
      const GaussianSignal f = gen.signal(gen.integer(-3, 3), 3 + trial % 4, lb2);
      const auto ref = gsis::test::direct_sums(f);
      const SampleSet s = hermite_samples(f, default_sampling_grid(f.k_min(), f.k_max(), f.beta()));
      const MomentRecovery ra = recover_A(s, f.k_min(), f.k_max(), f.lambda(), f.beta());
      CHECK(gsis::test::seq_err(ra.data.A, ref.A) <= 1e-8);
      if (f.width() <= 3) {
        const MomentRecovery rb = recover_B(s, ra.data, f.k_min(), f.k_max());
        CHECK(gsis::test::seq_err(rb.data.B, ref.B) <= 1e-7);
      }
    }
  }
}

TEST_CASE("recover_A is blind to the global phase") {
  Gen gen(34);
  const GaussianSignal f = gen.signal(0, 3);
  const auto grid = default_sampling_grid(0, 3, 1.0);
  const auto a = recover_A(hermite_samples(f, grid), 0, 3, 1.0, 1.0).data.A;
  const auto b = recover_A(hermite_samples(scaled(f, gen.unimodular()), grid), 0, 3, 1.0, 1.0).data.A;
  CHECK(gsis::test::seq_err(b, a) <= 1e-12);
}

TEST_CASE("recover_A errors") {
  const GaussianSignal f(1.0, 1.0, 1, {1.0, 0.5});
  const SampleSet s = hermite_samples(f, default_sampling_grid(0, 2, 1.0));
  CHECK(kind_of([&] { (void)recover_A(s, 0, 2, 1.0, 1.0); }) == ErrorKind::InvalidLeadingCoefficient);
  try {
    (void)recover_A(s, 0, 3, 1.0, 1.0);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientSamples);
    CHECK(std::string(e.what()).find("7") != std::string::npos);
  }
}
