#include "gsis/expsolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "gsis/error.hpp"

namespace gsis {

namespace {

constexpr double kMinRelativeGap = 1e-13;

// Solves sum_j x_j u_n^j = b_n for distinct nodes (Bjorck-Pereyra): Newton
// divided differences, then conversion to the monomial basis.
std::vector<double> bjorck_pereyra(std::span<const double> u, std::vector<double> b) {
  const std::size_t n = u.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t i = n - 1; i > k; --i) {
      b[i] = (b[i] - b[i - 1]) / (u[i] - u[i - k - 1]);
    }
  }
  for (std::size_t k = n - 1; k-- > 0;) {
    for (std::size_t i = k; i + 1 < n; ++i) b[i] -= u[k] * b[i + 1];
  }
  return b;
}

// Least-squares solution of the scaled Vandermonde system, long double.
std::vector<long double> qr_solve(std::span<const double> u, std::span<const long double> b,
                                  int unknowns) {
  using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const Eigen::Index rows = static_cast<Eigen::Index>(u.size());
  const Eigen::Index cols = unknowns;
  MatrixL m(rows, cols);
  VectorL rhs(rows);
  for (Eigen::Index n = 0; n < rows; ++n) {
    long double p = 1.0L;
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(n, j) = p;
      p *= u[n];
    }
    const long double row_max = m.row(n).cwiseAbs().maxCoeff();
    m.row(n) /= row_max;
    rhs(n) = b[n] / row_max;
  }
  const VectorL col_scale = m.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < cols; ++j) m.col(j) /= col_scale(j);

  Eigen::ColPivHouseholderQR<MatrixL> qr(m);
  if (qr.rank() < cols) {
    throw Error(ErrorKind::RankDeficient, "least-squares moment matrix is rank deficient");
  }
  const VectorL y = qr.solve(rhs);
  std::vector<long double> out(static_cast<std::size_t>(cols));
  for (Eigen::Index j = 0; j < cols; ++j) out[j] = y(j) / col_scale(j);
  return out;
}

std::vector<long double> residuals(std::span<const double> u, std::span<const double> b,
                                   std::span<const long double> y) {
  std::vector<long double> r(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    long double acc = 0.0L;
    for (auto it = y.rbegin(); it != y.rend(); ++it) acc = acc * u[n] + *it;
    r[n] = b[n] - acc;
  }
  return r;
}

// Overdetermined systems: interpolate on an evenly spread subset of the nodes,
// then correct against all of them. A direct QR on the full matrix loses
// several digits to the Vandermonde conditioning.
std::vector<double> least_squares(std::span<const double> u, std::span<const double> b,
                                  int unknowns) {
  const std::size_t n = u.size();
  const std::size_t k = static_cast<std::size_t>(unknowns);
  std::vector<double> su(k), sb(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t at = k == 1 ? n / 2 : (i * (n - 1) + (k - 1) / 2) / (k - 1);
    su[i] = u[at];
    sb[i] = b[at];
  }
  const std::vector<double> start = bjorck_pereyra(su, sb);
  std::vector<long double> y(start.begin(), start.end());

  auto worst = [](const std::vector<long double>& r) {
    long double w = 0.0L;
    for (long double x : r) w = std::max(w, std::abs(x));
    return w;
  };
  std::vector<long double> best = y;
  std::vector<long double> r = residuals(u, b, y);
  long double best_res = worst(r);
  for (int pass = 0; pass < 3; ++pass) {
    const std::vector<long double> step = qr_solve(u, r, unknowns);
    for (std::size_t j = 0; j < k; ++j) y[j] += step[j];
    r = residuals(u, b, y);
    const long double res = worst(r);
    if (res < best_res) {
      best_res = res;
      best = y;
    }
  }
  return {best.begin(), best.end()};
}

double horner(std::span<const double> coeffs, double u) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + *it;
  return acc;
}

// Coefficients (ascending powers) of prod_{k != skip} (t - u_k).
std::vector<long double> root_product(std::span<const double> u, std::size_t skip) {
  std::vector<long double> p{1.0L};
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (k == skip) continue;
    std::vector<long double> q(p.size() + 1, 0.0L);
    for (std::size_t j = 0; j < p.size(); ++j) {
      q[j + 1] += p[j];
      q[j] -= static_cast<long double>(u[k]) * p[j];
    }
    p = std::move(q);
  }
  return p;
}

}  // namespace

double condition_report(std::span<const double> gammas, double lambda, double beta,
                        int m_count) {
  if (m_count <= 0 || gammas.size() < static_cast<std::size_t>(m_count)) {
    throw Error(ErrorKind::InvalidArgument, "condition_report needs at least m_count nodes");
  }
  const auto [g_lo, g_hi] = std::minmax_element(gammas.begin(), gammas.end());
  const double g_mid = 0.5 * (*g_lo + *g_hi);
  std::vector<double> u(gammas.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    u[n] = std::exp(2.0 * lambda * beta * (gammas[n] - g_mid));
  }
  std::sort(u.begin(), u.end());

  // Row n of the scaled matrix is u_n^j / max(1, u_n^{m_count-1}).
  auto row_max = [&](double un) {
    return std::max(1.0L, std::pow(static_cast<long double>(un), m_count - 1));
  };

  if (u.size() != static_cast<std::size_t>(m_count)) {
    const Eigen::Index rows = static_cast<Eigen::Index>(u.size());
    Eigen::MatrixXd m(rows, m_count);
    for (Eigen::Index n = 0; n < rows; ++n) {
      const double scale = static_cast<double>(row_max(u[n]));
      for (int j = 0; j < m_count; ++j) m(n, j) = std::pow(u[n], j) / scale;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
  }

  const std::size_t n = u.size();
  // ||M||_1: largest column sum.
  long double norm_m = 0.0L;
  for (int j = 0; j < m_count; ++j) {
    long double col = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      col += std::pow(static_cast<long double>(u[i]), j) / row_max(u[i]);
    }
    norm_m = std::max(norm_m, col);
  }
  // M^{-1} = V^{-1} D^{-1}; column i of V^{-1} holds the coefficients of the
  // i-th Lagrange basis polynomial.
  long double norm_inv = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = root_product(u, i);
    long double denom = 1.0L;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) denom *= static_cast<long double>(u[i]) - u[k];
    }
    long double col = 0.0L;
    for (long double c : p) col += std::abs(c / denom);
    norm_inv = std::max(norm_inv, col * row_max(u[i]));
  }
  const long double kappa = norm_m * norm_inv;
  if (!std::isfinite(static_cast<double>(kappa))) return std::numeric_limits<double>::infinity();
  return static_cast<double>(kappa);
}

MomentSolution solve_moments(const MomentProblem& problem) {
  const int unknowns = problem.unknowns();
  if (unknowns < 1) throw Error(ErrorKind::InvalidArgument, "m_max < m_min");
  if (problem.gammas.size() != problem.values.size()) {
    throw Error(ErrorKind::InvalidArgument, "gammas and values differ in length");
  }
  if (problem.gammas.size() < static_cast<std::size_t>(unknowns)) {
    std::ostringstream os;
    os << "moment system needs at least " << unknowns << " nodes, got " << problem.gammas.size();
    throw Error(ErrorKind::InsufficientSamples, os.str());
  }
  if (!(problem.lambda > 0.0) || !(problem.beta > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "lambda and beta must be positive");
  }

  // Canonical order: increasing gamma, hence increasing u.
  std::vector<std::size_t> order(problem.gammas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return problem.gammas[a] < problem.gammas[b]; });

  const double rate = 2.0 * problem.lambda * problem.beta;
  const double g_lo = problem.gammas[order.front()];
  const double g_hi = problem.gammas[order.back()];
  const double g_mid = 0.5 * (g_lo + g_hi);

  const std::size_t n = order.size();
  std::vector<double> gammas(n), u(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = problem.gammas[order[i]];
    const double v = problem.values[order[i]];
    if (!std::isfinite(g) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, "non-finite node or value");
    }
    gammas[i] = g;
    // Nodes centred on the window so the monomials stay balanced; the shift
    // is undone on the coefficients below.
    u[i] = std::exp(rate * (g - g_mid));
    rhs[i] = v * std::exp(-rate * problem.m_min * g);
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (gammas[i] == gammas[i - 1] || u[i] == u[i - 1]) {
      throw Error(ErrorKind::DuplicateNodes, "exponential nodes must be distinct");
    }
  }
  if (unknowns > 1) {
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) min_gap = std::min(min_gap, u[i] - u[i - 1]);
    if (min_gap < kMinRelativeGap * u.back()) {
      throw Error(ErrorKind::RankDeficient, "exponential nodes are too close to separate");
    }
  }

  std::vector<double> y = n == static_cast<std::size_t>(unknowns)
                              ? bjorck_pereyra(u, rhs)
                              : least_squares(u, rhs, unknowns);

  MomentSolution out;
  double rhs_max = 0.0, res_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rhs_max = std::max(rhs_max, std::abs(rhs[i]));
    res_max = std::max(res_max, std::abs(horner(y, u[i]) - rhs[i]));
  }
  out.residual = rhs_max > 0.0 ? res_max / rhs_max : res_max;

  out.coeffs.resize(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    out.coeffs[j] = y[j] * std::exp(-rate * g_mid * static_cast<double>(j));
  }
  out.condition = condition_report(gammas, problem.lambda, problem.beta, unknowns);
  return out;
}

namespace {

void check_window(const SampleSet& samples, int k_min, int k_max) {
  if (k_min > k_max) throw Error(ErrorKind::InvalidArgument, "k_min > k_max");
  samples.validate();
  const std::size_t required = static_cast<std::size_t>(2 * (k_max - k_min) + 1);
  if (samples.size() < required) {
    std::ostringstream os;
    os << "window [" << k_min << ", " << k_max << "] requires at least " << required
       << " samples, got " << samples.size();
    throw Error(ErrorKind::InsufficientSamples, os.str());
  }
}

MomentProblem make_problem(const SampleSet& samples, int k_min, int k_max, double lambda,
                           double beta) {
  MomentProblem p;
  p.m_min = 2 * k_min;
  p.m_max = 2 * k_max;
  p.lambda = lambda;
  p.beta = beta;
  p.gammas.reserve(samples.size());
  for (const auto& s : samples.points) p.gammas.push_back(s.gamma);
  return p;
}

}  // namespace

MomentRecovery recover_A(const SampleSet& samples, int k_min, int k_max, double lambda,
                         double beta) {
  check_window(samples, k_min, k_max);
  MomentProblem p = make_problem(samples, k_min, k_max, lambda, beta);
  p.values.reserve(samples.size());
  for (const auto& s : samples.points) {
    p.values.push_back(std::exp(2.0 * lambda * s.gamma * s.gamma) * s.mag_f * s.mag_f);
  }
  MomentSolution sol = solve_moments(p);

  MomentRecovery out;
  out.data.m_min = p.m_min;
  out.data.A = std::move(sol.coeffs);
  out.data.lambda = lambda;
  out.data.beta = beta;
  out.condition = sol.condition;
  out.residual = sol.residual;

  // A_{2K_-} = |c_{K_-}|^2 exp(-2 lambda beta^2 K_-^2); compare on the
  // half-lattice scale where every r_m is O(|c|^2).
  const auto r = half_lattice_r(out.data);
  double r_max = 0.0;
  for (double v : r) r_max = std::max(r_max, std::abs(v));
  if (!(r.front() > 1e-12 * r_max)) {
    std::ostringstream os;
    os << "recovered A_{2K_-} = " << out.data.A.front()
       << " is not positive; the support window is probably wrong";
    throw Error(ErrorKind::InvalidLeadingCoefficient, os.str());
  }
  return out;
}

MomentRecovery recover_B(const SampleSet& samples, const AutocorrData& data_A, int k_min,
                         int k_max) {
  check_window(samples, k_min, k_max);
  if (data_A.m_min != 2 * k_min || data_A.width() != k_max - k_min) {
    throw Error(ErrorKind::InvalidArgument, "A data does not match the support window");
  }
  MomentProblem p = make_problem(samples, k_min, k_max, data_A.lambda, data_A.beta);
  p.values.reserve(samples.size());
  for (const auto& s : samples.points) {
    const double d2 = d_mag_sq_from_samples(s, data_A);
    p.values.push_back(std::exp(2.0 * data_A.lambda * s.gamma * s.gamma) * d2);
  }
  MomentSolution sol = solve_moments(p);

  MomentRecovery out;
  out.data = data_A;
  out.data.B = std::move(sol.coeffs);
  out.condition = sol.condition;
  out.residual = sol.residual;
  return out;
}

}  // namespace gsis
