#include "gsis/refine.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>

#include "gsis/error.hpp"
#include "gsis/recursion.hpp"

namespace gsis {

namespace {

constexpr double kGoodEnough = 1e-13;

struct Model {
  int k_min = 0;
  int n = 0;  // width
  double lb2 = 0.0;
  std::vector<double> r_data, e_data;
  double norm = 1.0;

  explicit Model(const AutocorrData& data) {
    const RelativeMoments d = RelativeMoments::from(data);
    k_min = data.k_min();
    n = data.width();
    lb2 = data.lambda * data.beta * data.beta;
    r_data.resize(d.A.size());
    e_data.resize(d.A.size());
    norm = 0.0;
    for (std::size_t s = 0; s < d.A.size(); ++s) {
      r_data[s] = d.A[s] * d.scale[s];
      e_data[s] = d.E[s] * d.scale[s];
      norm = std::max(norm, std::abs(r_data[s]));
    }
    if (norm == 0.0) norm = 1.0;
  }

  double weight(int i, int j) const {
    const double diff = static_cast<double>(i - j);
    return std::exp(-0.5 * lb2 * diff * diff);
  }

  // Residuals [r-model - r-data; e-model - e-data] on relative indices.
  Eigen::VectorXd residual(const std::vector<cplx>& c) const {
    const int len = 2 * n + 1;
    Eigen::VectorXd out(2 * len);
    for (int s = 0; s < len; ++s) {
      double ra = 0.0, re = 0.0;
      for (int i = std::max(0, s - n); i <= std::min(s, n); ++i) {
        const int j = s - i;
        const double t = weight(i, j) * (c[i] * std::conj(c[j])).real();
        ra += t;
        re += static_cast<double>(i) * j * t;
      }
      out(s) = ra - r_data[s];
      out(len + s) = re - e_data[s];
    }
    return out;
  }

  // Columns: Re c_0, then (Re c_q, Im c_q) for q = 1..n.
  Eigen::MatrixXd jacobian(const std::vector<cplx>& c) const {
    const int len = 2 * n + 1;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * len, 2 * n + 1);
    for (int s = 0; s < len; ++s) {
      for (int q = std::max(0, s - n); q <= std::min(s, n); ++q) {
        const int j = s - q;
        const double w = 2.0 * weight(q, j);
        const double ew = static_cast<double>(q) * j;
        const int col_re = q == 0 ? 0 : 2 * q - 1;
        jac(s, col_re) += w * c[j].real();
        jac(len + s, col_re) += ew * w * c[j].real();
        if (q > 0) {
          jac(s, 2 * q) += w * c[j].imag();
          jac(len + s, 2 * q) += ew * w * c[j].imag();
        }
      }
    }
    return jac;
  }

  double scaled(const std::vector<cplx>& c) const {
    return residual(c).cwiseAbs().maxCoeff() / norm;
  }
};

std::vector<cplx> unpack(const Eigen::VectorXd& x, int n) {
  std::vector<cplx> c(static_cast<std::size_t>(n + 1));
  c[0] = {x(0), 0.0};
  for (int q = 1; q <= n; ++q) c[q] = {x(2 * q - 1), x(2 * q)};
  return c;
}

Eigen::VectorXd pack(const std::vector<cplx>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  Eigen::VectorXd x(2 * n + 1);
  x(0) = c[0].real();
  for (int q = 1; q <= n; ++q) {
    x(2 * q - 1) = c[q].real();
    x(2 * q) = c[q].imag();
  }
  return x;
}

bool all_finite(const std::vector<cplx>& c) {
  for (const cplx& z : c) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

std::vector<cplx> to_c(const std::vector<cplx>& a, int k_min, double lb2) {
  std::vector<cplx> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double k = k_min + static_cast<double>(i);
    c[i] = a[i] * std::exp(lb2 * k * k);
  }
  return c;
}

// z * T(hi) matched to lo on indices first..last. With conj unset both
// choices of T are tried and the closer one is kept.
std::vector<cplx> align(const std::vector<cplx>& lo, const std::vector<cplx>& hi, int first,
                        int last, std::optional<bool> conj_choice) {
  std::vector<cplx> best;
  double best_err = std::numeric_limits<double>::infinity();
  for (bool conj : {false, true}) {
    if (conj_choice && *conj_choice != conj) continue;
    std::vector<cplx> h = hi;
    if (conj) {
      for (auto& v : h) v = std::conj(v);
    }
    cplx ip{};
    for (int i = first; i <= last; ++i) ip += std::conj(h[i]) * lo[i];
    const cplx z = std::abs(ip) > 0.0 ? ip / std::abs(ip) : cplx{1.0, 0.0};
    double err = 0.0;
    for (int i = first; i <= last; ++i) err += std::norm(lo[i] - z * h[i]);
    if (err < best_err) {
      best_err = err;
      for (auto& v : h) v *= z;
      best = std::move(h);
    }
  }
  return best;
}

}  // namespace

double scaled_residual(const AutocorrData& data, const std::vector<cplx>& c) {
  const Model model(data);
  if (c.size() != static_cast<std::size_t>(model.n + 1)) {
    throw Error(ErrorKind::InvalidArgument, "coefficient count does not match the window");
  }
  return model.scaled(c);
}

namespace {

PolishResult run_polish(const AutocorrData& data, std::vector<cplx> seed, int max_iterations,
                        bool real_only) {
  const Model model(data);
  const int n = model.n;
  if (seed.size() != static_cast<std::size_t>(n + 1)) {
    throw Error(ErrorKind::InvalidArgument, "seed length does not match the window");
  }
  if (std::abs(seed[0]) > 0.0) {
    const cplx rot = std::conj(seed[0]) / std::abs(seed[0]);
    for (auto& v : seed) v *= rot;
  }
  seed[0] = {seed[0].real(), 0.0};
  if (real_only) {
    for (auto& v : seed) v = {v.real(), 0.0};
  }

  Eigen::VectorXd x = pack(seed);
  Eigen::VectorXd r = model.residual(seed);
  double cost = r.squaredNorm();
  double mu = 1e-3;
  const Eigen::Index params = x.size();
  const Eigen::Index rows = r.size();
  int it = 0;
  for (; it < max_iterations; ++it) {
    if (std::sqrt(cost) <= 1e-16 * model.norm) break;
    const std::vector<cplx> c = unpack(x, n);
    const Eigen::MatrixXd jac = model.jacobian(c);
    const Eigen::VectorXd diag = jac.colwise().squaredNorm().transpose();
    bool accepted = false;
    while (mu <= 1e12) {
      // min ||J dx + r||^2 + mu ||D dx||^2 as one stacked least-squares problem.
      Eigen::MatrixXd aug(rows + params, params);
      aug.topRows(rows) = jac;
      aug.bottomRows(params) = (mu * (diag.array() + 1e-30)).sqrt().matrix().asDiagonal();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows + params);
      rhs.head(rows) = -r;
      const Eigen::VectorXd step = aug.colPivHouseholderQr().solve(rhs);
      Eigen::VectorXd xn = x + step;
      if (real_only) {
        for (int q = 1; q <= n; ++q) xn(2 * q) = 0.0;
      }
      const Eigen::VectorXd rn = model.residual(unpack(xn, n));
      const double cn = rn.squaredNorm();
      if (std::isfinite(cn) && cn < cost) {
        const bool tiny = step.norm() <= 1e-15 * (1.0 + x.norm());
        x = xn;
        r = rn;
        cost = cn;
        mu = std::max(mu / 10.0, 1e-15);
        accepted = !tiny;
        break;
      }
      mu *= 10.0;
    }
    if (!accepted) break;
  }

  PolishResult out;
  out.coeffs = unpack(x, n);
  out.residual = r.cwiseAbs().maxCoeff() / model.norm;
  out.iterations = it;
  return out;
}

}  // namespace

PolishResult polish(const AutocorrData& data, std::vector<cplx> seed, int max_iterations) {
  return run_polish(data, std::move(seed), max_iterations, false);
}

PolishResult polish_real(const AutocorrData& data, std::vector<cplx> seed, int max_iterations) {
  return run_polish(data, std::move(seed), max_iterations, true);
}

std::vector<std::vector<cplx>> recursion_seeds(const AutocorrData& data, double tol_imag) {
  const RelativeMoments d = RelativeMoments::from(data);
  const int n = d.width();
  const int k_min = data.k_min();
  const double lb2 = data.lambda * data.beta * data.beta;

  std::vector<std::vector<cplx>> seeds;
  std::vector<cplx> lo, hi;
  try {
    lo = to_c(run_recursion(d, tol_imag, -1.0).a, k_min, lb2);
    if (all_finite(lo)) seeds.push_back(lo);
  } catch (const std::exception&) {
    lo.clear();
  }
  if (n < 1) return seeds;
  try {
    const RelativeMoments rev = d.reversed();
    if (rev.A.front() > 0.0) {
      auto t = run_recursion(rev, tol_imag, -1.0).a;
      std::vector<cplx> a(t.rbegin(), t.rend());
      hi = to_c(a, k_min, lb2);
      if (all_finite(hi)) seeds.push_back(hi);
    }
  } catch (const std::exception&) {
    hi.clear();
  }
  if (lo.empty() || hi.empty() || !all_finite(lo) || !all_finite(hi)) return seeds;
  // Merge lo[0..split] with the aligned tail of hi. The two recursions are
  // accurate on ranges that may overlap in a single index or not at all, so
  // besides a two-index fit the phase is also fixed from index split alone,
  // once per conjugation choice.
  auto merge = [&](int split, const std::vector<cplx>& h) {
    std::vector<cplx> merged = lo;
    for (int i = split + 1; i <= n; ++i) merged[i] = h[i];
    if (all_finite(merged)) seeds.push_back(std::move(merged));
  };
  for (int split = 1; split < n; ++split) {
    merge(split, align(lo, hi, split, split + 1, std::nullopt));
    merge(split, align(lo, hi, split, split, false));
    merge(split, align(lo, hi, split, split, true));
  }
  return seeds;
}

PolishResult polish_best(const AutocorrData& data, double tol_imag) {
  const auto seeds = recursion_seeds(data, tol_imag);
  if (seeds.empty()) {
    throw Error(ErrorKind::InconsistentData, "no usable starting point for refinement");
  }
  PolishResult best;
  best.residual = std::numeric_limits<double>::infinity();
  for (const auto& seed : seeds) {
    PolishResult p = polish(data, seed);
    if (p.residual < best.residual) best = std::move(p);
    if (best.residual <= kGoodEnough) break;
  }
  return best;
}

}  // namespace gsis
