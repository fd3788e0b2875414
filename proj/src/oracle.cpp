#include "gsis/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gsis/autocorr.hpp"
#include "gsis/error.hpp"
#include "gsis/recursion.hpp"

namespace gsis::oracle {

DenseGridFit fit_dense(const GaussianSignal& signal, int grid_size) {
  if (signal.is_zero()) throw Error(ErrorKind::InvalidArgument, "zero signal");
  const int n = signal.width();
  const int unknowns = 2 * n + 1;
  if (grid_size < 4 * unknowns) {
    throw Error(ErrorKind::InvalidArgument, "dense fit needs at least 4 grid points per unknown");
  }
  const double lambda = signal.lambda();
  const double beta = signal.beta();
  const double lo = beta * (signal.k_min() - 1);
  const double hi = beta * (signal.k_max() + 1);
  const int m_min = 2 * signal.k_min();

  DenseGridFit fit;
  Eigen::MatrixXd basis(grid_size, unknowns);
  Eigen::VectorXd rhs(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    const double x = lo + (hi - lo) * i / (grid_size - 1);
    const double v = std::norm(evaluate(signal, x));
    fit.grid.push_back(x);
    fit.values.push_back(v);
    rhs(i) = v;
    for (int j = 0; j < unknowns; ++j) {
      const double t = x - 0.5 * beta * (m_min + j);
      basis(i, j) = std::exp(-2.0 * lambda * t * t);
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  if (qr.rank() < unknowns) throw Error(ErrorKind::RankDeficient, "dense Gaussian basis lost rank");
  const Eigen::VectorXd r = qr.solve(rhs);
  const double vmax = rhs.cwiseAbs().maxCoeff();
  fit.residual = (basis * r - rhs).cwiseAbs().maxCoeff() / (vmax > 0.0 ? vmax : 1.0);

  const double lb2 = lambda * beta * beta;
  for (int j = 0; j < unknowns; ++j) {
    const double m = m_min + j;
    fit.recovered.push_back(r(j) * std::exp(-0.5 * lb2 * m * m));
  }
  return fit;
}

std::vector<double> fit_A_dense(const GaussianSignal& signal, int grid_size) {
  return fit_dense(signal, grid_size).recovered;
}

int StepCheckReport::failures_where(bool as_printed) const {
  int n = 0;
  for (const auto& t : tallies) {
    if (t.as_printed == as_printed) n += t.failures;
  }
  return n;
}

const FormulaTally* StepCheckReport::tally(const std::string& formula) const {
  for (const auto& t : tallies) {
    if (t.formula == formula) return &t;
  }
  return nullptr;
}

namespace {

constexpr double kTol = 1e-10;

// Direct expansion on absolute indices: c~_k for k = k_min .. k_min + N.
struct Truth {
  int K = 0;
  std::vector<cplx> c;  // relative storage, c[i] = c~_{K+i}

  int n() const { return static_cast<int>(c.size()) - 1; }
  cplx at(int k) const {
    const int i = k - K;
    return (i < 0 || i > n()) ? cplx{} : c[static_cast<std::size_t>(i)];
  }
  // A_m and B_m as plain double sums over the full index range.
  double A(int m) const {
    cplx s{};
    for (int i = K; i <= K + n(); ++i) {
      for (int j = K; j <= K + n(); ++j) {
        if (i + j == m) s += at(i) * std::conj(at(j));
      }
    }
    return s.real();
  }
  double B(int m) const {
    cplx s{};
    for (int i = K; i <= K + n(); ++i) {
      for (int j = K; j <= K + n(); ++j) {
        if (i + j == m) s += static_cast<double>(i) * j * at(i) * std::conj(at(j));
      }
    }
    return s.real();
  }
};

class Recorder {
 public:
  explicit Recorder(StepCheckReport& r) : report_(r) {}

  void check(const std::string& formula, bool as_printed, int k_min, int trial, double expected,
             double got) {
    FormulaTally& t = tally(formula, as_printed);
    ++t.checks;
    const bool ok = std::isfinite(got) && std::abs(expected - got) <= kTol * std::max(1.0, std::abs(expected));
    if (!ok) {
      ++t.failures;
      report_.failures.push_back({formula, k_min, trial, expected, got});
    }
  }

 private:
  FormulaTally& tally(const std::string& formula, bool as_printed) {
    for (auto& t : report_.tallies) {
      if (t.formula == formula) return t;
    }
    report_.tallies.push_back({formula, as_printed, 0, 0});
    return report_.tallies.back();
  }

  StepCheckReport& report_;
};

// Complex draws keep |sin(phase)| >= 0.1: every later imaginary part is
// divided by the pivot's, so a nearly real pivot amplifies rounding
// geometrically along the recursion whatever the formulas.
std::vector<cplx> draw(std::mt19937_64& rng, int n, int forced_real) {
  std::uniform_real_distribution<double> mod(0.3, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> sign(0, 1);
  std::vector<cplx> c(static_cast<std::size_t>(n + 1));
  c[0] = mod(rng);
  for (int i = 1; i <= n; ++i) {
    if (i <= forced_real) {
      c[i] = mod(rng) * (sign(rng) ? 1.0 : -1.0);
    } else {
      double phi = phase(rng);
      while (std::abs(std::sin(phi)) < 0.1) phi = phase(rng);
      c[i] = std::polar(mod(rng), phi);
    }
  }
  return c;
}

}  // namespace

StepCheckReport symbolic_step_check(int k_min, int k_max, int trials, std::uint64_t seed) {
  if (k_max < k_min || k_max - k_min > 4) {
    throw Error(ErrorKind::InvalidArgument, "symbolic_step_check supports windows of up to 5 coefficients");
  }
  StepCheckReport report;
  Recorder rec(report);
  const int n = k_max - k_min;
  const int K = k_min;
  std::seed_seq seq{seed, static_cast<std::uint64_t>(k_min + 1000), static_cast<std::uint64_t>(n)};
  std::mt19937_64 rng(seq);

  for (int trial = 0; trial < trials; ++trial) {
    int forced = 0;
    if (trial % 3 == 1 && n >= 2) forced = 1;
    if (trial % 3 == 2 && n >= 3) forced = 2;
    Truth t{K, draw(rng, n, forced)};

    // Relative moments taken straight from the direct expansion.
    RelativeMoments d;
    for (int s = 0; s <= 2 * n; ++s) {
      const double a = t.A(2 * K + s);
      d.A.push_back(a);
      d.E.push_back(t.B(2 * K + s) - (static_cast<double>(K) * K + K * s) * a);
      d.scale.push_back(1.0);
    }
    auto A = [&](int m) { return t.A(m); };
    auto B = [&](int m) { return t.B(m); };
    const double a0 = t.c[0].real();
    const double sqrtA0 = std::sqrt(A(2 * K));

    rec.check("leading", false, K, trial, a0, steps::leading(d));
    if (n >= 1) {
      const cplx c1 = t.c[1];
      const double re1 = A(2 * K + 1) / (2.0 * sqrtA0);
      rec.check("first-real-part", false, K, trial, c1.real(), re1);
      const double e2 = B(2 * K + 2) - static_cast<double>(K) * (K + 2) * A(2 * K + 2);
      // Imaginary parts are compared squared: a real coefficient leaves a
      // discriminant that is zero only up to rounding.
      const double im1 = c1.imag() * c1.imag();
      rec.check("first-imag-part", false, K, trial, im1, e2 - re1 * re1);
      const double b2 = B(2 * K + 2);
      rec.check("first-imag-part/squared-B", true, K, trial, im1, b2 * b2 - re1 * re1);
    }
    if (n >= 2) {
      const cplx c1 = t.c[1], c2 = t.c[2];
      rec.check("second-real-part/weighted-pair", true, K, trial, c2.real(),
                ((K + 1.0) * (K + 1.0) * A(2 * K + 2) - B(2 * K + 2)) / (2.0 * sqrtA0));
      const double e3 = B(2 * K + 3) - static_cast<double>(K) * (K + 3) * A(2 * K + 3);
      const double cross12 = (c1 * std::conj(c2)).real();
      rec.check("first-second-cross", false, K, trial, cross12, e3 / 4.0);
      rec.check("first-second-cross/root-denominator", true, K, trial, cross12,
                e3 / (4.0 * std::sqrt(A(K))));
    }
    if (n >= 3) {
      const double num = (K + 1.0) * (K + 2.0) * A(2 * K + 3) - B(2 * K + 3);
      rec.check("third-real-part", false, K, trial, t.c[3].real(), num / (4.0 * sqrtA0));
      rec.check("third-real-part/printed-index", true, K, trial, t.c[3].real(),
                num / (4.0 * std::sqrt(A(K))));
    }
    // Cross term against the first coefficient from the B/A pair at order k+K+1.
    for (int k = K + 2; k <= K + n - 1; ++k) {
      double ca = 0.0, cb = 0.0;
      for (int j = K + 2; j <= k - 1; ++j) {
        const cplx p = t.at(k + K + 1 - j) * std::conj(t.at(j));
        ca += p.real();
        cb += static_cast<double>(j) * (k + K + 1 - j) * p.real();
      }
      const double m = k + K + 1;
      const double got = (B(static_cast<int>(m)) - K * (k + 1.0) * A(static_cast<int>(m)) +
                          K * (k + 1.0) * ca - cb) /
                         (2.0 * (k - K));
      rec.check("cross-with-first/pair-form", true, K, trial,
                (t.at(k) * std::conj(t.at(K + 1))).real(), got);
    }
    // Second modulus when the first coefficient after the leading one is real.
    if (forced >= 1) {
      const double c1 = t.c[1].real();
      const double re3 = n >= 3 ? t.c[3].real() : 0.0;
      const double e4 = B(2 * K + 4) - static_cast<double>(K) * (K + 4) * A(2 * K + 4);
      const double re2 = t.c[2].real();
      const double im2 = t.c[2].imag() * t.c[2].imag();
      rec.check("second-imag-part/real-first", false, K, trial, im2,
                (e4 - 6.0 * c1 * re3) / 4.0 - re2 * re2);
      rec.check("second-imag-part/real-first-halved", true, K, trial, im2,
                (e4 - 6.0 * c1 * re3) / 8.0 - re2 * re2);
    }

    // Production step functions with every other coefficient set to the truth.
    PartialCoefficients full(n);
    for (int i = 0; i <= n; ++i) full.set_full(i, t.c[i]);
    for (int j = 1; j <= n; ++j) {
      rec.check("real-part", false, K, trial, t.c[j].real(), steps::real_part(d, full, j));
    }
    for (int p = 1; p <= n; ++p) {
      rec.check("modulus-from-E", false, K, trial, std::norm(t.c[p]), steps::modulus_sq(d, full, p));
      for (int k = p + 1; k <= n; ++k) {
        const double truth = (t.c[k] * std::conj(t.c[p])).real();
        rec.check("cross-from-E", false, K, trial, truth, steps::cross_term_E(d, full, k, p));
        rec.check("cross-from-A", false, K, trial, truth, steps::cross_term_A(d, full, k, p));
        if (t.c[p].imag() != 0.0) {
          rec.check("imag-from-cross", false, K, trial, t.c[k].imag(),
                    steps::imag_from_cross(truth, t.c[k].real(), t.c[p]));
        }
      }
    }

    // The whole recursion from the data alone, against the truth in the same
    // conjugation class (positive imaginary part at the pivot).
    const RecursionOutcome out = run_recursion(d, 1e-6, 1e-10);
    std::vector<cplx> truth = t.c;
    if (out.pivot && truth[static_cast<std::size_t>(*out.pivot)].imag() < 0.0) {
      for (auto& z : truth) z = std::conj(z);
    }
    double worst = 0.0;
    for (int i = 0; i <= n; ++i) worst = std::max(worst, std::abs(out.a[i] - truth[i]));
    rec.check("full-recursion", false, K, trial, 0.0, worst);
    double backward = 0.0, data_scale = 1.0;
    for (int s = 0; s <= 2 * n; ++s) data_scale = std::max({data_scale, std::abs(d.A[s]), std::abs(d.E[s])});
    for (int s = 0; s <= 2 * n; ++s) {
      cplx a{}, e{};
      for (int i = std::max(0, s - n); i <= std::min(s, n); ++i) {
        const cplx p = out.a[i] * std::conj(out.a[s - i]);
        a += p;
        e += static_cast<double>(i) * (s - i) * p;
      }
      backward = std::max({backward, std::abs(a.real() - d.A[s]), std::abs(e.real() - d.E[s])});
    }
    rec.check("full-recursion/reproduces-data", false, K, trial, 0.0, backward / data_scale);
    const int expected_pivot = n >= 1 ? forced + 1 : 0;
    rec.check("pivot-position", false, K, trial, n >= 1 ? expected_pivot : -1,
              out.pivot ? *out.pivot : -1);
  }
  return report;
}

TwoTermSet exhaustive_two_term(const std::array<double, 3>& A, const std::array<double, 3>& B,
                               int k_min) {
  if (!(A[0] > 0.0)) throw Error(ErrorKind::InvalidLeadingCoefficient, "A_0 must be positive");
  const double K = k_min;
  const double a0 = std::sqrt(A[0]);
  const double re = A[1] / (2.0 * a0);
  // With two terms the top order carries only |c~_1|^2, in both sequences.
  const double mod_a = A[2];
  const double mod_e = B[2] - K * (K + 2.0) * A[2];
  const double scale = std::max({std::abs(mod_a), std::abs(mod_e), re * re, 1e-300});
  if (std::abs(mod_a - mod_e) > 1e-10 * scale) {
    throw Error(ErrorKind::InconsistentData, "top-order A and B disagree on |c~_1|^2");
  }
  // First-order B must match the A-derived value as well.
  const double b1 = K * (K + 1.0) * A[1];
  if (std::abs(B[1] - b1) > 1e-10 * std::max({std::abs(B[1]), std::abs(b1), scale})) {
    throw Error(ErrorKind::InconsistentData, "first-order B inconsistent with A");
  }
  double im2 = mod_a - re * re;
  if (im2 < -1e-10 * scale) {
    throw Error(ErrorKind::InconsistentData, "negative discriminant for Im c~_1");
  }
  TwoTermSet out;
  if (im2 <= 1e-12 * scale) {
    out.members.push_back({cplx{a0, 0.0}, cplx{re, 0.0}});
  } else {
    const double im = std::sqrt(im2);
    out.members.push_back({cplx{a0, 0.0}, cplx{re, im}});
    out.members.push_back({cplx{a0, 0.0}, cplx{re, -im}});
  }
  out.degenerate_support = std::abs(out.members.front()[1]) <= 1e-12 * a0;
  return out;
}

}  // namespace gsis::oracle
