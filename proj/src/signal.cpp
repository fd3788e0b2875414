#include "gsis/signal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gsis/error.hpp"
#include "summation.hpp"

namespace gsis {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_params(double lambda, double beta) {
  if (!(lambda > 0.0) || !std::isfinite(lambda) || !(beta > 0.0) || !std::isfinite(beta)) {
    std::ostringstream os;
    os << "lambda and beta must be positive and finite (lambda=" << lambda << ", beta=" << beta
       << ")";
    throw Error(ErrorKind::InvalidSignal, os.str());
  }
}

}  // namespace

GaussianSignal::GaussianSignal(double lambda, double beta, int k_min, std::vector<cplx> coeffs)
    : lambda_(lambda), beta_(beta), k_min_(k_min), coeffs_(std::move(coeffs)) {
  check_params(lambda_, beta_);
  if (coeffs_.empty()) {
    throw Error(ErrorKind::InvalidSignal, "coefficient sequence is empty");
  }
  if (!std::all_of(coeffs_.begin(), coeffs_.end(), finite)) {
    throw Error(ErrorKind::InvalidSignal, "non-finite coefficient");
  }
  if (coeffs_.front() == cplx{} || coeffs_.back() == cplx{}) {
    throw Error(ErrorKind::InvalidSignal,
                "first and last coefficients must be nonzero so the support is well defined");
  }
}

GaussianSignal GaussianSignal::zero(double lambda, double beta) {
  check_params(lambda, beta);
  return GaussianSignal(lambda, beta);
}

cplx GaussianSignal::coeff(int k) const noexcept {
  if (k < k_min_ || k > k_max()) return {};
  return coeffs_[static_cast<std::size_t>(k - k_min_)];
}

cplx evaluate(const GaussianSignal& signal, double x) {
  detail::CompensatedComplexSum sum;
  const double lambda = signal.lambda();
  const double beta = signal.beta();
  int k = signal.k_min();
  for (const cplx& c : signal.coeffs()) {
    const double t = x - beta * k;
    sum.add(c * std::exp(-lambda * t * t));
    ++k;
  }
  return sum.value();
}

cplx evaluate_derivative(const GaussianSignal& signal, double x) {
  detail::CompensatedComplexSum sum;
  const double lambda = signal.lambda();
  const double beta = signal.beta();
  int k = signal.k_min();
  for (const cplx& c : signal.coeffs()) {
    const double t = x - beta * k;
    sum.add(-t * c * std::exp(-lambda * t * t));
    ++k;
  }
  return 2.0 * lambda * sum.value();
}

GaussianSignal omega_signal(const GaussianSignal& signal) {
  std::vector<cplx> d;
  d.reserve(signal.size());
  int k = signal.k_min();
  for (const cplx& c : signal.coeffs()) d.push_back(static_cast<double>(k++) * c);

  // Only an entry at k = 0 can vanish, and it can only sit at either end or
  // in the interior; interior zeros are kept.
  auto first = std::find_if(d.begin(), d.end(), [](cplx z) { return z != cplx{}; });
  if (first == d.end()) return GaussianSignal::zero(signal.lambda(), signal.beta());
  auto last = std::find_if(d.rbegin(), d.rend(), [](cplx z) { return z != cplx{}; }).base();
  const int k_min = signal.k_min() + static_cast<int>(first - d.begin());
  return GaussianSignal(signal.lambda(), signal.beta(), k_min, std::vector<cplx>(first, last));
}

GaussianSignal normalize_step(const GaussianSignal& signal) {
  const double b = signal.beta();
  if (signal.is_zero()) return GaussianSignal::zero(b * b * signal.lambda(), 1.0);
  return GaussianSignal(b * b * signal.lambda(), 1.0, signal.k_min(),
                        std::vector<cplx>(signal.coeffs().begin(), signal.coeffs().end()));
}

GaussianSignal conjugate(const GaussianSignal& signal) {
  if (signal.is_zero()) return signal;
  std::vector<cplx> c(signal.coeffs().begin(), signal.coeffs().end());
  for (auto& z : c) z = std::conj(z);
  return GaussianSignal(signal.lambda(), signal.beta(), signal.k_min(), std::move(c));
}

GaussianSignal scaled(const GaussianSignal& signal, cplx factor) {
  if (signal.is_zero()) return signal;
  std::vector<cplx> c(signal.coeffs().begin(), signal.coeffs().end());
  for (auto& z : c) z *= factor;
  return GaussianSignal(signal.lambda(), signal.beta(), signal.k_min(), std::move(c));
}

void SampleSet::validate() const {
  std::vector<double> g;
  g.reserve(points.size());
  for (const auto& p : points) {
    if (!std::isfinite(p.gamma)) throw Error(ErrorKind::InvalidArgument, "non-finite gamma");
    if (!(p.mag_f >= 0.0) || !(p.mag_df >= 0.0) || !std::isfinite(p.mag_f) ||
        !std::isfinite(p.mag_df)) {
      throw Error(ErrorKind::InvalidArgument, "magnitudes must be finite and non-negative");
    }
    g.push_back(p.gamma);
  }
  std::sort(g.begin(), g.end());
  if (std::adjacent_find(g.begin(), g.end()) != g.end()) {
    throw Error(ErrorKind::DuplicatePoints, "sampling points must be pairwise distinct");
  }
}

SampleSet hermite_samples(const GaussianSignal& signal, std::span<const double> gammas) {
  SampleSet out;
  out.points.reserve(gammas.size());
  for (double g : gammas) {
    out.points.push_back({g, std::abs(evaluate(signal, g)), std::abs(evaluate_derivative(signal, g))});
  }
  out.validate();
  return out;
}

std::vector<double> sampling_grid(int k_min, int k_max, double beta, std::size_t count) {
  if (k_min > k_max) throw Error(ErrorKind::InvalidArgument, "k_min > k_max");
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
  if (count == 0) return {};
  const double lo = beta * k_min - 0.5 * beta;
  const double hi = beta * k_max + 0.5 * beta;
  if (count == 1) return {0.5 * (lo + hi)};
  std::vector<double> grid(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo + step * static_cast<double>(i);
  grid.back() = hi;
  return grid;
}

std::vector<double> default_sampling_grid(int k_min, int k_max, double beta) {
  if (k_min > k_max) throw Error(ErrorKind::InvalidArgument, "k_min > k_max");
  return sampling_grid(k_min, k_max, beta, static_cast<std::size_t>(2 * (k_max - k_min) + 1));
}

SamplingDiagnostics sampling_diagnostics(const SampleSet& samples, int k_min, int k_max,
                                         double beta) {
  SamplingDiagnostics d;
  d.count = samples.size();
  d.required = static_cast<std::size_t>(2 * (k_max - k_min) + 1);
  const double lo = beta * k_min - 0.5 * beta;
  const double hi = beta * k_max + 0.5 * beta;
  for (const auto& p : samples.points) {
    if (p.gamma >= lo && p.gamma <= hi) ++d.inside_window;
  }
  d.window_density = static_cast<double>(d.inside_window) / (hi - lo);
  d.reference_density = 2.0 / beta;
  return d;
}

}  // namespace gsis
