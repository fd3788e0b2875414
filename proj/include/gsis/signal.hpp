#pragma once

// Signals in the Gaussian shift-invariant space
//
//   f(x) = sum_k c_k exp(-lambda (x - beta k)^2),   k_min <= k <= k_max,
//
// and their phaseless Hermite samples (|f(gamma)|, |f'(gamma)|).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gsis {

using cplx = std::complex<double>;

class GaussianSignal {
 public:
  // Throws Error(InvalidSignal) unless lambda, beta > 0, coeffs is non-empty
  // with nonzero first and last entries, and every entry is finite.
  GaussianSignal(double lambda, double beta, int k_min, std::vector<cplx> coeffs);

  // The empty-support signal. Only omega_signal produces it.
  static GaussianSignal zero(double lambda, double beta);

  double lambda() const noexcept { return lambda_; }
  double beta() const noexcept { return beta_; }
  int k_min() const noexcept { return k_min_; }
  int k_max() const noexcept { return k_min_ + static_cast<int>(coeffs_.size()) - 1; }
  // K_+ - K_-.
  int width() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  bool is_zero() const noexcept { return coeffs_.empty(); }

  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  // Coefficient at absolute lattice index k; zero outside the support.
  cplx coeff(int k) const noexcept;

  friend bool operator==(const GaussianSignal&, const GaussianSignal&) = default;

 private:
  GaussianSignal(double lambda, double beta) : lambda_(lambda), beta_(beta) {}

  double lambda_;
  double beta_;
  int k_min_ = 0;
  std::vector<cplx> coeffs_;
};

struct HermiteSample {
  double gamma = 0.0;
  double mag_f = 0.0;
  double mag_df = 0.0;

  friend bool operator==(const HermiteSample&, const HermiteSample&) = default;
};

struct SampleSet {
  std::vector<HermiteSample> points;

  std::size_t size() const noexcept { return points.size(); }
  // Throws DuplicatePoints or InvalidArgument (negative / non-finite magnitude).
  void validate() const;

  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

cplx evaluate(const GaussianSignal& signal, double x);
cplx evaluate_derivative(const GaussianSignal& signal, double x);

// d_k = k c_k at absolute index k, trimmed to a valid support.
GaussianSignal omega_signal(const GaussianSignal& signal);

// Same coefficients on the unit lattice: out(u) == in(beta u).
GaussianSignal normalize_step(const GaussianSignal& signal);

GaussianSignal conjugate(const GaussianSignal& signal);
GaussianSignal scaled(const GaussianSignal& signal, cplx factor);

SampleSet hermite_samples(const GaussianSignal& signal, std::span<const double> gammas);

// 2 (k_max - k_min) + 1 equispaced points on [beta k_min - beta/2, beta k_max + beta/2].
std::vector<double> default_sampling_grid(int k_min, int k_max, double beta);
// Same window with an explicit point count (oversampled grids).
std::vector<double> sampling_grid(int k_min, int k_max, double beta, std::size_t count);

// Finite stand-in for the lower Beurling density: nothing asymptotic can be
// measured on a finite set, so we report counts against the window.
struct SamplingDiagnostics {
  std::size_t count = 0;
  std::size_t required = 0;          // 2 (k_max - k_min) + 1
  std::size_t inside_window = 0;     // points in [beta k_min - beta/2, beta k_max + beta/2]
  double window_density = 0.0;       // inside_window / window length
  double reference_density = 0.0;    // 2 / beta
  bool sufficient() const noexcept { return count >= required; }
};

SamplingDiagnostics sampling_diagnostics(const SampleSet& samples, int k_min, int k_max,
                                         double beta);

}  // namespace gsis
