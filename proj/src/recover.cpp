#include "gsis/recover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gsis/equiv.hpp"
#include "gsis/error.hpp"
#include "gsis/expsolve.hpp"
#include "gsis/refine.hpp"

namespace gsis {

namespace {

void check_data(const AutocorrData& data, int k_min, int k_max) {
  if (k_min > k_max) throw Error(ErrorKind::InvalidArgument, "k_min > k_max");
  data.validate();
  const std::size_t len = static_cast<std::size_t>(2 * (k_max - k_min) + 1);
  if (data.m_min != 2 * k_min || data.A.size() != len || data.B.size() != len) {
    throw Error(ErrorKind::InvalidArgument, "A and B must cover m = 2 k_min .. 2 k_max");
  }
}

GaussianSignal make_signal(const AutocorrData& data, const std::vector<cplx>& c) {
  for (const cplx& z : c) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorKind::InconsistentData, "recovered coefficients are not finite");
    }
  }
  if (c.front() == cplx{} || c.back() == cplx{}) {
    throw Error(ErrorKind::InconsistentData,
                "recovered end coefficient vanishes; the data do not fill the support window");
  }
  return GaussianSignal(data.lambda, data.beta, data.k_min(), c);
}

std::vector<cplx> relative_to_c(const std::vector<cplx>& a, int k_min, double lb2) {
  std::vector<cplx> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double k = k_min + static_cast<double>(i);
    c[i] = a[i] * std::exp(lb2 * k * k);
  }
  return c;
}

void check_residual(const RecoveryResult& r) {
  if (!(r.max_residual <= kInconsistentResidual)) {
    std::ostringstream os;
    os << "recovered signal reproduces the data only to relative residual " << r.max_residual
       << "; the data are not an autocorrelation pair on this window";
    throw Error(ErrorKind::InconsistentData, os.str());
  }
}

// First index whose imaginary part is significant against its modulus,
// matching the recursion's branch rule.
std::optional<int> first_complex(const GaussianSignal& s, double tol_imag) {
  for (int k = s.k_min(); k <= s.k_max(); ++k) {
    const cplx z = s.coeff(k);
    if (std::abs(z.imag()) > tol_imag * std::abs(z)) return k;
  }
  return std::nullopt;
}

}  // namespace

double verify_against_data(const RecoveryResult& result, const AutocorrData& data) {
  double a_norm = 0.0;
  for (double v : data.A) a_norm = std::max(a_norm, std::abs(v));
  if (a_norm == 0.0) a_norm = 1.0;

  AutocorrData model;
  if (!result.signal.is_zero()) model = autocorr(result.signal);
  double worst = 0.0;
  const int lo = std::min(data.m_min, result.signal.is_zero() ? data.m_min : model.m_min);
  const int hi = std::max(data.m_max(), result.signal.is_zero() ? data.m_max() : model.m_max());
  for (int m = lo; m <= hi; ++m) {
    worst = std::max(worst, std::abs(model.a(m) - data.a(m)));
    if (data.has_B()) worst = std::max(worst, std::abs(model.b(m) - data.b(m)));
  }
  return worst / a_norm;
}

RecoveryResult recover_coefficients(const AutocorrData& data, int k_min, int k_max,
                                    double tol_imag) {
  check_data(data, k_min, k_max);
  const RelativeMoments d = RelativeMoments::from(data);
  RecursionOutcome rec = run_recursion(d, tol_imag, kDiscriminantClamp);

  const double lb2 = data.lambda * data.beta * data.beta;
  RecoveryResult out;
  out.signal = make_signal(data, relative_to_c(rec.a, k_min, lb2));
  if (rec.pivot) out.pivot_index = k_min + *rec.pivot;
  for (auto& step : rec.trace) step.k += k_min;
  out.branch_trace = std::move(rec.trace);
  out.max_residual = verify_against_data(out, data);
  check_residual(out);
  return out;
}

RecoveryResult reconstruct(const SampleSet& samples, int k_min, int k_max, double lambda,
                           double beta, const ReconstructOptions& options) {
  const MomentRecovery ma = recover_A(samples, k_min, k_max, lambda, beta);
  const MomentRecovery mb = recover_B(samples, ma.data, k_min, k_max);
  const AutocorrData& data = mb.data;

  std::optional<RecoveryResult> direct;
  std::optional<Error> direct_error;
  try {
    direct = recover_coefficients(data, k_min, k_max, options.tol_imag);
  } catch (const Error& e) {
    if (!options.refine) throw;
    direct_error = e;
  }

  RecoveryResult out;
  if (direct) out = std::move(*direct);
  if (options.refine) {
    const double before = direct ? scaled_residual(data, std::vector<cplx>(out.signal.coeffs().begin(),
                                                                          out.signal.coeffs().end()))
                                 : std::numeric_limits<double>::infinity();
    PolishResult polished;
    try {
      polished = polish_best(data, options.tol_imag);
    } catch (const Error&) {
      if (direct_error) throw *direct_error;
      throw;
    }
    if (polished.residual < before) {
      GaussianSignal s = make_signal(data, polished.coeffs);
      if (!direct) out.pivot_index = first_complex(s, options.tol_imag);
      out.signal = std::move(s);
      out.branch_trace.push_back({k_max, "lm-polish", polished.residual});
    }
  }

  out.signal = canonicalize(out.signal);
  if (options.refine) {
    // Real data pins imaginary parts only to about sqrt(eps); prefer an
    // exactly real fit when it explains the data as well.
    std::vector<cplx> c(out.signal.coeffs().begin(), out.signal.coeffs().end());
    if (c.size() == static_cast<std::size_t>(k_max - k_min + 1)) {
      const double complex_res = scaled_residual(data, c);
      const PolishResult real = polish_real(data, c);
      if (real.residual <= std::max(10.0 * complex_res, 1e-12)) {
        out.signal = canonicalize(make_signal(data, real.coeffs));
        out.branch_trace.push_back({k_max, "real-polish", real.residual});
      }
    }
  }
  out.max_residual = verify_against_data(out, data);
  out.condition_A = ma.condition;
  out.condition_B = mb.condition;
  check_residual(out);
  return out;
}

}  // namespace gsis
