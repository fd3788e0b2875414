#include "gsis/recursion.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gsis/error.hpp"
#include "summation.hpp"

namespace gsis {

RelativeMoments RelativeMoments::from(const AutocorrData& data) {
  data.validate();
  if (!data.has_B()) throw Error(ErrorKind::InvalidArgument, "B sequence missing");
  RelativeMoments d;
  const int k = data.k_min();
  const double lb2 = data.lambda * data.beta * data.beta;
  const std::size_t n = data.A.size();
  d.A = data.A;
  d.E.resize(n);
  d.scale.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double si = static_cast<double>(s);
    d.E[s] = data.B[s] - (static_cast<double>(k) * k + k * si) * data.A[s];
    const double m = data.m_min + si;
    d.scale[s] = std::exp(0.5 * lb2 * m * m);
  }
  return d;
}

RelativeMoments RelativeMoments::reversed() const {
  const int n = width();
  const std::size_t len = A.size();
  RelativeMoments r;
  r.A.resize(len);
  r.E.resize(len);
  r.scale.resize(len);
  for (std::size_t s = 0; s < len; ++s) {
    const std::size_t src = len - 1 - s;
    const double si = static_cast<double>(s);
    r.A[s] = A[src];
    r.E[s] = (n * si - static_cast<double>(n) * n) * A[src] + E[src];
    r.scale[s] = scale[src];
  }
  return r;
}

PartialCoefficients::PartialCoefficients(int width)
    : value_(static_cast<std::size_t>(width + 1)),
      full_(static_cast<std::size_t>(width + 1), 0),
      real_known_(static_cast<std::size_t>(width + 1), 0) {}

bool PartialCoefficients::full(int i) const noexcept {
  return i >= 0 && i <= width() && full_[static_cast<std::size_t>(i)];
}

bool PartialCoefficients::real_known(int i) const noexcept {
  return i >= 0 && i <= width() && (real_known_[static_cast<std::size_t>(i)] || full(i));
}

double PartialCoefficients::real(int i) const {
  if (!real_known(i)) throw std::logic_error("real part not yet determined");
  return value_[static_cast<std::size_t>(i)].real();
}

cplx PartialCoefficients::value(int i) const {
  if (!full(i)) throw std::logic_error("coefficient not yet determined");
  return value_[static_cast<std::size_t>(i)];
}

void PartialCoefficients::set_real(int i, double re) {
  value_.at(static_cast<std::size_t>(i)) = {re, 0.0};
  real_known_[static_cast<std::size_t>(i)] = 1;
}

void PartialCoefficients::set_full(int i, cplx v) {
  value_.at(static_cast<std::size_t>(i)) = v;
  full_[static_cast<std::size_t>(i)] = 1;
  real_known_[static_cast<std::size_t>(i)] = 1;
}

std::optional<double> PartialCoefficients::pair_real(int i, int l) const {
  if (i < 0 || l < 0 || i > width() || l > width()) return 0.0;
  if (full(i) && full(l)) return (value(i) * std::conj(value(l))).real();
  if (!real_known(i) || !real_known(l)) return std::nullopt;
  // Re(a_i conj(a_l)) = Re a_i Re a_l + Im a_i Im a_l; one known-real factor
  // kills the second product.
  if ((full(i) && value(i).imag() == 0.0) || (full(l) && value(l).imag() == 0.0)) {
    return real(i) * real(l);
  }
  return std::nullopt;
}

std::vector<cplx> PartialCoefficients::values() const {
  for (int i = 0; i <= width(); ++i) {
    if (!full(i)) throw std::logic_error("recursion left a coefficient undetermined");
  }
  return value_;
}

namespace {

struct Scaled {
  double value = 0.0;
  double scale = 0.0;
};

double known_pair(const PartialCoefficients& pc, int i, int l) {
  const auto v = pc.pair_real(i, l);
  if (!v) {
    std::ostringstream os;
    os << "pair (" << i << ", " << l << ") needed before it is determined";
    throw std::logic_error(os.str());
  }
  return *v;
}

// seq[order] - sum over ordered pairs (i, order-i), i in [lo, order-lo], of
// weight(i) * Re(a_i conj(a_{order-i})), skipping i in {skip1, skip2}.
template <class Weight>
Scaled subtract_pairs(const std::vector<double>& seq, const PartialCoefficients& pc, int order,
                      int lo, int skip1, int skip2, Weight weight) {
  detail::CompensatedSum sum;
  const double target = seq.at(static_cast<std::size_t>(order));
  sum.add(target);
  double scale = std::abs(target);
  for (int i = lo; i <= order - lo; ++i) {
    if (i == skip1 || i == skip2) continue;
    const int l = order - i;
    if (i > pc.width() || l > pc.width()) continue;
    const double term = weight(i) * known_pair(pc, i, l);
    sum.add(-term);
    scale += std::abs(term);
  }
  return {sum.value(), scale};
}

Scaled real_part_scaled(const RelativeMoments& d, const PartialCoefficients& pc, int j) {
  if (j < 1 || j > d.width()) throw std::logic_error("real_part index out of range");
  const Scaled rest = subtract_pairs(d.A, pc, j, 1, -1, -1, [](int) { return 1.0; });
  const double two_a0 = 2.0 * pc.real(0);
  return {rest.value / two_a0, rest.scale / two_a0};
}

Scaled modulus_sq_scaled(const RelativeMoments& d, const PartialCoefficients& pc, int p) {
  const int order = 2 * p;
  const Scaled rest = subtract_pairs(d.E, pc, order, 1, p, -1,
                                     [order](int i) { return static_cast<double>(i) * (order - i); });
  const double w = static_cast<double>(p) * p;
  return {rest.value / w, rest.scale / w};
}

}  // namespace

namespace steps {

double leading(const RelativeMoments& d) {
  if (d.A.empty() || !(d.A.front() > 0.0)) {
    throw Error(ErrorKind::InvalidLeadingCoefficient, "A_{2K_-} must be strictly positive");
  }
  return std::sqrt(d.A.front());
}

double real_part(const RelativeMoments& d, const PartialCoefficients& pc, int j) {
  return real_part_scaled(d, pc, j).value;
}

double modulus_sq(const RelativeMoments& d, const PartialCoefficients& pc, int p) {
  return modulus_sq_scaled(d, pc, p).value;
}

double cross_term_E(const RelativeMoments& d, const PartialCoefficients& pc, int k, int p) {
  const int order = k + p;
  const Scaled rest = subtract_pairs(d.E, pc, order, 1, k, p,
                                     [order](int i) { return static_cast<double>(i) * (order - i); });
  return rest.value / (2.0 * p * k);
}

double cross_term_A(const RelativeMoments& d, const PartialCoefficients& pc, int k, int p) {
  const Scaled rest =
      subtract_pairs(d.A, pc, k + p, 0, k, p, [](int) { return 1.0; });
  return rest.value / 2.0;
}

double imag_from_cross(double cross, double re_k, cplx pivot) {
  if (pivot.imag() == 0.0) throw std::logic_error("pivot coefficient is real");
  return (cross - re_k * pivot.real()) / pivot.imag();
}

}  // namespace steps

namespace {

// Largest scaled mismatch of the orders s <= k, which depend on a_0..a_k only.
double prefix_residual(const RelativeMoments& d, const PartialCoefficients& pc, int k) {
  double norm = 0.0;
  for (std::size_t s = 0; s < d.A.size(); ++s) norm = std::max(norm, std::abs(d.A[s] * d.scale[s]));
  if (norm == 0.0) return 0.0;
  double worst = 0.0;
  for (int s = 0; s <= k; ++s) {
    detail::CompensatedSum a, e;
    for (int i = 0; i <= s; ++i) {
      const double re = (pc.value(i) * std::conj(pc.value(s - i))).real();
      a.add(re);
      e.add(static_cast<double>(i) * (s - i) * re);
    }
    const double sc = d.scale[static_cast<std::size_t>(s)];
    worst = std::max(worst, std::abs(a.value() - d.A[static_cast<std::size_t>(s)]) * sc);
    worst = std::max(worst, std::abs(e.value() - d.E[static_cast<std::size_t>(s)]) * sc);
  }
  return worst / norm;
}

}  // namespace

RecursionOutcome run_recursion(const RelativeMoments& d, double tol_imag, double clamp_tol) {
  const int n = d.width();
  RecursionOutcome out;
  PartialCoefficients pc(n);
  pc.set_full(0, steps::leading(d));
  out.trace.push_back({0, "sqrt-A", prefix_residual(d, pc, 0)});

  auto ensure_real = [&](int upto) {
    for (int j = 1; j <= std::min(upto, n); ++j) {
      if (!pc.real_known(j)) pc.set_real(j, steps::real_part(d, pc, j));
    }
  };

  std::optional<int> pivot;
  for (int q = 1; q <= n && !pivot; ++q) {
    ensure_real(2 * q - 1);
    const Scaled mod = modulus_sq_scaled(d, pc, q);
    const double re = pc.real(q);
    double im2 = mod.value - re * re;
    const double scale = mod.scale + re * re;
    if (im2 < 0.0) {
      const double rel = -im2 / (scale > 0.0 ? scale : 1.0);
      if (clamp_tol >= 0.0 && rel > clamp_tol) {
        std::ostringstream os;
        os << "|a|^2 - (Re a)^2 = " << im2 << " at relative index " << q << " (scale " << scale
           << ")";
        throw Error(ErrorKind::NegativeDiscriminant, os.str());
      }
      out.clamped = std::max(out.clamped, rel);
      im2 = 0.0;
    }
    if (im2 > tol_imag * tol_imag * std::max(mod.value, 0.0)) {
      pivot = q;
      pc.set_full(q, {re, std::sqrt(im2)});
      out.trace.push_back({q, "real-A/modulus-E:pivot", prefix_residual(d, pc, q)});
    } else {
      pc.set_full(q, {re, 0.0});
      out.trace.push_back({q, "real-A/modulus-E", prefix_residual(d, pc, q)});
    }
  }

  if (pivot) {
    const int p = *pivot;
    const cplx ap = pc.value(p);
    for (int k = p + 1; k <= n; ++k) {
      ensure_real(k + p - 1);
      const bool closure = k + p > n;
      const double cross =
          closure ? steps::cross_term_A(d, pc, k, p) : steps::cross_term_E(d, pc, k, p);
      const double re = pc.real(k);
      pc.set_full(k, {re, steps::imag_from_cross(cross, re, ap)});
      out.trace.push_back(
          {k, closure ? "real-A/cross-A" : "real-A/cross-E", prefix_residual(d, pc, k)});
    }
  }

  out.a = pc.values();
  out.pivot = pivot;
  return out;
}

}  // namespace gsis
