#include "gsis/equiv.hpp"

#include <algorithm>
#include <cmath>

#include "gsis/error.hpp"

namespace gsis {

namespace {

constexpr double kImagThreshold = 1e-12;
constexpr double kTieBreak = 1e-14;

struct Padded {
  std::vector<cplx> f, g;
  int k_min = 0;
};

Padded pad(const GaussianSignal& f, const GaussianSignal& g) {
  Padded p;
  p.k_min = std::min(f.k_min(), g.k_min());
  const int k_max = std::max(f.k_max(), g.k_max());
  for (int k = p.k_min; k <= k_max; ++k) {
    p.f.push_back(f.coeff(k));
    p.g.push_back(g.coeff(k));
  }
  return p;
}

double norm2(const std::vector<cplx>& c) {
  double s = 0.0;
  for (const cplx& z : c) s += std::norm(z);
  return std::sqrt(s);
}

// <a, b> = sum conj(a_k) b_k
cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{};
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s;
}

void check_compatible(const GaussianSignal& f, const GaussianSignal& g) {
  if (f.is_zero() || g.is_zero()) {
    throw Error(ErrorKind::ZeroSignal, "cannot compare against the zero signal");
  }
  if (f.lambda() != g.lambda() || f.beta() != g.beta()) {
    throw Error(ErrorKind::InvalidArgument, "signals use different lambda or beta");
  }
}

}  // namespace

GaussianSignal canonicalize(const GaussianSignal& signal) {
  if (signal.is_zero()) return signal;
  std::vector<cplx> c(signal.coeffs().begin(), signal.coeffs().end());
  const cplx lead = c.front();
  const cplx rot = std::conj(lead) / std::abs(lead);
  double c_max = 0.0;
  for (auto& z : c) {
    z *= rot;
    c_max = std::max(c_max, std::abs(z));
  }
  c.front() = {std::abs(lead), 0.0};
  for (const cplx& z : c) {
    if (std::abs(z.imag()) > kImagThreshold * c_max) {
      if (z.imag() < 0.0) {
        for (auto& w : c) w = std::conj(w);
      }
      break;
    }
  }
  return GaussianSignal(signal.lambda(), signal.beta(), signal.k_min(), std::move(c));
}

EquivalenceReport equivalence_distance(const GaussianSignal& f, const GaussianSignal& g) {
  check_compatible(f, g);
  const Padded p = pad(f, g);
  const double nf = norm2(p.f);

  EquivalenceReport best;
  bool have = false;
  for (bool conj : {false, true}) {
    std::vector<cplx> t = p.g;
    if (conj) {
      for (auto& z : t) z = std::conj(z);
    }
    const cplx ip = inner(t, p.f);
    const cplx z = std::abs(ip) > 0.0 ? ip / std::abs(ip) : cplx{1.0, 0.0};
    double diff = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      t[k] *= z;
      diff += std::norm(p.f[k] - t[k]);
    }
    const double dist = std::sqrt(diff) / nf;
    if (!have || dist < best.distance - kTieBreak) {
      // Drop the zero padding that lies outside g's own support.
      const int lo = g.k_min() - p.k_min;
      std::vector<cplx> own(t.begin() + lo, t.begin() + lo + static_cast<long>(g.size()));
      best.distance = dist;
      best.phase = z;
      best.conjugated = conj;
      best.aligned = GaussianSignal(g.lambda(), g.beta(), g.k_min(), std::move(own));
      have = true;
    }
  }
  return best;
}

double symmetric_distance(const GaussianSignal& f, const GaussianSignal& g) {
  check_compatible(f, g);
  const Padded p = pad(f, g);
  const double nf = norm2(p.f);
  const double ng = norm2(p.g);
  double best = 0.0;
  for (bool conj : {false, true}) {
    std::vector<cplx> t = p.g;
    if (conj) {
      for (auto& z : t) z = std::conj(z);
    }
    best = std::max(best, std::abs(inner(t, p.f)) / (nf * ng));
  }
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * best));
}

}  // namespace gsis
