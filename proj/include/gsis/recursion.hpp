#pragma once

// Coefficient recursion in window-relative form.
//
// With K = K_- and a_i = c~_{K+i}, i = 0..N, the data reduce to
//
//   A_s = A_{2K+s}                            = sum_{i+j=s} a_i conj(a_j)
//   E_s = B_{2K+s} - (K^2 + K s) A_{2K+s}     = sum_{i+j=s} i j a_i conj(a_j)
//
// E never involves a_0, so every window reduces to K_- = 0. The step
// functions below each solve one of these equations for one unknown given the
// coefficients determined so far.

#include <optional>
#include <string>
#include <vector>

#include "gsis/autocorr.hpp"
#include "gsis/signal.hpp"

namespace gsis {

struct RelativeMoments {
  std::vector<double> A;
  std::vector<double> E;
  // exp(lambda beta^2 m^2 / 2) for m = 2K + s: maps A_s to the half-lattice
  // coefficient r_m, where all orders are comparable in size.
  std::vector<double> scale;

  int width() const noexcept { return A.empty() ? 0 : static_cast<int>(A.size() - 1) / 2; }

  static RelativeMoments from(const AutocorrData& data);
  // Moments of the reversed sequence a'_i = a_{N-i}:
  //   A'_s = A_{2N-s},  E'_s = (N s - N^2) A_{2N-s} + E_{2N-s}.
  RelativeMoments reversed() const;
};

// Coefficients determined so far. Index i may be unknown, have only its real
// part known, or be fully known.
class PartialCoefficients {
 public:
  explicit PartialCoefficients(int width);

  int width() const noexcept { return static_cast<int>(value_.size()) - 1; }
  bool full(int i) const noexcept;
  bool real_known(int i) const noexcept;
  double real(int i) const;
  cplx value(int i) const;

  void set_real(int i, double re);
  void set_full(int i, cplx v);

  // Re(a_i conj(a_l)), or nullopt when the known parts do not determine it.
  // Indices outside 0..N contribute 0.
  std::optional<double> pair_real(int i, int l) const;

  std::vector<cplx> values() const;  // requires every index full

 private:
  std::vector<cplx> value_;
  std::vector<char> full_;
  std::vector<char> real_known_;
};

namespace steps {

// a_0 = sqrt(A_0). Throws InvalidLeadingCoefficient unless A_0 > 0.
double leading(const RelativeMoments& d);

// Re a_j from A_j = 2 a_0 Re a_j + sum_{i=1}^{j-1} a_i conj(a_{j-i}), 1 <= j <= N.
double real_part(const RelativeMoments& d, const PartialCoefficients& pc, int j);

// |a_p|^2 from E_{2p} = p^2 |a_p|^2 + sum_{i != p} i (2p-i) a_i conj(a_{2p-i}).
double modulus_sq(const RelativeMoments& d, const PartialCoefficients& pc, int p);

// Re(a_k conj(a_p)), k != p, from E_{k+p}: the pair (k, p) carries weight 2pk.
double cross_term_E(const RelativeMoments& d, const PartialCoefficients& pc, int k, int p);

// Re(a_k conj(a_p)), k != p, from A_{k+p}; with k + p > N no a_0 term appears.
double cross_term_A(const RelativeMoments& d, const PartialCoefficients& pc, int k, int p);

// Im a_k from Re(a_k conj(a_p)) = Re a_k Re a_p + Im a_k Im a_p.
double imag_from_cross(double cross, double re_k, cplx pivot);

}  // namespace steps

struct StepRecord {
  int k = 0;            // absolute coefficient index
  std::string formula;  // which equation produced the coefficient
  double residual = 0.0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct RecursionOutcome {
  std::vector<cplx> a;           // relative coefficients a_0 .. a_N
  std::optional<int> pivot;      // relative index of the first complex coefficient
  std::vector<StepRecord> trace; // relative indices in k
  double clamped = 0.0;          // most negative discriminant clamped to 0 (relative)
};

// Runs the recursion. A coefficient is treated as complex (the pivot) once
// Im^2 > tol_imag^2 |a_p|^2. Discriminants below -clamp_tol (relative to their
// scale) throw NegativeDiscriminant; pass a negative clamp_tol to clamp every
// negative discriminant to 0.
RecursionOutcome run_recursion(const RelativeMoments& d, double tol_imag, double clamp_tol);

}  // namespace gsis
