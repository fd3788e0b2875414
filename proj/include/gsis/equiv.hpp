#pragma once

// Comparison modulo the ambiguity group {z f, z conj(f) : |z| = 1}.

#include "gsis/signal.hpp"

namespace gsis {

// Rotates the leading coefficient to the positive real axis, then conjugates
// if the first coefficient with |Im| > 1e-12 ||c||_inf has negative Im.
GaussianSignal canonicalize(const GaussianSignal& signal);

struct EquivalenceReport {
  double distance = 0.0;  // ||c_f - z T(c_g)||_2 / ||c_f||_2
  cplx phase{1.0, 0.0};   // z
  bool conjugated = false;
  GaussianSignal aligned = GaussianSignal::zero(1.0, 1.0);  // z T(g)

  friend bool operator==(const EquivalenceReport&, const EquivalenceReport&) = default;
};

// Both sequences are zero-padded to the union of their windows. The optimal
// z for each T is <T(c_g), c_f> / |<T(c_g), c_f>| (1 when the product is 0).
// Throws ZeroSignal, InvalidArgument for mismatched lambda / beta.
EquivalenceReport equivalence_distance(const GaussianSignal& f, const GaussianSignal& g);

// Distance between the unit-norm representatives, sqrt(2 - 2 max_T |<T(c_g), c_f>|)
// after normalizing both. Symmetric and a metric on ambiguity classes.
double symmetric_distance(const GaussianSignal& f, const GaussianSignal& g);

}  // namespace gsis
