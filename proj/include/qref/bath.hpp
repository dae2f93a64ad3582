#ifndef QREF_BATH_HPP
#define QREF_BATH_HPP

#include <cmath>

namespace qref {

// Ohmic spectral density with exponential cutoff, J(w) = kappa |w| exp(-|w|/cutoff).
inline double ohmic_spectral_density(double omega, double kappa, double cutoff) {
  const double a = std::abs(omega);
  return kappa * a * std::exp(-a / cutoff);
}

// Bose occupation at frequency omega > 0. expm1 keeps the small-omega/T limit accurate.
inline double bose_occupation(double omega, double T) {
  return 1.0 / std::expm1(omega / T);
}

// Thermal transition rate at signed frequency omega (nonzero). Positive omega:
// a quantum is absorbed from the bath, weight n(omega). Negative omega: a
// quantum is emitted into the bath, weight n(|omega|) + 1. The two directions
// satisfy detailed balance, rate(w) e^{w/T} = rate(-w).
inline double decay_rate(double omega, double T, double kappa, double cutoff) {
  const double a = std::abs(omega);
  const double j = ohmic_spectral_density(a, kappa, cutoff);
  if (j == 0.0) return 0.0;  // kappa = 0 switches the bath off entirely
  const double n = bose_occupation(a, T);
  return omega > 0.0 ? j * n : j * (n + 1.0);
}

}  // namespace qref

#endif
