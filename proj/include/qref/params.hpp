#ifndef QREF_PARAMS_HPP
#define QREF_PARAMS_HPP

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qref/errors.hpp"

namespace qref {

// Absorption refrigerator made of a qubit (the cooled object, gap E0) and a
// qutrit (gaps E1 and E2) exchanging a single excitation through the resonant
// coupling g |02><11| + h.c. The machine works on the resonance condition
// E2 = E0 + E1, so E2 is derived, not stored. Units: hbar = kB = 1 and all
// energies measured against the qubit/qutrit ground states.
struct RefrigeratorParams {
  double E0 = 0.7;       // qubit splitting
  double E1 = 1.0;       // qutrit lower gap
  double g = 1e-3;       // two-photon exchange coupling
  double Tc = 1.0;       // cold bath, attached to the qubit
  double Th = 3.0;       // hot bath, drives the qutrit 0<->1 transition
  double Tw = 1.0;       // work bath, drives the qutrit 0<->2 transition
  double kappa_c = 1e-4; // bath coupling strengths entering the spectral densities
  double kappa_h = 1e-4;
  double kappa_w = 1e-4;
  double cutoff = 1e3;   // ohmic cutoff, far above every transition by default

  double E2() const { return E0 + E1; }
};

inline void validate(const RefrigeratorParams& p) {
  auto fail = [](const std::string& what) { throw ParameterError("invalid parameters: " + what); };
  if (!(p.E0 > 0.0)) fail("E0 must be > 0");
  if (!(p.E1 > 0.0)) fail("E1 must be > 0");
  if (!(p.g >= 0.0)) fail("g must be >= 0");
  if (!(p.g < std::min(p.E0, p.E1))) fail("g must be < min(E0, E1) so all transition frequencies stay positive");
  if (!(p.Tc > 0.0)) fail("Tc must be > 0");
  if (!(p.Th > 0.0)) fail("Th must be > 0");
  if (!(p.Tw > 0.0)) fail("Tw must be > 0");
  if (!(p.kappa_c >= 0.0)) fail("kappa_c must be >= 0");
  if (!(p.kappa_h >= 0.0)) fail("kappa_h must be >= 0");
  if (!(p.kappa_w >= 0.0)) fail("kappa_w must be >= 0");
  if (!(p.cutoff > 0.0)) fail("cutoff must be > 0");
}

// Temperature the qubit equilibrates to when only the qutrit's two baths act.
// Matching Boltzmann factors across the E1 (hot) and E2 (work) transitions
// pins the qubit gap's effective inverse temperature to
// beta_v = (E2/Tw - E1/Th) / (E2 - E1).
inline double virtual_temperature(const RefrigeratorParams& p) {
  const double e2 = p.E2();
  return (e2 - p.E1) / (e2 / p.Tw - p.E1 / p.Th);
}

}  // namespace qref

#endif
