#ifndef QREF_HAMILTONIAN_HPP
#define QREF_HAMILTONIAN_HPP

#include <cmath>

#include "qref/errors.hpp"
#include "qref/params.hpp"
#include "qref/types.hpp"

namespace qref {

// Free part H_A + H_B: diagonal in the product basis {|00>,|01>,|02>,|10>,|11>,|12>}.
inline Mat6d build_free_hamiltonian(const RefrigeratorParams& p) {
  Mat6d h = Mat6d::Zero();
  const double e2 = p.E2();
  h(1, 1) = p.E1;
  h(2, 2) = e2;
  h(3, 3) = p.E0;
  h(4, 4) = p.E0 + p.E1;
  h(5, 5) = p.E0 + e2;
  return h;
}

// Full Hamiltonian in the product basis. The interaction g(|02><11| + |11><02|)
// couples the two levels that the resonance condition makes degenerate.
inline Mat6d build_hamiltonian(const RefrigeratorParams& p) {
  Mat6d h = build_free_hamiltonian(p);
  h(2, 4) = p.g;
  h(4, 2) = p.g;
  return h;
}

// Eigenbasis of the full Hamiltonian, in the fixed labelling
//   |e1> = |00>, |e2> = |01>, |e3> = (|11> - |02>)/sqrt2,
//   |e4> = |10>, |e5> = (|11> + |02>)/sqrt2, |e6> = |12>,
// with energies {0, E1, E2 - g, E0, E2 + g, E0 + E2}. Only the degenerate
// |02>/|11> pair mixes; everything else is already an eigenvector. The
// labelling is structural, not sorted by energy.
struct EnergyEigenbasis {
  Vec6d energies;
  Mat6d vectors;  // row k = eigenvector k in product coordinates, orthogonal
};

inline EnergyEigenbasis build_eigenbasis(const RefrigeratorParams& p) {
  if (!(p.g > 0.0))
    throw DegeneracyError("eigenbasis needs g > 0: the |02>/|11> pair is degenerate at g = 0");
  const double e2 = p.E2();
  const double s = 1.0 / std::sqrt(2.0);
  EnergyEigenbasis eb;
  eb.energies << 0.0, p.E1, e2 - p.g, p.E0, e2 + p.g, p.E0 + e2;
  eb.vectors = Mat6d::Zero();
  eb.vectors(0, 0) = 1.0;
  eb.vectors(1, 1) = 1.0;
  eb.vectors(2, 4) = s;   // (|11> - |02>)/sqrt2
  eb.vectors(2, 2) = -s;
  eb.vectors(3, 3) = 1.0;
  eb.vectors(4, 4) = s;   // (|11> + |02>)/sqrt2
  eb.vectors(4, 2) = s;
  eb.vectors(5, 5) = 1.0;
  return eb;
}

inline Mat6c to_energy_basis(const Mat6c& product_op, const EnergyEigenbasis& eb) {
  return eb.vectors * product_op * eb.vectors.transpose();
}

inline Mat6c to_product_basis(const Mat6c& energy_op, const EnergyEigenbasis& eb) {
  return eb.vectors.transpose() * energy_op * eb.vectors;
}

inline DensityMatrix to_energy_basis(const DensityMatrix& rho, const EnergyEigenbasis& eb) {
  if (rho.basis == Basis::energy) return rho;
  return {to_energy_basis(rho.mat, eb), Basis::energy};
}

inline DensityMatrix to_product_basis(const DensityMatrix& rho, const EnergyEigenbasis& eb) {
  if (rho.basis == Basis::product) return rho;
  return {to_product_basis(rho.mat, eb), Basis::product};
}

}  // namespace qref

#endif
