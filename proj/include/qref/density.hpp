#ifndef QREF_DENSITY_HPP
#define QREF_DENSITY_HPP

#include <cmath>
#include <sstream>

#include "qref/errors.hpp"
#include "qref/hamiltonian.hpp"
#include "qref/params.hpp"
#include "qref/types.hpp"

namespace qref {

// Physical-state checks: Hermitian to 1e-12, unit trace to 1e-12, and no
// eigenvalue below -1e-10. Throws NumericalError naming the broken property.
inline void validate_density(const DensityMatrix& rho) {
  const double herm = (rho.mat - rho.mat.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) {
    std::ostringstream os;
    os << "density matrix not Hermitian, max |rho - rho^dag| = " << herm;
    throw NumericalError(os.str());
  }
  const double tr_err = std::abs(rho.mat.trace() - cplx(1.0, 0.0));
  if (tr_err > 1e-12) {
    std::ostringstream os;
    os << "density matrix trace off unity by " << tr_err;
    throw NumericalError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat6c> es(0.5 * (rho.mat + rho.mat.adjoint()),
                                          Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10) {
    std::ostringstream os;
    os << "density matrix not positive semidefinite, min eigenvalue = " << min_eig;
    throw NumericalError(os.str());
  }
}

// Pre-quench equilibrium: the qubit thermal at the cold temperature, the qutrit
// with each excited level weighted by its own bath, e^{-E1/Th} and e^{-E2/Tw}.
// Diagonal in the product basis, hence commuting with the free Hamiltonian.
inline DensityMatrix thermal_product_state(const RefrigeratorParams& p) {
  const double a0 = 1.0, a1 = std::exp(-p.E0 / p.Tc);
  const double b0 = 1.0, b1 = std::exp(-p.E1 / p.Th), b2 = std::exp(-p.E2() / p.Tw);
  const double za = a0 + a1, zb = b0 + b1 + b2;
  Mat6c rho = Mat6c::Zero();
  const double qa[2] = {a0 / za, a1 / za};
  const double qb[3] = {b0 / zb, b1 / zb, b2 / zb};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b) rho(3 * a + b, 3 * a + b) = qa[a] * qb[b];
  return {rho, Basis::product};
}

// Gibbs state of the full Hamiltonian at temperature T, diagonal in the energy basis.
inline DensityMatrix gibbs_state(double T, const EnergyEigenbasis& eb) {
  Vec6d w;
  for (int i = 0; i < 6; ++i) w(i) = std::exp(-eb.energies(i) / T);
  w /= w.sum();
  Mat6c rho = Mat6c::Zero();
  for (int i = 0; i < 6; ++i) rho(i, i) = w(i);
  return {rho, Basis::energy};
}

// Qubit reduced state, tracing out the qutrit. Product basis only.
inline Mat2c qubit_marginal(const DensityMatrix& rho) {
  if (rho.basis != Basis::product)
    throw BasisMismatchError("qubit marginal needs a product-basis state");
  Mat2c m = Mat2c::Zero();
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < 2; ++ap)
      for (int b = 0; b < 3; ++b) m(a, ap) += rho.mat(3 * a + b, 3 * ap + b);
  return m;
}

}  // namespace qref

#endif
