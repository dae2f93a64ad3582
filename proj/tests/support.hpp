#ifndef QREF_TESTS_SUPPORT_HPP
#define QREF_TESTS_SUPPORT_HPP

#include <qref/qref.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace qref::testing {

// Admissible random draw: O(1) gaps and temperatures, weak couplings spanning
// three decades, g safely inside (0, min(E0, E1)).
inline RefrigeratorParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> gap(0.3, 1.5);
  std::uniform_real_distribution<double> temp(0.5, 4.0);
  std::uniform_real_distribution<double> logk(std::log(1e-5), std::log(1e-2));
  std::uniform_real_distribution<double> gfrac(0.05, 0.8);
  RefrigeratorParams p;
  p.E0 = gap(rng);
  p.E1 = gap(rng);
  p.g = gfrac(rng) * std::min(p.E0, p.E1);
  p.Tc = temp(rng);
  p.Th = temp(rng);
  p.Tw = temp(rng);
  p.kappa_c = std::exp(logk(rng));
  p.kappa_h = std::exp(logk(rng));
  p.kappa_w = std::exp(logk(rng));
  validate(p);
  return p;
}

// Full-rank random density matrix (Ginibre G G^dag, normalized), product basis.
inline DensityMatrix random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat6c g;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) g(i, j) = cplx(n(rng), n(rng));
  Mat6c rho = g * g.adjoint();
  rho /= rho.trace();
  return {rho, Basis::product};
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

// Worst-case pairing distance between two eigenvalue multisets, greedy nearest
// match. Adequate when true pairs are far closer than distinct eigenvalues.
inline double spectrum_mismatch(const std::vector<cplx>& a, std::vector<cplx> b) {
  double worst = 0.0;
  for (const cplx& x : a) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double d = std::abs(x - b[k]);
      if (d < bd) {
        bd = d;
        best = k;
      }
    }
    worst = std::max(worst, bd);
    b.erase(b.begin() + best);
  }
  return worst;
}

inline std::vector<cplx> matrix_spectrum(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace qref::testing

#endif
