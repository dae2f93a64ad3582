#ifndef QREF_JUMP_OPERATORS_HPP
#define QREF_JUMP_OPERATORS_HPP

#include <cmath>
#include <vector>

#include "qref/bath.hpp"
#include "qref/hamiltonian.hpp"
#include "qref/params.hpp"
#include "qref/types.hpp"

namespace qref {

enum class BathLabel { cold, hot, work };

inline const char* bath_name(BathLabel b) {
  switch (b) {
    case BathLabel::cold: return "cold";
    case BathLabel::hot: return "hot";
    default: return "work";
  }
}

// One Lindblad channel in the energy eigenbasis. omega is the signed Bohr
// frequency of the channel; every matrix satisfies [H, M] = -omega M, so
// omega > 0 entries lower the system energy (emission into the bath, thermal
// weight n+1) and omega < 0 entries are their raising adjoints (absorption,
// weight n). Note the bath-side frequency has the opposite sign of the
// system-side one: lowering the system by omega deposits a quantum of omega
// into the bath, which is why the emission rate is decay_rate(-omega).
struct JumpOperator {
  BathLabel bath;
  double omega;
  Mat6c matrix;
  double rate;
};

namespace detail {

inline double bath_temperature(const RefrigeratorParams& p, BathLabel b) {
  switch (b) {
    case BathLabel::cold: return p.Tc;
    case BathLabel::hot: return p.Th;
    default: return p.Tw;
  }
}

inline double bath_kappa(const RefrigeratorParams& p, BathLabel b) {
  switch (b) {
    case BathLabel::cold: return p.kappa_c;
    case BathLabel::hot: return p.kappa_h;
    default: return p.kappa_w;
  }
}

// Product-basis coupling operator of one bath: the cold bath flips the qubit,
// the hot bath drives the qutrit 0<->1 transition, the work bath 0<->2.
inline Mat6d bath_coupling(BathLabel b) {
  Mat6d x = Mat6d::Zero();
  auto flip = [&x](int i, int j) { x(i, j) = x(j, i) = 1.0; };
  switch (b) {
    case BathLabel::cold:
      flip(0, 3);  // |00><10|
      flip(1, 4);  // |01><11|
      flip(2, 5);  // |02><12|
      break;
    case BathLabel::hot:
      flip(0, 1);  // |00><01|
      flip(3, 4);  // |10><11|
      break;
    case BathLabel::work:
      flip(0, 2);  // |00><02|
      flip(3, 5);  // |10><12|
      break;
  }
  return x;
}

}  // namespace detail

// Eigenoperator decomposition of the three bath couplings. For each bath the
// energy-basis coupling matrix is split by Bohr frequency: elements <i|X|j>
// with energy gap w = E_j - E_i > 0 grouped at equal w form one lowering
// operator A_w; its adjoint is the matching raising operator. Frequencies come
// from eigenvalue gaps, so the near-degenerate w and w +- g channels stay
// separate as long as g is well above the grouping tolerance.
inline std::vector<JumpOperator> build_jump_operators(const RefrigeratorParams& p,
                                                      const EnergyEigenbasis& eb) {
  const double group_tol = 1e-9;  // distinct gaps differ by at least 2g in this model
  std::vector<JumpOperator> out;
  out.reserve(18);
  for (BathLabel b : {BathLabel::cold, BathLabel::hot, BathLabel::work}) {
    const Mat6c xe = to_energy_basis(detail::bath_coupling(b).cast<cplx>(), eb);
    std::vector<double> freqs;
    std::vector<Mat6c> ops;
    for (int j = 0; j < 6; ++j) {
      for (int i = 0; i < 6; ++i) {
        const double gap = eb.energies(j) - eb.energies(i);
        if (gap <= group_tol || std::abs(xe(i, j)) < 1e-14) continue;
        std::size_t k = 0;
        while (k < freqs.size() && std::abs(freqs[k] - gap) > group_tol) ++k;
        if (k == freqs.size()) {
          freqs.push_back(gap);
          ops.push_back(Mat6c::Zero());
        }
        ops[k](i, j) = xe(i, j);
      }
    }
    // sort channels by frequency so the output order is reproducible
    std::vector<std::size_t> order(freqs.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&freqs](std::size_t a, std::size_t c) { return freqs[a] < freqs[c]; });
    const double T = detail::bath_temperature(p, b);
    const double kap = detail::bath_kappa(p, b);
    for (std::size_t k : order) {
      const double w = freqs[k];
      out.push_back({b, w, ops[k], decay_rate(-w, T, kap, p.cutoff)});
      out.push_back({b, -w, ops[k].adjoint(), decay_rate(w, T, kap, p.cutoff)});
    }
  }
  return out;
}

}  // namespace qref

#endif
