#ifndef QREF_LIOUVILLIAN_HPP
#define QREF_LIOUVILLIAN_HPP

#include <array>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "qref/density.hpp"
#include "qref/errors.hpp"
#include "qref/jump_operators.hpp"

namespace qref {

// The generator acts on energy-basis matrix elements. Populations close among
// themselves (a classical 6x6 rate matrix); of the thirty coherences, eight
// couple pairwise through the two-element cold channels because their Bohr
// frequencies coincide, and the remaining twenty-two evolve independently.
struct PairBlock {
  std::array<std::pair<int, int>, 2> elems;  // (row, col) element labels, 0-indexed
  Mat2c mat;
};

struct ScalarMode {
  int row, col;
  cplx lambda;
};

struct BlockLiouvillian {
  RefrigeratorParams params;
  EnergyEigenbasis basis;
  std::vector<JumpOperator> jumps;
  Mat6d pop_block;                      // d tau_i/dt = sum_j pop(i,j) tau_j, columns sum to zero
  std::array<PairBlock, 4> pair_blocks;
  std::vector<ScalarMode> scalars;      // 22 self-contained coherences
};

namespace detail {

// The four coherence pairs with matching Bohr frequencies, 0-indexed elements.
// In 1-indexed level labels these are (63,52), (36,25), (65,32), (56,23).
inline std::array<std::array<std::pair<int, int>, 2>, 4> coherence_pairs() {
  return {{{{{5, 2}, {4, 1}}},
           {{{2, 5}, {1, 4}}},
           {{{5, 4}, {2, 1}}},
           {{{4, 5}, {1, 2}}}}};
}

}  // namespace detail

inline BlockLiouvillian assemble_block_liouvillian(const RefrigeratorParams& p) {
  validate(p);
  BlockLiouvillian L;
  L.params = p;
  L.basis = build_eigenbasis(p);
  L.jumps = build_jump_operators(p, L.basis);

  // Every channel matrix must have at most one nonzero per row and per column;
  // that is what keeps populations and coherences from mixing. It holds for
  // this model's channels, so a violation means the construction broke.
  for (const auto& ch : L.jumps) {
    for (int i = 0; i < 6; ++i) {
      int row_nz = 0, col_nz = 0;
      for (int j = 0; j < 6; ++j) {
        if (std::abs(ch.matrix(i, j)) > 1e-14) ++row_nz;
        if (std::abs(ch.matrix(j, i)) > 1e-14) ++col_nz;
      }
      if (row_nz > 1 || col_nz > 1)
        throw NumericalError("jump operator with multiple entries per row or column");
    }
  }

  // Population transfer rates and per-level total outflow.
  L.pop_block = Mat6d::Zero();
  Vec6d outflow = Vec6d::Zero();
  for (const auto& ch : L.jumps) {
    for (int j = 0; j < 6; ++j) {
      for (int i = 0; i < 6; ++i) {
        const double w2 = std::norm(ch.matrix(i, j));
        if (w2 < 1e-28) continue;
        L.pop_block(i, j) += ch.rate * w2;
        L.pop_block(j, j) -= ch.rate * w2;
        outflow(j) += ch.rate * w2;
      }
    }
  }

  // Coherence decay: element (i,j) damps at half the summed outflow of its two
  // levels and rotates at the Bohr frequency E_i - E_j.
  auto lambda_of = [&](int i, int j) {
    return cplx(-(outflow(i) + outflow(j)) / 2.0,
                -(L.basis.energies(i) - L.basis.energies(j)));
  };

  // Cross couplings between coherences: a channel taking level k to i and level
  // l to j feeds element (k,l) into (i,j) with weight rate * M_ik * conj(M_jl).
  std::map<std::pair<std::pair<int, int>, std::pair<int, int>>, cplx> cross;
  for (const auto& ch : L.jumps) {
    for (int i = 0; i < 6; ++i) {
      for (int k = 0; k < 6; ++k) {
        if (std::abs(ch.matrix(i, k)) < 1e-14) continue;
        for (int j = 0; j < 6; ++j) {
          for (int l = 0; l < 6; ++l) {
            if (i == j || k == l) continue;
            if (std::abs(ch.matrix(j, l)) < 1e-14) continue;
            cross[{{i, j}, {k, l}}] += ch.rate * ch.matrix(i, k) * std::conj(ch.matrix(j, l));
          }
        }
      }
    }
  }

  const auto pairs = detail::coherence_pairs();
  for (std::size_t b = 0; b < 4; ++b) {
    L.pair_blocks[b].elems = pairs[b];
    L.pair_blocks[b].mat(0, 0) = lambda_of(pairs[b][0].first, pairs[b][0].second);
    L.pair_blocks[b].mat(1, 1) = lambda_of(pairs[b][1].first, pairs[b][1].second);
    L.pair_blocks[b].mat(0, 1) = 0.0;
    L.pair_blocks[b].mat(1, 0) = 0.0;
  }
  for (const auto& [key, val] : cross) {
    if (std::abs(val) < 1e-20) continue;
    bool placed = false;
    for (std::size_t b = 0; b < 4 && !placed; ++b) {
      const auto& e = L.pair_blocks[b].elems;
      if (key.first == e[0] && key.second == e[1]) {
        L.pair_blocks[b].mat(0, 1) = val;
        placed = true;
      } else if (key.first == e[1] && key.second == e[0]) {
        L.pair_blocks[b].mat(1, 0) = val;
        placed = true;
      }
    }
    if (!placed) {
      std::ostringstream os;
      os << "coherence coupling outside the expected pair structure: (" << key.first.first
         << "," << key.first.second << ") <- (" << key.second.first << "," << key.second.second
         << ")";
      throw NumericalError(os.str());
    }
  }

  L.scalars.clear();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i == j) continue;
      bool in_pair = false;
      for (const auto& pb : pairs)
        for (const auto& e : pb)
          if (e == std::make_pair(i, j)) in_pair = true;
      if (!in_pair) L.scalars.push_back({i, j, lambda_of(i, j)});
    }
  }
  return L;
}

// Independent dense reference: the same master equation vectorized over the
// product basis by column stacking, vec(rho)_{i+6j} = rho_ij, so that
// vec(A rho B) = (B^T (x) A) vec(rho). Used as the oracle the block form is
// checked against; nothing here reuses the block bookkeeping.
inline Eigen::MatrixXcd assemble_full_superoperator(const RefrigeratorParams& p) {
  validate(p);
  const auto eb = build_eigenbasis(p);
  const auto jumps = build_jump_operators(p, eb);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(6, 6);
  const Eigen::MatrixXcd h = build_hamiltonian(p).cast<cplx>();
  const cplx im(0.0, 1.0);
  Eigen::MatrixXcd L = -im * (Eigen::kroneckerProduct(id, h).eval() -
                              Eigen::kroneckerProduct(h.transpose(), id).eval());
  for (const auto& ch : jumps) {
    const Eigen::MatrixXcd m = to_product_basis(ch.matrix, eb);
    const Eigen::MatrixXcd mdm = m.adjoint() * m;
    L += ch.rate * (Eigen::kroneckerProduct(m.conjugate(), m).eval() -
                    0.5 * Eigen::kroneckerProduct(id, mdm).eval() -
                    0.5 * Eigen::kroneckerProduct(mdm.transpose(), id).eval());
  }
  return L;
}

// Embed the blocks back into the vectorized product-basis generator. Exact
// agreement with assemble_full_superoperator is the structural test that the
// block split lost nothing.
inline Eigen::MatrixXcd superoperator_from_blocks(const BlockLiouvillian& L) {
  auto idx = [](int i, int j) { return i + 6 * j; };
  Eigen::MatrixXcd Le = Eigen::MatrixXcd::Zero(36, 36);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) Le(idx(i, i), idx(j, j)) = L.pop_block(i, j);
  for (const auto& pb : L.pair_blocks)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        Le(idx(pb.elems[a].first, pb.elems[a].second),
           idx(pb.elems[b].first, pb.elems[b].second)) = pb.mat(a, b);
  for (const auto& s : L.scalars) Le(idx(s.row, s.col), idx(s.row, s.col)) = s.lambda;
  // change of basis: vec(rho_prod) = (V^T (x) V^T) vec(rho_energy)
  const Eigen::MatrixXd Vt = L.basis.vectors.transpose();
  const Eigen::MatrixXd S = Eigen::kroneckerProduct(Vt, Vt);
  return S * Le * S.transpose();
}

// Stationary populations from the null space of the rate matrix. The spectrum
// gap check rejects configurations whose bath graph does not connect all six
// levels (a single bath leaves disjoint sectors).
inline DensityMatrix solve_steady_state(const BlockLiouvillian& L) {
  Eigen::JacobiSVD<Mat6d> svd(L.pop_block, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(4) <= 1e-10) {
    std::ostringstream os;
    os << "population generator is not ergodic: second-smallest singular value " << sv(4);
    throw NonErgodicError(os.str());
  }
  Vec6d tau = svd.matrixV().col(5);
  if (tau.sum() < 0.0) tau = -tau;
  tau /= tau.sum();
  const double min_w = tau.minCoeff();
  if (min_w < -1e-10) {
    std::ostringstream os;
    os << "steady-state weight went negative: " << min_w;
    throw NumericalError(os.str());
  }
  for (int i = 0; i < 6; ++i) tau(i) = std::max(tau(i), 0.0);
  tau /= tau.sum();
  Mat6c rho = Mat6c::Zero();
  for (int i = 0; i < 6; ++i) rho(i, i) = tau(i);
  return {rho, Basis::energy};
}

}  // namespace qref

#endif
