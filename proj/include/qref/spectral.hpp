#ifndef QREF_SPECTRAL_HPP
#define QREF_SPECTRAL_HPP

#include <algorithm>
#include <optional>
#include <sstream>
#include <vector>

#include "qref/liouvillian.hpp"

namespace qref {

enum class BlockTag { populations = 0, pair0, pair1, pair2, pair3, scalar };

inline const char* block_name(BlockTag t) {
  switch (t) {
    case BlockTag::populations: return "populations";
    case BlockTag::pair0: return "pair(63,52)";
    case BlockTag::pair1: return "pair(36,25)";
    case BlockTag::pair2: return "pair(65,32)";
    case BlockTag::pair3: return "pair(56,23)";
    default: return "scalar";
  }
}

// One right/left eigenpair of the generator, normalized to Tr(l_i r_j) = delta_ij
// with the plain (unconjugated) trace pairing. For scalar coherences row/col
// give the energy-basis element the mode lives on.
struct Mode {
  cplx lambda;
  Mat6c right, left;
  BlockTag block;
  int ord;       // position inside its block, for reproducible tie-breaking
  int row = -1;  // scalar modes only
  int col = -1;
};

struct SpectralDecomposition {
  RefrigeratorParams params;
  EnergyEigenbasis basis;
  std::vector<Mode> modes;               // descending Re, then |Im| ascending, +Im first
  std::optional<DensityMatrix> steady;   // set when the zero mode is unique
  double biortho_residual = 0.0;         // max |Tr(l_i r_j) - delta_ij|
};

namespace detail {

// Inverting the right-eigenvector matrix gives left eigenvectors that are
// biorthonormal by construction. A nearly singular eigenvector matrix means
// the block is defective within tolerance and the spectral form is unusable.
template <typename MatT>
void check_diagonalizable(const MatT& R, const char* which) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(R);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * sv(0)) {
    std::ostringstream os;
    os << which << " block is defective within tolerance (eigenvector condition "
       << sv(0) / sv(sv.size() - 1) << ")";
    throw NumericalError(os.str());
  }
}

}  // namespace detail

inline SpectralDecomposition spectral_decompose(const BlockLiouvillian& L) {
  SpectralDecomposition sd;
  sd.params = L.params;
  sd.basis = L.basis;
  sd.modes.reserve(36);

  // population block, eigenvectors lifted to diagonal operators
  Eigen::EigenSolver<Mat6d> es(L.pop_block);
  Eigen::Matrix<cplx, 6, 6> R = es.eigenvectors();
  detail::check_diagonalizable(R, "population");
  Eigen::Matrix<cplx, 6, 6> Rinv = R.inverse();
  for (int k = 0; k < 6; ++k) {
    Mode m;
    m.lambda = es.eigenvalues()(k);
    m.right = Mat6c::Zero();
    m.left = Mat6c::Zero();
    for (int i = 0; i < 6; ++i) {
      m.right(i, i) = R(i, k);
      m.left(i, i) = Rinv(k, i);
    }
    m.block = BlockTag::populations;
    m.ord = k;
    sd.modes.push_back(std::move(m));
  }

  // coupled coherence pairs
  for (std::size_t b = 0; b < 4; ++b) {
    const auto& pb = L.pair_blocks[b];
    Eigen::ComplexEigenSolver<Mat2c> es2(pb.mat);
    Mat2c R2 = es2.eigenvectors();
    detail::check_diagonalizable(R2, block_name(static_cast<BlockTag>(1 + b)));
    Mat2c R2inv = R2.inverse();
    for (int k = 0; k < 2; ++k) {
      Mode m;
      m.lambda = es2.eigenvalues()(k);
      m.right = Mat6c::Zero();
      m.left = Mat6c::Zero();
      for (int a = 0; a < 2; ++a) {
        m.right(pb.elems[a].first, pb.elems[a].second) = R2(a, k);
        m.left(pb.elems[a].second, pb.elems[a].first) = R2inv(k, a);
      }
      m.block = static_cast<BlockTag>(1 + b);
      m.ord = k;
      sd.modes.push_back(std::move(m));
    }
  }

  // self-contained coherences: the matrix unit is already the eigenoperator
  for (std::size_t k = 0; k < L.scalars.size(); ++k) {
    const auto& s = L.scalars[k];
    Mode m;
    m.lambda = s.lambda;
    m.right = Mat6c::Zero();
    m.left = Mat6c::Zero();
    m.right(s.row, s.col) = 1.0;
    m.left(s.col, s.row) = 1.0;
    m.block = BlockTag::scalar;
    m.ord = static_cast<int>(k);
    m.row = s.row;
    m.col = s.col;
    sd.modes.push_back(std::move(m));
  }

  // normalize the stationary mode to a unit-trace state and its left partner to
  // the identity, provided the zero eigenvalue is simple
  const double zero_tol = 1e-12 * std::max(1.0, L.pop_block.cwiseAbs().maxCoeff());
  int zero_idx = -1, zero_count = 0;
  for (std::size_t k = 0; k < sd.modes.size(); ++k) {
    if (std::abs(sd.modes[k].lambda) <= zero_tol) {
      ++zero_count;
      if (sd.modes[k].block == BlockTag::populations) zero_idx = static_cast<int>(k);
    }
  }
  if (zero_count == 1 && zero_idx >= 0) {
    Mode& m = sd.modes[zero_idx];
    const cplx tr = m.right.trace();
    if (std::abs(tr) > 1e-8) {
      m.right /= tr;
      m.left *= tr;
      Mat6c rho = 0.5 * (m.right + m.right.adjoint());
      sd.steady = DensityMatrix{rho, Basis::energy};
    }
  }

  std::sort(sd.modes.begin(), sd.modes.end(), [](const Mode& a, const Mode& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
    const double ia = std::abs(a.lambda.imag()), ib = std::abs(b.lambda.imag());
    if (ia != ib) return ia < ib;
    if (a.lambda.imag() != b.lambda.imag()) return a.lambda.imag() > b.lambda.imag();
    if (a.block != b.block) return static_cast<int>(a.block) < static_cast<int>(b.block);
    return a.ord < b.ord;
  });

  double worst = 0.0;
  for (const auto& mi : sd.modes)
    for (const auto& mj : sd.modes) {
      const cplx t = (mi.left * mj.right).trace();
      const double target = (&mi == &mj) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(t - target));
    }
  sd.biortho_residual = worst;
  return sd;
}

inline std::vector<cplx> spectrum(const SpectralDecomposition& sd) {
  std::vector<cplx> out;
  out.reserve(sd.modes.size());
  for (const auto& m : sd.modes) out.push_back(m.lambda);
  return out;
}

inline cplx lambda2(const SpectralDecomposition& sd) { return sd.modes.at(1).lambda; }

// Slowest relaxing modes: everything tied with lambda_2's real part. A complex
// pair shows up as two entries.
inline std::vector<int> slowest_mode_set(const SpectralDecomposition& sd) {
  const double re2 = lambda2(sd).real();
  std::vector<int> out;
  for (std::size_t k = 1; k < sd.modes.size(); ++k)
    if (std::abs(sd.modes[k].lambda.real() - re2) <= 1e-10) out.push_back(static_cast<int>(k));
  return out;
}

// Next decay rate below the slowest set, the one a suppressed state relaxes at.
inline std::optional<cplx> lambda3(const SpectralDecomposition& sd) {
  const double re2 = lambda2(sd).real();
  for (std::size_t k = 1; k < sd.modes.size(); ++k)
    if (sd.modes[k].lambda.real() < re2 - 1e-10) return sd.modes[k].lambda;
  return std::nullopt;
}

// Expansion coefficients Tr(l_k rho) of an energy-basis state.
inline Eigen::VectorXcd mode_amplitudes(const SpectralDecomposition& sd, const Mat6c& rho_energy) {
  Eigen::VectorXcd c(sd.modes.size());
  for (std::size_t k = 0; k < sd.modes.size(); ++k)
    c(k) = (sd.modes[k].left * rho_energy).trace();
  return c;
}

}  // namespace qref

#endif
