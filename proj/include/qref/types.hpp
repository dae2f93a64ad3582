#ifndef QREF_TYPES_HPP
#define QREF_TYPES_HPP

#include <Eigen/Dense>
#include <complex>

namespace qref {

using cplx = std::complex<double>;

using Mat6d = Eigen::Matrix<double, 6, 6>;
using Mat6c = Eigen::Matrix<cplx, 6, 6>;
using Mat2c = Eigen::Matrix<cplx, 2, 2>;
using Vec6d = Eigen::Matrix<double, 6, 1>;
using Vec6c = Eigen::Matrix<cplx, 6, 1>;

// Basis a 6x6 operator is expressed in. "product" is the bare qubit (x) qutrit
// basis |ab> ordered by index 3a+b, i.e. {|00>,|01>,|02>,|10>,|11>,|12>};
// "energy" is the interacting Hamiltonian's eigenbasis.
enum class Basis { product, energy };

inline const char* basis_name(Basis b) { return b == Basis::product ? "product" : "energy"; }

struct DensityMatrix {
  Mat6c mat;
  Basis basis;
};

constexpr double pi = 3.14159265358979323846;

}  // namespace qref

#endif
