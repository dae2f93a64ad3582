#ifndef QREF_DYNAMICS_HPP
#define QREF_DYNAMICS_HPP

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "qref/density.hpp"
#include "qref/spectral.hpp"

namespace qref {

// Half the trace norm of the difference; both states must live in one basis.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.basis != b.basis) {
    std::ostringstream os;
    os << "trace distance between " << basis_name(a.basis) << "- and " << basis_name(b.basis)
       << "-basis states";
    throw BasisMismatchError(os.str());
  }
  const Mat6c d = a.mat - b.mat;
  Eigen::SelfAdjointEigenSolver<Mat6c> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  const double dist = 0.5 * es.eigenvalues().cwiseAbs().sum();
  return std::clamp(dist, 0.0, 1.0);
}

// Effective qubit temperature read off the reduced populations, T = E0/ln(p0/p1).
// Equal populations give +inf (the distinguished infinite-temperature signal);
// an inverted qubit gives a negative value and sets the flag.
struct QubitTemperature {
  double value;
  bool inverted;
};

inline QubitTemperature qubit_temperature(const DensityMatrix& rho_product, double E0) {
  const Mat2c m = qubit_marginal(rho_product);
  const double p0 = m(0, 0).real(), p1 = m(1, 1).real();
  return {E0 / std::log(p0 / p1), p1 > p0};
}

namespace detail {

inline Mat6c reconstruct(const SpectralDecomposition& sd, const Eigen::VectorXcd& amps,
                         double t) {
  Mat6c m = Mat6c::Zero();
  for (std::size_t k = 0; k < sd.modes.size(); ++k)
    m += (amps(k) * std::exp(sd.modes[k].lambda * t)) * sd.modes[k].right;
  return m;
}

inline Mat6c hermitize_checked(const Mat6c& m) {
  const double drift = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (drift > 1e-8) {
    std::ostringstream os;
    os << "evolved state drifted off Hermiticity by " << drift;
    throw NumericalError(os.str());
  }
  return 0.5 * (m + m.adjoint());
}

}  // namespace detail

// Propagate by expanding over the spectral modes, rho(t) = sum_k c_k e^{lambda_k t} r_k.
// Returned in the energy basis. t = 0 short-circuits to the input state.
inline DensityMatrix evolve_state(const SpectralDecomposition& sd, const DensityMatrix& rho0,
                                  double t) {
  const DensityMatrix rho0e = to_energy_basis(rho0, sd.basis);
  if (t == 0.0) return rho0e;
  const Eigen::VectorXcd amps = mode_amplitudes(sd, rho0e.mat);
  return {detail::hermitize_checked(detail::reconstruct(sd, amps, t)), Basis::energy};
}

// Sampled relaxation record: distance to the steady state and the qubit's
// effective temperature along the way. Borrows the generator it was built from;
// keep that SpectralDecomposition alive while refining times on the trajectory.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> distances;
  std::vector<double> temperatures;
  const SpectralDecomposition* generator = nullptr;
  Mat6c rho0_energy;
  std::vector<Mat6c> states;  // energy-basis snapshots, only when requested
};

// Default sampling: t = 0 plus a log grid from lo/|Re lambda_2| to hi/|Re lambda_2|.
inline std::vector<double> make_time_grid(const SpectralDecomposition& sd, int points = 400,
                                          double lo = 0.1, double hi = 20.0) {
  const double r2 = std::abs(lambda2(sd).real());
  if (!(r2 > 0.0)) throw ParameterError("time grid needs a relaxing slowest mode, |Re lambda_2| = 0");
  if (points < 2 || !(hi > lo) || !(lo > 0.0))
    throw ParameterError("time grid needs points >= 2 and hi > lo > 0");
  std::vector<double> t;
  t.reserve(points + 1);
  t.push_back(0.0);
  const double la = std::log(lo / r2), lb = std::log(hi / r2);
  for (int k = 0; k < points; ++k)
    t.push_back(std::exp(la + (lb - la) * k / double(points - 1)));
  return t;
}

inline Trajectory distance_trajectory(const SpectralDecomposition& sd, const DensityMatrix& rho0,
                                      const std::vector<double>& grid, bool store_states = false) {
  if (!sd.steady)
    throw NonErgodicError("distance trajectory needs a unique steady state");
  if (grid.empty() || grid.front() < 0.0)
    throw ParameterError("time grid must start at a nonnegative time");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw ParameterError("time grid must be strictly increasing");

  Trajectory tr;
  tr.times = grid;
  tr.generator = &sd;
  tr.rho0_energy = to_energy_basis(rho0, sd.basis).mat;
  const Eigen::VectorXcd amps = mode_amplitudes(sd, tr.rho0_energy);
  tr.distances.reserve(grid.size());
  tr.temperatures.reserve(grid.size());
  for (double t : grid) {
    Mat6c m = (t == 0.0) ? tr.rho0_energy
                         : detail::hermitize_checked(detail::reconstruct(sd, amps, t));
    const DensityMatrix rho{m, Basis::energy};
    tr.distances.push_back(trace_distance(rho, *sd.steady));
    tr.temperatures.push_back(
        qubit_temperature(to_product_basis(rho, sd.basis), sd.params.E0).value);
    if (store_states) tr.states.push_back(m);
  }
  return tr;
}

namespace detail {

inline double distance_at(const Trajectory& tr, const Eigen::VectorXcd& amps, double t) {
  const SpectralDecomposition& sd = *tr.generator;
  Mat6c m = (t == 0.0) ? tr.rho0_energy : hermitize_checked(reconstruct(sd, amps, t));
  return trace_distance({m, Basis::energy}, *sd.steady);
}

}  // namespace detail

// First time the distance falls below epsilon for good, bisection-refined
// between the bracketing grid samples to a relative width of 1e-3.
inline double steady_state_time(const Trajectory& tr, double epsilon) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
  if (!tr.generator) throw ParameterError("trajectory carries no generator");
  int last_above = -1;
  for (std::size_t k = 0; k < tr.distances.size(); ++k)
    if (tr.distances[k] > epsilon) last_above = static_cast<int>(k);
  if (last_above < 0) return tr.times.front();
  if (last_above + 1 >= static_cast<int>(tr.times.size())) {
    std::ostringstream os;
    os << "distance never settled below " << epsilon << " (final distance "
       << tr.distances.back() << ")";
    throw ConvergenceError(os.str(), tr.distances.back());
  }
  const Eigen::VectorXcd amps = mode_amplitudes(*tr.generator, tr.rho0_energy);
  double a = tr.times[last_above], b = tr.times[last_above + 1];
  while (b - a > 1e-3 * b) {
    const double mid = 0.5 * (a + b);
    if (detail::distance_at(tr, amps, mid) > epsilon)
      a = mid;
    else
      b = mid;
  }
  return b;
}

// Crossing time of two trajectories on one grid: the candidate starts farther
// from the steady state and overtakes the reference. Refined until the two
// distances agree to 1e-8 at the returned time. No crossing returns nullopt.
inline std::optional<double> mpemba_crossing_time(const Trajectory& reference,
                                                  const Trajectory& candidate) {
  if (reference.generator != candidate.generator || reference.generator == nullptr)
    throw ParameterError("crossing time needs two trajectories on the same generator");
  if (reference.times != candidate.times)
    throw ParameterError("crossing time needs a shared time grid");
  if (!(candidate.distances.front() > reference.distances.front()))
    throw OrderingError("candidate must start farther from the steady state than the reference");

  std::size_t k = 1;
  while (k < reference.times.size() &&
         candidate.distances[k] - reference.distances[k] > 0.0)
    ++k;
  if (k == reference.times.size()) return std::nullopt;

  const Eigen::VectorXcd amps_r = mode_amplitudes(*reference.generator, reference.rho0_energy);
  const Eigen::VectorXcd amps_c = mode_amplitudes(*candidate.generator, candidate.rho0_energy);
  double a = reference.times[k - 1], b = reference.times[k];
  double mid = 0.5 * (a + b), gap = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (a + b);
    gap = detail::distance_at(candidate, amps_c, mid) - detail::distance_at(reference, amps_r, mid);
    if (b - a <= 1e-3 * std::max(mid, 1e-300) && std::abs(gap) <= 1e-8) return mid;
    if (gap > 0.0)
      a = mid;
    else
      b = mid;
  }
  if (std::abs(gap) > 1e-8)
    throw NumericalError("crossing-time bisection failed to close the distance gap");
  return mid;
}

// Least-squares slope of ln(distance) over the samples with lo <= distance <= hi.
inline double log_distance_slope(const Trajectory& tr, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const double d = tr.distances[k];
    if (d < lo || d > hi || !(d > 0.0)) continue;
    const double x = tr.times[k], y = std::log(d);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw NumericalError("not enough samples in the distance window for a slope fit");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qref

#endif
