#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace qref;
using Catch::Approx;

namespace {

// Reference operating point shared across the expensive cases; built once.
struct Setup {
  RefrigeratorParams p;
  BlockLiouvillian L = assemble_block_liouvillian(p);
  SpectralDecomposition sd = spectral_decompose(L);
  std::vector<int> slow = slowest_mode_set(sd);
  DensityMatrix th = thermal_product_state(p);

  static const Setup& get() {
    static Setup s;
    return s;
  }
};

const MpembaSolution& global_solution() {
  static const MpembaSolution sol = [] {
    const Setup& s = Setup::get();
    return optimize_mpemba_state(s.sd, s.slow, s.th, UnitaryFamily::global,
                                 OptimizerConfig{});
  }();
  return sol;
}

std::vector<double> state_eigenvalues(const Mat6c& m) {
  Eigen::SelfAdjointEigenSolver<Mat6c> es(m, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + 6};
}

}  // namespace

TEST_CASE("family metadata") {
  CHECK(family_param_count(UnitaryFamily::global) == 36);
  CHECK(family_param_count(UnitaryFamily::local_both) == 13);
  CHECK(family_param_count(UnitaryFamily::local_qubit) == 4);
  CHECK(family_param_count(UnitaryFamily::local_qutrit) == 9);

  for (const char* n : {"global", "local-both", "local-qubit", "local-qutrit"})
    CHECK(family_name(family_from_name(n)) == std::string(n));
  CHECK_THROWS_AS(family_from_name("local"), ConfigError);
}

TEST_CASE("unitary parameterization") {
  std::mt19937_64 rng(7401);
  for (UnitaryFamily f : {UnitaryFamily::global, UnitaryFamily::local_both,
                          UnitaryFamily::local_qubit, UnitaryFamily::local_qutrit}) {
    const int n = family_param_count(f);

    // zero generator is the identity
    const Mat6c id = parameterize_unitary(f, Eigen::VectorXd::Zero(n));
    CHECK((id - Mat6c::Identity()).cwiseAbs().maxCoeff() < 1e-14);

    for (int k = 0; k < 10; ++k) {
      const Mat6c u = parameterize_unitary(f, testing::random_vector(rng, n, 1.0));
      CHECK((u * u.adjoint() - Mat6c::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }

    CHECK_THROWS_AS(parameterize_unitary(f, Eigen::VectorXd::Zero(n + 1)), ParameterError);
  }

  SECTION("single-sided families act on one factor only") {
    const Eigen::VectorXd pq = testing::random_vector(rng, 4, 1.0);
    const Mat6c uq = parameterize_unitary(UnitaryFamily::local_qubit, pq);
    // qubit (x) identity: 3x3 sub-blocks proportional to the identity
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) {
        const Eigen::Matrix<cplx, 3, 3> blk = uq.block<3, 3>(3 * a, 3 * c);
        CHECK((blk - blk(0, 0) * Eigen::Matrix<cplx, 3, 3>::Identity())
                  .cwiseAbs()
                  .maxCoeff() < 1e-13);
      }

    const Eigen::VectorXd pt = testing::random_vector(rng, 9, 1.0);
    const Mat6c ut = parameterize_unitary(UnitaryFamily::local_qutrit, pt);
    // identity (x) qutrit: equal diagonal blocks, zero off-diagonal blocks
    CHECK((ut.block<3, 3>(0, 0) - ut.block<3, 3>(3, 3)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(ut.block<3, 3>(0, 3).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(ut.block<3, 3>(3, 0).cwiseAbs().maxCoeff() < 1e-13);
  }

  SECTION("local-both parameters embed into the global family") {
    const Eigen::VectorXd p13 = testing::random_vector(rng, 13, 0.7);
    const Mat6c direct = parameterize_unitary(UnitaryFamily::local_both, p13);
    const Mat6c embedded =
        parameterize_unitary(UnitaryFamily::global, embed_local_both(p13));
    CHECK((direct - embedded).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("slow-mode constraint") {
  const Setup& s = Setup::get();
  REQUIRE(s.slow == std::vector<int>{1});

  // the steady state carries no decaying amplitude at all
  CHECK(mpemba_constraint(s.sd, s.slow, *s.sd.steady) < 1e-12);

  // the thermal state's slow amplitude, the quantity the search must null
  const double c_th = mpemba_constraint(s.sd, s.slow, s.th);
  CHECK(c_th > 1.8e-3);
  CHECK(c_th < 2.0e-3);

  // subtracting the slow component by mode surgery nulls the constraint
  const DensityMatrix th_e = to_energy_basis(s.th, s.sd.basis);
  const Eigen::VectorXcd amps = mode_amplitudes(s.sd, th_e.mat);
  const Mat6c stripped = th_e.mat - amps(1) * s.sd.modes[1].right;
  CHECK(mpemba_constraint(s.sd, s.slow, {stripped, Basis::energy}) < 1e-10);
}

TEST_CASE("global family finds an accelerated state") {
  const Setup& s = Setup::get();
  const MpembaSolution& sol = global_solution();

  REQUIRE(sol.feasible);
  CHECK(sol.family == UnitaryFamily::global);
  CHECK(sol.residual < 1e-8);
  CHECK(sol.distance_gain == Approx(0.18885305995292984).epsilon(1e-6));
  CHECK(sol.best_start == 9);
  CHECK(sol.total_evals == 512033);

  // solution state is the parameterized rotation of the thermal state
  const Mat6c u = parameterize_unitary(sol.family, sol.params);
  CHECK((u - sol.unitary).cwiseAbs().maxCoeff() == 0.0);
  CHECK((u * u.adjoint() - Mat6c::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(sol.state.basis == Basis::product);
  CHECK((sol.state.mat - u * s.th.mat * u.adjoint()).cwiseAbs().maxCoeff() < 1e-13);

  // unitary conjugation preserves the state spectrum
  const auto ev_th = state_eigenvalues(s.th.mat);
  const auto ev_m = state_eigenvalues(sol.state.mat);
  for (int k = 0; k < 6; ++k) CHECK(std::abs(ev_th[k] - ev_m[k]) < 1e-10);

  SECTION("timing verification reproduces the frozen crossing") {
    const std::vector<double> grid = make_time_grid(s.sd);
    const MpembaTiming t = verify_mpemba(s.sd, sol, s.th, grid, 1e-5);
    CHECK(t.t_crossing == Approx(17833.49279033813).epsilon(1e-6));
    CHECK(t.t_ss_reference == Approx(25433.933396789187).epsilon(1e-6));
    CHECK(t.t_ss_candidate == Approx(23079.992609730987).epsilon(1e-6));
    CHECK(t.t_ss_candidate < t.t_ss_reference);
    CHECK(t.epsilon == 1e-5);
  }

  SECTION("nested families cannot beat the global optimum") {
    const MpembaSolution both = optimize_mpemba_state(s.sd, s.slow, s.th,
                                                      UnitaryFamily::local_both,
                                                      OptimizerConfig{});
    REQUIRE(both.feasible);
    CHECK(both.residual < 1e-8);
    CHECK(both.distance_gain > 0.0);
    CHECK(sol.distance_gain >= both.distance_gain - 1e-9);
  }
}

TEST_CASE("optimizer determinism") {
  const Setup& s = Setup::get();
  OptimizerConfig cfg;
  cfg.starts = 6;
  cfg.evals_per_stage = 400;
  cfg.penalty_stages = 5;
  cfg.seed = 777;

  const MpembaSolution a =
      optimize_mpemba_state(s.sd, s.slow, s.th, UnitaryFamily::global, cfg);
  const MpembaSolution b =
      optimize_mpemba_state(s.sd, s.slow, s.th, UnitaryFamily::global, cfg);
  CHECK(a.feasible == b.feasible);
  CHECK(a.best_start == b.best_start);
  CHECK(a.total_evals == b.total_evals);
  CHECK(a.residual == b.residual);
  CHECK((a.params - b.params).cwiseAbs().maxCoeff() == 0.0);

  // the reduction is index-ordered, so thread count cannot change the result
  cfg.threads = 3;
  const MpembaSolution c =
      optimize_mpemba_state(s.sd, s.slow, s.th, UnitaryFamily::global, cfg);
  CHECK(c.best_start == a.best_start);
  CHECK(c.residual == a.residual);
  CHECK((c.params - a.params).cwiseAbs().maxCoeff() == 0.0);

  // a different seed explores a different landscape sample
  cfg.threads = 0;
  cfg.seed = 778;
  const MpembaSolution d =
      optimize_mpemba_state(s.sd, s.slow, s.th, UnitaryFamily::global, cfg);
  CHECK((d.params - a.params).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("warm starts are polished, not discarded") {
  const Setup& s = Setup::get();
  OptimizerConfig cfg;
  cfg.starts = 1;  // identity start only, plus the supplied anchor
  cfg.extra_starts = {global_solution().params};

  const MpembaSolution sol =
      optimize_mpemba_state(s.sd, s.slow, s.th, UnitaryFamily::global, cfg);
  REQUIRE(sol.feasible);
  CHECK(sol.best_start == 1);  // the anchor, indexed after the random starts
  CHECK(sol.residual < 1e-8);
  CHECK(sol.distance_gain == Approx(global_solution().distance_gain).margin(1e-2));
}

TEST_CASE("detached cold bath forbids nulling the slow mode") {
  RefrigeratorParams p;
  p.kappa_c = 0.0;
  const BlockLiouvillian L = assemble_block_liouvillian(p);
  const SpectralDecomposition sd = spectral_decompose(L);
  const auto slow = slowest_mode_set(sd);
  REQUIRE(slow.size() == 1);
  const DensityMatrix th = thermal_product_state(p);

  // the slow left mode is diagonal in the eigenbasis, so over the whole unitary
  // orbit of the thermal state its amplitude ranges between the sorted dot
  // products of the two eigenvalue lists; that interval excludes zero here
  Vec6d l = sd.modes[slow[0]].left.diagonal().real();
  CHECK((sd.modes[slow[0]].left - l.asDiagonal().toDenseMatrix().cast<cplx>())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  Vec6d q = th.mat.diagonal().real();
  std::sort(l.data(), l.data() + 6);
  std::sort(q.data(), q.data() + 6);
  double hi = 0.0, lo = 0.0;
  for (int k = 0; k < 6; ++k) {
    hi += l(k) * q(k);
    lo += l(k) * q(5 - k);
  }
  REQUIRE(lo < hi);
  // zero amplitude is unreachable by any unitary: the interval misses zero
  REQUIRE((lo > 0.0 || hi < 0.0));
  const double floor = std::min(std::abs(lo), std::abs(hi));
  CHECK(floor == Approx(0.0762987).margin(2e-4));

  OptimizerConfig cfg;
  cfg.starts = 8;
  cfg.evals_per_stage = 800;
  cfg.penalty_stages = 6;
  const MpembaSolution sol =
      optimize_mpemba_state(sd, slow, th, UnitaryFamily::global, cfg);
  CHECK_FALSE(sol.feasible);
  CHECK(sol.residual >= floor - 1e-9);
  CHECK(sol.residual < 0.12);
}

TEST_CASE("qutrit-side rotations can null the slow mode") {
  // The slow amplitude of a product state depends only on the qutrit marginal's
  // diagonal, an affine functional over the majorization polytope. Its values at
  // the permutation vertices change sign, so a two-level rotation between two
  // adjacent vertices passes through zero: the qutrit-local family is feasible.
  const Setup& s = Setup::get();
  const Mat6c l2 = to_product_basis(s.sd.modes[1].left, s.sd.basis);

  const double a0 = s.th.mat(0, 0).real() + s.th.mat(1, 1).real() + s.th.mat(2, 2).real();
  const double q0 = s.th.mat(0, 0).real() / a0;
  const double q1 = s.th.mat(1, 1).real() / a0;
  const double q2 = s.th.mat(2, 2).real() / a0;

  using M3 = Eigen::Matrix<cplx, 3, 3>;
  const M3 qutrit =
      Eigen::Vector3d(q0, q1, q2).asDiagonal().toDenseMatrix().cast<cplx>();

  auto c2_of = [&](const M3& v) {
    Mat6c rho = Mat6c::Zero();
    const M3 sigma = v * qutrit * v.adjoint();
    rho.block<3, 3>(0, 0) = a0 * sigma;
    rho.block<3, 3>(3, 3) = (1.0 - a0) * sigma;
    return (l2 * rho).trace().real();
  };

  // permutation vertices of the qutrit marginal
  std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  auto perm_matrix = [](const std::array<int, 3>& pi) {
    M3 m = M3::Zero();
    for (int i = 0; i < 3; ++i) m(pi[i], i) = 1.0;
    return m;
  };

  int found_i = -1, found_j = -1;
  for (int i = 0; i < 6 && found_i < 0; ++i)
    for (int j = 0; j < 6 && found_i < 0; ++j) {
      int moved = 0;
      for (int k = 0; k < 3; ++k)
        if (perms[i][k] != perms[j][k]) ++moved;
      if (moved != 2) continue;  // want vertices joined by one transposition
      if (c2_of(perm_matrix(perms[i])) * c2_of(perm_matrix(perms[j])) < 0.0) {
        found_i = i;
        found_j = j;
      }
    }
  REQUIRE(found_i >= 0);

  // rotate in the plane of the two swapped slots and bisect the sign change
  int slots[2], nslot = 0;
  for (int k = 0; k < 3; ++k)
    if (perms[found_i][k] != perms[found_j][k]) slots[nslot++] = k;
  REQUIRE(nslot == 2);
  const M3 base = perm_matrix(perms[found_i]);
  auto rotated = [&](double theta) {
    M3 g = M3::Identity();
    g(slots[0], slots[0]) = std::cos(theta);
    g(slots[1], slots[1]) = std::cos(theta);
    g(slots[0], slots[1]) = -std::sin(theta);
    g(slots[1], slots[0]) = std::sin(theta);
    return M3(g * base);
  };

  double ta = 0.0, tb = qref::pi / 2.0;
  REQUIRE(c2_of(rotated(ta)) * c2_of(rotated(tb)) < 0.0);
  for (int it = 0; it < 200; ++it) {
    const double tm = 0.5 * (ta + tb);
    if (c2_of(rotated(ta)) * c2_of(rotated(tm)) <= 0.0)
      tb = tm;
    else
      ta = tm;
  }
  const M3 v = rotated(0.5 * (ta + tb));

  // assemble the witness state and confirm it satisfies the library constraint
  Mat6c rho = Mat6c::Zero();
  const M3 sigma = v * qutrit * v.adjoint();
  rho.block<3, 3>(0, 0) = a0 * sigma;
  rho.block<3, 3>(3, 3) = (1.0 - a0) * sigma;
  const DensityMatrix witness{rho, Basis::product};
  CHECK_NOTHROW(validate_density(witness));
  CHECK(mpemba_constraint(s.sd, s.slow, witness) < 1e-8);
}

TEST_CASE("speedup verification failure modes") {
  const Setup& s = Setup::get();
  const std::vector<double> grid = make_time_grid(s.sd, 200, 0.1, 20.0);

  SECTION("candidate equal to the reference is rejected for not starting farther") {
    MpembaSolution sol = global_solution();
    sol.state = s.th;
    CHECK_THROWS_MATCHES(
        verify_mpemba(s.sd, sol, s.th, grid, 1e-5), VerificationError,
        Catch::Matchers::MessageMatches(
            Catch::Matchers::ContainsSubstring("does not start farther")));
  }

  SECTION("proportionally farther state never crosses") {
    // scaling the whole deviation from the steady state scales every mode
    // amplitude alike, so the two distance curves keep a constant ratio
    const DensityMatrix th_e = to_energy_basis(s.th, s.sd.basis);
    const Mat6c m = s.sd.steady->mat + 1.05 * (th_e.mat - s.sd.steady->mat);
    MpembaSolution sol = global_solution();
    sol.state = to_product_basis(DensityMatrix{m, Basis::energy}, s.sd.basis);
    CHECK_THROWS_MATCHES(verify_mpemba(s.sd, sol, s.th, grid, 1e-5), VerificationError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("never crosses")));
  }
}
