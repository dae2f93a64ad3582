#ifndef QREF_OPTIM_HPP
#define QREF_OPTIM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace qref {

// splitmix64-style mixing, used to derive independent per-stream seeds from one
// master seed so parallel work stays reproducible.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evals = 0;
};

// Plain downhill simplex with the classic reflect/expand/contract/shrink moves.
// Derivative-free, which is all the unitary-search landscape supports.
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0, double step, int max_evals,
                                    double ftol = 1e-12) {
  const int n = static_cast<int>(x0.size());
  struct Vertex {
    Eigen::VectorXd x;
    double fx;
  };
  std::vector<Vertex> s;
  s.reserve(n + 1);
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  s.push_back({x0, eval(x0)});
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x = x0;
    x(i) += step;
    s.push_back({x, eval(x)});
  }
  auto by_f = [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; };
  std::sort(s.begin(), s.end(), by_f);
  while (evals < max_evals) {
    if (s.back().fx - s.front().fx <= ftol * (1.0 + std::abs(s.front().fx))) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += s[i].x;
    centroid /= n;
    const Eigen::VectorXd xr = centroid + (centroid - s.back().x);
    const double fr = eval(xr);
    if (fr < s.front().fx) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - s.back().x);
      const double fe = eval(xe);
      s.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < s[n - 1].fx) {
      s.back() = {xr, fr};
    } else {
      const Eigen::VectorXd xc = centroid + 0.5 * (s.back().x - centroid);
      const double fc = eval(xc);
      if (fc < s.back().fx) {
        s.back() = {xc, fc};
      } else {
        for (int i = 1; i <= n; ++i) {
          s[i].x = s.front().x + 0.5 * (s[i].x - s.front().x);
          s[i].fx = eval(s[i].x);
        }
      }
    }
    std::sort(s.begin(), s.end(), by_f);
  }
  return {s.front().x, s.front().fx, evals};
}

// Objective/constraint evaluations come in one call because they share the
// expensive state construction.
using ObjectiveResidual = std::function<std::pair<double, double>(const Eigen::VectorXd&)>;

struct PenaltySchedule {
  int stages = 8;
  double weight0 = 100.0;       // first quadratic penalty weight
  double growth = 10.0;         // geometric weight increase per stage
  double step0 = 0.35;          // initial simplex step
  double step_shrink = 0.7;     // simplex step reduction per stage
  int evals_per_stage = 2000;
  double ftol = 1e-13;
};

struct PenaltyResult {
  Eigen::VectorXd x;
  double objective = 0.0;  // raw objective at the final point
  double residual = 0.0;   // raw constraint residual at the final point
  int evals = 0;
};

// Exterior quadratic penalty: minimize objective + w * residual^2 while the
// weight w grows geometrically, warm-starting each stage from the last. Large
// final weights push the residual toward the constraint surface; the shrinking
// simplex keeps later stages local.
inline PenaltyResult penalty_minimize(const ObjectiveResidual& fr, const Eigen::VectorXd& x0,
                                      const PenaltySchedule& sched) {
  Eigen::VectorXd x = x0;
  double step = sched.step0;
  int total = 0;
  double w = sched.weight0;
  for (int stage = 0; stage < sched.stages; ++stage) {
    auto penalized = [&fr, w](const Eigen::VectorXd& p) {
      const auto [obj, res] = fr(p);
      return obj + w * res * res;
    };
    NelderMeadResult r = nelder_mead(penalized, x, step, sched.evals_per_stage, sched.ftol);
    x = r.x;
    total += r.evals;
    step *= sched.step_shrink;
    w *= sched.growth;
  }
  const auto [obj, res] = fr(x);
  return {x, obj, res, total};
}

}  // namespace qref

#endif
