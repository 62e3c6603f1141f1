#include "racing/box_lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace racing {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::GradientTolerance: return "gradient_tolerance";
    case SolveStatus::CostTolerance: return "cost_tolerance";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::LineSearchFailed: return "line_search_failed";
    case SolveStatus::NonFiniteStart: return "non_finite_start";
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

BoxLbfgsResult minimize_box_lbfgs(const ValueOnly& f_only, const ValueAndGradient& fg, std::vector<double> x0,
                                  std::span<const double> lower, std::span<const double> upper,
                                  const BoxLbfgsSettings& settings) {
  const std::size_t n = x0.size();
  BoxLbfgsResult res;
  for (std::size_t i = 0; i < n; ++i) x0[i] = std::clamp(x0[i], lower[i], upper[i]);
  std::vector<double> x = std::move(x0), g(n), xn(n), gn(n), d(n), q(n);
  double f = fg(x, g);
  res.evaluations = 1;
  res.f_start = f;
  if (!std::isfinite(f)) {
    res.x = x;
    res.f = f;
    res.status = SolveStatus::NonFiniteStart;
    return res;
  }

  std::deque<std::vector<double>> S, Y;
  std::deque<double> rho;
  res.status = SolveStatus::IterationLimit;
  int it = 0;
  for (; it < settings.max_iterations; ++it) {
    double pg = 0.0;
    std::vector<bool> active(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      pg = std::max(pg, std::abs(std::clamp(x[i] - g[i], lower[i], upper[i]) - x[i]));
      active[i] = (x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0);
      q[i] = active[i] ? 0.0 : g[i];
    }
    if (pg < settings.grad_tol) {
      res.status = SolveStatus::GradientTolerance;
      break;
    }

    // Two-loop recursion on the free subspace.
    std::vector<double> alpha(S.size());
    d = q;
    for (std::size_t k = S.size(); k-- > 0;) {
      alpha[k] = rho[k] * dot(S[k], d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * Y[k][i];
    }
    if (!S.empty()) {
      const double gamma = dot(S.back(), Y.back()) / dot(Y.back(), Y.back());
      for (auto& v : d) v *= gamma;
    }
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double beta = rho[k] * dot(Y[k], d);
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[k] - beta) * S[k][i];
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = active[i] ? 0.0 : -d[i];
    if (dot(d, g) >= 0.0) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -q[i];
      S.clear();
      Y.clear();
      rho.clear();
    }

    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, std::abs(v));
    double t = S.empty() ? std::min(1.0, 0.25 / std::max(dmax, 1e-300)) : 1.0;
    bool accepted = false;
    double fnew = f;
    for (int ls = 0; ls < settings.max_line_search; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = std::clamp(x[i] + t * d[i], lower[i], upper[i]);
      fnew = f_only(xn);
      ++res.evaluations;
      if (!std::isfinite(fnew)) {
        t *= 0.25;
        continue;
      }
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += g[i] * (xn[i] - x[i]);
      if (fnew < f && fnew <= f + settings.armijo * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.status = SolveStatus::LineSearchFailed;
      break;
    }
    fnew = fg(xn, gn);
    ++res.evaluations;

    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > settings.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    const double decrease = f - fnew;
    x.swap(xn);
    g.swap(gn);
    f = fnew;
    if (decrease < settings.cost_tol) {
      ++it;
      res.status = SolveStatus::CostTolerance;
      break;
    }
  }
  res.iterations = it;
  res.x = std::move(x);
  res.f = f;
  return res;
}

}  // namespace racing
