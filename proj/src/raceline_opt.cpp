#include "racing/raceline_opt.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

namespace racing {

namespace {

struct Station {
  Vec2 c;       // centerline point
  Vec2 normal;  // unit left normal
  double lo, hi;
};

struct CurvatureTerm {
  double kappa = 0.0;
  // d kappa / d (x, y) of the previous, current and next point.
  double gx[3] = {0, 0, 0};
  double gy[3] = {0, 0, 0};
};

CurvatureTerm discrete_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double xp = 0.5 * (c.x - a.x);
  const double yp = 0.5 * (c.y - a.y);
  const double xpp = c.x - 2.0 * b.x + a.x;
  const double ypp = c.y - 2.0 * b.y + a.y;
  const double A = xp * ypp - yp * xpp;
  const double B = xp * xp + yp * yp;
  const double B15 = B * std::sqrt(B);
  const double B25 = B15 * B;
  CurvatureTerm t;
  t.kappa = A / B15;
  const double k_xp = ypp / B15 - 3.0 * A * xp / B25;
  const double k_yp = -xpp / B15 - 3.0 * A * yp / B25;
  const double k_xpp = -yp / B15;
  const double k_ypp = xp / B15;
  t.gx[0] = -0.5 * k_xp + k_xpp;
  t.gx[1] = -2.0 * k_xpp;
  t.gx[2] = 0.5 * k_xp + k_xpp;
  t.gy[0] = -0.5 * k_yp + k_ypp;
  t.gy[1] = -2.0 * k_ypp;
  t.gy[2] = 0.5 * k_yp + k_ypp;
  return t;
}

std::vector<Vec2> offset_path(const std::vector<Station>& st, const std::vector<double>& n) {
  std::vector<Vec2> out(st.size());
  for (std::size_t i = 0; i < st.size(); ++i)
    out[i] = {st[i].c.x + n[i] * st[i].normal.x, st[i].c.y + n[i] * st[i].normal.y};
  return out;
}

// min 0.5 d'Hd + g'd subject to lo <= d <= hi, by a primal active-set
// iteration with a sparse LDL' solve on the free variables.
Eigen::VectorXd solve_box_qp(const Eigen::SparseMatrix<double>& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  const Eigen::Index n = g.size();
  // 0 free, -1 at lower bound, +1 at upper bound.
  std::vector<int> state(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd fixed = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] < 0) fixed[i] = lo[i];
      if (state[i] > 0) fixed[i] = hi[i];
    }
    Eigen::VectorXd rhs = -g - H * fixed;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(H.nonZeros()));
    for (Eigen::Index k = 0; k < H.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(H, k); it; ++it) {
        if (state[it.row()] == 0 && state[it.col()] == 0) trip.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] != 0) {
        trip.emplace_back(i, i, 1.0);
        rhs[i] = fixed[i];
      }
    }
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
    if (ldlt.info() != Eigen::Success) break;
    d = ldlt.solve(rhs);

    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] != 0) continue;
      if (d[i] < lo[i]) {
        state[i] = -1;
        changed = true;
      } else if (d[i] > hi[i]) {
        state[i] = 1;
        changed = true;
      }
    }
    if (!changed) {
      const Eigen::VectorXd grad = H * d + g;
      for (Eigen::Index i = 0; i < n; ++i) {
        if ((state[i] < 0 && grad[i] < 0.0) || (state[i] > 0 && grad[i] > 0.0)) {
          state[i] = 0;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  for (Eigen::Index i = 0; i < n; ++i) d[i] = std::clamp(d[i], lo[i], hi[i]);
  return d;
}

double objective(const std::vector<Station>& st, const std::vector<double>& n, bool closed) {
  return curvature_objective(offset_path(st, n), closed);
}

std::vector<double> segment_lengths(const CubicSpline2D& sp) {
  std::vector<double> ds(sp.segment_count());
  for (std::size_t i = 0; i < ds.size(); ++i) ds[i] = sp.knots()[i + 1] - sp.knots()[i];
  return ds;
}

}  // namespace

double curvature_objective(std::span<const Vec2> pts, bool closed) {
  const std::size_t m = pts.size();
  double J = 0.0;
  const std::size_t first = closed ? 0 : 1;
  const std::size_t last = closed ? m : m - 1;
  for (std::size_t i = first; i < last; ++i) {
    const auto t = discrete_curvature(pts[(i + m - 1) % m], pts[i], pts[(i + 1) % m]);
    J += t.kappa * t.kappa;
  }
  return J;
}

RacelineResult optimize_raceline(const RacelineProblem& p) {
  if (!(p.limits.a_lat_max > 0.0 && p.limits.a_lon_max > 0.0 && p.limits.v_cap > 0.0))
    throw std::invalid_argument("raceline: acceleration limits and v_cap must be positive");
  if (!(p.margin >= 0.0)) throw std::invalid_argument("raceline: margin must be non-negative");
  if (p.n_points < 4) throw std::invalid_argument("raceline: n_points must be at least 4");
  double min_width = std::numeric_limits<double>::infinity();
  for (const auto& tp : p.track.points()) min_width = std::min({min_width, tp.w_left, tp.w_right});
  if (!(p.margin < min_width)) throw InfeasibleError("infeasible margin: exceeds available track width");

  const Track& track = p.track;
  const bool closed = track.closed();
  const auto M = static_cast<std::size_t>(p.n_points);
  const double L = track.length();
  const double h = closed ? L / static_cast<double>(M) : L / static_cast<double>(M - 1);

  std::vector<Station> st(M);
  for (std::size_t i = 0; i < M; ++i) {
    const double s = std::min(h * static_cast<double>(i), L);
    const auto e = track.centerline().eval(s);
    const double nrm = std::hypot(e.dx, e.dy);
    double wl = 0.0, wr = 0.0;
    track.widths_at(s, wl, wr);
    // Bounds shrink by a hair so the output never sits exactly on the margin.
    st[i] = {{e.x, e.y}, {-e.dy / nrm, e.dx / nrm}, -(wr - p.margin) + 1e-9, (wl - p.margin) - 1e-9};
  }

  std::vector<double> n(M, 0.0);
  RacelineResult result;
  double J = objective(st, n, closed);
  result.objective_history.push_back(J);

  for (int outer = 0; outer < p.max_outer_iterations; ++outer) {
    const auto path = offset_path(st, n);
    const std::size_t first = closed ? 0 : 1;
    const std::size_t last = closed ? M : M - 1;
    std::vector<Eigen::Triplet<double>> jac;
    Eigen::VectorXd kappa(static_cast<Eigen::Index>(M));
    kappa.setZero();
    for (std::size_t i = first; i < last; ++i) {
      const std::size_t idx[3] = {(i + M - 1) % M, i, (i + 1) % M};
      const auto t = discrete_curvature(path[idx[0]], path[i], path[idx[2]]);
      kappa[static_cast<Eigen::Index>(i)] = t.kappa;
      for (int k = 0; k < 3; ++k) {
        const auto& nm = st[idx[k]].normal;
        jac.emplace_back(static_cast<int>(i), static_cast<int>(idx[k]), t.gx[k] * nm.x + t.gy[k] * nm.y);
      }
    }
    Eigen::SparseMatrix<double> Jm(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    Jm.setFromTriplets(jac.begin(), jac.end());
    Eigen::SparseMatrix<double> H = Jm.transpose() * Jm;
    const double reg = 1e-10 * std::max(1e-12, H.diagonal().mean());
    for (Eigen::Index i = 0; i < H.rows(); ++i) H.coeffRef(i, i) += reg;
    const Eigen::VectorXd g = Jm.transpose() * kappa;
    Eigen::VectorXd lo(static_cast<Eigen::Index>(M)), hi(static_cast<Eigen::Index>(M));
    for (std::size_t i = 0; i < M; ++i) {
      lo[static_cast<Eigen::Index>(i)] = st[i].lo - n[i];
      hi[static_cast<Eigen::Index>(i)] = st[i].hi - n[i];
    }
    const Eigen::VectorXd step = solve_box_qp(H, g, lo, hi);

    // Backtrack on the true objective so it never increases.
    double t = 1.0;
    bool accepted = false;
    std::vector<double> trial(M);
    for (int ls = 0; ls < 12; ++ls) {
      for (std::size_t i = 0; i < M; ++i)
        trial[i] = std::clamp(n[i] + t * step[static_cast<Eigen::Index>(i)], st[i].lo, st[i].hi);
      const double Jt = objective(st, trial, closed);
      if (Jt <= J) {
        accepted = true;
        const double decrease = J - Jt;
        n = trial;
        J = Jt;
        result.objective_history.push_back(J);
        if (decrease <= 1e-10 * std::max(J, 1e-300)) outer = p.max_outer_iterations;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }

  const auto path = offset_path(st, n);
  result.line = profiled_raceline(path, closed, p.limits);
  result.offsets = n;
  result.lap_time = lap_time(result.line);
  return result;
}

std::vector<double> velocity_profile(std::span<const double> ds, std::span<const double> radius, bool closed,
                                     const SpeedLimits& limits) {
  const std::size_t n = radius.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::min(limits.v_cap, std::sqrt(limits.a_lat_max * radius[i]));
  const double a = limits.a_lon_max;
  const std::size_t segs = closed ? n : n - 1;
  for (int sweep = 0; sweep < 50; ++sweep) {
    double change = 0.0;
    const std::size_t passes = closed ? 2 : 1;
    for (std::size_t k = 0; k < passes * segs; ++k) {
      const std::size_t i = k % segs;
      const std::size_t j = (i + 1) % n;
      const double lim = std::sqrt(v[i] * v[i] + 2.0 * a * ds[i]);
      if (v[j] > lim) {
        change = std::max(change, v[j] - lim);
        v[j] = lim;
      }
    }
    for (std::size_t k = 0; k < passes * segs; ++k) {
      const std::size_t i = segs - 1 - (k % segs);
      const std::size_t j = (i + 1) % n;
      const double lim = std::sqrt(v[j] * v[j] + 2.0 * a * ds[i]);
      if (v[i] > lim) {
        change = std::max(change, v[i] - lim);
        v[i] = lim;
      }
    }
    if (change == 0.0) break;
  }
  return v;
}

Raceline profiled_raceline(std::span<const Vec2> points, bool closed, const SpeedLimits& limits) {
  const auto sp = CubicSpline2D::fit(points, closed);
  const std::size_t n = points.size();
  std::vector<double> radius(n), heading(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = sp.knots()[i];
    radius[i] = 1.0 / std::max(std::abs(sp.curvature(s)), kCurvatureMin);
    heading[i] = sp.heading(s);
  }
  const auto ds = segment_lengths(sp);
  const auto v = velocity_profile(ds, radius, closed, limits);
  std::vector<RacelinePoint> pts(n);
  for (std::size_t i = 0; i < n; ++i)
    pts[i] = {points[i].x, points[i].y, v[i] * std::cos(heading[i]), v[i] * std::sin(heading[i])};
  return Raceline::from_points(std::move(pts), closed);
}

double lap_time(const Raceline& line) {
  const auto& pts = line.points();
  const auto ds = segment_lengths(line.spline());
  double t = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % pts.size()];
    const double va = std::hypot(a.vx, a.vy);
    const double vb = std::hypot(b.vx, b.vy);
    t += 2.0 * ds[i] / (va + vb);
  }
  return t;
}

Raceline centerline_raceline(const Track& track, int n, const SpeedLimits& limits) {
  const auto M = static_cast<std::size_t>(n);
  const double L = track.length();
  const double h = track.closed() ? L / static_cast<double>(M) : L / static_cast<double>(M - 1);
  std::vector<Vec2> pts(M);
  for (std::size_t i = 0; i < M; ++i) pts[i] = track.centerline().point(std::min(h * static_cast<double>(i), L));
  return profiled_raceline(pts, track.closed(), limits);
}

}  // namespace racing
