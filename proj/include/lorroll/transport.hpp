#pragma once

// Geodesic integration, parallel transport along sampled piecewise-C^1
// curves, the development map and its inverse, and a heuristic geodesic
// completeness probe. Chart kinds integrate with Christoffel symbols; the
// embedded hyperquadrics use the ambient acceleration -(<xdot,xdot>/<p,p>) p
// with per-step constraint renormalization. Fixed-step classical RK4
// throughout; adaptivity only where blow-up detection is the point.

#include <lorroll/manifold.hpp>
#include <lorroll/minkowski.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lorroll {

/// Piecewise-C^1 curve sampled on an increasing parameter grid. Velocities
/// are optional; finite differences fill them in when absent.
struct Curve {
  ManifoldSpec manifold;
  std::vector<double> grid;
  std::vector<VectorXd> points;
  std::vector<VectorXd> velocities;

  int samples() const { return int(grid.size()); }
  double t0() const { return grid.front(); }
  double t1() const { return grid.back(); }
};

struct BlowupError : std::runtime_error {
  BlowupError(const std::string& msg, double when) : std::runtime_error(msg), t(when) {}
  double t;
};

namespace detail {

// Derivative at `at` of the quadratic through (t0,p0), (t1,p1), (t2,p2).
inline VectorXd quadratic_derivative(double t0, double t1, double t2, const VectorXd& p0,
                                     const VectorXd& p1, const VectorXd& p2, double at) {
  const double d0 = (2 * at - t1 - t2) / ((t0 - t1) * (t0 - t2));
  const double d1 = (2 * at - t0 - t2) / ((t1 - t0) * (t1 - t2));
  const double d2 = (2 * at - t0 - t1) / ((t2 - t0) * (t2 - t1));
  return d0 * p0 + d1 * p1 + d2 * p2;
}

}  // namespace detail

inline void ensure_velocities(Curve& c) {
  if (!c.velocities.empty()) return;
  const int n = c.samples();
  if (n < 3) throw std::invalid_argument("curve: need at least 3 samples to differentiate");
  c.velocities.resize(n);
  for (int k = 0; k < n; ++k) {
    const int a = std::clamp(k - 1, 0, n - 3);
    c.velocities[k] = detail::quadratic_derivative(c.grid[a], c.grid[a + 1], c.grid[a + 2],
                                                   c.points[a], c.points[a + 1], c.points[a + 2],
                                                   c.grid[k]);
  }
}

inline void validate_curve(const Curve& c, double max_gap = 0.5, double point_tol = 1e-6) {
  if (c.samples() < 2) throw std::invalid_argument("curve: need at least 2 samples");
  if (c.points.size() != c.grid.size())
    throw std::invalid_argument("curve: grid/points size mismatch");
  if (!c.velocities.empty() && c.velocities.size() != c.grid.size())
    throw std::invalid_argument("curve: grid/velocities size mismatch");
  for (int k = 0; k + 1 < c.samples(); ++k) {
    if (!(c.grid[k + 1] > c.grid[k])) throw std::invalid_argument("curve: grid not increasing");
    if ((c.points[k + 1] - c.points[k]).norm() > max_gap)
      throw std::invalid_argument("curve: consecutive samples exceed the step bound");
  }
  for (const auto& p : c.points) validate_point(c.manifold, {p}, point_tol);
}

namespace detail {

// Position/velocity at a stage time inside [t_k, t_{k+1}] via cubic Hermite.
struct StageEval {
  VectorXd p;
  VectorXd v;
};

inline StageEval hermite_stage(const Curve& c, int k, double tau) {
  const double h = c.grid[k + 1] - c.grid[k];
  const double s = (tau - c.grid[k]) / h;
  const VectorXd &p0 = c.points[k], &p1 = c.points[k + 1];
  const VectorXd v0 = c.velocities[k] * h, v1 = c.velocities[k + 1] * h;
  const double s2 = s * s, s3 = s2 * s;
  StageEval out;
  out.p = (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * v0 + (-2 * s3 + 3 * s2) * p1 +
          (s3 - s2) * v1;
  out.v = ((6 * s2 - 6 * s) * p0 + (3 * s2 - 4 * s + 1) * v0 + (-6 * s2 + 6 * s) * p1 +
           (3 * s2 - 2 * s) * v1) /
          h;
  return out;
}

// Renormalize an embedded state: scale the point back onto the quadric along
// its position ray and project the attached vectors to the tangent space.
inline void renormalize_embedded(const ManifoldSpec& m, VectorXd& p, MatrixXd* vecs,
                                 VectorXd* vel, double abort_tol = 1e-3) {
  const Signature amb = m.ambient_signature();
  const double target = m.quadric_sign() * m.radius() * m.radius();
  const double pp = inner(p, p, amb);
  if (!std::isfinite(pp) || pp * target <= 0.0)
    throw BlowupError("embedded state left the quadric neighbourhood", 0.0);
  const double drift = std::abs(pp - target) / std::max(1.0, std::abs(target));
  if (drift > abort_tol)
    throw BlowupError("off-manifold drift exceeded the abort threshold", 0.0);
  p *= std::sqrt(target / pp);
  const VectorXd jp = amb.j_matrix() * p;
  const double denom = inner(p, p, amb);
  if (vel) *vel -= (jp.dot(*vel) / denom) * p;
  if (vecs)
    for (int i = 0; i < vecs->cols(); ++i)
      vecs->col(i) -= (jp.dot(vecs->col(i)) / denom) * p;
}

// Geodesic acceleration.
inline VectorXd geo_accel(const ManifoldSpec& m, const VectorXd& p, const VectorXd& w) {
  if (m.embedded()) {
    const Signature amb = m.ambient_signature();
    return -(inner(w, w, amb) / inner(p, p, amb)) * p;
  }
  if (m.kind() == ManifoldKind::Flat) return VectorXd::Zero(p.size());
  const auto gamma = christoffel_at(m, {p});
  VectorXd a(p.size());
  for (int k = 0; k < p.size(); ++k) a(k) = -w.dot(gamma[k] * w);
  return a;
}

// Transport coefficient matrix: Vdot = A(x, xdot) V.
inline MatrixXd transport_matrix(const ManifoldSpec& m, const VectorXd& p, const VectorXd& v) {
  const int cd = m.coord_dim();
  if (m.embedded()) {
    const Signature amb = m.ambient_signature();
    return -(p * (amb.j_matrix() * v).transpose()) / inner(p, p, amb);
  }
  if (m.kind() == ManifoldKind::Flat) return MatrixXd::Zero(cd, cd);
  const auto gamma = christoffel_at(m, {p});
  MatrixXd a = MatrixXd::Zero(cd, cd);
  for (int k = 0; k < cd; ++k)
    for (int j = 0; j < cd; ++j) a(k, j) = -v.dot(gamma[k].col(j));
  return a;
}

struct GeodesicState {
  VectorXd p, w;
};

inline GeodesicState geo_rk4_step(const ManifoldSpec& m, const GeodesicState& y, double h) {
  auto f = [&m](const GeodesicState& s) {
    return GeodesicState{s.w, geo_accel(m, s.p, s.w)};
  };
  const GeodesicState k1 = f(y);
  const GeodesicState k2 = f({y.p + 0.5 * h * k1.p, y.w + 0.5 * h * k1.w});
  const GeodesicState k3 = f({y.p + 0.5 * h * k2.p, y.w + 0.5 * h * k2.w});
  const GeodesicState k4 = f({y.p + h * k3.p, y.w + h * k3.w});
  return {y.p + h / 6.0 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p),
          y.w + h / 6.0 * (k1.w + 2 * k2.w + 2 * k3.w + k4.w)};
}

}  // namespace detail

/// Integrates the geodesic from x with initial velocity v over [0, T] at a
/// fixed step (classical 4th-order). Throws BlowupError when the state
/// explodes or drifts off the manifold beyond recovery.
inline Curve geodesic(const ManifoldSpec& m, const Point& x, const Tangent& v, double T,
                      double step) {
  validate_point(m, x);
  if (step <= 0 || T <= 0) throw std::invalid_argument("geodesic: T > 0 and step > 0 required");
  if (v.vec.size() != m.coord_dim()) throw std::invalid_argument("geodesic: dimension mismatch");
  if (m.embedded()) {
    const Signature amb = m.ambient_signature();
    if (std::abs(inner(v.vec, x.coords, amb)) >
        1e-8 * std::max(1.0, v.vec.norm() * x.coords.norm()))
      throw std::invalid_argument("geodesic: v not tangent at x");
  }
  const int n = std::max(1, int(std::ceil(T / step)));
  const double h = T / n;
  Curve out;
  out.manifold = m;
  out.grid.reserve(n + 1);
  out.points.reserve(n + 1);
  out.velocities.reserve(n + 1);
  detail::GeodesicState y{x.coords, v.vec};
  out.grid.push_back(0.0);
  out.points.push_back(y.p);
  out.velocities.push_back(y.w);
  for (int k = 0; k < n; ++k) {
    y = detail::geo_rk4_step(m, y, h);
    const double t = (k + 1) * h;
    if (!y.p.allFinite() || !y.w.allFinite() || y.p.norm() > 1e12 || y.w.norm() > 1e12)
      throw BlowupError("geodesic blow-up at t = " + std::to_string(t), t);
    if (m.embedded()) {
      try {
        detail::renormalize_embedded(m, y.p, nullptr, &y.w);
      } catch (BlowupError& e) {
        throw BlowupError(std::string(e.what()) + " at t = " + std::to_string(t), t);
      }
    }
    if (m.kind() == ManifoldKind::CliftonPohl && y.p.squaredNorm() < 1e-20)
      throw BlowupError("geodesic reached the excluded origin at t = " + std::to_string(t), t);
    out.grid.push_back(t);
    out.points.push_back(y.p);
    out.velocities.push_back(y.w);
  }
  return out;
}

/// Transported frame at every grid node of the curve (RK4 on the linear
/// transport equation with Hermite stage interpolation of the curve).
inline std::vector<MatrixXd> transport_frame_along(const ManifoldSpec& m, const Curve& curve,
                                                   const Frame& f0) {
  Curve c = curve;
  ensure_velocities(c);
  validate_curve(c);
  validate_frame(m, {.base = {c.points.front()}, .vectors = f0.vectors}, 1e-6);
  if (m.embedded()) {
    // Velocity resolution check: node velocities must be near-tangent.
    const Signature amb = m.ambient_signature();
    for (int k = 0; k < c.samples(); ++k) {
      const double resid = std::abs(inner(c.velocities[k], c.points[k], amb));
      if (resid > 1e-4 * std::max(1.0, c.velocities[k].norm() * c.points[k].norm()))
        throw std::invalid_argument("parallel transport: curve under-resolved (velocity normal residual)");
    }
  }

  std::vector<MatrixXd> frames;
  frames.reserve(c.samples());
  MatrixXd F = f0.vectors;
  frames.push_back(F);
  for (int k = 0; k + 1 < c.samples(); ++k) {
    const double h = c.grid[k + 1] - c.grid[k];
    auto coeff = [&](double tau) {
      detail::StageEval s = (tau <= c.grid[k])      ? detail::StageEval{c.points[k], c.velocities[k]}
                            : (tau >= c.grid[k + 1]) ? detail::StageEval{c.points[k + 1], c.velocities[k + 1]}
                                                     : detail::hermite_stage(c, k, tau);
      return detail::transport_matrix(m, s.p, s.v);
    };
    const MatrixXd a1 = coeff(c.grid[k]);
    const MatrixXd a2 = coeff(c.grid[k] + 0.5 * h);
    const MatrixXd a3 = a2;
    const MatrixXd a4 = coeff(c.grid[k + 1]);
    const MatrixXd k1 = a1 * F;
    const MatrixXd k2 = a2 * (F + 0.5 * h * k1);
    const MatrixXd k3 = a3 * (F + 0.5 * h * k2);
    const MatrixXd k4 = a4 * (F + h * k3);
    F += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (m.embedded()) {
      VectorXd p = c.points[k + 1];
      detail::renormalize_embedded(m, p, &F, nullptr);
    }
    frames.push_back(F);
  }
  return frames;
}

/// Transport operator between pseudo-orthonormal frames at the endpoints
/// (defaults: reference frames; loops reuse the start frame at the end).
struct TransportResult {
  Frame start_frame;
  Frame end_frame;
  MatrixXd op;  // m x m, column i = end-frame coords of transported start vector i
};

inline std::pair<Tangent, TransportResult> parallel_transport(
    const ManifoldSpec& m, const Curve& curve, const Tangent& v,
    std::optional<Frame> start_frame = std::nullopt, std::optional<Frame> end_frame = std::nullopt) {
  Curve c = curve;
  ensure_velocities(c);
  const Point x0{c.points.front()}, x1{c.points.back()};
  Frame f0 = start_frame ? *start_frame : reference_frame(m, x0);
  const auto frames = transport_frame_along(m, c, f0);
  Frame f1;
  if (end_frame) {
    f1 = *end_frame;
  } else if ((x1.coords - x0.coords).norm() <= 1e-9 * std::max(1.0, x0.coords.norm())) {
    f1 = f0;  // closed loop
  } else {
    f1 = reference_frame(m, x1);
  }
  validate_frame(m, f1, 1e-6);

  const int md = m.dim();
  MatrixXd op(md, md);
  for (int i = 0; i < md; ++i) op.col(i) = frame_coords(m, f1, frames.back().col(i));
  const VectorXd c0 = frame_coords(m, f0, v.vec);
  Tangent out{x1, frames.back() * c0};
  return {out, TransportResult{f0, f1, op}};
}

/// Development: cumulative trapezoid of the back-transported velocity,
/// expressed in the coordinates of the (fixed) initial frame. Starts at 0;
/// velocities carry the exact integrand samples.
struct DevelopmentCurve {
  std::vector<double> grid;
  std::vector<VectorXd> values;
  std::vector<VectorXd> velocities;

  int samples() const { return int(grid.size()); }
};

inline DevelopmentCurve develop(const ManifoldSpec& m, const Curve& curve,
                                std::optional<Frame> frame = std::nullopt) {
  Curve c = curve;
  ensure_velocities(c);
  Frame f0 = frame ? *frame : reference_frame(m, {c.points.front()});
  const auto frames = transport_frame_along(m, c, f0);
  DevelopmentCurve dev;
  dev.grid = c.grid;
  dev.values.resize(c.samples());
  dev.velocities.resize(c.samples());
  const int md = m.dim();
  for (int k = 0; k < c.samples(); ++k)
    dev.velocities[k] = frame_coords(m, {.base = {c.points[k]}, .vectors = frames[k]},
                                     c.velocities[k]);
  dev.values[0] = VectorXd::Zero(md);
  for (int k = 0; k + 1 < c.samples(); ++k) {
    const double h = c.grid[k + 1] - c.grid[k];
    dev.values[k + 1] = dev.values[k] + 0.5 * h * (dev.velocities[k] + dev.velocities[k + 1]);
  }
  return dev;
}

/// Inverse development: solves xdot = F(t) cdot(t), Fdot = transport, from
/// x0 with the given initial frame. Returns the manifold curve, the
/// co-integrated frames, and — when the solution escapes (incomplete
/// manifold) — the escape parameter as an explicit partial-result value.
struct AntidevelopResult {
  Curve curve;
  std::vector<MatrixXd> frames;
  std::optional<double> escaped_at;
};

inline AntidevelopResult antidevelop(const ManifoldSpec& m, const Point& x0, const Frame& frame,
                                     const DevelopmentCurve& dev) {
  validate_point(m, x0);
  validate_frame(m, {.base = x0, .vectors = frame.vectors}, 1e-6);
  if (dev.samples() < 2) throw std::invalid_argument("antidevelop: need at least 2 samples");
  if (dev.values.front().norm() > 1e-12)
    throw std::invalid_argument("antidevelop: development must start at 0");
  DevelopmentCurve d = dev;
  if (d.velocities.empty()) {
    d.velocities.resize(d.samples());
    const int n = d.samples();
    for (int k = 0; k < n; ++k) {
      const int a = std::clamp(k - 1, 0, n - 3);
      d.velocities[k] = detail::quadratic_derivative(d.grid[a], d.grid[a + 1], d.grid[a + 2],
                                                     d.values[a], d.values[a + 1], d.values[a + 2],
                                                     d.grid[k]);
    }
  }

  AntidevelopResult out;
  out.curve.manifold = m;
  VectorXd x = x0.coords;
  MatrixXd F = frame.vectors;
  out.curve.grid.push_back(d.grid.front());
  out.curve.points.push_back(x);
  out.curve.velocities.push_back(F * d.velocities.front());
  out.frames.push_back(F);

  auto cdot_at = [&d](int k, double tau) -> VectorXd {
    const double h = d.grid[k + 1] - d.grid[k];
    const double s = (tau - d.grid[k]) / h;
    return (1.0 - s) * d.velocities[k] + s * d.velocities[k + 1];
  };

  for (int k = 0; k + 1 < d.samples(); ++k) {
    const double interval = d.grid[k + 1] - d.grid[k];
    double t = d.grid[k];
    double h = interval;
    // Adaptive sub-stepping inside the interval so that blow-ups surface as
    // step collapse rather than garbage states.
    while (t < d.grid[k + 1] - 1e-15 * std::max(1.0, std::abs(d.grid[k + 1]))) {
      h = std::min(h, d.grid[k + 1] - t);
      auto f = [&](double tau, const VectorXd& px, const MatrixXd& pf)
          -> std::pair<VectorXd, MatrixXd> {
        const VectorXd xdot = pf * cdot_at(k, tau);
        return {xdot, detail::transport_matrix(m, px, xdot) * pf};
      };
      const auto [k1x, k1f] = f(t, x, F);
      const auto [k2x, k2f] = f(t + 0.5 * h, x + 0.5 * h * k1x, F + 0.5 * h * k1f);
      const auto [k3x, k3f] = f(t + 0.5 * h, x + 0.5 * h * k2x, F + 0.5 * h * k2f);
      const auto [k4x, k4f] = f(t + h, x + h * k3x, F + h * k3f);
      VectorXd xn = x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
      MatrixXd Fn = F + h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f);

      bool ok = xn.allFinite() && Fn.allFinite() && xn.norm() < 1e12 && Fn.norm() < 1e12;
      if (ok && m.kind() == ManifoldKind::CliftonPohl && xn.squaredNorm() < 1e-18) ok = false;
      if (ok && m.embedded()) {
        const double resid = std::abs(constraint_residual(m, xn));
        if (resid > 1e-3 * std::max(1.0, xn.squaredNorm())) ok = false;
      }
      if (!ok) {
        h *= 0.5;
        if (h < 1e-12 * std::max(1.0, interval)) {
          out.escaped_at = t;
          out.curve.grid.push_back(t);
          out.curve.points.push_back(x);
          out.curve.velocities.push_back(F * cdot_at(k, t));
          out.frames.push_back(F);
          return out;
        }
        continue;
      }
      x = std::move(xn);
      F = std::move(Fn);
      t += h;
      if (m.embedded()) detail::renormalize_embedded(m, x, &F, nullptr);
    }
    out.curve.grid.push_back(d.grid[k + 1]);
    out.curve.points.push_back(x);
    out.curve.velocities.push_back(F * d.velocities[k + 1]);
    out.frames.push_back(F);
  }
  return out;
}

/// Heuristic completeness probe: adaptive step-halving RK4 on the geodesic
/// equation. "reached" does not prove completeness; a blow-up report carries
/// the collapse parameter t*.
struct ProbeReport {
  bool reached = false;
  double t_star = 0.0;
  double tmax = 0.0;
  std::string note;
};

inline ProbeReport completeness_probe(const ManifoldSpec& m, const Point& x, const Tangent& v,
                                      double tmax) {
  validate_point(m, x);
  ProbeReport rep;
  rep.tmax = tmax;
  detail::GeodesicState y{x.coords, v.vec};
  double t = 0.0;
  double h = std::min(1e-2, tmax / 100.0);
  const double rel_tol = 1e-10;
  while (t < tmax) {
    h = std::min(h, tmax - t);
    bool bad = false;
    detail::GeodesicState full{y.p, y.w}, half{y.p, y.w};
    try {
      full = detail::geo_rk4_step(m, y, h);
      half = detail::geo_rk4_step(m, detail::geo_rk4_step(m, y, h / 2), h / 2);
    } catch (const BlowupError&) {
      bad = true;
    }
    const double scale = std::max({1.0, y.p.norm(), y.w.norm()});
    if (!bad) {
      bad = !full.p.allFinite() || !half.p.allFinite() || !full.w.allFinite() ||
            !half.w.allFinite();
    }
    double err = bad ? 1.0 : std::max((full.p - half.p).norm(), (full.w - half.w).norm()) / scale;
    if (m.kind() == ManifoldKind::CliftonPohl && !bad && half.p.squaredNorm() < 1e-18) bad = true;
    if (!bad && err <= rel_tol) {
      y = half;
      t += h;
      if (m.embedded()) {
        try {
          detail::renormalize_embedded(m, y.p, nullptr, &y.w);
        } catch (const BlowupError&) {
          rep.t_star = t;
          rep.note = "off-manifold drift; state norm " + std::to_string(y.p.norm());
          return rep;
        }
      }
      if (y.p.norm() > 1e12 || y.w.norm() > 1e12) {
        rep.t_star = t;
        rep.note = "state norm exceeded 1e12";
        return rep;
      }
      h *= 1.5;
      continue;
    }
    h *= 0.5;
    if (h < 1e-12) {
      rep.t_star = t;
      rep.note = "step collapsed below 1e-12; velocity norm " + std::to_string(y.w.norm());
      return rep;
    }
  }
  rep.reached = true;
  rep.t_star = tmax;
  rep.note = "no blow-up detected (heuristic; not a completeness proof)";
  return rep;
}

}  // namespace lorroll
