#pragma once

// The rolling configuration space, rolling curves along prescribed base
// curves (flat-target specialization and the general catalog-target form),
// the SE0(n,1) action on configurations, fiber transporters, and numerical
// no-slip / no-twist residuals.
//
// A configuration q = (x, xhat; A) stores the isometry A: T_xM -> T_xhat Mhat
// as a frame pair: A maps column i of frame_m to column i of frame_hat.

#include <lorroll/manifold.hpp>
#include <lorroll/minkowski.hpp>
#include <lorroll/transport.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace lorroll {

struct ConfigState {
  Point x;
  Frame frame_m;        // pseudo-orthonormal at x on M
  VectorXd xhat;        // point of the target (coordinates; ambient for quadrics)
  MatrixXd frame_hat;   // images A e_i, pseudo-orthonormal at xhat on the target
};

/// The flat target R^{n,1} implied by a base manifold of signature (n,1).
inline ManifoldSpec flat_target(const ManifoldSpec& m) {
  return ManifoldSpec::flat(m.signature().n, m.signature().nu);
}

inline void validate_config(const ManifoldSpec& m, const ConfigState& q,
                            std::optional<ManifoldSpec> target = std::nullopt,
                            double tol = 1e-8) {
  const ManifoldSpec hat = target ? *target : flat_target(m);
  if (!(hat.signature() == m.signature()))
    throw std::invalid_argument("config: base and target signatures differ");
  validate_frame(m, q.frame_m, tol);
  if ((q.frame_m.base.coords - q.x.coords).norm() > tol)
    throw std::invalid_argument("config: frame_m not based at x");
  validate_frame(hat, {.base = {q.xhat}, .vectors = q.frame_hat}, tol);
  // A lies in the identity component: both frames in the (+,+) class.
  const auto [ms, mt] = frame_component(m, q.frame_m);
  const auto [hs, ht] = frame_component(hat, {.base = {q.xhat}, .vectors = q.frame_hat});
  if (ms != hs || mt != ht)
    throw std::invalid_argument("config: frame orientation classes differ (A outside SO0)");
}

/// A applied to a tangent vector at x.
inline VectorXd config_apply(const ManifoldSpec& m, const ConfigState& q, const VectorXd& v) {
  return q.frame_hat * frame_coords(m, q.frame_m, v);
}

struct RollingCurve {
  ManifoldSpec base_manifold;
  std::optional<ManifoldSpec> target;  // empty = flat R^{n,1}
  Curve base;                          // the prescribed curve on M
  std::vector<double> grid;
  std::vector<ConfigState> states;
  std::optional<double> escaped_at;

  int samples() const { return int(grid.size()); }
  const ConfigState& front() const { return states.front(); }
  const ConfigState& back() const { return states.back(); }
};

/// mu(B, q) = (x, C xhat + y; C A): flat-target configurations only.
inline ConfigState se_act(const SEElement& b, const ConfigState& q) {
  if (b.y.size() != q.xhat.size())
    throw std::invalid_argument("se_act: dimension mismatch");
  ConfigState out = q;
  out.xhat = se_apply(b, q.xhat);
  out.frame_hat = b.c.matrix() * q.frame_hat;
  return out;
}

/// Rolling along gamma onto the flat target: xhat(t) = xhat0 + A0 dev(t),
/// frame_m(t) = transported frame, frame_hat constant.
inline RollingCurve roll_flat(const ManifoldSpec& m, const ConfigState& q0, const Curve& gamma) {
  validate_config(m, q0);
  Curve c = gamma;
  ensure_velocities(c);
  if ((c.points.front() - q0.x.coords).norm() > 1e-9 * std::max(1.0, q0.x.coords.norm()))
    throw std::invalid_argument("roll_flat: curve does not start at the configuration base point");

  const auto frames = transport_frame_along(m, c, q0.frame_m);
  const int md = m.dim();
  // Development integrand in the rolling frame.
  std::vector<VectorXd> w(c.samples());
  for (int k = 0; k < c.samples(); ++k)
    w[k] = frame_coords(m, {.base = {c.points[k]}, .vectors = frames[k]}, c.velocities[k]);

  RollingCurve out;
  out.base_manifold = m;
  out.base = c;
  out.grid = c.grid;
  out.states.reserve(c.samples());
  VectorXd dev = VectorXd::Zero(md);
  for (int k = 0; k < c.samples(); ++k) {
    if (k > 0) dev += 0.5 * (c.grid[k] - c.grid[k - 1]) * (w[k - 1] + w[k]);
    ConfigState s;
    s.x = {c.points[k]};
    s.frame_m = {.base = {c.points[k]}, .vectors = frames[k]};
    s.xhat = q0.xhat + q0.frame_hat * dev;
    s.frame_hat = q0.frame_hat;
    out.states.push_back(std::move(s));
  }
  return out;
}

/// General rolling: the target curve is the antidevelopment on the target of
/// A0 applied to the development of gamma; both frames co-transport. Escape
/// on an incomplete target surfaces as a truncated curve with `escaped_at`.
inline RollingCurve roll_general(const ManifoldSpec& m, const ManifoldSpec& target,
                                 const ConfigState& q0, const Curve& gamma) {
  validate_config(m, q0, target);
  if (target.kind() == ManifoldKind::Flat) {
    RollingCurve out = roll_flat(m, q0, gamma);
    out.target = target;
    return out;
  }
  Curve c = gamma;
  ensure_velocities(c);
  if ((c.points.front() - q0.x.coords).norm() > 1e-9 * std::max(1.0, q0.x.coords.norm()))
    throw std::invalid_argument("roll_general: curve does not start at the configuration base point");

  const DevelopmentCurve dev = develop(m, c, q0.frame_m);
  // A0 re-labels the development coordinates into the target frame.
  const auto anti = antidevelop(target, {q0.xhat}, {.base = {q0.xhat}, .vectors = q0.frame_hat}, dev);
  const auto frames_m = transport_frame_along(m, c, q0.frame_m);

  RollingCurve out;
  out.base_manifold = m;
  out.target = target;
  out.base = c;
  out.escaped_at = anti.escaped_at;
  const int n = anti.curve.samples();
  out.grid.assign(c.grid.begin(), c.grid.begin() + std::min<std::size_t>(n, c.grid.size()));
  for (int k = 0; k < int(out.grid.size()); ++k) {
    ConfigState s;
    s.x = {c.points[k]};
    s.frame_m = {.base = {c.points[k]}, .vectors = frames_m[k]};
    s.xhat = anti.curve.points[k];
    s.frame_hat = anti.frames[k];
    out.states.push_back(std::move(s));
  }
  return out;
}

/// The unique B = (xhat' - A' A^-1 xhat, A' A^-1) with se_act(B, q) = q'.
/// Requires both configurations over the same base point (same fiber).
inline SEElement fiber_transporter(const ManifoldSpec& m, const ConfigState& q,
                                   const ConfigState& qbar, double tol = 1e-10) {
  if ((q.x.coords - qbar.x.coords).norm() > 1e-9 * std::max(1.0, q.x.coords.norm()))
    throw std::invalid_argument("fiber_transporter: different base points");
  const Signature sig = m.signature();
  const int md = sig.dim();
  // Coordinates of q.frame_m in qbar.frame_m (both pseudo-orthonormal at x).
  MatrixXd cob(md, md);
  for (int i = 0; i < md; ++i)
    cob.col(i) = frame_coords(m, qbar.frame_m, q.frame_m.vectors.col(i));
  // C Fhat = Fhatbar cob, and Fhat^-1 = J Fhat^T J for the flat target.
  const MatrixXd j = sig.j_matrix();
  MatrixXd c = qbar.frame_hat * cob * (j * q.frame_hat.transpose() * j);
  SEElement b{qbar.xhat - c * q.xhat, LorentzMatrix::from(std::move(c), sig, 1e-7)};

  // Compare the moved configuration with qbar as isometries (their frame
  // pairs may differ even when the maps agree).
  const ConfigState check = se_act(b, q);
  double resid = (check.xhat - qbar.xhat).norm();
  for (int i = 0; i < md; ++i)
    resid = std::max(resid, (config_apply(m, check, qbar.frame_m.vectors.col(i)) -
                             qbar.frame_hat.col(i))
                                .norm());
  if (resid > tol * std::max(1.0, qbar.xhat.norm()))
    throw std::runtime_error("fiber_transporter: residual " + std::to_string(resid) +
                             " exceeds tolerance");
  return b;
}

/// No-slip and no-twist residuals of a rolling curve: slip is the mismatch
/// between the target velocity and A(t) applied to the base velocity; twist
/// differentiates the images of the parallel frame (covariantly on a curved
/// target). Both are reported as sup norms of frame coordinates.
struct ConstraintResiduals {
  double slip = 0.0;
  double twist = 0.0;
};

namespace detail {

// Five-point interior / one-sided boundary differentiation of a sampled path.
inline std::vector<VectorXd> sampled_derivative(const std::vector<double>& t,
                                                const std::vector<VectorXd>& p) {
  const int n = int(t.size());
  std::vector<VectorXd> d(n);
  const double h = t[1] - t[0];  // uniform grids in this codebase
  for (int k = 0; k < n; ++k) {
    if (k >= 2 && k + 2 < n) {
      d[k] = (-p[k + 2] + 8 * p[k + 1] - 8 * p[k - 1] + p[k - 2]) / (12 * h);
    } else if (k == 0) {
      d[k] = (-3 * p[0] + 4 * p[1] - p[2]) / (2 * h);
    } else if (k == n - 1) {
      d[k] = (3 * p[n - 1] - 4 * p[n - 2] + p[n - 3]) / (2 * h);
    } else {
      d[k] = (p[k + 1] - p[k - 1]) / (2 * h);
    }
  }
  return d;
}

}  // namespace detail

inline ConstraintResiduals constraint_residuals(const RollingCurve& rc) {
  if (rc.samples() < 5) throw std::invalid_argument("constraint_residuals: too few samples");
  const ManifoldSpec& m = rc.base_manifold;
  const ManifoldSpec hat = rc.target ? *rc.target : flat_target(m);
  ConstraintResiduals out;

  std::vector<VectorXd> xhat(rc.samples());
  for (int k = 0; k < rc.samples(); ++k) xhat[k] = rc.states[k].xhat;
  const auto dxhat = detail::sampled_derivative(rc.grid, xhat);

  // Images of the parallel frame under A(t).
  const int md = m.dim();
  std::vector<std::vector<VectorXd>> images(md, std::vector<VectorXd>(rc.samples()));
  for (int k = 0; k < rc.samples(); ++k)
    for (int i = 0; i < md; ++i) images[i][k] = rc.states[k].frame_hat.col(i);

  for (int k = 0; k < rc.samples(); ++k) {
    const ConfigState& s = rc.states[k];
    const Frame fhat{{s.xhat}, s.frame_hat};
    VectorXd slip_vec = dxhat[k] - config_apply(m, s, rc.base.velocities[k]);
    if (hat.embedded()) slip_vec = tangent_project(hat, {s.xhat}, slip_vec).vec;
    out.slip = std::max(out.slip, frame_coords(hat, fhat, slip_vec).norm());
  }
  for (int i = 0; i < md; ++i) {
    const auto dimg = detail::sampled_derivative(rc.grid, images[i]);
    for (int k = 0; k < rc.samples(); ++k) {
      const ConfigState& s = rc.states[k];
      VectorXd tw = dimg[k];
      if (hat.embedded()) tw = tangent_project(hat, {s.xhat}, tw).vec;  // covariant part
      out.twist = std::max(out.twist, frame_coords(hat, {{s.xhat}, s.frame_hat}, tw).norm());
    }
  }
  return out;
}

}  // namespace lorroll
