#pragma once

// Catalog of pseudo-Riemannian manifolds: flat space, the constant-curvature
// hyperquadrics S^{n,nu}(r) (<p,p> = r^2 in R^{n+1,nu}) and H^{n,nu}(r)
// (<p,p> = -r^2 in R^{n,nu+1}) in global embedded representation, the
// Clifton-Pohl chart R^2 \ {0}, and user-defined chart metrics parsed from
// expressions. Provides metric, Christoffel, curvature, tangent projection,
// and pseudo-orthonormal frames.

#include <lorroll/metric_expr.hpp>
#include <lorroll/minkowski.hpp>

#include <json.hpp>

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lorroll {

enum class ManifoldKind { Flat, PseudoSphere, PseudoHyperbolic, CliftonPohl, CustomChart };

inline const char* to_string(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::Flat: return "flat";
    case ManifoldKind::PseudoSphere: return "sphere";
    case ManifoldKind::PseudoHyperbolic: return "hyperbolic";
    case ManifoldKind::CliftonPohl: return "clifton-pohl";
    default: return "custom";
  }
}

struct Point {
  VectorXd coords;
};

struct Tangent {
  Point base;
  VectorXd vec;
};

/// Ordered pseudo-orthonormal frame: columns are tangent vectors, Gram matrix
/// w.r.t. the manifold metric equals diag(+1 x n, -1 x nu), orientation +1.
struct Frame {
  Point base;
  MatrixXd vectors;  // coord_dim x m
};

class ManifoldSpec {
 public:
  static ManifoldSpec flat(int n, int nu) {
    check_signature({n, nu});
    ManifoldSpec m;
    m.kind_ = ManifoldKind::Flat;
    m.sig_ = {n, nu};
    return m;
  }

  static ManifoldSpec pseudo_sphere(int n, int nu, double r) {
    check_signature({n, nu});
    if (r <= 0) throw std::invalid_argument("pseudo_sphere: r > 0 required");
    ManifoldSpec m;
    m.kind_ = ManifoldKind::PseudoSphere;
    m.sig_ = {n, nu};
    m.radius_ = r;
    return m;
  }

  static ManifoldSpec pseudo_hyperbolic(int n, int nu, double r) {
    check_signature({n, nu});
    if (r <= 0) throw std::invalid_argument("pseudo_hyperbolic: r > 0 required");
    ManifoldSpec m;
    m.kind_ = ManifoldKind::PseudoHyperbolic;
    m.sig_ = {n, nu};
    m.radius_ = r;
    return m;
  }

  static ManifoldSpec clifton_pohl() {
    ManifoldSpec m;
    m.kind_ = ManifoldKind::CliftonPohl;
    m.sig_ = {1, 1};
    return m;
  }

  /// Chart metric from a JSON object mapping "gij" keys to expression
  /// strings; unspecified entries are 0, symmetry by mirroring. Explicit
  /// duplicates (both gij and gji) are kept and checked for agreement at
  /// every evaluation.
  static ManifoldSpec custom_chart(int dim, int nu, const nlohmann::json& metric) {
    check_signature({dim - nu, nu});
    if (dim < 1 || dim > 9) throw std::invalid_argument("custom_chart: dimension must be in 1..9");
    if (!metric.is_object()) throw std::invalid_argument("custom_chart: metric must be a JSON object");
    ManifoldSpec m;
    m.kind_ = ManifoldKind::CustomChart;
    m.sig_ = {dim - nu, nu};
    auto data = std::make_shared<CustomData>();
    data->entries.resize(dim, std::vector<std::optional<Expression>>(dim));
    for (const auto& [key, val] : metric.items()) {
      if (key.size() != 3 || key[0] != 'g' || key[1] < '1' || key[1] > '9' || key[2] < '1' ||
          key[2] > '9')
        throw std::invalid_argument("custom_chart: bad metric key '" + key + "' (expected gij)");
      const int i = key[1] - '1', j = key[2] - '1';
      if (i >= dim || j >= dim)
        throw std::invalid_argument("custom_chart: metric key '" + key + "' outside dimension");
      if (!val.is_string()) throw std::invalid_argument("custom_chart: metric entry must be a string");
      data->entries[i][j] = Expression::parse(val.get<std::string>());
    }
    data->build_derivatives(dim);
    m.custom_ = std::move(data);
    return m;
  }

  ManifoldKind kind() const { return kind_; }
  /// Intrinsic signature (n spacelike, nu timelike directions); m = dim().
  Signature signature() const { return sig_; }
  int dim() const { return sig_.dim(); }
  double radius() const { return radius_; }

  bool embedded() const {
    return kind_ == ManifoldKind::PseudoSphere || kind_ == ManifoldKind::PseudoHyperbolic;
  }
  /// +1 for <p,p> = r^2, -1 for <p,p> = -r^2.
  double quadric_sign() const { return kind_ == ManifoldKind::PseudoSphere ? 1.0 : -1.0; }
  Signature ambient_signature() const {
    if (kind_ == ManifoldKind::PseudoSphere) return {sig_.n + 1, sig_.nu};
    if (kind_ == ManifoldKind::PseudoHyperbolic) return {sig_.n, sig_.nu + 1};
    return sig_;
  }
  /// Dimension of the coordinate representation of points/tangents.
  int coord_dim() const { return embedded() ? dim() + 1 : dim(); }

  /// Constant sectional curvature for the registered closed-form kinds.
  std::optional<double> constant_curvature() const {
    switch (kind_) {
      case ManifoldKind::Flat: return 0.0;
      case ManifoldKind::PseudoSphere: return 1.0 / (radius_ * radius_);
      case ManifoldKind::PseudoHyperbolic: return -1.0 / (radius_ * radius_);
      default: return std::nullopt;
    }
  }

  struct CustomData {
    std::vector<std::vector<std::optional<Expression>>> entries;
    std::vector<std::vector<Expression>> g;            // mirrored, zero-filled
    std::vector<std::vector<std::vector<Expression>>> dg;   // dg[k][i][j] = d_k g_ij
    std::vector<std::vector<std::vector<std::vector<Expression>>>> ddg;  // ddg[l][k][i][j]

    void build_derivatives(int dim) {
      g.assign(dim, std::vector<Expression>(dim, Expression::zero()));
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          if (entries[i][j]) g[i][j] = *entries[i][j];
          else if (entries[j][i]) g[i][j] = *entries[j][i];
        }
      dg.assign(dim, std::vector<std::vector<Expression>>(dim, std::vector<Expression>(dim, Expression::zero())));
      ddg.assign(dim, std::vector<std::vector<std::vector<Expression>>>(
                          dim, std::vector<std::vector<Expression>>(dim, std::vector<Expression>(dim, Expression::zero()))));
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          for (int k = 0; k < dim; ++k) {
            dg[k][i][j] = g[i][j].derivative(k);
            for (int l = 0; l < dim; ++l) ddg[l][k][i][j] = dg[k][i][j].derivative(l);
          }
        }
    }
  };
  const CustomData* custom() const { return custom_.get(); }

 private:
  ManifoldKind kind_ = ManifoldKind::Flat;
  Signature sig_{1, 0};
  double radius_ = 1.0;
  std::shared_ptr<const CustomData> custom_;
};

/// Residual of the defining constraint at p (0 for chart kinds).
inline double constraint_residual(const ManifoldSpec& m, const VectorXd& p) {
  if (!m.embedded()) return 0.0;
  const double target = m.quadric_sign() * m.radius() * m.radius();
  return inner(p, p, m.ambient_signature()) - target;
}

inline void validate_point(const ManifoldSpec& m, const Point& x, double tol = 1e-9) {
  if (x.coords.size() != m.coord_dim())
    throw std::invalid_argument("point: wrong coordinate dimension");
  if (m.embedded()) {
    const double resid = std::abs(constraint_residual(m, x.coords));
    if (resid > tol * std::max(1.0, x.coords.squaredNorm()))
      throw std::invalid_argument("point: off the constraint surface (residual " +
                                  std::to_string(resid) + ")");
  }
  if (m.kind() == ManifoldKind::CliftonPohl && x.coords.squaredNorm() < 1e-24)
    throw std::invalid_argument("point: Clifton-Pohl chart excludes the origin");
}

/// Metric in coordinates: the m x m chart matrix, or the constant ambient J
/// for embedded kinds (whose restriction to the tangent space is the metric).
inline MatrixXd metric_at(const ManifoldSpec& m, const Point& x) {
  validate_point(m, x);
  switch (m.kind()) {
    case ManifoldKind::Flat:
      return m.signature().j_matrix();
    case ManifoldKind::PseudoSphere:
    case ManifoldKind::PseudoHyperbolic:
      return m.ambient_signature().j_matrix();
    case ManifoldKind::CliftonPohl: {
      const double u = x.coords(0), v = x.coords(1);
      const double f = 2.0 / (u * u + v * v);
      MatrixXd g(2, 2);
      g << 0, f, f, 0;
      return g;
    }
    case ManifoldKind::CustomChart: {
      const int d = m.dim();
      const auto* data = m.custom();
      MatrixXd g(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          g(i, j) = data->g[i][j](x.coords);
          if (data->entries[i][j] && data->entries[j][i] && i != j) {
            const double other = data->g[j][i](x.coords);
            if (std::abs(g(i, j) - other) > 1e-9 * std::max(1.0, std::abs(g(i, j))))
              throw std::invalid_argument("custom_chart: explicit gij and gji disagree at evaluation");
          }
        }
      // Nondegeneracy and declared index, checked at evaluated points.
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(g);
      int neg = 0;
      for (int i = 0; i < d; ++i) {
        if (std::abs(es.eigenvalues()(i)) < 1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff()))
          throw std::invalid_argument("custom_chart: metric singular at evaluated point");
        if (es.eigenvalues()(i) < 0) ++neg;
      }
      if (neg != m.signature().nu)
        throw std::invalid_argument("custom_chart: metric index differs from declared nu");
      return g;
    }
  }
  throw std::logic_error("metric_at: unreachable");
}

/// <u, v> at x: chart kinds use g(x), embedded kinds the ambient J.
inline double metric_inner(const ManifoldSpec& m, const Point& x, const VectorXd& u,
                           const VectorXd& v) {
  if (m.embedded()) return inner(u, v, m.ambient_signature());
  if (m.kind() == ManifoldKind::Flat) return inner(u, v, m.signature());
  const MatrixXd g = metric_at(m, x);
  return u.dot(g * v);
}

/// Ambient projection onto the tangent space at p: w - (<w,p>/<p,p>) p.
inline Tangent tangent_project(const ManifoldSpec& m, const Point& p, const VectorXd& w) {
  if (!m.embedded()) throw std::invalid_argument("tangent_project: embedded kinds only");
  validate_point(m, p);
  if (w.size() != m.coord_dim()) throw std::invalid_argument("tangent_project: dimension mismatch");
  const Signature amb = m.ambient_signature();
  const double pp = inner(p.coords, p.coords, amb);
  return {p, w - inner(w, p.coords, amb) / pp * p.coords};
}

namespace detail {

// Christoffel symbols as a list of m x m matrices: gamma[k](i,j) = Gamma^k_ij.
using ChristoffelArray = std::vector<MatrixXd>;

inline ChristoffelArray christoffel_clifton_pohl(const VectorXd& x) {
  const double u = x(0), v = x(1), d = u * u + v * v;
  ChristoffelArray gamma(2, MatrixXd::Zero(2, 2));
  gamma[0](0, 0) = -2.0 * u / d;
  gamma[1](1, 1) = -2.0 * v / d;
  return gamma;
}

inline ChristoffelArray christoffel_from_metric(const MatrixXd& g,
                                                const std::vector<MatrixXd>& dg) {
  const int d = int(g.rows());
  const MatrixXd ginv = g.inverse();
  ChristoffelArray gamma(d, MatrixXd::Zero(d, d));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        double sum = 0;
        for (int l = 0; l < d; ++l)
          sum += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k](i, j) = 0.5 * sum;
        gamma[k](j, i) = gamma[k](i, j);
      }
  return gamma;
}

// Central finite differences of the metric, the generic fallback route.
inline std::vector<MatrixXd> metric_derivatives_fd(const ManifoldSpec& m, const VectorXd& x,
                                                   double h = 1e-5) {
  const int d = m.dim();
  std::vector<MatrixXd> dg(d);
  for (int k = 0; k < d; ++k) {
    VectorXd xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    dg[k] = (metric_at(m, {xp}) - metric_at(m, {xm})) / (2.0 * h);
  }
  return dg;
}

}  // namespace detail

/// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij). Chart kinds
/// only. Closed forms are registered for flat and Clifton-Pohl; custom charts
/// differentiate their parsed expressions exactly; `force_fd` switches to the
/// central-difference fallback (step h).
inline detail::ChristoffelArray christoffel_at(const ManifoldSpec& m, const Point& x,
                                               bool force_fd = false, double h = 1e-5) {
  if (m.embedded()) throw std::invalid_argument("christoffel_at: chart-kind manifold required");
  validate_point(m, x);
  const int d = m.dim();
  if (m.kind() == ManifoldKind::Flat) return detail::ChristoffelArray(d, MatrixXd::Zero(d, d));
  if (!force_fd && m.kind() == ManifoldKind::CliftonPohl)
    return detail::christoffel_clifton_pohl(x.coords);

  const MatrixXd g = metric_at(m, x);
  if (std::abs(g.determinant()) < 1e-12)
    throw std::invalid_argument("christoffel_at: metric singular at x");
  std::vector<MatrixXd> dg(d);
  if (!force_fd && m.kind() == ManifoldKind::CustomChart) {
    const auto* data = m.custom();
    for (int k = 0; k < d; ++k) {
      dg[k].resize(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) dg[k](i, j) = data->dg[k][i][j](x.coords);
    }
  } else {
    dg = detail::metric_derivatives_fd(m, x.coords, h);
  }
  return detail::christoffel_from_metric(g, dg);
}

/// R(X,Y) as a matrix acting on tangent vectors in coordinate representation
/// (ambient coordinates for embedded kinds, where the registered closed form
/// is c (X (JY)^T - Y (JX)^T)). Chart kinds assemble R^l_kij from the
/// Christoffel symbols and their derivatives.
inline MatrixXd curvature_endomorphism(const ManifoldSpec& m, const Point& x, const Tangent& X,
                                       const Tangent& Y) {
  validate_point(m, x);
  if (X.vec.size() != m.coord_dim() || Y.vec.size() != m.coord_dim())
    throw std::invalid_argument("curvature_endomorphism: dimension mismatch");
  const int cd = m.coord_dim();
  if (auto c = m.constant_curvature()) {
    if (*c == 0.0) return MatrixXd::Zero(cd, cd);
    const MatrixXd j = m.ambient_signature().j_matrix();
    return *c * (X.vec * (j * Y.vec).transpose() - Y.vec * (j * X.vec).transpose());
  }

  const int d = m.dim();
  const auto gamma = christoffel_at(m, x);
  // d_i Gamma^l_jk by differentiating the assembled symbols.
  std::vector<detail::ChristoffelArray> dgamma(d);
  if (m.kind() == ManifoldKind::CustomChart) {
    const auto* data = m.custom();
    const MatrixXd g = metric_at(m, x);
    const MatrixXd ginv = g.inverse();
    std::vector<MatrixXd> dg(d), dginv(d);
    std::vector<std::vector<MatrixXd>> ddg(d, std::vector<MatrixXd>(d));
    for (int k = 0; k < d; ++k) {
      dg[k].resize(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) dg[k](i, j) = data->dg[k][i][j](x.coords);
    }
    for (int l = 0; l < d; ++l)
      for (int k = 0; k < d; ++k) {
        ddg[l][k].resize(d, d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) ddg[l][k](i, j) = data->ddg[l][k][i][j](x.coords);
      }
    for (int k = 0; k < d; ++k) dginv[k] = -ginv * dg[k] * ginv;
    for (int a = 0; a < d; ++a) {
      dgamma[a].assign(d, MatrixXd::Zero(d, d));
      for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            double sum = 0;
            for (int l = 0; l < d; ++l) {
              sum += dginv[a](k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
              sum += ginv(k, l) * (ddg[a][i](j, l) + ddg[a][j](i, l) - ddg[a][l](i, j));
            }
            dgamma[a][k](i, j) = 0.5 * sum;
          }
    }
  } else {
    // Central differences of the (closed-form) symbols.
    const double h = 1e-5;
    for (int a = 0; a < d; ++a) {
      VectorXd xp = x.coords, xm = x.coords;
      xp(a) += h;
      xm(a) -= h;
      const auto gp = christoffel_at(m, {xp});
      const auto gm = christoffel_at(m, {xm});
      dgamma[a].resize(d);
      for (int k = 0; k < d; ++k) dgamma[a][k] = (gp[k] - gm[k]) / (2.0 * h);
    }
  }

  // R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_imu Gamma^mu_jk
  //           - Gamma^l_jmu Gamma^mu_ik, contracted with X^i Y^j.
  MatrixXd endo = MatrixXd::Zero(d, d);
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k) {
      double acc = 0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          double r = dgamma[i][l](j, k) - dgamma[j][l](i, k);
          for (int mu = 0; mu < d; ++mu)
            r += gamma[l](i, mu) * gamma[mu](j, k) - gamma[l](j, mu) * gamma[mu](i, k);
          acc += r * X.vec(i) * Y.vec(j);
        }
      endo(l, k) = acc;
    }
  return endo;
}

/// Coordinates of a tangent vector in a pseudo-orthonormal frame:
/// c_i = eps_i <v, f_i>, where eps_i = +/-1 is the frame vector's J-norm.
inline VectorXd frame_coords(const ManifoldSpec& m, const Frame& f, const VectorXd& v) {
  const int md = m.dim();
  const VectorXd eps = m.signature().j_diagonal();
  VectorXd c(md);
  for (int i = 0; i < md; ++i) c(i) = eps(i) * metric_inner(m, f.base, v, f.vectors.col(i));
  return c;
}

inline MatrixXd frame_gram(const ManifoldSpec& m, const Frame& f) {
  const int md = m.dim();
  MatrixXd gram(md, md);
  for (int i = 0; i < md; ++i)
    for (int j = 0; j < md; ++j)
      gram(i, j) = metric_inner(m, f.base, f.vectors.col(i), f.vectors.col(j));
  return gram;
}

inline void validate_frame(const ManifoldSpec& m, const Frame& f, double tol = 1e-9) {
  validate_point(m, f.base, tol);
  if (f.vectors.rows() != m.coord_dim() || f.vectors.cols() != m.dim())
    throw std::invalid_argument("frame: wrong dimensions");
  if (m.embedded()) {
    const Signature amb = m.ambient_signature();
    for (int i = 0; i < m.dim(); ++i)
      if (std::abs(inner(f.vectors.col(i), f.base.coords, amb)) >
          tol * std::max(1.0, f.base.coords.norm() * f.vectors.col(i).norm()))
        throw std::invalid_argument("frame: vector not tangent to the quadric");
  }
  const MatrixXd gram = frame_gram(m, f);
  if ((gram - MatrixXd(m.signature().j_matrix())).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("frame: Gram matrix differs from diag(+1..,-1..)");
}

namespace detail {

inline std::vector<VectorXd> tangent_candidates(const ManifoldSpec& m, const Point& x) {
  std::vector<VectorXd> raw = default_candidates(m.coord_dim());
  if (!m.embedded()) return raw;
  std::vector<VectorXd> out;
  out.reserve(raw.size());
  for (const auto& c : raw) {
    VectorXd t = tangent_project(m, x, c).vec;
    if (t.norm() > 1e-10) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace detail

/// Deterministic pseudo-orthonormal frame at x (standard-axis candidates).
inline Frame reference_frame(const ManifoldSpec& m, const Point& x) {
  validate_point(m, x);
  auto form = [&m, &x](const VectorXd& a, const VectorXd& b) { return metric_inner(m, x, a, b); };
  MatrixXd basis = detail::pseudo_orthonormalize(m.coord_dim(), m.signature().n, m.signature().nu,
                                                 form, {}, detail::tangent_candidates(m, x));
  return {x, basis};
}

namespace detail {

// Global continuous timelike vector field (nu = 1 kinds): fixes the time
// orientation against which frames are classified. Custom charts fall back
// to the sign-normalized negative eigenvector of g (deterministic, not
// guaranteed continuous; the rolling pipelines operate on the catalog).
inline VectorXd global_timelike_field(const ManifoldSpec& m, const Point& x) {
  const int cd = m.coord_dim();
  switch (m.kind()) {
    case ManifoldKind::Flat:
      return VectorXd::Unit(cd, cd - 1);
    case ManifoldKind::PseudoSphere:
      // Projection of the ambient timelike axis; <.,.> = -1 - <e,p>^2/r^2 < 0.
      return tangent_project(m, x, VectorXd::Unit(cd, cd - 1)).vec;
    case ManifoldKind::PseudoHyperbolic: {
      // Rotational field in the last timelike ambient 2-plane: always
      // timelike and tangent (the projected axis degenerates on this kind).
      VectorXd t = VectorXd::Zero(cd);
      t(cd - 2) = -x.coords(cd - 1);
      t(cd - 1) = x.coords(cd - 2);
      return t;
    }
    case ManifoldKind::CliftonPohl: {
      VectorXd t(2);
      t << 1, -1;  // <t,t> = -2 g_12 < 0 everywhere on the chart
      return t;
    }
    case ManifoldKind::CustomChart: {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(metric_at(m, x));
      VectorXd t = es.eigenvectors().col(0);  // most negative eigenvalue
      int imax = 0;
      for (int i = 1; i < t.size(); ++i)
        if (std::abs(t(i)) > std::abs(t(imax))) imax = i;
      if (t(imax) < 0) t = -t;
      return t;
    }
  }
  throw std::logic_error("global_timelike_field: unreachable");
}

}  // namespace detail

/// Orientation classes of a frame: (orientation sign, time sign). The
/// orientation is the chart volume sign (outward-normal-first for embedded
/// kinds); the time sign compares the timelike frame vector against a global
/// timelike field, so the classes are constant along parallel transport.
/// (+1, +1) is the normalized class; for nu != 1 the time sign is +1.
inline std::pair<int, int> frame_component(const ManifoldSpec& m, const Frame& f) {
  int orient;
  if (m.embedded()) {
    MatrixXd vol(m.coord_dim(), m.coord_dim());
    vol.col(0) = f.base.coords;
    vol.rightCols(m.dim()) = f.vectors;
    orient = vol.determinant() > 0 ? 1 : -1;
  } else {
    orient = f.vectors.determinant() > 0 ? 1 : -1;
  }
  int time_sign = 1;
  if (m.signature().nu == 1) {
    const VectorXd t = detail::global_timelike_field(m, f.base);
    // Future-aligned timelike vectors have negative inner product.
    time_sign = metric_inner(m, f.base, f.vectors.col(m.dim() - 1), t) < 0 ? 1 : -1;
  }
  return {orient, time_sign};
}

/// Seeded random pseudo-orthonormal frame at x, timelike vectors last,
/// normalized to the (+1, +1) orientation class.
inline Frame random_orthonormal_frame(const ManifoldSpec& m, const Point& x, std::uint64_t seed) {
  validate_point(m, x);
  std::mt19937_64 rng(seed ^ 0x517cc1b727220a95ULL);
  std::normal_distribution<double> gauss;
  std::vector<VectorXd> candidates;
  for (int i = 0; i < 4 * m.coord_dim() + 8; ++i) {
    VectorXd c(m.coord_dim());
    for (int k = 0; k < c.size(); ++k) c(k) = gauss(rng);
    if (m.embedded()) {
      c = tangent_project(m, x, c).vec;
      if (c.norm() < 1e-10) continue;
    }
    candidates.push_back(std::move(c));
  }
  auto form = [&m, &x](const VectorXd& a, const VectorXd& b) { return metric_inner(m, x, a, b); };
  MatrixXd basis = detail::pseudo_orthonormalize(m.coord_dim(), m.signature().n, m.signature().nu,
                                                 form, {}, candidates, seed ^ 0x2545f4914f6cdd1dULL);
  Frame f{x, basis};
  auto [orient, time_sign] = frame_component(m, f);
  if (time_sign < 0) {
    f.vectors.col(m.dim() - 1) *= -1.0;  // flips the volume sign as well
    orient = -orient;
  }
  if (orient < 0) f.vectors.col(0) *= -1.0;
  return f;
}

/// Manifold JSON schema: {"kind": ..., "n":, "nu":, "r":, "dim":, "metric":}.
inline ManifoldSpec manifold_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("manifold: JSON object expected");
  static const char* known[] = {"kind", "n", "nu", "r", "dim", "metric"};
  for (const auto& [key, val] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("manifold: unknown key at /" + key);
  }
  if (!j.contains("kind")) throw std::invalid_argument("manifold: missing key at /kind");
  const std::string kind = j.at("kind").get<std::string>();
  auto geti = [&j](const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("manifold: missing key at /") + key);
    return j.at(key).get<int>();
  };
  auto getr = [&j]() { return j.contains("r") ? j.at("r").get<double>() : 1.0; };
  if (kind == "flat") return ManifoldSpec::flat(geti("n"), geti("nu"));
  if (kind == "sphere" || kind == "s") return ManifoldSpec::pseudo_sphere(geti("n"), geti("nu"), getr());
  if (kind == "hyperbolic" || kind == "h")
    return ManifoldSpec::pseudo_hyperbolic(geti("n"), geti("nu"), getr());
  if (kind == "clifton-pohl") return ManifoldSpec::clifton_pohl();
  if (kind == "custom") {
    if (!j.contains("metric")) throw std::invalid_argument("manifold: missing key at /metric");
    return ManifoldSpec::custom_chart(geti("dim"), geti("nu"), j.at("metric"));
  }
  throw std::invalid_argument("manifold: unknown kind at /kind: " + kind);
}

inline nlohmann::json manifold_to_json(const ManifoldSpec& m) {
  nlohmann::json j;
  j["kind"] = to_string(m.kind());
  j["n"] = m.signature().n;
  j["nu"] = m.signature().nu;
  if (m.embedded()) j["r"] = m.radius();
  return j;
}

/// Convenience: parse the metric object of a custom chart (the expression
/// surface exposed to the CLI); dimension is inferred from the largest index.
inline ManifoldSpec parse_metric_expression(const nlohmann::json& metric, int nu) {
  if (!metric.is_object()) throw std::invalid_argument("parse_metric_expression: object expected");
  int dim = 0;
  for (const auto& [key, val] : metric.items()) {
    if (key.size() == 3 && key[0] == 'g') dim = std::max({dim, key[1] - '0', key[2] - '0'});
  }
  if (dim == 0) throw std::invalid_argument("parse_metric_expression: no gij entries");
  return ManifoldSpec::custom_chart(dim, nu, metric);
}

}  // namespace lorroll
