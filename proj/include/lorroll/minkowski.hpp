#pragma once

// Pseudo-Euclidean linear algebra in signature (n, nu) with the timelike
// coordinates last: the bilinear form <.,.>_J, causal classification, the
// restricted Lorentz group SO0(n,1) and its affine extension
// SE0(n,1) = R^{n,1} x| SO0(n,1), Lie-algebra exp/log, transporters along
// SO0-orbits, and the constructive closure of translation subgroups.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lorroll {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Signature (n, nu): n spacelike directions followed by nu timelike ones.
/// The form matrix is J = diag(+1 x n, -1 x nu); total dimension m = n + nu.
struct Signature {
  int n = 0;
  int nu = 0;

  int dim() const { return n + nu; }
  bool lorentzian() const { return nu == 1 && dim() >= 2; }

  VectorXd j_diagonal() const {
    VectorXd d(dim());
    d.head(n).setOnes();
    d.tail(nu).setConstant(-1.0);
    return d;
  }
  MatrixXd j_matrix() const { return j_diagonal().asDiagonal(); }

  bool operator==(const Signature&) const = default;
};

inline void check_signature(const Signature& sig) {
  if (sig.n < 0 || sig.nu < 0 || sig.dim() < 1)
    throw std::invalid_argument("signature: need n, nu >= 0 and n + nu >= 1");
}

/// <u, v>_J = sum_{i<=n} u_i v_i - sum_{i>n} u_i v_i.
inline double inner(const VectorXd& u, const VectorXd& v, const Signature& sig) {
  if (u.size() != sig.dim() || v.size() != sig.dim())
    throw std::invalid_argument("inner: dimension mismatch");
  const int n = sig.n;
  return u.head(n).dot(v.head(n)) - u.tail(sig.nu).dot(v.tail(sig.nu));
}

enum class Causal { Spacelike, Timelike, Lightlike };
enum class TimeComponent { None, Future, Past };

struct CausalClass {
  Causal kind = Causal::Spacelike;
  TimeComponent component = TimeComponent::None;

  bool operator==(const CausalClass&) const = default;
};

inline const char* to_string(Causal c) {
  switch (c) {
    case Causal::Spacelike: return "spacelike";
    case Causal::Timelike: return "timelike";
    default: return "lightlike";
  }
}

/// Classification of v by the sign of <v,v>_J; v = 0 counts as spacelike.
/// Non-spacelike vectors carry a Future/Past tag from the sign of the last
/// coordinate. `tol` widens the lightlike band for numerically null input.
inline CausalClass causal_character(const VectorXd& v, const Signature& sig, double tol = 0.0) {
  if (v.size() != sig.dim()) throw std::invalid_argument("causal_character: dimension mismatch");
  if (v.isZero(0.0)) return {Causal::Spacelike, TimeComponent::None};
  const double s = inner(v, v, sig);
  const double band = tol * std::max(1.0, v.squaredNorm());
  if (s > band) return {Causal::Spacelike, TimeComponent::None};
  const TimeComponent comp = v(v.size() - 1) > 0 ? TimeComponent::Future : TimeComponent::Past;
  if (s < -band) return {Causal::Timelike, comp};
  return {Causal::Lightlike, comp};
}

namespace detail {

inline double operator_norm(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return a.jacobiSvd().singularValues()(0);
}

// Component invariants of a J-orthogonal matrix: sign of det of the
// spacelike and timelike diagonal blocks. (+1, +1) is the identity component.
inline std::pair<int, int> oj_component(const MatrixXd& c, const Signature& sig) {
  const int n = sig.n, nu = sig.nu;
  int space_sign = 1, time_sign = 1;
  if (n > 0) space_sign = c.topLeftCorner(n, n).determinant() >= 0 ? 1 : -1;
  if (nu > 0) time_sign = c.bottomRightCorner(nu, nu).determinant() >= 0 ? 1 : -1;
  return {space_sign, time_sign};
}

}  // namespace detail

/// Element of SO0(n, nu): J-orthogonal, det +1, identity component.
/// Construction validates all three; the inverse J C^T J is exact.
class LorentzMatrix {
 public:
  static LorentzMatrix from(MatrixXd c, const Signature& sig, double tol = 1e-9) {
    check_signature(sig);
    const int m = sig.dim();
    if (c.rows() != m || c.cols() != m)
      throw std::invalid_argument("LorentzMatrix: wrong dimensions");
    const MatrixXd j = sig.j_matrix();
    const double ortho = (c.transpose() * j * c - j).cwiseAbs().maxCoeff();
    if (ortho > tol)
      throw std::invalid_argument("LorentzMatrix: C^T J C != J (residual " + std::to_string(ortho) + ")");
    const double det = c.determinant();
    if (std::abs(det - 1.0) > tol)
      throw std::invalid_argument("LorentzMatrix: det != +1 (det " + std::to_string(det) + ")");
    if (sig.nu == 1 && c(m - 1, m - 1) < 1.0 - tol)
      throw std::invalid_argument("LorentzMatrix: time orientation not preserved");
    if (sig.nu >= 2) {
      auto [ss, ts] = detail::oj_component(c, sig);
      if (ss < 0 || ts < 0)
        throw std::invalid_argument("LorentzMatrix: not in the identity component");
    }
    return LorentzMatrix(std::move(c), sig);
  }

  static LorentzMatrix identity(const Signature& sig) {
    check_signature(sig);
    return LorentzMatrix(MatrixXd::Identity(sig.dim(), sig.dim()), sig);
  }

  const MatrixXd& matrix() const { return c_; }
  const Signature& signature() const { return sig_; }
  int dim() const { return sig_.dim(); }

  LorentzMatrix inverse() const {
    const MatrixXd j = sig_.j_matrix();
    return LorentzMatrix(j * c_.transpose() * j, sig_);
  }

  LorentzMatrix operator*(const LorentzMatrix& o) const {
    if (!(sig_ == o.sig_)) throw std::invalid_argument("LorentzMatrix: signature mismatch");
    return LorentzMatrix(c_ * o.c_, sig_);
  }

  VectorXd operator*(const VectorXd& v) const { return c_ * v; }

 private:
  LorentzMatrix(MatrixXd c, Signature sig) : c_(std::move(c)), sig_(sig) {}
  MatrixXd c_;
  Signature sig_;
};

/// Element (y, C) of SE0(n,1): v |-> C v + y.
struct SEElement {
  VectorXd y;
  LorentzMatrix c;

  static SEElement identity(const Signature& sig) {
    return {VectorXd::Zero(sig.dim()), LorentzMatrix::identity(sig)};
  }
  /// Pure translation phi_v = (v, id).
  static SEElement translation(VectorXd v, const Signature& sig) {
    if (v.size() != sig.dim()) throw std::invalid_argument("translation: dimension mismatch");
    return {std::move(v), LorentzMatrix::identity(sig)};
  }

  const Signature& signature() const { return c.signature(); }
};

inline VectorXd se_apply(const SEElement& b, const VectorXd& v) { return b.c * v + b.y; }

inline SEElement se_compose(const SEElement& b1, const SEElement& b2) {
  if (!(b1.signature() == b2.signature()))
    throw std::invalid_argument("se_compose: signature mismatch");
  return {b1.y + b1.c * b2.y, b1.c * b2.c};
}

inline SEElement se_inverse(const SEElement& b) {
  LorentzMatrix cinv = b.c.inverse();
  return {-(cinv * b.y), cinv};
}

/// Composes g_1 o g_2 o ... o g_k (rightmost applied first); empty word = id.
inline SEElement compose_word(const std::vector<SEElement>& word, const Signature& sig) {
  SEElement acc = SEElement::identity(sig);
  for (const auto& g : word) acc = se_compose(acc, g);
  return acc;
}

/// J-skew matrix X (X^T J + J X = 0), the Lie algebra so(n, nu).
class LieAlgebraElement {
 public:
  static LieAlgebraElement from(const MatrixXd& x, const Signature& sig, double tol = 1e-8) {
    check_signature(sig);
    const int m = sig.dim();
    if (x.rows() != m || x.cols() != m)
      throw std::invalid_argument("LieAlgebraElement: wrong dimensions");
    const MatrixXd j = sig.j_matrix();
    const MatrixXd skew = 0.5 * (x - j * x.transpose() * j);
    const double resid = (x - skew).cwiseAbs().maxCoeff();
    if (resid > tol * std::max(1.0, x.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("LieAlgebraElement: not J-skew (residual " + std::to_string(resid) + ")");
    return LieAlgebraElement(skew, sig);
  }

  const MatrixXd& matrix() const { return x_; }
  const Signature& signature() const { return sig_; }

 private:
  LieAlgebraElement(MatrixXd x, Signature sig) : x_(std::move(x)), sig_(sig) {}
  MatrixXd x_;
  Signature sig_;
};

/// Basis of so(n, nu): the m(m-1)/2 matrices J (e_i e_j^T - e_j e_i^T), i < j.
inline std::vector<LieAlgebraElement> so_basis(const Signature& sig) {
  const int m = sig.dim();
  const MatrixXd j = sig.j_matrix();
  std::vector<LieAlgebraElement> out;
  out.reserve(m * (m - 1) / 2);
  for (int i = 0; i < m; ++i)
    for (int k = i + 1; k < m; ++k) {
      MatrixXd e = MatrixXd::Zero(m, m);
      e(i, k) = 1.0;
      e(k, i) = -1.0;
      out.push_back(LieAlgebraElement::from(j * e, sig));
    }
  return out;
}

inline LorentzMatrix so_exp(const LieAlgebraElement& x, double tol = 1e-9) {
  MatrixXd c = x.matrix().exp();
  return LorentzMatrix::from(std::move(c), x.signature(), tol);
}

/// Principal logarithm, defined within the configured convergence radius
/// ||C - I||_op < radius (callers shrink loops until their holonomies fit).
inline LieAlgebraElement so_log(const LorentzMatrix& c, double radius = 0.5) {
  const int m = c.dim();
  const double dist = detail::operator_norm(c.matrix() - MatrixXd::Identity(m, m));
  if (dist >= radius) {
    std::ostringstream os;
    os << "so_log: ||C - I|| = " << dist << " outside convergence radius " << radius;
    throw std::domain_error(os.str());
  }
  MatrixXd l = c.matrix().log();
  return LieAlgebraElement::from(l, c.signature(), 1e-6);
}

namespace detail {

// Pseudo-Gram-Schmidt against an arbitrary nondegenerate symmetric form.
// Accepts candidates in order, J-orthogonalizes against already accepted
// vectors, normalizes to <b,b> = +/-1, and bins the result into the next
// free spacelike or timelike slot. Pinned vectors pre-occupy their slots and
// must already be orthonormal w.r.t. the form. Falls back to seeded random
// candidates on breakdown. Returns columns ordered spacelike-first.
struct PinnedVector {
  VectorXd vec;  // already form-normalized
  int slot;      // 0-based column in the output basis
};

using FormFn = std::function<double(const VectorXd&, const VectorXd&)>;

inline MatrixXd pseudo_orthonormalize(int ambient_dim, int n_plus, int n_minus,
                                      const FormFn& form,
                                      const std::vector<PinnedVector>& pinned,
                                      const std::vector<VectorXd>& candidates,
                                      std::uint64_t seed = 0x9e3779b97f4a7c15ULL,
                                      double tol = 1e-10, int max_random = 256) {
  const int m = n_plus + n_minus;
  MatrixXd basis(ambient_dim, m);
  std::vector<bool> used(m, false);
  std::vector<int> accepted;  // filled slots in acceptance order
  std::vector<double> sign_of(m, 0.0);

  auto place = [&](const VectorXd& b, double sgn, int slot) {
    basis.col(slot) = b;
    sign_of[slot] = sgn;
    used[slot] = true;
    accepted.push_back(slot);
  };

  for (const auto& p : pinned) {
    if (p.slot < 0 || p.slot >= m || used[p.slot])
      throw std::invalid_argument("pseudo_orthonormalize: bad pinned slot");
    place(p.vec, p.slot < n_plus ? 1.0 : -1.0, p.slot);
  }

  int next_space = 0, next_time = n_plus;
  auto next_free = [&](bool spacelike) -> int {
    int& cur = spacelike ? next_space : next_time;
    const int end = spacelike ? n_plus : m;
    while (cur < end && used[cur]) ++cur;
    return cur < end ? cur : -1;
  };

  auto try_candidate = [&](VectorXd r) -> bool {
    for (int s : accepted) {
      const double coef = sign_of[s] * form(r, basis.col(s));
      r -= coef * basis.col(s);
    }
    const double q = form(r, r);
    const double scale = r.squaredNorm();
    if (scale <= 0.0 || std::abs(q) <= tol * scale) return false;
    const bool spacelike = q > 0;
    const int slot = next_free(spacelike);
    if (slot < 0) return false;
    place(r / std::sqrt(std::abs(q)), spacelike ? 1.0 : -1.0, slot);
    return true;
  };

  for (const auto& cnd : candidates) {
    if (int(accepted.size()) == m) break;
    try_candidate(cnd);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; int(accepted.size()) < m && k < max_random; ++k) {
    VectorXd r(ambient_dim);
    for (int i = 0; i < ambient_dim; ++i) r(i) = gauss(rng);
    try_candidate(r);
  }
  if (int(accepted.size()) != m)
    throw std::runtime_error("pseudo_orthonormalize: breakdown (degenerate form or exhausted retries)");
  return basis;
}

// Standard axes followed by pairwise sums/differences; enough to seed the
// orthonormalization even when the axes themselves are null (Clifton-Pohl).
inline std::vector<VectorXd> default_candidates(int dim) {
  std::vector<VectorXd> out;
  for (int i = 0; i < dim; ++i) out.push_back(VectorXd::Unit(dim, i));
  for (int i = 0; i < dim; ++i)
    for (int k = i + 1; k < dim; ++k) {
      out.push_back(VectorXd::Unit(dim, i) + VectorXd::Unit(dim, k));
      out.push_back(VectorXd::Unit(dim, i) - VectorXd::Unit(dim, k));
    }
  return out;
}

}  // namespace detail

namespace detail {

// J-reflection in the hyperplane J-orthogonal to non-null w:
// x |-> x - 2 <x,w>/<w,w> w. Spacelike w gives det -1 and preserves the
// time orientation, so a product of two such reflections lies in SO0(n,1).
inline MatrixXd j_reflection(const VectorXd& w, const Signature& sig) {
  const MatrixXd j = sig.j_matrix();
  const double q = inner(w, w, sig);
  return MatrixXd::Identity(sig.dim(), sig.dim()) - (2.0 / q) * w * (j * w).transpose();
}

// A nonzero spacelike vector exactly J-orthogonal to v, built from products
// of coordinates only (no divisions, so it stays well conditioned arbitrarily
// close to the light cone).
inline VectorXd spacelike_orthogonal(const VectorXd& v, const Signature& sig) {
  const int m = sig.dim(), n = sig.n;
  int a = 0, b = 1;
  for (int i = 0; i < n; ++i)
    if (std::abs(v(i)) > std::abs(v(a))) a = i;
  b = (a == 0) ? 1 : 0;
  for (int i = 0; i < n; ++i)
    if (i != a && std::abs(v(i)) > std::abs(v(b))) b = i;

  // Within the spacelike span: z = v_b e_a - v_a e_b.
  VectorXd z_pair = VectorXd::Zero(m);
  z_pair(a) = v(b);
  z_pair(b) = -v(a);
  // Mixed with the timelike axis: z = v_m e_c + v_c e_m, spacelike iff
  // v_m^2 > v_c^2 (take the smallest spacelike coordinate).
  int c = 0;
  for (int i = 0; i < n; ++i)
    if (std::abs(v(i)) < std::abs(v(c))) c = i;
  VectorXd z_mixed = VectorXd::Zero(m);
  z_mixed(c) = v(m - 1);
  z_mixed(m - 1) = v(c);
  const double q_pair = z_pair.squaredNorm();
  const double q_mixed = v(m - 1) * v(m - 1) - v(c) * v(c);
  if (q_pair >= q_mixed) {
    if (q_pair <= 0.0) throw std::runtime_error("spacelike_orthogonal: degenerate input");
    return z_pair;
  }
  return z_mixed;
}

// Exact-orbit retry maps: boosts and a spatial rotation, used to move u to a
// generic position when u - v degenerates toward the light cone.
inline std::vector<MatrixXd> transporter_retry_maps(const Signature& sig) {
  const int m = sig.dim();
  std::vector<MatrixXd> maps;
  for (int axis = 0; axis < std::min(sig.n, 2); ++axis)
    for (double eta : {1.0, -1.0, 2.5, -2.5}) {
      MatrixXd b = MatrixXd::Identity(m, m);
      b(axis, axis) = std::cosh(eta);
      b(m - 1, m - 1) = std::cosh(eta);
      b(axis, m - 1) = std::sinh(eta);
      b(m - 1, axis) = std::sinh(eta);
      maps.push_back(b);
    }
  MatrixXd rot = MatrixXd::Identity(m, m);
  rot(0, 0) = std::cos(1.0);
  rot(1, 1) = std::cos(1.0);
  rot(0, 1) = -std::sin(1.0);
  rot(1, 0) = std::sin(1.0);
  maps.push_back(rot);
  return maps;
}

}  // namespace detail

/// C in SO0(n,1) with C u = v, for u, v of equal J-norm (and, when not
/// spacelike, equal Future/Past component). Built as a product of two
/// spacelike J-reflections R_z o R_{y-v} (y = u moved by an exact-orbit boost
/// when u - v degenerates toward the light cone), which keeps the
/// construction well conditioned arbitrarily close to the cone. Requires
/// n >= 2: with a single spacelike direction the relevant orbits are
/// disconnected.
inline LorentzMatrix orbit_transporter(const VectorXd& u, const VectorXd& v,
                                       const Signature& sig, double tol = 1e-9) {
  check_signature(sig);
  if (sig.nu != 1) throw std::invalid_argument("orbit_transporter: requires signature (n,1)");
  if (sig.n < 2) throw std::invalid_argument("orbit_transporter: requires n >= 2");
  const int m = sig.dim();
  if (u.size() != m || v.size() != m) throw std::invalid_argument("orbit_transporter: dimension mismatch");
  if (u.isZero(0.0) || v.isZero(0.0)) throw std::invalid_argument("orbit_transporter: degenerate input (zero vector)");

  const double su = inner(u, u, sig), sv = inner(v, v, sig);
  const double scale = std::max({1.0, u.squaredNorm(), v.squaredNorm()});
  if (std::abs(su - sv) > 1e-6 * scale)
    throw std::invalid_argument("orbit_transporter: J-norm mismatch");

  const double null_band = 1e-12 * scale;
  const bool spacelike = su > null_band && sv > null_band;
  if (!spacelike) {
    const double cu = u(m - 1), cv = v(m - 1);
    if (cu == 0.0 || cv == 0.0 || (cu > 0) != (cv > 0))
      throw std::invalid_argument("orbit_transporter: Future/Past component mismatch");
  }
  if (u == v) return LorentzMatrix::identity(sig);

  // pre-boosted reflection pair y |-> v with the best-conditioned chord.
  auto reflect_to = [&](const VectorXd& from, const VectorXd& to)
      -> std::optional<std::pair<MatrixXd, double>> {
    std::vector<MatrixXd> attempts{MatrixXd::Identity(m, m)};
    for (auto& b : detail::transporter_retry_maps(sig)) attempts.push_back(std::move(b));
    std::optional<std::pair<MatrixXd, double>> best;
    for (const auto& pre : attempts) {
      const VectorXd y = pre * from;
      const VectorXd w = y - to;
      const double q = inner(w, w, sig);
      const double ratio = q / w.squaredNorm();
      if (ratio <= 1e-8 || (best && ratio <= best->second)) continue;
      const MatrixXd rw = detail::j_reflection(w, sig);
      const MatrixXd rz = detail::j_reflection(detail::spacelike_orthogonal(to, sig), sig);
      best = {{rz * rw * pre, ratio}};
      if (ratio > 0.05) break;
    }
    return best;
  };

  auto direct = reflect_to(u, v);
  if (!direct || direct->second < 0.05) {
    // Route through an orbit midpoint whose chords to both endpoints are
    // spacelike: -v on the pseudosphere, the spatially reflected partner on
    // the cone and the hyperboloids.
    VectorXd mid;
    if (spacelike) {
      mid = -v;
    } else {
      mid = v;
      mid.head(m - 1) *= -1.0;
    }
    const auto leg1 = reflect_to(u, mid);
    const auto leg2 = reflect_to(mid, v);
    if (leg1 && leg2) {
      const double ratio = std::min(leg1->second, leg2->second);
      if (!direct || ratio > direct->second)
        direct = {{leg2->first * leg1->first, ratio}};
    }
  }
  if (!direct)
    throw std::runtime_error("orbit_transporter: could not find a well-conditioned reflection pair");

  LorentzMatrix out = LorentzMatrix::from(std::move(direct->first), sig, tol);
  const double resid = (out.matrix() * u - v).norm();
  if (resid > 1e-7 * std::max(1.0, v.norm()))
    throw std::runtime_error("orbit_transporter: postcondition Cu = v failed (residual " +
                             std::to_string(resid) + ")");
  return out;
}

/// xi_A = (x0 - A x0, A): the affine map v |-> A v - A x0 + x0 fixing x0.
/// A |-> xi_A is an injective homomorphism SO0(n,1) -> SE0(n,1).
inline SEElement fixed_point_embedding(const VectorXd& x0, const LorentzMatrix& a) {
  if (x0.size() != a.dim()) throw std::invalid_argument("fixed_point_embedding: dimension mismatch");
  return {x0 - a * x0, a};
}

/// A section SO0(n,1) -> SE0(n,1): returns some (w_A, A) for each requested A.
using Section = std::function<SEElement(const LorentzMatrix&)>;

/// Trivial section A |-> (0, A).
inline Section zero_section() {
  return [](const LorentzMatrix& a) { return SEElement{VectorXd::Zero(a.dim()), a}; };
}

namespace detail {

// Word machinery for the translation-subgroup closure. Everything composes
// over the alphabet {section(A), section(A)^-1, phi_v, phi_v^-1}; the only
// group-theoretic facts used are the conjugation identity
// psi^-1 o phi_w o psi = phi_{A^-1 w} and concatenation of translations.
class ClosureWordBuilder {
 public:
  ClosureWordBuilder(VectorXd v, Section section, Signature sig)
      : sig_(sig), section_(std::move(section)), v_(std::move(v)) {
    phi_v_ = SEElement::translation(v_, sig_);
    seed_base();
  }

  std::vector<SEElement> word_for(const VectorXd& u) const {
    if (u.isZero(0.0)) return {};
    const CausalClass cc = causal_character(u, sig_, 1e-12);
    switch (cc.kind) {
      case Causal::Spacelike: return word_spacelike(u);
      case Causal::Timelike: return word_timelike(u);
      default: return word_lightlike(u);
    }
  }

 private:
  static std::vector<SEElement> concat(std::vector<SEElement> a, const std::vector<SEElement>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  static std::vector<SEElement> inverse_word(const std::vector<SEElement>& w) {
    std::vector<SEElement> out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(se_inverse(*it));
    return out;
  }

  // psi_A^-1 o W o psi_A; takes phi_t to phi_{A^-1 t}.
  std::vector<SEElement> conjugate(const LorentzMatrix& a, const std::vector<SEElement>& w) const {
    const SEElement psi = section_(a);
    std::vector<SEElement> out;
    out.reserve(w.size() + 2);
    out.push_back(se_inverse(psi));
    out.insert(out.end(), w.begin(), w.end());
    out.push_back(psi);
    return out;
  }

  // Word for phi_t where t shares J-norm and component with the composition
  // target of `w` (a translation by `tvec`).
  std::vector<SEElement> moved(const VectorXd& t, const VectorXd& tvec,
                               const std::vector<SEElement>& w) const {
    if ((t - tvec).norm() <= 1e-14 * std::max(1.0, tvec.norm())) return w;
    return conjugate(orbit_transporter(t, tvec, sig_), w);
  }

  // Builds the base spacelike translation word once, per the causal type of v.
  void seed_base() {
    const CausalClass cc = causal_character(v_, sig_, 1e-12);
    const int m = sig_.dim();
    if (cc.kind == Causal::Spacelike) {
      base_vec_ = v_;
      base_word_ = {phi_v_};
      return;
    }
    if (cc.kind == Causal::Timelike) {
      // w1 in H_r^+, w2 in H_r^-; w1 + w2 = r e_{n} is spacelike.
      const double r = std::sqrt(-inner(v_, v_, sig_));
      VectorXd w1 = VectorXd::Zero(m), w2 = VectorXd::Zero(m);
      w1(m - 2) = r / 2;
      w1(m - 1) = std::sqrt(5.0) / 2 * r;
      w2(m - 2) = r / 2;
      w2(m - 1) = -std::sqrt(5.0) / 2 * r;
      base_word_ = concat(timelike_atom(w1), timelike_atom(w2));
      base_vec_ = w1 + w2;
      return;
    }
    // Lightlike seed: w1 in L^+, w2 in L^-; w1 + w2 spacelike.
    VectorXd w1 = VectorXd::Zero(m), w2 = VectorXd::Zero(m);
    w1(0) = 0.5;
    w1(m - 1) = 0.5;
    w2(0) = 0.5;
    w2(m - 1) = -0.5;
    base_word_ = concat(lightlike_atom(w1), lightlike_atom(w2));
    base_vec_ = w1 + w2;
  }

  // phi_w for timelike w with |<w,w>| = |<v,v>| using only v-conjugates
  // (valid only while seeding from a timelike v).
  std::vector<SEElement> timelike_atom(const VectorXd& w) const {
    const bool v_future = v_(sig_.dim() - 1) > 0;
    const bool w_future = w(sig_.dim() - 1) > 0;
    if (v_future == w_future) return moved(w, v_, {phi_v_});
    return inverse_word(moved(-w, v_, {phi_v_}));
  }

  // phi_w for lightlike w using only v-conjugates (lightlike v seed).
  std::vector<SEElement> lightlike_atom(const VectorXd& w) const {
    const bool v_future = v_(sig_.dim() - 1) > 0;
    const bool w_future = w(sig_.dim() - 1) > 0;
    if (v_future == w_future) return moved(w, v_, {phi_v_});
    return inverse_word(moved(-w, v_, {phi_v_}));
  }

  // Spacelike unit direction J-orthogonal to spacelike u. Tries the lowest
  // index spacelike axis first; falls back to a basis of u-perp.
  VectorXd orthogonal_spacelike(const VectorXd& u) const {
    const int m = sig_.dim();
    const double uu = inner(u, u, sig_);
    for (int i = 0; i < sig_.n; ++i) {
      VectorXd e = VectorXd::Unit(m, i);
      VectorXd p = e - inner(e, u, sig_) / uu * u;
      const double pp = inner(p, p, sig_);
      if (pp > 0.25 * p.squaredNorm() && p.squaredNorm() > 1e-12) return p / std::sqrt(pp);
    }
    auto form = [this](const VectorXd& a, const VectorXd& b) { return inner(a, b, sig_); };
    std::vector<detail::PinnedVector> pins{{u / std::sqrt(uu), 0}};
    MatrixXd basis = pseudo_orthonormalize(m, sig_.n, 1, form, pins, default_candidates(m));
    return basis.col(1);
  }

  std::vector<SEElement> word_spacelike(const VectorXd& u) const {
    const double s = inner(u, u, sig_);
    const double r2 = inner(base_vec_, base_vec_, sig_);
    if (std::abs(s - r2) <= 1e-12 * std::max(1.0, r2)) return moved(u, base_vec_, base_word_);
    if (s < r2) {
      // u = u' + u'' with both summands on S_r(0): midpoint plus a
      // J-orthogonal spacelike offset of length sqrt(r^2 - s/4).
      const VectorXd p = orthogonal_spacelike(u);
      const double beta = std::sqrt(r2 - s / 4.0);
      const VectorXd u1 = 0.5 * u + beta * p;
      const VectorXd u2 = 0.5 * u - beta * p;
      return concat(moved(u1, base_vec_, base_word_), moved(u2, base_vec_, base_word_));
    }
    // 1/k scaling into the short regime, repeated k times.
    const int k = int(std::floor(std::sqrt(s / r2))) + 1;
    const auto sub = word_spacelike(u / double(k));
    std::vector<SEElement> out;
    out.reserve(sub.size() * k);
    for (int i = 0; i < k; ++i) out = concat(std::move(out), sub);
    return out;
  }

  std::vector<SEElement> word_timelike(const VectorXd& u) const {
    const int m = sig_.dim();
    const double rho = std::sqrt(-inner(u, u, sig_));
    // Gadget pair u_+/- on S_rho(0) summing to rho e_m in H_rho^+.
    VectorXd up = VectorXd::Zero(m), um = VectorXd::Zero(m);
    up(0) = std::sqrt(5.0) / 2 * rho;
    up(m - 1) = rho / 2;
    um(0) = -std::sqrt(5.0) / 2 * rho;
    um(m - 1) = rho / 2;
    std::vector<SEElement> plus = concat(word_spacelike(up), word_spacelike(um));
    VectorXd t0 = VectorXd::Zero(m);
    t0(m - 1) = rho;
    if (u(m - 1) > 0) return moved(u, t0, plus);
    return moved(u, -t0, inverse_word(plus));
  }

  std::vector<SEElement> word_lightlike(const VectorXd& u) const {
    const int m = sig_.dim();
    // u1 on S_1(0), u2 in H_1^+; u1 +/- u2 span both halves of the cone.
    VectorXd u1 = VectorXd::Unit(m, 0);
    VectorXd u2 = VectorXd::Unit(m, m - 1);
    if (u(m - 1) > 0) {
      std::vector<SEElement> w = concat(word_spacelike(u1), word_timelike(u2));
      return moved(u, u1 + u2, w);
    }
    std::vector<SEElement> w = concat(word_spacelike(u1), word_timelike(-u2));
    return moved(u, u1 - u2, w);
  }

  Signature sig_;
  Section section_;
  VectorXd v_;
  SEElement phi_v_{VectorXd(), LorentzMatrix::identity({1, 1})};
  VectorXd base_vec_;
  std::vector<SEElement> base_word_;
};

}  // namespace detail

/// Word over {section(A), section(A)^-1, phi_v^{+/-1}} composing to phi_u,
/// given phi_v with v != 0. Follows the causal case analysis: conjugation
/// moves translations along SO0-orbits; short spacelike targets split as a
/// sum of two pseudosphere points; long ones scale by 1/k and repeat; fixed
/// gadget vectors bridge from timelike and lightlike seeds/targets to the
/// spacelike machinery. Restricted to signature (n, 1) with n >= 2.
inline std::vector<SEElement> translation_closure_word(const VectorXd& v, const VectorXd& u,
                                                       const Section& section,
                                                       const Signature& sig) {
  check_signature(sig);
  if (sig.nu != 1 || sig.n < 2)
    throw std::invalid_argument("translation_closure_word: requires signature (n,1), n >= 2");
  if (v.size() != sig.dim() || u.size() != sig.dim())
    throw std::invalid_argument("translation_closure_word: dimension mismatch");
  if (v.isZero(0.0)) throw std::invalid_argument("translation_closure_word: v = 0");
  detail::ClosureWordBuilder builder(v, section, sig);
  return builder.word_for(u);
}

}  // namespace lorroll
