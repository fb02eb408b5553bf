#pragma once

// Numerical holonomy estimation: transport around closed loops, the span of
// the resulting Lie-algebra samples (or of the curvature endomorphisms), the
// rolling holonomy subgroup of SE0(n,1) sampled through rolled loops,
// pure-translation detection, the translation-closure subgroup dichotomy,
// and the three-valued controllability verdict.

#include <lorroll/manifold.hpp>
#include <lorroll/minkowski.hpp>
#include <lorroll/rolling.hpp>
#include <lorroll/transport.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lorroll {

/// Closed loop based at a point: a coordinate rectangle (exponential-chart
/// square on the embedded quadrics), a triangle spanned by two tangent
/// directions, or an explicit closed curve.
struct LoopSpec {
  struct CoordRect {
    int i = 0, j = 1;
    double side = 0.1;
  };
  struct GeoTriangle {
    VectorXd v1, v2;
    double scale = 0.1;
  };
  struct Explicit {
    Curve curve;
  };

  Point base;
  std::variant<CoordRect, GeoTriangle, Explicit> shape;

  static LoopSpec rect(Point base, int i, int j, double side) {
    return {std::move(base), CoordRect{i, j, side}};
  }
  static LoopSpec triangle(Point base, VectorXd v1, VectorXd v2, double scale) {
    return {std::move(base), GeoTriangle{std::move(v1), std::move(v2), scale}};
  }
  static LoopSpec explicit_loop(Curve c) {
    Point base{c.points.front()};
    return {std::move(base), Explicit{std::move(c)}};
  }
};

namespace detail {

inline VectorXd quadric_exp(const ManifoldSpec& m, const VectorXd& p, const VectorXd& w) {
  const Signature amb = m.ambient_signature();
  const double ww = inner(w, w, amb);
  const double kappa = -ww / inner(p, p, amb);
  if (std::abs(kappa) < 1e-16) return p + w;
  if (kappa > 0) {
    const double s = std::sqrt(kappa);
    return std::cosh(s) * p + std::sinh(s) / s * w;
  }
  const double s = std::sqrt(-kappa);
  return std::cos(s) * p + std::sin(s) / s * w;
}

// Smooth sides of a polygon loop: each side is sampled separately so that
// corner kinks never enter a difference stencil.
inline std::vector<Curve> polygon_sides(const ManifoldSpec& m, const Point& base,
                                        const std::vector<VectorXd>& chart_vertices,
                                        double step) {
  std::vector<Curve> sides;
  const bool embedded = m.embedded();
  const int per_side = std::clamp(int(std::ceil(0.4 / step)), 64, 4000);
  for (std::size_t v = 0; v + 1 < chart_vertices.size(); ++v) {
    Curve side;
    side.manifold = m;
    for (int k = 0; k <= per_side; ++k) {
      const double s = double(k) / per_side;
      const VectorXd w = (1 - s) * chart_vertices[v] + s * chart_vertices[v + 1];
      side.grid.push_back(s);
      side.points.push_back(embedded ? quadric_exp(m, base.coords, w)
                                     : VectorXd(base.coords + w));
    }
    ensure_velocities(side);
    sides.push_back(std::move(side));
  }
  return sides;
}

}  // namespace detail

/// Realizes a loop as smooth curve segments whose concatenation closes at the
/// base point (endpoint distance <= 1e-9 by construction for the polygons).
inline std::vector<Curve> realize_loop(const ManifoldSpec& m, const LoopSpec& loop,
                                       double step = 1e-3) {
  validate_point(m, loop.base);
  if (const auto* r = std::get_if<LoopSpec::CoordRect>(&loop.shape)) {
    VectorXd di, dj;
    if (m.embedded()) {
      const Frame f = reference_frame(m, loop.base);
      di = f.vectors.col(r->i);
      dj = f.vectors.col(r->j);
    } else {
      di = VectorXd::Unit(m.dim(), r->i);
      dj = VectorXd::Unit(m.dim(), r->j);
    }
    const double s = r->side;
    const VectorXd zero = VectorXd::Zero(di.size());
    // Traversal order chosen so that log(holonomy) = +s^2 R(e_i, e_j) + O(s^3).
    return detail::polygon_sides(m, loop.base,
                                 {zero, s * dj, s * di + s * dj, s * di, zero}, step);
  }
  if (const auto* t = std::get_if<LoopSpec::GeoTriangle>(&loop.shape)) {
    const VectorXd zero = VectorXd::Zero(t->v1.size());
    return detail::polygon_sides(m, loop.base,
                                 {zero, t->scale * t->v2, t->scale * t->v1, zero}, step);
  }
  const auto& e = std::get<LoopSpec::Explicit>(loop.shape);
  Curve c = e.curve;
  ensure_velocities(c);
  if ((c.points.back() - c.points.front()).norm() >
      1e-9 * std::max(1.0, c.points.front().norm()))
    throw std::invalid_argument("loop: explicit curve does not close");
  return {std::move(c)};
}

/// Frame-basis matrix of the transport around the loop; lies in O(J).
inline LorentzMatrix loop_holonomy(const ManifoldSpec& m, const LoopSpec& loop,
                                   std::optional<Frame> base_frame = std::nullopt,
                                   double step = 1e-3) {
  const auto sides = realize_loop(m, loop, step);
  const Frame f0 = base_frame ? *base_frame : reference_frame(m, loop.base);
  MatrixXd current = f0.vectors;
  for (const auto& side : sides) {
    const auto frames = transport_frame_along(
        m, side, Frame{{side.points.front()}, current});
    current = frames.back();
  }
  const int md = m.dim();
  MatrixXd op(md, md);
  for (int i = 0; i < md; ++i) op.col(i) = frame_coords(m, f0, current.col(i));
  return LorentzMatrix::from(op, m.signature(), 1e-6);
}

enum class HolonomyMethod { Loops, Curvature };

inline const char* to_string(HolonomyMethod m) {
  return m == HolonomyMethod::Loops ? "loops" : "curvature";
}

/// Estimated holonomy algebra at a point: samples, an orthonormalized basis
/// of their span, and its rank against dim so(n,nu) = m(m-1)/2.
struct HolonomyEstimate {
  Point base;
  std::vector<MatrixXd> samples;  // J-skew matrices in the base frame
  std::vector<LieAlgebraElement> algebra_basis;
  int rank = 0;
  int dim_full = 0;
  HolonomyMethod method = HolonomyMethod::Curvature;
  bool exact_for_kind = false;  // curvature span is exact on the catalog
  std::string verdict;          // "trivial" | "partial" | "full"
};

namespace detail {

struct SpanRank {
  int rank = 0;
  std::vector<MatrixXd> basis;
};

// Rank of the span of vectorized matrices, with a relative singular-value
// cutoff; the basis comes from the top right-singular vectors.
inline SpanRank matrix_span_rank(const std::vector<MatrixXd>& mats, double cutoff = 1e-6) {
  SpanRank out;
  if (mats.empty()) return out;
  const int mm = int(mats[0].size());
  MatrixXd stack(int(mats.size()), mm);
  for (std::size_t k = 0; k < mats.size(); ++k)
    stack.row(int(k)) = Eigen::Map<const VectorXd>(mats[k].data(), mm);
  Eigen::JacobiSVD<MatrixXd> svd(stack, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0) return out;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff * sv(0)) ++out.rank;
  const int rows = int(mats[0].rows());
  for (int i = 0; i < out.rank; ++i) {
    VectorXd flat = svd.matrixV().col(i);
    out.basis.push_back(Eigen::Map<const MatrixXd>(flat.data(), rows, rows));
  }
  return out;
}

}  // namespace detail

/// Holonomy algebra estimate. Loops method: transport around shrinking
/// rectangles/triangles in seeded 2-planes and accumulate their logarithms
/// (shrinking further whenever a holonomy falls outside the log radius).
/// Curvature method: span of R(e_i, e_j) over frame pairs — a lower bound of
/// the algebra in general, exact for the constant-curvature catalog.
inline HolonomyEstimate holonomy_algebra_estimate(const ManifoldSpec& m, const Point& x,
                                                  int budget, std::uint64_t seed,
                                                  HolonomyMethod method,
                                                  double step = 1e-3) {
  if (budget < 1) throw std::invalid_argument("holonomy_algebra_estimate: budget >= 1");
  validate_point(m, x);
  const int md = m.dim();
  HolonomyEstimate est;
  est.base = x;
  est.method = method;
  est.dim_full = md * (md - 1) / 2;
  const Frame frame = random_orthonormal_frame(m, x, seed);
  const VectorXd eps = m.signature().j_diagonal();

  if (method == HolonomyMethod::Curvature) {
    est.exact_for_kind = m.constant_curvature().has_value();
    for (int i = 0; i < md && int(est.samples.size()) < budget; ++i)
      for (int j = i + 1; j < md && int(est.samples.size()) < budget; ++j) {
        const MatrixXd r = curvature_endomorphism(m, x, {x, frame.vectors.col(i)},
                                                  {x, frame.vectors.col(j)});
        MatrixXd rf(md, md);
        for (int a = 0; a < md; ++a)
          for (int b = 0; b < md; ++b)
            rf(a, b) = eps(a) * metric_inner(m, x, frame.vectors.col(a), r * frame.vectors.col(b));
        est.samples.push_back(std::move(rf));
      }
  } else {
    std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ULL);
    std::uniform_int_distribution<int> pick(0, md - 1);
    std::uniform_real_distribution<double> mix(-1.0, 1.0);
    int produced = 0;
    for (int count = 0; produced < budget && count < 4 * budget + 16; ++count) {
      // Cycle through frame pairs first, then randomized 2-planes.
      VectorXd a, b;
      if (count < est.dim_full) {
        int idx = count, i = 0, j = 1;
        for (i = 0; i < md; ++i) {
          if (idx < md - i - 1) {
            j = i + 1 + idx;
            break;
          }
          idx -= md - i - 1;
        }
        a = frame.vectors.col(i);
        b = frame.vectors.col(j);
      } else {
        a = frame.vectors * VectorXd::NullaryExpr(md, [&](int) { return mix(rng); });
        b = frame.vectors * VectorXd::NullaryExpr(md, [&](int) { return mix(rng); });
        if (a.norm() < 0.2 || b.norm() < 0.2) continue;
        a.normalize();
        b.normalize();
      }
      double side = 0.15;
      for (int attempt = 0; attempt < 6; ++attempt, side *= 0.5) {
        LoopSpec loop = LoopSpec::triangle(x, a, b, side);
        LorentzMatrix hol = loop_holonomy(m, loop, frame, step);
        if (detail::operator_norm(hol.matrix() - MatrixXd::Identity(md, md)) >= 0.45) continue;
        const MatrixXd lg = so_log(hol).matrix();
        if (lg.cwiseAbs().maxCoeff() < 1e-13) break;  // flat: nothing to collect
        est.samples.push_back(lg / (side * side));
        ++produced;
        break;
      }
      if (m.constant_curvature() && *m.constant_curvature() == 0.0 && count >= est.dim_full)
        break;  // flat: samples stay empty
    }
  }

  auto span = detail::matrix_span_rank(est.samples);
  est.rank = span.rank;
  for (auto& b : span.basis)
    est.algebra_basis.push_back(LieAlgebraElement::from(b, m.signature(), 1e-4));
  est.verdict = est.rank == 0 ? "trivial" : (est.rank == est.dim_full ? "full" : "partial");
  return est;
}

/// Rolling holonomy sample: rolls the configuration around closed base loops
/// and collects the fiber transporters, closed under products up to the
/// given word length (budget-capped). Words are signed 1-based loop indices.
struct RollingHolonomyEstimate {
  ConfigState base;
  Signature sig;
  std::vector<SEElement> samples;
  std::vector<std::vector<int>> words;
};

inline RollingHolonomyEstimate rolling_holonomy_sample(const ManifoldSpec& m,
                                                       const ConfigState& q,
                                                       const std::vector<LoopSpec>& loops,
                                                       double step = 1e-3, int word_length = 4,
                                                       int budget = 256,
                                                       std::uint64_t seed = 0) {
  validate_config(m, q);
  RollingHolonomyEstimate est;
  est.base = q;
  est.sig = m.signature();

  std::vector<SEElement> generators;
  for (const auto& loop : loops) {
    if ((loop.base.coords - q.x.coords).norm() > 1e-9 * std::max(1.0, q.x.coords.norm()))
      throw std::invalid_argument("rolling_holonomy_sample: loop not based at the configuration");
    const auto sides = realize_loop(m, loop, step);
    ConfigState state = q;
    for (const auto& side : sides) state = roll_flat(m, state, side).back();
    generators.push_back(fiber_transporter(m, q, state, 1e-6));
  }
  for (std::size_t i = 0; i < generators.size(); ++i) {
    est.samples.push_back(generators[i]);
    est.words.push_back({int(i) + 1});
  }

  // Bounded product closure: seeded random words over the generators and
  // their inverses.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  if (!generators.empty()) {
    std::uniform_int_distribution<int> letter(0, 2 * int(generators.size()) - 1);
    std::uniform_int_distribution<int> length(2, std::max(2, word_length));
    while (int(est.samples.size()) < budget) {
      const int len = length(rng);
      SEElement acc = SEElement::identity(est.sig);
      std::vector<int> word;
      for (int l = 0; l < len; ++l) {
        const int pick = letter(rng);
        const int idx = pick / 2;
        const bool inv = pick % 2;
        acc = se_compose(acc, inv ? se_inverse(generators[idx]) : generators[idx]);
        word.push_back(inv ? -(idx + 1) : idx + 1);
      }
      est.samples.push_back(std::move(acc));
      est.words.push_back(std::move(word));
    }
  }
  return est;
}

struct TranslationWitness {
  SEElement element;
  std::vector<int> word;
  double linear_defect = 0.0;      // ||C - I||
  double translation_norm = 0.0;   // Euclidean |y| (detection threshold)
  double translation_jnorm = 0.0;  // sqrt(|<y,y>_J|)
};

/// Scans sampled elements for a near-pure translation: ||C - I|| <= tol with
/// ||y|| >= 10 tol. Returns the witness with the shortest generating word
/// (largest translation on ties) or nothing — absence within the sampling
/// budget, never a proof.
inline std::optional<TranslationWitness> detect_pure_translation(
    const RollingHolonomyEstimate& est, double tol = 1e-6) {
  std::optional<TranslationWitness> best;
  std::size_t best_len = 0;
  const int md = est.sig.dim();
  for (std::size_t k = 0; k < est.samples.size(); ++k) {
    const SEElement& b = est.samples[k];
    const double defect = (b.c.matrix() - MatrixXd::Identity(md, md)).cwiseAbs().maxCoeff();
    const double ynorm = b.y.norm();
    if (defect > tol || ynorm < 10 * tol) continue;
    const std::size_t len = est.words[k].size();
    if (!best || len < best_len || (len == best_len && ynorm > best->translation_norm)) {
      best = TranslationWitness{b, est.words[k], defect, ynorm,
                                std::sqrt(std::abs(inner(b.y, b.y, est.sig)))};
      best_len = len;
    }
  }
  return best;
}

/// Outcome of the subgroup classification: with a full linear projection,
/// a detected pure translation upgrades the group to all of SE0(n,1); the
/// alternative is only ever "no translation detected within budget".
struct ClosureDemo {
  VectorXd target;
  int word_length = 0;
  double residual = 0.0;
};

struct ClassifyReport {
  enum class Verdict { FullSE, NoTranslationDetected, Inapplicable };
  Verdict verdict = Verdict::Inapplicable;
  int pr2_rank = 0;
  int dim_full = 0;
  std::optional<TranslationWitness> witness;
  std::vector<ClosureDemo> demos;
  int budget_used = 0;
  std::string note;
};

inline const char* to_string(ClassifyReport::Verdict v) {
  switch (v) {
    case ClassifyReport::Verdict::FullSE: return "FullSE";
    case ClassifyReport::Verdict::NoTranslationDetected: return "NoTranslationDetected";
    default: return "inapplicable";
  }
}

namespace detail {

// Lie rank of the algebra generated by the logs of the linear parts,
// closing under commutators. Linear parts far from the identity are pulled
// within the log radius by principal square roots.
inline int linear_part_lie_rank(const std::vector<SEElement>& gens, const Signature& sig) {
  const int md = sig.dim();
  std::vector<MatrixXd> algebra;
  for (const auto& g : gens) {
    MatrixXd c = g.c.matrix();
    bool ok = true;
    for (int i = 0; i < 40 && operator_norm(c - MatrixXd::Identity(md, md)) >= 0.45; ++i) {
      c = MatrixXd(c.sqrt());
      if (!c.allFinite()) {
        ok = false;
        break;
      }
    }
    if (!ok || operator_norm(c - MatrixXd::Identity(md, md)) >= 0.45) continue;
    MatrixXd lg = c.log();
    if (lg.cwiseAbs().maxCoeff() > 1e-12) algebra.push_back(lg);
  }
  if (algebra.empty()) return 0;
  const int full = md * (md - 1) / 2;
  int rank = matrix_span_rank(algebra).rank;
  for (int round = 0; round < full && rank < full; ++round) {
    const std::size_t count = algebra.size();
    bool grew = false;
    for (std::size_t a = 0; a < count && algebra.size() < 400; ++a)
      for (std::size_t b = a + 1; b < count && algebra.size() < 400; ++b) {
        MatrixXd comm = algebra[a] * algebra[b] - algebra[b] * algebra[a];
        if (comm.cwiseAbs().maxCoeff() > 1e-12) algebra.push_back(std::move(comm));
      }
    const int newrank = matrix_span_rank(algebra).rank;
    grew = newrank > rank;
    rank = newrank;
    if (!grew) break;
  }
  return rank;
}

}  // namespace detail

/// Classifies the subgroup generated by the given elements: FullSE as soon
/// as a bounded product yields a nontrivial pure translation (directly or by
/// two elements sharing a linear part with different translations), together
/// with constructive translation-closure words to one canonical target per
/// causal class; otherwise NoTranslationDetected with the budget report.
/// Inapplicable when the linear parts do not span the full algebra.
inline ClassifyReport classify_subgroup(const std::vector<SEElement>& generators, int budget,
                                        std::uint64_t seed = 0, double tol = 1e-6) {
  if (generators.empty()) throw std::invalid_argument("classify_subgroup: no generators");
  const Signature sig = generators.front().signature();
  if (sig.nu != 1 || sig.n < 2)
    throw std::invalid_argument("classify_subgroup: requires signature (n,1), n >= 2");
  const int md = sig.dim();
  ClassifyReport rep;
  rep.dim_full = md * (md - 1) / 2;
  rep.pr2_rank = detail::linear_part_lie_rank(generators, sig);
  if (rep.pr2_rank < rep.dim_full) {
    rep.verdict = ClassifyReport::Verdict::Inapplicable;
    rep.note = "pr2 not full (Lie rank " + std::to_string(rep.pr2_rank) + " < " +
               std::to_string(rep.dim_full) + "); dichotomy inapplicable";
    return rep;
  }

  std::mt19937_64 rng(seed ^ 0x6a09e667f3bcc909ULL);
  std::uniform_int_distribution<int> letter(0, 2 * int(generators.size()) - 1);
  std::uniform_int_distribution<int> length(1, 6);
  std::optional<TranslationWitness> witness;

  // Quantized linear parts seen so far, for the equal-C different-y check.
  std::vector<std::pair<MatrixXd, SEElement>> seen;
  auto consider = [&](const SEElement& b, const std::vector<int>& word) {
    const double defect = (b.c.matrix() - MatrixXd::Identity(md, md)).cwiseAbs().maxCoeff();
    if (defect <= tol && b.y.norm() >= 10 * tol) {
      if (!witness || b.y.norm() > witness->translation_norm)
        witness = TranslationWitness{b, word, defect, b.y.norm(),
                                     std::sqrt(std::abs(inner(b.y, b.y, sig)))};
      return;
    }
    for (const auto& [cmat, other] : seen) {
      if ((b.c.matrix() - cmat).cwiseAbs().maxCoeff() <= tol &&
          (b.y - other.y).norm() >= 10 * tol) {
        // b o other^-1 is a pure translation by roughly y_b - y_other.
        const SEElement t = se_compose(b, se_inverse(other));
        if (!witness || t.y.norm() > witness->translation_norm)
          witness = TranslationWitness{t, word,
                                       (t.c.matrix() - MatrixXd::Identity(md, md)).cwiseAbs().maxCoeff(),
                                       t.y.norm(), std::sqrt(std::abs(inner(t.y, t.y, sig)))};
        return;
      }
    }
    if (seen.size() < 1024) seen.push_back({b.c.matrix(), b});
  };

  for (std::size_t i = 0; i < generators.size(); ++i)
    consider(generators[i], {int(i) + 1});
  for (int used = int(generators.size()); used < budget && !witness; ++used) {
    const int len = length(rng);
    SEElement acc = SEElement::identity(sig);
    std::vector<int> word;
    for (int l = 0; l < len; ++l) {
      const int pick = letter(rng);
      const int idx = pick / 2;
      const bool inv = pick % 2;
      acc = se_compose(acc, inv ? se_inverse(generators[idx]) : generators[idx]);
      word.push_back(inv ? -(idx + 1) : idx + 1);
    }
    consider(acc, word);
    rep.budget_used = used + 1;
  }

  if (!witness) {
    rep.verdict = ClassifyReport::Verdict::NoTranslationDetected;
    rep.note = "no pure translation within " + std::to_string(budget) +
               " sampled products (not a proof of absence)";
    return rep;
  }

  rep.verdict = ClassifyReport::Verdict::FullSE;
  rep.witness = witness;
  // Constructive demonstration: closure words to one canonical target per
  // causal class, wrapped with a seeded-random section (the composition is
  // independent of the section's translation parts).
  Section section = [seed](const LorentzMatrix& a) {
    std::mt19937_64 r(seed ^ std::hash<double>{}(a.matrix().sum()));
    std::normal_distribution<double> g;
    VectorXd w(a.dim());
    for (int i = 0; i < w.size(); ++i) w(i) = g(r);
    return SEElement{w, a};
  };
  std::vector<VectorXd> targets;
  targets.push_back(VectorXd::Unit(md, 0));                          // spacelike
  targets.push_back(VectorXd::Unit(md, md - 1));                     // timelike
  targets.push_back(VectorXd::Unit(md, 0) + VectorXd::Unit(md, md - 1));  // lightlike
  for (const auto& u : targets) {
    const auto word = translation_closure_word(witness->element.y, u, section, sig);
    const SEElement total = compose_word(word, sig);
    ClosureDemo demo;
    demo.target = u;
    demo.word_length = int(word.size());
    demo.residual = std::max((total.y - u).norm(),
                             (total.c.matrix() - MatrixXd::Identity(md, md)).cwiseAbs().maxCoeff());
    rep.demos.push_back(std::move(demo));
  }
  return rep;
}

/// Three-valued controllability verdict: rank falls short of so(n,1) —
/// not controllable (necessity); full rank plus a rolling pure-translation
/// witness — controllable; full rank without a witness within budget — the
/// honest inconclusive verdict. For nu >= 2 only the necessity direction is
/// available and a full rank reports as inconclusive.
struct ControllabilityReport {
  enum class Verdict { ControllableWitnessed, NotControllable, FullHolonomyNoTranslationWitness };
  Verdict verdict = Verdict::NotControllable;
  HolonomyEstimate holonomy;
  std::optional<TranslationWitness> witness;
  int budget = 0;
  std::uint64_t seed = 0;
  std::string note;
};

inline const char* to_string(ControllabilityReport::Verdict v) {
  switch (v) {
    case ControllabilityReport::Verdict::ControllableWitnessed: return "ControllableWitnessed";
    case ControllabilityReport::Verdict::NotControllable: return "NotControllable";
    default: return "FullHolonomyNoTranslationWitness";
  }
}

namespace detail {

// Loop battery for the witness search: closed geodesics on the quadrics
// (spacelike directions close on S, timelike on H, period 2 pi r), plus
// shrinking rectangles elsewhere and as filler.
inline std::vector<LoopSpec> witness_loops(const ManifoldSpec& m, const Point& x, int budget,
                                           std::uint64_t seed, double step) {
  std::vector<LoopSpec> loops;
  const int md = m.dim();
  const Frame f = random_orthonormal_frame(m, x, seed);
  if (m.embedded()) {
    const double r = m.radius();
    std::vector<int> closing_dirs;
    if (m.kind() == ManifoldKind::PseudoSphere)
      for (int i = 0; i < m.signature().n; ++i) closing_dirs.push_back(i);
    if (m.kind() == ManifoldKind::PseudoHyperbolic)
      for (int i = m.signature().n; i < md; ++i) closing_dirs.push_back(i);
    for (int idx : closing_dirs) {
      if (int(loops.size()) >= budget) break;
      const Tangent dir{x, f.vectors.col(idx)};
      loops.push_back(LoopSpec::explicit_loop(geodesic(m, x, dir, 2 * M_PI * r, step)));
    }
  }
  for (int i = 0; i < md && int(loops.size()) < budget; ++i)
    for (int j = i + 1; j < md && int(loops.size()) < budget; ++j)
      loops.push_back(LoopSpec::rect(x, i, j, 0.2));
  return loops;
}

}  // namespace detail

inline ControllabilityReport controllability_verdict(const ManifoldSpec& m, const Point& x0,
                                                     int budget, std::uint64_t seed,
                                                     double step = 1e-3) {
  ControllabilityReport rep;
  rep.budget = budget;
  rep.seed = seed;
  rep.holonomy = holonomy_algebra_estimate(m, x0, std::max(budget, 16), seed,
                                           HolonomyMethod::Curvature, step);
  if (rep.holonomy.rank < rep.holonomy.dim_full) {
    rep.verdict = ControllabilityReport::Verdict::NotControllable;
    rep.note = "holonomy rank " + std::to_string(rep.holonomy.rank) + " < " +
               std::to_string(rep.holonomy.dim_full) +
               " (not completely controllable if the estimate is exact" +
               std::string(rep.holonomy.exact_for_kind ? "; exact for this catalog kind)" : ")");
    return rep;
  }
  if (m.signature().nu != 1) {
    rep.verdict = ControllabilityReport::Verdict::FullHolonomyNoTranslationWitness;
    rep.note = "nu >= 2: only the necessity direction applies; full rank is inconclusive";
    return rep;
  }

  ConfigState q0;
  q0.x = x0;
  q0.frame_m = random_orthonormal_frame(m, x0, seed);
  q0.xhat = VectorXd::Zero(m.dim());
  q0.frame_hat = MatrixXd::Identity(m.dim(), m.dim());

  const auto loops = detail::witness_loops(m, x0, std::max(2, budget / 4), seed, step);
  const auto sample = rolling_holonomy_sample(m, q0, loops, step, 4, std::max<int>(budget, int(loops.size())), seed);
  rep.witness = detect_pure_translation(sample, 1e-6);
  if (rep.witness) {
    // Re-validate rather than resample: the witness element must satisfy the
    // thresholds on its own.
    const int md = m.dim();
    const double defect =
        (rep.witness->element.c.matrix() - MatrixXd::Identity(md, md)).cwiseAbs().maxCoeff();
    if (defect <= 1e-6 && rep.witness->element.y.norm() >= 1e-5) {
      rep.verdict = ControllabilityReport::Verdict::ControllableWitnessed;
      rep.note = "pure translation witness with |y| = " + std::to_string(rep.witness->translation_norm);
      return rep;
    }
  }
  rep.verdict = ControllabilityReport::Verdict::FullHolonomyNoTranslationWitness;
  rep.note = "full holonomy rank but no pure translation within budget " + std::to_string(budget);
  return rep;
}

}  // namespace lorroll
