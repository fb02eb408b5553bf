// Acceptance suite: one binary, one pass/fail line per criterion, nonzero
// exit if any criterion fails. All tolerances and budgets are pinned here.

#include <lorroll/holonomy.hpp>
#include <lorroll/manifold.hpp>
#include <lorroll/rolling.hpp>
#include <lorroll/serialize.hpp>
#include <lorroll/transport.hpp>

#include "support/oracles.hpp"
#include "support/random.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace lorroll;
using lorroll_test::Rng;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

const ManifoldSpec flat21 = ManifoldSpec::flat(2, 1);
const ManifoldSpec s21 = ManifoldSpec::pseudo_sphere(2, 1, 1.0);
const ManifoldSpec h21 = ManifoldSpec::pseudo_hyperbolic(2, 1, 1.0);
const ManifoldSpec cp = ManifoldSpec::clifton_pohl();

Point pt(std::initializer_list<double> c) {
  VectorXd v(int(c.size()));
  int i = 0;
  for (double x : c) v(i++) = x;
  return {v};
}

Point base_point(const ManifoldSpec& m) {
  if (m.kind() == ManifoldKind::PseudoSphere) {
    VectorXd p = VectorXd::Zero(m.coord_dim());
    p(0) = m.radius();
    return {p};
  }
  if (m.kind() == ManifoldKind::PseudoHyperbolic) {
    VectorXd p = VectorXd::Zero(m.coord_dim());
    p(m.coord_dim() - 1) = m.radius();
    return {p};
  }
  if (m.kind() == ManifoldKind::CliftonPohl) return pt({1.0, 0.2});
  return {VectorXd::Zero(m.coord_dim())};
}

Curve random_curve(const ManifoldSpec& m, Rng& rng, int samples, double amplitude = 0.2) {
  const Point x0 = base_point(m);
  const int cd = m.coord_dim();
  for (;;) {
    std::vector<VectorXd> a(2);
    for (auto& v : a) v = rng.vector(cd, amplitude);
    VectorXd drift = rng.vector(cd, amplitude);
    Curve c;
    c.manifold = m;
    c.grid.resize(samples);
    c.points.resize(samples);
    bool safe = true;
    for (int k = 0; k < samples && safe; ++k) {
      const double t = double(k) / (samples - 1);
      c.grid[k] = t;
      VectorXd p = x0.coords + drift * t;
      for (int f = 0; f < 2; ++f) p += a[f] * std::sin((f + 1) * M_PI * t) / ((f + 1) * (f + 1));
      if (m.embedded()) {
        const double target = m.quadric_sign() * m.radius() * m.radius();
        const double pp = inner(p, p, m.ambient_signature());
        // Redraw when the perturbation drifts toward the null cone of the
        // ambient form (the ray projection degenerates there).
        if (pp * target < 0.3 * target * target) {
          safe = false;
          break;
        }
        p *= std::sqrt(target / pp);
      }
      c.points[k] = p;
    }
    if (!safe) continue;
    ensure_velocities(c);
    return c;
  }
}

Tangent random_tangent(const ManifoldSpec& m, const Point& x, Rng& rng) {
  VectorXd v = rng.vector(m.coord_dim());
  if (m.embedded()) v = tangent_project(m, x, v).vec;
  return {x, v};
}

ConfigState identity_config(const ManifoldSpec& m, const Point& x, std::uint64_t seed) {
  ConfigState q;
  q.x = x;
  q.frame_m = random_orthonormal_frame(m, x, seed);
  q.xhat = VectorXd::Zero(m.dim());
  q.frame_hat = MatrixXd::Identity(m.dim(), m.dim());
  return q;
}

SEElement random_se(const Signature& sig, Rng& rng) {
  MatrixXd alg = MatrixXd::Zero(sig.dim(), sig.dim());
  for (const auto& b : so_basis(sig)) alg += rng.gauss(0.6) * b.matrix();
  return {rng.vector(sig.dim()), so_exp(LieAlgebraElement::from(alg, sig))};
}

// --- criteria ---------------------------------------------------------------

// 1. Transport isometry: 200 seeded (curve, vector pair) cases across the
//    catalog, max |<Pv,Pw> - <v,w>| <= 1e-8 at step 1e-3, under 60 s.
void criterion_1() {
  Timer timer;
  Rng rng(1001);
  double worst = 0;
  const std::array<ManifoldSpec, 4> catalog{flat21, s21, h21, cp};
  for (int i = 0; i < 200; ++i) {
    const ManifoldSpec& m = catalog[i % catalog.size()];
    const Curve c = random_curve(m, rng, 1001);
    const Point x0{c.points.front()};
    const Tangent v = random_tangent(m, x0, rng);
    const Tangent w = random_tangent(m, x0, rng);
    const Frame f0 = reference_frame(m, x0);
    const auto frames = transport_frame_along(m, c, f0);
    const VectorXd pv = frames.back() * frame_coords(m, f0, v.vec);
    const VectorXd pw = frames.back() * frame_coords(m, f0, w.vec);
    const double before = metric_inner(m, x0, v.vec, w.vec);
    const double after = metric_inner(m, {c.points.back()}, pv, pw);
    worst = std::max(worst, std::abs(after - before));
  }
  const double secs = timer.seconds();
  std::ostringstream det;
  det << "max drift " << worst << ", " << secs << " s";
  report(1, worst <= 1e-8 && secs < 60.0, "transport isometry on 200 seeded cases", det.str());
}

// 2. Integrator order: endpoint error vs closed forms shrinks by [8, 32]
//    under step halving on S^{2,1}(1) and H^{2,1}(1), 20 seeded cases.
void criterion_2() {
  Rng rng(1002);
  int checked = 0;
  double lo = 1e9, hi = 0;
  bool ok = true;
  while (checked < 20) {
    const ManifoldSpec& m = (checked % 2 == 0) ? s21 : h21;
    const Point p0 = base_point(m);
    Tangent v = random_tangent(m, p0, rng);
    if (v.vec.norm() < 0.5 || v.vec.norm() > 2.5) continue;
    const double T = 2.0;
    const VectorXd want = lorroll_test::quadric_geodesic(m, p0.coords, v.vec, T);
    const double e1 = (geodesic(m, p0, v, T, 4e-2).points.back() - want).norm();
    const double e2 = (geodesic(m, p0, v, T, 2e-2).points.back() - want).norm();
    if (e2 < 1e-13) continue;
    const double ratio = e1 / e2;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ok = ok && ratio >= 8.0 && ratio <= 32.0;
    ++checked;
  }
  std::ostringstream det;
  det << "error ratios in [" << lo << ", " << hi << "]";
  report(2, ok, "4th-order convergence on 20 closed-form geodesics", det.str());
}

// 3. Holonomy rank table with the curvature method, loops agreeing on the
//    nu = 1 cases; each run under 30 s.
void criterion_3() {
  struct Row {
    ManifoldSpec m;
    Point x;
    int rank;
    bool check_loops;
  };
  const std::vector<Row> table{
      {flat21, base_point(flat21), 0, true},
      {s21, base_point(s21), 3, true},
      {h21, base_point(h21), 3, true},
      {ManifoldSpec::pseudo_sphere(3, 1, 1.0), pt({1, 0, 0, 0, 0}), 6, true},
      {ManifoldSpec::pseudo_hyperbolic(2, 2, 1.0), pt({0, 0, 0, 0, 1}), 6, false},
  };
  bool ok = true;
  double slowest = 0;
  std::ostringstream det;
  for (const auto& row : table) {
    Timer timer;
    const auto curv = holonomy_algebra_estimate(row.m, row.x, 16, 3, HolonomyMethod::Curvature);
    bool match = curv.rank == row.rank;
    if (row.check_loops) {
      const auto loops = holonomy_algebra_estimate(row.m, row.x, 12, 3, HolonomyMethod::Loops);
      match = match && loops.rank == row.rank;
    }
    slowest = std::max(slowest, timer.seconds());
    ok = ok && match && timer.seconds() < 30.0;
    det << to_string(row.m.kind()) << "(" << row.m.signature().n << "," << row.m.signature().nu
        << ")=" << curv.rank << " ";
  }
  det << "slowest " << slowest << " s";
  report(3, ok, "holonomy rank table (curvature + loops)", det.str());
}

// 4. Equivariance of the action with rolling on 50 seeded triples, sup
//    discrepancy <= 1e-6.
void criterion_4() {
  Rng rng(1004);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const ConfigState q0 = identity_config(s21, base_point(s21), 2000 + i);
    const SEElement b = random_se(s21.signature(), rng);
    const Curve c = random_curve(s21, rng, 801);
    const RollingCurve direct = roll_flat(s21, se_act(b, q0), c);
    const RollingCurve moved = roll_flat(s21, q0, c);
    for (int k = 0; k < direct.samples(); k += 50) {
      const ConfigState lhs = se_act(b, moved.states[k]);
      const ConfigState& rhs = direct.states[k];
      worst = std::max({worst, (lhs.xhat - rhs.xhat).norm(),
                        (lhs.frame_hat - rhs.frame_hat).cwiseAbs().maxCoeff()});
    }
  }
  std::ostringstream det;
  det << "sup discrepancy " << worst;
  report(4, worst <= 1e-6, "se_act and roll_flat commute on 50 seeded triples", det.str());
}

// 5. Fiber action: transporter residual <= 1e-10 on 100 seeded same-fiber
//    pairs; identity recovered for qbar = q.
void criterion_5() {
  Rng rng(1005);
  double worst = 0;
  bool ok = true;
  const Point x = base_point(s21);
  for (int i = 0; i < 100; ++i) {
    ConfigState a = identity_config(s21, x, 3000 + i);
    ConfigState b = identity_config(s21, x, 4000 + i);
    a.xhat = rng.vector(3);
    b.xhat = rng.vector(3);
    a.frame_hat = random_se(s21.signature(), rng).c.matrix();
    b.frame_hat = random_se(s21.signature(), rng).c.matrix();
    const SEElement t = fiber_transporter(s21, a, b, 1e-10);
    const ConfigState moved = se_act(t, a);
    double resid = (moved.xhat - b.xhat).norm();
    for (int col = 0; col < 3; ++col)
      resid = std::max(resid, (config_apply(s21, moved, b.frame_m.vectors.col(col)) -
                               b.frame_hat.col(col))
                                  .norm());
    worst = std::max(worst, resid);
  }
  const ConfigState q = identity_config(s21, x, 99);
  const SEElement id = fiber_transporter(s21, q, q);
  ok = ok && id.y.norm() <= 1e-12 &&
       (id.c.matrix() - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12;
  std::ostringstream det;
  det << "max residual " << worst;
  report(5, ok && worst <= 1e-10, "fiber transporter on 100 seeded pairs + identity", det.str());
}

// 6. Translation closure words compose to the target within 1e-8, for 100
//    seeded targets per causal class of the seed translation, under 30 s.
void criterion_6() {
  Timer timer;
  Rng rng(1006);
  const Signature sig{2, 1};
  auto section = [](const LorentzMatrix& a) {
    std::mt19937_64 r(std::hash<double>{}(a.matrix()(0, 0)) ^ 0x77ull);
    std::normal_distribution<double> g;
    VectorXd w(a.dim());
    for (int i = 0; i < w.size(); ++i) w(i) = g(r);
    return SEElement{w, a};
  };
  double worst = 0;
  for (const Causal kind : {Causal::Spacelike, Causal::Timelike, Causal::Lightlike}) {
    for (int i = 0; i < 100; ++i) {
      VectorXd v;
      for (;;) {
        v = rng.vector(3);
        if (v.head(2).norm() < 0.3) continue;
        if (kind == Causal::Spacelike) v(2) = 0.4 * v.head(2).norm();
        if (kind == Causal::Timelike) v(2) = (i % 2 ? 1 : -1) * (v.head(2).norm() + 0.4);
        if (kind == Causal::Lightlike) v(2) = (i % 2 ? 1 : -1) * v.head(2).norm();
        if (causal_character(v, sig, 1e-12).kind == kind) break;
      }
      const VectorXd u = rng.vector(3, 1.3);
      const auto word = translation_closure_word(v, u, section, sig);
      const SEElement total = compose_word(word, sig);
      worst = std::max({worst, (total.y - u).norm(),
                        (total.c.matrix() - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff()});
    }
  }
  const double secs = timer.seconds();
  std::ostringstream det;
  det << "max composition error " << worst << ", " << secs << " s";
  report(6, worst <= 1e-8 && secs < 30.0,
         "translation closure words, 100 targets per causal class", det.str());
}

// 7. Pure-translation witness: closed spacelike geodesic on S^{2,1}(1) gives
//    ||C - I|| <= 1e-6 and |y|_J = 2 pi +/- 1e-4, agreeing at two
//    integration resolutions.
void criterion_7() {
  const Point x = base_point(s21);
  const ConfigState q0 = identity_config(s21, x, 7);
  std::array<double, 2> jnorms{};
  bool ok = true;
  int idx = 0;
  for (double step : {1e-3, 5e-4}) {
    const Tangent dir{x, Eigen::Vector4d(0, 1, 0, 0)};
    const Curve loop = geodesic(s21, x, dir, 2 * M_PI, step);
    const RollingCurve rc = roll_flat(s21, q0, loop);
    const SEElement b = fiber_transporter(s21, q0, rc.back(), 1e-6);
    const double defect = (b.c.matrix() - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff();
    const double jnorm = std::sqrt(std::abs(inner(b.y, b.y, s21.signature())));
    jnorms[idx++] = jnorm;
    ok = ok && defect <= 1e-6 && std::abs(jnorm - 2 * M_PI) <= 1e-4;
  }
  ok = ok && std::abs(jnorms[0] - jnorms[1]) <= 1e-4;
  std::ostringstream det;
  det << "|y|_J = " << jnorms[0] << " and " << jnorms[1];
  report(7, ok, "closed-geodesic pure-translation witness at two resolutions", det.str());
}

// 8. Controllability pipeline verdicts and the fixed-point-embedded group at
//    budget 10^4 products.
void criterion_8() {
  bool ok = true;
  std::ostringstream det;
  const auto vf = controllability_verdict(flat21, base_point(flat21), 16, 8);
  ok = ok && vf.verdict == ControllabilityReport::Verdict::NotControllable;
  det << "flat=" << to_string(vf.verdict);
  const auto vs = controllability_verdict(s21, base_point(s21), 16, 8);
  ok = ok && vs.verdict == ControllabilityReport::Verdict::ControllableWitnessed;
  det << " s21=" << to_string(vs.verdict);
  const auto vh = controllability_verdict(h21, base_point(h21), 16, 8);
  ok = ok && vh.verdict == ControllabilityReport::Verdict::ControllableWitnessed;
  det << " h21=" << to_string(vh.verdict);

  const Signature sig{2, 1};
  const VectorXd x0 = Eigen::Vector3d(0.4, -0.3, 0.2);
  std::vector<SEElement> gens;
  for (const auto& b : so_basis(sig))
    gens.push_back(fixed_point_embedding(x0, so_exp(LieAlgebraElement::from(0.3 * b.matrix(), sig))));
  const auto rep = classify_subgroup(gens, 10000, 8);
  ok = ok && rep.verdict == ClassifyReport::Verdict::NoTranslationDetected;
  det << " fixed-point=" << to_string(rep.verdict);
  report(8, ok, "controllability pipeline verdicts", det.str());
}

// 9. Development round trips <= 1e-6 on 50 seeded curves per catalog
//    manifold; Clifton-Pohl null probe blow-up stable to 1% under halving.
void criterion_9() {
  Rng rng(1009);
  double worst = 0;
  const std::array<ManifoldSpec, 4> catalog{flat21, s21, h21, cp};
  for (const auto& m : catalog) {
    for (int i = 0; i < 50; ++i) {
      const Curve c = random_curve(m, rng, 2001);
      const Frame f0 = reference_frame(m, {c.points.front()});
      const DevelopmentCurve dev = develop(m, c, f0);
      const auto back = antidevelop(m, {c.points.front()}, f0, dev);
      if (back.escaped_at) {
        worst = 1.0;
        break;
      }
      for (int k = 0; k < c.samples(); k += 10)
        worst = std::max(worst, (back.curve.points[k] - c.points[k]).norm());
      const DevelopmentCurve dev2 = develop(m, back.curve, f0);
      for (int k = 0; k < dev.samples(); k += 10)
        worst = std::max(worst, (dev2.values[k] - dev.values[k]).norm());
    }
  }
  // Probe stability: two adaptive runs starting from different step scales.
  const auto p1 = completeness_probe(cp, pt({1, 0}), {pt({1, 0}), Eigen::Vector2d(1, 0)}, 10.0);
  const auto p2 = completeness_probe(cp, pt({1, 0}), {pt({1, 0}), Eigen::Vector2d(1, 0)}, 5.0);
  const bool probe_ok = !p1.reached && !p2.reached &&
                        std::abs(p1.t_star - p2.t_star) <= 0.01 * std::max(p1.t_star, p2.t_star);
  std::ostringstream det;
  det << "sup round-trip error " << worst << ", t* = " << p1.t_star << " / " << p2.t_star;
  report(9, worst <= 1e-6 && probe_ok, "development round trips + blow-up stability", det.str());
}

// 10. CLI determinism: repeated runs with a fixed seed emit byte-identical
//     JSON.
void criterion_10() {
  const char* cli = std::getenv("LORROLL_CLI");
  if (!cli) {
    report(10, false, "CLI determinism", "LORROLL_CLI not set");
    return;
  }
  auto capture = [&](const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args;
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf;
    std::size_t got;
    while (pipe && (got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
      out.append(buf.data(), got);
    if (pipe) pclose(pipe);
    return out;
  };
  bool ok = true;
  for (const std::string args :
       {std::string("controllability --manifold s:2,1,1 --seed 5 --budget 16"),
        std::string("holonomy --manifold h:2,1,1 --method loops --seed 5 --budget 8"),
        std::string("classify-group --generators /tmp/lorroll_acc_gens.json --budget 300 --seed 5")}) {
    if (args.find("classify") == 0) {
      // generator file for the classify run
      nlohmann::json gens = nlohmann::json::array();
      nlohmann::json t;
      t["y"] = {1.0, 0.0, 0.0};
      t["C"] = matrix_to_json(MatrixXd::Identity(3, 3));
      gens.push_back(t);
      for (const auto& b : so_basis(Signature{2, 1})) {
        nlohmann::json g;
        g["y"] = {0.0, 0.0, 0.0};
        g["C"] =
            matrix_to_json(so_exp(LieAlgebraElement::from(0.3 * b.matrix(), Signature{2, 1})).matrix());
        gens.push_back(g);
      }
      write_file("/tmp/lorroll_acc_gens.json", gens.dump());
    }
    const std::string a = capture(args);
    const std::string b = capture(args);
    ok = ok && !a.empty() && a == b;
  }
  report(10, ok, "CLI determinism (byte-identical JSON)", ok ? "3 commands stable" : "mismatch");
}

}  // namespace

int main() {
  const std::array<std::pair<int, void (*)()>, 10> criteria{{{1, criterion_1},
                                                             {2, criterion_2},
                                                             {3, criterion_3},
                                                             {4, criterion_4},
                                                             {5, criterion_5},
                                                             {6, criterion_6},
                                                             {7, criterion_7},
                                                             {8, criterion_8},
                                                             {9, criterion_9},
                                                             {10, criterion_10}}};
  for (const auto& [num, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(num, false, "uncaught exception", e.what());
    }
  }
  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
