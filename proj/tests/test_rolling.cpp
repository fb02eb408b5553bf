#include <catch2/catch_amalgamated.hpp>

#include <lorroll/rolling.hpp>

#include "support/oracles.hpp"
#include "support/random.hpp"

#include <cmath>

using namespace lorroll;
using lorroll_test::Rng;

namespace {

const ManifoldSpec flat21 = ManifoldSpec::flat(2, 1);
const ManifoldSpec s21 = ManifoldSpec::pseudo_sphere(2, 1, 1.0);

Point pt(std::initializer_list<double> c) {
  VectorXd v(int(c.size()));
  int i = 0;
  for (double x : c) v(i++) = x;
  return {v};
}

const Point s21_p = pt({1, 0, 0, 0});

Curve random_curve(const ManifoldSpec& m, const Point& x0, Rng& rng, int samples = 2001,
                   double amplitude = 0.2, double tmax = 1.0) {
  const int cd = m.coord_dim();
  std::vector<VectorXd> a(2);
  for (auto& v : a) v = rng.vector(cd, amplitude);
  VectorXd drift = rng.vector(cd, amplitude);
  Curve c;
  c.manifold = m;
  c.grid.resize(samples);
  c.points.resize(samples);
  for (int k = 0; k < samples; ++k) {
    const double t = tmax * double(k) / (samples - 1);
    c.grid[k] = t;
    VectorXd p = x0.coords + drift * t;
    for (int f = 0; f < 2; ++f) p += a[f] * std::sin((f + 1) * M_PI * t) / ((f + 1) * (f + 1));
    if (m.embedded()) {
      const double target = m.quadric_sign() * m.radius() * m.radius();
      p *= std::sqrt(target / inner(p, p, m.ambient_signature()));
    }
    c.points[k] = p;
  }
  ensure_velocities(c);
  return c;
}

// Configuration with a seeded frame on M and a seeded SO0 frame on the target.
ConfigState make_config(const ManifoldSpec& m, const Point& x, std::uint64_t seed,
                        bool random_linear_part = true) {
  ConfigState q;
  q.x = x;
  q.frame_m = random_orthonormal_frame(m, x, seed);
  const Signature sig = m.signature();
  q.xhat = VectorXd::Zero(sig.dim());
  if (random_linear_part) {
    Rng rng(seed ^ 0xabcdef);
    MatrixXd alg = MatrixXd::Zero(sig.dim(), sig.dim());
    for (const auto& b : so_basis(sig)) alg += rng.gauss(0.5) * b.matrix();
    q.frame_hat = so_exp(LieAlgebraElement::from(alg, sig)).matrix();
  } else {
    q.frame_hat = MatrixXd::Identity(sig.dim(), sig.dim());
  }
  return q;
}

double config_distance(const ConfigState& a, const ConfigState& b) {
  return std::max({(a.x.coords - b.x.coords).norm(), (a.xhat - b.xhat).norm(),
                   (a.frame_m.vectors - b.frame_m.vectors).cwiseAbs().maxCoeff(),
                   (a.frame_hat - b.frame_hat).cwiseAbs().maxCoeff()});
}

SEElement random_se(const Signature& sig, Rng& rng) {
  MatrixXd alg = MatrixXd::Zero(sig.dim(), sig.dim());
  for (const auto& b : so_basis(sig)) alg += rng.gauss(0.6) * b.matrix();
  return {rng.vector(sig.dim()), so_exp(LieAlgebraElement::from(alg, sig))};
}

}  // namespace

TEST_CASE("se_act on configurations") {
  Rng rng(5);
  const ConfigState q = make_config(s21, s21_p, 7);
  SECTION("identity acts trivially") {
    CHECK(config_distance(se_act(SEElement::identity(s21.signature()), q), q) == 0.0);
  }
  SECTION("pure translation moves xhat only") {
    const VectorXd v = rng.vector(3);
    const ConfigState moved = se_act(SEElement::translation(v, s21.signature()), q);
    CHECK((moved.xhat - (q.xhat + v)).norm() == 0.0);
    CHECK((moved.frame_hat - q.frame_hat).cwiseAbs().maxCoeff() == 0.0);
    CHECK((moved.x.coords - q.x.coords).norm() == 0.0);
  }
  SECTION("left action law") {
    for (int i = 0; i < 20; ++i) {
      const SEElement b1 = random_se(s21.signature(), rng), b2 = random_se(s21.signature(), rng);
      CHECK(config_distance(se_act(b1, se_act(b2, q)), se_act(se_compose(b1, b2), q)) <= 1e-12);
    }
  }
  SECTION("action preserves the configuration invariants") {
    const SEElement b = random_se(s21.signature(), rng);
    CHECK_NOTHROW(validate_config(s21, se_act(b, q)));
  }
}

TEST_CASE("roll_flat on a flat base keeps the linear part constant") {
  Rng rng(11);
  const Point x0 = pt({0.1, -0.2, 0.3});
  const ConfigState q0 = make_config(flat21, x0, 3);
  const Curve c = random_curve(flat21, x0, rng);
  const RollingCurve rc = roll_flat(flat21, q0, c);
  for (int k = 0; k < rc.samples(); k += 200) {
    CHECK((rc.states[k].frame_hat - q0.frame_hat).cwiseAbs().maxCoeff() <= 1e-9);
    // xhat(t) = xhat0 + A0 (gamma(t) - gamma(0)) with A0 read through frames.
    const VectorXd want = q0.xhat + config_apply(flat21, q0, c.points[k] - c.points.front());
    CHECK((rc.states[k].xhat - want).norm() <= 2e-6);
  }
}

TEST_CASE("constant curve rolls to a constant configuration") {
  const ConfigState q0 = make_config(s21, s21_p, 17);
  Curve c;
  c.manifold = s21;
  for (int k = 0; k <= 16; ++k) {
    c.grid.push_back(k / 16.0);
    c.points.push_back(s21_p.coords);
    c.velocities.push_back(VectorXd::Zero(4));
  }
  const RollingCurve rc = roll_flat(s21, q0, c);
  for (const auto& s : rc.states) CHECK(config_distance(s, q0) <= 1e-12);
}

TEST_CASE("closed spacelike geodesic produces a pure translation of length 2 pi") {
  const ConfigState q0 = make_config(s21, s21_p, 23);
  const Tangent dir{s21_p, Eigen::Vector4d(0, 1, 0, 0)};
  const Curve loop = geodesic(s21, s21_p, dir, 2 * M_PI, 1e-3);
  const RollingCurve rc = roll_flat(s21, q0, loop);
  const ConfigState& last = rc.back();
  CHECK((last.x.coords - s21_p.coords).norm() <= 1e-8);
  // Linear part returns to A0.
  CHECK((last.frame_m.vectors - q0.frame_m.vectors).cwiseAbs().maxCoeff() <= 1e-7);
  CHECK((last.frame_hat - q0.frame_hat).cwiseAbs().maxCoeff() == 0.0);
  // Translation has J-norm 2 pi.
  const VectorXd y = last.xhat - q0.xhat;
  CHECK_THAT(std::sqrt(std::abs(inner(y, y, s21.signature()))),
             Catch::Matchers::WithinAbs(2 * M_PI, 1e-6));
}

TEST_CASE("roll_general") {
  Rng rng(31);
  SECTION("flat target agrees with roll_flat") {
    const ConfigState q0 = make_config(s21, s21_p, 41);
    const Curve c = random_curve(s21, s21_p, rng);
    const RollingCurve a = roll_flat(s21, q0, c);
    const RollingCurve b = roll_general(s21, flat_target(s21), q0, c);
    REQUIRE(a.samples() == b.samples());
    for (int k = 0; k < a.samples(); k += 200)
      CHECK(config_distance(a.states[k], b.states[k]) <= 1e-9);
  }
  SECTION("a space rolling on itself follows its own curve") {
    ConfigState q0;
    q0.x = s21_p;
    q0.frame_m = random_orthonormal_frame(s21, s21_p, 43);
    q0.xhat = s21_p.coords;
    q0.frame_hat = q0.frame_m.vectors;
    const Curve c = random_curve(s21, s21_p, rng);
    const RollingCurve rc = roll_general(s21, s21, q0, c);
    REQUIRE(!rc.escaped_at);
    for (int k = 0; k < rc.samples(); k += 200) {
      CHECK((rc.states[k].xhat - c.points[k]).norm() <= 1e-6);
      CHECK((rc.states[k].frame_hat - rc.states[k].frame_m.vectors).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
  SECTION("flat base rolling on the pseudosphere closes along a matched segment") {
    // Straight spacelike segment of length 2 pi whose image direction is a
    // unit spacelike tangent: the target curve is a closed geodesic.
    ConfigState q0;
    q0.x = pt({0, 0, 0});
    q0.frame_m = reference_frame(flat21, q0.x);
    q0.xhat = s21_p.coords;
    q0.frame_hat = random_orthonormal_frame(s21, s21_p, 47).vectors;
    const VectorXd dir = q0.frame_m.vectors.col(0);  // maps to frame_hat col 0, spacelike unit
    Curve seg;
    seg.manifold = flat21;
    const int n = 6000;
    for (int k = 0; k <= n; ++k) {
      const double t = 2 * M_PI * k / n;
      seg.grid.push_back(double(k) / n);
      seg.points.push_back(q0.x.coords + t * dir);
      seg.velocities.push_back(2 * M_PI * dir);
    }
    const RollingCurve rc = roll_general(flat21, s21, q0, seg);
    REQUIRE(!rc.escaped_at);
    CHECK((rc.back().xhat - s21_p.coords).norm() <= 1e-5);
  }
  SECTION("rolling operator identity: frames transport consistently") {
    const ConfigState q0 = make_config(s21, s21_p, 53);
    const Curve c = random_curve(s21, s21_p, rng);
    const RollingCurve rc = roll_flat(s21, q0, c);
    // Independently transport a tangent vector and map it through A(t);
    // compare with transporting its image in the flat target (identity).
    const VectorXd v = q0.frame_m.vectors * Eigen::Vector3d(0.3, -0.2, 0.5);
    const auto [pv, res] = parallel_transport(s21, c, {s21_p, v}, q0.frame_m);
    const VectorXd lhs = config_apply(s21, rc.back(), pv.vec);
    const VectorXd rhs = config_apply(s21, q0, v);  // flat transport is trivial
    CHECK((lhs - rhs).norm() <= 1e-7);
  }
}

TEST_CASE("fiber transporter") {
  Rng rng(61);
  const ConfigState q = make_config(s21, s21_p, 71);
  SECTION("same configuration gives the identity") {
    const SEElement b = fiber_transporter(s21, q, q);
    CHECK(b.y.norm() <= 1e-12);
    CHECK((b.c.matrix() - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SECTION("recovers a known group element") {
    for (int i = 0; i < 20; ++i) {
      const SEElement b = random_se(s21.signature(), rng);
      const SEElement rec = fiber_transporter(s21, q, se_act(b, q));
      CHECK((rec.y - b.y).norm() <= 1e-10 * std::max(1.0, b.y.norm()));
      CHECK((rec.c.matrix() - b.c.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
  SECTION("random same-fiber pairs") {
    for (int i = 0; i < 20; ++i) {
      const ConfigState a = make_config(s21, s21_p, 100 + i);
      ConfigState b = make_config(s21, s21_p, 200 + i);
      b.xhat = rng.vector(3);
      const SEElement t = fiber_transporter(s21, a, b);
      // The moved state equals b as an isometry even though the frame pairs
      // differ; compare by applying both to b's base frame.
      const ConfigState moved = se_act(t, a);
      CHECK((moved.xhat - b.xhat).norm() <= 1e-10);
      for (int col = 0; col < 3; ++col)
        CHECK((config_apply(s21, moved, b.frame_m.vectors.col(col)) - b.frame_hat.col(col)).norm() <=
              1e-10);
    }
  }
  SECTION("different base points rejected") {
    ConfigState far = make_config(s21, pt({std::sqrt(2.0), 0, 0, 1}), 3);
    CHECK_THROWS_AS(fiber_transporter(s21, q, far), std::invalid_argument);
  }
}

TEST_CASE("equivariance: the action commutes with rolling") {
  Rng rng(83);
  for (int i = 0; i < 5; ++i) {
    const ConfigState q0 = make_config(s21, s21_p, 300 + i);
    const SEElement b = random_se(s21.signature(), rng);
    const Curve c = random_curve(s21, s21_p, rng);
    const RollingCurve direct = roll_flat(s21, se_act(b, q0), c);
    const RollingCurve moved = roll_flat(s21, q0, c);
    double sup = 0;
    for (int k = 0; k < direct.samples(); k += 100)
      sup = std::max(sup, config_distance(se_act(b, moved.states[k]), direct.states[k]));
    CHECK(sup <= 1e-6);
  }
}

TEST_CASE("concatenation: rolling resumes from the intermediate state") {
  Rng rng(97);
  const Curve whole = random_curve(s21, s21_p, rng, 2001, 0.2, 2.0);
  const int mid = 1000;
  Curve first, second;
  first.manifold = second.manifold = s21;
  first.grid.assign(whole.grid.begin(), whole.grid.begin() + mid + 1);
  first.points.assign(whole.points.begin(), whole.points.begin() + mid + 1);
  first.velocities.assign(whole.velocities.begin(), whole.velocities.begin() + mid + 1);
  second.grid.assign(whole.grid.begin() + mid, whole.grid.end());
  second.points.assign(whole.points.begin() + mid, whole.points.end());
  second.velocities.assign(whole.velocities.begin() + mid, whole.velocities.end());

  const ConfigState q0 = make_config(s21, s21_p, 111);
  const RollingCurve full = roll_flat(s21, q0, whole);
  const RollingCurve part1 = roll_flat(s21, q0, first);
  const RollingCurve part2 = roll_flat(s21, part1.back(), second);
  CHECK(config_distance(part2.back(), full.back()) <= 1e-8);
}

TEST_CASE("constraint residuals") {
  Rng rng(131);
  const ConfigState q0 = make_config(s21, s21_p, 141);
  const Curve c = random_curve(s21, s21_p, rng, 4001);
  const RollingCurve rc = roll_flat(s21, q0, c);
  SECTION("rolled curves satisfy no-slip and no-twist") {
    const auto res = constraint_residuals(rc);
    CHECK(res.slip <= 1e-6);
    CHECK(res.twist <= 1e-6);
  }
  SECTION("frozen target point violates no-slip") {
    RollingCurve bad = rc;
    for (auto& s : bad.states) s.xhat = q0.xhat;
    const auto res = constraint_residuals(bad);
    double vmax = 0;
    for (const auto& v : c.velocities) vmax = std::max(vmax, v.norm());
    CHECK(res.slip > 0.1 * vmax);
  }
  SECTION("time-dependent rotation of the images violates no-twist") {
    RollingCurve bad = rc;
    for (int k = 0; k < bad.samples(); ++k) {
      const double th = bad.grid[k];
      MatrixXd rot = MatrixXd::Identity(3, 3);
      rot(0, 0) = std::cos(th);
      rot(1, 1) = std::cos(th);
      rot(0, 1) = -std::sin(th);
      rot(1, 0) = std::sin(th);
      bad.states[k].frame_hat = rot * bad.states[k].frame_hat;
      bad.states[k].xhat = rot * bad.states[k].xhat;
    }
    const auto res = constraint_residuals(bad);
    CHECK(res.twist > 0.1);
  }
}

TEST_CASE("configuration validation rejects mismatched orientation classes") {
  ConfigState q = make_config(s21, s21_p, 151, /*random_linear_part=*/false);
  CHECK_NOTHROW(validate_config(s21, q));
  q.frame_hat.col(0) *= -1.0;  // orientation-reversing A
  CHECK_THROWS_AS(validate_config(s21, q), std::invalid_argument);
}
