// lorroll: rolling Lorentzian manifolds on flat pseudo-Euclidean space.
// Subcommands integrate geodesics, compute developments and rolling curves,
// estimate holonomy, classify SE0(n,1) subgroups, and decide the three-valued
// controllability verdict. Reports are seeded and deterministic.

#include <lorroll/holonomy.hpp>
#include <lorroll/manifold.hpp>
#include <lorroll/rolling.hpp>
#include <lorroll/serialize.hpp>
#include <lorroll/transport.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace lorroll;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInconclusive = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("LORROLL_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string cell;
  std::istringstream is(text);
  while (std::getline(is, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

VectorXd parse_vector(const std::string& text) {
  const auto vals = parse_number_list(text);
  return Eigen::Map<const VectorXd>(vals.data(), int(vals.size()));
}

// Manifold shorthand `kind:params`, a JSON file path, or inline JSON.
ManifoldSpec parse_manifold(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("manifold: empty specification");
  if (text.front() == '{') return manifold_from_json(json::parse(text));
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "flat" || head == "s" || head == "sphere" || head == "h" || head == "hyperbolic") {
    if (colon == std::string::npos)
      throw std::invalid_argument("manifold: '" + head + "' needs parameters, e.g. " + head + ":2,1");
    const auto params = parse_number_list(text.substr(colon + 1));
    if (head == "flat") {
      if (params.size() != 2) throw std::invalid_argument("manifold: flat:n,nu");
      return ManifoldSpec::flat(int(params[0]), int(params[1]));
    }
    const double r = params.size() > 2 ? params[2] : 1.0;
    if (params.size() < 2) throw std::invalid_argument("manifold: " + head + ":n,nu[,r]");
    if (head == "s" || head == "sphere")
      return ManifoldSpec::pseudo_sphere(int(params[0]), int(params[1]), r);
    return ManifoldSpec::pseudo_hyperbolic(int(params[0]), int(params[1]), r);
  }
  if (text == "clifton-pohl" || text == "cp") return ManifoldSpec::clifton_pohl();
  return manifold_from_json(json::parse(read_file(text)));
}

Point default_point(const ManifoldSpec& m) {
  const int cd = m.coord_dim();
  VectorXd p = VectorXd::Zero(cd);
  if (m.kind() == ManifoldKind::PseudoSphere) p(0) = m.radius();
  if (m.kind() == ManifoldKind::PseudoHyperbolic) p(cd - 1) = m.radius();
  if (m.kind() == ManifoldKind::CliftonPohl) p(0) = 1.0;
  return {p};
}

Point parse_point(const ManifoldSpec& m, const std::string& text) {
  if (text.empty()) return default_point(m);
  Point p{parse_vector(text)};
  validate_point(m, p, 1e-6);
  return p;
}

// Curve input: a CSV file path or the builtin family `geodesic:X;V;T`.
Curve parse_curve(const ManifoldSpec& m, const std::string& text, double step) {
  if (text.rfind("geodesic:", 0) == 0) {
    std::istringstream is(text.substr(9));
    std::string xs, vs, ts;
    if (!std::getline(is, xs, ';') || !std::getline(is, vs, ';') || !std::getline(is, ts, ';'))
      throw std::invalid_argument("curve: expected geodesic:x1,..;v1,..;T");
    const Point x{parse_vector(xs)};
    const Tangent v{x, parse_vector(vs)};
    return geodesic(m, x, v, std::stod(ts), step);
  }
  Curve c = curve_from_csv(read_file(text), m);
  ensure_velocities(c);
  return c;
}

// Loop input: `rect:i,j,s`, `triangle:scale`, or `geodesic:X;V;T` (explicit).
LoopSpec parse_loop(const ManifoldSpec& m, const Point& base, const std::string& text,
                    double step) {
  if (text.rfind("rect:", 0) == 0) {
    const auto params = parse_number_list(text.substr(5));
    if (params.size() != 3) throw std::invalid_argument("loop: rect:i,j,side");
    return LoopSpec::rect(base, int(params[0]), int(params[1]), params[2]);
  }
  if (text.rfind("geodesic:", 0) == 0)
    return LoopSpec::explicit_loop(parse_curve(m, text, step));
  throw std::invalid_argument("loop: unknown family '" + text + "'");
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_file(out_path, content);
}

struct CommonOpts {
  std::string manifold;
  std::string out;
  std::string format;
  double step = 1e-3;
  double tol = 1e-6;
  std::uint64_t seed = default_seed();
  int budget = 64;
};

void add_common(CLI::App* cmd, CommonOpts& o, const std::string& default_format) {
  o.format = default_format;
  cmd->add_option("--manifold", o.manifold, "manifold: flat:n,nu | s:n,nu[,r] | h:n,nu[,r] | clifton-pohl | JSON file/inline")
      ->required();
  cmd->add_option("--out", o.out, "output path (default: stdout)");
  cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--step", o.step, "integrator step")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", o.tol, "detection tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "RNG seed (default: LORROLL_SEED or 0)");
  cmd->add_option("--budget", o.budget, "sampling budget")->check(CLI::Range(1, 1 << 24));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rolling Lorentzian manifolds on flat space: holonomy and controllability"};
  app.require_subcommand(1);

  // geodesic
  auto* cmd_geo = app.add_subcommand("geodesic", "integrate a geodesic; CSV trajectory");
  CommonOpts geo;
  std::string geo_x, geo_v;
  double geo_T = 1.0;
  bool geo_probe = false;
  double geo_tmax = 100.0;
  add_common(cmd_geo, geo, "csv");
  cmd_geo->add_option("--x", geo_x, "start point (comma list; default: canonical base)");
  cmd_geo->add_option("--v", geo_v, "initial velocity (comma list)");
  cmd_geo->add_option("--T", geo_T, "parameter horizon")->check(CLI::PositiveNumber);
  cmd_geo->add_flag("--probe", geo_probe, "run the completeness probe and emit diagnostic JSON");
  cmd_geo->add_option("--tmax", geo_tmax, "probe horizon")->check(CLI::PositiveNumber);

  // develop
  auto* cmd_dev = app.add_subcommand("develop", "development of a curve; CSV in frame coords");
  CommonOpts dev;
  std::string dev_curve;
  add_common(cmd_dev, dev, "csv");
  cmd_dev->add_option("--curve", dev_curve, "curve: CSV file or geodesic:x;v;T")->required();

  // roll
  auto* cmd_roll = app.add_subcommand("roll", "roll the manifold along a curve");
  CommonOpts roll;
  std::string roll_curve, roll_target, roll_xhat;
  add_common(cmd_roll, roll, "csv");
  cmd_roll->add_option("--curve", roll_curve, "curve: CSV file or geodesic:x;v;T")->required();
  cmd_roll->add_option("--target", roll_target, "target manifold (default: flat R^{n,1})");
  cmd_roll->add_option("--xhat", roll_xhat, "initial target point (comma list; default 0/base)");

  // holonomy
  auto* cmd_hol = app.add_subcommand("holonomy", "holonomy algebra rank estimate (JSON)");
  CommonOpts hol;
  std::string hol_x, hol_method = "curvature";
  add_common(cmd_hol, hol, "json");
  cmd_hol->add_option("--x", hol_x, "base point (default: canonical base)");
  cmd_hol->add_option("--method", hol_method, "loops | curvature")
      ->check(CLI::IsMember({"loops", "curvature"}));

  // classify-group
  auto* cmd_cls = app.add_subcommand("classify-group", "SE0(n,1) subgroup dichotomy (JSON)");
  std::string cls_generators, cls_out;
  std::uint64_t cls_seed = default_seed();
  int cls_budget = 10000;
  double cls_tol = 1e-6;
  cmd_cls->add_option("--generators", cls_generators, "JSON file: [{\"y\": [...], \"C\": [[...]]}, ...]")
      ->required();
  cmd_cls->add_option("--out", cls_out, "output path (default: stdout)");
  cmd_cls->add_option("--seed", cls_seed, "RNG seed");
  cmd_cls->add_option("--budget", cls_budget, "product sampling budget")->check(CLI::Range(1, 1 << 24));
  cmd_cls->add_option("--tol", cls_tol, "pure-translation tolerance")->check(CLI::PositiveNumber);

  // controllability
  auto* cmd_ctl = app.add_subcommand("controllability", "three-valued controllability verdict (JSON)");
  CommonOpts ctl;
  std::string ctl_x;
  add_common(cmd_ctl, ctl, "json");
  cmd_ctl->add_option("--x", ctl_x, "base point (default: canonical base)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_geo) {
      const ManifoldSpec m = parse_manifold(geo.manifold);
      const Point x = parse_point(m, geo_x);
      VectorXd v;
      if (geo_v.empty()) {
        v = reference_frame(m, x).vectors.col(0);
      } else {
        v = parse_vector(geo_v);
      }
      if (geo_probe) {
        const auto rep = completeness_probe(m, x, {x, v}, geo_tmax);
        emit(geo.out, probe_to_json(rep).dump(2) + "\n");
        return kExitOk;
      }
      try {
        const Curve c = geodesic(m, x, {x, v}, geo_T, geo.step);
        emit(geo.out, geo.format == "json" ? curve_to_json(c).dump(2) + "\n" : curve_to_csv(c));
      } catch (const BlowupError& e) {
        std::cerr << "error: " << e.what() << " (rerun with --probe for a diagnostic report)\n";
        return kExitError;
      }
      return kExitOk;
    }

    if (*cmd_dev) {
      const ManifoldSpec m = parse_manifold(dev.manifold);
      const Curve c = parse_curve(m, dev_curve, dev.step);
      const DevelopmentCurve d = develop(m, c);
      if (dev.format == "json") {
        json j;
        j["schema"] = kSchemaVersion;
        j["t"] = d.grid;
        json vals = json::array();
        for (const auto& vv : d.values) vals.push_back(vector_to_json(vv));
        j["values"] = std::move(vals);
        emit(dev.out, j.dump(2) + "\n");
      } else {
        emit(dev.out, development_to_csv(d));
      }
      return kExitOk;
    }

    if (*cmd_roll) {
      const ManifoldSpec m = parse_manifold(roll.manifold);
      const Curve c = parse_curve(m, roll_curve, roll.step);
      const ManifoldSpec target =
          roll_target.empty() ? flat_target(m) : parse_manifold(roll_target);
      ConfigState q0;
      q0.x = {c.points.front()};
      q0.frame_m = random_orthonormal_frame(m, q0.x, roll.seed);
      if (target.kind() == ManifoldKind::Flat && roll_xhat.empty()) {
        q0.xhat = VectorXd::Zero(target.dim());
        q0.frame_hat = MatrixXd::Identity(target.dim(), target.dim());
      } else {
        const Point xh = parse_point(target, roll_xhat);
        q0.xhat = xh.coords;
        q0.frame_hat = random_orthonormal_frame(target, xh, roll.seed ^ 0x9e37ULL).vectors;
      }
      const RollingCurve rc = roll_general(m, target, q0, c);
      std::string payload;
      if (roll.format == "json") {
        json j;
        j["schema"] = kSchemaVersion;
        j["manifold"] = manifold_to_json(m);
        j["target"] = manifold_to_json(target);
        j["t"] = rc.grid;
        json xs = json::array(), hats = json::array(), frames = json::array();
        for (const auto& s : rc.states) {
          xs.push_back(vector_to_json(s.x.coords));
          hats.push_back(vector_to_json(s.xhat));
          frames.push_back(matrix_to_json(s.frame_hat));
        }
        j["x"] = std::move(xs);
        j["xhat"] = std::move(hats);
        j["frameHat"] = std::move(frames);
        if (rc.escaped_at) j["escapedAt"] = *rc.escaped_at;
        payload = j.dump(2) + "\n";
      } else {
        payload = rolling_to_csv(rc);
      }
      emit(roll.out, payload);
      if (rc.escaped_at) {
        std::cerr << "note: rolling escaped at t = " << *rc.escaped_at
                  << " (incomplete target); partial curve emitted\n";
        return kExitInconclusive;
      }
      return kExitOk;
    }

    if (*cmd_hol) {
      const ManifoldSpec m = parse_manifold(hol.manifold);
      const Point x = parse_point(m, hol_x);
      const auto method =
          hol_method == "loops" ? HolonomyMethod::Loops : HolonomyMethod::Curvature;
      const auto est = holonomy_algebra_estimate(m, x, hol.budget, hol.seed, method, hol.step);
      emit(hol.out, estimate_to_json(est, hol.budget, hol.seed).dump(2) + "\n");
      return kExitOk;
    }

    if (*cmd_cls) {
      const json spec = json::parse(read_file(cls_generators));
      if (!spec.is_array() || spec.empty())
        throw std::invalid_argument("generators: expected a non-empty JSON array at /");
      std::vector<SEElement> gens;
      for (const auto& g : spec) {
        if (!g.contains("y") || !g.contains("C"))
          throw std::invalid_argument("generators: each element needs keys at /y and /C");
        const MatrixXd c = matrix_from_json(g.at("C"));
        const Signature sig{int(c.rows()) - 1, 1};
        gens.push_back({vector_from_json(g.at("y")), LorentzMatrix::from(c, sig, 1e-7)});
      }
      const auto rep = classify_subgroup(gens, cls_budget, cls_seed, cls_tol);
      emit(cls_out, classify_to_json(rep, cls_budget, cls_seed).dump(2) + "\n");
      if (rep.verdict == ClassifyReport::Verdict::Inapplicable) {
        std::cerr << "error: " << rep.note << "\n";
        return kExitError;
      }
      return rep.verdict == ClassifyReport::Verdict::FullSE ? kExitOk : kExitInconclusive;
    }

    if (*cmd_ctl) {
      const ManifoldSpec m = parse_manifold(ctl.manifold);
      const Point x = parse_point(m, ctl_x);
      const auto rep = controllability_verdict(m, x, ctl.budget, ctl.seed, ctl.step);
      emit(ctl.out, controllability_to_json(rep).dump(2) + "\n");
      return rep.verdict == ControllabilityReport::Verdict::FullHolonomyNoTranslationWitness
                 ? kExitInconclusive
                 : kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
