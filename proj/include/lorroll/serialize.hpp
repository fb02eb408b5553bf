#pragma once

// CSV and JSON emission for curves, developments, rolling curves, holonomy
// estimates, and verdict reports. JSON reports are schema-versioned with
// "schema": "lorroll/v1"; CSV uses a header row, comma separators, and '.'
// decimals. Deterministic for fixed inputs.

#include <lorroll/holonomy.hpp>
#include <lorroll/manifold.hpp>
#include <lorroll/rolling.hpp>
#include <lorroll/transport.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lorroll {

inline constexpr const char* kSchemaVersion = "lorroll/v1";

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline nlohmann::json vector_to_json(const VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

/// Row-major nested arrays.
inline nlohmann::json matrix_to_json(const MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline VectorXd vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  VectorXd v(int(j.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

inline MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a JSON array of rows");
  const int rows = int(j.size());
  const int cols = int(j.at(0).size());
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
  return m;
}

/// CSV: t, x1..xd [, v1..vd].
inline std::string curve_to_csv(const Curve& c) {
  std::ostringstream os;
  const int d = int(c.points.front().size());
  os << "t";
  for (int i = 0; i < d; ++i) os << ",x" << (i + 1);
  const bool vel = !c.velocities.empty();
  if (vel)
    for (int i = 0; i < d; ++i) os << ",v" << (i + 1);
  os << "\n";
  for (int k = 0; k < c.samples(); ++k) {
    os << detail::fmt_double(c.grid[k]);
    for (int i = 0; i < d; ++i) os << "," << detail::fmt_double(c.points[k](i));
    if (vel)
      for (int i = 0; i < d; ++i) os << "," << detail::fmt_double(c.velocities[k](i));
    os << "\n";
  }
  return os.str();
}

inline Curve curve_from_csv(const std::string& text, const ManifoldSpec& m) {
  Curve c;
  c.manifold = m;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("curve CSV: empty input");
  int columns = 1;
  for (char ch : line) columns += ch == ',';
  const int d = m.coord_dim();
  const bool vel = columns >= 1 + 2 * d;
  if (columns < 1 + d) throw std::invalid_argument("curve CSV: too few columns for the manifold");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (int(vals.size()) < 1 + d) throw std::invalid_argument("curve CSV: short row");
    c.grid.push_back(vals[0]);
    c.points.push_back(Eigen::Map<const VectorXd>(vals.data() + 1, d));
    if (vel && int(vals.size()) >= 1 + 2 * d)
      c.velocities.push_back(Eigen::Map<const VectorXd>(vals.data() + 1 + d, d));
  }
  if (c.velocities.size() != c.grid.size()) c.velocities.clear();
  return c;
}

inline std::string development_to_csv(const DevelopmentCurve& dev) {
  std::ostringstream os;
  const int d = int(dev.values.front().size());
  os << "t";
  for (int i = 0; i < d; ++i) os << ",c" << (i + 1);
  for (int i = 0; i < d; ++i) os << ",cdot" << (i + 1);
  os << "\n";
  for (int k = 0; k < dev.samples(); ++k) {
    os << detail::fmt_double(dev.grid[k]);
    for (int i = 0; i < d; ++i) os << "," << detail::fmt_double(dev.values[k](i));
    for (int i = 0; i < d; ++i) os << "," << detail::fmt_double(dev.velocities[k](i));
    os << "\n";
  }
  return os.str();
}

/// CSV: t, x coords, xhat coords, flattened frame_hat (row major).
inline std::string rolling_to_csv(const RollingCurve& rc) {
  std::ostringstream os;
  const int bd = int(rc.states.front().x.coords.size());
  const int hd = int(rc.states.front().xhat.size());
  const int md = int(rc.states.front().frame_hat.cols());
  os << "t";
  for (int i = 0; i < bd; ++i) os << ",x" << (i + 1);
  for (int i = 0; i < hd; ++i) os << ",xhat" << (i + 1);
  for (int r = 0; r < hd; ++r)
    for (int cidx = 0; cidx < md; ++cidx) os << ",A" << (r + 1) << (cidx + 1);
  os << "\n";
  for (int k = 0; k < rc.samples(); ++k) {
    const ConfigState& s = rc.states[k];
    os << detail::fmt_double(rc.grid[k]);
    for (int i = 0; i < bd; ++i) os << "," << detail::fmt_double(s.x.coords(i));
    for (int i = 0; i < hd; ++i) os << "," << detail::fmt_double(s.xhat(i));
    for (int r = 0; r < hd; ++r)
      for (int cidx = 0; cidx < md; ++cidx) os << "," << detail::fmt_double(s.frame_hat(r, cidx));
    os << "\n";
  }
  return os.str();
}

inline nlohmann::json curve_to_json(const Curve& c) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["manifold"] = manifold_to_json(c.manifold);
  j["t"] = c.grid;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : c.points) pts.push_back(vector_to_json(p));
  j["points"] = std::move(pts);
  if (!c.velocities.empty()) {
    nlohmann::json vels = nlohmann::json::array();
    for (const auto& v : c.velocities) vels.push_back(vector_to_json(v));
    j["velocities"] = std::move(vels);
  }
  return j;
}

inline nlohmann::json witness_to_json(const TranslationWitness& w) {
  nlohmann::json j;
  j["y"] = vector_to_json(w.element.y);
  j["C"] = matrix_to_json(w.element.c.matrix());
  j["word"] = w.word;
  j["linearDefect"] = w.linear_defect;
  j["normJ"] = w.translation_jnorm;
  return j;
}

inline nlohmann::json estimate_to_json(const HolonomyEstimate& est, int budget,
                                       std::uint64_t seed) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["rank"] = est.rank;
  j["dimFull"] = est.dim_full;
  j["method"] = to_string(est.method);
  j["verdict"] = est.verdict;
  j["exactForKind"] = est.exact_for_kind;
  j["budget"] = budget;
  j["seed"] = seed;
  j["base"] = vector_to_json(est.base.coords);
  j["witnesses"] = nlohmann::json::array();
  return j;
}

inline nlohmann::json classify_to_json(const ClassifyReport& rep, int budget,
                                       std::uint64_t seed) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["verdict"] = to_string(rep.verdict);
  j["pr2Rank"] = rep.pr2_rank;
  j["dimFull"] = rep.dim_full;
  j["budget"] = budget;
  j["seed"] = seed;
  j["note"] = rep.note;
  j["witnesses"] = nlohmann::json::array();
  if (rep.witness) j["witnesses"].push_back(witness_to_json(*rep.witness));
  nlohmann::json demos = nlohmann::json::array();
  for (const auto& d : rep.demos) {
    nlohmann::json dj;
    dj["target"] = vector_to_json(d.target);
    dj["wordLength"] = d.word_length;
    dj["residual"] = d.residual;
    demos.push_back(std::move(dj));
  }
  j["closureDemos"] = std::move(demos);
  return j;
}

inline nlohmann::json controllability_to_json(const ControllabilityReport& rep) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["verdict"] = to_string(rep.verdict);
  j["rank"] = rep.holonomy.rank;
  j["dimFull"] = rep.holonomy.dim_full;
  j["method"] = to_string(rep.holonomy.method);
  j["budget"] = rep.budget;
  j["seed"] = rep.seed;
  j["note"] = rep.note;
  j["witnesses"] = nlohmann::json::array();
  if (rep.witness) j["witnesses"].push_back(witness_to_json(*rep.witness));
  return j;
}

inline nlohmann::json probe_to_json(const ProbeReport& rep) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["reached"] = rep.reached;
  j["tStar"] = rep.t_star;
  j["tMax"] = rep.tmax;
  j["note"] = rep.note;
  j["heuristic"] = true;
  return j;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace lorroll
