#pragma once
// File formats: measures (CSV/JSON), polytope and classification exports,
// entropy grids, MLE records, ray diagnostics and LP certificates.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergx/enumerate.hpp"
#include "ergx/error.hpp"
#include "ergx/family.hpp"
#include "ergx/geometry.hpp"
#include "ergx/limits.hpp"
#include "ergx/lp.hpp"
#include "ergx/mle.hpp"
#include "ergx/rational.hpp"

namespace ergx::io {

using nlohmann::json;

/// Shortest round-trip decimal form.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

/// Support of a measure as it travels between tools. g and the statistic
/// names are known for JSON files and enumerations, not for bare CSV.
struct MeasureTable {
  std::optional<int> g;
  std::vector<std::string> stats;
  std::vector<IntVec> points;  // lexicographically sorted, distinct
  std::vector<std::uint64_t> counts;

  int k() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }

  ExpFamily family() const {
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(points.size()), k());
    for (std::size_t i = 0; i < points.size(); ++i)
      for (int a = 0; a < k(); ++a) pts(static_cast<Eigen::Index>(i), a) = static_cast<double>(points[i][static_cast<std::size_t>(a)]);
    return ExpFamily(std::move(pts), counts, points);
  }

  void validate() const {
    if (points.empty()) throw InfeasibleInput("measure has no support points");
    if (points.size() != counts.size()) throw InfeasibleInput("measure needs one count per point");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != points.front().size()) throw InfeasibleInput("measure rows have different dimensions");
      if (counts[i] == 0) throw InfeasibleInput("measure counts must be positive");
      if (i > 0 && !(points[i - 1] < points[i])) throw InfeasibleInput("measure rows must be distinct and sorted lexicographically");
    }
  }
};

inline MeasureTable to_table(const InducedMeasure& m) {
  MeasureTable t;
  t.g = m.g();
  for (const auto& s : m.stats()) t.stats.push_back(s.name());
  for (auto& [p, c] : m.support()) {
    t.points.push_back(p);
    t.counts.push_back(c);
  }
  return t;
}

inline void write_measure_csv(std::ostream& os, const MeasureTable& m) {
  for (int a = 1; a <= m.k(); ++a) os << 't' << a << ',';
  os << "count\n";
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    for (auto v : m.points[i]) os << v << ',';
    os << m.counts[i] << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw InfeasibleInput(std::string("bad ") + what + " '" + s + "'");
  return v;
}

inline std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace detail

inline MeasureTable read_measure_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InfeasibleInput("measure CSV is empty");
  const auto header = detail::split(detail::trim(line));
  if (header.size() < 2 || header.back() != "count") throw InfeasibleInput("measure CSV header must be t1,...,tk,count");
  for (std::size_t a = 0; a + 1 < header.size(); ++a)
    if (header[a] != "t" + std::to_string(a + 1)) throw InfeasibleInput("measure CSV header must be t1,...,tk,count");
  const std::size_t k = header.size() - 1;
  MeasureTable m;
  while (std::getline(is, line)) {
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto cells = detail::split(line);
    if (cells.size() != k + 1) throw InfeasibleInput("measure CSV row has " + std::to_string(cells.size()) + " fields, expected " + std::to_string(k + 1));
    IntVec t;
    for (std::size_t a = 0; a < k; ++a) t.push_back(detail::parse_number<std::int64_t>(cells[a], "statistic value"));
    m.points.push_back(std::move(t));
    m.counts.push_back(detail::parse_number<std::uint64_t>(cells[k], "count"));
  }
  m.validate();
  return m;
}

inline json measure_json(const MeasureTable& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.points.size(); ++i) rows.push_back({{"t", m.points[i]}, {"count", std::to_string(m.counts[i])}});
  json j;
  j["g"] = m.g ? json(*m.g) : json(nullptr);
  j["stats"] = m.stats;
  j["total"] = std::to_string(m.total());
  j["rows"] = std::move(rows);
  return j;
}

inline MeasureTable measure_from_json(const json& j) {
  try {
    MeasureTable m;
    if (j.contains("g") && !j.at("g").is_null()) m.g = j.at("g").get<int>();
    if (j.contains("stats")) m.stats = j.at("stats").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
      m.points.push_back(r.at("t").get<IntVec>());
      const auto& c = r.at("count");
      m.counts.push_back(c.is_string() ? detail::parse_number<std::uint64_t>(c.get<std::string>(), "count") : c.get<std::uint64_t>());
    }
    m.validate();
    if (j.contains("total") && detail::parse_number<std::uint64_t>(j.at("total").get<std::string>(), "total") != m.total())
      throw InfeasibleInput("measure JSON total does not match its rows");
    return m;
  } catch (const json::exception& e) {
    throw InfeasibleInput(std::string("malformed measure JSON: ") + e.what());
  }
}

/// Loads a measure file; ".json" selects the JSON variant, anything else CSV.
inline MeasureTable load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InfeasibleInput("cannot open measure file '" + path + "'");
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InfeasibleInput("malformed measure JSON: " + std::string(e.what()));
    }
    return measure_from_json(j);
  }
  return read_measure_csv(in);
}

inline json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Eigen::VectorXd(m.row(r).transpose())));
  return a;
}

inline json to_json(const RationalVec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

inline json polytope_json(const SupportPolytope& p, const std::vector<Face>& faces, const NormalFan& fan) {
  json j;
  j["k"] = p.k;
  j["vertices"] = p.vertices;
  j["hrep"] = json::array();
  for (const auto& h : p.hrep) j["hrep"].push_back({{"a", h.a}, {"b", h.b}});
  j["faces"] = json::array();
  for (const auto& f : faces) {
    json members = json::array();
    for (int m : f.members) members.push_back(p.support_points[static_cast<std::size_t>(m)]);
    j["faces"].push_back({{"id", f.id}, {"dim", f.dim}, {"active_rows", f.active_rows}, {"members", std::move(members)}});
  }
  j["fan"] = json::array();
  for (const auto& c : fan.cones) {
    json lin = json::array();
    for (const auto& b : c.lin_basis) lin.push_back(to_json(b));
    j["fan"].push_back({{"face_id", c.face_id}, {"generators", c.generators}, {"lin_basis", std::move(lin)}});
  }
  return j;
}

/// t1..tk,count,face_id,dim,boundary for every support point.
inline void write_classification_csv(std::ostream& os, const MeasureTable& m, const SupportPolytope& p) {
  for (int a = 1; a <= m.k(); ++a) os << 't' << a << ',';
  os << "count,face_id,dim,boundary\n";
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    auto loc = classify_point(p, m.points[i]);
    if (!loc) throw NumericalFailure("support point outside its own hull");
    for (auto v : m.points[i]) os << v << ',';
    os << m.counts[i] << ',' << loc->face_id << ',' << loc->dim << ',' << (loc->dim < p.k ? 1 : 0) << '\n';
  }
}

inline json face_family_json(const FaceFamily& ff) {
  json lin = json::array();
  for (const auto& b : ff.lin_basis) lin.push_back(to_json(b));
  return {{"face_id", ff.face_id}, {"dim", ff.dim}, {"members", ff.family.int_points()}, {"lin_basis", std::move(lin)}};
}

inline void write_grid_csv(std::ostream& os, const EntropyGrid& g) {
  os << "theta1,theta2,psi,mu1,mu2,entropy\n";
  for (const auto& c : g.cells)
    os << fmt(c.theta[0]) << ',' << fmt(c.theta[1]) << ',' << fmt(c.psi) << ',' << fmt(c.mean[0]) << ',' << fmt(c.mean[1]) << ',' << fmt(c.entropy) << '\n';
}

inline json grid_json(const EntropyGrid& g) {
  json cells = json::array();
  for (const auto& c : g.cells) cells.push_back({c.theta[0], c.theta[1], c.psi, c.mean[0], c.mean[1], c.entropy});
  return {{"box", {g.box.lo1, g.box.hi1, g.box.lo2, g.box.hi2}},
          {"res", {g.n1, g.n2}},
          {"order", "row-major; theta1 varies fastest"},
          {"columns", {"theta1", "theta2", "psi", "mu1", "mu2", "entropy"}},
          {"cells", std::move(cells)}};
}

inline json mle_json(const ExtendedMleResult& r) {
  json lin = json::array();
  for (const auto& b : r.lin_basis) lin.push_back(to_json(b));
  json x = json::array();
  for (const auto& c : r.x) x.push_back(to_double(c));
  return {{"x", std::move(x)},
          {"exists", r.dim == static_cast<int>(r.x.size())},
          {"face_id", r.face_id},
          {"dim", r.dim},
          {"theta_rep", to_json(r.canonical_rep)},
          {"theta_rep_convention", "component orthogonal to lin_basis"},
          {"lin_basis", std::move(lin)},
          {"residual", r.residual},
          {"entropy", r.entropy},
          {"fisher_eigenvalues", to_json(r.fisher_eigenvalues)}};
}

inline void write_diagnostics_csv(std::ostream& os, const LimitDiagnostics& d) {
  os << "rho,tv,mean_gap,loglik,fisher_min_eig,entropy\n";
  for (const auto& r : d.records)
    os << fmt(r.rho) << ',' << fmt(r.tv) << ',' << fmt(r.mean_gap) << ',' << fmt(r.loglik) << ',' << fmt(r.fisher_min_eig) << ',' << fmt(r.entropy) << '\n';
}

inline json diagnostics_json(const LimitDiagnostics& d) {
  json recs = json::array();
  for (const auto& r : d.records)
    recs.push_back({{"rho", r.rho}, {"tv", r.tv}, {"kl", r.kl}, {"mean_gap", r.mean_gap}, {"loglik", r.loglik},
                    {"fisher_min_eig", r.fisher_min_eig}, {"fisher_rank", r.fisher_rank}, {"entropy", r.entropy}});
  return {{"face_id", d.target.face_id},
          {"dim", d.target.dim},
          {"eta", to_json(d.eta)},
          {"target_mean", to_json(d.target_mean)},
          {"target_entropy", d.target_entropy},
          {"converged", d.converged},
          {"monotone", d.monotone},
          {"fisher_ok", d.fisher_ok},
          {"entropy_ok", d.entropy_ok},
          {"records", std::move(recs)}};
}

inline json lp_json(const lp::DenseLP& p) {
  auto mat = [](const RationalMatrix& m) {
    json a = json::array();
    for (const auto& r : m) a.push_back(to_json(r));
    return a;
  };
  json bounds = json::array();
  for (const auto& b : p.bounds) bounds.push_back({{"nonneg", b.nonneg}, {"upper", b.upper ? json(to_string(*b.upper)) : json(nullptr)}});
  return {{"sense", "max"}, {"objective", to_json(p.objective)}, {"eq", mat(p.eq)}, {"eq_rhs", to_json(p.eq_rhs)},
          {"le", mat(p.le)}, {"le_rhs", to_json(p.le_rhs)}, {"bounds", std::move(bounds)}};
}

inline lp::DenseLP lp_from_json(const json& j) {
  auto vec = [](const json& a) {
    RationalVec v;
    for (const auto& x : a) v.push_back(parse_rational(x.get<std::string>()));
    return v;
  };
  auto mat = [&](const json& a) {
    RationalMatrix m;
    for (const auto& r : a) m.push_back(vec(r));
    return m;
  };
  try {
    lp::DenseLP p;
    p.objective = vec(j.at("objective"));
    p.eq = mat(j.value("eq", json::array()));
    p.eq_rhs = vec(j.value("eq_rhs", json::array()));
    p.le = mat(j.value("le", json::array()));
    p.le_rhs = vec(j.value("le_rhs", json::array()));
    for (const auto& b : j.value("bounds", json::array())) {
      lp::VarBound vb;
      vb.nonneg = b.at("nonneg").get<bool>();
      if (!b.at("upper").is_null()) vb.upper = parse_rational(b.at("upper").get<std::string>());
      p.bounds.push_back(vb);
    }
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw InfeasibleInput(std::string("malformed LP JSON: ") + e.what());
  }
}

inline json lp_result_json(const lp::Result& r) {
  json j{{"status", lp::to_string(r.status)}, {"pivots", r.pivots}};
  if (r.status == lp::Status::optimal) {
    j["value"] = to_string(r.value);
    j["solution"] = to_json(r.solution);
    j["eq_duals"] = to_json(r.eq_duals);
    j["le_duals"] = to_json(r.le_duals);
  }
  return j;
}

inline json existence_json(const RationalVec& x, const ExistenceVerdict& v) {
  json j{{"x", to_json(x)}, {"exists", v.exists}, {"route", v.route}, {"outside", v.outside}};
  j["face_id"] = v.face_id ? json(*v.face_id) : json(nullptr);
  if (v.min_slack) j["min_slack"] = to_string(*v.min_slack);
  if (v.s_star) j["s_star"] = to_string(*v.s_star);
  if (!v.lp_weights.empty()) j["lp_weights"] = to_json(v.lp_weights);
  if (v.gordan_alternative) j["gordan_alternative"] = *v.gordan_alternative;
  if (!v.gordan_normal.empty()) j["gordan_normal"] = to_json(v.gordan_normal);
  j["lp_seconds"] = v.lp_seconds;
  j["gordan_seconds"] = v.gordan_seconds;
  return j;
}

}  // namespace ergx::io
