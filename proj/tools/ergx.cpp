// ergx: command-line front end.
//
// Exit codes: 0 ok, 2 usage, 3 infeasible or unsupported input, 4 numerical
// failure.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "ergx/enumerate.hpp"
#include "ergx/family.hpp"
#include "ergx/geometry.hpp"
#include "ergx/io.hpp"
#include "ergx/limits.hpp"
#include "ergx/mle.hpp"
#include "ergx/service.hpp"

namespace fs = std::filesystem;
using namespace ergx;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string out;
  int workers = 1;
  std::uint64_t seed = 1;
  double tol = 1e-10;
};

struct Loaded {
  io::MeasureTable measure;
  ExpFamily family;
  SupportPolytope polytope;
  std::vector<Face> faces;
  NormalFan fan;
};

Loaded load(const std::string& path) {
  Loaded l;
  l.measure = io::load_measure(path);
  l.family = l.measure.family();
  l.polytope = build_polytope(l.measure.points);
  l.faces = face_lattice(l.polytope);
  l.fan = normal_fan(l.polytope, l.faces);
  return l;
}

// Writes to `path`, or stdout when it is empty or "-".
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InfeasibleInput("cannot write '" + path + "'");
  write(os);
}

fs::path out_dir(const std::string& path, const std::string& fallback) {
  fs::path d = path.empty() ? fs::path(fallback) : fs::path(path);
  fs::create_directories(d);
  return d;
}

std::vector<std::string> cells(const std::string& s) { return io::detail::split(s); }

RationalVec rational_list(const std::string& s, const char* what) {
  RationalVec v;
  for (const auto& c : cells(s)) {
    try {
      v.push_back(parse_rational(c));
    } catch (const InfeasibleInput&) {
      throw UsageError(std::string("bad ") + what + " '" + s + "'");
    }
  }
  if (v.empty()) throw UsageError(std::string(what) + " is empty");
  return v;
}

VectorXd real_list(const std::string& s, const char* what) {
  std::vector<double> v;
  for (const auto& c : cells(s)) {
    char* end = nullptr;
    const double d = std::strtod(c.c_str(), &end);
    if (c.empty() || end != c.c_str() + c.size()) throw UsageError(std::string("bad ") + what + " '" + s + "'");
    v.push_back(d);
  }
  return Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// ---- enumerate -------------------------------------------------------------

struct EnumerateArgs {
  int g = 0;
  std::string stats = "edges,triangles";
  std::string format = "csv";
};

void cmd_enumerate(const EnumerateArgs& a, const Globals& gl) {
  auto m = enumerate_measure(a.g, parse_stats(a.stats), EnumerateOptions{gl.workers});
  auto table = io::to_table(m);
  emit(gl.out, [&](std::ostream& os) {
    if (a.format == "json") os << io::measure_json(table).dump(1) << '\n';
    else io::write_measure_csv(os, table);
  });
  std::cerr << "total " << m.total() << "\ndistinct " << m.support_size() << '\n';
}

// ---- hull ------------------------------------------------------------------

void cmd_hull(const std::string& measure, const Globals& gl) {
  auto l = load(measure);
  auto dir = out_dir(gl.out, "hull");
  emit((dir / "polytope.json").string(), [&](std::ostream& os) { os << io::polytope_json(l.polytope, l.faces, l.fan).dump(1) << '\n'; });
  emit((dir / "classification.csv").string(), [&](std::ostream& os) { io::write_classification_csv(os, l.measure, l.polytope); });
  std::cout << "vertices " << l.polytope.vertices.size() << "\n";
  for (const auto& h : l.polytope.hrep) std::cout << "row " << h.a[0] << ' ' << h.a[1] << " <= " << h.b << '\n';
}

// ---- figures ---------------------------------------------------------------

struct FigureArgs {
  std::string measure;
  int res = 64;
  int mean_res = 48;
  double centered = 25;
};

void cmd_figures(const FigureArgs& a, const Globals& gl) {
  auto l = load(a.measure);
  if (l.polytope.k != 2) throw InfeasibleInput("figures need a 2-statistic measure");
  auto dir = out_dir(gl.out, "figures");
  const auto max_count = *std::max_element(l.measure.counts.begin(), l.measure.counts.end());

  std::vector<FaceLocation> loc;
  for (const auto& t : l.measure.points) loc.push_back(*classify_point(l.polytope, t));

  emit((dir / "support.csv").string(), [&](std::ostream& os) {
    os << "t1,t2,count,shade,boundary,face_id\n";
    for (std::size_t i = 0; i < l.measure.points.size(); ++i) {
      const double shade = std::sqrt(static_cast<double>(l.measure.counts[i]) / static_cast<double>(max_count));
      os << l.measure.points[i][0] << ',' << l.measure.points[i][1] << ',' << l.measure.counts[i] << ',' << io::fmt(shade) << ','
         << (loc[i].dim < 2 ? 1 : 0) << ',' << loc[i].face_id << '\n';
    }
  });

  emit((dir / "quantiles.csv").string(), [&](std::ostream& os) {
    os << "q,count\n";
    for (int i = 0; i <= 100; ++i) {
      const double q = i / 100.0;
      os << io::fmt(q) << ',' << io::fmt(measure_quantile(l.measure.counts, q)) << '\n';
    }
  });

  MleOptions interior;
  interior.tol = gl.tol;
  emit((dir / "mle.csv").string(), [&](std::ostream& os) {
    os << "t1,t2,exists,face_id,dim,theta1,theta2,entropy\n";
    for (const auto& t : l.measure.points) {
      auto r = extended_mle(l.family, l.polytope, l.faces, l.fan, t, interior);
      os << t[0] << ',' << t[1] << ',' << (r.dim == 2 ? 1 : 0) << ',' << r.face_id << ',' << r.dim << ',' << io::fmt(r.canonical_rep[0]) << ','
         << io::fmt(r.canonical_rep[1]) << ',' << io::fmt(r.entropy) << '\n';
    }
  });

  emit((dir / "entropy_natural.csv").string(), [&](std::ostream& os) { io::write_grid_csv(os, entropy_grid(l.family, ThetaBox::reference(), a.res, a.res)); });
  emit((dir / "entropy_natural_centered.csv").string(),
       [&](std::ostream& os) { io::write_grid_csv(os, entropy_grid(l.family, ThetaBox::centered(a.centered), a.res, a.res)); });

  // entropy in the mean value parametrization over the bounding box of P
  std::int64_t lo1 = l.polytope.vertices[0][0], hi1 = lo1, lo2 = l.polytope.vertices[0][1], hi2 = lo2;
  for (const auto& v : l.polytope.vertices) {
    lo1 = std::min(lo1, v[0]), hi1 = std::max(hi1, v[0]);
    lo2 = std::min(lo2, v[1]), hi2 = std::max(hi2, v[1]);
  }
  emit((dir / "entropy_mean.csv").string(), [&](std::ostream& os) {
    os << "mu1,mu2,inside,entropy\n";
    for (int j = 0; j < a.mean_res; ++j)
      for (int i = 0; i < a.mean_res; ++i) {
        // rational grid so classification is exact
        const RationalVec mu{Rational(lo1) + Rational(hi1 - lo1) * Rational(2 * i + 1, 2 * a.mean_res),
                             Rational(lo2) + Rational(hi2 - lo2) * Rational(2 * j + 1, 2 * a.mean_res)};
        auto at = classify_point(l.polytope, mu);
        os << io::fmt(to_double(mu[0])) << ',' << io::fmt(to_double(mu[1])) << ',';
        if (!at) {
          os << "0,nan\n";
          continue;
        }
        double v = std::nan("");
        try {
          v = extended_mle(l.family, l.polytope, l.faces, l.fan, mu, interior).entropy;
        } catch (const NumericalFailure&) {
        }
        os << "1," << io::fmt(v) << '\n';
      }
  });

  emit((dir / "fan.csv").string(), [&](std::ostream& os) {
    os << "row,a1,a2,b,u1,u2\n";
    for (std::size_t r = 0; r < l.polytope.hrep.size(); ++r) {
      const auto& h = l.polytope.hrep[r];
      const double n = std::hypot(static_cast<double>(h.a[0]), static_cast<double>(h.a[1]));
      os << r << ',' << h.a[0] << ',' << h.a[1] << ',' << h.b << ',' << io::fmt(h.a[0] / n) << ',' << io::fmt(h.a[1] / n) << '\n';
    }
  });

  std::cout << "support " << l.measure.points.size() << "\nboundary " << std::count_if(loc.begin(), loc.end(), [](auto& f) { return f.dim < 2; })
            << "\nrays " << l.polytope.hrep.size() << '\n';
}

// ---- mle -------------------------------------------------------------------

struct MleArgs {
  std::string measure;
  std::string x;
  bool all = false;
};

void cmd_mle(const MleArgs& a, const Globals& gl) {
  if (a.x.empty() == !a.all) throw UsageError("give exactly one of --x and --all-support");
  auto l = load(a.measure);
  MleOptions interior;
  interior.tol = gl.tol;
  json out;
  if (a.all) {
    out = json::array();
    int solved = 0;
    for (const auto& t : l.measure.points) {
      auto r = extended_mle(l.family, l.polytope, l.faces, l.fan, t, interior);
      solved += r.dim == l.polytope.k;
      out.push_back(io::mle_json(r));
    }
    std::cerr << "records " << out.size() << "\ninterior " << solved << '\n';
  } else {
    auto x = rational_list(a.x, "--x");
    if (x.size() != static_cast<std::size_t>(l.polytope.k)) throw UsageError("--x needs " + std::to_string(l.polytope.k) + " coordinates");
    out = io::mle_json(extended_mle(l.family, l.polytope, l.faces, l.fan, x, interior));
  }
  emit(gl.out, [&](std::ostream& os) { os << out.dump(1) << '\n'; });
}

// ---- entropy-grid ----------------------------------------------------------

struct GridArgs {
  std::string measure;
  std::string box;
  double centered = 0;
  std::string res = "64";
};

void cmd_grid(const GridArgs& a, const Globals& gl) {
  auto l = load(a.measure);
  ThetaBox box = ThetaBox::reference();
  if (!a.box.empty() && a.centered > 0) throw UsageError("--box and --centered are exclusive");
  if (!a.box.empty()) {
    auto v = real_list(a.box, "--box");
    if (v.size() != 4) throw UsageError("--box needs lo1,hi1,lo2,hi2");
    box = {v[0], v[1], v[2], v[3]};
  } else if (a.centered > 0) {
    box = ThetaBox::centered(a.centered);
  }
  auto r = real_list(a.res, "--res");
  if (r.size() != 1 && r.size() != 2) throw UsageError("--res needs n or n1,n2");
  const int n1 = static_cast<int>(r[0]), n2 = static_cast<int>(r[r.size() - 1]);
  auto g = entropy_grid(l.family, box, n1, n2);
  emit(gl.out, [&](std::ostream& os) { io::write_grid_csv(os, g); });
}

// ---- ray -------------------------------------------------------------------

struct RayArgs {
  std::string measure;
  std::string theta0 = "0,0";
  std::string d;
  std::string rhos;
  int max_exp = 20;
  double jitter = 0;
  std::string x;
  std::string verdict;
};

void cmd_ray(const RayArgs& a, const Globals& gl) {
  auto l = load(a.measure);
  const VectorXd theta0 = real_list(a.theta0, "--theta0");
  std::vector<double> rhos = default_rhos(a.max_exp);
  if (!a.rhos.empty()) {
    auto v = real_list(a.rhos, "--rhos");
    rhos.assign(v.data(), v.data() + v.size());
  }
  // exact classification when d parses as rationals
  std::optional<RationalVec> exact;
  try {
    exact = rational_list(a.d, "--d");
  } catch (const UsageError&) {
  }
  const VectorXd d = real_list(a.d, "--d");
  if (d.size() != theta0.size()) throw UsageError("--d and --theta0 differ in dimension");
  if (d.norm() == 0) throw UsageError("--d must be nonzero");
  auto seq = exact ? RaySequence::make_exact(theta0, *exact, rhos) : RaySequence::make(theta0, d, rhos);
  std::optional<IntVec> x;
  if (!a.x.empty()) {
    IntVec xi;
    for (const auto& c : rational_list(a.x, "--x")) {
      if (denominator(c) != 1) throw UsageError("--x must be a lattice point");
      xi.push_back(static_cast<std::int64_t>(numerator(c)));
    }
    x = xi;
  }
  auto diag = run_ray(l.family, l.polytope, l.faces, l.fan, seq, x, a.jitter, gl.seed);
  emit(gl.out, [&](std::ostream& os) { io::write_diagnostics_csv(os, diag); });
  if (!a.verdict.empty()) emit(a.verdict, [&](std::ostream& os) { os << io::diagnostics_json(diag).dump(1) << '\n'; });
  std::cerr << "face " << diag.target.face_id << " dim " << diag.target.dim << " converged " << diag.converged << '\n';
}

// ---- exists ----------------------------------------------------------------

struct ExistsArgs {
  std::string measure;
  std::string x;
  bool all = false;
  bool timings = false;
};

void cmd_exists(const ExistsArgs& a, const Globals& gl) {
  if (a.x.empty() == !a.all) throw UsageError("give exactly one of --x and --all-support");
  auto l = load(a.measure);
  auto one = [&](const RationalVec& x) {
    auto v = check_existence(l.family, &l.polytope, x);
    auto j = io::existence_json(x, v);
    if (!a.timings) j.erase("lp_seconds"), j.erase("gordan_seconds");
    return std::pair{j, v.exists};
  };
  json out;
  if (a.all) {
    out = json::array();
    int exist = 0;
    for (const auto& t : l.measure.points) {
      auto [j, e] = one(to_rational(t));
      exist += e;
      out.push_back(std::move(j));
    }
    std::cerr << "exists " << exist << "\nnonexistent " << out.size() - static_cast<std::size_t>(exist) << '\n';
  } else {
    out = one(rational_list(a.x, "--x")).first;
  }
  emit(gl.out, [&](std::ostream& os) { os << out.dump(1) << '\n'; });
}

// ---- serve -----------------------------------------------------------------

struct ServeArgs {
  std::string measure;
  std::string host = "127.0.0.1";
  int port = 8080;
};

void cmd_serve(const ServeArgs& a) {
  auto session = std::make_shared<const service::Session>(io::load_measure(a.measure));
  service::Api api(session);
  httplib::Server srv;
  service::install_routes(srv, api);
  std::cerr << "serving " << session->measure.points.size() << " points on http://" << a.host << ':' << a.port << "/api\n";
  if (!srv.listen(a.host, a.port)) throw InfeasibleInput("cannot listen on " + a.host + ":" + std::to_string(a.port));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact enumeration, geometry and likelihood tools for small exponential random graph models"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals gl;
  app.add_option("--out", gl.out, "Output file (or directory for hull/figures); stdout when omitted");
  app.add_option("--workers", gl.workers, "Worker threads for enumeration")->check(CLI::Range(1, 1024));
  app.add_option("--seed", gl.seed, "Seed for sampled directions");
  app.add_option("--tol", gl.tol, "Moment residual tolerance for interior MLE solves")->check(CLI::PositiveNumber);

  EnumerateArgs ea;
  auto* en = app.add_subcommand("enumerate", "Enumerate all graphs on g nodes and write the induced measure");
  en->add_option("--g", ea.g, "Number of nodes (3..9)")->required();
  en->add_option("--stats", ea.stats, "Comma separated statistics: edges, triangles, kstar<k>, degree<k>");
  en->add_option("--format", ea.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string hull_measure;
  auto* hu = app.add_subcommand("hull", "Write polytope.json and classification.csv for a measure");
  hu->add_option("--measure", hull_measure, "Measure file (.csv or .json)")->required();

  FigureArgs fa;
  auto* fi = app.add_subcommand("figures", "Write the CSV bundle for support, quantile, MLE, entropy and fan plots");
  fi->add_option("--measure", fa.measure, "Measure file")->required();
  fi->add_option("--res", fa.res, "Natural-parameter grid resolution per axis")->check(CLI::Range(1, 1024));
  fi->add_option("--mean-res", fa.mean_res, "Mean-value grid resolution per axis")->check(CLI::Range(1, 512));
  fi->add_option("--centered", fa.centered, "Half width of the origin-centred theta box")->check(CLI::PositiveNumber);

  MleArgs ma;
  auto* ml = app.add_subcommand("mle", "Extended MLE of one point or of every support point");
  ml->add_option("--measure", ma.measure, "Measure file")->required();
  ml->add_option("--x", ma.x, "Observed statistic, e.g. 18,10 or 18,21/2");
  ml->add_flag("--all-support", ma.all, "Solve for every support point");

  GridArgs ga;
  auto* gr = app.add_subcommand("entropy-grid", "Entropy over a theta box as CSV");
  gr->add_option("--measure", ga.measure, "Measure file")->required();
  gr->add_option("--box", ga.box, "lo1,hi1,lo2,hi2 (default 10,25,-25,10)");
  gr->add_option("--centered", ga.centered, "Use [-r,r]^2 instead of --box")->check(CLI::PositiveNumber);
  gr->add_option("--res", ga.res, "n or n1,n2");

  RayArgs ra;
  auto* ry = app.add_subcommand("ray", "Diagnostics along theta0 + rho d");
  ry->add_option("--measure", ra.measure, "Measure file")->required();
  ry->add_option("--theta0", ra.theta0, "Base parameter");
  ry->add_option("--d", ra.d, "Direction, normalised to unit length")->required();
  ry->add_option("--rhos", ra.rhos, "Explicit increasing schedule");
  ry->add_option("--max-exp", ra.max_exp, "Schedule 2^0..2^max-exp when --rhos is absent")->check(CLI::Range(0, 60));
  ry->add_option("--jitter", ra.jitter, "Perturb d inside its cone by jitter/n at step n")->check(CLI::NonNegativeNumber);
  ry->add_option("--x", ra.x, "Lattice point whose log-likelihood is recorded");
  ry->add_option("--verdict", ra.verdict, "Also write the JSON verdict here");

  ExistsArgs xa;
  auto* ex = app.add_subcommand("exists", "Exact MLE existence by H-rep, feasibility LP and Gordan alternative");
  ex->add_option("--measure", xa.measure, "Measure file")->required();
  ex->add_option("--x", xa.x, "Rational point, e.g. 18,21/2");
  ex->add_flag("--all-support", xa.all, "Check every support point");
  ex->add_flag("--timings", xa.timings, "Include LP solve times");

  ServeArgs sa;
  auto* se = app.add_subcommand("serve", "Serve the JSON API for a measure");
  se->add_option("--measure", sa.measure, "Measure file")->required();
  se->add_option("--host", sa.host, "Bind address");
  se->add_option("--port", sa.port, "Port")->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (en->parsed()) cmd_enumerate(ea, gl);
    else if (hu->parsed()) cmd_hull(hull_measure, gl);
    else if (fi->parsed()) cmd_figures(fa, gl);
    else if (ml->parsed()) cmd_mle(ma, gl);
    else if (gr->parsed()) cmd_grid(ga, gl);
    else if (ry->parsed()) cmd_ray(ra, gl);
    else if (ex->parsed()) cmd_exists(xa, gl);
    else if (se->parsed()) cmd_serve(sa);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  }
  return 0;
}
