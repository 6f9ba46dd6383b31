#pragma once
// Read-only JSON API over one loaded measure.

#include <atomic>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "ergx/error.hpp"
#include "ergx/family.hpp"
#include "ergx/geometry.hpp"
#include "ergx/io.hpp"
#include "ergx/limits.hpp"
#include "ergx/mle.hpp"

namespace ergx::service {

using nlohmann::json;

inline constexpr double kOmitBelow = 1e-12;
inline constexpr int kMaxGridSide = 1024;

/// Measure plus everything derived from it. Immutable after construction.
struct Session {
  io::MeasureTable measure;
  ExpFamily family;
  SupportPolytope polytope;
  std::vector<Face> faces;
  NormalFan fan;
  std::vector<FaceLocation> locations;  // per support point

  explicit Session(io::MeasureTable m) : measure(std::move(m)) {
    measure.validate();
    family = measure.family();
    polytope = build_polytope(measure.points);
    faces = face_lattice(polytope);
    fan = normal_fan(polytope, faces);
    for (const auto& t : measure.points) locations.push_back(*classify_point(polytope, t));
  }
};

struct Reply {
  int status = 200;
  std::string body;
};

inline Reply error_reply(int status, const std::string& msg) { return {status, json{{"error", msg}}.dump()}; }

class Api {
 public:
  explicit Api(std::shared_ptr<const Session> session = nullptr) : session_(std::move(session)) {}

  Reply measure() const {
    if (!session_) return error_reply(404, "no measure loaded");
    const auto& s = *session_;
    json points = json::array();
    int boundary = 0;
    for (std::size_t i = 0; i < s.measure.points.size(); ++i) {
      const bool b = s.locations[i].dim < s.polytope.k;
      boundary += b;
      points.push_back({{"t", s.measure.points[i]}, {"count", std::to_string(s.measure.counts[i])}, {"boundary", b}, {"face_id", s.locations[i].face_id}});
    }
    json j{{"g", s.measure.g ? json(*s.measure.g) : json(nullptr)},
           {"stats", s.measure.stats},
           {"total", std::to_string(s.measure.total())},
           {"boundary_count", boundary},
           {"points", std::move(points)}};
    return {200, j.dump()};
  }

  Reply polytope() const {
    if (!session_) return error_reply(404, "no measure loaded");
    return {200, io::polytope_json(session_->polytope, session_->faces, session_->fan).dump()};
  }

  Reply evaluate(const std::string& body) const {
    return guarded([&] {
      const auto req = parse(body);
      const VectorXd theta = vector_field(req, "theta");
      const auto& fam = session_->family;
      const auto e = fam.eval(theta);
      json probs = json::array();
      double omitted = 0;
      for (std::size_t i = 0; i < fam.size(); ++i) {
        const double p = e.probs[static_cast<Eigen::Index>(i)];
        if (p < kOmitBelow) {
          omitted += p;
          continue;
        }
        probs.push_back({{"t", fam.int_points()[i]}, {"p", p}});
      }
      json j{{"theta", io::to_json(theta)}, {"psi", e.psi},       {"mean", io::to_json(e.mean)},     {"entropy", e.entropy},
             {"fisher", io::to_json(e.fisher)}, {"probs", std::move(probs)}, {"omitted_mass", omitted}};
      return Reply{200, j.dump()};
    });
  }

  Reply mle(const std::string& body) const {
    return guarded([&] {
      const auto req = parse(body);
      if (!req.is_object() || !req.contains("x") || !req.at("x").is_array()) throw InfeasibleInput("x must be an array of integers");
      IntVec x;
      for (const auto& v : req.at("x")) {
        if (!v.is_number_integer()) throw InfeasibleInput("x must be an array of integers");
        x.push_back(v.get<std::int64_t>());
      }
      const auto& s = *session_;
      auto r = extended_mle(s.family, s.polytope, s.faces, s.fan, x);
      return Reply{200, io::mle_json(r).dump()};
    });
  }

  Reply ray(const std::string& body) const {
    return guarded([&] {
      const auto req = parse(body);
      const VectorXd theta0 = vector_field(req, "theta0");
      const VectorXd d = vector_field(req, "d");
      std::vector<double> rhos = default_rhos();
      if (req.contains("rhos")) {
        try {
          rhos = req.at("rhos").get<std::vector<double>>();
        } catch (const json::exception&) {
          throw InfeasibleInput("rhos must be an array of numbers");
        }
      }
      const auto& s = *session_;
      auto diag = run_ray(s.family, s.polytope, s.faces, s.fan, RaySequence::make(theta0, d, rhos));
      return Reply{200, io::diagnostics_json(diag).dump()};
    });
  }

  /// box = "lo1,hi1,lo2,hi2" (default: the reference window), res = "n1,n2"
  /// or "n" (default 64). Identical concurrent requests share one computation.
  Reply entropy_grid(const std::string& box_param, const std::string& res_param, bool* cache_hit = nullptr) const {
    return guarded([&] {
      ThetaBox box = ThetaBox::reference();
      if (!box_param.empty()) {
        const auto v = numbers(box_param, "box");
        if (v.size() != 4) throw InfeasibleInput("box needs lo1,hi1,lo2,hi2");
        box = {v[0], v[1], v[2], v[3]};
        if (!(box.lo1 <= box.hi1 && box.lo2 <= box.hi2)) throw InfeasibleInput("box bounds must satisfy lo <= hi");
      }
      int n1 = 64, n2 = 64;
      if (!res_param.empty()) {
        const auto v = numbers(res_param, "res");
        if (v.size() == 1) n1 = n2 = static_cast<int>(v[0]);
        else if (v.size() == 2) n1 = static_cast<int>(v[0]), n2 = static_cast<int>(v[1]);
        else throw InfeasibleInput("res needs n or n1,n2");
        for (double x : v)
          if (x != std::floor(x)) throw InfeasibleInput("res must be integral");
      }
      if (n1 < 1 || n2 < 1 || n1 > kMaxGridSide || n2 > kMaxGridSide)
        throw InfeasibleInput("res must lie in [1, " + std::to_string(kMaxGridSide) + "]");
      const std::string key = io::fmt(box.lo1) + "," + io::fmt(box.hi1) + "," + io::fmt(box.lo2) + "," + io::fmt(box.hi2) + "/" +
                              std::to_string(n1) + "," + std::to_string(n2);
      std::promise<std::string> promise;
      std::shared_future<std::string> fut;
      bool owner = false;
      {
        std::lock_guard lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
          fut = it->second;
        } else {
          fut = promise.get_future().share();
          cache_.emplace(key, fut);
          owner = true;
        }
      }
      if (cache_hit) *cache_hit = !owner;
      if (owner) {
        try {
          promise.set_value(io::grid_json(ergx::entropy_grid(session_->family, box, n1, n2)).dump());
          ++computations_;
        } catch (...) {
          {
            std::lock_guard lock(cache_mutex_);
            cache_.erase(key);
          }
          promise.set_exception(std::current_exception());
        }
      }
      return Reply{200, fut.get()};
    });
  }

  /// Grids computed so far (cache misses that finished).
  int computations() const { return computations_.load(); }
  bool loaded() const { return static_cast<bool>(session_); }

 private:
  template <class F>
  Reply guarded(F&& f) const {
    if (!session_) return error_reply(404, "no measure loaded");
    try {
      return f();
    } catch (const InfeasibleInput& e) {
      return error_reply(400, e.what());
    } catch (const NumericalFailure& e) {
      return error_reply(422, e.what());
    } catch (const std::exception& e) {
      return error_reply(500, e.what());
    }
  }

  static json parse(const std::string& body) {
    try {
      return json::parse(body);
    } catch (const json::exception& e) {
      throw InfeasibleInput(std::string("request body is not JSON: ") + e.what());
    }
  }

  // Accepts numbers; strings "nan"/"inf" are parsed so they can be rejected.
  static VectorXd vector_field(const json& req, const char* name) {
    if (!req.is_object() || !req.contains(name) || !req.at(name).is_array()) throw InfeasibleInput(std::string(name) + " must be an array");
    const auto& a = req.at(name);
    VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto& x = a[i];
      double d;
      if (x.is_number()) d = x.get<double>();
      else if (x.is_string()) d = std::strtod(x.get<std::string>().c_str(), nullptr);
      else throw InfeasibleInput(std::string(name) + " entries must be numbers");
      if (!std::isfinite(d)) throw InfeasibleInput(std::string(name) + " must be finite");
      v[static_cast<Eigen::Index>(i)] = d;
    }
    return v;
  }

  static std::vector<double> numbers(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const auto& cell : io::detail::split(s)) {
      char* end = nullptr;
      const double d = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(d)) throw InfeasibleInput(std::string("bad ") + what + " value '" + cell + "'");
      out.push_back(d);
    }
    return out;
  }

  std::shared_ptr<const Session> session_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::shared_future<std::string>> cache_;
  mutable std::atomic<int> computations_{0};
};

inline void install_routes(httplib::Server& srv, const Api& api) {
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  srv.Get("/api/measure", [&api, send](const httplib::Request&, httplib::Response& res) { send(res, api.measure()); });
  srv.Get("/api/polytope", [&api, send](const httplib::Request&, httplib::Response& res) { send(res, api.polytope()); });
  srv.Post("/api/evaluate", [&api, send](const httplib::Request& req, httplib::Response& res) { send(res, api.evaluate(req.body)); });
  srv.Post("/api/mle", [&api, send](const httplib::Request& req, httplib::Response& res) { send(res, api.mle(req.body)); });
  srv.Post("/api/ray", [&api, send](const httplib::Request& req, httplib::Response& res) { send(res, api.ray(req.body)); });
  srv.Get("/api/entropy-grid", [&api, send](const httplib::Request& req, httplib::Response& res) {
    bool hit = false;
    auto r = api.entropy_grid(req.get_param_value("box"), req.get_param_value("res"), &hit);
    res.set_header("X-Cache", hit ? "hit" : "miss");
    send(res, r);
  });
}

}  // namespace ergx::service
