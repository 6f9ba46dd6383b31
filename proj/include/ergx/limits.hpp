#pragma once
// Numerical checks of the boundary-limit behaviour along rays
// theta_n = theta0 + rho_n d: convergence to face families, recession
// directions of the log-likelihood, Fisher and entropy limits.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ergx/error.hpp"
#include "ergx/family.hpp"
#include "ergx/geometry.hpp"
#include "ergx/mle.hpp"
#include "ergx/rational.hpp"

namespace ergx {

// Harness constants, not mathematical claims.
inline constexpr double kConvergenceTol = 1e-6;
inline constexpr double kDivergenceFloor = -1e3;
inline constexpr double kRankThreshold = 1e-8;
inline constexpr double kDirectionTol = 1e-9;

inline std::vector<double> default_rhos(int max_exponent = 20) {
  std::vector<double> r;
  for (int i = 0; i <= max_exponent; ++i) r.push_back(std::ldexp(1.0, i));
  return r;
}

struct RaySequence {
  VectorXd theta0;
  VectorXd d;  // unit length
  std::vector<double> rhos;
  std::optional<RationalVec> exact_d;  // classify exactly when present

  /// Normalizes `direction`; a zero direction is not a sequence.
  static RaySequence make(VectorXd theta0, VectorXd direction, std::vector<double> rhos = default_rhos()) {
    if (theta0.size() != direction.size()) throw InfeasibleInput("theta0 and d differ in dimension");
    if (!direction.allFinite() || direction.norm() == 0) throw InfeasibleInput("direction d must be nonzero: rho_n d = 0 never leaves theta0");
    if (!theta0.allFinite()) throw InfeasibleInput("theta0 must be finite");
    for (std::size_t i = 0; i < rhos.size(); ++i) {
      if (!(rhos[i] >= 0) || !std::isfinite(rhos[i])) throw InfeasibleInput("rho schedule must be finite and nonnegative");
      if (i > 0 && !(rhos[i] > rhos[i - 1])) throw InfeasibleInput("rho schedule must be strictly increasing");
    }
    if (rhos.empty()) throw InfeasibleInput("rho schedule is empty");
    return {std::move(theta0), direction.normalized(), std::move(rhos), std::nullopt};
  }

  static RaySequence make_exact(VectorXd theta0, const RationalVec& direction, std::vector<double> rhos = default_rhos()) {
    VectorXd d(static_cast<Eigen::Index>(direction.size()));
    for (std::size_t a = 0; a < direction.size(); ++a) d[static_cast<Eigen::Index>(a)] = to_double(direction[a]);
    auto s = make(std::move(theta0), d, std::move(rhos));
    s.exact_d = direction;
    return s;
  }
};

struct RayRecord {
  double rho = 0;
  double tv = 0;        // total variation to the target face distribution
  double kl = 0;        // KL(target || p_theta_n)
  double mean_gap = 0;
  double loglik = 0;    // log p_theta_n(x) at the chosen x
  double fisher_min_eig = 0;
  int fisher_rank = 0;
  double fisher_gap = 0;  // max entrywise |I(theta_n) - I_F(eta)|
  double entropy = 0;
  std::vector<double> member_log_density;  // log p_theta_n at each face member
};

struct LimitDiagnostics {
  FaceLocation target;
  VectorXd eta;          // canonical projection of theta0
  VectorXd target_mean;
  double target_entropy = 0;
  MatrixXd target_fisher;
  int target_fisher_rank = 0;
  std::vector<RayRecord> records;
  bool converged = false;        // tv and mean gap below tolerance at the last rho
  bool monotone = false;         // member densities nondecreasing in rho
  bool fisher_ok = false;        // min eigenvalue, rank and entrywise gap
  bool entropy_ok = false;
};

inline FaceLocation classify_ray(const SupportPolytope& p, const RaySequence& seq) {
  if (seq.exact_d) return classify_direction(p, *seq.exact_d);
  return classify_direction(p, seq.d, kDirectionTol);
}

namespace detail {

inline VectorXd as_vector(const IntVec& t) {
  VectorXd v(static_cast<Eigen::Index>(t.size()));
  for (std::size_t a = 0; a < t.size(); ++a) v[static_cast<Eigen::Index>(a)] = static_cast<double>(t[a]);
  return v;
}

}  // namespace detail

/// Follows theta0 + rho d and compares each distribution with the face
/// family of the cone containing d, evaluated at the projection eta of theta0.
/// `x` selects the point whose log-likelihood is recorded (default: the first
/// member of the target face). `jitter` > 0 perturbs d inside a 2-D cone by
/// jitter/n at step n.
inline LimitDiagnostics run_ray(const ExpFamily& fam, const SupportPolytope& p, const std::vector<Face>& faces, const NormalFan& fan,
                                const RaySequence& seq, std::optional<IntVec> x = std::nullopt, double jitter = 0.0, std::uint64_t seed = 0) {
  LimitDiagnostics out;
  out.target = classify_ray(p, seq);
  if (out.target.dim == 2) throw InfeasibleInput("direction lies in the zero cone; rays need d != 0");
  const FaceFamily ff = face_family(fam, p, faces, fan, out.target.face_id);
  out.eta = ff.project(seq.theta0);
  const FamilyEval target = ff.eval(out.eta);
  out.target_mean = target.mean;
  out.target_entropy = target.entropy;
  out.target_fisher = target.fisher;
  out.target_fisher_rank = numerical_rank(sorted_eigenvalues(target.fisher), kRankThreshold);

  std::vector<double> q(fam.size(), 0.0), log_q(fam.size(), -INFINITY);
  for (std::size_t j = 0; j < ff.members.size(); ++j) {
    q[static_cast<std::size_t>(ff.members[j])] = target.probs[static_cast<Eigen::Index>(j)];
    log_q[static_cast<std::size_t>(ff.members[j])] = target.log_probs[static_cast<Eigen::Index>(j)];
  }
  const VectorXd xv = detail::as_vector(x ? *x : ff.family.int_points().front());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const bool can_jitter = jitter > 0 && fan.cones[static_cast<std::size_t>(out.target.face_id)].dim() == static_cast<int>(seq.d.size());

  for (std::size_t n = 0; n < seq.rhos.size(); ++n) {
    VectorXd d = seq.d;
    if (can_jitter) {
      VectorXd xi(d.size());
      for (auto& v : xi) v = gauss(rng);
      for (double r = jitter / static_cast<double>(n + 1);; r *= 0.5) {
        VectorXd cand = (seq.d + r * xi.normalized()).normalized();
        if (classify_direction(p, cand, kDirectionTol).face_id == out.target.face_id) {
          d = cand;
          break;
        }
        if (r < 1e-12) break;
      }
    }
    const VectorXd theta = seq.theta0 + seq.rhos[n] * d;
    const FamilyEval e = fam.eval(theta);
    RayRecord rec;
    rec.rho = seq.rhos[n];
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const double pi = e.probs[static_cast<Eigen::Index>(i)];
      rec.tv += std::abs(pi - q[i]);
      if (q[i] > 0) rec.kl += q[i] * (log_q[i] - e.log_probs[static_cast<Eigen::Index>(i)]);
    }
    rec.tv *= 0.5;
    rec.kl = std::max(rec.kl, 0.0);
    rec.mean_gap = (e.mean - target.mean).norm();
    rec.loglik = fam.log_density_at(theta, xv);
    const VectorXd eig = sorted_eigenvalues(e.fisher);
    rec.fisher_min_eig = eig[0];
    rec.fisher_rank = numerical_rank(eig, kRankThreshold);
    rec.fisher_gap = (e.fisher - target.fisher).cwiseAbs().maxCoeff();
    rec.entropy = e.entropy;
    for (int m : ff.members) rec.member_log_density.push_back(fam.log_density_at(theta, static_cast<Eigen::Index>(m)));
    out.records.push_back(std::move(rec));
  }

  const RayRecord& last = out.records.back();
  out.converged = last.tv < kConvergenceTol && last.mean_gap < kConvergenceTol;
  out.monotone = true;
  for (std::size_t n = 1; n < out.records.size(); ++n)
    for (std::size_t j = 0; j < ff.members.size(); ++j)
      if (out.records[n].member_log_density[j] < out.records[n - 1].member_log_density[j] - 1e-9) out.monotone = false;
  const int face_dim = faces[static_cast<std::size_t>(out.target.face_id)].dim;
  const bool min_eig_small = face_dim == static_cast<int>(seq.d.size()) || last.fisher_min_eig < kConvergenceTol;
  out.fisher_ok = min_eig_small && last.fisher_rank == face_dim && out.target_fisher_rank == face_dim && last.fisher_gap < kConvergenceTol;
  out.entropy_ok = std::abs(last.entropy - out.target_entropy) < kConvergenceTol;
  return out;
}

struct FisherLimitReport {
  FaceLocation target;
  int face_dim = 0;
  int limit_rank = 0;        // rank of I_F at the projected parameter
  int final_rank = 0;        // rank of I(theta_n) at the last rho
  double final_min_eig = 0;
  double entry_gap = 0;
  bool ok = false;
};

inline FisherLimitReport fisher_limit_check(const ExpFamily& fam, const SupportPolytope& p, const std::vector<Face>& faces, const NormalFan& fan,
                                            const RaySequence& seq) {
  auto diag = run_ray(fam, p, faces, fan, seq);
  FisherLimitReport r;
  r.target = diag.target;
  r.face_dim = diag.target.dim;
  r.limit_rank = diag.target_fisher_rank;
  r.final_rank = diag.records.back().fisher_rank;
  r.final_min_eig = diag.records.back().fisher_min_eig;
  r.entry_gap = diag.records.back().fisher_gap;
  r.ok = diag.fisher_ok;
  return r;
}

struct EntropyLimitReport {
  FaceLocation target;
  std::vector<double> entropies;  // S(theta_n) per rho
  double limit = 0;               // S_F at the projected parameter
  double final_gap = 0;
  bool ok = false;
};

inline EntropyLimitReport entropy_limit_check(const ExpFamily& fam, const SupportPolytope& p, const std::vector<Face>& faces, const NormalFan& fan,
                                              const RaySequence& seq) {
  auto diag = run_ray(fam, p, faces, fan, seq);
  EntropyLimitReport r;
  r.target = diag.target;
  for (const auto& rec : diag.records) r.entropies.push_back(rec.entropy);
  r.limit = diag.target_entropy;
  r.final_gap = std::abs(r.entropies.back() - r.limit);
  r.ok = r.final_gap < kConvergenceTol;
  return r;
}

struct DirectionTrace {
  VectorXd d;
  bool in_normal_cone = false;
  std::vector<double> loglik;  // l_x(theta0 + rho d) per rho
  bool bounded = false;        // stays <= -log nu(x) and settles
  bool nondecreasing_tail = false;
  bool divergent = false;      // drops below the floor by the last rho
};

struct RecessionReport {
  FaceLocation face;
  std::vector<DirectionTrace> inside;
  std::vector<DirectionTrace> outside;
  bool ok = false;
};

/// The normal cone of x's face is the recession cone of the negative
/// log-likelihood: along directions in N_F the likelihood stays bounded and
/// increases to its supremum; along any other direction it diverges to -inf.
inline RecessionReport recession_check(const ExpFamily& fam, const SupportPolytope& p, const std::vector<Face>& faces, const NormalFan& fan,
                                       const IntVec& x, const VectorXd& theta0, int directions = 3, std::uint64_t seed = 7,
                                       const std::vector<double>& rhos = default_rhos()) {
  auto loc = classify_point(p, x);
  if (!loc) throw InfeasibleInput("x lies outside the convex support");
  RecessionReport rep;
  rep.face = *loc;
  const VectorXd xv = detail::as_vector(x);
  const int idx = fam.index_of(x);
  const double upper = idx >= 0 ? -fam.log_counts()[idx] : INFINITY;
  const NormalCone& cone = fan.cones[static_cast<std::size_t>(loc->face_id)];

  auto trace = [&](const VectorXd& d, bool in_cone) {
    DirectionTrace t;
    t.d = d;
    t.in_normal_cone = in_cone;
    for (double rho : rhos) t.loglik.push_back(fam.log_density_at(theta0 + rho * d, xv));
    const std::size_t half = t.loglik.size() / 2;
    t.nondecreasing_tail = true;
    for (std::size_t i = half + 1; i < t.loglik.size(); ++i)
      if (t.loglik[i] < t.loglik[i - 1] - 1e-9) t.nondecreasing_tail = false;
    bool below = true;
    for (double l : t.loglik) below = below && l <= upper + 1e-9;
    const double n = static_cast<double>(t.loglik.size());
    t.bounded = below && n >= 2 && std::abs(t.loglik.back() - t.loglik[t.loglik.size() - 2]) < kConvergenceTol;
    t.divergent = t.loglik.back() < kDivergenceFloor;
    return t;
  };

  if (!cone.generators.empty())
    for (int i = 0; i < directions; ++i) rep.inside.push_back(trace(sample_ri_direction(cone, seed + static_cast<std::uint64_t>(i)), true));

  // directions outside N_F: random angles whose maximizing face does not contain F
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  const Face& f = faces[static_cast<std::size_t>(loc->face_id)];
  auto contains_face = [&](const FaceLocation& g) {
    if (g.face_id == f.id) return true;
    if (f.dim == 0 && g.dim == 1) {
      const auto& gm = faces[static_cast<std::size_t>(g.face_id)].members;
      return std::find(gm.begin(), gm.end(), f.members.front()) != gm.end();
    }
    return false;
  };
  int tries = 0;
  while (static_cast<int>(rep.outside.size()) < directions) {
    if (++tries > 10000) throw NumericalFailure("could not sample directions outside the normal cone");
    const double a = angle(rng);
    VectorXd d(2);
    d << std::cos(a), std::sin(a);
    FaceLocation g;
    try {
      g = classify_direction(p, d, 1e-6);
    } catch (const NumericalFailure&) {
      continue;  // too close to a cone boundary to be sure
    }
    if (contains_face(g)) continue;
    rep.outside.push_back(trace(d, false));
  }

  rep.ok = true;
  for (const auto& t : rep.inside) rep.ok = rep.ok && t.bounded && t.nondecreasing_tail && !t.divergent;
  for (const auto& t : rep.outside) rep.ok = rep.ok && t.divergent;
  return rep;
}

}  // namespace ergx
