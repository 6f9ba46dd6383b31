#pragma once
// Maximum likelihood and extended maximum likelihood for the planar family.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ergx/error.hpp"
#include "ergx/family.hpp"
#include "ergx/geometry.hpp"
#include "ergx/lp.hpp"
#include "ergx/rational.hpp"

namespace ergx {

struct MleOptions {
  double tol = 1e-10;           // moment residual |grad psi(theta) - x|
  int max_iter = 200;
  double divergence_norm = 1e3;  // |theta| beyond this is reported as nonexistence
  double step_tol = 1e-6;        // Newton step must also shrink below this
  int max_halvings = 30;
};

struct MleResult {
  VectorXd theta_hat;
  int iterations = 0;
  double residual = 0;
  MatrixXd fisher;
  double entropy = 0;
};

namespace detail {

// Below this a probability is not representable as a normal double.
inline constexpr double kMinLogProb = -708.0;

struct CenteredEval {
  double objective = 0;  // psi(theta) - <theta, x>
  VectorXd grad;         // E_theta(T - x)
  MatrixXd hess;         // Cov_theta(T)
  double min_log_prob = 0;
};

// Everything is computed from the differences t_i - x so that a point mass
// forming at x still yields a nonzero gradient instead of rounding to zero.
inline CenteredEval centered_eval(const ExpFamily& fam, const VectorXd& theta, const VectorXd& x) {
  const MatrixXd diff = fam.points().rowwise() - x.transpose();
  VectorXd s = diff * theta + fam.log_counts();
  const double shift = s.maxCoeff();
  const VectorXd w = (s.array() - shift).exp();
  const double z = w.sum();
  const VectorXd p = w / z;
  CenteredEval c;
  c.objective = shift + std::log(z);
  c.min_log_prob = s.minCoeff() - c.objective;
  c.grad = diff.transpose() * p;
  c.hess = diff.transpose() * p.asDiagonal() * diff - c.grad * c.grad.transpose();
  return c;
}

/// Damped Newton for min_eta psi(U eta) - <U eta, x> starting at eta = 0.
/// U has orthonormal columns spanning the identifiable directions.
inline MleResult newton_moment_match(const ExpFamily& fam, const MatrixXd& U, const VectorXd& x, const MleOptions& opts) {
  const auto fail = [](const std::string& why) { return NumericalFailure("MLE appears nonexistent or ill-conditioned: " + why); };
  VectorXd eta = VectorXd::Zero(U.cols());
  VectorXd theta = U * eta;
  CenteredEval e = centered_eval(fam, theta, x);
  for (int it = 0; it <= opts.max_iter; ++it) {
    const VectorXd grad = U.transpose() * e.grad;
    const MatrixXd hess = U.transpose() * e.hess * U;
    Eigen::LDLT<MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || hess.diagonal().minCoeff() <= 0) throw fail("Fisher information is singular");
    const VectorXd step = -ldlt.solve(grad);
    if (!step.allFinite()) throw fail("Newton step is not finite");
    if (e.grad.norm() < opts.tol && step.norm() < opts.step_tol) {
      // a finite solution gives every support point a representable probability
      if (e.min_log_prob < kMinLogProb) throw fail("support points lost all probability mass; x is numerically on the boundary");
      auto fe = fam.eval(theta);
      return {theta, it, (fe.mean - x).norm(), fe.fisher, fe.entropy};
    }
    if (it == opts.max_iter) break;
    double t = 1.0;
    int halvings = 0;
    for (;;) {
      VectorXd cand_eta = eta + t * step;
      VectorXd cand = U * cand_eta;
      CenteredEval ce = centered_eval(fam, cand, x);
      const bool decreased = ce.objective < e.objective;
      // an overshooting trial step is only halved; an improving one past the guard is divergence
      if (cand.norm() > opts.divergence_norm && decreased) throw fail("|theta| exceeded " + std::to_string(opts.divergence_norm));
      // at rounding level accept steps that still shrink the gradient
      const bool flat = ce.objective <= e.objective + 1e-13 * std::max(1.0, std::abs(e.objective)) && (U.transpose() * ce.grad).norm() < grad.norm();
      if (decreased || flat) {
        eta = cand_eta;
        theta = cand;
        e = std::move(ce);
        break;
      }
      if (++halvings > opts.max_halvings) throw fail("line search failed after " + std::to_string(opts.max_halvings) + " halvings");
      t *= 0.5;
    }
  }
  throw fail("no convergence within " + std::to_string(opts.max_iter) + " iterations");
}

}  // namespace detail

/// Ordinary MLE: solves E_theta(T) = x by damped Newton from theta = 0.
/// Boundary or outside points end in NumericalFailure (divergence guard).
inline MleResult solve_mle(const ExpFamily& fam, const VectorXd& x, const MleOptions& opts = {}) {
  if (x.size() != fam.k()) throw InfeasibleInput("x has the wrong dimension");
  return detail::newton_moment_match(fam, MatrixXd::Identity(fam.k(), fam.k()), x, opts);
}

struct ExistenceVerdict {
  bool exists = false;
  std::optional<int> face_id;    // face containing x in its relative interior, when x is on the boundary
  std::string route;             // "hrep", "lp" or "hrep+lp"
  std::optional<Rational> min_slack;  // smallest H-rep slack b - <a, x> (all > 0 iff exists)
  std::optional<Rational> s_star;     // optimum of the relint-feasibility LP
  RationalVec lp_weights;             // its convex weights z
  std::optional<int> gordan_alternative;  // 1: exists, 2: does not
  RationalVec gordan_normal;          // alternative 2: -w, an outer normal of a face through x
  double lp_seconds = 0;
  double gordan_seconds = 0;
  bool outside = false;
};

struct ExistenceRoutes {
  bool lp = true;
  bool gordan = true;
};

/// Exact existence test. With a polytope the H-rep strict test runs; the
/// relint-feasibility LP (all support points plus a convex-combination row)
/// and the Gordan alternative on the translated support run when requested
/// or when no polytope is given. Every route that runs must agree.
inline ExistenceVerdict check_existence(const ExpFamily& fam, const SupportPolytope* poly, const RationalVec& x, ExistenceRoutes routes = {}) {
  using clock = std::chrono::steady_clock;
  ExistenceVerdict v;
  std::vector<std::pair<std::string, bool>> verdicts;
  if (poly) {
    if (x.size() != static_cast<std::size_t>(poly->k)) throw InfeasibleInput("x has the wrong dimension");
    Rational min_slack;
    bool first = true;
    for (const auto& h : poly->hrep) {
      Rational slack(h.b);
      for (std::size_t a = 0; a < x.size(); ++a) slack -= Rational(h.a[a]) * x[a];
      if (first || slack < min_slack) min_slack = slack;
      first = false;
    }
    v.min_slack = min_slack;
    auto loc = classify_point(*poly, x);
    if (!loc) v.outside = true;
    else if (loc->dim < 2) v.face_id = loc->face_id;
    verdicts.emplace_back("hrep", min_slack > 0);
  }
  const bool run_lp = routes.lp || !poly;
  const bool run_gordan = routes.gordan || !poly;
  if (run_lp || run_gordan) {
    if (fam.int_points().empty()) throw InfeasibleInput("exact existence routes need lattice support points");
    if (x.size() != static_cast<std::size_t>(fam.k())) throw InfeasibleInput("x has the wrong dimension");
    RationalMatrix pts;
    for (const auto& t : fam.int_points()) pts.push_back(to_rational(t));
    if (run_lp) {
      const auto t0 = clock::now();
      auto res = lp::relint_feasibility(lp::convex_combination_matrix(pts), lp::augment(x));
      v.lp_seconds = std::chrono::duration<double>(clock::now() - t0).count();
      v.s_star = res.s_star;
      v.lp_weights = res.z;
      if (!poly && res.z.empty()) v.outside = true;
      verdicts.emplace_back("lp", res.inside);
    }
    if (run_gordan) {
      const auto t0 = clock::now();
      auto cert = lp::existence_gordan(pts, x);
      v.gordan_seconds = std::chrono::duration<double>(clock::now() - t0).count();
      v.gordan_alternative = cert.gordan.alternative;
      for (const auto& w : cert.w) v.gordan_normal.push_back(-w);
      verdicts.emplace_back("gordan", cert.gordan.alternative == 1);
    }
  }
  v.exists = verdicts.front().second;
  for (const auto& [route, ok] : verdicts) {
    if (!v.route.empty()) v.route += "+";
    v.route += route;
    if (ok != v.exists) throw NumericalFailure("existence verdicts disagree (" + verdicts.front().first + " vs " + route + ")");
  }
  return v;
}

struct ExtendedMleResult {
  RationalVec x;
  int face_id = 0;
  int dim = 0;
  VectorXd canonical_rep;            // theta_hat_F orthogonal to lin(N_F)
  std::vector<VectorXd> lin_basis;   // solution set = canonical_rep + span(lin_basis)
  VectorXd mean;
  double residual = 0;
  MatrixXd fisher;                   // restricted Fisher information I_F
  int fisher_rank = 0;
  VectorXd fisher_eigenvalues;
  double entropy = 0;
  double log_likelihood = 0;         // log p^F(x) at the canonical representative
  int iterations = 0;
};

inline int numerical_rank(const VectorXd& eigenvalues, double threshold = 1e-8) {
  int r = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) r += eigenvalues[i] > threshold;
  return r;
}

inline VectorXd sorted_eigenvalues(const MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Face-family MLE for a point in the relative interior of `face`: Newton in
/// the identifiable directions only.
inline MleResult solve_face_mle(const FaceFamily& ff, const VectorXd& x, const MleOptions& opts) {
  const int k = static_cast<int>(x.size());
  if (ff.identifiable.empty()) {
    auto e = ff.eval(VectorXd::Zero(k));
    return {VectorXd::Zero(k), 0, (e.mean - x).norm(), e.fisher, e.entropy};
  }
  MatrixXd U(k, static_cast<Eigen::Index>(ff.identifiable.size()));
  for (std::size_t i = 0; i < ff.identifiable.size(); ++i) U.col(static_cast<Eigen::Index>(i)) = ff.identifiable[i];
  return detail::newton_moment_match(ff.family, U, x, opts);
}

/// Extended MLE of a lattice point of P. Interior points use solve_mle;
/// boundary points are fitted in their face family and reported as the
/// representative orthogonal to lin(N_F) plus that subspace.
inline ExtendedMleResult extended_mle(const ExpFamily& fam, const SupportPolytope& p, const std::vector<Face>& faces, const NormalFan& fan,
                                      const RationalVec& x, const MleOptions& interior = {}, const MleOptions& on_face = {1e-9}) {
  if (x.size() != static_cast<std::size_t>(p.k)) throw InfeasibleInput("x has the wrong dimension");
  auto loc = classify_point(p, x);
  if (!loc) throw InfeasibleInput("x lies outside the convex support");
  ExtendedMleResult r;
  r.x = x;
  r.face_id = loc->face_id;
  r.dim = loc->dim;
  VectorXd xv(static_cast<Eigen::Index>(x.size()));
  for (std::size_t a = 0; a < x.size(); ++a) xv[static_cast<Eigen::Index>(a)] = to_double(x[a]);
  IntVec xi;
  for (const auto& c : x)
    if (denominator(c) == 1) xi.push_back(static_cast<std::int64_t>(numerator(c)));
  r.lin_basis = fan.cones[static_cast<std::size_t>(r.face_id)].lin_basis;

  if (loc->dim == 2) {
    auto m = solve_mle(fam, xv, interior);
    auto e = fam.eval(m.theta_hat);
    r.canonical_rep = m.theta_hat;
    r.mean = e.mean;
    r.residual = m.residual;
    r.fisher = e.fisher;
    r.entropy = e.entropy;
    r.iterations = m.iterations;
    const int idx = xi.size() == x.size() ? fam.index_of(xi) : -1;
    r.log_likelihood = idx >= 0 ? fam.log_density(e, idx) : m.theta_hat.dot(xv) - e.psi;
  } else {
    auto ff = face_family(fam, p, faces, fan, r.face_id);
    auto m = solve_face_mle(ff, xv, on_face);
    auto e = ff.eval(m.theta_hat);
    r.canonical_rep = ff.project(m.theta_hat);
    r.mean = e.mean;
    r.residual = (e.mean - xv).norm();
    r.fisher = e.fisher;
    r.entropy = e.entropy;
    r.iterations = m.iterations;
    r.log_likelihood = r.canonical_rep.dot(xv) - e.psi;
  }
  r.fisher_eigenvalues = sorted_eigenvalues(r.fisher);
  r.fisher_rank = numerical_rank(r.fisher_eigenvalues);
  return r;
}

inline ExtendedMleResult extended_mle(const ExpFamily& fam, const SupportPolytope& p, const std::vector<Face>& faces, const NormalFan& fan,
                                      const IntVec& x, const MleOptions& interior = {}, const MleOptions& on_face = {1e-9}) {
  return extended_mle(fam, p, faces, fan, to_rational(x), interior, on_face);
}

struct ConditioningReport {
  VectorXd eigenvalues;  // ascending
  double condition_number = 0;
};

inline ConditioningReport conditioning_report(const ExpFamily& fam, const VectorXd& theta) {
  auto e = fam.eval(theta);
  ConditioningReport c;
  c.eigenvalues = sorted_eigenvalues(e.fisher);
  const double lo = c.eigenvalues[0], hi = c.eigenvalues[c.eigenvalues.size() - 1];
  c.condition_number = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  return c;
}

/// Entropy as a function of the mean value parameter, V(mu). Points on a
/// proper face get the entropy of the face family that matches mu.
inline double mean_entropy(const ExpFamily& fam, const SupportPolytope& p, const std::vector<Face>& faces, const NormalFan& fan, const VectorXd& mu,
                           double tol = 1e-9) {
  auto loc = classify_point(p, mu, tol);
  if (!loc) throw InfeasibleInput("mean value parameter lies outside the convex support");
  if (loc->dim == 2) return solve_mle(fam, mu).entropy;
  auto ff = face_family(fam, p, faces, fan, loc->face_id);
  if (loc->dim == 0) return ff.eval(VectorXd::Zero(fam.k())).entropy;  // log nu(vertex)
  // project mu onto the edge line so the face moment equation is solvable
  const auto& row = p.hrep[static_cast<std::size_t>(faces[static_cast<std::size_t>(loc->face_id)].active_rows[0])];
  Eigen::Vector2d a(static_cast<double>(row.a[0]), static_cast<double>(row.a[1]));
  const VectorXd on_line = mu - ((a.dot(mu) - static_cast<double>(row.b)) / a.squaredNorm()) * a;
  return solve_face_mle(ff, on_line, MleOptions{1e-9}).entropy;
}

}  // namespace ergx
