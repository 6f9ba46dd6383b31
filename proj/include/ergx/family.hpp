#pragma once
// Discrete linear exponential family over the support of an induced measure:
//   p_theta(t) nu(t) = exp(<t, theta> - psi(theta)) nu(t).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ergx/enumerate.hpp"
#include "ergx/error.hpp"
#include "ergx/geometry.hpp"

namespace ergx {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct FamilyEval {
  VectorXd theta;
  double psi = 0;
  VectorXd mean;
  MatrixXd fisher;
  double entropy = 0;
  VectorXd probs;      // p_theta(t) nu(t), aligned with the family's support
  VectorXd log_probs;  // log of probs, accurate where probs underflows
};

class ExpFamily {
 public:
  ExpFamily() = default;

  /// points: n x k support coordinates; counts: nu(t) > 0 for each row.
  ExpFamily(MatrixXd points, std::vector<std::uint64_t> counts) : points_(std::move(points)), counts_(std::move(counts)) {
    if (static_cast<std::size_t>(points_.rows()) != counts_.size()) throw InfeasibleInput("one count per support point required");
    if (counts_.empty()) throw InfeasibleInput("exponential family needs a nonempty support");
    log_counts_.resize(points_.rows());
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
      if (counts_[static_cast<std::size_t>(i)] == 0) throw InfeasibleInput("support counts must be positive");
      log_counts_[i] = std::log(static_cast<double>(counts_[static_cast<std::size_t>(i)]));
      total_ += counts_[static_cast<std::size_t>(i)];
    }
  }

  explicit ExpFamily(const InducedMeasure& m) {
    const auto sup = m.support();
    MatrixXd pts(static_cast<Eigen::Index>(sup.size()), m.k());
    std::vector<std::uint64_t> c;
    std::vector<IntVec> ints;
    for (std::size_t i = 0; i < sup.size(); ++i) {
      for (int a = 0; a < m.k(); ++a) pts(static_cast<Eigen::Index>(i), a) = static_cast<double>(sup[i].first[static_cast<std::size_t>(a)]);
      c.push_back(sup[i].second);
      ints.push_back(sup[i].first);
    }
    *this = ExpFamily(std::move(pts), std::move(c), std::move(ints));
  }

  ExpFamily(MatrixXd points, std::vector<std::uint64_t> counts, std::vector<IntVec> int_points) : ExpFamily(std::move(points), std::move(counts)) {
    int_points_ = std::move(int_points);
  }

  int k() const { return static_cast<int>(points_.cols()); }
  std::size_t size() const { return counts_.size(); }
  const MatrixXd& points() const { return points_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  const VectorXd& log_counts() const { return log_counts_; }
  /// Exact lattice coordinates; empty for families over real-valued statistics.
  const std::vector<IntVec>& int_points() const { return int_points_; }
  std::uint64_t total() const { return total_; }
  double max_entropy() const { return std::log(static_cast<double>(total_)); }

  /// Index of an exact support point, or -1.
  int index_of(const IntVec& t) const {
    auto it = std::lower_bound(int_points_.begin(), int_points_.end(), t);
    if (it == int_points_.end() || *it != t) return -1;
    return static_cast<int>(it - int_points_.begin());
  }

  /// psi, mean, Fisher information and entropy at theta. psi uses a shifted
  /// log-sum-exp; entropy is psi - <theta, mu> rearranged around the shift.
  FamilyEval eval(const VectorXd& theta) const {
    if (theta.size() != k()) throw InfeasibleInput("theta has " + std::to_string(theta.size()) + " entries, family has k=" + std::to_string(k()));
    if (!theta.allFinite()) throw InfeasibleInput("theta must be finite");
    FamilyEval e;
    e.theta = theta;
    const Eigen::Index n = points_.rows();
    VectorXd s = points_ * theta + log_counts_;
    const double shift = s.maxCoeff();
    s.array() -= shift;  // s_i <= 0
    const VectorXd w = s.array().exp();
    const double z = w.sum();
    const double log_z = std::log(z);
    e.psi = shift + log_z;
    e.probs = w / z;
    e.log_probs = s.array() - log_z;
    e.mean = points_.transpose() * e.probs;
    const MatrixXd centered = points_.rowwise() - e.mean.transpose();
    e.fisher = centered.transpose() * e.probs.asDiagonal() * centered;
    // psi - <theta, mu> = log z + sum_i p_i (log nu_i - s_i); every term >= 0
    double ent = log_z;
    for (Eigen::Index i = 0; i < n; ++i) ent += e.probs[i] * (log_counts_[i] - s[i]);
    e.entropy = ent;
    return e;
  }

  /// log p_theta(t_i) = <t_i, theta> - psi(theta) (density w.r.t. nu).
  double log_density(const FamilyEval& e, Eigen::Index i) const { return e.log_probs[i] - log_counts_[i]; }

  /// Same quantity as -log sum_t nu(t) exp(<t - t_i, theta>). Working with the
  /// differences t - t_i avoids cancelling two large numbers when |theta| is
  /// huge.
  double log_density_at(const VectorXd& theta, const VectorXd& x) const {
    VectorXd s = (points_.rowwise() - x.transpose()) * theta + log_counts_;
    const double shift = s.maxCoeff();
    return -(shift + std::log((s.array() - shift).exp().sum()));
  }
  double log_density_at(const VectorXd& theta, Eigen::Index i) const { return log_density_at(theta, VectorXd(points_.row(i).transpose())); }

 private:
  MatrixXd points_;
  std::vector<std::uint64_t> counts_;
  VectorXd log_counts_;
  std::vector<IntVec> int_points_;
  std::uint64_t total_ = 0;
};

/// Family restricted to the support points of one face.
struct FaceFamily {
  int face_id = 0;
  int dim = 0;
  std::vector<int> members;          // indices into the parent family's support
  ExpFamily family;                  // nu restricted to the members
  std::vector<VectorXd> lin_basis;   // non-identifiable directions lin(N_F)
  std::vector<VectorXd> identifiable;  // orthonormal complement of lin(N_F)

  /// Component of theta orthogonal to lin(N_F); the canonical member of its
  /// congruence class.
  VectorXd project(const VectorXd& theta) const {
    VectorXd out = VectorXd::Zero(theta.size());
    for (const auto& u : identifiable) out += u.dot(theta) * u;
    return out;
  }

  FamilyEval eval(const VectorXd& theta) const { return family.eval(theta); }
};

inline std::vector<VectorXd> orthogonal_complement(const std::vector<VectorXd>& basis, int k) {
  MatrixXd span = MatrixXd::Identity(k, k);
  if (!basis.empty()) {
    MatrixXd b(k, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) b.col(static_cast<Eigen::Index>(i)) = basis[i];
    span -= b * (b.transpose() * b).inverse() * b.transpose();
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(span);
  std::vector<VectorXd> out;
  for (Eigen::Index i = 0; i < k; ++i)
    if (es.eigenvalues()[i] > 0.5) out.push_back(es.eigenvectors().col(i));
  return out;
}

inline FaceFamily face_family(const ExpFamily& fam, const SupportPolytope& p, const std::vector<Face>& faces, const NormalFan& fan, int face_id) {
  if (face_id < 0 || face_id >= static_cast<int>(faces.size())) throw InfeasibleInput("unknown face id " + std::to_string(face_id));
  const Face& f = faces[static_cast<std::size_t>(face_id)];
  if (f.members.empty()) throw InfeasibleInput("face " + std::to_string(face_id) + " has no support points");
  FaceFamily out;
  out.face_id = face_id;
  out.dim = f.dim;
  MatrixXd pts(static_cast<Eigen::Index>(f.members.size()), fam.k());
  std::vector<std::uint64_t> counts;
  std::vector<IntVec> ints;
  for (std::size_t j = 0; j < f.members.size(); ++j) {
    const IntVec& t = p.support_points[static_cast<std::size_t>(f.members[j])];
    const int idx = fam.index_of(t);
    if (idx < 0) throw InfeasibleInput("face member is not in the family's support");
    out.members.push_back(idx);
    pts.row(static_cast<Eigen::Index>(j)) = fam.points().row(idx);
    counts.push_back(fam.counts()[static_cast<std::size_t>(idx)]);
    ints.push_back(t);
  }
  out.family = ExpFamily(std::move(pts), std::move(counts), std::move(ints));
  out.lin_basis = fan.cones[static_cast<std::size_t>(face_id)].lin_basis;
  out.identifiable = orthogonal_complement(out.lin_basis, fam.k());
  return out;
}

struct ThetaBox {
  double lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0;

  /// Default figure window [10,25] x [-25,10].
  static ThetaBox reference() { return {10, 25, -25, 10}; }
  /// [-r,r]^2 around the maximum-entropy parameter theta = 0.
  static ThetaBox centered(double r) { return {-r, r, -r, r}; }
  friend bool operator==(const ThetaBox&, const ThetaBox&) = default;
};

struct GridCell {
  VectorXd theta;
  double psi = 0;
  VectorXd mean;
  double entropy = 0;
};

/// Row-major entropy grid: row j holds theta2 = lo2 + j*(hi2-lo2)/(n2-1) and
/// theta1 runs along the row. A single sample on an axis sits at the midpoint.
struct EntropyGrid {
  ThetaBox box;
  int n1 = 0, n2 = 0;
  std::vector<GridCell> cells;
  const GridCell& at(int i1, int i2) const { return cells[static_cast<std::size_t>(i2 * n1 + i1)]; }
};

inline double grid_axis(double lo, double hi, int n, int i) {
  if (n == 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

inline EntropyGrid entropy_grid(const ExpFamily& fam, const ThetaBox& box, int n1, int n2) {
  if (fam.k() != 2) throw InfeasibleInput("entropy grids need a 2-parameter family");
  if (n1 < 1 || n2 < 1) throw InfeasibleInput("grid resolution must be positive");
  if (!std::isfinite(box.lo1) || !std::isfinite(box.hi1) || !std::isfinite(box.lo2) || !std::isfinite(box.hi2))
    throw InfeasibleInput("grid box must be finite");
  EntropyGrid g{box, n1, n2, {}};
  g.cells.reserve(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2));
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      VectorXd th(2);
      th << grid_axis(box.lo1, box.hi1, n1, i), grid_axis(box.lo2, box.hi2, n2, j);
      auto e = fam.eval(th);
      g.cells.push_back({th, e.psi, e.mean, e.entropy});
    }
  return g;
}

/// Push-forward of the family through t -> L t. Images closer than a relative
/// 1e-9 are merged by adding their counts.
inline ExpFamily linear_reparam(const ExpFamily& fam, const MatrixXd& L) {
  if (L.cols() != fam.k()) throw InfeasibleInput("L must have k columns");
  if (fam.size() >= 2) {
    MatrixXd diffs = fam.points().bottomRows(static_cast<Eigen::Index>(fam.size()) - 1).rowwise() - fam.points().row(0);
    Eigen::FullPivLU<MatrixXd> lu(L * diffs.transpose());
    lu.setThreshold(1e-10);
    if (lu.rank() < L.rows()) throw InfeasibleInput("L is rank deficient on the affine hull of the support");
  }
  const MatrixXd img = fam.points() * L.transpose();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(img.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    for (Eigen::Index c = 0; c < img.cols(); ++c)
      if (img(a, c) != img(b, c)) return img(a, c) < img(b, c);
    return false;
  });
  auto close = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < img.cols(); ++c)
      if (std::abs(img(a, c) - img(b, c)) > 1e-9 * (1.0 + std::abs(img(a, c)))) return false;
    return true;
  };
  std::vector<Eigen::Index> reps;
  std::vector<std::uint64_t> counts;
  for (auto i : order) {
    if (!reps.empty() && close(reps.back(), i)) {
      counts.back() += fam.counts()[static_cast<std::size_t>(i)];
    } else {
      reps.push_back(i);
      counts.push_back(fam.counts()[static_cast<std::size_t>(i)]);
    }
  }
  MatrixXd pts(static_cast<Eigen::Index>(reps.size()), L.rows());
  for (std::size_t r = 0; r < reps.size(); ++r) pts.row(static_cast<Eigen::Index>(r)) = img.row(reps[r]);

  // keep exact lattice coordinates when L is integral
  bool integral = !fam.int_points().empty();
  for (Eigen::Index a = 0; a < L.rows() && integral; ++a)
    for (Eigen::Index b = 0; b < L.cols(); ++b)
      if (L(a, b) != std::round(L(a, b))) integral = false;
  if (!integral) return ExpFamily(std::move(pts), std::move(counts));
  std::vector<IntVec> ints;
  for (auto r : reps) {
    IntVec t(static_cast<std::size_t>(L.rows()));
    for (Eigen::Index a = 0; a < L.rows(); ++a) t[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(std::llround(img(r, a)));
    ints.push_back(std::move(t));
  }
  return ExpFamily(std::move(pts), std::move(counts), std::move(ints));
}

/// Weights (-1)^(i-1) / lambda^(2-i), i = 2..g-1, of the alternating k-star
/// statistic as a row vector over the k-star counts S_2..S_{g-1}.
inline MatrixXd alternating_kstar_weights(int g, double lambda) {
  if (!(lambda > 0)) throw InfeasibleInput("alternating k-star needs lambda > 0");
  MatrixXd L(1, g - 2);
  for (int i = 2; i <= g - 1; ++i) L(0, i - 2) = ((i - 1) % 2 == 0 ? 1.0 : -1.0) / std::pow(lambda, 2 - i);
  return L;
}

}  // namespace ergx
