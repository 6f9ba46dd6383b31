#pragma once
// Exact rational linear programming for certifying whether an observed
// statistic lies in the relative interior of the convex support.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ergx/error.hpp"
#include "ergx/rational.hpp"

namespace ergx::lp {

struct VarBound {
  bool nonneg = true;
  std::optional<Rational> upper;
};

/// maximize <objective, x>
///   s.t. eq * x = eq_rhs, le * x <= le_rhs, bounds per variable
/// An empty `bounds` means every variable is nonnegative with no upper bound.
struct DenseLP {
  RationalVec objective;
  RationalMatrix eq;
  RationalVec eq_rhs;
  RationalMatrix le;
  RationalVec le_rhs;
  std::vector<VarBound> bounds;

  std::size_t num_vars() const { return objective.size(); }

  void validate() const {
    const auto n = num_vars();
    if (eq.size() != eq_rhs.size() || le.size() != le_rhs.size()) throw InfeasibleInput("LP row/rhs count mismatch");
    for (const auto& r : eq)
      if (r.size() != n) throw InfeasibleInput("LP equality row has wrong width");
    for (const auto& r : le)
      if (r.size() != n) throw InfeasibleInput("LP inequality row has wrong width");
    if (!bounds.empty() && bounds.size() != n) throw InfeasibleInput("LP bounds size mismatch");
  }
};

enum class Status { optimal, infeasible, unbounded };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
  }
  return {};
}

struct Result {
  Status status = Status::infeasible;
  Rational value;
  RationalVec solution;
  RationalVec eq_duals;  // shadow prices of the equality rows at the optimum
  RationalVec le_duals;
  std::size_t pivots = 0;
};

namespace detail {

class Tableau {
 public:
  Tableau(RationalMatrix rows, RationalVec rhs, std::size_t structural)
      : m_(rows.size()), n_(structural), cells_(m_, RationalVec(n_ + m_ + 1)), basis_(m_), sign_(m_, 1) {
    for (std::size_t r = 0; r < m_; ++r) {
      if (rhs[r] < 0) {
        sign_[r] = -1;
        for (auto& v : rows[r]) v = -v;
        rhs[r] = -rhs[r];
      }
      for (std::size_t j = 0; j < n_; ++j) cells_[r][j] = rows[r][j];
      cells_[r][n_ + r] = 1;
      cells_[r][n_ + m_] = rhs[r];
      basis_[r] = n_ + r;
    }
    // Bland's rule terminates, so this is only a tripwire.
    pivot_limit_ = std::lgamma(static_cast<double>(n_ + 2 * m_) + 1.0) - std::lgamma(static_cast<double>(m_) + 1.0) -
                   std::lgamma(static_cast<double>(n_ + m_) + 1.0);
  }

  std::size_t rows() const { return m_; }
  std::size_t pivots() const { return pivots_; }
  const Rational& rhs(std::size_t r) const { return cells_[r][n_ + m_]; }
  std::size_t basic(std::size_t r) const { return basis_[r]; }
  int sign(std::size_t r) const { return sign_[r]; }
  const Rational& at(std::size_t r, std::size_t j) const { return cells_[r][j]; }
  bool is_artificial(std::size_t j) const { return j >= n_; }
  std::size_t artificial(std::size_t r) const { return n_ + r; }

  /// Runs primal simplex with Bland's rule on cost vector `cost` (length
  /// n + m). Returns false if unbounded.
  bool optimize(const RationalVec& cost, bool allow_artificial) {
    const std::size_t cols = allow_artificial ? n_ + m_ : n_;
    for (;;) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols; ++j) {
        if (is_basic(j)) continue;
        Rational reduced = cost[j];
        for (std::size_t r = 0; r < m_; ++r)
          if (cells_[r][j] != 0) reduced -= cost[basis_[r]] * cells_[r][j];
        if (reduced > 0) {
          enter = j;
          break;
        }
      }
      if (enter == cols) return true;
      std::size_t leave = m_;
      Rational best;
      for (std::size_t r = 0; r < m_; ++r) {
        if (cells_[r][enter] <= 0) continue;
        Rational ratio = rhs(r) / cells_[r][enter];
        if (leave == m_ || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    if (static_cast<double>(++pivots_) > std::exp(std::min(pivot_limit_, 700.0)))
      throw NumericalFailure("simplex pivot count exceeded the combinatorial bound");
    const Rational p = cells_[row][col];
    for (auto& v : cells_[row]) v /= p;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == row || cells_[r][col] == 0) continue;
      const Rational f = cells_[r][col];
      for (std::size_t j = 0; j < cells_[r].size(); ++j)
        if (cells_[row][j] != 0) cells_[r][j] -= f * cells_[row][j];
    }
    basis_[row] = col;
  }

  bool is_basic(std::size_t j) const {
    for (auto b : basis_)
      if (b == j) return true;
    return false;
  }

 private:
  std::size_t m_, n_;
  RationalMatrix cells_;
  std::vector<std::size_t> basis_;
  std::vector<int> sign_;
  std::size_t pivots_ = 0;
  double pivot_limit_ = 0;
};

}  // namespace detail

/// Two-phase primal simplex in exact arithmetic with Bland's anti-cycling
/// rule. Phase 1 uses one artificial per row.
inline Result simplex_solve(const DenseLP& lp) {
  lp.validate();
  const std::size_t n = lp.num_vars();
  auto bound = [&](std::size_t j) { return lp.bounds.empty() ? VarBound{} : lp.bounds[j]; };

  // Standard form column layout: [x_j or x_j^+] [x_j^- for free j] [slacks].
  std::vector<std::size_t> pos(n), neg(n, SIZE_MAX);
  std::size_t cols = 0;
  for (std::size_t j = 0; j < n; ++j) pos[j] = cols++;
  for (std::size_t j = 0; j < n; ++j)
    if (!bound(j).nonneg) neg[j] = cols++;
  std::size_t upper_rows = 0;
  for (std::size_t j = 0; j < n; ++j) upper_rows += bound(j).upper.has_value();
  const std::size_t slack0 = cols;
  cols += lp.le.size() + upper_rows;

  RationalMatrix rows;
  RationalVec rhs;
  auto expand = [&](const RationalVec& coef) {
    RationalVec row(cols);
    for (std::size_t j = 0; j < n; ++j) {
      row[pos[j]] = coef[j];
      if (neg[j] != SIZE_MAX) row[neg[j]] = -coef[j];
    }
    return row;
  };
  for (std::size_t i = 0; i < lp.eq.size(); ++i) {
    rows.push_back(expand(lp.eq[i]));
    rhs.push_back(lp.eq_rhs[i]);
  }
  std::size_t slack = slack0;
  for (std::size_t i = 0; i < lp.le.size(); ++i) {
    rows.push_back(expand(lp.le[i]));
    rows.back()[slack++] = 1;
    rhs.push_back(lp.le_rhs[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!bound(j).upper) continue;
    RationalVec unit(n);
    unit[j] = 1;
    rows.push_back(expand(unit));
    rows.back()[slack++] = 1;
    rhs.push_back(*bound(j).upper);
  }

  const std::size_t m = rows.size();
  detail::Tableau tab(std::move(rows), std::move(rhs), cols);
  Result res;

  RationalVec phase1(cols + m);
  for (std::size_t r = 0; r < m; ++r) phase1[cols + r] = -1;
  tab.optimize(phase1, true);
  Rational infeas;
  for (std::size_t r = 0; r < m; ++r)
    if (tab.is_artificial(tab.basic(r))) infeas += tab.rhs(r);
  if (infeas > 0) {
    res.status = Status::infeasible;
    res.pivots = tab.pivots();
    return res;
  }
  // Drive zero-level artificials out of the basis; rows with no structural
  // entry are redundant and keep their artificial at zero.
  for (std::size_t r = 0; r < m; ++r) {
    if (!tab.is_artificial(tab.basic(r))) continue;
    for (std::size_t j = 0; j < cols; ++j)
      if (tab.at(r, j) != 0 && !tab.is_basic(j)) {
        tab.pivot(r, j);
        break;
      }
  }

  RationalVec phase2(cols + m);
  for (std::size_t j = 0; j < n; ++j) {
    phase2[pos[j]] = lp.objective[j];
    if (neg[j] != SIZE_MAX) phase2[neg[j]] = -lp.objective[j];
  }
  if (!tab.optimize(phase2, false)) {
    res.status = Status::unbounded;
    res.pivots = tab.pivots();
    return res;
  }

  RationalVec std_x(cols);
  for (std::size_t r = 0; r < m; ++r)
    if (!tab.is_artificial(tab.basic(r))) std_x[tab.basic(r)] = tab.rhs(r);
  res.status = Status::optimal;
  res.solution.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    res.solution[j] = std_x[pos[j]];
    if (neg[j] != SIZE_MAX) res.solution[j] -= std_x[neg[j]];
    res.value += lp.objective[j] * res.solution[j];
  }
  // pi = c_B B^{-1}; B^{-1} sits under the artificial columns.
  RationalVec duals(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rational d;
    for (std::size_t r = 0; r < m; ++r) d += phase2[tab.basic(r)] * tab.at(r, tab.artificial(i));
    duals[i] = tab.sign(i) < 0 ? Rational(-d) : d;
  }
  res.eq_duals.assign(duals.begin(), duals.begin() + static_cast<std::ptrdiff_t>(lp.eq.size()));
  res.le_duals.assign(duals.begin() + static_cast<std::ptrdiff_t>(lp.eq.size()),
                      duals.begin() + static_cast<std::ptrdiff_t>(lp.eq.size() + lp.le.size()));
  res.pivots = tab.pivots();
  return res;
}

struct RelintResult {
  bool inside = false;
  Rational s_star;
  RationalVec z;  // optimal combination weights, Bz = x
};

/// Decides whether x = Bz for some z with strictly positive entries by
///   max s  s.t.  Bz = x,  z_i - s >= 0,  s >= 0,
/// with z = s*1 + u, u >= 0. Columns of B (rows here are coordinates) are
/// the generating points; append an all-ones row to B and a 1 to x to ask
/// about strictly positive convex combinations.
inline RelintResult relint_feasibility(const RationalMatrix& B, const RationalVec& x) {
  if (B.size() != x.size()) throw InfeasibleInput("relint_feasibility: x has " + std::to_string(x.size()) + " entries, B has " + std::to_string(B.size()) + " rows");
  const std::size_t n = B.empty() ? 0 : B[0].size();
  DenseLP lp;
  lp.objective.assign(n + 1, 0);
  lp.objective[0] = 1;  // variable 0 is s, then u_1..u_n
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (B[i].size() != n) throw InfeasibleInput("relint_feasibility: ragged B");
    RationalVec row(n + 1);
    for (std::size_t j = 0; j < n; ++j) {
      row[0] += B[i][j];
      row[j + 1] = B[i][j];
    }
    lp.eq.push_back(std::move(row));
    lp.eq_rhs.push_back(x[i]);
  }
  auto res = simplex_solve(lp);
  RelintResult out;
  if (res.status == Status::unbounded) throw NumericalFailure("relint_feasibility LP unbounded; B has a zero column set");
  if (res.status == Status::infeasible) return out;
  out.s_star = res.solution[0];
  out.inside = out.s_star > 0;
  out.z.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.z[j] = out.s_star + res.solution[j + 1];
  return out;
}

/// Points (one per row) as the k x n coordinate matrix with an appended
/// all-ones row, ready for relint_feasibility together with `augment`.
inline RationalMatrix convex_combination_matrix(const RationalMatrix& points) {
  const std::size_t k = points.empty() ? 0 : points[0].size();
  RationalMatrix B(k + 1, RationalVec(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    for (std::size_t a = 0; a < k; ++a) B[a][j] = points[j][a];
    B[k][j] = 1;
  }
  return B;
}

inline RationalVec augment(RationalVec x) {
  x.emplace_back(1);
  return x;
}

struct GordanResult {
  int alternative = 0;     // 1: Bx > 0 solvable, 2: B^T y = 0 with y >= 0, y != 0
  RationalVec x_witness;   // alternative 1
  RationalVec y_witness;   // alternative 2
  Rational lp_value;       // optimum of max <1,y>, B^T y = 0, 0 <= y <= 1
};

/// Gordan's theorem of alternatives for an m x n matrix B (row major).
/// Exactly one alternative is returned, with an exact witness.
inline GordanResult gordan_alternative(const RationalMatrix& B) {
  const std::size_t m = B.size();
  const std::size_t n = m == 0 ? 0 : B[0].size();
  for (const auto& r : B)
    if (r.size() != n) throw InfeasibleInput("gordan_alternative: ragged B");
  GordanResult out;

  DenseLP ylp;
  ylp.objective.assign(m, 1);
  for (std::size_t j = 0; j < n; ++j) {
    RationalVec row(m);
    for (std::size_t i = 0; i < m; ++i) row[i] = B[i][j];
    ylp.eq.push_back(std::move(row));
    ylp.eq_rhs.emplace_back(0);
  }
  ylp.bounds.assign(m, VarBound{true, Rational(1)});
  auto yres = simplex_solve(ylp);
  if (yres.status != Status::optimal) throw NumericalFailure("Gordan LP did not reach an optimum");
  out.lp_value = yres.value;
  if (yres.value > 0) {
    out.alternative = 2;
    out.y_witness = yres.solution;
    return out;
  }

  // Bx > 0 is solvable iff Bx >= 1 is (scale invariance).
  DenseLP xlp;
  xlp.objective.assign(n, 0);
  xlp.bounds.assign(n, VarBound{false, std::nullopt});
  for (std::size_t i = 0; i < m; ++i) {
    RationalVec row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = -B[i][j];
    xlp.le.push_back(std::move(row));
    xlp.le_rhs.emplace_back(-1);
  }
  auto xres = simplex_solve(xlp);
  if (xres.status != Status::optimal) throw NumericalFailure("Gordan alternatives both failed; LP solver inconsistency");
  out.alternative = 1;
  out.x_witness = xres.solution;
  return out;
}

/// Exact basis of ker(M) for a row-major M, one basis vector per column of
/// the returned n x d matrix.
inline RationalMatrix kernel_basis(RationalMatrix M, std::size_t n) {
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < M.size(); ++col) {
    std::size_t sel = row;
    while (sel < M.size() && M[sel][col] == 0) ++sel;
    if (sel == M.size()) continue;
    std::swap(M[sel], M[row]);
    const Rational p = M[row][col];
    for (auto& v : M[row]) v /= p;
    for (std::size_t r = 0; r < M.size(); ++r) {
      if (r == row || M[r][col] == 0) continue;
      const Rational f = M[r][col];
      for (std::size_t j = 0; j < n; ++j) M[r][j] -= f * M[row][j];
    }
    pivot_cols.push_back(col);
    ++row;
  }
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivot_cols) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  RationalMatrix K(n, RationalVec(free_cols.size()));
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    K[free_cols[f]][f] = 1;
    for (std::size_t r = 0; r < pivot_cols.size(); ++r) K[pivot_cols[r]][f] = -M[r][free_cols[f]];
  }
  return K;
}

/// The k x n matrix of support points translated by x (column i = t_i - x).
inline RationalMatrix translated_support(const RationalMatrix& points, const RationalVec& x) {
  RationalMatrix M(x.size(), RationalVec(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != x.size()) throw InfeasibleInput("support point and x differ in dimension");
    for (std::size_t a = 0; a < x.size(); ++a) M[a][i] = points[i][a] - x[a];
  }
  return M;
}

/// Gordan matrix of the existence question: a basis of ker(M), M the
/// translated support. B u > 0 is a strictly positive balancing of the
/// translated points (x in the relative interior); B^T y = 0, y >= 0, y != 0
/// means y = M^T w is a nonzero nonnegative slack vector, so -w is an outer
/// normal of a face containing x.
inline RationalMatrix existence_gordan_matrix(const RationalMatrix& points, const RationalVec& x) {
  return kernel_basis(translated_support(points, x), points.size());
}

struct ExistenceCertificate {
  GordanResult gordan;  // alternative 1: exists, x_witness = z = Bu > 0 with Mz = 0
  RationalVec w;        // alternative 2: y_witness = M^T w
};

/// Same verdict as gordan_alternative(existence_gordan_matrix(points, x)) but
/// solved through k-row LPs: the Gordan LP max <1,y>, y = M^T w, 0 <= y <= 1
/// is read off the dual of
///   max -<1,beta>  s.t.  M(beta - alpha) = M 1,  alpha, beta >= 0,
/// whose shadow prices pi give w = -pi. The alternative-1 witness is a
/// z >= 1 with Mz = 0 (so z = Bu for the kernel basis B).
inline ExistenceCertificate existence_gordan(const RationalMatrix& points, const RationalVec& x) {
  const RationalMatrix M = translated_support(points, x);
  const std::size_t k = M.size(), n = points.size();
  ExistenceCertificate out;

  DenseLP dual;
  dual.objective.assign(2 * n, 0);
  for (std::size_t i = 0; i < n; ++i) dual.objective[n + i] = -1;
  for (std::size_t a = 0; a < k; ++a) {
    RationalVec row(2 * n);
    Rational rhs;
    for (std::size_t i = 0; i < n; ++i) {
      row[i] = -M[a][i];
      row[n + i] = M[a][i];
      rhs += M[a][i];
    }
    dual.eq.push_back(std::move(row));
    dual.eq_rhs.push_back(rhs);
  }
  auto dres = simplex_solve(dual);
  if (dres.status != Status::optimal) throw NumericalFailure("existence Gordan dual LP did not reach an optimum");
  out.gordan.lp_value = -dres.value;
  if (out.gordan.lp_value > 0) {
    out.w.resize(k);
    for (std::size_t a = 0; a < k; ++a) out.w[a] = -dres.eq_duals[a];
    out.gordan.y_witness.assign(n, 0);
    Rational sum;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < k; ++a) out.gordan.y_witness[i] += M[a][i] * out.w[a];
      const auto& y = out.gordan.y_witness[i];
      if (y < 0 || y > 1) throw NumericalFailure("existence Gordan witness violates 0 <= y <= 1");
      sum += y;
    }
    if (sum != out.gordan.lp_value) throw NumericalFailure("existence Gordan witness does not attain the LP optimum");
    out.gordan.alternative = 2;
    return out;
  }

  DenseLP pos;  // z = 1 + u, M u = -M 1
  pos.objective.assign(n, 0);
  for (std::size_t a = 0; a < k; ++a) {
    Rational rhs;
    for (std::size_t i = 0; i < n; ++i) rhs -= M[a][i];
    pos.eq.push_back(M[a]);
    pos.eq_rhs.push_back(rhs);
  }
  auto pres = simplex_solve(pos);
  if (pres.status != Status::optimal) throw NumericalFailure("existence Gordan alternatives both failed");
  out.gordan.alternative = 1;
  out.gordan.x_witness.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.gordan.x_witness[i] = pres.solution[i] + 1;
  return out;
}

}  // namespace ergx::lp
