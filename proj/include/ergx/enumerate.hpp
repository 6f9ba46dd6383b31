#pragma once
// Exhaustive enumeration of labeled simple graphs and the induced measure
// nu(t) = #{graphs x : T(x) = t} over a small vector of integer statistics.

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cassert>
#include <cstdint>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#if defined(__BMI2__)
#include <immintrin.h>
#endif

#include "ergx/error.hpp"

namespace ergx {

inline constexpr int kMinNodes = 3;
inline constexpr int kMaxNodes = 9;
inline constexpr int kMaxStats = 3;

/// Exact binomial coefficient for the small arguments used here.
constexpr std::uint64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

enum class StatKind { edges, triangles, k_star, degree_count };

/// One integer-valued network statistic.
struct StatDescriptor {
  StatKind kind = StatKind::edges;
  int k = 0;  // star size for k_star, degree for degree_count

  static StatDescriptor edges() { return {StatKind::edges, 0}; }
  static StatDescriptor triangles() { return {StatKind::triangles, 0}; }
  static StatDescriptor k_star(int k) { return {StatKind::k_star, k}; }
  static StatDescriptor degree_count(int k) { return {StatKind::degree_count, k}; }

  friend bool operator==(const StatDescriptor&, const StatDescriptor&) = default;

  /// Throws unless the descriptor makes sense on graphs with g nodes.
  void validate(int g) const {
    switch (kind) {
      case StatKind::edges:
      case StatKind::triangles:
        return;
      case StatKind::k_star:
        if (k < 2 || k > g - 1)
          throw InfeasibleInput("k_star requires 2 <= k <= g-1 (got k=" + std::to_string(k) + ", g=" + std::to_string(g) + ")");
        return;
      case StatKind::degree_count:
        if (k < 0 || k > g - 1)
          throw InfeasibleInput("degree_count requires 0 <= k <= g-1 (got k=" + std::to_string(k) + ", g=" + std::to_string(g) + ")");
        return;
    }
  }

  /// Largest value the statistic can take on g nodes (axis length - 1).
  std::int64_t upper_bound(int g) const {
    switch (kind) {
      case StatKind::edges: return static_cast<std::int64_t>(binomial(g, 2));
      case StatKind::triangles: return static_cast<std::int64_t>(binomial(g, 3));
      case StatKind::k_star: return static_cast<std::int64_t>(g * binomial(g - 1, k));
      case StatKind::degree_count: return g;
    }
    return 0;
  }

  std::string name() const {
    switch (kind) {
      case StatKind::edges: return "edges";
      case StatKind::triangles: return "triangles";
      case StatKind::k_star: return "kstar" + std::to_string(k);
      case StatKind::degree_count: return "degree" + std::to_string(k);
    }
    return {};
  }

  /// Accepts "edges", "triangles", "kstar<k>", "degree<k>".
  static StatDescriptor parse(const std::string& s) {
    auto tail_int = [&](std::size_t off) {
      if (s.size() <= off) throw InfeasibleInput("missing integer in statistic '" + s + "'");
      for (std::size_t i = off; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') throw InfeasibleInput("bad integer in statistic '" + s + "'");
      return std::stoi(s.substr(off));
    };
    if (s == "edges") return edges();
    if (s == "triangles") return triangles();
    if (s.rfind("kstar", 0) == 0) return k_star(tail_int(5));
    if (s.rfind("degree", 0) == 0) return degree_count(tail_int(6));
    throw InfeasibleInput("unknown statistic '" + s + "'");
  }
};

/// Parses a comma separated statistic list such as "edges,triangles".
inline std::vector<StatDescriptor> parse_stats(const std::string& csv) {
  std::vector<StatDescriptor> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    auto next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    out.push_back(StatDescriptor::parse(csv.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

/// Adjacency bitsets plus the running aggregates the statistics need.
struct GraphState {
  int g = 0;
  std::array<std::uint16_t, kMaxNodes> adj{};
  std::array<int, kMaxNodes> degrees{};
  std::int64_t edge_count = 0;
  std::int64_t triangle_count = 0;

  GraphState() = default;
  explicit GraphState(int nodes) : g(nodes) {
    if (nodes < 1 || nodes > kMaxNodes) throw InfeasibleInput("GraphState supports 1..9 nodes");
  }

  bool has_edge(int u, int v) const { return (adj[u] >> v) & 1u; }

  /// Toggles edge (u,v) in place and returns +1 if it was added, -1 if removed.
  int toggle(int u, int v) {
    assert(u != v);
    adj[u] ^= static_cast<std::uint16_t>(1u << v);
    adj[v] ^= static_cast<std::uint16_t>(1u << u);
    const int sign = has_edge(u, v) ? 1 : -1;
    const int common = std::popcount(static_cast<unsigned>(adj[u] & adj[v]));
    degrees[u] += sign;
    degrees[v] += sign;
    edge_count += sign;
    triangle_count += sign * common;
    return sign;
  }

  /// Rebuilds the aggregates from the adjacency bitsets.
  void recompute() {
    edge_count = 0;
    triangle_count = 0;
    for (int i = 0; i < g; ++i) {
      degrees[i] = std::popcount(static_cast<unsigned>(adj[i]));
      edge_count += degrees[i];
    }
    edge_count /= 2;
    for (int i = 0; i < g; ++i)
      for (int j = i + 1; j < g; ++j)
        if (has_edge(i, j)) triangle_count += std::popcount(static_cast<unsigned>(adj[i] & adj[j] & ~((2u << j) - 1u)));
  }

  friend bool operator==(const GraphState&, const GraphState&) = default;
};

/// Returns a copy of `state` with edge (u,v) toggled.
inline GraphState flip_edge(GraphState state, int u, int v) {
  if (u == v || u < 0 || v < 0 || u >= state.g || v >= state.g) throw InfeasibleInput("flip_edge needs two distinct valid nodes");
  state.toggle(u, v);
  return state;
}

inline std::int64_t eval_stat(const StatDescriptor& desc, const GraphState& state) {
  switch (desc.kind) {
    case StatKind::edges: return state.edge_count;
    case StatKind::triangles: return state.triangle_count;
    case StatKind::k_star: {
      std::int64_t s = 0;
      for (int i = 0; i < state.g; ++i) s += static_cast<std::int64_t>(binomial(state.degrees[i], desc.k));
      return s;
    }
    case StatKind::degree_count: {
      std::int64_t s = 0;
      for (int i = 0; i < state.g; ++i) s += state.degrees[i] == desc.k;
      return s;
    }
  }
  return 0;
}

/// Edge slots in lexicographic (i,j), i<j order.
inline std::vector<std::pair<int, int>> edge_slots(int g) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) out.emplace_back(i, j);
  return out;
}

/// Dense histogram of statistic vectors over the lattice box
/// [0, ub_1] x ... x [0, ub_k]; axis 0 is the most significant.
class InducedMeasure {
 public:
  InducedMeasure() = default;
  InducedMeasure(int g, std::vector<StatDescriptor> stats) : g_(g), stats_(std::move(stats)) {
    for (const auto& s : stats_) dims_.push_back(s.upper_bound(g_) + 1);
    counts_.assign(cell_count(g_, stats_), 0);
  }

  static std::size_t cell_count(int g, const std::vector<StatDescriptor>& stats) {
    std::size_t n = 1;
    for (const auto& s : stats) n *= static_cast<std::size_t>(s.upper_bound(g) + 1);
    return n;
  }

  int g() const { return g_; }
  int k() const { return static_cast<int>(stats_.size()); }
  const std::vector<StatDescriptor>& stats() const { return stats_; }
  const std::vector<std::int64_t>& dims() const { return dims_; }
  const std::vector<std::uint64_t>& dense() const { return counts_; }
  std::vector<std::uint64_t>& dense() { return counts_; }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }

  std::size_t index(const std::vector<std::int64_t>& t) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < dims_.size(); ++a) {
      if (t[a] < 0 || t[a] >= dims_[a]) throw InfeasibleInput("statistic vector outside the lattice box");
      idx = idx * static_cast<std::size_t>(dims_[a]) + static_cast<std::size_t>(t[a]);
    }
    return idx;
  }

  std::vector<std::int64_t> point(std::size_t idx) const {
    std::vector<std::int64_t> t(dims_.size());
    for (std::size_t a = dims_.size(); a-- > 0;) {
      t[a] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(dims_[a]));
      idx /= static_cast<std::size_t>(dims_[a]);
    }
    return t;
  }

  std::uint64_t count(const std::vector<std::int64_t>& t) const { return counts_[index(t)]; }
  void add(const std::vector<std::int64_t>& t, std::uint64_t c) { counts_[index(t)] += c; }

  /// Support points with their counts, lexicographically sorted by t.
  std::vector<std::pair<std::vector<std::int64_t>, std::uint64_t>> support() const {
    std::vector<std::pair<std::vector<std::int64_t>, std::uint64_t>> out;
    for (std::size_t i = 0; i < counts_.size(); ++i)
      if (counts_[i] > 0) out.emplace_back(point(i), counts_[i]);
    return out;
  }

  std::size_t support_size() const {
    return static_cast<std::size_t>(std::count_if(counts_.begin(), counts_.end(), [](auto c) { return c > 0; }));
  }

  friend bool operator==(const InducedMeasure&, const InducedMeasure&) = default;

 private:
  int g_ = 0;
  std::vector<StatDescriptor> stats_;
  std::vector<std::int64_t> dims_;
  std::vector<std::uint64_t> counts_;
};

struct EnumerateOptions {
  int workers = 1;
  std::size_t cell_budget = std::size_t{1} << 22;
};

namespace detail {

inline void check_enumeration_request(int g, const std::vector<StatDescriptor>& stats, const EnumerateOptions& opts) {
  if (g > kMaxNodes) throw InfeasibleInput("enumeration infeasible for g=" + std::to_string(g) + " (at most 9 nodes)");
  if (g < kMinNodes) throw InfeasibleInput("enumeration needs g >= 3");
  if (stats.empty() || stats.size() > static_cast<std::size_t>(kMaxStats)) throw InfeasibleInput("between 1 and 3 statistics are supported");
  if (opts.workers < 1) throw InfeasibleInput("workers must be >= 1");
  for (const auto& s : stats) s.validate(g);
  if (InducedMeasure::cell_count(g, stats) > opts.cell_budget)
    throw InfeasibleInput("statistic lattice box has " + std::to_string(InducedMeasure::cell_count(g, stats)) +
                          " cells, above the budget of " + std::to_string(opts.cell_budget));
}

/// Number of fixed leading edge variables: smallest p with 2^p >= 4*workers.
inline int partition_bits(int edges, int workers) {
  int p = 0;
  while ((std::int64_t{1} << p) < 4 * static_cast<std::int64_t>(workers)) ++p;
  return std::min(p, edges);
}


inline std::size_t state_index(const std::vector<StatDescriptor>& stats, const std::vector<std::int64_t>& dims, const GraphState& s) {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < stats.size(); ++a) idx = idx * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(eval_stat(stats[a], s));
  return idx;
}

inline std::vector<std::size_t> strides(const std::vector<std::int64_t>& dims) {
  std::vector<std::size_t> st(dims.size(), 1);
  for (std::size_t a = dims.size(); a-- > 1;) st[a - 1] = st[a] * static_cast<std::size_t>(dims[a]);
  return st;
}

// Edges/triangles only: the index moves by sign*(s_e + s_t*common).
inline void sweep_edges_triangles(GraphState s, const std::pair<int, int>* free_slots, int free_count, std::size_t idx,
                                  std::size_t stride_e, std::size_t stride_t, std::uint64_t* hist) {
  hist[idx] += 1;
  const std::uint64_t steps = std::uint64_t{1} << free_count;
#if defined(__BMI2__)
  // Whole graph in one word, bit e = edge slot e. For a flipped slot (u,v) the
  // common neighbourhood is popcount(pext(X, Mu) & pext(X, Mv)), where Mu/Mv
  // select the slots (u,w) and (v,w) for w != u,v; both extract in w order.
  const int g = s.g;
  auto slot_of = [g](int a, int b) {
    if (a > b) std::swap(a, b);
    return a * g - a * (a + 1) / 2 + (b - a - 1);
  };
  std::uint64_t x = 0;
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j)
      if (s.has_edge(i, j)) x |= std::uint64_t{1} << slot_of(i, j);
  struct Flip {
    std::uint64_t bit, mu, mv;
    int pos;
  };
  std::array<Flip, 64> flips{};
  for (int f = 0; f < free_count; ++f) {
    const auto [u, v] = free_slots[f];
    Flip fl{std::uint64_t{1} << slot_of(u, v), 0, 0, slot_of(u, v)};
    for (int w = 0; w < g; ++w) {
      if (w == u || w == v) continue;
      fl.mu |= std::uint64_t{1} << slot_of(u, w);
      fl.mv |= std::uint64_t{1} << slot_of(v, w);
    }
    flips[static_cast<std::size_t>(f)] = fl;
  }
  auto apply = [&](const Flip& fl) {
    x ^= fl.bit;
    const std::size_t delta = stride_e + stride_t * static_cast<std::size_t>(std::popcount(_pext_u64(x, fl.mu) & _pext_u64(x, fl.mv)));
    const std::size_t added = (x >> fl.pos) & 1u;
    idx += (delta ^ (added - 1)) + (1 - added);  // +delta or -delta without a branch
    hist[idx] += 1;
  };
  if (free_count == 0) return;
  // odd steps always flip the first free slot; even steps flip slot ctz(step)
  const Flip low = flips[0];
  for (std::uint64_t step = 1; step < steps; step += 2) {
    apply(low);
    if (step + 1 < steps) apply(flips[static_cast<std::size_t>(std::countr_zero(step + 1))]);
  }
#else
  std::array<std::uint32_t, kMaxNodes> adj{};
  for (int i = 0; i < s.g; ++i) adj[i] = s.adj[i];
  for (std::uint64_t step = 1; step < steps; ++step) {
    const auto [u, v] = free_slots[std::countr_zero(step)];
    adj[u] ^= 1u << v;
    adj[v] ^= 1u << u;
    const std::size_t delta = stride_e + stride_t * static_cast<std::size_t>(std::popcount(adj[u] & adj[v]));
    if ((adj[u] >> v) & 1u)
      idx += delta;
    else
      idx -= delta;
    hist[idx] += 1;
  }
#endif
}

inline void sweep_general(GraphState s, const std::pair<int, int>* free_slots, int free_count, const std::vector<StatDescriptor>& stats,
                          const std::vector<std::size_t>& stride, std::size_t idx, std::uint64_t* hist) {
  std::array<std::array<std::int64_t, kMaxNodes + 1>, kMaxStats> star_gain{};  // C(d, k-1)
  for (std::size_t a = 0; a < stats.size(); ++a)
    if (stats[a].kind == StatKind::k_star)
      for (int d = 0; d <= kMaxNodes; ++d) star_gain[a][d] = static_cast<std::int64_t>(binomial(d, stats[a].k - 1));
  const int nstats = static_cast<int>(stats.size());
  hist[idx] += 1;
  const std::uint64_t steps = std::uint64_t{1} << free_count;
  for (std::uint64_t step = 1; step < steps; ++step) {
    const auto [u, v] = free_slots[std::countr_zero(step)];
    const int du = s.degrees[u], dv = s.degrees[v];
    const std::int64_t tri_before = s.triangle_count;
    const int sign = s.toggle(u, v);
    std::int64_t shift = 0;
    for (int a = 0; a < nstats; ++a) {
      std::int64_t d = 0;
      switch (stats[a].kind) {
        case StatKind::edges: d = sign; break;
        case StatKind::triangles: d = s.triangle_count - tri_before; break;
        case StatKind::k_star:
          // adding raises C(d,k) by C(d,k-1) at the old degree; removing lowers by C(d-1,k-1)
          d = sign > 0 ? star_gain[a][du] + star_gain[a][dv] : -(star_gain[a][du - 1] + star_gain[a][dv - 1]);
          break;
        case StatKind::degree_count: {
          const int k = stats[a].k;
          d = -(du == k) - (dv == k) + (s.degrees[u] == k) + (s.degrees[v] == k);
          break;
        }
      }
      shift += d * static_cast<std::int64_t>(stride[a]);
    }
    idx = static_cast<std::size_t>(static_cast<std::int64_t>(idx) + shift);
    hist[idx] += 1;
  }
}

}  // namespace detail

/// Exact induced measure over all 2^C(g,2) labeled graphs on g nodes.
///
/// The first p edge variables (lexicographic order) are fixed per partition,
/// with 2^p >= 4*workers; each partition is swept in reflected Gray-code order
/// over the remaining slots so exactly one edge flips per step. Workers pull
/// partitions from a shared counter and accumulate into private histograms
/// that are summed at the end, so the result does not depend on `workers`.
inline InducedMeasure enumerate_measure(int g, const std::vector<StatDescriptor>& stats, const EnumerateOptions& opts = {}) {
  detail::check_enumeration_request(g, stats, opts);
  InducedMeasure out(g, stats);
  const auto slots = edge_slots(g);
  const int edges = static_cast<int>(slots.size());
  const int p = detail::partition_bits(edges, opts.workers);
  const int free_count = edges - p;
  const std::uint64_t partitions = std::uint64_t{1} << p;
  const auto stride = detail::strides(out.dims());

  bool fast = true;
  std::size_t stride_e = 0, stride_t = 0;
  for (std::size_t a = 0; a < stats.size(); ++a) {
    if (stats[a].kind == StatKind::edges)
      stride_e += stride[a];
    else if (stats[a].kind == StatKind::triangles)
      stride_t += stride[a];
    else
      fast = false;
  }

  const int workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(opts.workers), partitions));
  std::vector<std::vector<std::uint64_t>> hists(static_cast<std::size_t>(workers), std::vector<std::uint64_t>(out.dense().size(), 0));
  std::atomic<std::uint64_t> next{0};

  auto work = [&](int w) {
    auto& hist = hists[static_cast<std::size_t>(w)];
    for (std::uint64_t part = next++; part < partitions; part = next++) {
      GraphState s(g);
      for (int e = 0; e < p; ++e)
        if ((part >> e) & 1u) s.toggle(slots[e].first, slots[e].second);
      const std::size_t idx = detail::state_index(stats, out.dims(), s);
      if (fast)
        detail::sweep_edges_triangles(s, slots.data() + p, free_count, idx, stride_e, stride_t, hist.data());
      else
        detail::sweep_general(s, slots.data() + p, free_count, stats, stride, idx, hist.data());
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  auto& dense = out.dense();
  for (const auto& h : hists)
    for (std::size_t i = 0; i < dense.size(); ++i) {
      assert(dense[i] + h[i] >= dense[i]);
      dense[i] += h[i];
    }
  return out;
}

enum class QuantileRule {
  midpoint,  // piecewise linear through ((i - 0.5)/n, v_(i)), clamped at the ends
  lower,     // smallest v with at least ceil(q*n) of the n values <= v
};

/// Empirical quantile of the positive counts {nu(t) : nu(t) > 0}. The
/// midpoint rule interpolates between order statistics, so the result can be
/// a half-integer.
inline double measure_quantile(std::vector<std::uint64_t> v, double q, QuantileRule rule = QuantileRule::midpoint) {
  if (!(q >= 0.0 && q <= 1.0)) throw InfeasibleInput("quantile level must lie in [0,1]");
  std::erase(v, std::uint64_t{0});
  if (v.empty()) throw InfeasibleInput("quantile of an empty measure");
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  if (rule == QuantileRule::lower) {
    const double pos = q * n;
    auto rank = static_cast<std::size_t>(pos);
    if (static_cast<double>(rank) < pos) ++rank;
    return static_cast<double>(v[rank == 0 ? 0 : rank - 1]);
  }
  const double h = q * n + 0.5;  // 1-based fractional position
  if (h <= 1.0) return static_cast<double>(v.front());
  if (h >= n) return static_cast<double>(v.back());
  const auto lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  return static_cast<double>(v[lo - 1]) + frac * (static_cast<double>(v[lo]) - static_cast<double>(v[lo - 1]));
}

inline double measure_quantile(const InducedMeasure& m, double q, QuantileRule rule = QuantileRule::midpoint) {
  return measure_quantile(m.dense(), q, rule);
}

}  // namespace ergx
