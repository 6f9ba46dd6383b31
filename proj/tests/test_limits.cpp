#include <gtest/gtest.h>

#include <random>

#include "ergx/geometry.hpp"
#include "ergx/limits.hpp"

using namespace ergx;

namespace {

struct Model {
  ExpFamily fam;
  SupportPolytope poly;
  std::vector<Face> faces;
  NormalFan fan;
};

const Model& g7() {
  static const Model m = [] {
    const auto meas = enumerate_measure(7, parse_stats("edges,triangles"));
    Model out{ExpFamily(meas), build_polytope(meas), {}, {}};
    out.faces = face_lattice(out.poly);
    out.fan = normal_fan(out.poly, out.faces);
    return out;
  }();
  return m;
}

VectorXd vec(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

LimitDiagnostics ray(const VectorXd& theta0, const VectorXd& d, std::optional<IntVec> x = std::nullopt, double jitter = 0) {
  const auto& m = g7();
  return run_ray(m.fam, m.poly, m.faces, m.fan, RaySequence::make(theta0, d), std::move(x), jitter, 1);
}

}  // namespace

TEST(Ray, DownwardRayConcentratesOnTriangleFreeGraphs) {
  const auto diag = ray(VectorXd::Zero(2), vec(0, -1));
  EXPECT_EQ(diag.target.dim, 1);
  EXPECT_TRUE(diag.converged);
  EXPECT_TRUE(diag.monotone);
  EXPECT_TRUE(diag.fisher_ok);
  EXPECT_TRUE(diag.entropy_ok);
  EXPECT_NEAR(diag.target_mean[1], 0.0, 1e-12);
  EXPECT_LT(diag.records.back().tv, 1e-12);
  // KL to the limit is nonnegative and shrinks along the ray
  for (std::size_t n = 0; n < diag.records.size(); ++n) {
    EXPECT_GE(diag.records[n].kl, 0);
    if (n > 0) EXPECT_LE(diag.records[n].kl, diag.records[n - 1].kl + 1e-12);
  }
}

TEST(Ray, EveryProperFaceIsReachedAlongItsCone) {
  const auto& m = g7();
  int proper = 0;
  for (const auto& f : m.faces) {
    if (f.dim == 2) continue;
    ++proper;
    const auto& cone = m.fan.cones[static_cast<std::size_t>(f.id)];
    const VectorXd d = f.dim == 1 ? vec(static_cast<double>(cone.generators[0][0]), static_cast<double>(cone.generators[0][1]))
                                  : sample_ri_direction(cone, static_cast<std::uint64_t>(f.id));
    for (const VectorXd& theta0 : {VectorXd(VectorXd::Zero(2)), vec(0.3, -0.7)}) {
      const auto diag = ray(theta0, d);
      EXPECT_EQ(diag.target.face_id, f.id);
      EXPECT_TRUE(diag.converged) << f.id << " tv " << diag.records.back().tv;
      EXPECT_TRUE(diag.monotone) << f.id;
      EXPECT_TRUE(diag.fisher_ok) << f.id;
      EXPECT_TRUE(diag.entropy_ok) << f.id;
      EXPECT_EQ(diag.target_fisher_rank, f.dim);
    }
  }
  EXPECT_EQ(proper, 2 * static_cast<int>(m.poly.num_vertices()));
}

TEST(Ray, JitteredSequencesStillConverge) {
  const auto& m = g7();
  for (const auto& f : m.faces) {
    if (f.dim != 0) continue;
    const VectorXd d = sample_ri_direction(m.fan.cones[static_cast<std::size_t>(f.id)], 99);
    const auto diag = ray(vec(0.1, 0.2), d, std::nullopt, 0.3);
    EXPECT_EQ(diag.target.face_id, f.id);
    EXPECT_TRUE(diag.converged) << f.id;
  }
}

TEST(Ray, BoundedParametersStayAwayFromFaceLimits) {
  const auto& m = g7();
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-5, 5);
  for (const auto& f : m.faces) {
    if (f.dim == 2) continue;
    const auto ff = face_family(m.fam, m.poly, m.faces, m.fan, f.id);
    for (int i = 0; i < 20; ++i) {
      const auto e = m.fam.eval(vec(u(rng), u(rng)));
      // every point off the face keeps log-mass bounded below
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(m.fam.size()); ++j)
        if (std::find(ff.members.begin(), ff.members.end(), static_cast<int>(j)) == ff.members.end()) EXPECT_GT(e.log_probs[j], -500.0) << f.id;
    }
  }
}

TEST(Ray, ZeroDirectionAndBadSchedulesAreRejected) {
  EXPECT_THROW(RaySequence::make(VectorXd::Zero(2), VectorXd::Zero(2)), InfeasibleInput);
  EXPECT_THROW(RaySequence::make(VectorXd::Zero(2), vec(1, 0), {1, 1}), InfeasibleInput);
  EXPECT_THROW(RaySequence::make(VectorXd::Zero(2), vec(1, 0), {-1, 1}), InfeasibleInput);
  EXPECT_THROW(RaySequence::make(VectorXd::Zero(2), vec(NAN, 0)), InfeasibleInput);
  EXPECT_THROW(RaySequence::make(VectorXd::Zero(3), vec(1, 0)), InfeasibleInput);
  EXPECT_THROW(RaySequence::make(VectorXd::Zero(2), vec(1, 0), {}), InfeasibleInput);
  const auto s = RaySequence::make(VectorXd::Zero(2), vec(3, 4));
  EXPECT_NEAR(s.d.norm(), 1.0, 1e-15);
}

TEST(Ray, ExactDirectionsClassifyOnFanRays) {
  const auto& m = g7();
  for (const auto& h : m.poly.hrep) {
    const auto seq = RaySequence::make_exact(VectorXd::Zero(2), to_rational(h.a));
    const auto diag = run_ray(m.fam, m.poly, m.faces, m.fan, seq);
    EXPECT_EQ(diag.target.dim, 1);
    EXPECT_TRUE(diag.converged);
  }
}

TEST(Ray, AllDirectionsOnADegreeGrid) {
  const auto& m = g7();
  int checked = 0, ties = 0;
  for (int deg = 0; deg < 360; ++deg) {
    const double a = deg * M_PI / 180;
    const VectorXd d = vec(std::cos(a), std::sin(a));
    LimitDiagnostics diag;
    try {
      diag = run_ray(m.fam, m.poly, m.faces, m.fan, RaySequence::make(VectorXd::Zero(2), d));
    } catch (const NumericalFailure&) {
      ++ties;
      continue;
    }
    ++checked;
    EXPECT_TRUE(diag.converged) << deg << " tv " << diag.records.back().tv;
    EXPECT_TRUE(diag.monotone) << deg;
    // the limit sits on the face maximizing <t, d>
    double best = -INFINITY;
    for (const auto& t : m.poly.support_points) best = std::max(best, d[0] * static_cast<double>(t[0]) + d[1] * static_cast<double>(t[1]));
    EXPECT_NEAR(diag.target_mean.dot(d), best, 1e-6 * std::max(1.0, std::abs(best))) << deg;
  }
  EXPECT_LE(ties, 4);
  EXPECT_GE(checked, 356);
}

TEST(Limits, FisherAndEntropyReports) {
  const auto& m = g7();
  const auto seq = RaySequence::make(vec(0.2, 0.1), vec(0, -1));
  const auto fr = fisher_limit_check(m.fam, m.poly, m.faces, m.fan, seq);
  EXPECT_TRUE(fr.ok);
  EXPECT_EQ(fr.face_dim, 1);
  EXPECT_EQ(fr.limit_rank, 1);
  EXPECT_EQ(fr.final_rank, 1);
  EXPECT_LT(fr.final_min_eig, kConvergenceTol);
  const auto er = entropy_limit_check(m.fam, m.poly, m.faces, m.fan, seq);
  EXPECT_TRUE(er.ok);
  EXPECT_EQ(er.entropies.size(), seq.rhos.size());
  EXPECT_LT(er.final_gap, kConvergenceTol);
  EXPECT_LT(er.limit, m.fam.max_entropy());
}

TEST(Recession, EmptyGraphVertex) {
  const auto& m = g7();
  const auto rep = recession_check(m.fam, m.poly, m.faces, m.fan, IntVec{0, 0}, VectorXd::Zero(2));
  EXPECT_EQ(rep.face.dim, 0);
  EXPECT_TRUE(rep.ok);
  EXPECT_EQ(rep.inside.size(), 3u);
  EXPECT_EQ(rep.outside.size(), 3u);
  for (const auto& t : rep.inside) {
    EXPECT_TRUE(t.bounded);
    EXPECT_NEAR(t.loglik.back(), 0.0, 1e-9);  // nu(0,0) = 1 and the mass concentrates there
  }
  for (const auto& t : rep.outside) EXPECT_TRUE(t.divergent);

  // straight down stays bounded, straight up diverges
  const auto down = ray(VectorXd::Zero(2), vec(0, -1), IntVec{0, 0});
  EXPECT_GT(down.records.back().loglik, kDivergenceFloor);
  const auto up = ray(VectorXd::Zero(2), vec(0, 1), IntVec{0, 0});
  EXPECT_LT(up.records.back().loglik, kDivergenceFloor);
}

TEST(Recession, InteriorPointDivergesEverywhere) {
  const auto& m = g7();
  const auto rep = recession_check(m.fam, m.poly, m.faces, m.fan, IntVec{10, 3}, vec(0.5, 0.5), 5);
  EXPECT_EQ(rep.face.dim, 2);
  EXPECT_TRUE(rep.inside.empty());
  EXPECT_EQ(rep.outside.size(), 5u);
  EXPECT_TRUE(rep.ok);
  EXPECT_THROW(recession_check(m.fam, m.poly, m.faces, m.fan, IntVec{40, 0}, VectorXd::Zero(2)), InfeasibleInput);
}

TEST(Recession, EdgePoint) {
  const auto& m = g7();
  const auto rep = recession_check(m.fam, m.poly, m.faces, m.fan, IntVec{6, 0}, VectorXd::Zero(2));
  EXPECT_EQ(rep.face.dim, 1);
  EXPECT_TRUE(rep.ok);
  for (const auto& t : rep.inside) EXPECT_FALSE(t.divergent);
}
