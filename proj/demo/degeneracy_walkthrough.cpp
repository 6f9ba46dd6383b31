// Walks through the edge/triangle model on 7 nodes: support, hull, a few
// MLEs, and where probability mass goes along rays of the normal fan.

#include <iomanip>
#include <iostream>

#include "ergx/enumerate.hpp"
#include "ergx/family.hpp"
#include "ergx/geometry.hpp"
#include "ergx/limits.hpp"
#include "ergx/mle.hpp"

using namespace ergx;

int main(int argc, char** argv) {
  const int g = argc > 1 ? std::atoi(argv[1]) : 7;
  auto m = enumerate_measure(g, parse_stats("edges,triangles"));
  auto poly = build_polytope(m);
  auto faces = face_lattice(poly);
  auto fan = normal_fan(poly, faces);
  ExpFamily fam(m);

  std::cout << "g=" << g << ": " << m.total() << " graphs, " << m.support_size() << " (edges, triangles) pairs\n";
  std::cout << "vertices:";
  for (const auto& v : poly.vertices) std::cout << " (" << v[0] << ',' << v[1] << ')';
  std::cout << "\ninequalities:\n";
  for (const auto& h : poly.hrep) std::cout << "  " << std::setw(4) << h.a[0] << " e " << std::showpos << h.a[1] << std::noshowpos << " t <= " << h.b << '\n';

  int boundary = 0;
  for (const auto& t : poly.support_points) boundary += classify_point(poly, t)->dim < 2;
  std::cout << boundary << " support points lie on the boundary; their MLE does not exist\n\n";

  const auto uniform = fam.eval(VectorXd::Zero(2));
  std::cout << "theta=0: mean (" << uniform.mean[0] << ", " << uniform.mean[1] << "), entropy " << uniform.entropy << '\n';

  for (const IntVec& x : {IntVec{10, 3}, IntVec{10, 0}, IntVec{0, 0}}) {
    auto r = extended_mle(fam, poly, faces, fan, x);
    std::cout << "x=(" << x[0] << ',' << x[1] << ") face " << r.face_id << " dim " << r.dim << " theta_rep (" << r.canonical_rep[0] << ", "
              << r.canonical_rep[1] << ") entropy " << r.entropy << '\n';
  }

  std::cout << "\nrays from theta=0 along each fan ray:\n";
  for (std::size_t i = 0; i < poly.hrep.size(); ++i) {
    auto diag = run_ray(fam, poly, faces, fan, RaySequence::make_exact(VectorXd::Zero(2), to_rational(poly.hrep[i].a)));
    const auto& last = diag.records.back();
    std::cout << "  d ~ (" << poly.hrep[i].a[0] << ',' << poly.hrep[i].a[1] << ") -> face " << diag.target.face_id << ", mean (" << diag.target_mean[0]
              << ", " << diag.target_mean[1] << "), TV " << last.tv << ", entropy " << last.entropy << '\n';
  }
}
