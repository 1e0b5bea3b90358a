// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "homesh/basis.hpp"
#include "homesh/mesh.hpp"
#include "homesh/quadrature.hpp"

using namespace homesh;

TEST_CASE("gauss-lobatto nodes contain endpoints and are symmetric") {
  for (int k = 1; k <= 6; ++k) {
    const auto n = gauss_lobatto_nodes(k);
    REQUIRE(n.size() == static_cast<std::size_t>(k + 1));
    CHECK(n.front() == 0.0);
    CHECK(n.back() == 1.0);
    for (int i = 0; i <= k; ++i) CHECK(n[i] + n[k - i] == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Known interior values: degree 3 has (1 +- 1/sqrt(5))/2.
  const auto n3 = gauss_lobatto_nodes(3);
  CHECK(n3[1] == doctest::Approx(0.5 * (1.0 - 1.0 / std::sqrt(5.0))).epsilon(1e-14));
  CHECK_THROWS_AS(gauss_lobatto_nodes(0), std::invalid_argument);
}

TEST_CASE("shape functions interpolate and form a partition of unity") {
  // Corner of a degree-1 quad.
  const auto se = shape_functions(1, 2, Vec(0.0, 0.0));
  CHECK(se.values[0] == doctest::Approx(1.0));
  CHECK(se.values[1] == doctest::Approx(0.0));
  CHECK(se.values[2] == doctest::Approx(0.0));
  CHECK(se.values[3] == doctest::Approx(0.0));

  // Degree 2: midpoint node carries value 1 at the center.
  const auto c = shape_functions(2, 2, Vec(0.5, 0.5));
  for (int i = 0; i < 9; ++i) CHECK(c.values[i] == doctest::Approx(i == 4 ? 1.0 : 0.0).epsilon(1e-14));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int dim = 2; dim <= 3; ++dim) {
    for (int k = 1; k <= 4; ++k) {
      for (int trial = 0; trial < 100; ++trial) {
        Vec p = Vec::zero(dim);
        for (int a = 0; a < dim; ++a) p[a] = u(rng);
        const auto s = shape_functions(k, dim, p);
        double vs = 0.0;
        Vec gs = Vec::zero(dim);
        for (std::size_t i = 0; i < s.values.size(); ++i) {
          vs += s.values[i];
          gs += s.gradients[i];
        }
        CHECK(vs == doctest::Approx(1.0).epsilon(1e-13));
        for (int a = 0; a < dim; ++a) CHECK(std::abs(gs[a]) < 1e-12);
      }
    }
  }

  CHECK_THROWS_AS(shape_functions(0, 2, Vec(0.0, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(shape_functions(1, 1, Vec(0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("gauss-legendre rules are exact and normalized") {
  const auto r1 = gauss_legendre_rule(1, 2);
  REQUIRE(r1.size() == 1);
  CHECK(r1.points[0][0] == doctest::Approx(0.5));
  CHECK(r1.points[0][1] == doctest::Approx(0.5));
  CHECK(r1.weights[0] == doctest::Approx(1.0));

  // x^2 y^2 over the unit square integrates to 1/9.
  const auto r2 = gauss_legendre_rule(2, 2);
  double s = 0.0;
  for (int q = 0; q < r2.size(); ++q) {
    const auto& p = r2.points[q];
    s += r2.weights[q] * p[0] * p[0] * p[1] * p[1];
  }
  CHECK(s == doctest::Approx(1.0 / 9.0).epsilon(1e-14));

  for (int dim = 2; dim <= 3; ++dim)
    for (int q = 1; q <= 10; ++q) {
      const auto r = gauss_legendre_rule(q, dim);
      double w = 0.0;
      for (double wq : r.weights) w += wq;
      CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
    }

  // Exactness up to degree 2q-1 per axis.
  for (int q = 1; q <= 5; ++q) {
    const auto r = gauss_legendre_rule(q, 2);
    const int deg = 2 * q - 1;
    double val = 0.0;
    for (int i = 0; i < r.size(); ++i)
      val += r.weights[i] * std::pow(r.points[i][0], deg) * std::pow(r.points[i][1], deg);
    const double exact = 1.0 / ((deg + 1.0) * (deg + 1.0));
    CHECK(val == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("element jacobian on affine and curved elements") {
  const Mesh unit = cartesian_mesh(2, 1, 1);
  const Mat A = element_jacobian(unit, 0, Vec(0.3, 0.7));
  CHECK(A(0, 0) == doctest::Approx(1.0));
  CHECK(A(0, 1) == doctest::Approx(0.0));
  CHECK(A(1, 0) == doctest::Approx(0.0));
  CHECK(A(1, 1) == doctest::Approx(1.0));

  // Axis-aligned square of side h: A = h I at every reference point.
  const int n = 4;
  const Mesh grid = cartesian_mesh(2, 1, n);
  for (double t : {0.0, 0.25, 0.9}) {
    const Mat Ah = element_jacobian(grid, 5, Vec(t, 0.5 * t));
    CHECK(Ah(0, 0) == doctest::Approx(1.0 / n));
    CHECK(Ah(1, 1) == doctest::Approx(1.0 / n));
    CHECK(std::abs(Ah(0, 1)) < 1e-15);
  }

  // Curved degree-2 element: match central finite differences of the map.
  Mesh curved = cartesian_mesh(2, 2, 1);
  auto coords = curved.coords();
  // Bend the midpoint of the top edge and the interior node.
  coords[2 * 7 + 1] += 0.15;  // node (1,2) lattice index 7
  coords[2 * 4 + 0] += 0.07;
  coords[2 * 4 + 1] -= 0.05;
  curved.set_coords(coords);

  const double step = 1e-6;
  const Vec pts[5] = {Vec(0.2, 0.3), Vec(0.8, 0.1), Vec(0.5, 0.5), Vec(0.33, 0.77), Vec(0.9, 0.9)};
  for (const Vec& p : pts) {
    const Mat Aan = element_jacobian(curved, 0, p);
    Mat Afd(2);
    for (int c = 0; c < 2; ++c) {
      Vec pp = p, pm = p;
      pp[c] += step;
      pm[c] -= step;
      const Vec xp = map_to_physical(curved, 0, pp);
      const Vec xm = map_to_physical(curved, 0, pm);
      for (int r = 0; r < 2; ++r) Afd(r, c) = (xp[r] - xm[r]) / (2.0 * step);
    }
    const double err = std::sqrt((Aan - Afd).frob2() / Aan.frob2());
    CHECK(err <= 1e-7);
  }
}

TEST_CASE("min det jacobian on uniform, inverted and refined meshes") {
  const auto rule = gauss_legendre_rule(4, 2);
  const Mesh grid = cartesian_mesh(2, 1, 4);
  CHECK(min_det_jacobian(grid, rule) == doctest::Approx(1.0 / 16.0).epsilon(1e-13));

  // Collapse one node far enough to invert an element.
  Mesh bad = grid;
  auto c = bad.coords();
  // Move an interior node across its element.
  const int node = 1 + 5 * 1;  // interior lattice node (1,1)
  c[2 * node + 0] += 0.45;
  c[2 * node + 1] += 0.45;
  bad.set_coords(c);
  CHECK(min_det_jacobian(bad, rule) <= 0.0);

  const Mesh fine = uniform_refine(grid);
  CHECK(min_det_jacobian(fine, rule) == doctest::Approx(min_det_jacobian(grid, rule) / 4.0).epsilon(1e-12));
}

TEST_CASE("uniform refinement preserves geometry and counts") {
  for (int dim = 2; dim <= 3; ++dim) {
    const int n = 2;
    const Mesh base = cartesian_mesh(dim, 2, n);
    const Mesh fine = uniform_refine(base);
    CHECK(fine.num_elements() == base.num_elements() * (dim == 2 ? 4 : 8));
    CHECK(fine.degree() == base.degree());
    const auto rule = gauss_legendre_rule(3, dim);
    CHECK(domain_volume(fine, rule) == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Curved single element: children trace the parent surface.
  Mesh curved = cartesian_mesh(2, 2, 1);
  auto coords = curved.coords();
  coords[2 * 7 + 1] += 0.2;
  curved.set_coords(coords);
  const Mesh fine = uniform_refine(curved);
  REQUIRE(fine.num_elements() == 4);
  // Child 0 covers [0,0.5]^2 in parent coordinates.
  for (double u : {0.1, 0.5, 0.9})
    for (double v : {0.2, 0.8}) {
      const Vec child_pt = map_to_physical(fine, 0, Vec(u, v));
      const Vec parent_pt = map_to_physical(curved, 0, Vec(0.5 * u, 0.5 * v));
      CHECK((child_pt - parent_pt).norm() <= 1e-12);
    }

  // Conformity: refined mesh passes the constructor's validation and its
  // node count matches the shared-face arithmetic of a structured grid.
  const Mesh grid = cartesian_mesh(2, 2, 3);
  const Mesh rgrid = uniform_refine(grid);
  CHECK(rgrid.num_nodes() == (6 * 2 + 1) * (6 * 2 + 1));
}

TEST_CASE("boundary detection flags exactly the lattice boundary") {
  const int n = 5, k = 2;
  const Mesh grid = cartesian_mesh(2, k, n);
  const int npa = n * k + 1;
  for (int iy = 0; iy < npa; ++iy)
    for (int ix = 0; ix < npa; ++ix) {
      const bool expect = ix == 0 || iy == 0 || ix == npa - 1 || iy == npa - 1;
      CHECK(grid.is_boundary(ix + npa * iy) == expect);
    }
  CHECK(grid.boundary_nodes().size() == static_cast<std::size_t>(4 * (npa - 1)));
}

TEST_CASE("perturb_interior is deterministic and leaves the boundary alone") {
  const Mesh grid = cartesian_mesh(2, 2, 8);
  const Mesh a = perturb_interior(grid, 0.0, 42);
  CHECK(a.coords() == grid.coords());

  const Mesh b1 = perturb_interior(grid, 0.25, 42);
  const Mesh b2 = perturb_interior(grid, 0.25, 42);
  CHECK(b1.coords() == b2.coords());
  const Mesh b3 = perturb_interior(grid, 0.25, 43);
  CHECK(b1.coords() != b3.coords());

  for (int node : grid.boundary_nodes())
    for (int axis = 0; axis < 2; ++axis) CHECK(b1.coord(node, axis) == grid.coord(node, axis));

  // Displacement bound: amplitude times shortest incident edge.
  // Lattice spacing within a degree-2 element of size 1/8 is 1/16.
  double max_disp = 0.0;
  for (int node = 0; node < grid.num_nodes(); ++node)
    for (int axis = 0; axis < 2; ++axis)
      max_disp = std::max(max_disp, std::abs(b1.coord(node, axis) - grid.coord(node, axis)));
  CHECK(max_disp <= 0.25 / 16.0 + 1e-15);

  // Frozen regression value: the 8x8 degree-2 perturbation stays feasible.
  const auto rule = gauss_legendre_rule(4, 2);
  CHECK(min_det_jacobian(b1, rule) > 0.0);

  CHECK_THROWS_AS(perturb_interior(grid, -1.0, 1), std::invalid_argument);
}

TEST_CASE("mesh validation rejects malformed input") {
  // Repeated node within an element.
  CHECK_THROWS_AS(Mesh(2, 1, {0, 0, 1, 0, 0, 1, 1, 1}, {0, 1, 2, 2}), std::invalid_argument);
  // Index out of range.
  CHECK_THROWS_AS(Mesh(2, 1, {0, 0, 1, 0, 0, 1, 1, 1}, {0, 1, 2, 7}), std::invalid_argument);
  // Unreferenced node.
  CHECK_THROWS_AS(Mesh(2, 1, {0, 0, 1, 0, 0, 1, 1, 1, 2, 2}, {0, 1, 2, 3}), std::invalid_argument);
}
