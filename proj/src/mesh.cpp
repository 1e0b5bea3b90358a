// SPDX-License-Identifier: Apache-2.0
#include "homesh/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace homesh {

namespace {

int ipow(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Lattice index helpers for the (k+1)^d tensor node ordering.
inline int lattice_id(int ix, int iy, int iz, int n1, int dim) {
  return dim == 2 ? ix + n1 * iy : ix + n1 * (iy + n1 * iz);
}

}  // namespace

Mesh::Mesh(int dim, int degree, std::vector<double> coords, std::vector<int> connectivity)
    : dim_(dim), degree_(degree), coords_(std::move(coords)), connectivity_(std::move(connectivity)) {
  if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("Mesh: dim must be 2 or 3");
  if (degree_ < 1) throw std::invalid_argument("Mesh: degree must be >= 1");
  nodes_per_element_ = ipow(degree_ + 1, dim_);

  if (coords_.empty() || coords_.size() % static_cast<std::size_t>(dim_) != 0)
    throw std::invalid_argument("Mesh: coordinate array size must be a positive multiple of dim");
  if (connectivity_.empty() || connectivity_.size() % static_cast<std::size_t>(nodes_per_element_) != 0)
    throw std::invalid_argument("Mesh: connectivity size must be a positive multiple of (degree+1)^dim");

  const int nn = num_nodes();
  std::vector<std::uint8_t> referenced(static_cast<std::size_t>(nn), 0);
  const int ne = num_elements();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(nn), 0);
  for (int e = 0; e < ne; ++e) {
    const auto el = element(e);
    for (int i = 0; i < nodes_per_element_; ++i) {
      const int v = el[static_cast<std::size_t>(i)];
      if (v < 0 || v >= nn)
        throw std::invalid_argument("Mesh: node index " + std::to_string(v) +
                                    " out of range in element " + std::to_string(e));
      if (seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("Mesh: repeated node " + std::to_string(v) +
                                    " in element " + std::to_string(e));
      seen[static_cast<std::size_t>(v)] = 1;
      referenced[static_cast<std::size_t>(v)] = 1;
    }
    for (int i = 0; i < nodes_per_element_; ++i)
      seen[static_cast<std::size_t>(el[static_cast<std::size_t>(i)])] = 0;
  }
  for (int n = 0; n < nn; ++n)
    if (!referenced[static_cast<std::size_t>(n)])
      throw std::invalid_argument("Mesh: node " + std::to_string(n) + " not referenced by any element");

  compute_boundary();
}

void Mesh::set_coords(std::vector<double> coords) {
  if (coords.size() != coords_.size())
    throw std::invalid_argument("Mesh::set_coords: size mismatch");
  coords_ = std::move(coords);
}

void Mesh::compute_boundary() {
  const int k = degree_;
  const int n1 = k + 1;
  const int ne = num_elements();

  // A face is identified by the sorted global ids of its corner vertices.
  using FaceKey = std::array<int, 4>;
  std::map<FaceKey, int> face_count;

  auto face_corners = [&](int e, int axis, int side) {
    FaceKey key{-1, -1, -1, -1};
    const auto el = element(e);
    int idx = 0;
    if (dim_ == 2) {
      // Edge: the two lattice corners with i_axis = side*k.
      for (int other = 0; other <= 1; ++other) {
        int ix = axis == 0 ? side * k : other * k;
        int iy = axis == 0 ? other * k : side * k;
        key[static_cast<std::size_t>(idx++)] = el[static_cast<std::size_t>(lattice_id(ix, iy, 0, n1, 2))];
      }
    } else {
      for (int b = 0; b <= 1; ++b)
        for (int a = 0; a <= 1; ++a) {
          int comp[3];
          comp[axis] = side * k;
          comp[(axis + 1) % 3] = a * k;
          comp[(axis + 2) % 3] = b * k;
          key[static_cast<std::size_t>(idx++)] =
              el[static_cast<std::size_t>(lattice_id(comp[0], comp[1], comp[2], n1, 3))];
        }
    }
    std::sort(key.begin(), key.end());
    return key;
  };

  for (int e = 0; e < ne; ++e)
    for (int axis = 0; axis < dim_; ++axis)
      for (int side = 0; side <= 1; ++side) ++face_count[face_corners(e, axis, side)];

  boundary_mask_.assign(static_cast<std::size_t>(num_nodes()), 0);
  for (int e = 0; e < ne; ++e) {
    const auto el = element(e);
    for (int axis = 0; axis < dim_; ++axis)
      for (int side = 0; side <= 1; ++side) {
        if (face_count[face_corners(e, axis, side)] >= 2) continue;
        // Flag every lattice node on this face.
        if (dim_ == 2) {
          for (int j = 0; j <= k; ++j) {
            const int ix = axis == 0 ? side * k : j;
            const int iy = axis == 0 ? j : side * k;
            boundary_mask_[static_cast<std::size_t>(el[static_cast<std::size_t>(lattice_id(ix, iy, 0, n1, 2))])] = 1;
          }
        } else {
          for (int b = 0; b <= k; ++b)
            for (int a = 0; a <= k; ++a) {
              int comp[3];
              comp[axis] = side * k;
              comp[(axis + 1) % 3] = a;
              comp[(axis + 2) % 3] = b;
              boundary_mask_[static_cast<std::size_t>(
                  el[static_cast<std::size_t>(lattice_id(comp[0], comp[1], comp[2], n1, 3))])] = 1;
            }
        }
      }
  }

  boundary_nodes_.clear();
  for (int n = 0; n < num_nodes(); ++n)
    if (boundary_mask_[static_cast<std::size_t>(n)]) boundary_nodes_.push_back(n);
}

Mesh cartesian_mesh(int dim, int degree, int elements_per_axis) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("cartesian_mesh: dim must be 2 or 3");
  if (degree < 1 || elements_per_axis < 1)
    throw std::invalid_argument("cartesian_mesh: degree and element count must be >= 1");

  const int k = degree, n = elements_per_axis;
  const auto gl = gauss_lobatto_nodes(k);
  const int npa = n * k + 1;  // nodes per axis

  std::vector<double> axis_pos(static_cast<std::size_t>(npa));
  for (int e = 0; e < n; ++e)
    for (int j = 0; j < k; ++j)
      axis_pos[static_cast<std::size_t>(e * k + j)] = (e + gl[static_cast<std::size_t>(j)]) / n;
  axis_pos[static_cast<std::size_t>(npa - 1)] = 1.0;

  const int nz = dim == 3 ? npa : 1;
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(npa) * npa * nz * dim);
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < npa; ++iy)
      for (int ix = 0; ix < npa; ++ix) {
        coords.push_back(axis_pos[static_cast<std::size_t>(ix)]);
        coords.push_back(axis_pos[static_cast<std::size_t>(iy)]);
        if (dim == 3) coords.push_back(axis_pos[static_cast<std::size_t>(iz)]);
      }

  std::vector<int> conn;
  const int ez = dim == 3 ? n : 1;
  for (int ezi = 0; ezi < ez; ++ezi)
    for (int eyi = 0; eyi < n; ++eyi)
      for (int exi = 0; exi < n; ++exi) {
        const int lz = dim == 3 ? k : 0;
        for (int jz = 0; jz <= lz; ++jz)
          for (int jy = 0; jy <= k; ++jy)
            for (int jx = 0; jx <= k; ++jx) {
              const int ix = exi * k + jx, iy = eyi * k + jy, iz = ezi * k + jz;
              conn.push_back(dim == 2 ? ix + npa * iy : ix + npa * (iy + npa * iz));
            }
      }
  return Mesh(dim, degree, std::move(coords), std::move(conn));
}

Vec map_to_physical(const Mesh& mesh, int elem, const Vec& ref_point) {
  const ShapeEval se = shape_functions(mesh.degree(), mesh.dim(), ref_point);
  const auto el = mesh.element(elem);
  Vec x = Vec::zero(mesh.dim());
  for (int i = 0; i < mesh.nodes_per_element(); ++i) {
    const int n = el[static_cast<std::size_t>(i)];
    for (int a = 0; a < mesh.dim(); ++a)
      x[a] += se.values[static_cast<std::size_t>(i)] * mesh.coord(n, a);
  }
  return x;
}

Mat element_jacobian(const Mesh& mesh, int elem, const Vec& ref_point) {
  if (elem < 0 || elem >= mesh.num_elements())
    throw std::invalid_argument("element_jacobian: element index out of range");
  const ShapeEval se = shape_functions(mesh.degree(), mesh.dim(), ref_point);
  const auto el = mesh.element(elem);
  Mat A(mesh.dim());
  for (int i = 0; i < mesh.nodes_per_element(); ++i) {
    const int n = el[static_cast<std::size_t>(i)];
    for (int r = 0; r < mesh.dim(); ++r)
      for (int c = 0; c < mesh.dim(); ++c)
        A(r, c) += mesh.coord(n, r) * se.gradients[static_cast<std::size_t>(i)][c];
  }
  return A;
}

double min_det_jacobian(const Mesh& mesh, const QuadratureRule& rule) {
  const BasisTable table = tabulate_basis(mesh, rule);
  const int dim = mesh.dim();
  const int npe = mesh.nodes_per_element();
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto el = mesh.element(e);
    for (int q = 0; q < rule.size(); ++q) {
      Mat A(dim);
      for (int i = 0; i < npe; ++i) {
        const int n = el[static_cast<std::size_t>(i)];
        const double* g = table.gradient(q, i);
        for (int r = 0; r < dim; ++r)
          for (int c = 0; c < dim; ++c) A(r, c) += mesh.coord(n, r) * g[c];
      }
      best = std::min(best, A.det());
    }
  }
  return best;
}

Mesh uniform_refine(const Mesh& mesh) {
  const int dim = mesh.dim(), k = mesh.degree();
  const int n1 = k + 1;
  const auto gl = gauss_lobatto_nodes(k);

  // Child nodes are evaluated through the parent map; coincident nodes are
  // merged with a spatial hash keyed on a grid much finer than any node gap.
  const double tol = 1e-9 * std::max(domain_diameter(mesh), 1e-30);
  struct CellKey {
    long long x, y, z;
    bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
  };
  struct CellHash {
    std::size_t operator()(const CellKey& c) const {
      std::size_t h = static_cast<std::size_t>(c.x) * 73856093u;
      h ^= static_cast<std::size_t>(c.y) * 19349663u;
      h ^= static_cast<std::size_t>(c.z) * 83492791u;
      return h;
    }
  };
  std::unordered_map<CellKey, std::vector<int>, CellHash> grid;

  std::vector<double> new_coords;
  std::vector<int> new_conn;
  const double cell = 4.0 * tol;

  auto find_or_insert = [&](const Vec& p) {
    const long long cx = static_cast<long long>(std::floor(p[0] / cell));
    const long long cy = static_cast<long long>(std::floor(p[1] / cell));
    const long long cz = dim == 3 ? static_cast<long long>(std::floor(p[2] / cell)) : 0;
    for (long long dz = (dim == 3 ? -1 : 0); dz <= (dim == 3 ? 1 : 0); ++dz)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dx = -1; dx <= 1; ++dx) {
          const auto it = grid.find(CellKey{cx + dx, cy + dy, cz + dz});
          if (it == grid.end()) continue;
          for (int id : it->second) {
            double d2 = 0.0;
            for (int a = 0; a < dim; ++a) {
              const double diff = new_coords[static_cast<std::size_t>(id * dim + a)] - p[a];
              d2 += diff * diff;
            }
            if (d2 <= tol * tol) return id;
          }
        }
    const int id = static_cast<int>(new_coords.size()) / dim;
    for (int a = 0; a < dim; ++a) new_coords.push_back(p[a]);
    grid[CellKey{cx, cy, cz}].push_back(id);
    return id;
  };

  const int ncz = dim == 3 ? 2 : 1;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int cz = 0; cz < ncz; ++cz)
      for (int cy = 0; cy < 2; ++cy)
        for (int cx = 0; cx < 2; ++cx) {
          const int lz = dim == 3 ? k : 0;
          for (int jz = 0; jz <= lz; ++jz)
            for (int jy = 0; jy <= k; ++jy)
              for (int jx = 0; jx <= k; ++jx) {
                Vec ref = Vec::zero(dim);
                ref[0] = 0.5 * (cx + gl[static_cast<std::size_t>(jx)]);
                ref[1] = 0.5 * (cy + gl[static_cast<std::size_t>(jy)]);
                if (dim == 3) ref[2] = 0.5 * (cz + gl[static_cast<std::size_t>(jz)]);
                new_conn.push_back(find_or_insert(map_to_physical(mesh, e, ref)));
              }
        }
  }
  return Mesh(dim, k, std::move(new_coords), std::move(new_conn));
}

Mesh perturb_interior(const Mesh& mesh, double amplitude, std::uint64_t seed) {
  if (amplitude < 0.0) throw std::invalid_argument("perturb_interior: amplitude must be >= 0");

  const int dim = mesh.dim(), k = mesh.degree(), n1 = k + 1;

  // Shortest incident lattice edge per node.
  std::vector<double> h_local(static_cast<std::size_t>(mesh.num_nodes()),
                              std::numeric_limits<double>::infinity());
  auto edge = [&](int a, int b) {
    double d2 = 0.0;
    for (int c = 0; c < dim; ++c) {
      const double diff = mesh.coord(a, c) - mesh.coord(b, c);
      d2 += diff * diff;
    }
    const double d = std::sqrt(d2);
    h_local[static_cast<std::size_t>(a)] = std::min(h_local[static_cast<std::size_t>(a)], d);
    h_local[static_cast<std::size_t>(b)] = std::min(h_local[static_cast<std::size_t>(b)], d);
  };
  const int nz = dim == 3 ? n1 : 1;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto el = mesh.element(e);
    for (int iz = 0; iz < nz; ++iz)
      for (int iy = 0; iy < n1; ++iy)
        for (int ix = 0; ix < n1; ++ix) {
          const int a = el[static_cast<std::size_t>(lattice_id(ix, iy, iz, n1, dim))];
          if (ix + 1 < n1) edge(a, el[static_cast<std::size_t>(lattice_id(ix + 1, iy, iz, n1, dim))]);
          if (iy + 1 < n1) edge(a, el[static_cast<std::size_t>(lattice_id(ix, iy + 1, iz, n1, dim))]);
          if (dim == 3 && iz + 1 < n1)
            edge(a, el[static_cast<std::size_t>(lattice_id(ix, iy, iz + 1, n1, dim))]);
        }
  }

  // Knuth MMIX LCG; the top 53 bits feed each uniform draw. Every node
  // consumes dim draws in index order whether or not it moves, so the
  // result depends only on (mesh, amplitude, seed).
  std::uint64_t state = seed;
  auto next_uniform = [&]() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * (1.0 / 9007199254740992.0);  // [0,1)
  };

  std::vector<double> coords = mesh.coords();
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    double u[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) u[a] = 2.0 * next_uniform() - 1.0;
    if (mesh.is_boundary(n)) continue;
    for (int a = 0; a < dim; ++a)
      coords[static_cast<std::size_t>(n * dim + a)] +=
          amplitude * h_local[static_cast<std::size_t>(n)] * u[a];
  }
  Mesh out = mesh;
  out.set_coords(std::move(coords));
  return out;
}

double domain_volume(const Mesh& mesh, const QuadratureRule& rule) {
  const BasisTable table = tabulate_basis(mesh, rule);
  const int dim = mesh.dim();
  const int npe = mesh.nodes_per_element();
  double vol = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto el = mesh.element(e);
    for (int q = 0; q < rule.size(); ++q) {
      Mat A(dim);
      for (int i = 0; i < npe; ++i) {
        const int n = el[static_cast<std::size_t>(i)];
        const double* g = table.gradient(q, i);
        for (int r = 0; r < dim; ++r)
          for (int c = 0; c < dim; ++c) A(r, c) += mesh.coord(n, r) * g[c];
      }
      vol += rule.weights[static_cast<std::size_t>(q)] * A.det();
    }
  }
  return vol;
}

double domain_diameter(const Mesh& mesh) {
  const int dim = mesh.dim();
  double lo[3], hi[3];
  for (int a = 0; a < dim; ++a) {
    lo[a] = std::numeric_limits<double>::infinity();
    hi[a] = -std::numeric_limits<double>::infinity();
  }
  for (int n = 0; n < mesh.num_nodes(); ++n)
    for (int a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], mesh.coord(n, a));
      hi[a] = std::max(hi[a], mesh.coord(n, a));
    }
  double d2 = 0.0;
  for (int a = 0; a < dim; ++a) d2 += (hi[a] - lo[a]) * (hi[a] - lo[a]);
  return std::sqrt(d2);
}

BasisTable tabulate_basis(const Mesh& mesh, const QuadratureRule& rule) {
  return BasisTable(mesh.degree(), mesh.dim(), rule.points);
}

}  // namespace homesh
