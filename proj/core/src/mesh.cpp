#include "kgwell/mesh.hpp"

#include "kgwell/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace kgwell {

namespace {

using FaceKey = std::pair<Index, Index>;

FaceKey make_key(Index a, Index b) { return a < b ? FaceKey{a, b} : FaceKey{b, a}; }

}  // namespace

Mesh::Mesh(int dimension, std::vector<Point> vertices,
           std::vector<std::array<Index, 3>> elements,
           std::vector<BoundaryFacet> facets)
    : dimension_(dimension),
      vertices_(std::move(vertices)),
      elements_(std::move(elements)),
      facets_(std::move(facets)) {
  if (dimension_ != 1 && dimension_ != 2) {
    throw InvalidInput("mesh dimension must be 1 or 2");
  }
}

double Mesh::element_volume(Index e) const {
  const auto& el = element(e);
  if (dimension_ == 1) return vertex(el[1])[0] - vertex(el[0])[0];
  const Point d1 = vertex(el[1]) - vertex(el[0]);
  const Point d2 = vertex(el[2]) - vertex(el[0]);
  return 0.5 * (d1[0] * d2[1] - d1[1] * d2[0]);
}

double Mesh::element_diameter(Index e) const {
  const auto& el = element(e);
  if (dimension_ == 1) return std::abs(element_volume(e));
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    d = std::max(d, (vertex(el[i]) - vertex(el[(i + 1) % 3])).norm());
  }
  return d;
}

double Mesh::min_element_diameter() const {
  double h = std::numeric_limits<double>::infinity();
  for (Index e = 0; e < element_count(); ++e) h = std::min(h, element_diameter(e));
  return h;
}

std::array<Point, 3> Mesh::basis_gradients(Index e) const {
  const auto& el = element(e);
  std::array<Point, 3> g{Point::Zero(), Point::Zero(), Point::Zero()};
  if (dimension_ == 1) {
    const double h = element_volume(e);
    g[0] = Point(-1.0 / h, 0.0);
    g[1] = Point(1.0 / h, 0.0);
    return g;
  }
  const Point& p0 = vertex(el[0]);
  const Point& p1 = vertex(el[1]);
  const Point& p2 = vertex(el[2]);
  const double twice_area = 2.0 * element_volume(e);
  // grad(lambda_i) = perp(opposite edge) / (2 * area)
  g[0] = Point(p1[1] - p2[1], p2[0] - p1[0]) / twice_area;
  g[1] = Point(p2[1] - p0[1], p0[0] - p2[0]) / twice_area;
  g[2] = Point(p0[1] - p1[1], p1[0] - p0[0]) / twice_area;
  return g;
}

Point Mesh::map_to_physical(Index e, const Eigen::Vector3d& barycentric) const {
  const auto& el = element(e);
  Point x = Point::Zero();
  for (int k = 0; k < vertices_per_element(); ++k) x += barycentric[k] * vertex(el[k]);
  return x;
}

void Mesh::validate() const {
  for (const auto& f : facets_) {
    if (std::abs(f.normal.norm() - 1.0) > 1e-12) {
      throw InvalidInput("boundary facet normal is not of unit length");
    }
    if (f.element < 0 || f.element >= element_count()) {
      throw InvalidInput("boundary facet references a missing element");
    }
  }
  for (Index e = 0; e < element_count(); ++e) {
    for (int k = 0; k < vertices_per_element(); ++k) {
      const Index v = element(e)[k];
      if (v < 0 || v >= vertex_count()) throw InvalidInput("element references a missing vertex");
    }
    if (!(element_volume(e) > 0.0)) {
      throw InvalidInput("element " + std::to_string(e) + " has non-positive volume");
    }
  }

  // Topological boundary: faces owned by exactly one element.
  std::map<FaceKey, std::pair<int, Index>> faces;
  for (Index e = 0; e < element_count(); ++e) {
    const auto& el = element(e);
    if (dimension_ == 1) {
      for (int k = 0; k < 2; ++k) {
        auto& entry = faces[{el[k], -1}];
        ++entry.first;
        entry.second = e;
      }
    } else {
      for (int k = 0; k < 3; ++k) {
        auto& entry = faces[make_key(el[k], el[(k + 1) % 3])];
        ++entry.first;
        entry.second = e;
      }
    }
  }
  std::map<FaceKey, Index> boundary;
  for (const auto& [key, entry] : faces) {
    if (entry.first > 2) throw InvalidInput("non-manifold face in mesh");
    if (entry.first == 1) boundary.emplace(key, entry.second);
  }
  if (boundary.size() != facets_.size()) {
    throw InvalidInput("boundary facets do not match the topological boundary");
  }
  for (const auto& f : facets_) {
    const FaceKey key =
        dimension_ == 1 ? FaceKey{f.vertices[0], -1} : make_key(f.vertices[0], f.vertices[1]);
    const auto it = boundary.find(key);
    if (it == boundary.end() || it->second != f.element) {
      throw InvalidInput("boundary facet is not a boundary face of its element");
    }
  }
}

Mesh Mesh::scaled(double scale) const {
  std::vector<Point> v = vertices_;
  for (auto& p : v) p *= scale;
  std::vector<BoundaryFacet> f = facets_;
  for (auto& facet : f) facet.measure *= (dimension_ == 1 ? 1.0 : scale);
  return Mesh(dimension_, std::move(v), elements_, std::move(f));
}

Mesh build_interval_mesh(double a, double b, Index elements) {
  if (!(a < b)) throw InvalidInput("interval mesh requires a < b");
  if (elements < 1) throw InvalidInput("interval mesh requires at least one element");
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(elements + 1));
  const double h = (b - a) / static_cast<double>(elements);
  for (Index i = 0; i <= elements; ++i) {
    // pin the right end exactly to b
    const double x = i == elements ? b : a + h * static_cast<double>(i);
    vertices.emplace_back(x, 0.0);
  }
  std::vector<std::array<Index, 3>> cells;
  cells.reserve(static_cast<std::size_t>(elements));
  for (Index i = 0; i < elements; ++i) cells.push_back({i, i + 1, -1});

  std::vector<BoundaryFacet> facets(2);
  facets[0].vertices = {0, -1};
  facets[0].element = 0;
  facets[0].normal = Point(-1.0, 0.0);
  facets[0].measure = 1.0;
  facets[1].vertices = {elements, -1};
  facets[1].element = elements - 1;
  facets[1].normal = Point(1.0, 0.0);
  facets[1].measure = 1.0;
  return Mesh(1, std::move(vertices), std::move(cells), std::move(facets));
}

Mesh build_rectangle_mesh(const Point& lo, const Point& hi, Index nx, Index ny) {
  if (!(lo[0] < hi[0] && lo[1] < hi[1])) throw InvalidInput("degenerate rectangle");
  if (nx < 1 || ny < 1) throw InvalidInput("rectangle mesh requires nx, ny >= 1");

  const auto node = [nx](Index i, Index j) { return j * (nx + 1) + i; };
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (Index j = 0; j <= ny; ++j) {
    const double y = j == ny ? hi[1] : lo[1] + (hi[1] - lo[1]) * static_cast<double>(j) / static_cast<double>(ny);
    for (Index i = 0; i <= nx; ++i) {
      const double x = i == nx ? hi[0] : lo[0] + (hi[0] - lo[0]) * static_cast<double>(i) / static_cast<double>(nx);
      vertices.emplace_back(x, y);
    }
  }

  std::vector<std::array<Index, 3>> cells;
  cells.reserve(static_cast<std::size_t>(2 * nx * ny));
  const auto cell_lower = [nx](Index i, Index j) { return 2 * (j * nx + i); };
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index a = node(i, j), b = node(i + 1, j), c = node(i + 1, j + 1), d = node(i, j + 1);
      cells.push_back({a, b, c});  // lower-right triangle
      cells.push_back({a, c, d});  // upper-left triangle
    }
  }

  std::vector<BoundaryFacet> facets;
  const auto add = [&](Index v0, Index v1, Index element, Point normal) {
    BoundaryFacet f;
    f.vertices = {v0, v1};
    f.element = element;
    f.normal = normal;
    f.measure = (vertices[static_cast<std::size_t>(v1)] - vertices[static_cast<std::size_t>(v0)]).norm();
    facets.push_back(f);
  };
  for (Index i = 0; i < nx; ++i) add(node(i, 0), node(i + 1, 0), cell_lower(i, 0), Point(0, -1));
  for (Index j = 0; j < ny; ++j) add(node(nx, j), node(nx, j + 1), cell_lower(nx - 1, j), Point(1, 0));
  for (Index i = nx; i > 0; --i) add(node(i, ny), node(i - 1, ny), cell_lower(i - 1, ny - 1) + 1, Point(0, 1));
  for (Index j = ny; j > 0; --j) add(node(0, j), node(0, j - 1), cell_lower(0, j - 1) + 1, Point(-1, 0));

  return Mesh(2, std::move(vertices), std::move(cells), std::move(facets));
}

}  // namespace kgwell
