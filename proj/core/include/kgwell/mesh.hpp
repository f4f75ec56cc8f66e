#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kgwell {

using Index = std::ptrdiff_t;
using Point = Eigen::Vector2d;  // 1D meshes keep the second coordinate at zero

/// A boundary facet: a point (1D) or an edge (2D) with its owning element.
struct BoundaryFacet {
  std::array<Index, 2> vertices{-1, -1};  // second entry is -1 in 1D
  Index element = -1;
  Point normal = Point::Zero();
  double measure = 0.0;  // 1 for points, edge length in 2D

  int vertex_count() const { return vertices[1] < 0 ? 1 : 2; }
};

/// Simplicial mesh of an interval or a polygon.
///
/// Elements store dimension + 1 vertex indices; in 1D the third slot is -1.
/// Boundary facets carry outward unit normals.
class Mesh {
 public:
  Mesh(int dimension, std::vector<Point> vertices,
       std::vector<std::array<Index, 3>> elements,
       std::vector<BoundaryFacet> facets);

  int dimension() const { return dimension_; }
  Index vertex_count() const { return static_cast<Index>(vertices_.size()); }
  Index element_count() const { return static_cast<Index>(elements_.size()); }
  int vertices_per_element() const { return dimension_ + 1; }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(Index i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const std::vector<std::array<Index, 3>>& elements() const { return elements_; }
  const std::array<Index, 3>& element(Index e) const {
    return elements_[static_cast<std::size_t>(e)];
  }
  const std::vector<BoundaryFacet>& facets() const { return facets_; }

  /// Signed length (1D) or area (2D) of an element.
  double element_volume(Index e) const;
  /// Largest edge length of an element.
  double element_diameter(Index e) const;
  double min_element_diameter() const;

  /// Constant gradients of the element's barycentric basis functions.
  std::array<Point, 3> basis_gradients(Index e) const;

  /// Physical point for barycentric coordinates on an element.
  Point map_to_physical(Index e, const Eigen::Vector3d& barycentric) const;

  /// Throws InvalidInput when a structural invariant does not hold:
  /// unit normals, positive volumes, facets covering the topological boundary.
  void validate() const;

  /// Copy with every vertex mapped x -> scale * x.
  Mesh scaled(double scale) const;

 private:
  int dimension_;
  std::vector<Point> vertices_;
  std::vector<std::array<Index, 3>> elements_;
  std::vector<BoundaryFacet> facets_;
};

Mesh build_interval_mesh(double a, double b, Index elements);

/// Structured triangulation of [lo, hi]; each cell is split along its
/// lower-left to upper-right diagonal.
Mesh build_rectangle_mesh(const Point& lo, const Point& hi, Index nx, Index ny);

enum class FacetLabel { Gamma0, Gamma1 };

/// Plain-text mesh format: `dimension`, `vertices`, `elements` and `facets`
/// blocks, one record per line, whitespace separated. Facet records end with
/// a label (`gamma0`, `gamma1` or `-`).
void write_mesh(std::ostream& os, const Mesh& mesh,
                const std::vector<FacetLabel>* labels = nullptr);

struct MeshFile {
  Mesh mesh;
  std::optional<std::vector<FacetLabel>> labels;
};

MeshFile read_mesh(std::istream& is);

}  // namespace kgwell
