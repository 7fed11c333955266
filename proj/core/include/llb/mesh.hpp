#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "llb/vec3.hpp"

namespace llb {

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Rect {
  double x_min = -0.5;
  double x_max = 0.5;
  double y_min = -0.5;
  double y_max = 0.5;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool operator==(const Rect&) const = default;
};

using Triangle = std::array<std::size_t, 3>;

/// Structured triangulation of a rectangle with m x m cells, each cell split
/// along its lower-left to upper-right diagonal.
///
/// Vertices are numbered row-major, vertex (i, j) having index j*(m+1)+i.
/// Instances are immutable once built; every mesh carries a process-unique id
/// so fields can be checked against the mesh that owns them.
class Mesh {
 public:
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  /// 1 for vertices on the rectangle boundary, 0 otherwise.
  const std::vector<std::uint8_t>& boundary_vertex() const { return boundary_; }
  const Rect& bounds() const { return bounds_; }
  std::size_t divisions() const { return divisions_; }
  std::size_t level() const { return level_; }
  /// For refined meshes, maps each vertex of the parent mesh to its fine index.
  /// Empty for level-0 meshes.
  const std::vector<std::size_t>& parent_vertex_map() const { return parent_vertex_map_; }
  std::uint64_t id() const { return id_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t vertex_index(std::size_t i, std::size_t j) const { return j * (divisions_ + 1) + i; }

  /// Grid spacing along x (width / m).
  double spacing() const { return bounds_.width() / static_cast<double>(divisions_); }

  /// Signed area of triangle t (positive for counter-clockwise).
  double signed_area(std::size_t t) const;

 private:
  friend Mesh build_structured(std::size_t m, const Rect& bounds);
  friend Mesh refine(const Mesh& mesh);

  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<std::uint8_t> boundary_;
  Rect bounds_;
  std::size_t divisions_ = 0;
  std::size_t level_ = 0;
  std::vector<std::size_t> parent_vertex_map_;
  std::uint64_t id_ = 0;
};

/// Builds the structured mesh with m divisions per side. Throws ConfigError
/// for m == 0 or degenerate/inverted bounds.
Mesh build_structured(std::size_t m, const Rect& bounds = Rect{});

/// Uniform refinement: equivalent to build_structured(2m) plus the parent map.
Mesh refine(const Mesh& mesh);

/// Maximum edge length over all triangles.
double mesh_size(const Mesh& mesh);

/// Number of uniform refinements separating coarse from fine, or throws
/// StructuralError when fine is not a refinement of coarse.
std::size_t refinement_depth(const Mesh& coarse, const Mesh& fine);

}  // namespace llb

#include "llb/field.hpp"

namespace llb {

/// P1 interpolation of a coarse field onto a (repeatedly) refined mesh.
/// New vertices receive edge-midpoint averages level by level, which is exact
/// for nested P1 spaces. Throws StructuralError if the meshes are not nested.
NodalField prolongate(const Mesh& coarse, const Mesh& fine, const NodalField& field);

}  // namespace llb
