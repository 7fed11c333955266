#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "llb/vec3.hpp"

namespace llb {

class Mesh;

/// R^3-valued P1 coefficients, one vector per mesh vertex, stored node-major
/// (x, y, z of vertex 0, then vertex 1, ...). Matches the interleaved
/// ordering of every 3N x 3N system in the library.
class NodalField {
 public:
  NodalField() = default;
  explicit NodalField(const Mesh& mesh);
  NodalField(const Mesh& mesh, const Vec3& value);
  NodalField(std::uint64_t mesh_id, std::vector<double> values);

  std::size_t num_nodes() const { return values_.size() / 3; }
  std::uint64_t mesh_id() const { return mesh_id_; }

  Vec3 at(std::size_t node) const { return {values_[3 * node], values_[3 * node + 1], values_[3 * node + 2]}; }
  void set(std::size_t node, const Vec3& v) {
    values_[3 * node] = v[0];
    values_[3 * node + 1] = v[1];
    values_[3 * node + 2] = v[2];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& raw() { return values_; }
  const std::vector<double>& raw() const { return values_; }

  /// Copies component c (0, 1, 2) into a length-N vector.
  std::vector<double> component(std::size_t c) const;
  void set_component(std::size_t c, std::span<const double> data);

  bool all_finite() const;

  NodalField& operator+=(const NodalField& other);
  NodalField& operator-=(const NodalField& other);
  NodalField& operator*=(double s);

  friend NodalField operator+(NodalField a, const NodalField& b) { return a += b; }
  friend NodalField operator-(NodalField a, const NodalField& b) { return a -= b; }
  friend NodalField operator*(double s, NodalField a) { return a *= s; }

  bool operator==(const NodalField&) const = default;

 private:
  void check_compatible(const NodalField& other) const;

  std::uint64_t mesh_id_ = 0;
  std::vector<double> values_;
};

/// Throws StructuralError unless the field belongs to the mesh.
void require_on_mesh(const NodalField& field, const Mesh& mesh);

}  // namespace llb
