#include "llb/field.hpp"

#include <cmath>
#include <string>

#include "llb/error.hpp"
#include "llb/mesh.hpp"

namespace llb {

NodalField::NodalField(const Mesh& mesh) : mesh_id_(mesh.id()), values_(3 * mesh.num_vertices(), 0.0) {}

NodalField::NodalField(const Mesh& mesh, const Vec3& value) : NodalField(mesh) {
  for (std::size_t i = 0; i < num_nodes(); ++i) set(i, value);
}

NodalField::NodalField(std::uint64_t mesh_id, std::vector<double> values)
    : mesh_id_(mesh_id), values_(std::move(values)) {
  if (values_.size() % 3 != 0) {
    throw StructuralError("NodalField: value count " + std::to_string(values_.size()) + " is not a multiple of 3");
  }
}

std::vector<double> NodalField::component(std::size_t c) const {
  std::vector<double> out(num_nodes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[3 * i + c];
  return out;
}

void NodalField::set_component(std::size_t c, std::span<const double> data) {
  if (data.size() != num_nodes()) throw StructuralError("NodalField::set_component: size mismatch");
  for (std::size_t i = 0; i < data.size(); ++i) values_[3 * i + c] = data[i];
}

bool NodalField::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void NodalField::check_compatible(const NodalField& other) const {
  if (mesh_id_ != other.mesh_id_ || values_.size() != other.values_.size()) {
    throw StructuralError("NodalField: arithmetic between fields on different meshes");
  }
}

NodalField& NodalField::operator+=(const NodalField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

NodalField& NodalField::operator-=(const NodalField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

NodalField& NodalField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

void require_on_mesh(const NodalField& field, const Mesh& mesh) {
  if (field.mesh_id() != mesh.id() || field.num_nodes() != mesh.num_vertices()) {
    throw StructuralError("field does not belong to mesh " + std::to_string(mesh.id()));
  }
}

}  // namespace llb
