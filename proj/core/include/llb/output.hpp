#pragma once

#include <string>

#include "llb/field.hpp"
#include "llb/mesh.hpp"
#include "llb/schemes.hpp"

namespace llb {

/// Energy trace as CSV text, header
/// step,time,energy_exchange,energy_internal,energy_anisotropy,energy_total,l2_norm,linf_norm,fp_iterations
std::string energy_csv(const EnergyTrace& trace);
void write_energy_csv(const EnergyTrace& trace, const std::string& path);

/// Legacy ASCII VTK unstructured grid with a "magnetisation" point vector.
std::string vtk_snapshot(const Mesh& mesh, const NodalField& field);
void write_vtk_snapshot(const Mesh& mesh, const NodalField& field, const std::string& path);

/// "snapshot_<time>.vtk" with the time in shortest round-trip form.
std::string snapshot_filename(double time);

/// Writes text to path, throwing IoError on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace llb
