#include "llb/output.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "llb/error.hpp"
#include "llb/format.hpp"

namespace llb {

std::string energy_csv(const EnergyTrace& trace) {
  std::ostringstream os;
  os << "step,time,energy_exchange,energy_internal,energy_anisotropy,energy_total,l2_norm,linf_norm,fp_iterations\n";
  for (const auto& r : trace.rows()) {
    os << r.step << ',' << format_real(r.time) << ',' << format_real(r.energy.exchange) << ','
       << format_real(r.energy.internal) << ',' << format_real(r.energy.anisotropy) << ','
       << format_real(r.energy.total) << ',' << format_real(r.l2_norm) << ',' << format_real(r.linf_norm) << ','
       << r.fp_iterations << '\n';
  }
  return os.str();
}

void write_energy_csv(const EnergyTrace& trace, const std::string& path) { write_text_file(path, energy_csv(trace)); }

std::string vtk_snapshot(const Mesh& mesh, const NodalField& field) {
  require_on_mesh(field, mesh);
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\n"
     << "llb magnetisation\n"
     << "ASCII\n"
     << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices()) os << format_real(v[0]) << ' ' << format_real(v[1]) << " 0\n";
  const std::size_t nt = mesh.num_triangles();
  os << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.triangles()) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "CELL_TYPES " << nt << '\n';
  for (std::size_t i = 0; i < nt; ++i) os << "5\n";
  os << "POINT_DATA " << mesh.num_vertices() << '\n' << "VECTORS magnetisation double\n";
  for (std::size_t i = 0; i < field.num_nodes(); ++i) {
    const Vec3 u = field.at(i);
    os << format_real(u[0]) << ' ' << format_real(u[1]) << ' ' << format_real(u[2]) << '\n';
  }
  return os.str();
}

void write_vtk_snapshot(const Mesh& mesh, const NodalField& field, const std::string& path) {
  write_text_file(path, vtk_snapshot(mesh, field));
}

std::string snapshot_filename(double time) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "snapshot_%.17g.vtk", time);
  // Prefer the shortest representation that still round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char num[40];
    std::snprintf(num, sizeof(num), "%.*g", prec, time);
    if (std::strtod(num, nullptr) == time) {
      std::snprintf(buf, sizeof(buf), "snapshot_%s.vtk", num);
      break;
    }
  }
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace llb
