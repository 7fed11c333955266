#include "llb/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "llb/error.hpp"

namespace llb {
namespace {

std::uint64_t next_mesh_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

double distance(const Vec2& a, const Vec2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

}  // namespace

double Mesh::signed_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Vec2& a = vertices_[tri[0]];
  const Vec2& b = vertices_[tri[1]];
  const Vec2& c = vertices_[tri[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

Mesh build_structured(std::size_t m, const Rect& bounds) {
  if (m == 0) throw ConfigError("mesh: number of divisions must be at least 1");
  if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min) || !std::isfinite(bounds.area())) {
    throw ConfigError("mesh: bounds must satisfy x_min < x_max and y_min < y_max");
  }

  Mesh mesh;
  mesh.bounds_ = bounds;
  mesh.divisions_ = m;
  mesh.id_ = next_mesh_id();

  const std::size_t nv = m + 1;
  mesh.vertices_.reserve(nv * nv);
  mesh.boundary_.reserve(nv * nv);
  const double dm = static_cast<double>(m);
  for (std::size_t j = 0; j <= m; ++j) {
    // Closed-form coordinates so a refined mesh reproduces coarse vertices bit-exactly.
    const double y = (j == m) ? bounds.y_max : bounds.y_min + bounds.height() * (static_cast<double>(j) / dm);
    for (std::size_t i = 0; i <= m; ++i) {
      const double x = (i == m) ? bounds.x_max : bounds.x_min + bounds.width() * (static_cast<double>(i) / dm);
      mesh.vertices_.push_back({x, y});
      mesh.boundary_.push_back(i == 0 || j == 0 || i == m || j == m ? 1 : 0);
    }
  }

  mesh.triangles_.reserve(2 * m * m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t a = j * nv + i;
      const std::size_t b = a + 1;
      const std::size_t c = a + nv + 1;
      const std::size_t d = a + nv;
      mesh.triangles_.push_back({a, b, c});
      mesh.triangles_.push_back({a, c, d});
    }
  }
  return mesh;
}

Mesh refine(const Mesh& mesh) {
  Mesh fine = build_structured(2 * mesh.divisions(), mesh.bounds());
  fine.level_ = mesh.level() + 1;
  const std::size_t m = mesh.divisions();
  fine.parent_vertex_map_.resize(mesh.num_vertices());
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::size_t i = 0; i <= m; ++i) {
      fine.parent_vertex_map_[mesh.vertex_index(i, j)] = fine.vertex_index(2 * i, 2 * j);
    }
  }
  return fine;
}

double mesh_size(const Mesh& mesh) {
  double h = 0.0;
  const auto& v = mesh.vertices();
  for (const auto& tri : mesh.triangles()) {
    h = std::max({h, distance(v[tri[0]], v[tri[1]]), distance(v[tri[1]], v[tri[2]]), distance(v[tri[2]], v[tri[0]])});
  }
  return h;
}

std::size_t refinement_depth(const Mesh& coarse, const Mesh& fine) {
  if (!(coarse.bounds() == fine.bounds())) throw StructuralError("prolongate: meshes cover different rectangles");
  std::size_t depth = 0;
  std::size_t m = coarse.divisions();
  while (m < fine.divisions()) {
    m *= 2;
    ++depth;
  }
  if (m != fine.divisions()) {
    throw StructuralError("prolongate: mesh with " + std::to_string(fine.divisions()) +
                          " divisions is not a refinement of one with " + std::to_string(coarse.divisions()));
  }
  return depth;
}

NodalField prolongate(const Mesh& coarse, const Mesh& fine, const NodalField& field) {
  require_on_mesh(field, coarse);
  const std::size_t depth = refinement_depth(coarse, fine);

  std::vector<double> current = field.raw();
  std::size_t m = coarse.divisions();
  for (std::size_t level = 0; level < depth; ++level) {
    const std::size_t nc = m + 1;
    const std::size_t mf = 2 * m;
    const std::size_t nf = mf + 1;
    std::vector<double> next(3 * nf * nf, 0.0);
    auto coarse_at = [&](std::size_t i, std::size_t j, std::size_t c) { return current[3 * (j * nc + i) + c]; };
    for (std::size_t jf = 0; jf <= mf; ++jf) {
      for (std::size_t if_ = 0; if_ <= mf; ++if_) {
        const std::size_t i0 = if_ / 2;
        const std::size_t j0 = jf / 2;
        const bool odd_i = if_ % 2 == 1;
        const bool odd_j = jf % 2 == 1;
        for (std::size_t c = 0; c < 3; ++c) {
          double value = 0.0;
          if (!odd_i && !odd_j) {
            value = coarse_at(i0, j0, c);
          } else if (odd_i && !odd_j) {
            value = 0.5 * (coarse_at(i0, j0, c) + coarse_at(i0 + 1, j0, c));
          } else if (!odd_i && odd_j) {
            value = 0.5 * (coarse_at(i0, j0, c) + coarse_at(i0, j0 + 1, c));
          } else {
            // Cell centre lies on the lower-left to upper-right diagonal edge.
            value = 0.5 * (coarse_at(i0, j0, c) + coarse_at(i0 + 1, j0 + 1, c));
          }
          next[3 * (jf * nf + if_) + c] = value;
        }
      }
    }
    current = std::move(next);
    m = mf;
  }
  return NodalField(fine.id(), std::move(current));
}

}  // namespace llb
