#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "mupf/geometry.hpp"

namespace mupf {

using Face = std::array<std::uint32_t, 3>;

struct ClosestPointResult {
  Vec3 point = Vec3::Zero();
  double distance = 0.0;
  std::size_t face_index = 0;
};

/// Closest point on triangle (a, b, c) to q, by Voronoi-region
/// classification (vertex, edge or interior).
Vec3 closest_point_on_triangle(const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c);

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void expand(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void expand(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  /// Squared distance from p to the box (0 inside).
  double squared_distance(const Vec3& p) const {
    const Vec3 d = (lo - p).cwiseMax(Vec3::Zero()).cwiseMax(p - hi);
    return d.squaredNorm();
  }
};

/// Axis-aligned bounding-box tree over mesh faces. Median split on the
/// longest centroid axis, at most `kMaxLeafSize` faces per leaf.
class Bvh {
 public:
  static constexpr std::size_t kMaxLeafSize = 4;

  struct Node {
    Aabb box;
    // Interior: children `left`, `right`. Leaf: [first, first + count)
    // into `face_order()`.
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t first = 0;
    std::uint32_t count = 0;
    bool is_leaf() const { return count > 0; }
  };

  Bvh() = default;
  Bvh(std::span<const Vec3> vertices, std::span<const Face> faces);

  const std::vector<Node>& nodes() const { return nodes_; }
  /// Face indices permuted so each leaf owns a contiguous range.
  const std::vector<std::uint32_t>& face_order() const { return order_; }
  bool empty() const { return nodes_.empty(); }

 private:
  std::uint32_t build(std::span<const Vec3> centroids, std::span<const Aabb> boxes,
                      std::uint32_t first, std::uint32_t count);

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

/// Indexed triangle mesh in the object frame. Immutable after
/// construction; safe for concurrent queries.
class TriMesh {
 public:
  /// Drops zero-area faces (logged as a warning) and builds the BVH.
  /// Throws Error{EmptyMesh} when no face survives, Error{InvalidConfig} on
  /// out-of-range indices.
  TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Bvh& bvh() const { return bvh_; }
  std::size_t face_count() const { return faces_.size(); }
  std::size_t dropped_faces() const { return dropped_; }

  const Vec3& vertex(std::size_t face, int corner) const { return vertices_[faces_[face][corner]]; }
  double face_area(std::size_t face) const;
  Aabb bounds() const;

  /// Exact nearest surface point, accelerated by the BVH. Equidistant faces
  /// resolve to the lowest face index.
  ClosestPointResult closest_point(const Vec3& q) const;

  /// Same contract as `closest_point`, exhaustive over faces. Kept as the
  /// reference path for tests and benchmarks.
  ClosestPointResult closest_point_brute_force(const Vec3& q) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  Bvh bvh_;
  std::size_t dropped_ = 0;
};

inline ClosestPointResult closest_point_on_mesh(const TriMesh& mesh, const Vec3& q) {
  return mesh.closest_point(q);
}

/// Wavefront OBJ reader: `v` and `f` records, 1-based (or negative relative)
/// indices, `v/vt/vn` tokens accepted, polygons fan-triangulated.
TriMesh load_obj(const std::filesystem::path& path);
TriMesh parse_obj(std::string_view text);
void save_obj(const std::filesystem::path& path, const TriMesh& mesh);

/// Axis-aligned box centered at the origin, 12 faces, outward winding.
TriMesh make_box(const Vec3& extents);

}  // namespace mupf
