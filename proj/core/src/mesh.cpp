#include "mupf/mesh.hpp"

#include <algorithm>
#include <numeric>

#include <spdlog/spdlog.h>

#include "mupf/error.hpp"

namespace mupf {

Vec3 closest_point_on_triangle(const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = q - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = q - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  const Vec3 cp = q - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return a + ab * v + ac * w;
}

// ---------------------------------------------------------------------------
// Bvh

Bvh::Bvh(std::span<const Vec3> vertices, std::span<const Face> faces) {
  if (faces.empty()) throw Error(ErrorCode::EmptyMesh, "cannot build a BVH without faces");
  std::vector<Vec3> centroids(faces.size());
  std::vector<Aabb> boxes(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto& f = faces[i];
    for (int k = 0; k < 3; ++k) boxes[i].expand(vertices[f[k]]);
    centroids[i] = (vertices[f[0]] + vertices[f[1]] + vertices[f[2]]) / 3.0;
  }
  order_.resize(faces.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * faces.size() / kMaxLeafSize + 2);
  build(centroids, boxes, 0, static_cast<std::uint32_t>(faces.size()));
}

std::uint32_t Bvh::build(std::span<const Vec3> centroids, std::span<const Aabb> boxes,
                         std::uint32_t first, std::uint32_t count) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();

  Aabb box;
  Aabb centroid_box;
  for (std::uint32_t i = first; i < first + count; ++i) {
    box.expand(boxes[order_[i]]);
    centroid_box.expand(centroids[order_[i]]);
  }
  nodes_[index].box = box;

  if (count <= kMaxLeafSize) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }

  int axis = 0;
  (centroid_box.hi - centroid_box.lo).maxCoeff(&axis);
  const auto begin = order_.begin() + first;
  const auto mid = begin + count / 2;
  // Ties broken by face index so the tree is deterministic.
  std::nth_element(begin, mid, begin + count, [&](std::uint32_t a, std::uint32_t b) {
    const double ca = centroids[a][axis];
    const double cb = centroids[b][axis];
    return ca < cb || (ca == cb && a < b);
  });

  const std::uint32_t half = count / 2;
  const std::uint32_t left = build(centroids, boxes, first, half);
  const std::uint32_t right = build(centroids, boxes, first + half, count - half);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

// ---------------------------------------------------------------------------
// TriMesh

namespace {

bool is_degenerate(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const double scale = std::max({ab.squaredNorm(), ac.squaredNorm(), (c - b).squaredNorm()});
  const double twice_area = ab.cross(ac).norm();
  return !(twice_area > 1e-12 * scale);
}

struct Best {
  double sq = std::numeric_limits<double>::infinity();
  std::size_t face = 0;
  Vec3 point = Vec3::Zero();

  void offer(const Vec3& q, const Vec3& p, std::size_t face_index) {
    const double d = (q - p).squaredNorm();
    if (d < sq || (d == sq && face_index < face)) {
      sq = d;
      face = face_index;
      point = p;
    }
  }

  ClosestPointResult result(const Vec3& q) const { return {point, (q - point).norm(), face}; }
};

}  // namespace

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)) {
  faces_.reserve(faces.size());
  for (const auto& f : faces) {
    for (auto idx : f) {
      if (idx >= vertices_.size()) {
        throw Error(ErrorCode::InvalidConfig, "face references vertex " + std::to_string(idx) +
                                                  " but mesh has " +
                                                  std::to_string(vertices_.size()) + " vertices");
      }
    }
    if (is_degenerate(vertices_[f[0]], vertices_[f[1]], vertices_[f[2]])) {
      ++dropped_;
      continue;
    }
    faces_.push_back(f);
  }
  if (dropped_ > 0) spdlog::warn("dropped {} degenerate face(s) from mesh", dropped_);
  if (faces_.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no non-degenerate faces");
  bvh_ = Bvh(vertices_, faces_);
}

double TriMesh::face_area(std::size_t face) const {
  const Vec3& a = vertex(face, 0);
  return 0.5 * (vertex(face, 1) - a).cross(vertex(face, 2) - a).norm();
}

Aabb TriMesh::bounds() const {
  Aabb b;
  for (const auto& v : vertices_) b.expand(v);
  return b;
}

ClosestPointResult TriMesh::closest_point_brute_force(const Vec3& q) const {
  Best best;
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    best.offer(q, closest_point_on_triangle(q, vertex(i, 0), vertex(i, 1), vertex(i, 2)), i);
  }
  return best.result(q);
}

ClosestPointResult TriMesh::closest_point(const Vec3& q) const {
  const auto& nodes = bvh_.nodes();
  const auto& order = bvh_.face_order();
  Best best;

  // Depth is O(log n) for a median split; 64 covers any realistic mesh.
  std::array<std::uint32_t, 64> stack{};
  std::size_t top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const auto& node = nodes[stack[--top]];
    if (node.box.squared_distance(q) > best.sq) continue;
    if (node.is_leaf()) {
      for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
        const std::size_t i = order[k];
        best.offer(q, closest_point_on_triangle(q, vertex(i, 0), vertex(i, 1), vertex(i, 2)), i);
      }
      continue;
    }
    const double dl = nodes[node.left].box.squared_distance(q);
    const double dr = nodes[node.right].box.squared_distance(q);
    // Push the farther child first so the nearer one is visited next.
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best.result(q);
}

TriMesh make_box(const Vec3& extents) {
  const Vec3 h = extents / 2.0;
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) {
    v.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
  }
  // Two triangles per side, counter-clockwise seen from outside.
  std::vector<Face> f = {
      {0, 4, 6}, {0, 6, 2},  // -x
      {1, 3, 7}, {1, 7, 5},  // +x
      {0, 1, 5}, {0, 5, 4},  // -y
      {2, 6, 7}, {2, 7, 3},  // +y
      {0, 2, 3}, {0, 3, 1},  // -z
      {4, 5, 7}, {4, 7, 6},  // +z
  };
  return TriMesh(std::move(v), std::move(f));
}

}  // namespace mupf
