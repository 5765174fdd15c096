#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "mupf/error.hpp"
#include "mupf/mesh.hpp"

namespace mupf {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Parses the vertex part of an `f` token ("7", "7/1", "7//3", "-1").
long parse_face_index(std::string_view token, std::size_t vertex_count, std::size_t line_no) {
  const auto slash = token.find('/');
  const auto head = token.substr(0, slash);
  long idx = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0) {
    throw Error(ErrorCode::Io, "bad face index '" + std::string(token) + "' on line " +
                                   std::to_string(line_no));
  }
  const long resolved = idx > 0 ? idx - 1 : static_cast<long>(vertex_count) + idx;
  if (resolved < 0 || resolved >= static_cast<long>(vertex_count)) {
    throw Error(ErrorCode::Io, "face index " + std::to_string(idx) + " out of range on line " +
                                   std::to_string(line_no));
  }
  return resolved;
}

}  // namespace

TriMesh parse_obj(std::string_view text) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::size_t line_no = 0;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    std::istringstream in{std::string(line)};
    std::string tag;
    in >> tag;
    if (tag == "v") {
      Vec3 p;
      if (!(in >> p.x() >> p.y() >> p.z())) {
        throw Error(ErrorCode::Io, "bad vertex on line " + std::to_string(line_no));
      }
      vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<std::uint32_t> poly;
      std::string tok;
      while (in >> tok) {
        poly.push_back(static_cast<std::uint32_t>(parse_face_index(tok, vertices.size(), line_no)));
      }
      if (poly.size() < 3) {
        throw Error(ErrorCode::Io, "face with fewer than 3 vertices on line " +
                                       std::to_string(line_no));
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) faces.push_back({poly[0], poly[k], poly[k + 1]});
    }
    // vt, vn, o, g, s, usemtl, mtllib: ignored
  }
  if (faces.empty()) throw Error(ErrorCode::EmptyMesh, "OBJ contains no faces");
  return TriMesh(std::move(vertices), std::move(faces));
}

TriMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open mesh file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_obj(buf.str());
}

void save_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

}  // namespace mupf
