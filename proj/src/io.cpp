#include "ci/io.hpp"

#include <cstdint>
#include <fstream>
#include <ostream>

namespace ci {

void write_field(const PeriodicField& f, std::ostream& os) {
  std::uint32_t n = f.dim_domain(), k = f.dim_range(), r = f.resolution();
  double period = f.period();
  os.write(reinterpret_cast<const char*>(&n), 4);
  os.write(reinterpret_cast<const char*>(&k), 4);
  os.write(reinterpret_cast<const char*>(&r), 4);
  os.write(reinterpret_cast<const char*>(&period), 8);
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.values().size() * sizeof(double)));
}

PeriodicField read_field(std::istream& is) {
  std::uint32_t n = 0, k = 0, r = 0;
  double period = 0.0;
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&k), 4);
  is.read(reinterpret_cast<char*>(&r), 4);
  is.read(reinterpret_cast<char*>(&period), 8);
  if (!is) throw Error("field read: truncated header");
  PeriodicField f(static_cast<int>(n), static_cast<int>(k), static_cast<int>(r));
  is.read(reinterpret_cast<char*>(f.values().data()),
          static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  if (!is) throw Error("field read: truncated samples");
  return f;
}

void save_field(const PeriodicField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  write_field(f, os);
}

PeriodicField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_field(is);
}

void write_field_csv(const PeriodicField& f, std::ostream& os) {
  const int n = f.dim_domain(), k = f.dim_range();
  for (int a = 0; a < n; ++a) os << "x" << a << ",";
  for (int c = 0; c < k; ++c) os << "v" << c << (c + 1 < k ? "," : "\n");
  for (std::int64_t node = 0; node < f.node_count(); ++node) {
    auto x = f.position(node);
    for (int a = 0; a < n; ++a) os << x[a] << ",";
    for (int c = 0; c < k; ++c) os << f.at(node, c) << (c + 1 < k ? "," : "\n");
  }
}

void write_ply(const PeriodicField& u, std::ostream& os) {
  const int n = u.dim_domain(), k = u.dim_range();
  const int R = u.resolution();
  const bool faces = (n == 2);
  os << "ply\nformat ascii 1.0\n";
  os << "element vertex " << u.node_count() << "\n";
  for (int c = 0; c < k; ++c) os << "property double x" << c << "\n";
  if (faces) os << "element face " << static_cast<std::int64_t>(R) * R << "\nproperty list uchar int vertex_indices\n";
  os << "end_header\n";
  for (std::int64_t node = 0; node < u.node_count(); ++node) {
    for (int c = 0; c < k; ++c) os << u.at(node, c) << (c + 1 < k ? " " : "\n");
  }
  if (faces) {
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < R; ++j) {
        int i1 = (i + 1) % R, j1 = (j + 1) % R;
        os << "4 " << (static_cast<std::int64_t>(i) * R + j) << " " << (static_cast<std::int64_t>(i1) * R + j)
           << " " << (static_cast<std::int64_t>(i1) * R + j1) << " " << (static_cast<std::int64_t>(i) * R + j1)
           << "\n";
      }
  }
}

void write_obj_projection(const PeriodicField& u, std::ostream& os) {
  const int n = u.dim_domain(), k = u.dim_range();
  const int R = u.resolution();
  for (std::int64_t node = 0; node < u.node_count(); ++node) {
    os << "v";
    for (int c = 0; c < 3; ++c) os << " " << (c < k ? u.at(node, c) : 0.0);
    os << "\n";
  }
  if (n == 2) {
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < R; ++j) {
        int i1 = (i + 1) % R, j1 = (j + 1) % R;
        // OBJ indices are 1-based.
        os << "f " << (static_cast<std::int64_t>(i) * R + j + 1) << " "
           << (static_cast<std::int64_t>(i1) * R + j + 1) << " "
           << (static_cast<std::int64_t>(i1) * R + j1 + 1) << " "
           << (static_cast<std::int64_t>(i) * R + j1 + 1) << "\n";
      }
  }
}

}  // namespace ci
