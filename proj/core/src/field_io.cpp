#include "nehari/field_io.hpp"

#include <cstdio>
#include <fstream>

namespace nehari {

void write_field_csv(const Field& u, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw GridError("cannot open " + file.string() + " for writing");
  const Grid& g = u.grid();
  static const char* headers[3] = {"x,value\n", "x,y,value\n", "x,y,z,value\n"};
  out << headers[g.dim() - 1];
  char buf[32];
  std::string line;
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    line.clear();
    const Point x = g.node(i);
    for (int a = 0; a < g.dim(); ++a) {
      std::snprintf(buf, sizeof(buf), "%.17g", x[a]);
      line += buf;
      line += ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", u[i]);
    line += buf;
    line += '\n';
    out << line;
  }
  if (!out) throw GridError("failed writing " + file.string());
}

}  // namespace nehari
