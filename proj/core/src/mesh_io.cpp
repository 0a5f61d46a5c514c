#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "opcond/error.hpp"
#include "opcond/mesh.hpp"

namespace opcond {

namespace {

std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

}  // namespace

void write_mesh(std::ostream& out, const SimplicialMesh& mesh) {
  out << mesh.dim() << ' ' << mesh.ambient_dim() << ' ' << mesh.num_vertices() << ' ' << mesh.num_cells() << '\n';
  for (const auto& p : mesh.vertices()) {
    for (int k = 0; k < mesh.ambient_dim(); ++k) out << (k ? " " : "") << shortest(p[static_cast<std::size_t>(k)]);
    out << '\n';
  }
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    const auto v = mesh.cell_vertices(e);
    for (std::size_t k = 0; k < v.size(); ++k) out << (k ? " " : "") << v[k];
    out << '\n';
  }
  for (const auto& f : mesh.gamma_faces()) {
    if (mesh.dim() == 1)
      out << f[0] << '\n';
    else
      out << f[0] << ' ' << f[1] << '\n';
  }
  if (!out) throw Error(ErrorCode::io, "failed to write mesh");
}

SimplicialMesh read_mesh(std::istream& in) {
  int dim = 0, ambient = 0;
  std::size_t nv = 0, ne = 0;
  if (!(in >> dim >> ambient >> nv >> ne)) throw Error(ErrorCode::io, "malformed mesh header");
  if ((dim != 1 && dim != 2) || (ambient != 1 && ambient != 3))
    throw Error(ErrorCode::io, "unsupported mesh dimensions");
  std::vector<Point> vertices(nv, Point{0, 0, 0});
  for (auto& p : vertices) {
    for (int k = 0; k < ambient; ++k) {
      std::string token;
      if (!(in >> token)) throw Error(ErrorCode::io, "truncated vertex block");
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
      if (ec != std::errc() || ptr != token.data() + token.size()) throw Error(ErrorCode::io, "bad coordinate " + token);
      p[static_cast<std::size_t>(k)] = x;
    }
  }
  std::vector<Cell> cells(ne, Cell{-1, -1, -1});
  for (auto& c : cells)
    for (int k = 0; k <= dim; ++k)
      if (!(in >> c[static_cast<std::size_t>(k)])) throw Error(ErrorCode::io, "truncated cell block");
  std::vector<Face> gamma;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    Face f{};
    if (!(ls >> f[0])) continue;
    if (dim == 1) {
      f[1] = f[0];
    } else if (!(ls >> f[1])) {
      throw Error(ErrorCode::io, "gamma edge line needs two vertex ids");
    }
    gamma.push_back(f);
  }
  return SimplicialMesh(dim, ambient, std::move(vertices), std::move(cells), std::move(gamma));
}

}  // namespace opcond
