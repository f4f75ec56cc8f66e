#include "kgwell/error.hpp"
#include "kgwell/mesh.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace kgwell {

namespace {

std::string next_data_line(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    const auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  }
  throw InvalidInput("unexpected end of mesh file");
}

Index read_header(std::istream& is, const std::string& keyword) {
  std::istringstream ls(next_data_line(is));
  std::string word;
  Index count = -1;
  if (!(ls >> word >> count) || word != keyword || count < 0) {
    throw InvalidInput("mesh file: expected '" + keyword + " <count>'");
  }
  return count;
}

}  // namespace

void write_mesh(std::ostream& os, const Mesh& mesh, const std::vector<FacetLabel>* labels) {
  const int dim = mesh.dimension();
  os << std::setprecision(17);
  os << "dimension " << dim << '\n';
  os << "vertices " << mesh.vertex_count() << '\n';
  for (const auto& p : mesh.vertices()) {
    os << p[0];
    if (dim == 2) os << ' ' << p[1];
    os << '\n';
  }
  os << "elements " << mesh.element_count() << '\n';
  for (const auto& el : mesh.elements()) {
    for (int k = 0; k <= dim; ++k) os << (k ? " " : "") << el[k];
    os << '\n';
  }
  os << "facets " << mesh.facets().size() << '\n';
  for (std::size_t i = 0; i < mesh.facets().size(); ++i) {
    const auto& f = mesh.facets()[i];
    os << f.vertices[0];
    if (dim == 2) os << ' ' << f.vertices[1];
    os << ' ' << f.element << ' ' << f.normal[0];
    if (dim == 2) os << ' ' << f.normal[1];
    const char* label = "-";
    if (labels != nullptr) label = (*labels)[i] == FacetLabel::Gamma1 ? "gamma1" : "gamma0";
    os << ' ' << label << '\n';
  }
}

MeshFile read_mesh(std::istream& is) {
  int dim = 0;
  {
    std::istringstream ls(next_data_line(is));
    std::string word;
    if (!(ls >> word >> dim) || word != "dimension" || (dim != 1 && dim != 2)) {
      throw InvalidInput("mesh file: expected 'dimension 1' or 'dimension 2'");
    }
  }

  const Index nv = read_header(is, "vertices");
  std::vector<Point> vertices;
  for (Index i = 0; i < nv; ++i) {
    std::istringstream ls(next_data_line(is));
    Point p = Point::Zero();
    if (!(ls >> p[0]) || (dim == 2 && !(ls >> p[1]))) throw InvalidInput("mesh file: bad vertex record");
    vertices.push_back(p);
  }

  const Index ne = read_header(is, "elements");
  std::vector<std::array<Index, 3>> elements;
  for (Index i = 0; i < ne; ++i) {
    std::istringstream ls(next_data_line(is));
    std::array<Index, 3> el{-1, -1, -1};
    for (int k = 0; k <= dim; ++k) {
      if (!(ls >> el[k])) throw InvalidInput("mesh file: bad element record");
    }
    elements.push_back(el);
  }

  const Index nf = read_header(is, "facets");
  std::vector<BoundaryFacet> facets;
  std::vector<FacetLabel> labels;
  bool labelled = true;
  for (Index i = 0; i < nf; ++i) {
    std::istringstream ls(next_data_line(is));
    BoundaryFacet f;
    std::string label;
    bool ok = static_cast<bool>(ls >> f.vertices[0]);
    if (dim == 2) ok = ok && static_cast<bool>(ls >> f.vertices[1]);
    ok = ok && static_cast<bool>(ls >> f.element >> f.normal[0]);
    if (dim == 2) ok = ok && static_cast<bool>(ls >> f.normal[1]);
    ok = ok && static_cast<bool>(ls >> label);
    if (!ok) throw InvalidInput("mesh file: bad facet record");
    if (label == "gamma0") {
      labels.push_back(FacetLabel::Gamma0);
    } else if (label == "gamma1") {
      labels.push_back(FacetLabel::Gamma1);
    } else if (label == "-") {
      labelled = false;
    } else {
      throw InvalidInput("mesh file: unknown facet label '" + label + "'");
    }
    facets.push_back(f);
  }
  for (auto& f : facets) {
    if (dim == 1) {
      f.measure = 1.0;
    } else {
      const auto a = static_cast<std::size_t>(f.vertices[0]);
      const auto b = static_cast<std::size_t>(f.vertices[1]);
      if (a >= vertices.size() || b >= vertices.size()) throw InvalidInput("mesh file: facet vertex out of range");
      f.measure = (vertices[b] - vertices[a]).norm();
    }
  }

  MeshFile out{Mesh(dim, std::move(vertices), std::move(elements), std::move(facets)), std::nullopt};
  out.mesh.validate();
  if (labelled && nf > 0) out.labels = std::move(labels);
  return out;
}

}  // namespace kgwell
