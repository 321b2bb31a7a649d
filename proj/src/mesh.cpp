#include "hdgflow/mesh.hpp"

#include <stdexcept>
#include <string>

namespace hdgflow {

QuadMesh build_uniform_quad_mesh(int nx, int ny, const Rect& domain) {
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("build_uniform_quad_mesh: element counts must be >= 1");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw std::invalid_argument("build_uniform_quad_mesh: domain rectangle is degenerate");

  QuadMesh m;
  m.nx = nx;
  m.ny = ny;
  m.domain = domain;
  m.hx = domain.width() / nx;
  m.hy = domain.height() / ny;

  const int nvert = (nx + 1) * ny;
  const int nhorz = (ny + 1) * nx;
  m.faces.resize(nvert + nhorz);

  for (int line = 0; line <= nx; ++line) {
    const double x = domain.x0 + line * m.hx;
    for (int j = 0; j < ny; ++j) {
      Face f;
      f.vertical = true;
      f.nx = 1.0;
      f.ny = 0.0;
      f.x0 = f.x1 = x;
      f.y0 = domain.y0 + j * m.hy;
      f.y1 = domain.y0 + (j + 1) * m.hy;
      f.boundary = (line == 0 || line == nx);
      m.faces[line * ny + j] = f;
    }
  }
  for (int line = 0; line <= ny; ++line) {
    const double y = domain.y0 + line * m.hy;
    for (int i = 0; i < nx; ++i) {
      Face f;
      f.vertical = false;
      f.nx = 0.0;
      f.ny = 1.0;
      f.y0 = f.y1 = y;
      f.x0 = domain.x0 + i * m.hx;
      f.x1 = domain.x0 + (i + 1) * m.hx;
      f.boundary = (line == 0 || line == ny);
      m.faces[nvert + line * nx + i] = f;
    }
  }

  m.element_faces.resize(nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      std::array<FaceUse, 4>& fu = m.element_faces[j * nx + i];
      fu[0] = {i * ny + j, -1, 0};               // left
      fu[1] = {(i + 1) * ny + j, +1, 1};         // right
      fu[2] = {nvert + j * nx + i, -1, 2};       // bottom
      fu[3] = {nvert + (j + 1) * nx + i, +1, 3};  // top
    }
  }
  return m;
}

const std::array<FaceUse, 4>& faces_of_element(const QuadMesh& mesh, int e) {
  if (e < 0 || e >= mesh.num_elements())
    throw std::out_of_range("faces_of_element: element id " + std::to_string(e) +
                            " out of range");
  return mesh.element_faces[e];
}

}  // namespace hdgflow
