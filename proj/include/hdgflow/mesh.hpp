#pragma once

#include <array>
#include <vector>

namespace hdgflow {

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

/// One unique skeleton face. Vertical faces store the unit normal (+1,0),
/// horizontal faces (0,+1); the owning elements carry orientation signs.
struct Face {
  bool vertical = false;     ///< true: face lies on a line x = const
  double nx = 0.0, ny = 0.0; ///< stored unit normal (+x or +y)
  double x0 = 0.0, y0 = 0.0; ///< first endpoint (smaller coordinate)
  double x1 = 0.0, y1 = 0.0; ///< second endpoint
  bool boundary = false;
  double length() const { return vertical ? (y1 - y0) : (x1 - x0); }
  double midx() const { return 0.5 * (x0 + x1); }
  double midy() const { return 0.5 * (y0 + y1); }
};

/// Element's view of one of its faces.
struct FaceUse {
  int face = -1;        ///< unique face id
  int sign = 0;         ///< outward normal = sign * stored normal
  int local_index = 0;  ///< 0 = left, 1 = right, 2 = bottom, 3 = top
};

/// Uniform quadrilateral mesh of a rectangle. Element ids are row-major
/// (e = j*nx + i). Face ids enumerate all vertical faces first, column by
/// column (id = line*ny + j for the line x = x0 + line*hx), then all
/// horizontal faces row by row (id = n_vertical + line*nx + i).
struct QuadMesh {
  int nx = 0, ny = 0;
  Rect domain;
  double hx = 0.0, hy = 0.0;
  std::vector<Face> faces;
  std::vector<std::array<FaceUse, 4>> element_faces;

  int num_elements() const { return nx * ny; }
  int num_faces() const { return static_cast<int>(faces.size()); }
  int num_vertical_faces() const { return (nx + 1) * ny; }

  int element_id(int i, int j) const { return j * nx + i; }
  int element_ix(int e) const { return e % nx; }
  int element_iy(int e) const { return e / nx; }
  /// Center of element e.
  double cx(int e) const { return domain.x0 + (element_ix(e) + 0.5) * hx; }
  double cy(int e) const { return domain.y0 + (element_iy(e) + 0.5) * hy; }
  double element_area() const { return hx * hy; }
};

/// Build the uniform nx x ny mesh of `domain`. Throws std::invalid_argument
/// for nonpositive counts or a degenerate rectangle.
QuadMesh build_uniform_quad_mesh(int nx, int ny, const Rect& domain);

/// The four faces of element e with orientation signs and local indices.
/// Throws std::out_of_range for an invalid id.
const std::array<FaceUse, 4>& faces_of_element(const QuadMesh& mesh, int e);

}  // namespace hdgflow
