#pragma once

#include <vector>

#include "ci/field.hpp"

namespace ci {

/// Orthonormal normal frame along an immersed grid embedding. Columns are
/// stored per node, column-major: component e of column j at slot j*m + e.
struct NormalFrame {
  PeriodicField cols;  // k = m * codim
  int m = 0;
  int codim = 0;
  double orthonormality_residual = 0.0;  // max |F^T F - I|
  double tangency_residual = 0.0;        // max |J^T F| / sup|grad u|
  double continuity_defect = 0.0;        // max adjacent-node column jump
  double max_seam_rotation = 0.0;        // largest wrap holonomy before correction

  /// Column j at a node as an m-vector.
  void column(std::int64_t node, int j, double* out) const {
    for (int e = 0; e < m; ++e) out[e] = cols.at(node, j * m + e);
  }
};

/// Frame from an embedding; the Jacobian is measured with the grid stencils.
NormalFrame normal_frame(const PeriodicField& u, double gamma = 16.0);

/// Frame from caller-supplied partial derivative fields du[a] (k = m each).
/// Lets chart stubs with non-periodic linear parts exercise the machinery.
NormalFrame normal_frame_from_jacobian(const std::vector<PeriodicField>& du, double gamma = 16.0);

}  // namespace ci
