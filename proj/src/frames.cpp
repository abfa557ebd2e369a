#include "ci/frames.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "ci/grid_ops.hpp"
#include "ci/parallel.hpp"

namespace ci {

namespace {

using Mat = Eigen::MatrixXd;

Mat matrix_log_near_identity(const Mat& O) {
  const int c = static_cast<int>(O.rows());
  Mat E = O - Mat::Identity(c, c);
  Mat term = E, acc = E;
  for (int k = 2; k <= 20; ++k) {
    term = term * E;
    acc += (k % 2 == 0 ? -1.0 : 1.0) / k * term;
  }
  // Kill the symmetric numerical part: the log of a rotation is skew.
  return 0.5 * (acc - acc.transpose());
}

Mat matrix_exp(const Mat& W) {
  const int c = static_cast<int>(W.rows());
  Mat acc = Mat::Identity(c, c), term = Mat::Identity(c, c);
  for (int k = 1; k <= 24; ++k) {
    term = term * W / k;
    acc += term;
  }
  return acc;
}

// Closest orthonormal matrix with the same column span (Loewdin).
Mat lowdin(const Mat& Z) {
  Eigen::SelfAdjointEigenSolver<Mat> es(Z.transpose() * Z);
  Mat D = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse().asDiagonal();
  return Z * es.eigenvectors() * D * es.eigenvectors().transpose();
}

struct FrameBuilder {
  const std::vector<PeriodicField>& du;
  int n, m, codim;
  std::int64_t nn;
  double gamma;
  std::vector<Mat> frames;  // per node, m x codim

  Mat jacobian(std::int64_t node) const {
    Mat J(m, n);
    for (int a = 0; a < n; ++a)
      for (int e = 0; e < m; ++e) J(e, a) = du[a].at(node, e);
    return J;
  }

  Mat projector(std::int64_t node) const {
    Mat J = jacobian(node);
    Mat G = J.transpose() * J;
    Eigen::SelfAdjointEigenSolver<Mat> es(G, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 1.0 / gamma)
      throw Error("not an immersion at node " + std::to_string(node));
    return Mat::Identity(m, m) - J * G.inverse() * J.transpose();
  }

  Mat transport(const Mat& P, const Mat& prev) const { return lowdin(P * prev); }
};

}  // namespace

NormalFrame normal_frame_from_jacobian(const std::vector<PeriodicField>& du, double gamma) {
  if (du.empty()) throw Error("normal_frame: empty jacobian");
  const int n = du[0].dim_domain();
  if (static_cast<int>(du.size()) != n) throw Error("normal_frame: need one derivative field per axis");
  const int m = du[0].dim_range();
  const int codim = m - n;
  if (codim < 1) throw Error("normal_frame: no normal directions");
  const int R = du[0].resolution();
  const std::int64_t nn = du[0].node_count();

  FrameBuilder fb{du, n, m, codim, nn, gamma, {}};
  fb.frames.assign(static_cast<std::size_t>(nn), Mat());

  // Seed: last (m-n) standard basis vectors projected onto the normal space.
  {
    Mat P = fb.projector(0);
    Mat Z(m, codim);
    Z.setZero();
    for (int j = 0; j < codim; ++j) Z(n + j, j) = 1.0;
    Z = P * Z;
    Eigen::JacobiSVD<Mat> svd(Z);
    if (svd.singularValues().minCoeff() < 1e-6) {
      Eigen::SelfAdjointEigenSolver<Mat> es(P);
      Z = es.eigenvectors().rightCols(codim);
    }
    fb.frames[0] = lowdin(Z);
  }

  NormalFrame out;
  out.m = m;
  out.codim = codim;
  out.cols = PeriodicField(n, m * codim, R);

  // Dimension-by-dimension fill with per-line seam correction. Pass a fills
  // nodes with coord[a] > 0 and coord[b] = 0 for b > a, propagating along a.
  double max_seam = 0.0;
  const PeriodicField& ref = du[0];
  for (int a = 0; a < n; ++a) {
    // Enumerate base nodes of lines for this pass.
    std::vector<std::int64_t> bases;
    for (std::int64_t node = 0; node < nn; ++node) {
      Coord c = ref.coord_of(node);
      bool base = (c[a] == 0);
      for (int b = a + 1; b < n && base; ++b)
        if (c[b] != 0) base = false;
      if (base) bases.push_back(node);
    }
    for (std::int64_t base : bases) {
      std::int64_t cur = base;
      for (int i = 1; i < R; ++i) {
        std::int64_t nxt = ref.neighbor(cur, a, 1);
        fb.frames[nxt] = fb.transport(fb.projector(nxt), fb.frames[cur]);
        cur = nxt;
      }
      // Wrap holonomy of this line.
      Mat wrap = fb.transport(fb.projector(base), fb.frames[cur]);
      Mat O = fb.frames[base].transpose() * wrap;
      double seam = (O - Mat::Identity(codim, codim)).norm();
      max_seam = std::max(max_seam, seam);
      if (seam > 0.7) throw Error("frame holonomy obstruction");
      if (seam > 1e-14) {
        Mat W = matrix_log_near_identity(O);
        std::int64_t p = base;
        for (int i = 1; i < R; ++i) {
          p = ref.neighbor(p, a, 1);
          fb.frames[p] = fb.frames[p] * matrix_exp(-(static_cast<double>(i) / R) * W);
        }
      }
    }
  }
  out.max_seam_rotation = max_seam;

  for (std::int64_t node = 0; node < nn; ++node)
    for (int j = 0; j < codim; ++j)
      for (int e = 0; e < m; ++e) out.cols.at(node, j * m + e) = fb.frames[node](e, j);

  // Diagnostics.
  double grad_sup = 0.0;
  for (int a = 0; a < n; ++a) grad_sup = std::max(grad_sup, sup_norm(du[a]));
  out.orthonormality_residual = parallel_max(nn, [&](std::int64_t node) {
    Mat F(m, codim);
    for (int j = 0; j < codim; ++j)
      for (int e = 0; e < m; ++e) F(e, j) = out.cols.at(node, j * m + e);
    return (F.transpose() * F - Mat::Identity(codim, codim)).cwiseAbs().maxCoeff();
  });
  out.tangency_residual = parallel_max(nn, [&](std::int64_t node) {
    Mat F(m, codim);
    for (int j = 0; j < codim; ++j)
      for (int e = 0; e < m; ++e) F(e, j) = out.cols.at(node, j * m + e);
    Mat J(m, n);
    for (int a = 0; a < n; ++a)
      for (int e = 0; e < m; ++e) J(e, a) = du[a].at(node, e);
    return (J.transpose() * F).cwiseAbs().maxCoeff();
  }) / std::max(grad_sup, 1e-300);
  out.continuity_defect = parallel_max(nn, [&](std::int64_t node) {
    double d = 0.0;
    for (int a = 0; a < n; ++a) {
      std::int64_t nb = out.cols.neighbor(node, a, 1);
      for (int c = 0; c < m * codim; ++c)
        d = std::max(d, std::abs(out.cols.at(node, c) - out.cols.at(nb, c)));
    }
    return d;
  });
  return out;
}

NormalFrame normal_frame(const PeriodicField& u, double gamma) {
  std::vector<PeriodicField> du;
  for (int a = 0; a < u.dim_domain(); ++a) du.push_back(diff(u, a, 1));
  return normal_frame_from_jacobian(du, gamma);
}

}  // namespace ci
