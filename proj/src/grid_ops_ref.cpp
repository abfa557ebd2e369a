#include <cmath>

#include "ci/grid_ops.hpp"

// Plain serial twins of the OpenMP kernels. Loop bodies match the parallel
// versions term for term so results are bit-identical.

namespace ci {
namespace ref {

PeriodicField diff(const PeriodicField& f, int axis, int order) {
  if (order != 1 && order != 2) throw Error("diff: order must be 1 or 2");
  if (axis < 0 || axis >= f.dim_domain()) throw Error("diff: axis out of range");
  if (f.resolution() < 7) throw Error("grid too coarse");
  const double h = f.spacing();
  const int k = f.dim_range();
  PeriodicField out = PeriodicField::zeros_like(f);
  const std::int64_t nn = f.node_count();
  for (std::int64_t node = 0; node < nn; ++node) {
    std::int64_t m3 = f.neighbor(node, axis, -3), m2 = f.neighbor(node, axis, -2), m1 = f.neighbor(node, axis, -1);
    std::int64_t p1 = f.neighbor(node, axis, 1), p2 = f.neighbor(node, axis, 2), p3 = f.neighbor(node, axis, 3);
    if (order == 1) {
      const double c1 = 45.0 / (60.0 * h), c2 = 9.0 / (60.0 * h), c3 = 1.0 / (60.0 * h);
      for (int c = 0; c < k; ++c)
        out.at(node, c) = c1 * (f.at(p1, c) - f.at(m1, c)) - c2 * (f.at(p2, c) - f.at(m2, c)) +
                          c3 * (f.at(p3, c) - f.at(m3, c));
    } else {
      const double d0 = -49.0 / (18.0 * h * h), d1 = 3.0 / (2.0 * h * h), d2 = -3.0 / (20.0 * h * h),
                   d3 = 1.0 / (90.0 * h * h);
      for (int c = 0; c < k; ++c)
        out.at(node, c) = d0 * f.at(node, c) + d1 * (f.at(m1, c) + f.at(p1, c)) +
                          d2 * (f.at(m2, c) + f.at(p2, c)) + d3 * (f.at(m3, c) + f.at(p3, c));
    }
  }
  return out;
}

MetricField induced_metric(const PeriodicField& u) {
  const int n = u.dim_domain(), m = u.dim_range();
  if (m < n) throw Error("induced_metric: range dimension below domain dimension");
  std::vector<PeriodicField> du;
  for (int a = 0; a < n; ++a) du.push_back(ref::diff(u, a, 1));
  MetricField g(n, u.resolution());
  for (std::int64_t node = 0; node < u.node_count(); ++node)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int c = 0; c < m; ++c) s += du[i].at(node, c) * du[j].at(node, c);
        g.set_entry(node, i, j, s);
      }
  return g;
}

PeriodicField mollify(const PeriodicField& f, double ell) {
  if (!(ell > 0.0) || ell >= f.period() / 4.0) throw Error("invalid mollification scale");
  std::vector<double> w = mollifier_weights(ell, f.spacing());
  if (w.size() == 1) return f;
  const int half = (static_cast<int>(w.size()) - 1) / 2;
  const int k = f.dim_range();
  PeriodicField cur = f;
  for (int a = 0; a < f.dim_domain(); ++a) {
    PeriodicField out = PeriodicField::zeros_like(cur);
    for (std::int64_t node = 0; node < cur.node_count(); ++node)
      for (int c = 0; c < k; ++c) {
        double acc = 0.0;
        for (int j = -half; j <= half; ++j) acc += w[j + half] * cur.at(cur.neighbor(node, a, j), c);
        out.at(node, c) = acc;
      }
    cur = out;
  }
  return cur;
}

}  // namespace ref
}  // namespace ci
