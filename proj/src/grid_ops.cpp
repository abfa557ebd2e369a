#include "ci/grid_ops.hpp"

#include <algorithm>
#include <cmath>

#include "ci/parallel.hpp"

namespace ci {

PeriodicField diff(const PeriodicField& f, int axis, int order) {
  if (order != 1 && order != 2) throw Error("diff: order must be 1 or 2");
  if (axis < 0 || axis >= f.dim_domain()) throw Error("diff: axis out of range");
  if (f.resolution() < 7) throw Error("grid too coarse");
  const double h = f.spacing();
  const int k = f.dim_range();
  PeriodicField out = PeriodicField::zeros_like(f);
  const std::int64_t nn = f.node_count();
  if (order == 1) {
    const double c1 = 45.0 / (60.0 * h), c2 = 9.0 / (60.0 * h), c3 = 1.0 / (60.0 * h);
    parallel_for(nn, [&](std::int64_t node) {
      std::int64_t m3 = f.neighbor(node, axis, -3), m2 = f.neighbor(node, axis, -2), m1 = f.neighbor(node, axis, -1);
      std::int64_t p1 = f.neighbor(node, axis, 1), p2 = f.neighbor(node, axis, 2), p3 = f.neighbor(node, axis, 3);
      for (int c = 0; c < k; ++c)
        out.at(node, c) = c1 * (f.at(p1, c) - f.at(m1, c)) - c2 * (f.at(p2, c) - f.at(m2, c)) +
                          c3 * (f.at(p3, c) - f.at(m3, c));
    });
  } else {
    const double d0 = -49.0 / (18.0 * h * h), d1 = 3.0 / (2.0 * h * h), d2 = -3.0 / (20.0 * h * h),
                 d3 = 1.0 / (90.0 * h * h);
    parallel_for(nn, [&](std::int64_t node) {
      std::int64_t m3 = f.neighbor(node, axis, -3), m2 = f.neighbor(node, axis, -2), m1 = f.neighbor(node, axis, -1);
      std::int64_t p1 = f.neighbor(node, axis, 1), p2 = f.neighbor(node, axis, 2), p3 = f.neighbor(node, axis, 3);
      for (int c = 0; c < k; ++c)
        out.at(node, c) = d0 * f.at(node, c) + d1 * (f.at(m1, c) + f.at(p1, c)) +
                          d2 * (f.at(m2, c) + f.at(p2, c)) + d3 * (f.at(m3, c) + f.at(p3, c));
    });
  }
  return out;
}

MetricField induced_metric(const PeriodicField& u) {
  const int n = u.dim_domain(), m = u.dim_range();
  if (m < n) throw Error("induced_metric: range dimension below domain dimension");
  std::vector<PeriodicField> du;
  du.reserve(n);
  for (int a = 0; a < n; ++a) du.push_back(diff(u, a, 1));
  MetricField g(n, u.resolution());
  const std::int64_t nn = u.node_count();
  parallel_for(nn, [&](std::int64_t node) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int c = 0; c < m; ++c) s += du[i].at(node, c) * du[j].at(node, c);
        g.set_entry(node, i, j, s);
      }
  });
  return g;
}

std::vector<double> mollifier_weights(double ell, double h) {
  int half = static_cast<int>(std::ceil(ell / h)) - 1;
  if (half < 0) half = 0;
  std::vector<double> w(2 * half + 1, 0.0);
  double sum = 0.0;
  for (int j = -half; j <= half; ++j) {
    double t = j * h / ell;
    double v = (std::abs(t) < 1.0) ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
    w[j + half] = v;
    sum += v;
  }
  for (auto& x : w) x /= sum;
  return w;
}

static PeriodicField mollify_axis(const PeriodicField& f, const std::vector<double>& w, int axis) {
  const int half = (static_cast<int>(w.size()) - 1) / 2;
  const int k = f.dim_range();
  PeriodicField out = PeriodicField::zeros_like(f);
  parallel_for(f.node_count(), [&](std::int64_t node) {
    for (int c = 0; c < k; ++c) {
      double acc = 0.0;
      for (int j = -half; j <= half; ++j) acc += w[j + half] * f.at(f.neighbor(node, axis, j), c);
      out.at(node, c) = acc;
    }
  });
  return out;
}

PeriodicField mollify(const PeriodicField& f, double ell) {
  if (!(ell > 0.0) || ell >= f.period() / 4.0) throw Error("invalid mollification scale");
  std::vector<double> w = mollifier_weights(ell, f.spacing());
  if (w.size() == 1) return f;
  PeriodicField out = f;
  for (int a = 0; a < f.dim_domain(); ++a) out = mollify_axis(out, w, a);
  return out;
}

MetricField mollify(const MetricField& f, double ell) { return MetricField(mollify(f.field(), ell)); }

PeriodicField pointwise_norm(const PeriodicField& f) {
  PeriodicField out(f.dim_domain(), 1, f.resolution());
  const int k = f.dim_range();
  parallel_for(f.node_count(), [&](std::int64_t node) {
    double s = 0.0;
    for (int c = 0; c < k; ++c) s += f.at(node, c) * f.at(node, c);
    out.at(node, 0) = std::sqrt(s);
  });
  return out;
}

double sup_norm(const PeriodicField& f) {
  const int k = f.dim_range();
  return parallel_max(f.node_count(), [&](std::int64_t node) {
    double s = 0.0;
    for (int c = 0; c < k; ++c) s += f.at(node, c) * f.at(node, c);
    return std::sqrt(s);
  });
}

double sup_norm(const MetricField& f) {
  // Max over nodes of the matrix sup-eigenvalue norm, via Frobenius bound-free
  // exact 2x2 / Eigen path would be heavier; Frobenius is the recorded norm.
  return sup_norm(f.field());
}

double sup_diff(const PeriodicField& a, const PeriodicField& b) {
  if (a.values().size() != b.values().size()) throw Error("sup_diff: shape mismatch");
  const auto& va = a.values();
  const auto& vb = b.values();
  return parallel_max(static_cast<std::int64_t>(va.size()),
                      [&](std::int64_t i) { return std::abs(va[i] - vb[i]); });
}

namespace detail {

// Offsets with 0 < h*|o| <= dist_cap, first nonzero component positive.
std::vector<Coord> pair_offsets(const PeriodicField& f, double dist_cap) {
  const int n = f.dim_domain();
  const double h = f.spacing();
  int rad = static_cast<int>(std::floor(dist_cap / h));
  std::vector<Coord> offs;
  if (rad >= 1) {
    int span = 2 * rad + 1;
    std::int64_t total = 1;
    for (int a = 0; a < n; ++a) total *= span;
    for (std::int64_t it = 0; it < total; ++it) {
      std::int64_t rem = it;
      Coord o{};
      double d2 = 0.0;
      for (int a = 0; a < n; ++a) {
        o[a] = static_cast<int>(rem % span) - rad;
        rem /= span;
        d2 += static_cast<double>(o[a]) * o[a];
      }
      if (h * std::sqrt(d2) > dist_cap) continue;
      int lead = 0;
      for (int a = 0; a < n; ++a) {
        if (o[a] != 0) {
          lead = o[a];
          break;
        }
      }
      if (lead > 0) offs.push_back(o);
    }
  }
  if (offs.empty()) {
    for (int a = 0; a < n; ++a) {
      Coord o{};
      o[a] = 1;
      offs.push_back(o);
    }
  }
  return offs;
}

}  // namespace detail

static double seminorm_impl(const PeriodicField& f, double alpha, bool parallel) {
  const auto offs = detail::pair_offsets(f, 0.25);
  const double h = f.spacing();
  const int k = f.dim_range();
  const std::int64_t nn = f.node_count();
  const std::int64_t total = static_cast<std::int64_t>(offs.size()) * nn;
  const std::int64_t budget = 1000000;
  const std::int64_t stride = std::max<std::int64_t>(1, (total + budget - 1) / budget);

  std::vector<double> dist_pow(offs.size());
  std::vector<std::array<std::int64_t, 2>> shift_base(offs.size());
  for (std::size_t oi = 0; oi < offs.size(); ++oi) {
    double d2 = 0.0;
    for (int a = 0; a < f.dim_domain(); ++a) d2 += static_cast<double>(offs[oi][a]) * offs[oi][a];
    dist_pow[oi] = std::pow(h * std::sqrt(d2), alpha);
  }

  auto pair_ratio = [&](std::int64_t p) {
    std::int64_t node = p % nn;
    std::size_t oi = static_cast<std::size_t>(p / nn);
    Coord c = f.coord_of(node);
    Coord cc{};
    for (int a = 0; a < f.dim_domain(); ++a) cc[a] = c[a] + offs[oi][a];
    std::int64_t other = f.flat_index(cc);
    double s = 0.0;
    for (int comp = 0; comp < k; ++comp) {
      double d = f.at(node, comp) - f.at(other, comp);
      s += d * d;
    }
    return std::sqrt(s) / dist_pow[oi];
  };

  const std::int64_t count = (total + stride - 1) / stride;
  if (parallel) {
    return parallel_max(count, [&](std::int64_t i) { return pair_ratio(i * stride); });
  }
  double m = 0.0;
  for (std::int64_t i = 0; i < count; ++i) m = std::max(m, pair_ratio(i * stride));
  return m;
}

double holder_seminorm(const PeriodicField& f, double alpha) { return seminorm_impl(f, alpha, true); }

namespace ref {
double holder_seminorm(const PeriodicField& f, double alpha) { return seminorm_impl(f, alpha, false); }
}  // namespace ref

HolderReport holder_norms(const PeriodicField& f, const std::vector<double>& alphas) {
  if (f.node_count() == 0 || f.values().empty()) throw Error("holder_norms: empty field");
  HolderReport rep;
  rep.sup_norm = sup_norm(f);

  const int n = f.dim_domain();
  std::vector<PeriodicField> du;
  for (int a = 0; a < n; ++a) du.push_back(diff(f, a, 1));
  double g1 = 0.0;
  {
    const std::int64_t nn = f.node_count();
    const int k = f.dim_range();
    g1 = parallel_max(nn, [&](std::int64_t node) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < k; ++c) s += du[a].at(node, c) * du[a].at(node, c);
      return std::sqrt(s);
    });
  }
  rep.grad_semi = g1;
  rep.grad_sup = rep.sup_norm + g1;

  // Hessian seminorm: all second derivatives (diagonal by the order-2
  // stencil, mixed by composed first derivatives).
  double g2 = 0.0;
  {
    std::vector<PeriodicField> d2;
    for (int a = 0; a < n; ++a) d2.push_back(diff(f, a, 2));
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) d2.push_back(diff(du[a], b, 1));
    const std::int64_t nn = f.node_count();
    const int k = f.dim_range();
    g2 = parallel_max(nn, [&](std::int64_t node) {
      double s = 0.0;
      for (std::size_t q = 0; q < d2.size(); ++q) {
        // Off-diagonal entries appear twice in the Hessian.
        double mult = (q < static_cast<std::size_t>(n)) ? 1.0 : 2.0;
        for (int c = 0; c < k; ++c) s += mult * d2[q].at(node, c) * d2[q].at(node, c);
      }
      return std::sqrt(s);
    });
  }
  rep.hess_semi = g2;
  rep.hess_sup = rep.grad_sup + g2;

  rep.alphas = alphas;
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 1.0)) throw Error("holder_norms: alpha must lie in (0,1]");
    rep.seminorms.push_back(holder_seminorm(f, a));
  }
  return rep;
}

}  // namespace ci
