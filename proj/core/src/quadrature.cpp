#include "kgwell/quadrature.hpp"

#include "kgwell/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kgwell {

void gauss_legendre(int points, std::vector<double>& nodes, std::vector<double>& weights) {
  if (points < 1) throw InvalidInput("Gauss-Legendre rule needs at least one point");
  nodes.assign(static_cast<std::size_t>(points), 0.0);
  weights.assign(static_cast<std::size_t>(points), 0.0);
  const int n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      // final derivative at the converged node
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1, 1] -> [0, 1]
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    nodes[lo] = 0.5 * (1.0 - x);
    nodes[hi] = 0.5 * (1.0 + x);
    weights[lo] = 0.5 * w;
    weights[hi] = 0.5 * w;
  }
}

namespace {

using Bary = Eigen::Vector3d;
using Polygon = std::vector<Bary>;

double area_ratio(const Bary& a, const Bary& b, const Bary& c) {
  Eigen::Matrix3d m;
  m.col(0) = a;
  m.col(1) = b;
  m.col(2) = c;
  return std::abs(m.determinant());
}

void clip(const Polygon& poly, const Eigen::Vector3d& f, Polygon& pos, Polygon& neg) {
  pos.clear();
  neg.clear();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Bary& p = poly[i];
    const Bary& q = poly[(i + 1) % n];
    const double sp = f.dot(p);
    const double sq = f.dot(q);
    if (sp >= 0.0) pos.push_back(p);
    if (sp <= 0.0) neg.push_back(p);
    if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
      const double s = sp / (sp - sq);
      const Bary x = (1.0 - s) * p + s * q;
      pos.push_back(x);
      neg.push_back(x);
    }
  }
}

bool straddles(const Eigen::Vector3d& f, int vertices) {
  const double lo = f.head(vertices).minCoeff();
  const double hi = f.head(vertices).maxCoeff();
  return lo < 0.0 && hi > 0.0;
}

}  // namespace

SimplexQuadrature::SimplexQuadrature(int dimension, int degree)
    : dimension_(dimension), degree_(degree) {
  if (dimension != 1 && dimension != 2) throw InvalidInput("quadrature dimension must be 1 or 2");
  if (degree < 0) throw InvalidInput("quadrature degree must be non-negative");
  std::vector<double> x, w;
  if (dimension == 1) {
    gauss_legendre(degree / 2 + 1, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) reference_.push_back({Bary(1.0 - x[i], x[i], 0.0), w[i]});
    return;
  }
  // Collapsed (Duffy) tensor rule: the Jacobian adds one degree in the
  // collapsed direction.
  const int k = (degree + 2) / 2 + 1;
  gauss_legendre(k, x, w);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double s = x[i];
      const double t = x[j] * (1.0 - s);
      reference_.push_back({Bary(1.0 - s - t, s, t), 2.0 * w[i] * w[j] * (1.0 - s)});
    }
  }
}

void SimplexQuadrature::split(std::span<const Eigen::Vector3d> vertex_values,
                              std::vector<QuadPoint>& out) const {
  out.clear();
  const int nv = dimension_ + 1;
  bool any = false;
  for (const auto& f : vertex_values) any = any || straddles(f, nv);
  if (!any) {
    out = reference_;
    return;
  }

  if (dimension_ == 1) {
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& f : vertex_values) {
      if (straddles(f, 2)) cuts.push_back(f[0] / (f[0] - f[1]));
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c], b = cuts[c + 1];
      if (!(b > a)) continue;
      for (const auto& q : reference_) {
        const double s = a + (b - a) * q.bary[1];
        out.push_back({Bary(1.0 - s, s, 0.0), (b - a) * q.weight});
      }
    }
    return;
  }

  std::vector<Polygon> cells{Polygon{Bary(1, 0, 0), Bary(0, 1, 0), Bary(0, 0, 1)}};
  std::vector<Polygon> next;
  Polygon pos, neg;
  for (const auto& f : vertex_values) {
    if (!straddles(f, 3)) continue;
    next.clear();
    for (const auto& poly : cells) {
      clip(poly, f, pos, neg);
      if (pos.size() >= 3) next.push_back(pos);
      if (neg.size() >= 3) next.push_back(neg);
    }
    cells.swap(next);
  }
  for (const auto& poly : cells) {
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
      const Bary& a = poly[0];
      const Bary& b = poly[k];
      const Bary& c = poly[k + 1];
      const double ratio = area_ratio(a, b, c);
      if (ratio <= 0.0) continue;
      for (const auto& q : reference_) {
        out.push_back({q.bary[0] * a + q.bary[1] * b + q.bary[2] * c, ratio * q.weight});
      }
    }
  }
}

}  // namespace kgwell
