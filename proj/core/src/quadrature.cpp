#include "opcond/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "opcond/error.hpp"

namespace opcond {

LineRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "Gauss rule needs at least one point");
  LineRule rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    rule.points[lo] = 0.5 * (1.0 - x);
    rule.points[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

TriangleRule collapsed_gauss(int n) {
  const LineRule g = gauss_legendre(n);
  TriangleRule rule;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = g.points[static_cast<std::size_t>(i)], b = g.points[static_cast<std::size_t>(j)];
      rule.points.push_back({a, (1.0 - a) * b});
      rule.weights.push_back(g.weights[static_cast<std::size_t>(i)] * g.weights[static_cast<std::size_t>(j)] * (1.0 - a));
    }
  }
  return rule;
}

namespace {

/// Maps a point of {0 <= s2 <= s1 <= 1} to the reference triangle.
std::array<double, 2> to_unit(double s1, double s2) { return {s1 - s2, s2}; }

}  // namespace

PairRule sauter_schwab_rule(PairClass cls, int n) { return sauter_schwab_rule(cls, {n, n, n, n}); }

PairRule sauter_schwab_rule(PairClass cls, const std::array<int, 4>& orders) {
  const std::array<LineRule, 4> g = {gauss_legendre(orders[0]), gauss_legendre(orders[1]), gauss_legendre(orders[2]),
                                     gauss_legendre(orders[3])};
  PairRule rule;
  auto add = [&](double w, double a1, double a2, double b1, double b2) {
    rule.first.push_back(to_unit(a1, a2));
    rule.second.push_back(to_unit(b1, b2));
    rule.weights.push_back(w);
  };
  for (std::size_t i0 = 0; i0 < g[0].points.size(); ++i0)
    for (std::size_t i1 = 0; i1 < g[1].points.size(); ++i1)
      for (std::size_t i2 = 0; i2 < g[2].points.size(); ++i2)
        for (std::size_t i3 = 0; i3 < g[3].points.size(); ++i3) {
          const double xi = g[0].points[i0], e1 = g[1].points[i1], e2 = g[2].points[i2], e3 = g[3].points[i3];
          const double w = g[0].weights[i0] * g[1].weights[i1] * g[2].weights[i2] * g[3].weights[i3];
          switch (cls) {
            case PairClass::identical: {
              const double j = w * xi * xi * xi * e1 * e1 * e2;
              add(j, xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1));
              add(j, xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2));
              add(j, xi, xi * e1 * (1 - e2 + e2 * e3), xi * (1 - e1 * e2), xi * e1 * (1 - e2));
              add(j, xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * (1 - e2 + e2 * e3));
              add(j, xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * (1 - e2));
              add(j, xi, xi * e1 * (1 - e2), xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3));
              break;
            }
            case PairClass::common_edge: {
              const double j1 = w * xi * xi * xi * e1 * e1;
              const double j = j1 * e2;
              add(j1, xi, xi * e1 * e3, xi * (1 - e1 * e2), xi * e1 * (1 - e2));
              add(j, xi, xi * e1, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3));
              add(j, xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * e2 * e3);
              add(j, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), xi, xi * e1);
              add(j, xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * e2);
              break;
            }
            case PairClass::common_vertex: {
              const double j = w * xi * xi * xi * e2;
              add(j, xi, xi * e1, xi * e2, xi * e2 * e3);
              add(j, xi * e2, xi * e2 * e3, xi, xi * e1);
              break;
            }
            case PairClass::disjoint: {
              add(w * xi * e2, xi, xi * e1, e2, e2 * e3);
              break;
            }
          }
        }
  return rule;
}

}  // namespace opcond
