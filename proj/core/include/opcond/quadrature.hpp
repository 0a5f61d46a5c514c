#pragma once

#include <array>
#include <vector>

namespace opcond {

/// One-dimensional rule on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [0, 1]; exact for degree 2n - 1.
LineRule gauss_legendre(int n);

/// Rule on the reference triangle {x, y >= 0, x + y <= 1}; weights sum to 1/2.
struct TriangleRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
};

/// Collapsed (Duffy) tensor Gauss rule with n points per direction; exact for total degree 2n - 2.
TriangleRule collapsed_gauss(int n);

/// Touching-pair classes for the singular panel-pair rules.
enum class PairClass { identical = 0, common_edge = 1, common_vertex = 2, disjoint = 3 };

/// Product rule over the reference triangle pair. Points are reference coordinates
/// (x, y) with barycentrics (1 - x - y, x, y) relative to the vertex orders in which the
/// shared vertices come first, in matching order. Weights sum to 1/4.
struct PairRule {
  std::vector<std::array<double, 2>> first;
  std::vector<std::array<double, 2>> second;
  std::vector<double> weights;
};

/// Regularizing coordinate-transform rule for the given class, n Gauss points per direction.
PairRule sauter_schwab_rule(PairClass cls, int n);
/// Same rule with separate Gauss orders for (xi, eta1, eta2, eta3).
PairRule sauter_schwab_rule(PairClass cls, const std::array<int, 4>& orders);

}  // namespace opcond
