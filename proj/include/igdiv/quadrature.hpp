#pragma once

#include <functional>
#include <vector>

namespace igdiv {

/// Gauss-Legendre nodes and weights on [0, 1].
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order() const { return static_cast<int>(nodes.size()); }
};

/// Rule of the given order on [0, 1]; cached per order.
const QuadRule& gauss_legendre(int order);

/// Integrate f over [0,1] with the given rule.
double integrate(const QuadRule& rule, const std::function<double(double)>& f);

}  // namespace igdiv
