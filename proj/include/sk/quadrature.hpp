#pragma once

#include <functional>
#include <vector>

#include "sk/errors.hpp"

namespace sk::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

// Gauss rule from a monic three-term recurrence p_{k+1} = (x - a_k) p_k - b_k p_{k-1}
// via the Golub-Welsch eigendecomposition. `mass` is the total weight integral b_0.
Rule golub_welsch(const std::vector<double>& a, const std::vector<double>& b, double mass);

// Classical rules.
Rule gauss_legendre(int order);                         // weight 1 on [-1,1]
Rule gauss_hermite(int order);                          // weight e^{-u^2} on R
Rule gauss_laguerre(int order, double alpha);           // weight u^alpha e^{-u} on [0,inf)
Rule gauss_jacobi01(int order, double a, double b);     // weight x^a (1-x)^b on [0,1]

// Map a [-1,1] reference rule onto [lo,hi].
Rule scaled_to(const Rule& ref, double lo, double hi);

// Fixed-order Gauss-Legendre panels covering [lo,hi], panel width <= per.
Rule panels(double lo, double hi, double per, int order);

// Adaptive Gauss-Kronrod (G7,K15) with bisection. Returns the integral and
// writes the accumulated error estimate. Throws QuadratureFailure when the
// subdivision budget is exhausted before the tolerance is met.
double adaptive_gk(const std::function<double(double)>& f, double lo, double hi,
                   double tol_abs, double tol_rel, double* err_out = nullptr,
                   int max_depth = 14);

}  // namespace sk::quad
