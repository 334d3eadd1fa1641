#pragma once

#include <optional>
#include <string>

#include "sk/errors.hpp"
#include "sk/quadrature.hpp"

namespace sk::op {

enum class Family { hermite, laguerre, jacobi, dual_jacobi, meixner, dual_hahn, racah };

// Mean-reverting process parameters (a - b x drift, sigma volatility scale).
struct ProcessParams {
    double a = 0.0;
    double b = 1.0;
    double sigma = 1.0;
};

// One orthogonal polynomial family with its parameters.
//
// eval() uses each family's own standard argument: Hermite H_n(u) on R,
// Laguerre L_n^{(alpha)}(u) on [0,inf), Jacobi P_n^{(alpha,beta)}(u) on [-1,1],
// dual Jacobi D_n(x) = P_n(1-2x(2-x)) on [0,1], and the lattice families in the
// lattice point x.
struct PolyFamily {
    Family tag = Family::hermite;
    double alpha = 0.0;   // Laguerre/Jacobi/dual Jacobi/Racah
    double beta = 0.0;    // Jacobi/dual Jacobi/Meixner/Racah
    double gamma = 0.0;   // dual Hahn/Racah
    double delta = 0.0;   // dual Hahn/Racah
    double c = 0.0;       // Meixner
    int lattice_n = 0;    // dual Hahn/Racah lattice size N

    static PolyFamily hermite();
    static PolyFamily laguerre(double alpha);
    static PolyFamily jacobi(double alpha, double beta);
    static PolyFamily dual_jacobi(double alpha, double beta);
    static PolyFamily meixner(double beta, double c);
    static PolyFamily dual_hahn(double gamma, double delta, int n);
    static PolyFamily racah(double alpha, double beta, double gamma, double delta, int n);

    void validate() const;          // throws InvalidParams naming the violated constraint
    bool is_discrete() const;
    bool is_finite_lattice() const; // dual Hahn / Racah
    std::string name() const;

    // Which of the three Racah truncation relations holds (0/1/2).
    int racah_branch() const;
};

// Q_n at the family's standard argument (terminating hypergeometric sums for
// the discrete families, three-term recurrences for the continuous ones).
double eval(const PolyFamily& fam, int n, double x);

// Same value through the alternate route (recurrence for discrete families,
// hypergeometric definition for continuous ones). Used as a cross-check.
double eval_alt(const PolyFamily& fam, int n, double x);

// d/dx of eval for the continuous families, via the shifted-family identities.
double eval_derivative(const PolyFamily& fam, int n, double x);

// Orthogonality weight: density for continuous families (normalized Gaussian
// for Hermite, u^alpha e^{-u} for Laguerre, x^a(1-x)^b style for Jacobi),
// point mass for discrete ones.
double weight(const PolyFamily& fam, double x);

// Squared norm d_n^2 with respect to weight().
double norm_sq(const PolyFamily& fam, int n);

// Generator eigenvalue lambda_n (always <= 0, lambda_0 = 0).
double eigenvalue(const PolyFamily& fam, const ProcessParams& proc, int n);

// Gauss quadrature nodes/weights for the continuous families.
// Hermite returns the classical e^{-u^2} rule (total weight sqrt(pi)); the
// dual Jacobi rule is the Jacobi rule pushed through Z(x)=x(2-x) and is exact
// for polynomials in Z(x) of degree <= 2*order-1.
quad::Rule gauss_nodes(const PolyFamily& fam, int order);

// Lattice points 0..N (finite families) or 0..n_trunc (Meixner).
// Weight ratio w(x+1)/w(x), used for stable tail-mass accumulation.
double weight_ratio(const PolyFamily& fam, int x);

}  // namespace sk::op
