#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sk/errors.hpp"

namespace sk {

enum class DiffusionKind { gbm, ou, cir, jacobi, dual_jacobi };

// One of the five solvable diffusions with its SDE parameters.
struct DiffusionSpec {
    DiffusionKind kind = DiffusionKind::ou;
    double mu = 0.0;     // gbm drift
    double a = 0.0;      // ou/cir/jacobi drift level
    double b = 0.0;      // mean reversion
    double sigma = 1.0;  // volatility scale

    static DiffusionSpec gbm(double mu, double sigma);
    static DiffusionSpec ou(double a, double b, double sigma);
    static DiffusionSpec cir(double a, double b, double sigma);
    static DiffusionSpec jacobi(double a, double b, double sigma);
    static DiffusionSpec dual_jacobi(double a, double b, double sigma);

    void validate() const;
    std::string name() const;

    // Induced Jacobi exponents alpha = 2a/sigma^2 - 1, beta = 2(b-a)/sigma^2 - 1.
    double jacobi_alpha() const;
    double jacobi_beta() const;

    double drift(double x) const;
    double vol(double x) const;

    // Domain endpoints (open where a boundary is unattainable).
    double domain_lo() const;
    double domain_hi() const;
};

// Potential phi(x) entering E[exp(-theta int phi(X_s) ds) q(X_T)].
struct PhiSpec {
    enum class Form {
        affine,         // phi = rho x + zeta
        quadratic,      // phi = c0 + c1 x + c2 x^2
        gbm_quadratic,  // sigma^2/(2 theta) (mu/s^2 (1-mu/s^2) - t0 - t1 x + t2 x^2)
        family_ratio,   // the per-family rational form tied to a bar-parameter set
        gauge           // exactly the gauge potential of (spec, barspec): no constant shift
    };
    Form form = Form::affine;
    double theta = 1.0;
    double rho = 1.0, zeta = 0.0;        // affine
    double c0 = 0.0, c1 = 0.0, c2 = 0.0; // quadratic
    double t0 = 0.0, t1 = 0.0, t2 = 0.0; // gbm_quadratic

    static PhiSpec affine(double theta, double rho = 1.0, double zeta = 0.0);
    static PhiSpec quadratic(double theta, double c0, double c1, double c2);
    static PhiSpec gbm_quadratic(double theta, double t0, double t1, double t2);
    static PhiSpec family_ratio(double theta);
    static PhiSpec gauge(double theta);
};

// Terminal payoff q(x).
struct PayoffSpec {
    enum class Form { one, exp_affine, tabulated };
    Form form = Form::one;
    double omega = 0.0;
    std::function<double(double)> fn;  // tabulated

    static PayoffSpec one();
    static PayoffSpec exp_affine(double omega);
    static PayoffSpec tabulated(std::function<double(double)> f);

    double operator()(double x) const;
};

}  // namespace sk
