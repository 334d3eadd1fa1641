#pragma once

#include <functional>
#include <optional>

#include "sk/orthopoly.hpp"
#include "sk/process.hpp"

namespace sk::diff {

// Truncated-series evaluation with its certificate.
struct SeriesEval {
    double value = 0.0;
    int terms_used = 0;
    double tail_estimate = 0.0;
    bool truncation_warning = false;
};

// Closed-form transition density (GBM lognormal, OU Gaussian, CIR Bessel form).
double density_closed(const DiffusionSpec& spec, double tau, double x, double y);

// Eigenfunction-expansion transition density (OU, CIR, Jacobi, dual Jacobi).
SeriesEval density_series(const DiffusionSpec& spec, double tau, double x, double y, int n_terms);

// Closed-form Laplace transforms: OU with affine or quadratic potential, CIR
// with affine potential. For the OU quadratic form the payoff exp_affine(omega)
// means q = exp(omega * phi(x)); in the affine cases it is q = exp(omega * x).
double laplace_closed(const DiffusionSpec& spec, const PhiSpec& phi, const PayoffSpec& q,
                      double tau, double x);

// Bar-family eigenfunction series for the Laplace transform:
//   L = e^{-theta C tau} V(x) sum_n e^{lambda_bar_n tau} z_n Qbar_n(x),
// where V is the drift-change gauge factor of (spec, barspec) and C is the
// constant offset between the requested potential and the gauge potential
// (validated to be constant at probe points).
SeriesEval laplace_series(const DiffusionSpec& spec, const DiffusionSpec& barspec,
                          const PhiSpec& phi, const PayoffSpec& q, double tau, double x,
                          int n_terms);

// Expansion coefficient z_n = (1/dbar_n^2) int q V^{-1} Qbar_n wbar. quad_order <= 0
// selects the default 2n + 24.
double coeff_z(const DiffusionSpec& spec, const DiffusionSpec& barspec, const PayoffSpec& q,
               int n, int quad_order = 0);

// The gauge factor V(x) and the gauge potential of a (spec, barspec) pair.
double gauge_prefactor(const DiffusionSpec& spec, const DiffusionSpec& barspec, double x);
double gauge_potential(const DiffusionSpec& spec, const DiffusionSpec& barspec, double theta,
                       double x);

// User potential evaluation; family_ratio forms need the bar spec.
double phi_eval(const PhiSpec& phi, const DiffusionSpec& spec,
                const std::optional<DiffusionSpec>& barspec, double x);

// Mixed-spectrum Laplace transform for GBM with the quadratic potential
// family: a finite sum over bound states plus a continuous-spectrum integral.
struct GbmLaplaceResult {
    double value = 0.0;
    double discrete_part = 0.0;
    int n_bound = 0;
    double edge_certificate = 0.0;  // |q K| at the integration-window edges
};

GbmLaplaceResult laplace_gbm(const DiffusionSpec& spec, const PhiSpec& phi, const PayoffSpec& q,
                             double tau, double x, double tol = 1e-10);

// --- constructive machinery ---

enum class PolyA { one, x, x_one_minus_x, x_sq_plus_one };

double eval_poly_a(PolyA a, double x);

struct Quadratic {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    double operator()(double x) const { return c0 + x * (c1 + x * c2); }
    double deriv(double x) const { return c1 + 2.0 * c2 * x; }
};

struct Sde {
    std::function<double(double)> drift;
    std::function<double(double)> vol;
};

// Drift 2 (h'/h) A^2/R and volatility sqrt(2) A / sqrt(R) from a catalog choice.
Sde construct_sde(PolyA a, const Quadratic& r, std::function<double(double)> h,
                  std::function<double(double)> h_prime);

// Rational normal-form invariant (S - Q - lambda R)/A^2 at x.
double bose_invariant(PolyA a, const Quadratic& s, const Quadratic& q, const Quadratic& r,
                      double lambda, double x);

// Potential of the reduced second-order form, per-family closed expressions.
// xi is the free separation constant of the gauge eigenfunction.
double schrodinger_potential(const DiffusionSpec& spec, const std::optional<PhiSpec>& phi,
                             double z, double xi = 0.0);

// |density_closed - conjugated oscillator kernel| for the OU process, where both
// sides are independently known in closed form.
double kernel_conjugation_check(const DiffusionSpec& spec, double tau, double x, double y);

}  // namespace sk::diff
