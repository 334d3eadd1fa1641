#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sk/orthopoly.hpp"
#include "sk/process.hpp"

namespace sk::disc {

// A birth-death chain generated by one of the lattice polynomial families.
// For Meixner (infinite lattice) the state space is truncated where the
// stationary tail mass drops below tail_tol, with a reflecting top boundary.
struct DiscreteSpec {
    op::PolyFamily family;
    double sigma = 1.0;
    double tail_tol = 1e-12;  // Meixner truncation certificate
    int n_trunc_override = -1;

    static DiscreteSpec meixner(double beta, double c, double sigma);
    static DiscreteSpec dual_hahn(double gamma, double delta, int n, double sigma);
    static DiscreteSpec racah(double alpha, double beta, double gamma, double delta, int n,
                              double sigma);

    void validate() const;
    bool finite() const { return family.is_finite_lattice(); }
    int lattice_size() const;        // largest state index
    double tail_mass() const;        // stationary mass beyond the truncation (Meixner)
};

// Bar-parameter set tied to a DiscreteSpec.
struct BarParams {
    // Meixner: Bbar = B e^{phi_shift}, Dbar = D e^{-phi_shift}.
    double phi_shift = 0.0;
    // Racah: replacement parameter quadruple. Dual Hahn: gamma/delta swap.
    bool swap_gamma_delta = false;
    bool has_racah = false;
    double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;

    static BarParams meixner_shift(double phi);
    static BarParams dual_hahn_swap();
    static BarParams racah_set(double alpha, double beta, double gamma, double delta);
    static BarParams identity();
};

struct Rates {
    double b;  // up-jump coefficient, <= 0; rate is -b
    double d;  // down-jump coefficient, <= 0; rate is -d
};

Rates rates(const DiscreteSpec& spec, int x);
Rates bar_rates(const DiscreteSpec& spec, const BarParams& bar, int x);

// The bar family as a PolyFamily (Meixner shift changes c; swaps/replacements
// for the finite families).
op::PolyFamily bar_family(const DiscreteSpec& spec, const BarParams& bar);
double bar_sigma(const DiscreteSpec& spec, const BarParams& bar);

// Conservative tridiagonal rate matrix: off-diagonals -B(x), -D(x), diagonal B+D.
// Meixner top boundary is made reflecting.
Eigen::MatrixXd generator(const DiscreteSpec& spec);
Eigen::MatrixXd bar_generator(const DiscreteSpec& spec, const BarParams& bar);

// phi(x) = B(x) + D(x) - Bbar(x) - Dbar(x).
double phi_discrete(const DiscreteSpec& spec, const BarParams& bar, int x);

struct LatticeCheck {
    double max_rel_residual = 0.0;  // of Bbar(x-1)Dbar(x) = B(x-1)D(x)
    double max_bar_b = 0.0;         // must stay <= 0
    double max_bar_d = 0.0;
    bool acceptable = false;
    std::vector<double> residuals;
};

LatticeCheck lattice_check(const DiscreteSpec& spec, const BarParams& bar);

struct SpectralMatrix {
    Eigen::MatrixXd p;
    int terms_used = 0;
    double tail_estimate = 0.0;
    bool truncation_warning = false;
};

// p_tau(x,y) = sum_n e^{lambda_n tau} Q_n(x) Q_n(y) w(y) / d_n^2.
SpectralMatrix transition_matrix_spectral(const DiscreteSpec& spec, double tau, int n_terms = -1);

// Meixner transition probability in closed hypergeometric form.
double meixner_density_closed(const DiscreteSpec& spec, double tau, int x, int y);

// L_tau(x) = prod_{k<=x} D(k)/Dbar(k) * sum_n e^{lambda_bar_n tau} z_n Qbar_n(x).
// theta is fixed to 1 by the discrete construction.
struct SpectralLaplace {
    double value = 0.0;
    int terms_used = 0;
    double tail_estimate = 0.0;
};

SpectralLaplace laplace_spectral(const DiscreteSpec& spec, const BarParams& bar,
                                 const PayoffSpec& q, double tau, int x, int n_terms = -1);

double coeff_z_discrete(const DiscreteSpec& spec, const BarParams& bar, const PayoffSpec& q, int n);

// Exponential-affine closed form of the Meixner Laplace transform for
// q = exp(omega phi(x)).
double meixner_laplace_closed(const DiscreteSpec& spec, double phi_shift, double omega,
                              double tau, int x);

// Affine potential slope/intercept of the Meixner shift:
// phi(x) = rho x + zeta.
double meixner_rho(const DiscreteSpec& spec, double phi_shift);
double meixner_zeta(const DiscreteSpec& spec, double phi_shift);

// Acceptance fixtures: one Racah spec per truncation branch, with its
// acceptable bar set.
struct RacahFixture {
    DiscreteSpec spec;
    BarParams bar;
};
RacahFixture racah_fixture(int branch, int n = 20, double sigma = 1.0);

}  // namespace sk::disc
