#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "sk/process.hpp"

namespace sk::oracle {

// e^{tau G} by scaling-and-squaring with diagonal Pade approximants
// (orders 3/5/7/9/13, norm-based selection). Dimension capped at 2000.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& g, double tau);

// exp(tau (G - diag(phi))) q  -- the dense Feynman-Kac reference.
Eigen::VectorXd feynman_kac_matrix(const Eigen::MatrixXd& g, const Eigen::VectorXd& phi,
                                   const Eigen::VectorXd& q, double tau);

enum class McScheme { euler, exact_ou, cir_full_truncation };

struct McConfig {
    std::int64_t n_paths = 100000;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    McScheme scheme = McScheme::euler;
    bool antithetic = false;
    bool parallel = true;  // OpenMP kernel; false selects the serial reference
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n_effective = 0;
};

// Sample mean/SE of exp(-theta * int phi(X_s) ds) q(X_tau) over simulated paths.
// The path integral uses the trapezoidal rule on the simulation grid. Results
// are bit-identical for a fixed seed regardless of thread count.
McEstimate mc_laplace(const DiffusionSpec& spec, const std::function<double(double)>& phi,
                      const std::function<double(double)>& q, double theta, double tau,
                      double x0, const McConfig& cfg);

// Materialized trajectories for small configurations (moment/distribution tests).
struct PathBatch {
    std::int64_t n_paths = 0;
    int n_steps = 0;
    double dt = 0.0;
    std::vector<double> states;  // (n_steps+1) x n_paths, row-major by step
    double at(int step, std::int64_t path) const { return states[static_cast<std::size_t>(step) * n_paths + path]; }
};

PathBatch simulate_paths(const DiffusionSpec& spec, double x0, double tau, const McConfig& cfg);

}  // namespace sk::oracle
