#include "sk/oracles.hpp"

#include <cmath>

#include "sk/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sk::oracle {

namespace {

// Pade coefficient tables for e^X (Higham 2005).
const double kB3[] = {120, 60, 12, 1};
const double kB5[] = {30240, 15120, 3360, 420, 30, 1};
const double kB7[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
const double kB9[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                      2162160., 110880., 3960., 90., 1.};
const double kB13[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                       1187353796428800.,  129060195264000.,   10559470521600.,
                       670442572800.,      33522128640.,       1323241920.,
                       40840800.,          960960.,            16380., 182., 1.};

Eigen::MatrixXd pade_low(const Eigen::MatrixXd& x, const double* b, int m) {
    const int n = static_cast<int>(x.rows());
    Eigen::MatrixXd x2 = x * x;
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd pw = Eigen::MatrixXd::Identity(n, n);
    // u collects odd coefficients (times X at the end), v the even ones.
    u += b[1] * pw;
    v += b[0] * pw;
    for (int k = 2; k <= m; k += 2) {
        pw = pw * x2;
        v += b[k] * pw;
        if (k + 1 <= m) u += b[k + 1] * pw;
    }
    u = x * u;
    Eigen::MatrixXd p = v + u, q = v - u;
    return q.partialPivLu().solve(p);
}

Eigen::MatrixXd pade13(const Eigen::MatrixXd& x) {
    const int n = static_cast<int>(x.rows());
    const double* b = kB13;
    Eigen::MatrixXd x2 = x * x, x4 = x2 * x2, x6 = x4 * x2;
    Eigen::MatrixXd i = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd u =
        x * (x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * i);
    Eigen::MatrixXd v =
        x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * i;
    Eigen::MatrixXd p = v + u, q = v - u;
    return q.partialPivLu().solve(p);
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& g, double tau) {
    if (g.rows() != g.cols()) throw InvalidParams("matrix_exponential: square matrix required");
    if (g.rows() > 2000) throw DimensionTooLarge("matrix_exponential: dimension exceeds 2000");
    if (!g.allFinite() || !std::isfinite(tau))
        throw NonFinite("matrix_exponential: non-finite input");
    Eigen::MatrixXd a = tau * g;
    const double nrm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
    // theta_m thresholds from the double-precision backward-error analysis.
    if (nrm <= 1.495585217958292e-2) return pade_low(a, kB3, 3);
    if (nrm <= 2.539398330063230e-1) return pade_low(a, kB5, 5);
    if (nrm <= 9.504178996162932e-1) return pade_low(a, kB7, 7);
    if (nrm <= 2.097847961257068e0) return pade_low(a, kB9, 9);
    const double theta13 = 5.371920351148152;
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    if (s > 0) a /= std::pow(2.0, s);
    Eigen::MatrixXd r = pade13(a);
    for (int k = 0; k < s; ++k) r = r * r;
    return r;
}

Eigen::VectorXd feynman_kac_matrix(const Eigen::MatrixXd& g, const Eigen::VectorXd& phi,
                                   const Eigen::VectorXd& q, double tau) {
    if (g.rows() != phi.size() || g.rows() != q.size())
        throw InvalidParams("feynman_kac_matrix: dimension mismatch");
    Eigen::MatrixXd m = g;
    m.diagonal() -= phi;
    return matrix_exponential(m, tau) * q;
}

namespace {

struct StepPlan {
    int n_steps;
    double dt;
};

StepPlan plan_steps(double tau, double dt) {
    if (!(dt > 0.0) || dt > tau) throw InvalidParams("mc: requires 0 < dt <= tau");
    int n = static_cast<int>(std::ceil(tau / dt - 1e-12));
    return {n, tau / n};
}

void check_scheme(const DiffusionSpec& spec, McScheme scheme) {
    if (scheme == McScheme::exact_ou && spec.kind != DiffusionKind::ou)
        throw SchemeMismatch("mc: exact-ou scheme requires an ou process");
    if (scheme == McScheme::cir_full_truncation && spec.kind != DiffusionKind::cir)
        throw SchemeMismatch("mc: cir-full-truncation scheme requires a cir process");
}

// One path's trapezoidal potential integral and terminal state.
template <typename PhiFn>
void run_path(const DiffusionSpec& spec, McScheme scheme, const PhiFn& phi, double x0,
              const StepPlan& sp, std::uint64_t seed, std::uint64_t draw_path, double z_sign,
              double& integral_out, double& terminal_out, bool& finite_out) {
    const double dt = sp.dt, sdt = std::sqrt(dt);
    double x = x0;
    double acc = 0.0;
    double phi_prev = phi(x);
    bool ok = true;
    // Exact OU transition constants.
    double e_ou = 0.0, s_ou = 0.0;
    if (scheme == McScheme::exact_ou) {
        e_ou = std::exp(-spec.b * dt);
        s_ou = spec.sigma * std::sqrt((1.0 - e_ou * e_ou) / (2.0 * spec.b));
    }
    const double eps_refl = 1e-12;
    for (int k = 0; k < sp.n_steps; ++k) {
        double z = z_sign * rng::normal(seed, draw_path, static_cast<std::uint64_t>(k), 0);
        double xn;
        switch (scheme) {
            case McScheme::exact_ou:
                xn = spec.a / spec.b + (x - spec.a / spec.b) * e_ou + s_ou * z;
                break;
            case McScheme::cir_full_truncation: {
                double xp = std::max(x, 0.0);
                xn = x + (spec.a - spec.b * xp) * dt + spec.sigma * std::sqrt(xp) * sdt * z;
                break;
            }
            case McScheme::euler:
            default:
                xn = x + spec.drift(x) * dt + spec.vol(x) * sdt * z;
                break;
        }
        if (spec.kind == DiffusionKind::jacobi || spec.kind == DiffusionKind::dual_jacobi) {
            // Reflect into [eps, 1-eps].
            if (xn < eps_refl) xn = std::min(2.0 * eps_refl - xn, 1.0 - eps_refl);
            if (xn > 1.0 - eps_refl) xn = std::max(2.0 * (1.0 - eps_refl) - xn, eps_refl);
        }
        if (spec.kind == DiffusionKind::gbm && xn < 0.0) xn = 0.0;
        double phi_next = phi(scheme == McScheme::cir_full_truncation ? std::max(xn, 0.0) : xn);
        acc += 0.5 * (phi_prev + phi_next) * dt;
        phi_prev = phi_next;
        x = xn;
        if (!std::isfinite(x) || !std::isfinite(acc)) {
            ok = false;
            break;
        }
    }
    integral_out = acc;
    terminal_out = scheme == McScheme::cir_full_truncation ? std::max(x, 0.0) : x;
    finite_out = ok;
}

}  // namespace

McEstimate mc_laplace(const DiffusionSpec& spec, const std::function<double(double)>& phi,
                      const std::function<double(double)>& q, double theta, double tau,
                      double x0, const McConfig& cfg) {
    spec.validate();
    check_scheme(spec, cfg.scheme);
    if (cfg.n_paths < 100) throw InvalidParams("mc: requires n_paths >= 100");
    StepPlan sp = plan_steps(tau, cfg.dt);

    const std::int64_t n = cfg.n_paths;
    std::vector<double> payoff(static_cast<std::size_t>(n));
    std::vector<unsigned char> bad(static_cast<std::size_t>(n), 0);

    auto body = [&](std::int64_t p) {
        std::uint64_t draw_path = cfg.antithetic ? static_cast<std::uint64_t>(p / 2)
                                                 : static_cast<std::uint64_t>(p);
        double z_sign = (cfg.antithetic && (p % 2 == 1)) ? -1.0 : 1.0;
        double integral, terminal;
        bool ok;
        run_path(spec, cfg.scheme, phi, x0, sp, cfg.seed, draw_path, z_sign, integral, terminal, ok);
        double v = ok ? std::exp(-theta * integral) * q(terminal) : 0.0;
        if (!std::isfinite(v)) ok = false;
        payoff[static_cast<std::size_t>(p)] = ok ? v : 0.0;
        bad[static_cast<std::size_t>(p)] = ok ? 0 : 1;
    };

    if (cfg.parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::int64_t p = 0; p < n; ++p) body(p);
    } else {
        for (std::int64_t p = 0; p < n; ++p) body(p);
    }

    std::int64_t n_bad = 0;
    for (auto b : bad) n_bad += b;
    if (n_bad > 0)
        throw NonFinite("mc_laplace: " + std::to_string(n_bad) + " paths became non-finite");

    // Fixed sequential reduction keeps results thread-count independent.
    auto stats = [](const double* v, std::int64_t m) {
        double s = 0.0, comp = 0.0;
        for (std::int64_t i = 0; i < m; ++i) {
            double y = v[i] - comp;
            double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        double mean = s / m;
        double ss = 0.0;
        for (std::int64_t i = 0; i < m; ++i) {
            double d = v[i] - mean;
            ss += d * d;
        }
        double se = m > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
        return std::pair<double, double>(mean, se);
    };

    McEstimate est;
    if (cfg.antithetic) {
        std::int64_t pairs = n / 2;
        std::vector<double> pm(static_cast<std::size_t>(pairs));
        for (std::int64_t i = 0; i < pairs; ++i)
            pm[static_cast<std::size_t>(i)] =
                0.5 * (payoff[static_cast<std::size_t>(2 * i)] + payoff[static_cast<std::size_t>(2 * i + 1)]);
        auto [mean, se] = stats(pm.data(), pairs);
        est.mean = mean;
        est.std_error = se;
        est.n_effective = n;
    } else {
        auto [mean, se] = stats(payoff.data(), n);
        est.mean = mean;
        est.std_error = se;
        est.n_effective = n;
    }
    return est;
}

PathBatch simulate_paths(const DiffusionSpec& spec, double x0, double tau, const McConfig& cfg) {
    spec.validate();
    check_scheme(spec, cfg.scheme);
    StepPlan sp = plan_steps(tau, cfg.dt);
    if (cfg.n_paths * static_cast<std::int64_t>(sp.n_steps + 1) > (1LL << 25))
        throw DimensionTooLarge("simulate_paths: batch too large to materialize");
    if (x0 < spec.domain_lo() || x0 > spec.domain_hi())
        throw DomainError("simulate_paths: x0 outside the process domain");

    PathBatch batch;
    batch.n_paths = cfg.n_paths;
    batch.n_steps = sp.n_steps;
    batch.dt = sp.dt;
    batch.states.assign(static_cast<std::size_t>(sp.n_steps + 1) * cfg.n_paths, x0);

    const double sdt = std::sqrt(sp.dt);
    double e_ou = 0.0, s_ou = 0.0;
    if (cfg.scheme == McScheme::exact_ou) {
        e_ou = std::exp(-spec.b * sp.dt);
        s_ou = spec.sigma * std::sqrt((1.0 - e_ou * e_ou) / (2.0 * spec.b));
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (cfg.parallel)
#endif
    for (std::int64_t p = 0; p < cfg.n_paths; ++p) {
        std::uint64_t draw_path = cfg.antithetic ? static_cast<std::uint64_t>(p / 2)
                                                 : static_cast<std::uint64_t>(p);
        double z_sign = (cfg.antithetic && (p % 2 == 1)) ? -1.0 : 1.0;
        double x = x0;
        for (int k = 0; k < sp.n_steps; ++k) {
            double z = z_sign * rng::normal(cfg.seed, draw_path, static_cast<std::uint64_t>(k), 0);
            double xn;
            switch (cfg.scheme) {
                case McScheme::exact_ou:
                    xn = spec.a / spec.b + (x - spec.a / spec.b) * e_ou + s_ou * z;
                    break;
                case McScheme::cir_full_truncation: {
                    double xp = std::max(x, 0.0);
                    xn = x + (spec.a - spec.b * xp) * sp.dt + spec.sigma * std::sqrt(xp) * sdt * z;
                    break;
                }
                case McScheme::euler:
                default:
                    xn = x + spec.drift(x) * sp.dt + spec.vol(x) * sdt * z;
                    break;
            }
            if (spec.kind == DiffusionKind::jacobi || spec.kind == DiffusionKind::dual_jacobi) {
                if (xn < 1e-12) xn = std::min(2e-12 - xn, 1.0 - 1e-12);
                if (xn > 1.0 - 1e-12) xn = std::max(2.0 * (1.0 - 1e-12) - xn, 1e-12);
            }
            batch.states[static_cast<std::size_t>(k + 1) * cfg.n_paths + p] = xn;
            x = xn;
        }
    }
    return batch;
}

}  // namespace sk::oracle
