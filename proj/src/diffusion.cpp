#include "sk/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sk/special_functions.hpp"

namespace sk::diff {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sq(double v) { return v * v; }

op::PolyFamily family_of(const DiffusionSpec& s) {
    switch (s.kind) {
        case DiffusionKind::ou: return op::PolyFamily::hermite();
        case DiffusionKind::cir: return op::PolyFamily::laguerre(s.jacobi_alpha());
        case DiffusionKind::jacobi: return op::PolyFamily::jacobi(s.jacobi_alpha(), s.jacobi_beta());
        case DiffusionKind::dual_jacobi:
            return op::PolyFamily::dual_jacobi(s.jacobi_alpha(), s.jacobi_beta());
        default:
            throw UnsupportedKind("no polynomial family for this process kind");
    }
}

void require_series_pair(const DiffusionSpec& spec, const DiffusionSpec& bar) {
    if (spec.kind != bar.kind)
        throw InvalidParams("laplace_series: spec and barspec must share the process kind");
    if (std::abs(spec.sigma - bar.sigma) > 1e-14 * std::max(1.0, std::abs(spec.sigma)))
        throw InvalidParams("laplace_series: spec and barspec must share sigma");
    bar.validate();
}

// Basis eigenfunction Qbar_n evaluated in the process variable.
double basis_eval(const DiffusionSpec& bar, int n, double x) {
    switch (bar.kind) {
        case DiffusionKind::ou:
            return op::eval(op::PolyFamily::hermite(), n,
                            std::sqrt(bar.b / sq(bar.sigma)) * (x - bar.a / bar.b));
        case DiffusionKind::cir:
            return op::eval(op::PolyFamily::laguerre(bar.jacobi_alpha()), n,
                            2.0 * bar.b / sq(bar.sigma) * x);
        case DiffusionKind::jacobi:
            return op::eval(op::PolyFamily::jacobi(bar.jacobi_alpha(), bar.jacobi_beta()), n,
                            1.0 - 2.0 * x);
        case DiffusionKind::dual_jacobi:
            return op::eval(op::PolyFamily::dual_jacobi(bar.jacobi_alpha(), bar.jacobi_beta()), n, x);
        default:
            throw UnsupportedKind("basis_eval: unsupported kind");
    }
}

double basis_norm_sq(const DiffusionSpec& bar, int n) {
    return op::norm_sq(family_of(bar), n);
}

double basis_eigenvalue(const DiffusionSpec& bar, int n) {
    return op::eigenvalue(family_of(bar), {bar.a, bar.b, bar.sigma}, n);
}

// log V and its derivatives; V = exp(int ((abar-bbar y)-(a-b y))/(sigma^2 A(y)) dy).
double log_gauge(const DiffusionSpec& s, const DiffusionSpec& b, double x) {
    double s2 = sq(s.sigma);
    switch (s.kind) {
        case DiffusionKind::ou:
            return ((b.a - s.a) * x - 0.5 * (b.b - s.b) * x * x) / s2;
        case DiffusionKind::cir:
            return (b.a - s.a) / s2 * std::log(x) - (b.b - s.b) / s2 * x;
        case DiffusionKind::jacobi: {
            double u = (b.jacobi_alpha() - s.jacobi_alpha()) / 2.0;
            double v = (b.jacobi_beta() - s.jacobi_beta()) / 2.0;
            return u * std::log(x) + v * std::log(1.0 - x);
        }
        case DiffusionKind::dual_jacobi: {
            double u = (b.jacobi_alpha() - s.jacobi_alpha()) / 2.0;
            double v = b.jacobi_beta() - s.jacobi_beta();
            return u * std::log(x * (2.0 - x)) + v * std::log(1.0 - x);
        }
        default:
            throw UnsupportedKind("gauge: unsupported kind");
    }
}

double dlog_gauge(const DiffusionSpec& s, const DiffusionSpec& b, double x) {
    double s2 = sq(s.sigma);
    switch (s.kind) {
        case DiffusionKind::ou:
            return ((b.a - s.a) - (b.b - s.b) * x) / s2;
        case DiffusionKind::cir:
            return (b.a - s.a) / (s2 * x) - (b.b - s.b) / s2;
        case DiffusionKind::jacobi: {
            double u = (b.jacobi_alpha() - s.jacobi_alpha()) / 2.0;
            double v = (b.jacobi_beta() - s.jacobi_beta()) / 2.0;
            return u / x - v / (1.0 - x);
        }
        case DiffusionKind::dual_jacobi: {
            double u = (b.jacobi_alpha() - s.jacobi_alpha()) / 2.0;
            double v = b.jacobi_beta() - s.jacobi_beta();
            return u * (2.0 - 2.0 * x) / (x * (2.0 - x)) - v / (1.0 - x);
        }
        default:
            throw UnsupportedKind("gauge: unsupported kind");
    }
}

double d2log_gauge(const DiffusionSpec& s, const DiffusionSpec& b, double x) {
    double s2 = sq(s.sigma);
    switch (s.kind) {
        case DiffusionKind::ou:
            return -(b.b - s.b) / s2;
        case DiffusionKind::cir:
            return -(b.a - s.a) / (s2 * x * x);
        case DiffusionKind::jacobi: {
            double u = (b.jacobi_alpha() - s.jacobi_alpha()) / 2.0;
            double v = (b.jacobi_beta() - s.jacobi_beta()) / 2.0;
            return -u / (x * x) - v / sq(1.0 - x);
        }
        case DiffusionKind::dual_jacobi: {
            double u = (b.jacobi_alpha() - s.jacobi_alpha()) / 2.0;
            double v = b.jacobi_beta() - s.jacobi_beta();
            double z = x * (2.0 - x);
            return u * (-z - 2.0 * sq(1.0 - x)) * 2.0 / (z * z) - v / sq(1.0 - x);
        }
        default:
            throw UnsupportedKind("gauge: unsupported kind");
    }
}

// Diffusion coefficient sigma^2 A(x)/2 of the generator.
double diff_coeff(const DiffusionSpec& s, double x) {
    switch (s.kind) {
        case DiffusionKind::ou: return 0.5 * sq(s.sigma);
        case DiffusionKind::cir: return 0.5 * sq(s.sigma) * x;
        case DiffusionKind::jacobi: return 0.5 * sq(s.sigma) * x * (1.0 - x);
        case DiffusionKind::dual_jacobi: return 0.125 * sq(s.sigma) * x * (2.0 - x);
        case DiffusionKind::gbm: return 0.5 * sq(s.sigma) * x * x;
    }
    return 0.0;
}

std::vector<double> probe_points(const DiffusionSpec& s) {
    switch (s.kind) {
        case DiffusionKind::ou: {
            double c = s.b > 0 ? s.a / s.b : 0.0;
            double w = std::max(1.0, std::sqrt(sq(s.sigma) / std::max(s.b, 1e-6)));
            return {c - 0.8 * w, c + 0.37 * w, c + 1.21 * w};
        }
        case DiffusionKind::cir:
        case DiffusionKind::gbm: {
            double c = s.kind == DiffusionKind::cir && s.b > 0 ? std::max(s.a / s.b, 0.1) : 1.0;
            return {0.43 * c, 1.07 * c, 2.31 * c};
        }
        default:
            return {0.23, 0.52, 0.81};
    }
}

}  // namespace

double gauge_prefactor(const DiffusionSpec& spec, const DiffusionSpec& barspec, double x) {
    return std::exp(log_gauge(spec, barspec, x));
}

double gauge_potential(const DiffusionSpec& spec, const DiffusionSpec& barspec, double theta,
                       double x) {
    if (theta == 0.0) throw InvalidParams("gauge_potential: theta must be nonzero");
    double lv1 = dlog_gauge(spec, barspec, x);
    double lv2 = d2log_gauge(spec, barspec, x);
    return (spec.drift(x) * lv1 + diff_coeff(spec, x) * (lv1 * lv1 + lv2)) / theta;
}

double phi_eval(const PhiSpec& phi, const DiffusionSpec& spec,
                const std::optional<DiffusionSpec>& barspec, double x) {
    switch (phi.form) {
        case PhiSpec::Form::affine:
            return phi.rho * x + phi.zeta;
        case PhiSpec::Form::quadratic:
            return phi.c0 + x * (phi.c1 + x * phi.c2);
        case PhiSpec::Form::gbm_quadratic: {
            double s2 = sq(spec.sigma);
            double nu = spec.mu / s2;
            return s2 / (2.0 * phi.theta) *
                   (nu * (1.0 - nu) - phi.t0 - phi.t1 * x + phi.t2 * x * x);
        }
        case PhiSpec::Form::family_ratio: {
            if (!barspec) throw InvalidParams("phi_eval: family_ratio needs a bar spec");
            double s2 = sq(spec.sigma);
            double al = spec.jacobi_alpha(), be = spec.jacobi_beta();
            double alb = barspec->jacobi_alpha(), beb = barspec->jacobi_beta();
            if (spec.kind == DiffusionKind::jacobi)
                return s2 / (8.0 * phi.theta) *
                       ((alb * alb - al * al) / x + (beb * beb - be * be) / (1.0 - x));
            if (spec.kind == DiffusionKind::dual_jacobi)
                return s2 / (8.0 * phi.theta) *
                       ((alb * alb - al * al) / (x * (2.0 - x)) +
                        (beb * beb - be * be) / sq(1.0 - x));
            throw UnsupportedKind("phi_eval: family_ratio defined for jacobi kinds only");
        }
        case PhiSpec::Form::gauge: {
            if (!barspec) throw InvalidParams("phi_eval: gauge form needs a bar spec");
            return gauge_potential(spec, *barspec, phi.theta, x);
        }
    }
    throw InvalidParams("phi_eval: unknown form");
}

// ---------- closed-form densities ----------

double density_closed(const DiffusionSpec& spec, double tau, double x, double y) {
    spec.validate();
    if (!(tau > 0.0)) throw InvalidParams("density_closed: requires tau > 0");
    double s2 = sq(spec.sigma);
    switch (spec.kind) {
        case DiffusionKind::gbm: {
            if (!(x > 0.0) || !(y > 0.0)) throw DomainError("density_closed: gbm domain is (0,inf)");
            double m = std::log(y / x) - (spec.mu - s2 / 2.0) * tau;
            return std::exp(-m * m / (2.0 * s2 * tau)) / (y * std::sqrt(2.0 * kPi * s2 * tau));
        }
        case DiffusionKind::ou: {
            double zx = std::sqrt(spec.b / s2) * (x - spec.a / spec.b);
            double zy = std::sqrt(spec.b / s2) * (y - spec.a / spec.b);
            double e = std::exp(-spec.b * tau);
            double v = 1.0 - e * e;
            return std::sqrt(spec.b / (s2 * kPi)) / std::sqrt(v) *
                   std::exp(-sq(zy - zx * e) / v);
        }
        case DiffusionKind::cir: {
            if (x < 0.0 || y < 0.0) throw DomainError("density_closed: cir domain is [0,inf)");
            double al = spec.jacobi_alpha();
            double e = std::exp(-spec.b * tau);
            double c = 2.0 * spec.b / s2 / (1.0 - e);
            if (y == 0.0) {
                if (al > 0.0) return 0.0;
                if (al == 0.0) return c * std::exp(-c * x * e);
                return std::numeric_limits<double>::infinity();
            }
            double arg = 2.0 * c * std::sqrt(x * y * e);
            // e^{-arg} I_alpha(arg) keeps the Bessel factor in range.
            double li = std::log(sf::bessel_i(al, arg, /*scaled=*/true));
            double lg = std::log(c) + 0.5 * al * std::log(y * std::exp(spec.b * tau) / x) -
                        c * (y + x * e) + arg + li;
            return std::exp(lg);
        }
        default:
            throw UnsupportedKind("density_closed: no closed form for " + spec.name() +
                                  "; use density_series");
    }
}

SeriesEval density_series(const DiffusionSpec& spec, double tau, double x, double y, int n_terms) {
    spec.validate();
    if (!(tau > 0.0)) throw InvalidParams("density_series: requires tau > 0");
    if (spec.kind == DiffusionKind::gbm)
        throw UnsupportedKind("density_series: gbm has a continuous spectrum; use density_closed");
    op::PolyFamily fam = family_of(spec);
    op::ProcessParams proc{spec.a, spec.b, spec.sigma};

    // weight density in the process variable at y
    double wy;
    double s2 = sq(spec.sigma);
    switch (spec.kind) {
        case DiffusionKind::ou: {
            double zy = std::sqrt(spec.b / s2) * (y - spec.a / spec.b);
            wy = std::sqrt(spec.b / (s2 * kPi)) * std::exp(-zy * zy);
            break;
        }
        case DiffusionKind::cir: {
            double al = spec.jacobi_alpha();
            double scale = 2.0 * spec.b / s2;
            wy = std::exp((al + 1.0) * std::log(scale) + al * std::log(y) - scale * y);
            break;
        }
        default:
            wy = op::weight(fam, y);
            break;
    }

    SeriesEval out;
    double sum = 0.0, last = 0.0, prev = 0.0;
    for (int n = 0; n < n_terms; ++n) {
        double term = std::exp(basis_eigenvalue(spec, n) * tau) / basis_norm_sq(spec, n) *
                      basis_eval(spec, n, x) * basis_eval(spec, n, y);
        prev = last;
        last = std::abs(term);
        sum += term;
        out.terms_used = n + 1;
        if (n > 4 && last < 1e-16 * std::abs(sum) && prev < 1e-16 * std::abs(sum)) break;
    }
    double ratio = prev > 0.0 ? std::min(last / prev, 0.95) : 0.0;
    out.tail_estimate = wy * (prev > 0.0 ? last * ratio / (1.0 - ratio) : last);
    out.value = sum * wy;
    out.truncation_warning = out.tail_estimate > 1e-10 * std::max(1.0, std::abs(out.value));
    return out;
}

// ---------- closed-form Laplace transforms ----------

namespace {

double ou_affine_closed(const DiffusionSpec& s, double theta, double omega, double tau, double x) {
    double s2 = sq(s.sigma);
    double n = (theta - (theta + omega * s.b) * std::exp(-s.b * tau)) / s.b;
    double m = (n + omega - theta * tau) * (s.a * s.b - theta * s2 / 2.0) / sq(s.b) -
               s2 / (4.0 * s.b) * (n * n - omega * omega);
    return std::exp(m - n * x);
}

double ou_quadratic_closed(const DiffusionSpec& s, double theta, double c0, double c1, double c2,
                           double omega, double tau, double x) {
    double s2 = sq(s.sigma);
    double disc = s.b * s.b + 2.0 * theta * c2 * s2;
    if (!(disc > 0.0)) throw InvalidParams("laplace_closed: b^2 + 2 theta c2 sigma^2 must be positive");
    double bb = std::sqrt(disc);
    double ab = (s.a * s.b - theta * s2 * c1) / bb;
    double t0 = s.b / s2 - sq(s.a) / sq(s2) - 2.0 * theta * c0 / s2;

    double qden = (bb + s.b) * (theta - omega * (bb - s.b));
    if (std::abs(qden) < 1e-14)
        throw InvalidParams("laplace_closed: quadratic auxiliary constant q is singular");
    double p = (bb + s.b) * (omega * (s.b - bb) + theta) / (2.0 * s2 * theta);
    if (std::abs(p) < 1e-14)
        throw InvalidParams("laplace_closed: quadratic auxiliary constant p vanishes");
    double qq = (theta * (s.a + ab) + omega * (s.a * s.b - ab * bb)) / qden - ab / bb;

    double e1 = std::exp(-bb * tau), e2 = e1 * e1;
    double den = p - (p - bb / s2) * e2;
    if (!(den > 0.0) && !(den < 0.0))
        throw InvalidParams("laplace_closed: quadratic time denominator vanishes");
    double m = 0.5 * std::log(bb / s2) - 0.5 * std::log(den) - sq(ab) / (s2 * bb) -
               tau / 2.0 * (bb - sq(ab) / s2 - s2 * t0) +
               omega / (2.0 * theta) * (s.b - sq(s.a) / s2 - s2 * t0) + p * sq(qq + ab / bb) -
               (2.0 * p * qq * ab / s2 * e1 +
                ((p - bb / s2) * sq(ab) / (bb * s2) + p * qq * qq * bb / s2) * e2) /
                   den;
    double n = -(ab - s.a) / s2 -
               (2.0 * p * qq * bb / s2 * e1 + (p - bb / s2) * 2.0 * ab / s2 * e2) / den;
    double l = (bb - s.b) / (2.0 * s2) + (p - bb / s2) * bb / s2 * e2 / den;
    return std::exp(m - n * x - l * x * x);
}

double cir_affine_closed(const DiffusionSpec& s, double theta, double omega, double tau, double x) {
    double s2 = sq(s.sigma);
    double disc = 2.0 * theta * s2 + s.b * s.b;
    if (!(disc > 0.0)) throw InvalidParams("laplace_closed: 2 theta sigma^2 + b^2 must be positive");
    double bb = std::sqrt(disc);
    double ch = std::cosh(bb * tau / 2.0), sh = std::sinh(bb * tau / 2.0);
    double den = bb * ch + (s.b - omega * s2) * sh;
    if (!(den > 0.0)) throw InvalidParams("laplace_closed: cir denominator not positive");
    double m = 2.0 * s.a / s2 * (std::log(bb) + s.b * tau / 2.0 - std::log(den));
    double n = -omega + (bb * bb - sq(s.b - omega * s2)) / s2 * sh / den;
    return std::exp(m - n * x);
}

}  // namespace

double laplace_closed(const DiffusionSpec& spec, const PhiSpec& phi, const PayoffSpec& q,
                      double tau, double x) {
    spec.validate();
    if (!(tau >= 0.0)) throw InvalidParams("laplace_closed: requires tau >= 0");
    if (q.form == PayoffSpec::Form::tabulated)
        throw UnsupportedKind("laplace_closed: tabulated payoffs need the series route");
    double omega = q.form == PayoffSpec::Form::exp_affine ? q.omega : 0.0;

    if (spec.kind == DiffusionKind::ou && phi.form == PhiSpec::Form::affine) {
        double theta_eff = phi.theta * phi.rho;
        return std::exp(-phi.theta * phi.zeta * tau) *
               ou_affine_closed(spec, theta_eff, omega, tau, x);
    }
    if (spec.kind == DiffusionKind::ou && phi.form == PhiSpec::Form::quadratic) {
        return ou_quadratic_closed(spec, phi.theta, phi.c0, phi.c1, phi.c2, omega, tau, x);
    }
    if (spec.kind == DiffusionKind::cir && phi.form == PhiSpec::Form::affine) {
        double theta_eff = phi.theta * phi.rho;
        return std::exp(-phi.theta * phi.zeta * tau) *
               cir_affine_closed(spec, theta_eff, omega, tau, x);
    }
    throw UnsupportedKind("laplace_closed: supported pairs are ou/affine, ou/quadratic, cir/affine");
}

// ---------- bar-family series ----------

namespace {

// Precomputed quadrature for the z_n integrals of one (spec, barspec) pair:
// nodes mapped to the process variable, weights absorbing the effective
// envelope q V^{-1} wbar beyond the classical weight.
struct ZnRule {
    std::vector<double> y;
    std::vector<double> w;
    double pref = 1.0;
};

ZnRule make_zn_rule(const DiffusionSpec& spec, const DiffusionSpec& barspec, int order) {
    double s2 = sq(spec.sigma);
    ZnRule r;
    switch (spec.kind) {
        case DiffusionKind::ou: {
            // q V^{-1} wbar has a Gaussian envelope exp(-P (y-m)^2 + C).
            double P = (barspec.b + spec.b) / (2.0 * s2);
            if (!(P > 0.0)) throw QuadratureFailure("coeff_z: non-integrable gauge/weight pair");
            double m = (barspec.a + spec.a) / (barspec.b + spec.b);
            double C = P * m * m - sq(barspec.a) / (s2 * barspec.b);
            r.pref = std::sqrt(barspec.b / (s2 * kPi)) * std::exp(C) / std::sqrt(P);
            quad::Rule gh = quad::gauss_hermite(order);
            for (std::size_t i = 0; i < gh.size(); ++i) {
                r.y.push_back(m + gh.nodes[i] / std::sqrt(P));
                r.w.push_back(gh.weights[i]);
            }
            return r;
        }
        case DiffusionKind::cir: {
            double al = spec.jacobi_alpha();
            if (std::abs(al - barspec.jacobi_alpha()) > 1e-12)
                throw InvalidParams("coeff_z: cir requires abar = a (same alpha)");
            double scale_bar = 2.0 * barspec.b / s2;
            double srate = (spec.b + barspec.b) / s2;
            quad::Rule gl = quad::gauss_laguerre(order, al);
            r.pref = std::exp((al + 1.0) * (std::log(scale_bar) - std::log(srate)));
            for (std::size_t i = 0; i < gl.size(); ++i) {
                r.y.push_back(gl.nodes[i] / srate);
                r.w.push_back(gl.weights[i]);
            }
            return r;
        }
        case DiffusionKind::jacobi:
        case DiffusionKind::dual_jacobi: {
            double pa = 0.5 * (spec.jacobi_alpha() + barspec.jacobi_alpha());
            double pb = 0.5 * (spec.jacobi_beta() + barspec.jacobi_beta());
            quad::Rule gj = quad::gauss_jacobi01(order, pa, pb);
            bool dual = spec.kind == DiffusionKind::dual_jacobi;
            for (std::size_t i = 0; i < gj.size(); ++i) {
                double xx = dual ? 1.0 - std::sqrt(1.0 - gj.nodes[i]) : gj.nodes[i];
                r.y.push_back(xx);
                r.w.push_back(gj.weights[i]);
            }
            return r;
        }
        default:
            throw UnsupportedKind("coeff_z: unsupported kind");
    }
}

double zn_with_rule(const DiffusionSpec& barspec, const PayoffSpec& q, int n, const ZnRule& r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r.y.size(); ++i)
        acc += r.w[i] * q(r.y[i]) * basis_eval(barspec, n, r.y[i]);
    return r.pref * acc / basis_norm_sq(barspec, n);
}

}  // namespace

double coeff_z(const DiffusionSpec& spec, const DiffusionSpec& barspec, const PayoffSpec& q,
               int n, int quad_order) {
    require_series_pair(spec, barspec);
    int order = quad_order > 0 ? quad_order : 2 * n + 24;
    ZnRule r = make_zn_rule(spec, barspec, order);
    return zn_with_rule(barspec, q, n, r);
}

SeriesEval laplace_series(const DiffusionSpec& spec, const DiffusionSpec& barspec,
                          const PhiSpec& phi, const PayoffSpec& q, double tau, double x,
                          int n_terms) {
    spec.validate();
    require_series_pair(spec, barspec);
    if (!(tau >= 0.0)) throw InvalidParams("laplace_series: requires tau >= 0");

    // Constant offset between the requested potential and the gauge potential.
    double c_shift = 0.0;
    if (phi.form != PhiSpec::Form::gauge) {
        std::vector<double> probes = probe_points(spec);
        std::optional<DiffusionSpec> baropt = barspec;
        double c0 = phi_eval(phi, spec, baropt, probes[0]) -
                    gauge_potential(spec, barspec, phi.theta, probes[0]);
        for (std::size_t i = 1; i < probes.size(); ++i) {
            double ci = phi_eval(phi, spec, baropt, probes[i]) -
                        gauge_potential(spec, barspec, phi.theta, probes[i]);
            if (std::abs(ci - c0) > 1e-7 * (1.0 + std::abs(c0)))
                throw InvalidParams(
                    "laplace_series: potential is not the bar-pair potential up to a constant");
        }
        c_shift = c0;
    }

    int order = 2 * n_terms + 16;
    ZnRule rule = make_zn_rule(spec, barspec, order);
    SeriesEval out;
    double sum = 0.0, last = 0.0, prev = 0.0;
    for (int n = 0; n < n_terms; ++n) {
        double zn = zn_with_rule(barspec, q, n, rule);
        double term = std::exp(basis_eigenvalue(barspec, n) * tau) * zn * basis_eval(barspec, n, x);
        prev = last;
        last = std::abs(term);
        sum += term;
        out.terms_used = n + 1;
        if (n > 6 && last < 1e-16 * std::abs(sum) && prev < 1e-16 * std::abs(sum)) break;
    }
    double v = gauge_prefactor(spec, barspec, x);
    double shift = std::exp(-phi.theta * c_shift * tau);
    double ratio = prev > 0.0 ? std::min(last / prev, 0.95) : 0.0;
    out.tail_estimate = v * shift * (prev > 0.0 ? last * ratio / (1.0 - ratio) : last);
    out.value = shift * v * sum;
    out.truncation_warning = out.tail_estimate > 1e-9 * std::max(1.0, std::abs(out.value));
    if (!std::isfinite(out.value)) throw NoConvergence("laplace_series: non-finite result");
    return out;
}

// ---------- GBM mixed spectrum ----------

namespace {

struct BoundState {
    int n;
    double delta;   // Laguerre order
    double lambda;  // generator eigenvalue
    double coef;    // (2 sqrt(t2))^delta n! / (Gamma(delta) (delta+1)_n)
};

std::vector<BoundState> gbm_bound_states(double sigma, double t0, double t1, double t2) {
    std::vector<BoundState> out;
    double st2 = std::sqrt(t2);
    double kappa = t1 / (2.0 * st2);
    int n = 0;
    while (2.0 * kappa - 2.0 * n - 1.0 > 1e-12) {
        double dn = 2.0 * kappa - 2.0 * n - 1.0;
        double lam = sq(sigma) / 2.0 * (sq(n + 0.5 - kappa) + t0 - 0.25);
        double coef = std::exp(dn * std::log(2.0 * st2) + std::lgamma(n + 1.0) -
                               std::lgamma(dn)) /
                      sf::pochhammer(dn + 1.0, n);
        out.push_back({n, dn, lam, coef});
        ++n;
    }
    return out;
}

double laguerre_val(int n, double alpha, double u) {
    double lm = 0.0, l = 1.0;
    for (int k = 0; k < n; ++k) {
        double next = ((2.0 * k + 1.0 + alpha - u) * l - (k + alpha) * lm) / (k + 1.0);
        lm = l;
        l = next;
    }
    return l;
}

}  // namespace

GbmLaplaceResult laplace_gbm(const DiffusionSpec& spec, const PhiSpec& phi, const PayoffSpec& q,
                             double tau, double x, double tol) {
    spec.validate();
    if (spec.kind != DiffusionKind::gbm) throw UnsupportedKind("laplace_gbm: gbm only");
    if (phi.form != PhiSpec::Form::gbm_quadratic)
        throw UnsupportedKind("laplace_gbm: requires the quadratic potential family");
    if (!(phi.t2 > 0.0)) throw InvalidParams("laplace_gbm: requires t2 > 0");
    if (!(x > 0.0)) throw DomainError("laplace_gbm: requires x > 0");
    if (!(tau >= 0.0)) throw InvalidParams("laplace_gbm: requires tau >= 0");

    const double s2 = sq(spec.sigma);
    const double nu = spec.mu / s2;
    const double t0 = phi.t0, t1 = phi.t1, t2 = phi.t2;
    const double st2 = std::sqrt(t2);
    const double kappa = t1 / (2.0 * st2);
    const double u_minus = s2 / 2.0 * (0.25 - t0);

    GbmLaplaceResult res;

    // Short-time branch: first-order expansion of the semigroup.
    if (tau < 1e-5) {
        std::optional<DiffusionSpec> none;
        double pv = phi_eval(phi, spec, none, x);
        double qv = q(x);
        double lq = 0.0;
        if (q.form == PayoffSpec::Form::exp_affine)
            lq = (0.5 * s2 * x * x * q.omega * q.omega + spec.mu * x * q.omega) * qv;
        res.value = qv + tau * (lq - phi.theta * pv * qv);
        return res;
    }

    auto bound = gbm_bound_states(spec.sigma, t0, t1, t2);
    res.n_bound = static_cast<int>(bound.size());

    // Both kernel parts are integrated together over a log-y window that
    // provably holds the full kernel's mass; their slow tails cancel outside.
    const double uc = std::log(x) + (spec.mu - s2 / 2.0) * tau;
    const double sw = spec.sigma * std::sqrt(tau);
    const double w_cap = 34.0;
    double u_lo = uc - 12.0 * sw - 5.0;
    double u_hi = std::min(uc + 12.0 * sw + 5.0, std::log(w_cap / (2.0 * st2)));
    if (u_hi <= u_lo)
        throw NoConvergence("laplace_gbm: integration window collapsed");

    const double x_pref = std::exp((-nu + 0.5) * std::log(x) - st2 * x);

    auto k_disc = [&](double y) {
        if (bound.empty()) return 0.0;
        double s = 0.0;
        for (const auto& bs : bound) {
            s += std::exp(bs.lambda * tau) * bs.coef *
                 std::pow(x * y, 0.5 * bs.delta) * laguerre_val(bs.n, bs.delta, 2.0 * st2 * x) *
                 laguerre_val(bs.n, bs.delta, 2.0 * st2 * y);
        }
        return s * x_pref * std::exp((nu - 1.5) * std::log(y) - st2 * y);
    };

    // k-grid: panel width sized by the largest log-argument oscillation frequency.
    const double k_max = std::sqrt(-std::log(std::min(tol, 1e-13)) / tau);
    double freq = std::sqrt(2.0 / s2) *
                  std::max(std::abs(std::log(2.0 * st2) + u_lo), std::abs(std::log(2.0 * st2 * x)));
    double panel_w = std::min(k_max, 8.0 / std::max(freq, 1.0));
    quad::Rule kr = quad::panels(1e-9, k_max, panel_w, 14);

    const std::size_t nk = kr.size();
    std::vector<double> sv(nk), ekv(nk), wxv(nk);
    const double wx = 2.0 * st2 * x;
    for (std::size_t i = 0; i < nk; ++i) {
        double k = kr.nodes[i];
        double th = std::sqrt(2.0 / s2) * k;
        // Balanced spectral density: e^{-pi th} th sinh(2 pi th) |Gamma(1/2-kappa-i th)|^2.
        double lg2 = 2.0 * sf::lgamma_complex({0.5 - kappa, -th}).real();
        sv[i] = std::exp(lg2 + kPi * th) * th * (-std::expm1(-4.0 * kPi * th)) / 2.0;
        ekv[i] = std::exp(-tau * (k * k + u_minus));
        wxv[i] = sf::whittaker_w_imag_scaled(kappa, th, wx);
    }
    const double c_pref = std::sqrt(2.0 / s2) / (2.0 * kPi * kPi * st2) * std::pow(x, -nu);

    auto k_cont = [&](double y) {
        double wy = 2.0 * st2 * y;
        double acc = 0.0;
        for (std::size_t i = 0; i < nk; ++i) {
            double th = std::sqrt(2.0 / s2) * kr.nodes[i];
            acc += kr.weights[i] * ekv[i] * sv[i] * wxv[i] *
                   sf::whittaker_w_imag_scaled(kappa, th, wy);
        }
        return c_pref * std::exp((nu - 2.0) * std::log(y)) * acc;
    };

    quad::Rule yr = quad::panels(u_lo, u_hi, 0.5, 14);
    std::vector<double> vals(yr.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long i = 0; i < static_cast<long>(yr.size()); ++i) {
        double y = std::exp(yr.nodes[i]);
        vals[static_cast<std::size_t>(i)] = q(y) * (k_disc(y) + k_cont(y)) * y;
    }
    double total = 0.0, disc_only = 0.0;
    for (std::size_t i = 0; i < yr.size(); ++i) total += yr.weights[i] * vals[i];
    for (std::size_t i = 0; i < yr.size(); ++i) {
        double y = std::exp(yr.nodes[i]);
        disc_only += yr.weights[i] * q(y) * k_disc(y) * y;
    }

    double ylo = std::exp(u_lo), yhi = std::exp(u_hi);
    res.edge_certificate = std::max(std::abs(q(ylo) * (k_disc(ylo) + k_cont(ylo)) * ylo),
                                    std::abs(q(yhi) * (k_disc(yhi) + k_cont(yhi)) * yhi));
    res.value = total;
    res.discrete_part = disc_only;
    if (!std::isfinite(res.value)) throw NoConvergence("laplace_gbm: non-finite result");
    if (res.edge_certificate > 1e-5 * std::max(1.0, std::abs(res.value)))
        throw NoConvergence("laplace_gbm: kernel mass reaches the integration window edge");
    return res;
}

// ---------- constructive machinery ----------

double eval_poly_a(PolyA a, double x) {
    switch (a) {
        case PolyA::one: return 1.0;
        case PolyA::x: return x;
        case PolyA::x_one_minus_x: return x * (1.0 - x);
        case PolyA::x_sq_plus_one: return x * x + 1.0;
    }
    return 0.0;
}

Sde construct_sde(PolyA a, const Quadratic& r, std::function<double(double)> h,
                  std::function<double(double)> h_prime) {
    auto drift = [a, r, h, h_prime](double x) {
        double hv = h(x);
        double rv = r(x);
        if (!(hv > 0.0)) throw DomainError("construct_sde: h must be positive");
        if (!(rv > 0.0)) throw DomainError("construct_sde: R must be positive");
        double av = eval_poly_a(a, x);
        return 2.0 * h_prime(x) / hv * av * av / rv;
    };
    auto vol = [a, r](double x) {
        double rv = r(x);
        if (!(rv > 0.0)) throw DomainError("construct_sde: R must be positive");
        return std::sqrt(2.0) * eval_poly_a(a, x) / std::sqrt(rv);
    };
    return {drift, vol};
}

double bose_invariant(PolyA a, const Quadratic& s, const Quadratic& q, const Quadratic& r,
                      double lambda, double x) {
    double av = eval_poly_a(a, x);
    if (av == 0.0) throw SingularPoint("bose_invariant: A(x) = 0");
    return (s(x) - q(x) - lambda * r(x)) / (av * av);
}

double schrodinger_potential(const DiffusionSpec& spec, const std::optional<PhiSpec>& phi,
                             double z, double xi) {
    spec.validate();
    double s2 = sq(spec.sigma);
    switch (spec.kind) {
        case DiffusionKind::gbm: {
            if (!phi) return s2 / 8.0 - xi - spec.mu / 2.0 * (1.0 - spec.mu / s2);
            if (phi->form != PhiSpec::Form::gbm_quadratic)
                throw UnsupportedKind("schrodinger_potential: gbm takes the quadratic family");
            double ez = std::exp(std::sqrt(s2 / 2.0) * z);
            return s2 / 2.0 * (0.25 - phi->t0 - phi->t1 * ez + phi->t2 * ez * ez);
        }
        case DiffusionKind::ou: {
            if (!phi)
                return -xi - spec.b / 2.0 + sq(spec.a) / (2.0 * s2) -
                       spec.a * spec.b / std::sqrt(2.0 * s2) * z + sq(spec.b) / 4.0 * z * z;
            if (phi->form != PhiSpec::Form::quadratic)
                throw UnsupportedKind("schrodinger_potential: ou takes the plain quadratic form");
            double disc = sq(spec.b) + 2.0 * phi->theta * phi->c2 * s2;
            if (!(disc > 0.0)) throw InvalidParams("schrodinger_potential: spectrum not discrete");
            double bb = std::sqrt(disc);
            double ab = (spec.a * spec.b - phi->theta * s2 * phi->c1) / bb;
            double t0 = spec.b / s2 - sq(spec.a) / sq(s2) - 2.0 * phi->theta * phi->c0 / s2;
            return -t0 / 2.0 - ab * bb / s2 * std::sqrt(s2 / 2.0) * z + bb * bb / 4.0 * z * z;
        }
        case DiffusionKind::cir: {
            if (z == 0.0) throw SingularPoint("schrodinger_potential: cir potential singular at z=0");
            double inv = (0.75 - 4.0 * spec.a / s2 * (1.0 - spec.a / s2)) / (z * z);
            double quad_coef = sq(spec.b) / 16.0;
            if (phi) {
                if (phi->form != PhiSpec::Form::affine)
                    throw UnsupportedKind("schrodinger_potential: cir takes an affine potential");
                quad_coef = (sq(spec.b) + 2.0 * phi->theta * phi->rho * s2) / 16.0;
            }
            return inv - xi - spec.a * spec.b / s2 + quad_coef * z * z;
        }
        default:
            throw UnsupportedKind("schrodinger_potential: no printed form for " + spec.name());
    }
}

double kernel_conjugation_check(const DiffusionSpec& spec, double tau, double x, double y) {
    if (spec.kind != DiffusionKind::ou)
        throw UnsupportedKind("kernel_conjugation_check: ou only");
    spec.validate();
    double s2 = sq(spec.sigma);
    double lhs = density_closed(spec, tau, x, y);

    // Oscillator kernel for -d^2/dz^2 + (b^2/4)(z - z*)^2 - b/2 (xi = 0).
    double zs = std::sqrt(2.0 / s2) * spec.a / spec.b;
    double zx = std::sqrt(2.0 / s2) * x - zs;
    double zy = std::sqrt(2.0 / s2) * y - zs;
    double w = spec.b;
    double sh = std::sinh(w * tau), ch = std::cosh(w * tau);
    double mehler = std::sqrt(w / (4.0 * kPi * sh)) *
                    std::exp(-w * ((zx * zx + zy * zy) * ch - 2.0 * zx * zy) / (4.0 * sh));
    double kharm = std::exp(spec.b * tau / 2.0) * mehler;

    auto h = [&](double u) { return std::exp(spec.a * u / s2 - spec.b * u * u / (2.0 * s2)); };
    double rhs = h(y) / h(x) * std::pow(s2 / 2.0, 0.25) * std::pow(2.0 / s2, 0.75) * kharm;
    return std::abs(lhs - rhs);
}

}  // namespace sk::diff
