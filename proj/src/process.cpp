#include "sk/process.hpp"

#include <cmath>
#include <limits>

namespace sk {

DiffusionSpec DiffusionSpec::gbm(double mu, double sigma) {
    DiffusionSpec s;
    s.kind = DiffusionKind::gbm;
    s.mu = mu;
    s.sigma = sigma;
    s.validate();
    return s;
}

DiffusionSpec DiffusionSpec::ou(double a, double b, double sigma) {
    DiffusionSpec s;
    s.kind = DiffusionKind::ou;
    s.a = a;
    s.b = b;
    s.sigma = sigma;
    s.validate();
    return s;
}

DiffusionSpec DiffusionSpec::cir(double a, double b, double sigma) {
    DiffusionSpec s;
    s.kind = DiffusionKind::cir;
    s.a = a;
    s.b = b;
    s.sigma = sigma;
    s.validate();
    return s;
}

DiffusionSpec DiffusionSpec::jacobi(double a, double b, double sigma) {
    DiffusionSpec s;
    s.kind = DiffusionKind::jacobi;
    s.a = a;
    s.b = b;
    s.sigma = sigma;
    s.validate();
    return s;
}

DiffusionSpec DiffusionSpec::dual_jacobi(double a, double b, double sigma) {
    DiffusionSpec s;
    s.kind = DiffusionKind::dual_jacobi;
    s.a = a;
    s.b = b;
    s.sigma = sigma;
    s.validate();
    return s;
}

void DiffusionSpec::validate() const {
    if (!(sigma > 0.0)) throw InvalidParams(name() + ": requires sigma > 0");
    switch (kind) {
        case DiffusionKind::gbm:
            return;
        case DiffusionKind::ou:
            if (!(b > 0.0)) throw InvalidParams("ou: requires b > 0");
            return;
        case DiffusionKind::cir:
            if (!(a > 0.0)) throw InvalidParams("cir: requires a > 0");
            if (!(b > 0.0)) throw InvalidParams("cir: requires b > 0");
            return;
        case DiffusionKind::jacobi:
        case DiffusionKind::dual_jacobi:
            if (!(jacobi_alpha() > -1.0))
                throw InvalidParams(name() + ": requires alpha = 2a/sigma^2 - 1 > -1");
            if (!(jacobi_beta() > -1.0))
                throw InvalidParams(name() + ": requires beta = 2(b-a)/sigma^2 - 1 > -1");
            return;
    }
}

std::string DiffusionSpec::name() const {
    switch (kind) {
        case DiffusionKind::gbm: return "gbm";
        case DiffusionKind::ou: return "ou";
        case DiffusionKind::cir: return "cir";
        case DiffusionKind::jacobi: return "jacobi";
        case DiffusionKind::dual_jacobi: return "dual_jacobi";
    }
    return "?";
}

double DiffusionSpec::jacobi_alpha() const { return 2.0 * a / (sigma * sigma) - 1.0; }
double DiffusionSpec::jacobi_beta() const { return 2.0 * (b - a) / (sigma * sigma) - 1.0; }

double DiffusionSpec::drift(double x) const {
    switch (kind) {
        case DiffusionKind::gbm: return mu * x;
        case DiffusionKind::ou:
        case DiffusionKind::cir:
        case DiffusionKind::jacobi: return a - b * x;
        case DiffusionKind::dual_jacobi: {
            double z = x * (2.0 - x);
            return (2.0 * a - (2.0 * b - sigma * sigma / 2.0) * z) / (4.0 * (1.0 - x));
        }
    }
    return 0.0;
}

double DiffusionSpec::vol(double x) const {
    switch (kind) {
        case DiffusionKind::gbm: return sigma * x;
        case DiffusionKind::ou: return sigma;
        case DiffusionKind::cir: return sigma * std::sqrt(std::max(x, 0.0));
        case DiffusionKind::jacobi: return sigma * std::sqrt(std::max(x * (1.0 - x), 0.0));
        case DiffusionKind::dual_jacobi:
            return 0.5 * sigma * std::sqrt(std::max(x * (2.0 - x), 0.0));
    }
    return 0.0;
}

double DiffusionSpec::domain_lo() const {
    switch (kind) {
        case DiffusionKind::ou: return -std::numeric_limits<double>::infinity();
        default: return 0.0;
    }
}

double DiffusionSpec::domain_hi() const {
    switch (kind) {
        case DiffusionKind::jacobi:
        case DiffusionKind::dual_jacobi: return 1.0;
        default: return std::numeric_limits<double>::infinity();
    }
}

PhiSpec PhiSpec::affine(double theta, double rho, double zeta) {
    PhiSpec p;
    p.form = Form::affine;
    p.theta = theta;
    p.rho = rho;
    p.zeta = zeta;
    return p;
}

PhiSpec PhiSpec::quadratic(double theta, double c0, double c1, double c2) {
    PhiSpec p;
    p.form = Form::quadratic;
    p.theta = theta;
    p.c0 = c0;
    p.c1 = c1;
    p.c2 = c2;
    return p;
}

PhiSpec PhiSpec::gbm_quadratic(double theta, double t0, double t1, double t2) {
    PhiSpec p;
    p.form = Form::gbm_quadratic;
    p.theta = theta;
    p.t0 = t0;
    p.t1 = t1;
    p.t2 = t2;
    return p;
}

PhiSpec PhiSpec::family_ratio(double theta) {
    PhiSpec p;
    p.form = Form::family_ratio;
    p.theta = theta;
    return p;
}

PhiSpec PhiSpec::gauge(double theta) {
    PhiSpec p;
    p.form = Form::gauge;
    p.theta = theta;
    return p;
}

PayoffSpec PayoffSpec::one() { return PayoffSpec{}; }

PayoffSpec PayoffSpec::exp_affine(double omega) {
    PayoffSpec q;
    q.form = Form::exp_affine;
    q.omega = omega;
    return q;
}

PayoffSpec PayoffSpec::tabulated(std::function<double(double)> f) {
    PayoffSpec q;
    q.form = Form::tabulated;
    q.fn = std::move(f);
    return q;
}

double PayoffSpec::operator()(double x) const {
    switch (form) {
        case Form::one: return 1.0;
        case Form::exp_affine: return std::exp(omega * x);
        case Form::tabulated: return fn(x);
    }
    return 1.0;
}

}  // namespace sk
