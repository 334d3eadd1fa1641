#include "sk/orthopoly.hpp"

#include <array>
#include <cmath>

#include "sk/special_functions.hpp"

namespace sk::op {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool near_int(double x, double tol = 1e-12) { return std::abs(x - std::round(x)) <= tol; }
}  // namespace

PolyFamily PolyFamily::hermite() {
    PolyFamily f;
    f.tag = Family::hermite;
    return f;
}

PolyFamily PolyFamily::laguerre(double alpha) {
    PolyFamily f;
    f.tag = Family::laguerre;
    f.alpha = alpha;
    f.validate();
    return f;
}

PolyFamily PolyFamily::jacobi(double alpha, double beta) {
    PolyFamily f;
    f.tag = Family::jacobi;
    f.alpha = alpha;
    f.beta = beta;
    f.validate();
    return f;
}

PolyFamily PolyFamily::dual_jacobi(double alpha, double beta) {
    PolyFamily f;
    f.tag = Family::dual_jacobi;
    f.alpha = alpha;
    f.beta = beta;
    f.validate();
    return f;
}

PolyFamily PolyFamily::meixner(double beta, double c) {
    PolyFamily f;
    f.tag = Family::meixner;
    f.beta = beta;
    f.c = c;
    f.validate();
    return f;
}

PolyFamily PolyFamily::dual_hahn(double gamma, double delta, int n) {
    PolyFamily f;
    f.tag = Family::dual_hahn;
    f.gamma = gamma;
    f.delta = delta;
    f.lattice_n = n;
    f.validate();
    return f;
}

PolyFamily PolyFamily::racah(double alpha, double beta, double gamma, double delta, int n) {
    PolyFamily f;
    f.tag = Family::racah;
    f.alpha = alpha;
    f.beta = beta;
    f.gamma = gamma;
    f.delta = delta;
    f.lattice_n = n;
    f.validate();
    return f;
}

int PolyFamily::racah_branch() const {
    double nn = lattice_n;
    bool b0 = near_int(alpha + nn + 1.0) && std::abs(alpha + nn + 1.0) <= 1e-12;
    bool b1 = near_int(beta + delta + nn + 1.0) && std::abs(beta + delta + nn + 1.0) <= 1e-12;
    bool b2 = near_int(gamma + nn + 1.0) && std::abs(gamma + nn + 1.0) <= 1e-12;
    int count = int(b0) + int(b1) + int(b2);
    if (count != 1)
        throw InvalidParams("racah: exactly one of alpha=-N-1, beta+delta=-N-1, gamma=-N-1 must hold");
    return b0 ? 0 : (b1 ? 1 : 2);
}

void PolyFamily::validate() const {
    switch (tag) {
        case Family::hermite:
            return;
        case Family::laguerre:
            if (!(alpha > -1.0)) throw InvalidParams("laguerre: requires alpha > -1");
            return;
        case Family::jacobi:
        case Family::dual_jacobi:
            if (!(alpha > -1.0)) throw InvalidParams("jacobi: requires alpha > -1");
            if (!(beta > -1.0)) throw InvalidParams("jacobi: requires beta > -1");
            return;
        case Family::meixner:
            if (!(beta > 0.0)) throw InvalidParams("meixner: requires beta > 0");
            if (!(c > 0.0 && c < 1.0)) throw InvalidParams("meixner: requires 0 < c < 1");
            return;
        case Family::dual_hahn: {
            if (lattice_n < 1) throw InvalidParams("dual_hahn: requires N >= 1");
            bool pos = gamma > -1.0 && delta > -1.0;
            bool neg = gamma < -lattice_n && delta < -lattice_n;
            if (!pos && !neg)
                throw InvalidParams("dual_hahn: requires gamma,delta > -1 or gamma,delta < -N");
            return;
        }
        case Family::racah:
            if (lattice_n < 1) throw InvalidParams("racah: requires N >= 1");
            racah_branch();  // throws unless exactly one truncation relation holds
            return;
    }
}

bool PolyFamily::is_discrete() const {
    return tag == Family::meixner || tag == Family::dual_hahn || tag == Family::racah;
}

bool PolyFamily::is_finite_lattice() const {
    return tag == Family::dual_hahn || tag == Family::racah;
}

std::string PolyFamily::name() const {
    switch (tag) {
        case Family::hermite: return "hermite";
        case Family::laguerre: return "laguerre";
        case Family::jacobi: return "jacobi";
        case Family::dual_jacobi: return "dual_jacobi";
        case Family::meixner: return "meixner";
        case Family::dual_hahn: return "dual_hahn";
        case Family::racah: return "racah";
    }
    return "?";
}

namespace {

double hermite_rec(int n, double u) {
    double hm = 0.0, h = 1.0;
    for (int k = 0; k < n; ++k) {
        double next = 2.0 * u * h - 2.0 * k * hm;
        hm = h;
        h = next;
    }
    return h;
}

double laguerre_rec(int n, double alpha, double u) {
    double lm = 0.0, l = 1.0;
    for (int k = 0; k < n; ++k) {
        double next = ((2.0 * k + 1.0 + alpha - u) * l - (k + alpha) * lm) / (k + 1.0);
        lm = l;
        l = next;
    }
    return l;
}

double jacobi_rec(int n, double a, double b, double u) {
    if (n == 0) return 1.0;
    double pm = 1.0;
    double p = (a + 1.0) + (a + b + 2.0) * (u - 1.0) / 2.0;
    for (int k = 1; k < n; ++k) {
        double c1 = 2.0 * (k + 1.0) * (k + a + b + 1.0) * (2.0 * k + a + b);
        double c2 = (2.0 * k + a + b + 1.0) * (a * a - b * b);
        double c3 = (2.0 * k + a + b) * (2.0 * k + a + b + 1.0) * (2.0 * k + a + b + 2.0);
        double c4 = 2.0 * (k + a) * (k + b) * (2.0 * k + a + b + 2.0);
        double next = ((c2 + c3 * u) * p - c4 * pm) / c1;
        pm = p;
        p = next;
    }
    return p;
}

// Lattice-argument recurrences (in the degree n), from the standard
// three-term relations of the scheme. Used as the independent cross-check.
double meixner_rec(int n, double beta, double c, double x) {
    double mm = 0.0, m = 1.0;
    for (int k = 0; k < n; ++k) {
        // (c-1) x M_k = c(k+beta) M_{k+1} - (k + (k+beta)c) M_k + k M_{k-1}
        double next = (((c - 1.0) * x + k + (k + beta) * c) * m - k * mm) / (c * (k + beta));
        mm = m;
        m = next;
    }
    return m;
}

double dual_hahn_rec(int n, double g, double d, int N, double x) {
    double lam = x * (x + g + d + 1.0);
    double rm = 0.0, r = 1.0;
    for (int k = 0; k < n; ++k) {
        double A = (k + g + 1.0) * (k - N);
        double C = k * (k - d - N - 1.0);
        if (A == 0.0) throw DomainError("dual_hahn recurrence: A_n vanished");
        double next = ((lam + A + C) * r - C * rm) / A;
        rm = r;
        r = next;
    }
    return r;
}

double racah_rec(int n, double a, double b, double g, double d, double x) {
    double lam = x * (x + g + d + 1.0);
    double rm = 0.0, r = 1.0;
    for (int k = 0; k < n; ++k) {
        double A = (k + a + 1.0) * (k + a + b + 1.0) * (k + b + d + 1.0) * (k + g + 1.0) /
                   ((2.0 * k + a + b + 1.0) * (2.0 * k + a + b + 2.0));
        double C = k * (k + a + b - g) * (k + a - d) * (k + b) /
                   ((2.0 * k + a + b) * (2.0 * k + a + b + 1.0));
        if (A == 0.0) throw DomainError("racah recurrence: A_n vanished");
        double next = ((lam + A + C) * r - C * rm) / A;
        rm = r;
        r = next;
    }
    return r;
}

double meixner_hyp(int n, double beta, double c, double x) {
    std::array<double, 2> num = {static_cast<double>(-n), -x};
    std::array<double, 1> den = {beta};
    return sf::hyp_terminating(num, den, 1.0 - 1.0 / c, n);
}

double dual_hahn_hyp(int n, double g, double d, int N, double x) {
    std::array<double, 3> num = {static_cast<double>(-n), -x, x + g + d + 1.0};
    std::array<double, 2> den = {g + 1.0, static_cast<double>(-N)};
    return sf::hyp_terminating(num, den, 1.0, n);
}

double racah_hyp(int n, double a, double b, double g, double d, double x) {
    std::array<double, 4> num = {static_cast<double>(-n), n + a + b + 1.0, -x, x + g + d + 1.0};
    std::array<double, 3> den = {a + 1.0, b + d + 1.0, g + 1.0};
    return sf::hyp_terminating(num, den, 1.0, n);
}

// Jacobi via the hypergeometric definition (cross-check path).
double jacobi_hyp(int n, double a, double b, double u) {
    std::array<double, 2> num = {static_cast<double>(-n), n + a + b + 1.0};
    std::array<double, 1> den = {a + 1.0};
    double f = sf::hyp_terminating(num, den, (1.0 - u) / 2.0, n);
    return sf::pochhammer(a + 1.0, n) / std::tgamma(n + 1.0) * f;
}

double hermite_hyp(int n, double u) {
    // H_n(u) = (2u)^n 2F0-style finite sum: sum_k (-1)^k n!/(k!(n-2k)!) (2u)^{n-2k}.
    double s = 0.0;
    for (int k = 0; k <= n / 2; ++k) {
        double lg = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - 2.0 * k + 1.0);
        double t = std::exp(lg) * std::pow(2.0 * u, n - 2 * k);
        s += (k % 2 == 0) ? t : -t;
    }
    return s;
}

double laguerre_hyp(int n, double alpha, double u) {
    std::array<double, 1> num = {static_cast<double>(-n)};
    std::array<double, 1> den = {alpha + 1.0};
    return sf::pochhammer(alpha + 1.0, n) / std::tgamma(n + 1.0) *
           sf::hyp_terminating(num, den, u, n);
}

void check_degree(const PolyFamily& fam, int n) {
    if (n < 0) throw DomainError("eval: degree must be nonnegative");
    if (fam.is_finite_lattice() && n > fam.lattice_n)
        throw DomainError("eval: degree exceeds lattice size N");
}

}  // namespace

double eval(const PolyFamily& fam, int n, double x) {
    check_degree(fam, n);
    switch (fam.tag) {
        case Family::hermite: return hermite_rec(n, x);
        case Family::laguerre: return laguerre_rec(n, fam.alpha, x);
        case Family::jacobi: return jacobi_rec(n, fam.alpha, fam.beta, x);
        case Family::dual_jacobi:
            return jacobi_rec(n, fam.alpha, fam.beta, 1.0 - 2.0 * x * (2.0 - x));
        case Family::meixner: return meixner_hyp(n, fam.beta, fam.c, x);
        case Family::dual_hahn: return dual_hahn_hyp(n, fam.gamma, fam.delta, fam.lattice_n, x);
        case Family::racah:
            return racah_hyp(n, fam.alpha, fam.beta, fam.gamma, fam.delta, x);
    }
    throw DomainError("eval: unknown family");
}

double eval_alt(const PolyFamily& fam, int n, double x) {
    check_degree(fam, n);
    switch (fam.tag) {
        case Family::hermite: return hermite_hyp(n, x);
        case Family::laguerre: return laguerre_hyp(n, fam.alpha, x);
        case Family::jacobi: return jacobi_hyp(n, fam.alpha, fam.beta, x);
        case Family::dual_jacobi:
            return jacobi_hyp(n, fam.alpha, fam.beta, 1.0 - 2.0 * x * (2.0 - x));
        case Family::meixner: return meixner_rec(n, fam.beta, fam.c, x);
        case Family::dual_hahn: return dual_hahn_rec(n, fam.gamma, fam.delta, fam.lattice_n, x);
        case Family::racah:
            return racah_rec(n, fam.alpha, fam.beta, fam.gamma, fam.delta, x);
    }
    throw DomainError("eval_alt: unknown family");
}

double eval_derivative(const PolyFamily& fam, int n, double x) {
    check_degree(fam, n);
    if (n == 0) return 0.0;
    switch (fam.tag) {
        case Family::hermite:
            return 2.0 * n * hermite_rec(n - 1, x);
        case Family::laguerre:
            return -laguerre_rec(n - 1, fam.alpha + 1.0, x);
        case Family::jacobi:
            return 0.5 * (n + fam.alpha + fam.beta + 1.0) *
                   jacobi_rec(n - 1, fam.alpha + 1.0, fam.beta + 1.0, x);
        case Family::dual_jacobi: {
            double z = x * (2.0 - x);
            double dz = 2.0 - 2.0 * x;
            return 0.5 * (n + fam.alpha + fam.beta + 1.0) *
                   jacobi_rec(n - 1, fam.alpha + 1.0, fam.beta + 1.0, 1.0 - 2.0 * z) * (-2.0 * dz);
        }
        default:
            throw UnsupportedKind("eval_derivative: continuous families only");
    }
}

double weight(const PolyFamily& fam, double x) {
    switch (fam.tag) {
        case Family::hermite:
            return std::exp(-x * x) / std::sqrt(kPi);
        case Family::laguerre:
            if (x < 0.0) throw DomainError("weight: laguerre domain is [0,inf)");
            return std::pow(x, fam.alpha) * std::exp(-x);
        case Family::jacobi:
            // Density in the process variable x in [0,1]: x^alpha (1-x)^beta.
            if (x < 0.0 || x > 1.0) throw DomainError("weight: jacobi domain is [0,1]");
            return std::pow(x, fam.alpha) * std::pow(1.0 - x, fam.beta);
        case Family::dual_jacobi:
            if (x < 0.0 || x > 1.0) throw DomainError("weight: dual_jacobi domain is [0,1]");
            return 2.0 * std::pow(x * (2.0 - x), fam.alpha) *
                   std::pow(1.0 - x, 2.0 * fam.beta + 1.0);
        case Family::meixner: {
            int xi = static_cast<int>(std::llround(x));
            if (xi < 0 || std::abs(x - xi) > 1e-9)
                throw DomainError("weight: meixner lattice point expected");
            int sgn;
            double lg = sf::log_pochhammer(fam.beta, xi, sgn) + xi * std::log(fam.c) -
                        std::lgamma(xi + 1.0);
            return sgn * std::exp(lg);
        }
        case Family::dual_hahn: {
            int xi = static_cast<int>(std::llround(x));
            if (xi < 0 || xi > fam.lattice_n || std::abs(x - xi) > 1e-9)
                throw DomainError("weight: dual_hahn lattice point expected");
            double g = fam.gamma, d = fam.delta;
            int N = fam.lattice_n;
            int s1, s2, s3;
            double lg = std::log(std::abs(2.0 * xi + g + d + 1.0)) +
                        sf::log_pochhammer(g + 1.0, xi, s1) +
                        sf::log_pochhammer(-static_cast<double>(N), xi, s2) +
                        std::lgamma(N + 1.0) -
                        sf::log_pochhammer(xi + g + d + 1.0, N + 1, s3) -
                        std::lgamma(xi + 1.0);
            int s4;
            double lg4 = sf::log_pochhammer(d + 1.0, xi, s4);
            lg -= lg4;
            int sign = s1 * s2 * s3 * s4 * (xi % 2 == 0 ? 1 : -1) *
                       (2.0 * xi + g + d + 1.0 >= 0.0 ? 1 : -1);
            return sign * std::exp(lg);
        }
        case Family::racah: {
            int xi = static_cast<int>(std::llround(x));
            if (xi < 0 || xi > fam.lattice_n || std::abs(x - xi) > 1e-9)
                throw DomainError("weight: racah lattice point expected");
            double a = fam.alpha, b = fam.beta, g = fam.gamma, d = fam.delta;
            int s[9];
            double lg = sf::log_pochhammer(a + 1.0, xi, s[0]) +
                        sf::log_pochhammer(b + d + 1.0, xi, s[1]) +
                        sf::log_pochhammer(g + 1.0, xi, s[2]) +
                        sf::log_pochhammer(g + d + 1.0, xi, s[3]) +
                        sf::log_pochhammer((g + d + 3.0) / 2.0, xi, s[4]) -
                        sf::log_pochhammer(-a + g + d + 1.0, xi, s[5]) -
                        sf::log_pochhammer(-b + g + 1.0, xi, s[6]) -
                        sf::log_pochhammer((g + d + 1.0) / 2.0, xi, s[7]) -
                        sf::log_pochhammer(d + 1.0, xi, s[8]) - std::lgamma(xi + 1.0);
            int sign = 1;
            for (int i = 0; i < 5; ++i) sign *= s[i];
            for (int i = 5; i < 9; ++i) {
                if (s[i] == 0) throw InvalidParams("racah weight: denominator Pochhammer vanished");
                sign *= s[i];
            }
            return sign * std::exp(lg);
        }
    }
    throw DomainError("weight: unknown family");
}

double weight_ratio(const PolyFamily& fam, int x) {
    switch (fam.tag) {
        case Family::meixner:
            return fam.c * (fam.beta + x) / (x + 1.0);
        case Family::dual_hahn:
        case Family::racah:
            return weight(fam, x + 1.0) / weight(fam, x);
        default:
            throw UnsupportedKind("weight_ratio: discrete families only");
    }
}

double norm_sq(const PolyFamily& fam, int n) {
    check_degree(fam, n);
    switch (fam.tag) {
        case Family::hermite:
            return std::exp(n * std::log(2.0) + std::lgamma(n + 1.0));
        case Family::laguerre:
            return std::exp(std::lgamma(n + fam.alpha + 1.0) - std::lgamma(n + 1.0));
        case Family::jacobi:
        case Family::dual_jacobi: {
            double a = fam.alpha, b = fam.beta;
            return std::exp(std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
                            std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0)) /
                   (2.0 * n + a + b + 1.0);
        }
        case Family::meixner: {
            int sgn;
            double lg = -n * std::log(fam.c) + std::lgamma(n + 1.0) -
                        sf::log_pochhammer(fam.beta, n, sgn) -
                        fam.beta * std::log(1.0 - fam.c);
            return sgn * std::exp(lg);
        }
        case Family::dual_hahn: {
            // 1 / [ C(gamma+n, n) C(delta+N-n, N-n) ]
            int N = fam.lattice_n;
            int s1, s2;
            double lg = std::lgamma(n + 1.0) + std::lgamma(N - n + 1.0) -
                        sf::log_pochhammer(fam.gamma + 1.0, n, s1) -
                        sf::log_pochhammer(fam.delta + 1.0, N - n, s2);
            return s1 * s2 * std::exp(lg);
        }
        case Family::racah: {
            double a = fam.alpha, b = fam.beta, g = fam.gamma, d = fam.delta;
            int N = fam.lattice_n;
            int branch = fam.racah_branch();
            int sm[4];
            double lM;
            if (branch == 0) {
                lM = sf::log_pochhammer(-b, N, sm[0]) + sf::log_pochhammer(g + d + 2.0, N, sm[1]) -
                     sf::log_pochhammer(-b + g + 1.0, N, sm[2]) - sf::log_pochhammer(d + 1.0, N, sm[3]);
            } else if (branch == 1) {
                lM = sf::log_pochhammer(-a + d, N, sm[0]) + sf::log_pochhammer(g + d + 2.0, N, sm[1]) -
                     sf::log_pochhammer(-a + g + d + 1.0, N, sm[2]) - sf::log_pochhammer(d + 1.0, N, sm[3]);
            } else {
                lM = sf::log_pochhammer(a + b + 2.0, N, sm[0]) + sf::log_pochhammer(-d, N, sm[1]) -
                     sf::log_pochhammer(a - d + 1.0, N, sm[2]) - sf::log_pochhammer(b + 1.0, N, sm[3]);
            }
            int s[8];
            double lg = sf::log_pochhammer(n + a + b + 1.0, n, s[0]) +
                        sf::log_pochhammer(a + b - g + 1.0, n, s[1]) +
                        sf::log_pochhammer(a - d + 1.0, n, s[2]) +
                        sf::log_pochhammer(b + 1.0, n, s[3]) + std::lgamma(n + 1.0) -
                        sf::log_pochhammer(a + b + 2.0, 2 * n, s[4]) -
                        sf::log_pochhammer(a + 1.0, n, s[5]) -
                        sf::log_pochhammer(b + d + 1.0, n, s[6]) -
                        sf::log_pochhammer(g + 1.0, n, s[7]);
            int sign = sm[0] * sm[1] * sm[2] * sm[3];
            for (int i = 0; i < 8; ++i) {
                if (s[i] == 0 && i >= 4)
                    throw InvalidParams("racah norm: denominator Pochhammer vanished");
                sign *= (s[i] == 0 ? 1 : s[i]);
                if (s[i] == 0) return 0.0;
            }
            return sign * std::exp(lM + lg);
        }
    }
    throw DomainError("norm_sq: unknown family");
}

double eigenvalue(const PolyFamily& fam, const ProcessParams& proc, int n) {
    check_degree(fam, n);
    double s2h = proc.sigma * proc.sigma / 2.0;
    switch (fam.tag) {
        case Family::hermite:
        case Family::laguerre:
            if (!(proc.b > 0.0)) throw InvalidParams("eigenvalue: requires b > 0");
            return -proc.b * n;
        case Family::jacobi:
        case Family::dual_jacobi:
            return -s2h * n * (n + fam.alpha + fam.beta + 1.0);
        case Family::meixner:
            return -s2h * (1.0 - fam.c) * n;
        case Family::dual_hahn:
            return -s2h * n;
        case Family::racah:
            return -s2h * n * (n + fam.alpha + fam.beta + 1.0);
    }
    throw DomainError("eigenvalue: unknown family");
}

quad::Rule gauss_nodes(const PolyFamily& fam, int order) {
    if (order < 1) throw InvalidParams("gauss_nodes: order must be >= 1");
    switch (fam.tag) {
        case Family::hermite:
            return quad::gauss_hermite(order);
        case Family::laguerre:
            return quad::gauss_laguerre(order, fam.alpha);
        case Family::jacobi:
            return quad::gauss_jacobi01(order, fam.alpha, fam.beta);
        case Family::dual_jacobi: {
            quad::Rule r = quad::gauss_jacobi01(order, fam.alpha, fam.beta);
            for (auto& z : r.nodes) z = 1.0 - std::sqrt(1.0 - z);  // Z(x)=x(2-x) inverse
            return r;
        }
        default:
            throw InvalidParams("gauss_nodes: continuous families only");
    }
}

}  // namespace sk::op
