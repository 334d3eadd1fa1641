#include "sk/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sk::sf {

namespace {

constexpr int kSeriesCap = 10000;
constexpr double kRatioGate = 0.9;
constexpr double kPi = 3.14159265358979323846;

bool is_nonpos_int(double x) {
    return x <= 0.0 && x == std::floor(x);
}

// Kahan-compensated accumulator.
struct Kahan {
    double sum = 0.0, comp = 0.0;
    void add(double t) {
        double y = t - comp;
        double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
};

struct KahanC {
    Complex sum{0.0, 0.0}, comp{0.0, 0.0};
    void add(Complex t) {
        Complex y = t - comp;
        Complex s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
};

// Geometric majorant for the dropped tail: |t_next| / (1 - r) with r the
// recent term ratio, capped away from 1.
double tail_majorant(double next_term_mag, double ratio) {
    double r = std::min(std::abs(ratio), 0.95);
    return next_term_mag / (1.0 - r);
}

}  // namespace

double log_pochhammer(double a, int n, int& sign) {
    sign = 1;
    if (n == 0) return 0.0;
    if (a > 0.0) {
        return std::lgamma(a + n) - std::lgamma(a);
    }
    // Negative or zero start: walk the factors, tracking sign and zeros.
    double lg = 0.0;
    for (int k = 0; k < n; ++k) {
        double f = a + k;
        if (f == 0.0) {
            sign = 0;
            return -std::numeric_limits<double>::infinity();
        }
        if (f < 0.0) sign = -sign;
        lg += std::log(std::abs(f));
    }
    return lg;
}

double pochhammer(double a, int n) {
    if (n < 0) throw DomainError("pochhammer: n must be nonnegative");
    if (n <= 32) {
        double p = 1.0;
        for (int k = 0; k < n; ++k) p *= a + k;
        return p;
    }
    int sign;
    double lg = log_pochhammer(a, n, sign);
    if (sign == 0) return 0.0;
    return sign * std::exp(lg);
}

Complex lgamma_complex(Complex z) {
    static const double g[9] = {
        0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
        771.32342877765313,   -176.61502916214059, 12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5) {
        // Reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z).
        return std::log(kPi) - std::log(std::sin(kPi * z)) - lgamma_complex(1.0 - z);
    }
    Complex zz = z - 1.0;
    Complex x = g[0];
    for (int i = 1; i < 9; ++i) x += g[i] / (zz + static_cast<double>(i));
    Complex t = zz + 7.5;
    return 0.5 * std::log(2.0 * kPi) + (zz + 0.5) * std::log(t) - t + std::log(x);
}

namespace {

// Core 1F1 series with tail certificate; assumes no pole is hit before
// termination/convergence. Terminates exactly when a is a nonpositive integer.
ComplexSeriesResult hyp1f1_series(Complex a, Complex c, Complex z) {
    KahanC acc;
    Complex term{1.0, 0.0};
    acc.add(term);
    int terminate_at = -1;
    if (a.imag() == 0.0 && is_nonpos_int(a.real()))
        terminate_at = static_cast<int>(-a.real());
    double ratio = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kSeriesCap; ++j) {
        if (terminate_at >= 0 && j >= terminate_at) {
            return {acc.sum, j + 1, 0.0};
        }
        Complex cj = c + static_cast<double>(j);
        if (std::abs(cj) == 0.0)
            throw PoleError("hyp1f1: denominator parameter hit a nonpositive integer");
        Complex next = term * (a + static_cast<double>(j)) / cj * z / (j + 1.0);
        ratio = std::abs(next) / std::max(std::abs(term), 1e-300);
        term = next;
        acc.add(term);
        if (std::abs(term) <= 1e-17 * std::abs(acc.sum) && ratio < kRatioGate) {
            double tail = tail_majorant(std::abs(term) * ratio, ratio);
            return {acc.sum, j + 2, tail};
        }
    }
    throw NoConvergence("hyp1f1: series did not converge within the iteration cap");
}

}  // namespace

ComplexSeriesResult hyp1f1(Complex a, Complex c, Complex z) {
    if (c.imag() == 0.0 && is_nonpos_int(c.real())) {
        bool terminates_first = a.imag() == 0.0 && is_nonpos_int(a.real()) &&
                                -a.real() < -c.real() + 1.0;
        if (!terminates_first)
            throw PoleError("hyp1f1: c is a nonpositive integer and the series does not terminate");
    }
    bool terminating = a.imag() == 0.0 && is_nonpos_int(a.real());
    if (z.real() < 0.0 && !terminating) {
        // Kummer transformation keeps all series terms same-signed.
        ComplexSeriesResult r = hyp1f1_series(c - a, c, -z);
        Complex ez = std::exp(z);
        r.value *= ez;
        r.tail_bound *= std::abs(ez);
        return r;
    }
    return hyp1f1_series(a, c, z);
}

SeriesResult hyp1f1(double a, double c, double z) {
    ComplexSeriesResult r = hyp1f1(Complex(a, 0.0), Complex(c, 0.0), Complex(z, 0.0));
    return {r.value.real(), r.terms_used, r.tail_bound};
}

namespace {

SeriesResult hyp2f1_series(double a, double b, double c, double z) {
    Kahan acc;
    double term = 1.0;
    acc.add(term);
    int terminate_at = -1;
    if (is_nonpos_int(a)) terminate_at = static_cast<int>(-a);
    if (is_nonpos_int(b)) {
        int tb = static_cast<int>(-b);
        terminate_at = terminate_at < 0 ? tb : std::min(terminate_at, tb);
    }
    double ratio = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kSeriesCap; ++j) {
        if (terminate_at >= 0 && j >= terminate_at) return {acc.sum, j + 1, 0.0};
        double cj = c + j;
        if (cj == 0.0)
            throw PoleError("hyp2f1: denominator parameter hit a nonpositive integer");
        double next = term * (a + j) * (b + j) / cj * z / (j + 1.0);
        ratio = std::abs(next) / std::max(std::abs(term), 1e-300);
        term = next;
        acc.add(term);
        if (std::abs(term) <= 1e-17 * std::abs(acc.sum) && ratio < kRatioGate) {
            return {acc.sum, j + 2, tail_majorant(std::abs(term) * ratio, ratio)};
        }
    }
    throw NoConvergence("hyp2f1: series did not converge within the iteration cap");
}

double gamma_ratio(double top1, double top2, double bot1, double bot2) {
    // Gamma(top1)Gamma(top2) / (Gamma(bot1)Gamma(bot2)) via lgamma with signs.
    auto lgs = [](double x, int& s) {
        if (x > 0.0) {
            s = 1;
            return std::lgamma(x);
        }
        if (is_nonpos_int(x)) {
            s = 0;
            return std::numeric_limits<double>::infinity();
        }
        // Reflection for negative non-integer arguments.
        double sp = std::sin(kPi * x);
        s = sp > 0 ? 1 : -1;
        return std::log(kPi / std::abs(sp)) - std::lgamma(1.0 - x);
    };
    int s1, s2, s3, s4;
    double l1 = lgs(top1, s1), l2 = lgs(top2, s2), l3 = lgs(bot1, s3), l4 = lgs(bot2, s4);
    if (s3 == 0 || s4 == 0) return 0.0;  // pole downstairs kills the term
    if (s1 == 0 || s2 == 0)
        throw PoleError("hyp2f1: gamma pole in connection formula");
    return s1 * s2 * s3 * s4 * std::exp(l1 + l2 - l3 - l4);
}

}  // namespace

SeriesResult hyp2f1(double a, double b, double c, double z) {
    bool terminating = is_nonpos_int(a) || is_nonpos_int(b);
    if (is_nonpos_int(c) && !terminating)
        throw PoleError("hyp2f1: c is a nonpositive integer and the series does not terminate");
    if (is_nonpos_int(c) && terminating) {
        int ta = is_nonpos_int(a) ? static_cast<int>(-a) : kSeriesCap;
        int tb = is_nonpos_int(b) ? static_cast<int>(-b) : kSeriesCap;
        if (std::min(ta, tb) > static_cast<int>(-c))
            throw PoleError("hyp2f1: pole in c reached before termination");
    }
    if (z == 0.0) return {1.0, 1, 0.0};
    if (terminating) return hyp2f1_series(a, b, c, z);
    if (z == 1.0) {
        double s = c - a - b;
        if (s <= 0.0) throw DomainError("hyp2f1: z=1 requires c-a-b > 0");
        return {gamma_ratio(c, s, c - a, c - b), 1, 0.0};
    }
    if (std::abs(z) >= 1.0) throw DomainError("hyp2f1: |z| >= 1 outside supported cases");
    if (z < 0.0) {
        // Pfaff maps z<0 into (0,1): 2F1(a,b;c;z) = (1-z)^{-a} 2F1(a,c-b;c;z/(z-1)).
        SeriesResult r = hyp2f1(a, c - b, c, z / (z - 1.0));
        double f = std::pow(1.0 - z, -a);
        return {f * r.value, r.terms_used, f * r.tail_bound};
    }
    if (z > 0.5) {
        double s = c - a - b;
        if (is_nonpos_int(s) || is_nonpos_int(-s))
            throw NoConvergence("hyp2f1: connection formula degenerate (c-a-b integer)");
        SeriesResult r1 = hyp2f1_series(a, b, a + b - c + 1.0, 1.0 - z);
        SeriesResult r2 = hyp2f1_series(c - a, c - b, c - a - b + 1.0, 1.0 - z);
        double g1 = gamma_ratio(c, s, c - a, c - b);
        double g2 = gamma_ratio(c, -s, a, b) * std::pow(1.0 - z, s);
        return {g1 * r1.value + g2 * r2.value,
                r1.terms_used + r2.terms_used,
                std::abs(g1) * r1.tail_bound + std::abs(g2) * r2.tail_bound};
    }
    return hyp2f1_series(a, b, c, z);
}

double hyp_terminating(std::span<const double> num, std::span<const double> den,
                       double z, int n_terms) {
    int cut = -1;
    for (double a : num) {
        if (is_nonpos_int(a)) {
            int t = static_cast<int>(-a);
            cut = cut < 0 ? t : std::min(cut, t);
        }
    }
    if (cut < 0 || cut > n_terms)
        throw DomainError("hyp_terminating: no numerator parameter terminates within n_terms");
    Kahan acc;
    double term = 1.0;
    acc.add(term);
    for (int k = 0; k < cut; ++k) {
        for (double a : num) term *= a + k;
        for (double d : den) {
            double dk = d + k;
            if (dk == 0.0)
                throw DenominatorZero("hyp_terminating: denominator Pochhammer vanished before termination");
            term /= dk;
        }
        term *= z / (k + 1.0);
        acc.add(term);
    }
    return acc.sum;
}

double bessel_i(double alpha, double x, bool scaled) {
    if (alpha <= -1.0) throw DomainError("bessel_i: alpha must exceed -1");
    if (x < 0.0) throw DomainError("bessel_i: x must be nonnegative");
    if (x == 0.0) {
        double v = alpha == 0.0 ? 1.0 : 0.0;
        return v;  // x^alpha prefactor; scaled form agrees at 0
    }
    if (x <= 30.0) {
        // Ascending series: sum_k (x/2)^{alpha+2k} / (k! Gamma(alpha+k+1)).
        double lt0 = alpha * std::log(x / 2.0) - std::lgamma(alpha + 1.0);
        double t = std::exp(lt0);
        Kahan acc;
        acc.add(t);
        double q = x * x / 4.0;
        for (int k = 1; k < 500; ++k) {
            t *= q / (k * (alpha + k));
            acc.add(t);
            if (t < 1e-17 * acc.sum) break;
        }
        return scaled ? acc.sum * std::exp(-x) : acc.sum;
    }
    // Large argument: I_alpha(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k / x^k,
    // a_k = prod_{j=1..k} (4 alpha^2 - (2j-1)^2) / (8 j).
    double mu4 = 4.0 * alpha * alpha;
    Kahan acc;
    double t = 1.0;
    acc.add(t);
    double prev = std::abs(t);
    for (int k = 1; k < 60; ++k) {
        t *= -(mu4 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
        if (std::abs(t) > prev) break;  // asymptotic series: stop at smallest term
        acc.add(t);
        prev = std::abs(t);
        if (std::abs(t) < 1e-16 * std::abs(acc.sum)) break;
    }
    double pre = acc.sum / std::sqrt(2.0 * kPi * x);
    return scaled ? pre : pre * std::exp(x);
}

Complex whittaker_m(double kappa, Complex mu, double z) {
    Complex cpar = 2.0 * mu + 1.0;
    if (cpar.imag() == 0.0 && is_nonpos_int(cpar.real()))
        throw PoleError("whittaker_m: 2mu+1 is a nonpositive integer");
    if (z < 0.0) throw DomainError("whittaker_m: z must be nonnegative");
    if (z == 0.0) {
        if (mu.real() > -0.5) return {0.0, 0.0};
        throw DomainError("whittaker_m: z=0 with Re(mu) <= -1/2");
    }
    Complex a = mu - kappa + 0.5;
    ComplexSeriesResult f = hyp1f1(a, cpar, Complex(z, 0.0));
    Complex pref = std::exp((mu + 0.5) * std::log(Complex(z, 0.0)) - z / 2.0);
    return pref * f.value;
}

double whittaker_w_imag_scaled(double kappa, double theta, double w) {
    if (w <= 0.0) throw DomainError("whittaker_w_imag_scaled: w must be positive");
    if (theta < 0.0) throw DomainError("whittaker_w_imag_scaled: theta must be nonnegative");
    // W_{k,mu} = G(-2mu)/G(1/2-mu-k) M_{k,mu} + G(2mu)/G(1/2+mu-k) M_{k,-mu};
    // for mu = i*theta the two halves are conjugate, so W = 2 Re[.] and the
    // e^{pi theta/2} balance keeps everything in double range.
    Complex mu(0.0, theta);
    Complex lg = lgamma_complex(-2.0 * mu) - lgamma_complex(0.5 - mu - kappa);
    Complex coef = std::exp(lg + kPi * theta / 2.0);
    Complex a = mu - kappa + 0.5;
    ComplexSeriesResult f = hyp1f1(a, 2.0 * mu + 1.0, Complex(w, 0.0));
    Complex m = std::exp((mu + 0.5) * std::log(Complex(w, 0.0)) - w / 2.0) * f.value;
    double v = 2.0 * (coef * m).real();
    if (!std::isfinite(v)) throw NonFinite("whittaker_w_imag_scaled: non-finite result");
    return v;
}

}  // namespace sk::sf
