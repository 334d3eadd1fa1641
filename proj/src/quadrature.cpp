#include "sk/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace sk::quad {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Rule golub_welsch(const std::vector<double>& a, const std::vector<double>& b, double mass) {
    const int n = static_cast<int>(a.size());
    if (n < 1) throw InvalidParams("golub_welsch: order must be >= 1");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        J(i, i) = a[i];
        if (i + 1 < n) {
            if (b[i + 1] <= 0.0) throw InvalidParams("golub_welsch: nonpositive recurrence beta");
            double s = std::sqrt(b[i + 1]);
            J(i, i + 1) = s;
            J(i + 1, i) = s;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        r.weights[i] = mass * v0 * v0;
    }
    return r;
}

Rule gauss_legendre(int order) {
    std::vector<double> a(order, 0.0), b(order, 0.0);
    for (int k = 1; k < order; ++k) b[k] = k * k / (4.0 * k * k - 1.0);
    return golub_welsch(a, b, 2.0);
}

Rule gauss_hermite(int order) {
    std::vector<double> a(order, 0.0), b(order, 0.0);
    for (int k = 1; k < order; ++k) b[k] = k / 2.0;
    return golub_welsch(a, b, std::sqrt(kPi));
}

Rule gauss_laguerre(int order, double alpha) {
    if (alpha <= -1.0) throw InvalidParams("gauss_laguerre: alpha must exceed -1");
    std::vector<double> a(order), b(order, 0.0);
    for (int k = 0; k < order; ++k) a[k] = 2.0 * k + alpha + 1.0;
    for (int k = 1; k < order; ++k) b[k] = k * (k + alpha);
    return golub_welsch(a, b, std::tgamma(alpha + 1.0));
}

Rule gauss_jacobi01(int order, double pa, double pb) {
    if (pa <= -1.0 || pb <= -1.0) throw InvalidParams("gauss_jacobi01: exponents must exceed -1");
    // Monic recurrence for P_n^{(pa,pb)} on [-1,1]; weight x^pa (1-x)^pb on [0,1]
    // corresponds to u = 1-2x.
    std::vector<double> a(order), b(order, 0.0);
    double s = pa + pb;
    a[0] = (pb - pa) / (s + 2.0);
    for (int k = 1; k < order; ++k) {
        double d = 2.0 * k + s;
        a[k] = (pb * pb - pa * pa) / (d * (d + 2.0));
        b[k] = 4.0 * k * (k + pa) * (k + pb) * (k + s) / (d * d * (d + 1.0) * (d - 1.0));
    }
    if (order > 1 && s == 0.0) b[1] = 4.0 * (1.0 + pa) * (1.0 + pb) / ((2.0 + s) * (2.0 + s) * (3.0 + s) * (1.0 + s));
    double mass = std::exp(std::lgamma(pa + 1.0) + std::lgamma(pb + 1.0) - std::lgamma(s + 2.0));
    Rule u = golub_welsch(a, b, mass);
    for (auto& x : u.nodes) x = (1.0 - x) / 2.0;  // u in [-1,1] -> x in [0,1]
    return u;
}

Rule scaled_to(const Rule& ref, double lo, double hi) {
    Rule r;
    r.nodes.reserve(ref.size());
    r.weights.reserve(ref.size());
    double h = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        r.nodes.push_back(m + h * ref.nodes[i]);
        r.weights.push_back(h * ref.weights[i]);
    }
    return r;
}

Rule panels(double lo, double hi, double per, int order) {
    if (hi <= lo) throw InvalidParams("panels: empty interval");
    Rule ref = gauss_legendre(order);
    int np = std::max(1, static_cast<int>(std::ceil((hi - lo) / per)));
    Rule out;
    for (int p = 0; p < np; ++p) {
        double a = lo + (hi - lo) * p / np;
        double b = lo + (hi - lo) * (p + 1) / np;
        Rule seg = scaled_to(ref, a, b);
        out.nodes.insert(out.nodes.end(), seg.nodes.begin(), seg.nodes.end());
        out.weights.insert(out.weights.end(), seg.weights.begin(), seg.weights.end());
    }
    return out;
}

namespace {

// Kronrod 15 / Gauss 7 pair on [-1,1].
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GkResult {
    double integral;
    double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
    double h = 0.5 * (b - a), m = 0.5 * (a + b);
    double fc = f(m);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        double x = h * kXgk[j];
        double f1 = f(m - x), f2 = f(m + x);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    double integral = resk * h;
    // |K15 - G7| overestimates the Kronrod error; good enough as a driver.
    double err = std::abs((resk - resg) * h);
    return {integral, err};
}

void gk_recurse(const std::function<double(double)>& f, double a, double b,
                double tol_abs, double tol_rel, int depth, int max_depth,
                double& total, double& err_total) {
    GkResult r = gk15(f, a, b);
    double tol = std::max(tol_abs, tol_rel * std::abs(r.integral));
    if (r.error <= tol || depth >= max_depth) {
        if (depth >= max_depth && r.error > 16.0 * tol)
            throw QuadratureFailure("adaptive_gk: subdivision budget exhausted");
        total += r.integral;
        err_total += r.error;
        return;
    }
    double m = 0.5 * (a + b);
    gk_recurse(f, a, m, tol_abs * 0.5, tol_rel, depth + 1, max_depth, total, err_total);
    gk_recurse(f, m, b, tol_abs * 0.5, tol_rel, depth + 1, max_depth, total, err_total);
}

}  // namespace

double adaptive_gk(const std::function<double(double)>& f, double lo, double hi,
                   double tol_abs, double tol_rel, double* err_out, int max_depth) {
    double total = 0.0, err = 0.0;
    gk_recurse(f, lo, hi, tol_abs, tol_rel, 0, max_depth, total, err);
    if (err_out) *err_out = err;
    return total;
}

}  // namespace sk::quad
