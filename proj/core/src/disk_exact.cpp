#include "vortexmf/disk_exact.hpp"

#include <cmath>

namespace vmf {

namespace {

const double PI = 3.14159265358979323846;

// L(s) = -log(1-s)/s = 1 + s/2 + s^2/3 + ...; continuous value 1 at s = 0
double stable_L(double s) { return s == 0.0 ? 1.0 : -std::log1p(-s) / s; }

// M(s) = (L(s)-1)/s = 1/2 + s/3 + s^2/4 + ...; the direct form cancels
// catastrophically for small s, so sum the series below s = 1/2
double stable_M(double s) {
    if (s >= 0.5) return (stable_L(s) - 1.0) / s;
    double acc = 0.0, sk = 1.0;
    for (int k = 0; k < 80; ++k) {
        double term = sk / double(k + 2);
        acc += term;
        if (term < 1e-18) break;
        sk *= s;
    }
    return acc;
}

// shared functional core: everything is elementary in (p, s, L, M)
struct BranchValues {
    double lambda, a, p, gamma2, s;
    double E, S, E_vort, E_mvp;
};

// log_q is passed separately so the threshold limit q -> 0 keeps full
// precision even when s = 1 - q rounds to 1
BranchValues branch_from_gap(double sigma, double q, double log_q) {
    BranchValues b;
    b.s = 1.0 - q;
    b.p = 1.0 / ((1.0 - 2.0 * sigma) + 2.0 * sigma * q);
    b.a = b.p - 1.0;
    b.lambda = 8.0 * PI * b.p * b.s;
    b.gamma2 = b.s / q;
    double L = (b.s == 0.0) ? 1.0 : -log_q / b.s;
    double M = (b.s < 0.5) ? stable_M(b.s) : (L - 1.0) / b.s;
    b.E = M / (8.0 * PI * b.p);
    b.E_vort = sigma * L / (4.0 * PI * b.p);
    b.E_mvp = (M - 2.0 * sigma * L) / (8.0 * PI * b.p);
    b.S = 2.0 + std::log(PI) - std::log(b.p) - (2.0 + b.a) * L / b.p + b.s * L;
    return b;
}

void check_params(double sigma, double lambda) {
    require_config(std::isfinite(sigma) && std::isfinite(lambda),
                   "disk solution: parameters must be finite");
    require_config(lambda >= 0.0, "disk solution: lambda must be >= 0");
    require_domain(lambda < lambda_sigma(sigma),
                   "disk solution: lambda must lie below the threshold");
}

BranchValues branch_from_lambda(double sigma, double lambda) {
    check_params(sigma, lambda);
    double a = sigma * lambda / (4.0 * PI);
    double p = 1.0 + a;
    double s = lambda / (8.0 * PI * p);
    double q = 1.0 - s;
    return branch_from_gap(sigma, q, std::log(q));
}

} // namespace

double lambda_sigma(double sigma) {
    require_config(std::isfinite(sigma), "lambda_sigma: sigma must be finite");
    return sigma < 0.0 ? 8.0 * PI / (1.0 + 2.0 * std::fabs(sigma)) : 8.0 * PI;
}

double DiskSolution::lambda_psi(double r) const {
    return 2.0 * (std::log1p(gamma2) - std::log1p(gamma2 * std::pow(r, 2.0 * p)));
}

double DiskSolution::psi(double r) const {
    if (lambda > 0.0) return lambda_psi(r) / lambda;
    return (1.0 - r * r) / (4.0 * PI); // uniform-density limit
}

double DiskSolution::rho(double r) const {
    double d = 1.0 + gamma2 * std::pow(r, 2.0 * p);
    return p * (1.0 + gamma2) / PI * std::pow(r, 2.0 * a) / (d * d);
}

double DiskSolution::normalizer() const { return PI * (1.0 + gamma2) / p; }

double DiskSolution::mass_within(double r) const {
    double u = std::pow(r, 2.0 * p);
    return (1.0 + gamma2) * u / (1.0 + gamma2 * u);
}

double DiskSolution::v(double r) const {
    require_domain(lambda > 0.0, "v field undefined at lambda = 0");
    return lambda_psi(r) - std::log(normalizer()) + std::log(lambda);
}

DiskSolution disk_solution(double sigma, double lambda) {
    check_params(sigma, lambda);
    DiskSolution d;
    d.sigma = sigma;
    d.lambda = lambda;
    d.a = sigma * lambda / (4.0 * PI);
    d.p = 1.0 + d.a;
    d.gamma2 = lambda / (8.0 * PI * d.p - lambda);
    d.s = lambda / (8.0 * PI * d.p);
    return d;
}

double disk_energy(double sigma, double lambda) {
    return branch_from_lambda(sigma, lambda).E;
}

double disk_entropy(double sigma, double lambda) {
    return branch_from_lambda(sigma, lambda).S;
}

double disk_vortex_energy(double sigma, double lambda) {
    if (sigma == 0.0) {
        check_params(sigma, lambda);
        return 0.0;
    }
    return branch_from_lambda(sigma, lambda).E_vort;
}

double disk_mvp_energy(double sigma, double lambda) {
    return branch_from_lambda(sigma, lambda).E_mvp;
}

double disk_entropy_asymptote(double sigma, double E) {
    require_config(std::isfinite(sigma) && sigma < 0.5,
                   "entropy asymptote: needs sigma < 1/2");
    require_config(E >= 1.0, "entropy asymptote: valid for E >= 1");
    double one_m2s = 1.0 - 2.0 * sigma;
    double t = 1.0 + 8.0 * PI * E / one_m2s;
    return -8.0 * PI * E + 1.0 + 2.0 * sigma + std::log(PI * one_m2s)
           + std::exp(-t) * (-2.0 * sigma * t + (4.0 * sigma - 1.0) / one_m2s);
}

ThresholdPoint disk_branch_near_threshold(double sigma, double gap) {
    require_config(std::isfinite(sigma) && sigma <= 0.0,
                   "threshold branch: defined for sigma <= 0");
    require_config(gap > 0.0 && gap <= 1.0, "threshold branch: gap must be in (0, 1]");
    BranchValues b = branch_from_gap(sigma, gap, std::log(gap));
    ThresholdPoint tp;
    tp.sigma = sigma;
    tp.gap = gap;
    tp.lambda = b.lambda;
    tp.a = b.a;
    tp.p = b.p;
    tp.gamma2 = b.gamma2;
    tp.E = b.E;
    tp.S = b.S;
    tp.E_vort = b.E_vort;
    tp.E_mvp = b.E_mvp;
    return tp;
}

double disk_lambda_for_mvp_energy(double sigma, double E) {
    require_config(std::isfinite(sigma) && sigma <= 0.0,
                   "mvp energy inversion: defined for sigma <= 0");
    require_config(std::isfinite(E), "mvp energy inversion: energy must be finite");
    double e0 = 1.0 / (16.0 * PI) - sigma / (4.0 * PI); // dilute limit of E_mvp
    require_domain(E > e0, "mvp energy inversion: energy below the dilute limit");

    // E_mvp is strictly decreasing in the gap; bisect in g = log(gap)
    auto value = [&](double g) { return branch_from_gap(sigma, std::exp(g), g).E_mvp; };
    double g_lo = -700.0, g_hi = -1e-14;
    require_domain(value(g_lo) > E, "mvp energy inversion: energy out of range");
    if (value(g_hi) >= E) g_hi = -1e-14; // target hugs the dilute limit; proceed anyway
    for (int it = 0; it < 200; ++it) {
        double g = 0.5 * (g_lo + g_hi);
        if (value(g) > E)
            g_lo = g;
        else
            g_hi = g;
        if (g_hi - g_lo < 1e-15 * std::fabs(g_lo)) break;
    }
    double g = 0.5 * (g_lo + g_hi);
    return branch_from_gap(sigma, std::exp(g), g).lambda;
}

} // namespace vmf
