#include "vortexmf/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

namespace vmf {

namespace {

const double PI = 3.14159265358979323846;

struct OdeParams {
    double alpha, t0;
};

// state in ell = log r: y = [phi, z = dphi/dell, mass, moment]
int bubble_rhs(double ell, const double y[], double dydt[], void* params) {
    const auto* p = static_cast<const OdeParams*>(params);
    double r2 = std::exp(2.0 * ell);
    double t2 = p->t0 * p->t0;
    double w = std::pow(t2 + r2, p->alpha);
    double src = r2 * w * std::exp(y[0]); // r^2 W e^phi
    dydt[0] = y[1];
    dydt[1] = -src;
    dydt[2] = 2.0 * PI * src;
    dydt[3] = 2.0 * PI * src * r2 / (t2 + r2);
    return GSL_SUCCESS;
}

// start radius where the leading Taylor term approximates to ~1e-12
double series_start(double alpha, double t0, double c) {
    if (t0 > 0.0) {
        double w0ec = std::pow(t0, 2.0 * alpha) * std::exp(c);
        return std::min({1e-2, t0 / 300.0, 2e-6 / std::sqrt(w0ec)});
    }
    double q = 2.0 + 2.0 * alpha;
    return std::min(1e-2, std::pow(q * q * 1e-12 / std::exp(c), 1.0 / q));
}

// least squares slope of phi against ell over samples with r in [lo, hi]
double fit_slope(const std::vector<double>& r, const std::vector<double>& phi,
                 double lo, double hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] < lo || r[i] > hi) continue;
        double x = std::log(r[i]);
        sx += x;
        sy += phi[i];
        sxx += x * x;
        sxy += x * phi[i];
        ++n;
    }
    require_domain(n >= 2, "bubble decay fit: too few samples in the window");
    return (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
}

} // namespace

double BubbleSolution::value(double radius) const {
    require_config(radius >= 0.0, "bubble value: radius must be >= 0");
    if (radius < r.front()) {
        // Taylor start: phi = c - W0 e^c r^2/4 (t0 > 0),
        //               phi = c - e^c r^{2+2a}/(2+2a)^2 (t0 = 0)
        if (t0 > 0.0)
            return c - std::pow(t0, 2.0 * alpha) * std::exp(c) * radius * radius / 4.0;
        double q = 2.0 + 2.0 * alpha;
        return c - std::exp(c) * std::pow(radius, q) / (q * q);
    }
    if (radius >= r.back())
        return phi.back() + decay_slope * std::log(radius / r.back());
    auto it = std::upper_bound(r.begin(), r.end(), radius);
    std::size_t k = std::size_t(it - r.begin()) - 1;
    // cubic Hermite in ell using the stored slopes
    double h = std::log(r[k + 1] / r[k]);
    double s = std::log(radius / r[k]) / h;
    double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    double h10 = s * (1.0 - s) * (1.0 - s);
    double h01 = s * s * (3.0 - 2.0 * s);
    double h11 = s * s * (s - 1.0);
    return h00 * phi[k] + h10 * h * dphi[k] + h01 * phi[k + 1] + h11 * h * dphi[k + 1];
}

BubbleSolution bubble_solve(double alpha, double t0, double c, double r_max) {
    require_config(std::isfinite(alpha) && std::isfinite(t0) && std::isfinite(c),
                   "bubble: parameters must be finite");
    require_config(alpha > -1.0, "bubble: alpha must exceed -1 (integrable weight)");
    require_config(t0 >= 0.0, "bubble: t0 must be >= 0");
    require_config(r_max >= 100.0, "bubble: r_max must be >= 100");

    BubbleSolution b;
    b.alpha = alpha;
    b.t0 = t0;
    b.c = c;
    b.r_max = r_max;

    double r0 = series_start(alpha, t0, c);
    double ell0 = std::log(r0), ell1 = std::log(r_max);
    double y[4];
    if (t0 > 0.0) {
        double w0ec = std::pow(t0, 2.0 * alpha) * std::exp(c);
        y[0] = c - w0ec * r0 * r0 / 4.0;
        y[1] = -w0ec * r0 * r0 / 2.0;
        y[2] = PI * r0 * r0 * w0ec;
        y[3] = PI / 2.0 * r0 * r0 * r0 * r0 * std::pow(t0, 2.0 * alpha - 2.0) * std::exp(c);
    } else {
        double q = 2.0 + 2.0 * alpha;
        double lead = std::exp(c) * std::pow(r0, q);
        y[0] = c - lead / (q * q);
        y[1] = -lead / q;
        y[2] = 2.0 * PI * lead / q;
        y[3] = y[2]; // t0 = 0: the moment integrand equals the mass integrand
    }

    OdeParams params{alpha, t0};
    gsl_odeiv2_system sys{bubble_rhs, nullptr, 4, &params};
    gsl_odeiv2_driver* drv = gsl_odeiv2_driver_alloc_y_new(
        &sys, gsl_odeiv2_step_rk8pd, 1e-6, 1e-13, 1e-12);

    const int n_samp = 2048;
    b.r.reserve(n_samp + 1);
    b.phi.reserve(n_samp + 1);
    b.dphi.reserve(n_samp + 1);
    b.r.push_back(r0);
    b.phi.push_back(y[0]);
    b.dphi.push_back(y[1]);

    double ell = ell0;
    bool failed = false;
    for (int k = 1; k <= n_samp; ++k) {
        double target = ell0 + (ell1 - ell0) * double(k) / double(n_samp);
        int status = gsl_odeiv2_driver_apply(drv, &ell, target, y);
        if (status != GSL_SUCCESS) {
            failed = true;
            break;
        }
        b.r.push_back(std::exp(ell));
        b.phi.push_back(y[0]);
        b.dphi.push_back(y[1]);
    }
    gsl_odeiv2_driver_free(drv);
    require_domain(!failed, "bubble: ODE integration failed");

    // the tail integral converges only once the running decay clears 2+2a
    double z_end = y[1];
    double margin = -z_end - (2.0 + 2.0 * alpha);
    if (margin <= 0.05)
        throw divergence_error("bubble: profile has not reached the decayed regime "
                               "by r_max (running beta <= 2 + 2 alpha)");

    double r2 = r_max * r_max;
    double t2 = t0 * t0;
    double w_end = std::pow(t2 + r2, alpha);
    double m_tail = 2.0 * PI * r2 * w_end * std::exp(y[0]) / margin;
    double i_tail = m_tail * r2 / (t2 + r2);
    b.mass = y[2] + m_tail;
    b.moment = y[3] + i_tail;
    b.beta = b.mass / (2.0 * PI);

    // local mass over [r_max/2, r_max] relative to the total
    double half_mass = 0.0;
    for (std::size_t i = 1; i < b.r.size(); ++i) {
        if (b.r[i - 1] < r_max / 2.0) continue;
        double rm = 0.5 * (b.r[i - 1] + b.r[i]);
        double wv = std::pow(t2 + rm * rm, alpha);
        double pm = 0.5 * (b.phi[i - 1] + b.phi[i]);
        half_mass += 2.0 * PI * rm * wv * std::exp(pm) * (b.r[i] - b.r[i - 1]);
    }
    b.tail_fraction = half_mass / b.mass;

    b.decay_slope = fit_slope(b.r, b.phi, r_max / 4.0, r_max);
    double rhs = PI * b.beta * (b.beta - 4.0);
    b.identity_residual = std::fabs(2.0 * alpha * b.moment - rhs) / (1.0 + std::fabs(rhs));
    return b;
}

double bubble_identity_residual(const BubbleSolution& b) { return b.identity_residual; }

BubbleSolution bubble_solve_for_mass(double alpha, double t0, double target_mass,
                                     double r_max) {
    require_config(t0 > 0.0, "bubble mass inversion: t0 must be positive");
    require_config(alpha > -1.0 && alpha != 0.0,
                   "bubble mass inversion: alpha = 0 pins the mass at 8 pi");
    double m_lo = 8.0 * PI * std::min(1.0, 1.0 + alpha);
    double m_hi = 8.0 * PI * std::max(1.0, 1.0 + alpha);
    require_domain(target_mass > m_lo && target_mass < m_hi,
                   "bubble mass inversion: target outside the attainable open interval");

    // mass(c) is monotone: decreasing for alpha > 0, increasing for alpha < 0
    double lo = -20.0, hi = 20.0;
    auto mass_at = [&](double cc) { return bubble_solve(alpha, t0, cc, r_max).mass; };
    double sign = alpha > 0.0 ? -1.0 : 1.0; // sign of d mass/d c
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double m = mass_at(mid);
        if (std::fabs(m - target_mass) <= 1e-10 * target_mass) {
            lo = hi = mid;
            break;
        }
        if ((m - target_mass) * sign < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return bubble_solve(alpha, t0, 0.5 * (lo + hi), r_max);
}

double bubble_selfconsistent_alpha(double sigma, double t0, double c, double r_max) {
    require_config(sigma > 0.0 && sigma < 0.5,
                   "self-consistent exponent: needs 0 < sigma < 1/2");
    // g(alpha) = sigma m(alpha)/(4 pi) - alpha changes sign on
    // (0, 2 sigma/(1-2 sigma)] because 8 pi <= m <= 8 pi (1+alpha)
    double lo = 1e-9, hi = 2.0 * sigma / (1.0 - 2.0 * sigma) + 0.1;
    auto g = [&](double a) {
        double m;
        try {
            m = bubble_solve(a, t0, c, r_max).mass;
        } catch (const divergence_error&) {
            // Tail threshold 2+2alpha sits on the running slope and the
            // profile cannot settle by r_max.  That only happens past the
            // fixed point (the core carries ~8 pi, so sigma m/(4 pi) is
            // near 2 sigma < alpha there); treat as the negative side.
            return -1.0;
        }
        return sigma * m / (4.0 * PI) - a;
    };
    require_domain(g(lo) > 0.0 && g(hi) < 0.0, "self-consistent exponent: no bracket");
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace vmf
