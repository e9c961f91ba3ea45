// Closed-form solutions of the singular mean field equation on the unit disk
// with the vortex at the center, plus their energy/entropy formulas and the
// large-energy entropy asymptote. These are the reference oracles everything
// else is validated against.
//
// Conventions (sigma <= 0 or small sigma > 0, 0 <= lambda < lambda_sigma):
//   a = sigma*lambda/(4*pi),   p = 1 + a,
//   gamma^2 = lambda / (8*pi*p - lambda),     s = lambda/(8*pi*p)
//   lambda*psi(r) = 2 log( (1+gamma^2) / (1+gamma^2 r^{2p}) )
//   rho(r) = (p (1+gamma^2)/pi) * r^{2a} / (1+gamma^2 r^{2p})^2,  int rho = 1
//   int_B1 H e^{lambda psi} = pi (1+gamma^2)/p = 8 pi^2 gamma^2 / lambda
//
// The quadratic (pure) energy E = 0.5 int rho G[rho], the vortex interaction
// energy E_vort = sigma int rho G(.,0), and the entropy S = -int rho log rho
// all reduce to elementary closed forms in s; see disk_exact.cpp.
#pragma once
#include <vector>

#include "errors.hpp"

namespace vmf {

// 8*pi/(1+2|sigma|) for sigma < 0, else 8*pi.
double lambda_sigma(double sigma);

struct DiskSolution {
    double sigma = 0.0, lambda = 0.0;
    double a = 0.0, p = 1.0, gamma2 = 0.0, s = 0.0;

    double lambda_psi(double r) const;   // lambda * psi(r), exact at lambda = 0 too
    double psi(double r) const;          // stream function, continuous at lambda -> 0
    double rho(double r) const;          // normalized density (pointwise)
    double normalizer() const;           // int H e^{lambda psi}
    double mass_within(double r) const;  // int_{B_r} rho = (1+g^2) r^{2p} / (1+g^2 r^{2p})
    double v(double r) const;            // lambda psi - log normalizer + log lambda
};

DiskSolution disk_solution(double sigma, double lambda);

double disk_energy(double sigma, double lambda);         // 0.5 int rho G[rho]
double disk_entropy(double sigma, double lambda);        // -int rho log rho
double disk_vortex_energy(double sigma, double lambda);  // sigma int rho G(.,0)
double disk_mvp_energy(double sigma, double lambda);     // disk_energy - disk_vortex_energy

// Leading + exponential truncation of S as a function of the quadratic energy
// E = disk_energy along the branch lambda -> lambda_sigma (sigma <= 0), valid
// for E >= 1 (documented floor):
//   S(E) = -8 pi E + 1 + 2 sigma + log(pi (1-2 sigma))
//          + e^{-t} ( -2 sigma t + (4 sigma - 1)/(1-2 sigma) ),  t = 1 + 8 pi E/(1-2 sigma)
// The slope -8 pi is independent of sigma; the threshold gap satisfies
// q ~ e^{-t}, so the truncation error is O(t^2 e^{-2t}).
double disk_entropy_asymptote(double sigma, double E);

// Branch point parametrized by the threshold gap q = 1 - s; stable arbitrarily
// close to lambda_sigma where the lambda parametrization loses all digits.
struct ThresholdPoint {
    double sigma, gap;          // gap = 1 - s
    double lambda, a, p, gamma2;
    double E, S, E_vort, E_mvp; // closed-form functionals at this point
};
ThresholdPoint disk_branch_near_threshold(double sigma, double gap);

// Inverse of the (strictly increasing) map lambda -> disk_mvp_energy, found by
// bisection in log gap. Defined for E > value at lambda -> 0.
double disk_lambda_for_mvp_energy(double sigma, double E);

} // namespace vmf
