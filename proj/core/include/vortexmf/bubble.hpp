// Radial Liouville bubbles: entire solutions of
//
//   phi'' + phi'/r = -(t0^2 + r^2)^alpha e^phi,   phi(0) = c, phi'(0) = 0
//
// integrated by adaptive shooting in the log-radius variable, with total mass
// m = int_{R^2} (t0^2+|x|^2)^alpha e^phi and the moment identity
//
//   2 alpha int |x|^2 (t0^2+|x|^2)^{alpha-1} e^phi = pi beta (beta - 4),
//   beta = m/(2 pi),
//
// which pins the admissible masses: for -1 < alpha < 0,
// 8 pi (1+alpha) <= m < 8 pi with equality iff t0 = 0; for alpha >= 0,
// max{8 pi, 4 pi (1+alpha)} <= m <= 8 pi (1+alpha), the upper equality iff
// t0 = 0. The tail mass beyond r_max is extrapolated with the fitted decay.
#pragma once
#include <vector>

#include "errors.hpp"

namespace vmf {

struct BubbleSolution {
    double alpha = 0.0, t0 = 0.0, c = 0.0, r_max = 0.0;
    double mass = 0.0;               // total (tail-extrapolated) mass
    double beta = 0.0;               // mass/(2 pi)
    double moment = 0.0;             // int |x|^2 (t0^2+|x|^2)^{alpha-1} e^phi
    double identity_residual = 0.0;  // |2 alpha moment - pi beta (beta-4)| / (1+|rhs|)
    double decay_slope = 0.0;        // fitted d phi / d log r over [r_max/4, r_max]
    double tail_fraction = 0.0;      // mass over [r_max/2, r_max] relative to total

    std::vector<double> r, phi;      // log-spaced profile samples (r[0] > 0)
    std::vector<double> dphi;        // d phi / d log r at the samples

    double value(double radius) const; // interpolated phi, series below r[0]
};

BubbleSolution bubble_solve(double alpha, double t0, double c, double r_max = 1e8);

double bubble_identity_residual(const BubbleSolution& b);

// Root-find the center value c so that the mass hits target_mass; valid
// targets for t0 > 0 lie strictly between 8 pi min{1,1+alpha} and
// 8 pi max{1,1+alpha}.
BubbleSolution bubble_solve_for_mass(double alpha, double t0, double target_mass,
                                     double r_max = 1e8);

// Self-consistent exponent for planted blow-up families: solves
// alpha = sigma * m(alpha, t0, c) / (4 pi) for alpha > 0.
double bubble_selfconsistent_alpha(double sigma, double t0, double c,
                                   double r_max = 1e8);

} // namespace vmf
