/// Liouville bubble tests. The oracles are the exact bubble families:
///
///   t0 = 0:  phi(r) = log(8 p^2 g^2) - 2 log(1 + g^2 r^{2p}),  p = 1 + alpha,
///            mass = 8 pi p for every g > 0 (at g = 1, c = log(8 p^2));
///   alpha = 0, t0 arbitrary: the standard bubble phi = log(8/(1+r^2)^2)
///            modulo the scaling family, always mass 8 pi.
///
/// Everything else is checked through the moment identity
/// 2 alpha moment = pi beta (beta - 4) and the mass bounds, which the solver
/// must reproduce without being told.
#include "doctest.h"

#include <cmath>

#include "vortexmf/bubble.hpp"

using namespace vmf;

namespace {
const double PI = 3.14159265358979323846;

double exact_t0zero_phi(double alpha, double g2, double r) {
    double p = 1.0 + alpha;
    return std::log(8.0 * p * p * g2) - 2.0 * std::log(1.0 + g2 * std::pow(r, 2.0 * p));
}
} // namespace

TEST_CASE("standard bubble alpha = 0, t0 = 0, c = log 8") {
    auto b = bubble_solve(0.0, 0.0, std::log(8.0));
    CHECK(b.mass == doctest::Approx(8.0 * PI).epsilon(1e-8));
    CHECK(b.beta == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(bubble_identity_residual(b) <= 1e-8);
    for (double r : {0.01, 0.5, 1.0, 10.0, 1e3}) {
        double expect = std::log(8.0) - 2.0 * std::log(1.0 + r * r);
        CHECK(b.value(r) == doctest::Approx(expect).epsilon(1e-7));
    }
    CHECK(b.decay_slope == doctest::Approx(-4.0).epsilon(0.02));
}

TEST_CASE("exact t0 = 0 family: mass is 8 pi (1+alpha) for every center value") {
    for (double alpha : {-0.5, -0.25, 0.5, 1.0}) {
        double p = 1.0 + alpha;
        for (double g2 : {0.25, 1.0, 4.0}) {
            double c = std::log(8.0 * p * p * g2);
            auto b = bubble_solve(alpha, 0.0, c);
            CHECK(b.mass == doctest::Approx(8.0 * PI * p).epsilon(1e-7));
            for (double r : {0.05, 0.3, 2.0, 50.0})
                CHECK(b.value(r)
                      == doctest::Approx(exact_t0zero_phi(alpha, g2, r)).epsilon(1e-6));
            // the t0 = 0 identity is algebraic: beta = 2p forces
            // pi beta (beta-4) = 2 alpha m exactly
            CHECK(bubble_identity_residual(b) <= 1e-7);
            CHECK(b.decay_slope == doctest::Approx(-b.beta).epsilon(0.02));
        }
    }
}

TEST_CASE("moment identity on the full acceptance grid") {
    for (double alpha : {-0.5, -0.25, 0.25, 0.5, 1.0}) {
        for (double t0 : {0.0, 0.5, 1.0}) {
            auto b = bubble_solve(alpha, t0, std::log(8.0));
            CHECK(bubble_identity_residual(b) <= 1e-6);
            CHECK(b.tail_fraction <= 1e-6); // r_max far in the decayed regime
        }
    }
}

TEST_CASE("mass bounds: strict for t0 > 0, equalities only at t0 = 0") {
    for (double alpha : {-0.5, -0.25}) {
        for (double t0 : {0.5, 1.0}) {
            for (double c : {-1.0, std::log(8.0), 3.0}) {
                auto b = bubble_solve(alpha, t0, c);
                CHECK(b.mass > 8.0 * PI * (1.0 + alpha) + 1e-6);
                CHECK(b.mass < 8.0 * PI - 1e-6);
            }
        }
        auto b0 = bubble_solve(alpha, 0.0, std::log(8.0 * (1.0 + alpha) * (1.0 + alpha)));
        CHECK(b0.mass == doctest::Approx(8.0 * PI * (1.0 + alpha)).epsilon(1e-7));
    }
    for (double alpha : {0.25, 0.5, 1.0}) {
        for (double t0 : {0.5, 1.0}) {
            for (double c : {-1.0, std::log(8.0), 3.0}) {
                auto b = bubble_solve(alpha, t0, c);
                CHECK(b.mass >= std::max(8.0 * PI, 4.0 * PI * (1.0 + alpha)) - 1e-6);
                CHECK(b.mass < 8.0 * PI * (1.0 + alpha) - 1e-6);
            }
        }
        auto b0 = bubble_solve(alpha, 0.0, std::log(8.0 * (1.0 + alpha) * (1.0 + alpha)));
        CHECK(b0.mass == doctest::Approx(8.0 * PI * (1.0 + alpha)).epsilon(1e-7));
    }
}

TEST_CASE("decay slope equals -beta within 2 percent") {
    for (double alpha : {-0.5, 0.25, 1.0}) {
        for (double t0 : {0.0, 1.0}) {
            auto b = bubble_solve(alpha, t0, std::log(8.0));
            CHECK(b.decay_slope == doctest::Approx(-b.beta).epsilon(0.02));
            // finite mass requires beta > 2 + 2 alpha; the solver only returns
            // when this holds
            CHECK(b.beta > 2.0 + 2.0 * alpha);
        }
    }
}

TEST_CASE("mass varies monotonically with the center value at fixed t0 > 0") {
    // small c -> wide core sampling the r^{2a} growth -> mass near
    // 8 pi (1+alpha); large c -> narrow core seeing a flat weight -> near 8 pi.
    // So mass is decreasing in c for alpha > 0 and increasing for alpha < 0.
    double prev = 0.0;
    for (double c : {-2.0, 0.0, 2.0, 4.0, 6.0}) {
        auto b = bubble_solve(0.5, 1.0, c);
        if (prev != 0.0) CHECK(b.mass < prev);
        prev = b.mass;
    }
    prev = 0.0;
    for (double c : {-2.0, 0.0, 2.0, 4.0}) {
        auto b = bubble_solve(-0.25, 1.0, c);
        if (prev != 0.0) CHECK(b.mass > prev);
        prev = b.mass;
    }
    // large t0 pushes the mass toward the standard 8 pi regardless of alpha
    auto bfar = bubble_solve(0.5, 40.0, std::log(8.0));
    CHECK(bfar.mass == doctest::Approx(8.0 * PI).epsilon(5e-3));
}

TEST_CASE("solve for a target mass") {
    // alpha = 0.5, t0 = 1: admissible open interval (8 pi, 12 pi)
    for (double target : {8.5 * PI, 10.0 * PI, 11.5 * PI}) {
        auto b = bubble_solve_for_mass(0.5, 1.0, target);
        CHECK(b.mass == doctest::Approx(target).epsilon(1e-8));
        CHECK(bubble_identity_residual(b) <= 1e-6);
    }
    // alpha = -0.25, t0 = 0.5: admissible (6 pi, 8 pi)
    auto b2 = bubble_solve_for_mass(-0.25, 0.5, 7.0 * PI);
    CHECK(b2.mass == doctest::Approx(7.0 * PI).epsilon(1e-8));
    CHECK_THROWS_AS(bubble_solve_for_mass(0.5, 1.0, 20.0 * PI), vmf::domain_error);
    CHECK_THROWS_AS(bubble_solve_for_mass(0.5, 1.0, 7.0 * PI), vmf::domain_error);
}

TEST_CASE("self-consistent exponent for planted families") {
    // solves alpha = sigma m(alpha)/(4 pi); the mass bounds
    // 8 pi <= m <= 8 pi (1+alpha) pin alpha in [2s, 2s/(1-2s)]
    for (double sg : {0.1, 0.2, 0.25}) {
        double t0 = 10.0;
        double alpha = bubble_selfconsistent_alpha(sg, t0, std::log(8.0));
        auto b = bubble_solve(alpha, t0, std::log(8.0));
        CHECK(alpha == doctest::Approx(sg * b.mass / (4.0 * PI)).epsilon(1e-8));
        CHECK(alpha >= 2.0 * sg - 1e-9);
        CHECK(alpha <= 2.0 * sg / (1.0 - 2.0 * sg) + 1e-9);
    }
}

TEST_CASE("divergent regime is reported, not silently truncated") {
    // alpha <= -1 makes the weight non-integrable at the origin
    CHECK_THROWS_AS(bubble_solve(-1.0, 0.0, 0.0), vmf::config_error);
    // tiny center value at strongly positive alpha: beta never clears
    // 2 + 2 alpha within r_max -> divergence_error rather than a bogus mass
    CHECK_THROWS_AS(bubble_solve(1.0, 1.0, -30.0, 1e3), vmf::divergence_error);
}
