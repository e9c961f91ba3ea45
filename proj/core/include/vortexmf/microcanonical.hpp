// Microcanonical ensemble: entropy maximization at fixed regularized energy
// E = 0.5 int rho G[rho] - sigma int rho G_n. The Lagrange structure makes
// E(lambda) the natural scan variable, so the multiplier lambda(E) is
// recovered by scanning warm-started canonical solves and bracketed bisection
// on E(lambda) = E_target. All roots on the scan grid are reported; the
// smallest-lambda root is primary.
#pragma once
#include <array>
#include <string>
#include <vector>

#include "canonical.hpp"

namespace vmf {

// 0.5 int rho G[rho] - sigma int rho G_n for an arbitrary density. eps = 0 is
// accepted everywhere: the vortex integral is assembled from finite cell
// averages of the Green function (exact log integrals on the disk).
double regularized_energy(const ScalarField& rho, double sigma, double eps);

// Energy of the uniform density rho_0 = 1/|Omega|.
double e0_uniform(const MeshPtr& mesh, double sigma, double eps);

struct MvpOptions {
    double lambda_min = 0.0;
    double lambda_max = 0.0;   // 0 = default bracket from sigma (see solve_mvp)
    double energy_tol = 1e-8;
    int scan_points = 32;
    SolveOptions solve;
};

struct MvpRoot {
    double lambda = 0.0;
    double achieved_energy = 0.0;
    double entropy = 0.0;
};

struct MvpResult {
    double target_energy = 0.0;
    double eps = 0.0;
    bool found = false;
    std::string status;              // "ok" or what went wrong / Type II signal
    std::vector<MvpRoot> roots;      // increasing lambda
    int primary = -1;                // index into roots (smallest lambda)
    MeanFieldSolution solution;      // converged solve at the primary root
    std::vector<std::array<double, 2>> scan; // (lambda, E(lambda)) evidence
};

MvpResult solve_mvp(const MeshPtr& mesh, double sigma, double eps,
                    double E_target, const MvpOptions& opts = {});

enum class DomainType { TypeI, TypeII, Inconclusive };

struct TypeEvidence {
    double E = 0.0;
    bool has_root = false;
    double lambda = 0.0;     // root when found
    bool below_threshold = false; // lambda < lambda_sigma
};

struct DomainTypeReport {
    DomainType verdict = DomainType::Inconclusive;
    std::vector<TypeEvidence> table;
};

DomainTypeReport classify_domain_type(const MeshPtr& mesh, double sigma, double eps,
                                      const std::vector<double>& E_grid,
                                      const MvpOptions& opts = {});

struct RegLimitSample {
    double eps = 0.0;
    bool ok = false;
    double lambda = 0.0, entropy = 0.0;
    double lambda_delta = 0.0;   // |lambda - previous lambda|
    double rho_l1_delta = 0.0;   // L1 distance of densities to previous member
};

struct RegLimitReport {
    std::vector<RegLimitSample> samples;
    bool cauchy = false;         // deltas decreasing along the sequence
    bool complete = false;       // every member solve succeeded
};

RegLimitReport mvp_regularization_limit(const MeshPtr& mesh, double sigma,
                                        double E_target,
                                        const std::vector<double>& eps_seq,
                                        const MvpOptions& opts = {});

} // namespace vmf
