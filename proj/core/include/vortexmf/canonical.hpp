// Canonical ensemble: solve the mean field equation at fixed lambda by a
// damped fixed-point iteration psi <- (1-w) psi + w G[H e^{lambda psi}/Z],
// evaluate the free energy F and the dual functional J, and sweep branches
// in lambda with warm starts.
//
// Discrete structure worth knowing: the solver works with per-cell masses and
// a quadrature-consistent nodal weight, so that int rho = 1 holds exactly,
// the Dirichlet form pairs exactly with <mass, psi>, and
// F(rho) - J(G[rho]) equals the discrete relative entropy int rho log(rho/rho_psi)
// identically -- nonnegativity of the duality gap is structural, not numerical.
#pragma once
#include <iosfwd>
#include <vector>

#include "mesh.hpp"

namespace vmf {

struct SolveOptions {
    double omega = 0.5;        // damping; halved when the update norm grows
    double tol = 0.0;          // 0 = kind default (1e-10 radial, 1e-8 grid)
    int max_iter = 10000;
    double sup_ceiling = 40.0; // iterate declared divergent past sup lambda*psi
    const ScalarField* psi0 = nullptr; // warm start
};

struct MeanFieldSolution {
    MeshPtr mesh;
    WeightSpec spec;
    ScalarField psi;
    ScalarField rho;              // cell-averaged density, sum_i w_i rho_i = 1
    std::vector<double> mass;     // per-cell masses of rho (sums to 1)

    double energy = 0.0;          // 0.5 int rho G[rho]
    double vortex_energy = 0.0;   // sigma int rho G_vortex (or its eps version)
    double entropy = 0.0;         // -int rho log rho
    double free_energy = 0.0;     // F_lambda(rho)
    double j_value = 0.0;         // J_lambda(psi)
    double log_normalizer = 0.0;  // log int H e^{lambda psi}

    int iterations = 0;
    double final_update = 0.0;
    bool converged = false;
    bool supercritical = false;   // lambda >= lambda_sigma was attempted

    double mvp_energy() const { return energy - vortex_energy; }
};

MeanFieldSolution solve_cvp(const MeshPtr& mesh, const WeightSpec& spec,
                            const SolveOptions& opts = {});

double entropy(const ScalarField& rho);                          // -int rho log rho
double free_energy(const ScalarField& rho, const WeightSpec& spec);
double j_functional(const ScalarField& psi, const WeightSpec& spec);
// Relative entropy int rho log(rho/rho_psi) with psi = G[rho]; >= 0, zero iff
// rho is a mean-field fixed point.
double duality_gap(const ScalarField& rho, const WeightSpec& spec);

enum class SampleStatus { Converged, Diverged, Skipped };

struct CurveSample {
    double lambda = 0.0;
    double E = 0.0;        // ensemble energy: 0.5 int rho G[rho] - sigma int rho G
    double S = 0.0, F = 0.0, J = 0.0;
    double sup_psi = 0.0;
    double mass_b01 = 0.0, mass_b001 = 0.0; // density mass in B_0.1, B_0.01
    SampleStatus status = SampleStatus::Skipped;
};

struct EnsembleCurve {
    std::vector<CurveSample> samples;
    int branch_end = -1;   // index of the first non-converged sample, -1 if none
};

struct SweepOptions {
    SolveOptions solve;
    bool warm_start = true;
};

EnsembleCurve sweep_lambda(const MeshPtr& mesh, double sigma, double eps,
                           const std::vector<double>& lambdas,
                           const SweepOptions& opts = {});

// CSV columns: lambda,E,S,F,J,sup_psi,mass_b01,mass_b001,status
void write_curve_csv(std::ostream& os, const EnsembleCurve& curve);

} // namespace vmf
