// Diagnostics on families of solutions v_n of -Delta v = (eps_n^2+|x|^2)^{a_n} K e^{v}
// with a_n = sigma*lambda_n/(4 pi), lambda_n = int H_n e^{v_n}:
// concentration mass and its plateau, quantization windows, Pohozaev
// residuals, sup + C inf uniformity, profile classification (Cases I/II/III)
// and the high-energy trend. Also the builders for the planted families the
// classification is validated against.
//
// Member bookkeeping follows the blow-up normalization: x_n = argmax v_n,
// delta_n^{2(1+a_n)} = e^{-v_n(x_n)}, t_n = max{|x_n|, delta_n}. The case
// trichotomy is operationalized with a configurable ratio threshold:
// "-> infinity" means increasing with last value above the threshold,
// "bounded" means staying below it.
#pragma once
#include <array>
#include <string>
#include <vector>

#include "canonical.hpp"

namespace vmf {

struct FamilyMember {
    ScalarField v;
    double eps = 0.0;        // regularization of this member
    double sigma = 0.0;
    double log_k = 0.0;      // constant regular-part factor: H = (eps^2+r^2)^a e^{log_k}

    // filled by finalize_member():
    double lambda = 0.0;     // int H e^v on the mesh
    double alpha = 0.0;      // sigma*lambda/(4 pi)
    int max_node = -1;
    double sup_v = 0.0;
    double x_norm = 0.0;     // |x_n|
    double delta = 0.0;
    double t = 0.0;          // max{|x_n|, delta}
    double boundary_osc = 0.0;
};

// Evaluates lambda, alpha, delta, t and the boundary oscillation from the
// field; the quadrature uses exact power-cell moments on radial meshes.
// lambda = int (eps^2+|x|^2)^{sigma lambda/4pi} e^{log_k} e^v is solved as a
// fixed point by Newton; lambda_hint seeds the iteration (0 = start from the
// unweighted mass). For sigma < 0 near the integrable limit the fixed point
// is not unique and a hint picks the intended branch.
FamilyMember make_member(ScalarField v, double sigma, double eps, double log_k = 0.0,
                         double lambda_hint = 0.0);

struct SolutionFamily {
    double sigma = 0.0;
    std::vector<FamilyMember> members;
};

// Masses int_{B_r} H e^v for each requested radius (monotone in r).  On grid
// meshes the balls are centered at the member's peak, the finite-n stand-in
// for the concentration point; radial meshes always use the origin.
std::vector<double> concentration_mass(const FamilyMember& m,
                                       const std::vector<double>& radii);

struct ConcentrationEstimate {
    double beta = 0.0;               // plateau value, or midpoint of interval
    bool plateau_found = false;
    double r_plateau = 0.0;
    std::array<double, 2> interval{0.0, 0.0}; // [beta_rmin, beta_rmax] fallback
};

ConcentrationEstimate concentration_beta(const FamilyMember& m,
                                         const std::vector<double>& radii,
                                         double plateau_tol = 0.01);

struct QuantizationWindow {
    double lower = 0.0, upper = 0.0;
    bool hypotheses_ok = false;
    std::string note;
};

// sigma < 0 (with lambda_inf < 4 pi/|sigma|): [8 pi/(1+2|sigma|), 8 pi];
// sigma in (0, 1/2] (with lambda_inf <= 4 pi/sigma):
// [8 pi, min{8 pi/(1-2 sigma), 4 pi/sigma}].
QuantizationWindow quantization_window(double sigma, double lambda_inf);

struct HomogeneousMass {
    bool bounded_above = false;  // sigma_j >= 1/2: no blow-up mass, sup bounded
    double per_point_mass = 0.0; // 8 pi (1 + lambda_inf sigma_j/(4 pi))
    double lambda_inf = 0.0;     // 8 pi m/(1 - 2 sigma_j)
};

HomogeneousMass homogeneous_quantized_mass(double sigma_j, double lambda_inf, int m);

// |LHS - RHS|/(1+|RHS|) of the Pohozaev balance on B_r:
//   LHS = oint_{dB_r} [ (x.nu)|grad v|^2/2 - (d_nu v)(x.grad v) ]
//   RHS = oint_{dB_r} W e^v (x.nu) - int_{B_r} (2W + x.grad W) e^v
double pohozaev_residual(const FamilyMember& m, double radius);

// Per-member sup_{B_compact} v + C0 * inf_Omega v; C0 must exceed
// max{1, (1+alpha_inf)/(1-alpha_inf)} and alpha_inf must lie in (-1, 1).
std::vector<double> sup_plus_cinf_values(const SolutionFamily& f,
                                         double compact_radius, double C0);
double sup_plus_cinf_check(const SolutionFamily& f, double compact_radius, double C0);

enum class BlowupCase { I, II, III, None };

struct ClassifyOptions {
    double ratio_threshold = 10.0; // operational "-> infinity" cutoff
    double plateau_tol = 0.01;
    std::vector<double> radii = {0.0125, 0.025, 0.05, 0.1, 0.2, 0.4, 0.8};
};

struct BlowupReport {
    BlowupCase label = BlowupCase::None;
    double lambda_inf = 0.0;         // Richardson-extrapolated member masses
    double beta = 0.0;               // concentration estimate at the last member
    double eps0 = 0.0;               // Case III: limit of eps_n/delta_n
    std::vector<double> eps_over_t, x_over_delta, lambdas, pohozaev;
    double fit_exponent = 0.0;       // pinned lambda_n/(4 pi) of the last member
    double fit_log_b = 0.0;          // fitted log-amplitude of the profile model
    double fit_residual = 0.0;       // sup-norm misfit on the fit annulus
    QuantizationWindow window;
    bool in_window = false;
    std::string notes;
};

BlowupReport classify_profile(const SolutionFamily& f, const ClassifyOptions& opts = {});

// Verifies v(x) + 2 (1+alpha) log|x| <= C on the annulus 4 d <= |x| <= 1 and,
// when the bound holds, that the mass outside B_{4d} is below the given
// fraction of lambda.
bool ls_decay_check(const FamilyMember& m, double d, double C,
                    double outer_mass_fraction = 0.05);

struct EnergyTrend {
    std::vector<double> E;    // per member: 0.5 int rho G[rho] - sigma int rho G_n
    bool increasing = false;
    double ratio = 0.0;       // E_last / E_first
};

EnergyTrend high_energy_divergence(const SolutionFamily& f);

// ---- planted families ------------------------------------------------------
// Disk branch members v = lambda psi - log Z + log lambda from the closed
// forms, at lambda = fraction * lambda_sigma.
SolutionFamily make_disk_blowup_family(double sigma,
                                       const std::vector<double>& lambda_fractions,
                                       int n_nodes = 4096);
// Case I: radial rescaled bubbles with t0_n = eps_n/delta_n -> infinity and a
// self-consistent exponent; masses -> 8 pi. core_c is the bubble center value
// (larger c = smaller core relative to t0, mass closer to 8 pi).
SolutionFamily make_case1_family(double sigma, const std::vector<double>& t0s,
                                 const std::vector<double>& deltas, int n_nodes = 4096,
                                 double core_c = 0.0);
// Case II: grid members, standard bubble of core scale mu^{-1} planted at
// x_n != 0 with eps_n = eps_ratio * |x_n|.
SolutionFamily make_case2_family(double sigma, const std::vector<double>& x_centers,
                                 const std::vector<double>& deltas,
                                 double eps_ratio = 0.5, double grid_h = 0.005);
// Case III: radial rescaled bubbles with eps_n/delta_n -> eps0 and mass
// pinned at beta_tilde inside the open window.
SolutionFamily make_case3_family(double sigma, double beta_tilde, double eps0,
                                 const std::vector<double>& deltas, int n_nodes = 4096);

} // namespace vmf
