/// Blow-up diagnostics tests. Oracles: the closed-form quantization windows
/// and homogeneous masses, the exact disk branch (member bookkeeping,
/// concentration masses against mass_within, sup + C0 inf values, energies),
/// the Pohozaev balance evaluated on analytic solutions, and round trips
/// through the planted Case I/II/III families whose parameters are known by
/// construction.
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "vortexmf/blowup.hpp"
#include "vortexmf/disk_exact.hpp"
#include "vortexmf/errors.hpp"
#include "vortexmf/mesh.hpp"
#include "vortexmf/microcanonical.hpp"

using namespace vmf;

namespace {
const double PI = 3.14159265358979323846;

FamilyMember disk_member(double sigma, double lambda, int n = 4096) {
    MeshPtr mesh = build_disk_mesh(n, Grading::LogNearOrigin);
    DiskSolution ds = disk_solution(sigma, lambda);
    ScalarField v(mesh);
    for (std::size_t i = 0; i < mesh->size(); ++i) v[i] = ds.v(mesh->r[i]);
    return make_member(std::move(v), sigma, 0.0, 0.0, lambda);
}

std::vector<double> near_threshold_fractions(int k_max) {
    std::vector<double> f;
    for (int k = 1; k <= k_max; ++k) f.push_back(1.0 - std::pow(10.0, -k));
    return f;
}
} // namespace

TEST_CASE("quantization windows and homogeneous masses match the closed forms") {
    QuantizationWindow w = quantization_window(-0.5, 2.0 * PI);
    CHECK(w.lower == doctest::Approx(4.0 * PI).epsilon(1e-14));
    CHECK(w.upper == doctest::Approx(8.0 * PI).epsilon(1e-14));
    CHECK(w.hypotheses_ok);

    // lambda_inf at/above 4 pi/|sigma| breaks the integrability hypothesis.
    CHECK_FALSE(quantization_window(-0.5, 9.0 * PI).hypotheses_ok);

    w = quantization_window(0.25, 12.0 * PI);
    CHECK(w.lower == doctest::Approx(8.0 * PI).epsilon(1e-14));
    CHECK(w.upper == doctest::Approx(16.0 * PI).epsilon(1e-14));
    CHECK(w.hypotheses_ok);

    w = quantization_window(0.1, 9.0 * PI);
    CHECK(w.lower == doctest::Approx(8.0 * PI).epsilon(1e-14));
    CHECK(w.upper == doctest::Approx(10.0 * PI).epsilon(1e-14)); // 8pi/(1-2s) < 4pi/s
    CHECK(w.hypotheses_ok);

    w = quantization_window(0.5, 8.0 * PI);
    CHECK(w.lower == doctest::Approx(8.0 * PI).epsilon(1e-14));
    CHECK(w.upper == doctest::Approx(8.0 * PI).epsilon(1e-14));
    CHECK(w.hypotheses_ok);

    w = quantization_window(0.0, 8.0 * PI);
    CHECK(w.lower == doctest::Approx(8.0 * PI).epsilon(1e-14));
    CHECK(w.upper == doctest::Approx(8.0 * PI).epsilon(1e-14));

    // sigma > 1/2: bounded regime, no window at all.
    w = quantization_window(0.7, 5.0);
    CHECK_FALSE(w.hypotheses_ok);
    CHECK(w.note.find("bounded") != std::string::npos);

    HomogeneousMass hm = homogeneous_quantized_mass(0.0, 8.0 * PI, 1);
    CHECK_FALSE(hm.bounded_above);
    CHECK(hm.per_point_mass == doctest::Approx(8.0 * PI).epsilon(1e-14));
    CHECK(hm.lambda_inf == doctest::Approx(8.0 * PI).epsilon(1e-14));

    // sigma_j = 1/4, m = 1: per-point mass and total are both 16 pi, the
    // self-consistent single-point case.
    hm = homogeneous_quantized_mass(0.25, 16.0 * PI, 1);
    CHECK(hm.per_point_mass == doctest::Approx(16.0 * PI).epsilon(1e-14));
    CHECK(hm.lambda_inf == doctest::Approx(16.0 * PI).epsilon(1e-14));

    hm = homogeneous_quantized_mass(-0.5, 4.0 * PI, 1);
    CHECK(hm.per_point_mass == doctest::Approx(4.0 * PI).epsilon(1e-14));
    CHECK(hm.lambda_inf == doctest::Approx(4.0 * PI).epsilon(1e-14));

    CHECK(homogeneous_quantized_mass(0.5, 8.0 * PI, 1).bounded_above);
    CHECK(homogeneous_quantized_mass(0.3, 8.0 * PI, 2).lambda_inf ==
          doctest::Approx(40.0 * PI).epsilon(1e-14));

    CHECK_THROWS_AS(homogeneous_quantized_mass(0.1, 8.0 * PI, 0), config_error);
    CHECK_THROWS_AS(homogeneous_quantized_mass(0.1, 0.0, 1), config_error);
    CHECK_THROWS_AS(quantization_window(0.2, -1.0), config_error);
}

TEST_CASE("member bookkeeping reproduces the disk closed forms") {
    const double lam = 2.0 * PI; // half of lambda_sigma(-1/2) = 4 pi
    FamilyMember m = disk_member(-0.5, lam);
    DiskSolution ds = disk_solution(-0.5, lam);

    CHECK(m.lambda == doctest::Approx(lam).epsilon(5e-6));
    CHECK(m.alpha == doctest::Approx(-0.25).epsilon(5e-6));
    CHECK(m.max_node == 0);
    CHECK(m.x_norm == 0.0);
    CHECK(m.sup_v == doctest::Approx(ds.v(0.0)).epsilon(1e-13));
    // delta from the normalization delta^{2(1+a)} = e^{-sup v}
    CHECK(m.delta == doctest::Approx(std::exp(-ds.v(0.0) / 1.5)).epsilon(1e-5));
    CHECK(m.t == m.delta);
    CHECK(m.boundary_osc == 0.0); // radial mesh has a single boundary node

    // Without a hint the self-consistent mass lands on the same branch here.
    MeshPtr mesh = build_disk_mesh(4096, Grading::LogNearOrigin);
    ScalarField v(mesh);
    for (std::size_t i = 0; i < mesh->size(); ++i) v[i] = ds.v(mesh->r[i]);
    FamilyMember m2 = make_member(std::move(v), -0.5, 0.0);
    CHECK(m2.lambda == doctest::Approx(m.lambda).epsilon(1e-9));

    FamilyMember m0 = disk_member(0.0, 4.0 * PI);
    CHECK(m0.lambda == doctest::Approx(4.0 * PI).epsilon(1e-6));
    CHECK(m0.alpha == 0.0);
}

TEST_CASE("concentration masses track the exact cumulative disk mass") {
    const double lam = 2.0 * PI;
    FamilyMember m = disk_member(-0.5, lam);
    DiskSolution ds = disk_solution(-0.5, lam);

    std::vector<double> radii = {0.1, 0.2, 0.4, 0.8};
    std::vector<double> cm = concentration_mass(m, radii);
    for (std::size_t j = 0; j < radii.size(); ++j)
        CHECK(cm[j] == doctest::Approx(lam * ds.mass_within(radii[j])).epsilon(1e-2));
    CHECK(cm.back() == doctest::Approx(lam * ds.mass_within(0.8)).epsilon(1e-3));
    for (std::size_t j = 1; j < cm.size(); ++j) CHECK(cm[j] >= cm[j - 1]);
    CHECK(cm.back() <= m.lambda * (1.0 + 1e-12)); // never exceeds the total mass

    // Near the threshold the mass has collapsed onto the vortex: plateau at
    // the smallest radius, value within 1e-3 of the full mass.
    SolutionFamily fam = make_disk_blowup_family(-0.5, near_threshold_fractions(6));
    const FamilyMember& last = fam.members.back();
    std::vector<double> scan = {0.0125, 0.025, 0.05, 0.1, 0.2, 0.4, 0.8};
    ConcentrationEstimate est = concentration_beta(last, scan, 0.01);
    CHECK(est.plateau_found);
    CHECK(est.r_plateau == doctest::Approx(0.0125));
    CHECK(est.beta == doctest::Approx(last.lambda).epsilon(1e-3));

    // Far from the threshold there is no plateau; the fallback interval is
    // reported with its midpoint.
    const FamilyMember& first = fam.members.front();
    est = concentration_beta(first, scan, 0.01);
    CHECK_FALSE(est.plateau_found);
    CHECK(est.interval[0] < est.interval[1]);
    CHECK(est.beta ==
          doctest::Approx(0.5 * (est.interval[0] + est.interval[1])).epsilon(1e-12));
}

TEST_CASE("pohozaev balance vanishes on analytic solutions and refines at order >= 1") {
    for (double sigma : {-0.5, 0.0}) {
        FamilyMember m = disk_member(sigma, 0.5 * lambda_sigma(sigma));
        for (double r : {0.2, 0.45, 0.7})
            CHECK(pohozaev_residual(m, r) <= 1e-5);
    }

    std::vector<double> res;
    for (int n : {513, 1025, 2049})
        res.push_back(pohozaev_residual(disk_member(-0.5, 2.0 * PI, n), 0.45));
    REQUIRE(res.size() == 3);
    CHECK(res[1] < res[0]);
    CHECK(res[2] < res[1]);
    CHECK(std::log2(res[0] / res[1]) >= 1.0);
    CHECK(std::log2(res[1] / res[2]) >= 1.0);

    // Grid contour: an exact flat-weight solution, residual shrinks with h.
    double prev = 1e9;
    for (double h : {0.02, 0.01}) {
        MeshPtr mesh = build_grid_mesh(2.2, 2.2, h);
        const double g2 = 25.0;
        ScalarField v(mesh);
        for (std::size_t i = 0; i < mesh->size(); ++i) {
            double s2 = mesh->x[i] * mesh->x[i] + mesh->y[i] * mesh->y[i];
            v[i] = std::log(8.0 * g2) - 2.0 * std::log1p(g2 * s2);
        }
        FamilyMember m = make_member(std::move(v), 0.0, 0.0);
        double r = pohozaev_residual(m, 0.6);
        CHECK(r <= 2e-2);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("planted case I family: ratios, mass limit, energies, decay bound") {
    std::vector<double> t0s = {4.0, 8.0, 16.0};
    std::vector<double> deltas = {1e-2, 3e-3, 1e-3};
    SolutionFamily fam = make_case1_family(0.1, t0s, deltas);
    REQUIRE(fam.members.size() == 3);

    BlowupReport rep = classify_profile(fam);
    CHECK(rep.label == BlowupCase::I);
    for (std::size_t k = 0; k < t0s.size(); ++k)
        CHECK(rep.eps_over_t[k] == doctest::Approx(t0s[k]).epsilon(0.02));
    CHECK(rep.lambda_inf == doctest::Approx(8.0 * PI).epsilon(0.02));
    CHECK(rep.window.lower == doctest::Approx(8.0 * PI).epsilon(1e-14));
    CHECK(rep.window.upper == doctest::Approx(10.0 * PI).epsilon(1e-14));
    CHECK(rep.in_window);
    CHECK(rep.beta == doctest::Approx(8.0 * PI).epsilon(0.03));
    // eps > 0 members integrate the balance by trapezoid through the core:
    // looser bar than the exact-moment path of the analytic solutions
    for (double p : rep.pohozaev) CHECK(p <= 1e-3);

    EnergyTrend tr = high_energy_divergence(fam);
    CHECK(tr.increasing);
    CHECK(tr.ratio > 1.0);

    // Outside the core the profile obeys v + 2(1+a) log|x| <= C with small
    // residual mass; an absurdly low C refutes the bound.
    CHECK(ls_decay_check(fam.members.back(), 0.05, 0.0, 0.05));
    CHECK_FALSE(ls_decay_check(fam.members.back(), 0.05, -20.0, 0.05));
}

TEST_CASE("planted case II family: off-center bubbles on the grid") {
    std::vector<double> xs = {0.45, 0.36, 0.30};
    std::vector<double> deltas = {0.074, 0.0298, 0.0116};
    SolutionFamily fam = make_case2_family(0.1, xs, deltas);
    REQUIRE(fam.members.size() == 3);

    for (std::size_t k = 0; k < xs.size(); ++k) {
        CHECK(fam.members[k].x_norm == doctest::Approx(xs[k]).epsilon(1e-12));
        CHECK(fam.members[k].eps == doctest::Approx(0.5 * xs[k]).epsilon(1e-14));
        CHECK(fam.members[k].lambda == doctest::Approx(8.0 * PI).epsilon(0.05));
        CHECK(fam.members[k].boundary_osc > 0.0);
        CHECK(fam.members[k].boundary_osc < 8.0);
    }

    ClassifyOptions opts;
    opts.plateau_tol = 0.05; // grid resolution caps the core scale, fat tails
    BlowupReport rep = classify_profile(fam, opts);
    CHECK(rep.label == BlowupCase::II);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        CHECK(rep.x_over_delta[k] == doctest::Approx(xs[k] / deltas[k]).epsilon(0.05));
        CHECK(rep.eps_over_t[k] == doctest::Approx(0.5).epsilon(1e-9));
    }
    CHECK(rep.lambda_inf == doctest::Approx(8.0 * PI).epsilon(0.02));
    CHECK(rep.in_window);
    CHECK(rep.beta == doctest::Approx(8.0 * PI).epsilon(0.03));

    // The fitted log-amplitude matches the planted core scale log(mu^2).
    double x_last = xs.back();
    double eps_last = 0.5 * x_last;
    double W = std::pow(eps_last * eps_last + x_last * x_last, 0.2);
    double mu = std::sqrt(W / 8.0) / std::pow(deltas.back(), 1.2);
    CHECK(rep.fit_log_b == doctest::Approx(2.0 * std::log(mu)).epsilon(0.15));
}

TEST_CASE("planted case III family: pinned mass inside the open window") {
    SolutionFamily fam = make_case3_family(0.1, 9.0 * PI, 0.5, {1e-2, 3e-3, 1e-3});
    BlowupReport rep = classify_profile(fam);
    CHECK(rep.label == BlowupCase::III);
    for (double lam : rep.lambdas) CHECK(lam == doctest::Approx(9.0 * PI).epsilon(1e-3));
    CHECK(rep.lambda_inf == doctest::Approx(9.0 * PI).epsilon(0.02));
    CHECK(rep.in_window);
    CHECK(rep.beta == doctest::Approx(9.0 * PI).epsilon(0.03));
    CHECK(rep.fit_exponent == doctest::Approx(2.25).epsilon(0.02));
    CHECK(rep.eps0 > 0.0);
    for (double p : rep.pohozaev) CHECK(p <= 1e-4);
    // eps_n/t_n is bounded and essentially constant by construction
    for (double q : rep.eps_over_t)
        CHECK(q == doctest::Approx(rep.eps_over_t.front()).epsilon(1e-3));

    // sigma = 0.3 pushes the window upper bound onto the integrability cap.
    SolutionFamily fam3 = make_case3_family(0.3, 10.0 * PI, 0.5, {1e-2, 1e-3});
    BlowupReport rep3 = classify_profile(fam3);
    CHECK(rep3.label == BlowupCase::III);
    CHECK(rep3.window.upper == doctest::Approx(4.0 * PI / 0.3).epsilon(1e-14));
    CHECK(rep3.lambda_inf == doctest::Approx(10.0 * PI).epsilon(0.02));
    CHECK(rep3.in_window);

    // sup + C0 inf preconditions: alpha_inf = 0.225 needs C0 > 1.5806...
    CHECK(std::isfinite(sup_plus_cinf_check(fam, 0.5, 1.7)));
    CHECK_THROWS_AS(sup_plus_cinf_values(fam, 0.5, 1.5), config_error);
    // ... and alpha_inf = 0.75 needs C0 > 7.
    CHECK_THROWS_AS(sup_plus_cinf_values(fam3, 0.5, 1.7), config_error);
}

TEST_CASE("disk branch families classify as case III with the exact mass limit") {
    SolutionFamily f0 = make_disk_blowup_family(0.0, near_threshold_fractions(6));
    BlowupReport rep = classify_profile(f0);
    CHECK(rep.label == BlowupCase::III);
    CHECK(rep.eps0 == 0.0);
    CHECK(rep.lambda_inf == doctest::Approx(8.0 * PI).epsilon(1e-3));
    CHECK(rep.window.lower == doctest::Approx(8.0 * PI).epsilon(1e-14));
    CHECK(rep.window.upper == doctest::Approx(8.0 * PI).epsilon(1e-14));
    CHECK(rep.in_window);
    CHECK(rep.beta == doctest::Approx(8.0 * PI).epsilon(2e-3));

    // The profile fit recovers the closed-form amplitude gamma^2 of the last
    // member: v = v(0) - 2 log(1 + gamma^2 r^2). (Oracle at the planted
    // lambda: the measured one may sit a quadrature error past the threshold.)
    DiskSolution last = disk_solution(0.0, (1.0 - 1e-6) * 8.0 * PI);
    CHECK(rep.fit_exponent == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(std::abs(rep.fit_log_b - std::log(last.gamma2)) <= 0.05);
    CHECK(rep.fit_residual <= 0.05);

    SolutionFamily fm = make_disk_blowup_family(-0.5, near_threshold_fractions(6));
    rep = classify_profile(fm);
    CHECK(rep.label == BlowupCase::III);
    CHECK(rep.lambda_inf == doctest::Approx(4.0 * PI).epsilon(1e-3));
    CHECK(rep.window.lower == doctest::Approx(4.0 * PI).epsilon(1e-14));
    CHECK(rep.window.upper == doctest::Approx(8.0 * PI).epsilon(1e-14));
    CHECK(rep.in_window); // the limit sits at the lower edge of the window
}

TEST_CASE("family energies match the closed-form branch energies and increase") {
    std::vector<double> fr = {0.5, 0.8, 0.95, 0.99};
    SolutionFamily f0 = make_disk_blowup_family(0.0, fr);
    EnergyTrend tr = high_energy_divergence(f0);
    REQUIRE(tr.E.size() == fr.size());
    for (std::size_t k = 0; k < fr.size(); ++k)
        CHECK(tr.E[k] ==
              doctest::Approx(disk_mvp_energy(0.0, fr[k] * 8.0 * PI)).epsilon(1e-4));
    CHECK(tr.increasing);
    CHECK(tr.ratio == doctest::Approx(disk_mvp_energy(0.0, 0.99 * 8.0 * PI) /
                                      disk_mvp_energy(0.0, 0.5 * 8.0 * PI))
                          .epsilon(1e-3));

    SolutionFamily fm = make_disk_blowup_family(-0.5, {0.5, 0.9});
    tr = high_energy_divergence(fm);
    CHECK(tr.E[0] == doctest::Approx(disk_mvp_energy(-0.5, 0.5 * 4.0 * PI)).epsilon(1e-4));
    CHECK(tr.E[1] == doctest::Approx(disk_mvp_energy(-0.5, 0.9 * 4.0 * PI)).epsilon(1e-4));
    CHECK(tr.increasing);
}

TEST_CASE("sup + C0 inf stays uniformly bounded along the disk branch") {
    std::vector<double> fr = near_threshold_fractions(6);
    SolutionFamily f0 = make_disk_blowup_family(0.0, fr);
    std::vector<double> vals = sup_plus_cinf_values(f0, 0.5, 1.01);

    // Closed form at the planted lambda: sup = v(0) = 2 log(1+g^2) +
    // log(lambda/Z), inf = v(1) = log(lambda/Z) with Z = pi (1+g^2).
    for (std::size_t k = 0; k < vals.size(); ++k) {
        DiskSolution ds = disk_solution(0.0, fr[k] * 8.0 * PI);
        double tail = std::log(ds.lambda / (PI * (1.0 + ds.gamma2)));
        double expect = 2.0 * std::log1p(ds.gamma2) + tail + 1.01 * tail;
        CHECK(vals[k] == doctest::Approx(expect).epsilon(1e-10));
    }

    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= double(vals.size());
    double spread = *std::max_element(vals.begin(), vals.end()) -
                    *std::min_element(vals.begin(), vals.end());
    CHECK(spread < 0.05 * std::abs(mean));
    CHECK(sup_plus_cinf_check(f0, 0.5, 1.01) ==
          doctest::Approx(*std::max_element(vals.begin(), vals.end())).epsilon(1e-12));

    // C0 must strictly exceed 1 when alpha_inf <= 0.
    CHECK_THROWS_AS(sup_plus_cinf_values(f0, 0.5, 1.0), config_error);
}

TEST_CASE("pointwise decay bound: holds near the threshold, mass test far from it") {
    // Far from the threshold the density is spread out: the log bound holds
    // for a generous C but most of the mass sits outside the core.
    FamilyMember flat = disk_member(0.0, 0.05 * 8.0 * PI);
    CHECK_FALSE(ls_decay_check(flat, 0.05, 10.0, 0.05));
    CHECK(ls_decay_check(flat, 0.05, 10.0, 1.0)); // with the mass test disabled

    FamilyMember sharp = disk_member(0.0, (1.0 - 1e-6) * 8.0 * PI);
    CHECK(ls_decay_check(sharp, 0.05, 10.0, 0.05));

    CHECK_THROWS_AS(ls_decay_check(flat, 0.3, 10.0, 0.05), config_error);
    CHECK_THROWS_AS(ls_decay_check(flat, 0.05, 10.0, 0.0), config_error);
}

TEST_CASE("misuse and degenerate families are refused or labelled none") {
    // Reordered members: no blow-up trend.
    SolutionFamily f0 = make_disk_blowup_family(0.0, near_threshold_fractions(4));
    std::swap(f0.members.front(), f0.members.back());
    BlowupReport rep = classify_profile(f0);
    CHECK(rep.label == BlowupCase::None);
    CHECK(rep.notes.find("no blow-up trend") != std::string::npos);

    // Spliced members with conflicting ratio trends: labelled none, flagged.
    SolutionFamily a = make_case1_family(0.1, {12.0}, {1e-2});
    SolutionFamily b = make_case1_family(0.1, {4.0}, {1e-3});
    SolutionFamily mixed;
    mixed.sigma = 0.1;
    mixed.members.push_back(a.members[0]);
    mixed.members.push_back(b.members[0]);
    rep = classify_profile(mixed);
    CHECK(rep.label == BlowupCase::None);
    CHECK(rep.notes.find("mixed") != std::string::npos);

    // Family/member sigma mismatch.
    SolutionFamily wrong = make_disk_blowup_family(-0.5, {0.5, 0.9});
    wrong.sigma = 0.0;
    CHECK_THROWS_AS(classify_profile(wrong), config_error);

    ClassifyOptions bad_opts;
    bad_opts.ratio_threshold = 0.5;
    SolutionFamily ok = make_disk_blowup_family(0.0, {0.5, 0.9});
    CHECK_THROWS_AS(classify_profile(ok, bad_opts), config_error);

    // Builder validation.
    CHECK_THROWS_AS(make_case1_family(0.6, {4.0}, {1e-2}), config_error);
    CHECK_THROWS_AS(make_case1_family(0.1, {4.0, 8.0}, {1e-2}), config_error);
    CHECK_THROWS_AS(make_case3_family(0.1, 7.0 * PI, 0.5, {1e-2}), config_error);
    CHECK_THROWS_AS(make_case3_family(0.3, 14.0 * PI, 0.5, {1e-2}), config_error);
    CHECK_THROWS_AS(make_case2_family(0.1, {0.3}, {0.05}, 0.5, 0.007), config_error);
    CHECK_THROWS_AS(make_case2_family(0.1, {0.3}, {0.4}), config_error);
    CHECK_THROWS_AS(make_disk_blowup_family(0.0, {0.9, 0.5}), config_error);

    // make_member validation.
    MeshPtr grid = build_grid_mesh(1.0, 1.0, 0.1);
    ScalarField z(grid);
    CHECK_THROWS_AS(make_member(z, 0.0, -1.0), config_error);
    CHECK_THROWS_AS(make_member(z, -0.25, 0.0), domain_error);
    ScalarField nanf(grid);
    nanf[0] = std::nan("");
    CHECK_THROWS_AS(make_member(nanf, 0.0, 0.0), config_error);

    FamilyMember m = disk_member(0.0, 4.0 * PI, 512);
    CHECK_THROWS_AS(pohozaev_residual(m, 1.0), config_error);
    CHECK_THROWS_AS(concentration_beta(m, {0.5}, 0.01), config_error);
    CHECK_THROWS_AS(concentration_mass(m, {0.5, 0.2}), config_error);
}
