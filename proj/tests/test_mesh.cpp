/// Mesh and Poisson machinery tests. Oracles here are independent of the
/// implementation: exact closed forms ((1-r^2)/4 for unit rhs, the disk Green
/// function -(1/2pi)log|x|, the regularized disk kernel
/// (1/4pi)log((1+eps^2)/(eps^2+|x|^2))), manufactured polynomial solutions on
/// rectangles, and grid-refinement references.
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "vortexmf/mesh.hpp"

using namespace vmf;

namespace {
const double PI = 3.14159265358979323846;

double sup_diff(const ScalarField& f, const std::vector<double>& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::fabs(f[i] - g[i]));
    return m;
}
} // namespace

TEST_CASE("disk mesh: quadrature weights sum to the exact area") {
    for (int n : {16, 64, 256, 1024}) {
        for (auto g : {Grading::Uniform, Grading::LogNearOrigin}) {
            auto mesh = build_disk_mesh(n, g);
            double sum = 0.0;
            for (double w : mesh->weight) sum += w;
            CHECK(std::fabs(sum - PI) <= 1e-12 * PI);
            CHECK(mesh->r.front() == 0.0);
            CHECK(mesh->r.back() == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(mesh->boundary.back() == 1);
            CHECK(mesh->boundary.front() == 0); // origin is interior
        }
    }
}

TEST_CASE("disk mesh: log grading resolves small radii; node count floor") {
    auto mesh = build_disk_mesh(256, Grading::LogNearOrigin);
    CHECK(mesh->r[1] <= 1e-4);
    CHECK_THROWS_AS(build_disk_mesh(8), config_error);
}

TEST_CASE("disk Poisson: rhs = 1 gives psi = (1-r^2)/4 exactly") {
    auto mesh = build_disk_mesh(1024, Grading::Uniform);
    ScalarField rhs(mesh, 1.0);
    ScalarField psi = poisson_solve(rhs);
    std::vector<double> exact(mesh->size());
    for (std::size_t i = 0; i < mesh->size(); ++i)
        exact[i] = (1.0 - mesh->r[i] * mesh->r[i]) / 4.0;
    CHECK(sup_diff(psi, exact) <= 1e-6);
    CHECK(psi[0] == doctest::Approx(0.25).epsilon(1e-10));

    ScalarField zero(mesh, 0.0);
    ScalarField psi0 = poisson_solve(zero);
    for (double v : psi0.v) CHECK(v == 0.0);
}

TEST_CASE("disk Poisson: manufactured quartic converges at second order") {
    // -Delta[(1-r^4)/16] = r^2
    std::vector<double> errs;
    for (int n : {64, 128, 256, 512}) {
        auto mesh = build_disk_mesh(n, Grading::Uniform);
        ScalarField rhs(mesh);
        for (std::size_t i = 0; i < mesh->size(); ++i)
            rhs[i] = mesh->r[i] * mesh->r[i];
        ScalarField psi = poisson_solve(rhs);
        double err = 0.0;
        for (std::size_t i = 0; i < mesh->size(); ++i) {
            double r2 = mesh->r[i] * mesh->r[i];
            err = std::max(err, std::fabs(psi[i] - (1.0 - r2 * r2) / 16.0));
        }
        errs.push_back(err);
    }
    double slope = std::log2(errs[0] / errs.back()) / 3.0;
    CHECK(slope > 1.7);
    CHECK(slope < 2.3);
}

TEST_CASE("grid mesh: construction, area, origin") {
    auto g1 = build_grid_mesh(2.0, 2.0, 0.1);
    CHECK(g1->origin_node >= 0);
    CHECK(g1->boundary[g1->origin_node] == 0);
    CHECK(g1->x[g1->origin_node] == 0.0);
    CHECK(g1->y[g1->origin_node] == 0.0);

    auto g2 = build_grid_mesh(1.0, 1.0, 0.05);
    double sum = 0.0;
    for (double w : g2->weight) sum += w;
    CHECK(std::fabs(sum - 1.0) <= 1e-12);

    // origin on the boundary is rejected
    CHECK_THROWS_AS(build_grid_mesh(2.0, 2.0, 0.1, {1.0, 0.0}), config_error);
}

TEST_CASE("grid Poisson: biquadratic manufactured solution is reproduced") {
    // psi = (1-x^2)(1/4-y^2) on [-1,1]x[-1/2,1/2]; the 5-point Laplacian is
    // exact on this polynomial, so only roundoff should remain.
    auto mesh = build_grid_mesh(2.0, 1.0, 0.02);
    ScalarField rhs(mesh);
    std::vector<double> exact(mesh->size());
    for (std::size_t i = 0; i < mesh->size(); ++i) {
        double x = mesh->x[i], y = mesh->y[i];
        exact[i] = (1.0 - x * x) * (0.25 - y * y);
        rhs[i] = 2.0 * (0.25 - y * y) + 2.0 * (1.0 - x * x);
    }
    ScalarField psi = poisson_solve(rhs);
    CHECK(sup_diff(psi, exact) <= 1e-10);
}

TEST_CASE("grid Poisson: trigonometric solution converges at second order") {
    std::vector<double> errs;
    for (double h : {0.1, 0.05, 0.025}) {
        auto mesh = build_grid_mesh(2.0, 1.0, h);
        ScalarField rhs(mesh);
        std::vector<double> exact(mesh->size());
        for (std::size_t i = 0; i < mesh->size(); ++i) {
            double x = mesh->x[i], y = mesh->y[i];
            double u = std::sin(PI * (x + 1.0) / 2.0) * std::sin(PI * (y + 0.5));
            exact[i] = u;
            rhs[i] = (PI * PI / 4.0 + PI * PI) * u;
        }
        ScalarField psi = poisson_solve(rhs);
        errs.push_back(sup_diff(psi, exact));
    }
    double slope = std::log2(errs[0] / errs[2]) / 2.0;
    CHECK(slope > 1.7);
    CHECK(slope < 2.3);
}

TEST_CASE("discrete maximum principle and self-adjointness") {
    std::mt19937_64 rng(991);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    for (int kind = 0; kind < 2; ++kind) {
        MeshPtr mesh = kind == 0 ? build_disk_mesh(128, Grading::Uniform)
                                 : build_grid_mesh(1.0, 1.0, 0.05);
        ScalarField f(mesh), g(mesh);
        for (std::size_t i = 0; i < mesh->size(); ++i) {
            f[i] = uni(rng);
            g[i] = uni(rng) - 0.3;
        }
        ScalarField pf = poisson_solve(f);
        double minv = 1e300;
        for (std::size_t i = 0; i < mesh->size(); ++i) {
            CHECK(pf[i] >= -1e-14);
            minv = std::min(minv, pf[i]);
        }
        // min attained on the boundary (which is exactly 0)
        CHECK(std::fabs(minv) <= 1e-14);

        ScalarField pg = poisson_solve(g);
        double fg = 0.0, gf = 0.0;
        for (std::size_t i = 0; i < mesh->size(); ++i) {
            fg += mesh->weight[i] * f[i] * pg[i];
            gf += mesh->weight[i] * g[i] * pf[i];
        }
        CHECK(std::fabs(fg - gf) <= 1e-10 * (std::fabs(fg) + 1.0));
    }
}

TEST_CASE("duality of the Dirichlet form: <mass,psi> = int |grad psi|^2") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> uni(0.1, 2.0);
    for (int kind = 0; kind < 2; ++kind) {
        MeshPtr mesh = kind == 0 ? build_disk_mesh(256, Grading::LogNearOrigin)
                                 : build_grid_mesh(1.0, 1.0, 0.05);
        ScalarField f(mesh);
        for (std::size_t i = 0; i < mesh->size(); ++i) f[i] = uni(rng);
        ScalarField psi = poisson_solve(f);
        double pair = 0.0;
        for (std::size_t i = 0; i < mesh->size(); ++i)
            pair += mesh->weight[i] * f[i] * psi[i];
        CHECK(dirichlet_energy(psi) == doctest::Approx(pair).epsilon(1e-12));
    }
}

TEST_CASE("vortex Green function on the disk: exact closed form") {
    // 513 nodes so that r = 1/2 lands exactly on node 256
    auto mesh = build_disk_mesh(513, Grading::Uniform);
    ScalarField gv = green_vortex(mesh);
    CHECK(std::isinf(gv[0]));
    for (std::size_t i = 1; i < mesh->size(); ++i) {
        double expect = -std::log(mesh->r[i]) / (2.0 * PI);
        CHECK(gv[i] == doctest::Approx(expect).epsilon(1e-13));
    }
    // |x| = 1/2 -> (1/2pi) log 2; |x| = 1 -> 0
    CHECK(mesh->r[256] == 0.5);
    CHECK(gv[256] == doctest::Approx(std::log(2.0) / (2.0 * PI)).epsilon(1e-12));
    CHECK(gv[mesh->size() - 1] == 0.0);
}

TEST_CASE("vortex Green function on grids: refinement reference") {
    // unit square centered at the origin; reference on a 4x finer grid
    auto coarse = build_grid_mesh(1.0, 1.0, 0.01);
    auto fine = build_grid_mesh(1.0, 1.0, 0.0025);
    ScalarField gc = green_vortex(coarse);
    ScalarField gf = green_vortex(fine);

    auto value_at = [](const MeshPtr& m, const ScalarField& f, double X, double Y) {
        int i = int(std::lround((X - m->gx0) / m->h));
        int j = int(std::lround((Y - m->gy0) / m->h));
        return f[std::size_t(m->grid_id(i, j))];
    };
    double vc = value_at(coarse, gc, 0.1, 0.0);
    double vf = value_at(fine, gf, 0.1, 0.0);
    CHECK(std::fabs(vc - vf) <= 1e-4);
    CHECK(std::isinf(gc[std::size_t(coarse->origin_node)]));
}

TEST_CASE("regularized Green function: disk closed form and limits") {
    auto mesh = build_disk_mesh(512, Grading::Uniform);
    double eps = 0.1;
    ScalarField gn = regularized_green(mesh, eps);
    for (std::size_t i = 0; i < mesh->size(); ++i) {
        double r2 = mesh->r[i] * mesh->r[i];
        double expect = std::log((1.0 + eps * eps) / (eps * eps + r2)) / (4.0 * PI);
        CHECK(gn[i] == doctest::Approx(expect).epsilon(1e-13));
        CHECK(gn[i] >= 0.0);
    }
    CHECK(gn[0] == doctest::Approx(std::log(101.0) / (4.0 * PI)).epsilon(1e-13));
    CHECK_THROWS_AS(regularized_green(mesh, 0.0), config_error);

    // G_n -> G pointwise with an O(eps^2) rate at fixed x != 0
    ScalarField gv = green_vortex(mesh);
    std::size_t k = mesh->size() / 2;
    double e1 = std::fabs(regularized_green(mesh, 0.05)[k] - gv[k]);
    double e2 = std::fabs(regularized_green(mesh, 0.025)[k] - gv[k]);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));

    // grids: nonnegativity (discrete maximum principle on the correction)
    auto grid = build_grid_mesh(1.0, 1.0, 0.05);
    ScalarField gng = regularized_green(grid, 0.1);
    for (double v : gng.v) CHECK(v >= -1e-12);
}

TEST_CASE("weight field: closed forms, origin conventions, monotonicity") {
    auto mesh = build_disk_mesh(4096, Grading::Uniform);

    WeightSpec trivial{0.0, 5.0, 0.0};
    ScalarField h0 = weight_field(mesh, trivial);
    for (double v : h0.v) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    // sigma*lambda = 4pi, eps = 0: H = |x|^2 (away from the first cells, where
    // the reported value is the exact cell average of r^2)
    WeightSpec quad{0.5, 8.0 * PI, 0.0};
    CHECK(quad.a() == doctest::Approx(1.0).epsilon(1e-15));
    ScalarField hq = weight_field(mesh, quad);
    for (std::size_t i = 1; i < mesh->size(); ++i) {
        double r2 = mesh->r[i] * mesh->r[i];
        CHECK(std::fabs(hq[i] - r2) <= 1e-6);
    }
    CHECK(hq[0] >= 0.0); // a > 0 at the origin with eps = 0

    // eps = 0.1, sigma = 1/4, lambda = 8pi: a = 1/2 and
    // H = ((eps^2+|x|^2)/(1+eps^2))^{1/2} by substituting the closed-form G_n
    WeightSpec reg{0.25, 8.0 * PI, 0.1};
    CHECK(reg.a() == doctest::Approx(0.5).epsilon(1e-15));
    ScalarField hr = weight_field(mesh, reg);
    for (std::size_t i = 0; i < mesh->size(); ++i) {
        double r2 = mesh->r[i] * mesh->r[i];
        double expect = std::sqrt((0.01 + r2) / 1.01);
        CHECK(hr[i] == doctest::Approx(expect).epsilon(1e-12));
    }

    // integrability guard: sigma < 0, eps = 0 requires lambda < 4pi/|sigma|
    WeightSpec bad{-0.5, 8.0 * PI, 0.0};
    CHECK_THROWS_AS(weight_field(mesh, bad), domain_error);
    CHECK_THROWS_AS(bad.validate(), domain_error);

    // monotonicity in eps, fixed x != 0: increasing for sigma > 0, decreasing
    // for sigma < 0 (disk and grid)
    for (int kind = 0; kind < 2; ++kind) {
        MeshPtr m = kind == 0 ? MeshPtr(build_disk_mesh(128, Grading::Uniform))
                              : build_grid_mesh(1.0, 1.0, 0.05);
        for (double sg : {0.25, -0.25}) {
            ScalarField ha = weight_field(m, WeightSpec{sg, 4.0, 0.05});
            ScalarField hb = weight_field(m, WeightSpec{sg, 4.0, 0.1});
            std::size_t probe = m->size() / 2;
            if (m->boundary[probe]) probe -= 1;
            if (sg > 0)
                CHECK(hb[probe] > ha[probe]);
            else
                CHECK(hb[probe] < ha[probe]);
        }
    }

    // grids cannot represent the unregularized negative-sigma weight
    auto grid = build_grid_mesh(1.0, 1.0, 0.05);
    CHECK_THROWS_AS(weight_field(grid, WeightSpec{-0.25, 4.0, 0.0}), domain_error);
}

TEST_CASE("power cell moments: telescoping and closed-form checks") {
    auto mesh = build_disk_mesh(512, Grading::LogNearOrigin);
    // e = 0 reproduces the plain cell areas
    auto pw0 = power_cell_weights(*mesh, 0.0);
    for (std::size_t i = 0; i < mesh->size(); ++i)
        CHECK(pw0[i] == doctest::Approx(mesh->weight[i]).epsilon(1e-13));
    // sum of 2pi int r^{e+1} over all cells = 2pi/(e+2)
    for (double e : {-0.9, -0.5, 0.7, 2.0}) {
        auto pw = power_cell_weights(*mesh, e);
        double s = 0.0;
        for (double v : pw) s += v;
        CHECK(s == doctest::Approx(2.0 * PI / (e + 2.0)).epsilon(1e-12));
    }
    // 2pi int_0^1 r^{e+1} log r dr = -2pi/(e+2)^2
    for (double e : {-0.5, 0.0, 1.0}) {
        auto pwl = power_log_cell_weights(*mesh, e);
        double s = 0.0;
        for (double v : pwl) s += v;
        CHECK(s == doctest::Approx(-2.0 * PI / ((e + 2.0) * (e + 2.0))).epsilon(1e-12));
    }
}

TEST_CASE("field CSV round trip") {
    auto mesh = build_disk_mesh(64, Grading::Uniform);
    ScalarField f(mesh);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(double(i)) * 1e-3;
    std::stringstream ss;
    write_field_csv(ss, f);
    ScalarField g = read_field_csv(ss, mesh);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(g[i] == doctest::Approx(f[i]).epsilon(1e-15));
}
