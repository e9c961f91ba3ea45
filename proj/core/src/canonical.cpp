#include "vortexmf/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "vortexmf/disk_exact.hpp"
#include "vortexmf/errors.hpp"

namespace vmf {

namespace {

constexpr double PI = 3.14159265358979323846;

// Cell-averaged weight H-bar.  On the bare disk the power integrals are
// exact (the nodal weight is singular or vanishing at the origin); for
// smooth weights the nodal value is the cell average up to O(h^2), which is
// already the accuracy of everything else.
std::vector<double> cell_weight(const MeshPtr& mesh, const WeightSpec& spec) {
    const DomainMesh& m = *mesh;
    double a = spec.a();
    if (m.kind == MeshKind::DiskRadial && spec.eps == 0.0 && a != 0.0) {
        auto pw = power_cell_weights(m, 2.0 * a);
        for (std::size_t i = 0; i < pw.size(); ++i) pw[i] /= m.weight[i];
        return pw;
    }
    return weight_field(mesh, spec).v;
}

struct MassState {
    std::vector<double> mass;
    double log_z = 0.0;
};

// Per-cell masses of H-bar e^{lambda psi} / Z, max-shifted, renormalized so
// they sum to 1 exactly.
MassState masses_of(const DomainMesh& m, const std::vector<double>& hbar,
                    double lambda, const std::vector<double>& psi) {
    std::vector<double> s(m.size(), -std::numeric_limits<double>::infinity());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (hbar[i] <= 0.0) continue;
        s[i] = std::log(m.weight[i] * hbar[i]) + lambda * psi[i];
        top = std::max(top, s[i]);
    }
    MassState st;
    st.mass.assign(m.size(), 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (s[i] > -std::numeric_limits<double>::infinity())
            z += (st.mass[i] = std::exp(s[i] - top));
    for (auto& v : st.mass) v /= z;
    st.log_z = top + std::log(z);
    return st;
}

double sup_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double default_tol(const DomainMesh& m) {
    return m.kind == MeshKind::DiskRadial ? 1e-10 : 1e-8;
}

// -(1/lambda) sum m_i log H-bar_i; reduces to sigma int rho G in the
// continuum and makes the stored Legendre algebra exact.
double vortex_energy_of(const MeshPtr& mesh, const WeightSpec& spec,
                        const std::vector<double>& mass,
                        const std::vector<double>& hbar) {
    if (spec.lambda == 0.0) {
        auto g = green_vortex_cell_means(mesh, spec.eps);
        double acc = 0.0;
        for (std::size_t i = 0; i < mass.size(); ++i) acc += mass[i] * g[i];
        return spec.sigma * acc;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i)
        if (mass[i] > 0.0) acc += mass[i] * std::log(hbar[i]);
    return -acc / spec.lambda;
}

} // namespace

MeanFieldSolution solve_cvp(const MeshPtr& mesh, const WeightSpec& spec,
                            const SolveOptions& opts) {
    require_config(mesh != nullptr, "solve_cvp: null mesh");
    spec.validate();
    require_config(opts.omega > 0.0 && opts.omega <= 1.0, "solve_cvp: omega in (0,1]");
    require_config(opts.max_iter >= 1, "solve_cvp: max_iter >= 1");
    const DomainMesh& m = *mesh;
    double tol = opts.tol > 0.0 ? opts.tol : default_tol(m);

    MeanFieldSolution sol;
    sol.mesh = mesh;
    sol.spec = spec;
    sol.supercritical = spec.lambda >= lambda_sigma(spec.sigma);

    auto hbar = cell_weight(mesh, spec);

    std::vector<double> psi;
    if (opts.psi0 != nullptr) {
        require_config(opts.psi0->mesh == mesh && opts.psi0->size() == m.size(),
                       "solve_cvp: warm start lives on a different mesh");
        psi = opts.psi0->v;
    } else {
        std::vector<double> unif(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) unif[i] = m.weight[i] / m.area;
        psi = poisson_solve_mass(mesh, unif).v;
    }

    double omega = opts.omega;
    double prev_step = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iter; ++it) {
        sol.iterations = it;
        auto st = masses_of(m, hbar, spec.lambda, psi);
        auto next = poisson_solve_mass(mesh, st.mass).v;
        double step = sup_abs_diff(next, psi);
        sol.final_update = step;
        if (!std::isfinite(step)) break;
        double sup = *std::max_element(next.begin(), next.end());
        if (spec.lambda * sup > opts.sup_ceiling) {
            psi.swap(next);
            break;
        }
        if (step < tol) {
            psi.swap(next);
            sol.converged = true;
            break;
        }
        if (step > prev_step) omega = std::max(0.5 * omega, 1.0 / 4096.0);
        prev_step = step;
        for (std::size_t i = 0; i < m.size(); ++i)
            psi[i] += omega * (next[i] - psi[i]);
    }

    // Final consistency pass: psi is an exact discrete potential of its
    // masses, rho the exact fixed-point image of that psi.  All structural
    // identities (sum of masses, Legendre algebra, F = J) follow.
    auto pre = masses_of(m, hbar, spec.lambda, psi);
    psi = poisson_solve_mass(mesh, pre.mass).v;
    auto st = masses_of(m, hbar, spec.lambda, psi);

    sol.psi = ScalarField(mesh, psi);
    sol.mass = st.mass;
    std::vector<double> rho(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) rho[i] = st.mass[i] / m.weight[i];
    sol.rho = ScalarField(mesh, std::move(rho));
    sol.log_normalizer = st.log_z;

    double e = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) e += st.mass[i] * psi[i];
    sol.energy = 0.5 * e;
    sol.vortex_energy = vortex_energy_of(mesh, spec, st.mass, hbar);
    sol.entropy = entropy(sol.rho);
    sol.free_energy = -sol.entropy - spec.lambda * (sol.energy - sol.vortex_energy);
    sol.j_value = spec.lambda * sol.energy - sol.log_normalizer;
    return sol;
}

double entropy(const ScalarField& rho) {
    require_config(rho.mesh != nullptr && rho.size() == rho.mesh->size(),
                   "entropy: field/mesh mismatch");
    const DomainMesh& m = *rho.mesh;
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double v = rho[i];
        require_domain(v >= -1e-12, "entropy: negative density");
        if (v > 0.0) s -= m.weight[i] * v * std::log(v);
    }
    return s;
}

double free_energy(const ScalarField& rho, const WeightSpec& spec) {
    require_config(rho.mesh != nullptr && rho.size() == rho.mesh->size(),
                   "free_energy: field/mesh mismatch");
    spec.validate();
    const DomainMesh& m = *rho.mesh;
    auto hbar = cell_weight(rho.mesh, spec);
    std::vector<double> mass(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) mass[i] = m.weight[i] * rho[i];
    auto psi = poisson_solve_mass(rho.mesh, mass);
    double e = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) e += mass[i] * psi[i];
    double f = -entropy(rho) - 0.5 * spec.lambda * e;
    if (spec.lambda != 0.0)
        for (std::size_t i = 0; i < m.size(); ++i)
            if (mass[i] != 0.0) f -= mass[i] * std::log(hbar[i]);
    return f;
}

double j_functional(const ScalarField& psi, const WeightSpec& spec) {
    require_config(psi.mesh != nullptr && psi.size() == psi.mesh->size(),
                   "j_functional: field/mesh mismatch");
    spec.validate();
    auto hbar = cell_weight(psi.mesh, spec);
    auto st = masses_of(*psi.mesh, hbar, spec.lambda, psi.v);
    return 0.5 * spec.lambda * dirichlet_energy(psi) - st.log_z;
}

double duality_gap(const ScalarField& rho, const WeightSpec& spec) {
    require_config(rho.mesh != nullptr && rho.size() == rho.mesh->size(),
                   "duality_gap: field/mesh mismatch");
    spec.validate();
    const DomainMesh& m = *rho.mesh;
    std::vector<double> mass(m.size());
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) total += (mass[i] = m.weight[i] * rho[i]);
    for (auto& v : mass) v /= total; // relative entropy needs both normalized
    auto psi = poisson_solve_mass(rho.mesh, mass);
    auto hbar = cell_weight(rho.mesh, spec);
    auto st = masses_of(m, hbar, spec.lambda, psi.v);
    double gap = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (mass[i] > 0.0)
            gap += mass[i] * std::log(mass[i] / std::max(st.mass[i], 1e-300));
    return gap;
}

EnsembleCurve sweep_lambda(const MeshPtr& mesh, double sigma, double eps,
                           const std::vector<double>& lambdas,
                           const SweepOptions& opts) {
    require_config(mesh != nullptr, "sweep_lambda: null mesh");
    for (std::size_t k = 1; k < lambdas.size(); ++k)
        require_config(lambdas[k] > lambdas[k - 1], "sweep_lambda: lambdas must increase");

    EnsembleCurve curve;
    curve.samples.reserve(lambdas.size());
    ScalarField warm;
    bool have_warm = false, broken = false;

    for (double lam : lambdas) {
        CurveSample s;
        s.lambda = lam;
        if (broken && opts.warm_start) {
            s.status = SampleStatus::Skipped;
            curve.samples.push_back(s);
            continue;
        }
        SolveOptions so = opts.solve;
        if (opts.warm_start && have_warm) so.psi0 = &warm;
        auto sol = solve_cvp(mesh, WeightSpec{sigma, lam, eps}, so);
        s.E = sol.energy - sol.vortex_energy;
        s.S = sol.entropy;
        s.F = sol.free_energy;
        s.J = sol.j_value;
        s.sup_psi = *std::max_element(sol.psi.v.begin(), sol.psi.v.end());
        for (std::size_t i = 0; i < mesh->size(); ++i) {
            double r = std::hypot(mesh->x[i], mesh->y[i]);
            if (r <= 0.1) s.mass_b01 += sol.mass[i];
            if (r <= 0.01) s.mass_b001 += sol.mass[i];
        }
        s.status = sol.converged ? SampleStatus::Converged : SampleStatus::Diverged;
        if (sol.converged && opts.warm_start) {
            warm = sol.psi;
            have_warm = true;
        }
        if (!sol.converged) broken = true;
        curve.samples.push_back(s);
    }
    for (std::size_t k = 0; k < curve.samples.size(); ++k)
        if (curve.samples[k].status != SampleStatus::Converged) {
            curve.branch_end = static_cast<int>(k);
            break;
        }
    return curve;
}

void write_curve_csv(std::ostream& os, const EnsembleCurve& curve) {
    os << "lambda,E,S,F,J,sup_psi,mass_b01,mass_b001,status\n";
    os.precision(17);
    for (const auto& s : curve.samples) {
        const char* tag = s.status == SampleStatus::Converged   ? "converged"
                          : s.status == SampleStatus::Diverged ? "diverged"
                                                               : "skipped";
        os << s.lambda << ',' << s.E << ',' << s.S << ',' << s.F << ',' << s.J << ','
           << s.sup_psi << ',' << s.mass_b01 << ',' << s.mass_b001 << ',' << tag << '\n';
    }
}

} // namespace vmf
