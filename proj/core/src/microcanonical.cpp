#include "vortexmf/microcanonical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>

#include "vortexmf/disk_exact.hpp"
#include "vortexmf/errors.hpp"

namespace vmf {

namespace {

constexpr double PI = 3.14159265358979323846;

double min_cell_spacing(const DomainMesh& m) {
    if (m.kind == MeshKind::DiskRadial) {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < m.r.size(); ++i)
            d = std::min(d, m.r[i + 1] - m.r[i]);
        return d;
    }
    return m.h;
}

// Default scan ceiling: reach past the blow-up threshold so saturation can be
// certified, but stay strictly inside the integrability window when the bare
// weight is in play (sigma < 0, eps = 0 needs lambda < 4 pi / |sigma|).
double default_lambda_max(double sigma, double eps) {
    double cap = 1.5 * lambda_sigma(sigma);
    if (sigma > 0.0 && sigma < 0.5)
        cap = std::min(8.0 * PI / (1.0 - 2.0 * sigma), 4.0 * PI / sigma);
    if (sigma < 0.0 && eps == 0.0)
        cap = std::min(cap, 4.0 * PI / -sigma);
    return cap * (1.0 - 1e-6);
}

} // namespace

double regularized_energy(const ScalarField& rho, double sigma, double eps) {
    require_config(rho.mesh != nullptr, "regularized_energy: density has no mesh");
    require_config(eps >= 0.0, "regularized_energy: eps must be >= 0");
    const DomainMesh& m = *rho.mesh;
    require_config(rho.v.size() == m.size(), "regularized_energy: field size mismatch");

    std::vector<double> mass(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        mass[i] = m.weight[i] * rho.v[i];
    ScalarField psi = poisson_solve_mass(rho.mesh, mass);

    double quad = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        quad += mass[i] * psi.v[i];
    quad *= 0.5;
    if (sigma == 0.0) return quad;

    std::vector<double> g = green_vortex_cell_means(rho.mesh, eps);
    double vort = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        vort += mass[i] * g[i];
    return quad - sigma * vort;
}

double e0_uniform(const MeshPtr& mesh, double sigma, double eps) {
    require_config(mesh != nullptr, "e0_uniform: null mesh");
    return regularized_energy(ScalarField(mesh, 1.0 / mesh->area), sigma, eps);
}

MvpResult solve_mvp(const MeshPtr& mesh, double sigma, double eps,
                    double E_target, const MvpOptions& opts) {
    require_config(mesh != nullptr, "solve_mvp: null mesh");
    require_config(std::isfinite(E_target), "solve_mvp: E_target must be finite");
    require_config(eps >= 0.0, "solve_mvp: eps must be >= 0");
    if (eps > 0.0) {
        double floor = 2.0 * min_cell_spacing(*mesh);
        if (eps < floor) {
            std::ostringstream os;
            os << "solve_mvp: eps = " << eps << " is below twice the smallest cell "
               << "spacing (" << floor << "); sub-cell regularization is invisible "
               << "to this mesh";
            throw config_error(os.str());
        }
    }
    require_config(opts.scan_points >= 2, "solve_mvp: need at least 2 scan points");
    require_config(opts.energy_tol > 0.0, "solve_mvp: energy_tol must be > 0");
    require_config(opts.lambda_min >= 0.0, "solve_mvp: lambda_min must be >= 0");

    const double lam_lo = opts.lambda_min;
    const double lam_hi =
        opts.lambda_max > 0.0 ? opts.lambda_max : default_lambda_max(sigma, eps);
    require_config(lam_hi > lam_lo, "solve_mvp: empty lambda bracket");
    if (sigma < 0.0 && eps == 0.0)
        require_domain(lam_hi < 4.0 * PI / -sigma,
                       "solve_mvp: bracket reaches the non-integrable range of the "
                       "bare weight; lower lambda_max or set eps > 0");

    MvpResult res;
    res.target_energy = E_target;
    res.eps = eps;

    // warm-started scan of the energy map E(lambda)
    const int n = opts.scan_points;
    const double step = (lam_hi - lam_lo) / (n - 1);
    std::vector<double> lam(n), energy(n, 0.0);
    std::vector<char> conv(n, 0);
    std::vector<ScalarField> psis(n);
    double e_seen_min = std::numeric_limits<double>::infinity();
    double e_seen_max = -std::numeric_limits<double>::infinity();
    bool hit_wall = false;

    const ScalarField* warm = nullptr;
    for (int i = 0; i < n; ++i) {
        lam[i] = (i == n - 1) ? lam_hi : lam_lo + step * i;
        if (hit_wall) continue; // past the wall the branch only gets worse
        SolveOptions so = opts.solve;
        so.psi0 = warm;
        MeanFieldSolution s = solve_cvp(mesh, WeightSpec{sigma, lam[i], eps}, so);
        if (!s.converged) {
            hit_wall = true;
            continue;
        }
        conv[i] = 1;
        energy[i] = s.mvp_energy();
        psis[i] = s.psi;
        warm = &psis[i];
        e_seen_min = std::min(e_seen_min, energy[i]);
        e_seen_max = std::max(e_seen_max, energy[i]);
        res.scan.push_back({lam[i], energy[i]});
    }

    std::vector<std::pair<MvpRoot, MeanFieldSolution>> hits;
    auto note = [&](MeanFieldSolution&& s) {
        MvpRoot r;
        r.lambda = s.spec.lambda;
        r.achieved_energy = s.mvp_energy();
        r.entropy = s.entropy;
        for (const auto& h : hits)
            if (std::abs(h.first.lambda - r.lambda) <=
                1e-9 * std::max(1.0, std::abs(r.lambda)))
                return;
        hits.emplace_back(r, std::move(s));
    };
    auto resolve = [&](double l, const ScalarField* w0) {
        SolveOptions so = opts.solve;
        so.psi0 = w0;
        return solve_cvp(mesh, WeightSpec{sigma, l, eps}, so);
    };

    // scan points that land on the target directly
    for (int i = 0; i < n; ++i) {
        if (!conv[i] || std::abs(energy[i] - E_target) > opts.energy_tol) continue;
        MeanFieldSolution s = resolve(lam[i], &psis[i]);
        if (s.converged && std::abs(s.mvp_energy() - E_target) <= opts.energy_tol)
            note(std::move(s));
    }

    // bracketed bisection; a non-converged midpoint caps the interval from
    // above (the wall sits on the high-lambda side of the branch)
    auto bisect = [&](double lo, double hi, const ScalarField& wlo,
                      bool lo_below) -> std::optional<MeanFieldSolution> {
        ScalarField warm_lo = wlo;
        for (int it = 0; it < 120 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
            double mid = 0.5 * (lo + hi);
            MeanFieldSolution s = resolve(mid, &warm_lo);
            if (!s.converged) {
                hi = mid;
                continue;
            }
            double e = s.mvp_energy();
            e_seen_min = std::min(e_seen_min, e);
            e_seen_max = std::max(e_seen_max, e);
            if (std::abs(e - E_target) <= opts.energy_tol) return std::move(s);
            if ((e < E_target) == lo_below) {
                lo = mid;
                warm_lo = s.psi;
            } else {
                hi = mid;
            }
        }
        return std::nullopt;
    };

    for (int i = 0; i + 1 < n; ++i) {
        if (!conv[i]) continue;
        double di = energy[i] - E_target;
        if (std::abs(di) <= opts.energy_tol) continue; // already a root
        if (!conv[i + 1]) {
            // branch still below target when it hit the wall: the root, if it
            // exists on this mesh, sits between here and the wall
            if (di < 0.0)
                if (auto s = bisect(lam[i], lam[i + 1], psis[i], true))
                    note(std::move(*s));
            continue;
        }
        double dj = energy[i + 1] - E_target;
        if (std::abs(dj) <= opts.energy_tol) continue;
        if (di * dj < 0.0)
            if (auto s = bisect(lam[i], lam[i + 1], psis[i], di < 0.0))
                note(std::move(*s));
    }

    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        return a.first.lambda < b.first.lambda;
    });
    for (const auto& h : hits) res.roots.push_back(h.first);
    if (!hits.empty()) {
        res.primary = 0; // smallest-lambda root is the documented tie-break
        res.solution = std::move(hits.front().second);
        res.found = true;
        res.status = "ok";
        return res;
    }

    std::ostringstream os;
    os.precision(12);
    if (!std::isfinite(e_seen_min)) {
        os << "no canonical solve converged on [" << lam_lo << ", " << lam_hi << "]";
    } else if (E_target > e_seen_max) {
        os << "target energy " << E_target << " exceeds the largest energy "
           << e_seen_max << " reached on this mesh";
        if (hit_wall)
            os << " before the canonical solves stopped converging (saturation "
               << "near the blow-up threshold or a Type II window)";
        else
            os << " at lambda_max = " << lam_hi << "; widen the bracket";
    } else if (E_target < e_seen_min) {
        os << "target energy " << E_target << " lies below the smallest energy "
           << e_seen_min << " on the scanned branch (no maximizer there)";
    } else {
        os << "no sign change of E(lambda) - target on the scan grid";
    }
    res.status = os.str();
    return res;
}

DomainTypeReport classify_domain_type(const MeshPtr& mesh, double sigma, double eps,
                                      const std::vector<double>& E_grid,
                                      const MvpOptions& opts) {
    require_config(!E_grid.empty(), "classify_domain_type: empty energy grid");
    for (std::size_t k = 0; k < E_grid.size(); ++k) {
        require_config(std::isfinite(E_grid[k]),
                       "classify_domain_type: non-finite energy");
        if (k)
            require_config(E_grid[k] >= E_grid[k - 1],
                           "classify_domain_type: energy grid must be increasing");
    }

    const double thr = lambda_sigma(sigma);
    DomainTypeReport rep;
    bool all_found = true, any_at_or_above = false;
    for (double e : E_grid) {
        MvpResult r = solve_mvp(mesh, sigma, eps, e, opts);
        TypeEvidence ev;
        ev.E = e;
        ev.has_root = r.found;
        if (r.found) {
            ev.lambda = r.roots[r.primary].lambda;
            ev.below_threshold = ev.lambda < thr;
            any_at_or_above = any_at_or_above || !ev.below_threshold;
        } else {
            all_found = false;
        }
        rep.table.push_back(ev);
    }
    if (!all_found)
        rep.verdict = DomainType::Inconclusive;
    else
        rep.verdict = any_at_or_above ? DomainType::TypeII : DomainType::TypeI;
    return rep;
}

RegLimitReport mvp_regularization_limit(const MeshPtr& mesh, double sigma,
                                        double E_target,
                                        const std::vector<double>& eps_seq,
                                        const MvpOptions& opts) {
    require_config(mesh != nullptr, "mvp_regularization_limit: null mesh");
    require_config(!eps_seq.empty(), "mvp_regularization_limit: empty eps sequence");
    for (std::size_t k = 0; k < eps_seq.size(); ++k) {
        require_config(eps_seq[k] > 0.0, "mvp_regularization_limit: eps must be > 0");
        if (k)
            require_config(eps_seq[k] < eps_seq[k - 1],
                           "mvp_regularization_limit: eps sequence must decrease");
    }

    RegLimitReport rep;
    rep.complete = true;
    std::vector<double> prev_rho;
    double prev_lambda = 0.0;
    int ok_count = 0;
    for (double e : eps_seq) {
        RegLimitSample s;
        s.eps = e;
        MvpResult r = solve_mvp(mesh, sigma, e, E_target, opts);
        s.ok = r.found;
        if (r.found) {
            s.lambda = r.roots[r.primary].lambda;
            s.entropy = r.roots[r.primary].entropy;
            if (ok_count > 0) {
                s.lambda_delta = std::abs(s.lambda - prev_lambda);
                double l1 = 0.0;
                for (std::size_t i = 0; i < mesh->size(); ++i)
                    l1 += mesh->weight[i] * std::abs(r.solution.rho[i] - prev_rho[i]);
                s.rho_l1_delta = l1;
            }
            prev_lambda = s.lambda;
            prev_rho = r.solution.rho.v;
            ++ok_count;
        } else {
            rep.complete = false;
        }
        rep.samples.push_back(s);
    }

    // deltas (skipping each sequence head, whose delta is undefined) must not
    // grow as eps shrinks
    std::vector<std::array<double, 2>> deltas;
    int seen = 0;
    for (const auto& s : rep.samples) {
        if (!s.ok) continue;
        if (seen >= 1) deltas.push_back({s.lambda_delta, s.rho_l1_delta});
        ++seen;
    }
    rep.cauchy = !deltas.empty();
    for (std::size_t k = 1; k < deltas.size(); ++k)
        if (deltas[k][0] > deltas[k - 1][0] || deltas[k][1] > deltas[k - 1][1])
            rep.cauchy = false;
    return rep;
}

} // namespace vmf
