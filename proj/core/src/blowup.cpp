#include "vortexmf/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "vortexmf/bubble.hpp"
#include "vortexmf/disk_exact.hpp"
#include "vortexmf/errors.hpp"
#include "vortexmf/microcanonical.hpp"

namespace vmf {

namespace {

constexpr double PI = 3.14159265358979323846;

// Per-cell masses of H e^v with H = (eps^2+|x|^2)^a e^{log_k}. Radial meshes
// with the bare power weight get exact cell moments; everything else is nodal.
std::vector<double> he_cell_masses(const ScalarField& f, double a, double eps,
                                   double log_k) {
    const DomainMesh& m = *f.mesh;
    std::vector<double> mass(m.size());
    if (m.kind == MeshKind::DiskRadial && eps == 0.0 && a != 0.0) {
        std::vector<double> pw = power_cell_weights(m, 2.0 * a);
        for (std::size_t i = 0; i < m.size(); ++i)
            mass[i] = pw[i] * std::exp(log_k + f.v[i]);
        return mass;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        double q = eps * eps + m.x[i] * m.x[i] + m.y[i] * m.y[i];
        double H = (q > 0.0) ? std::pow(q, a) : (a > 0.0 ? 0.0 : 1.0);
        mass[i] = m.weight[i] * H * std::exp(log_k + f.v[i]);
    }
    return mass;
}

// int H e^v and its lambda-derivative at exponent a = sigma*lambda/(4 pi).
struct MassEval {
    double total = 0.0;
    double dtotal = 0.0; // d total / d lambda
};

MassEval eval_mass(const ScalarField& f, double sigma, double lambda, double eps,
                   double log_k) {
    const DomainMesh& m = *f.mesh;
    const double a = sigma * lambda / (4.0 * PI);
    MassEval out;
    if (m.kind == MeshKind::DiskRadial && eps == 0.0 && a != 0.0) {
        std::vector<double> pw = power_cell_weights(m, 2.0 * a);
        std::vector<double> pwl = power_log_cell_weights(m, 2.0 * a);
        for (std::size_t i = 0; i < m.size(); ++i) {
            double e = std::exp(log_k + f.v[i]);
            out.total += pw[i] * e;
            out.dtotal += 2.0 * pwl[i] * e;
        }
        out.dtotal *= sigma / (4.0 * PI);
        return out;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        double q = eps * eps + m.x[i] * m.x[i] + m.y[i] * m.y[i];
        if (q <= 0.0) {
            if (a <= 0.0) out.total += m.weight[i] * std::exp(log_k + f.v[i]);
            continue; // a > 0: the bare weight vanishes at the origin
        }
        double he = std::pow(q, a) * std::exp(log_k + f.v[i]);
        out.total += m.weight[i] * he;
        out.dtotal += m.weight[i] * he * std::log(q);
    }
    out.dtotal *= sigma / (4.0 * PI);
    return out;
}

// Self-consistent member mass: lambda = int (eps^2+|x|^2)^{sigma lambda/4pi}
// e^{log_k+v}. Damped Newton; the hint seeds the iteration (the fixed point
// need not be unique for sigma < 0 near the integrable limit).
double solve_lambda(const ScalarField& f, double sigma, double eps, double log_k,
                    double hint) {
    if (sigma == 0.0) return eval_mass(f, 0.0, 0.0, eps, log_k).total;

    double cap = std::numeric_limits<double>::infinity();
    if (eps == 0.0 && sigma < 0.0) cap = 4.0 * PI / -sigma * (1.0 - 1e-9);

    double lam = hint > 0.0 ? hint : eval_mass(f, sigma, 0.0, eps, log_k).total;
    if (lam >= cap) lam = 0.5 * cap;
    require_config(std::isfinite(lam) && lam > 0.0,
                   "make_member: field carries no usable mass");

    for (int it = 0; it < 200; ++it) {
        MassEval me = eval_mass(f, sigma, lam, eps, log_k);
        double F = lam - me.total;
        if (std::abs(F) <= 1e-12 * std::max(1.0, lam)) return lam;
        double dF = 1.0 - me.dtotal;
        double next = (std::abs(dF) > 1e-12) ? lam - F / dF : lam - F;
        if (!std::isfinite(next) || next <= 0.0) next = 0.5 * lam;
        if (next >= cap) next = 0.5 * (lam + cap);
        if (std::abs(next - lam) <= 1e-13 * std::max(1.0, lam)) return next;
        lam = next;
    }
    throw divergence_error(
        "make_member: self-consistent mass iteration did not converge "
        "(exponent feedback too strong; pass a lambda hint)");
}

double aitken_limit(const std::vector<double>& seq) {
    double fallback = seq.back();
    if (seq.size() < 3) return fallback;
    std::size_t n = seq.size();
    double d1 = seq[n - 2] - seq[n - 3];
    double d2 = seq[n - 1] - seq[n - 2];
    double den = d2 - d1;
    if (std::abs(den) < 1e-14 * std::max(1.0, std::abs(seq[n - 1]))) return fallback;
    double acc = seq[n - 1] - d2 * d2 / den;
    if (!std::isfinite(acc) || std::abs(acc - fallback) > 0.2 * std::max(1.0, std::abs(fallback)))
        return fallback;
    return acc;
}

// Quadratic (3-point Lagrange) value and derivative at radius from the nodal
// radial samples.
struct RadialProbe {
    double value = 0.0;
    double deriv = 0.0;
};

RadialProbe probe_radial(const DomainMesh& m, const std::vector<double>& v,
                         double radius) {
    const std::vector<double>& r = m.r;
    std::size_t n = r.size();
    auto it = std::upper_bound(r.begin(), r.end(), radius);
    std::size_t k = (it == r.begin()) ? 0 : std::size_t(it - r.begin()) - 1;
    if (k == 0) k = 1;
    if (k + 1 >= n) k = n - 2;
    double x0 = r[k - 1], x1 = r[k], x2 = r[k + 1];
    double y0 = v[k - 1], y1 = v[k], y2 = v[k + 1];
    double l0 = (radius - x1) * (radius - x2) / ((x0 - x1) * (x0 - x2));
    double l1 = (radius - x0) * (radius - x2) / ((x1 - x0) * (x1 - x2));
    double l2 = (radius - x0) * (radius - x1) / ((x2 - x0) * (x2 - x1));
    double d0 = (2.0 * radius - x1 - x2) / ((x0 - x1) * (x0 - x2));
    double d1 = (2.0 * radius - x0 - x2) / ((x1 - x0) * (x1 - x2));
    double d2 = (2.0 * radius - x0 - x1) / ((x2 - x0) * (x2 - x1));
    return {y0 * l0 + y1 * l1 + y2 * l2, y0 * d0 + y1 * d1 + y2 * d2};
}

// Bulk Pohozaev integral 2 pi int_0^R (2W + sW')(s) e^{v(s)} s ds.
double pohozaev_bulk_radial(const FamilyMember& mem, double R) {
    const DomainMesh& m = *mem.v.mesh;
    const double a = mem.alpha;
    if (mem.eps == 0.0) {
        // (2W + sW') = (2+2a) e^{log_k} s^{2a}: exact power moments, partial
        // last cell in closed form.
        std::vector<double> pw = power_cell_weights(m, 2.0 * a);
        double acc = 0.0;
        double q = 2.0 * a + 2.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            double lo = (i == 0) ? 0.0 : m.rhalf[i - 1];
            double hi = (i + 1 == m.size()) ? m.r.back() : m.rhalf[i];
            if (hi <= R) {
                acc += pw[i] * std::exp(mem.log_k + mem.v.v[i]);
                continue;
            }
            if (lo < R)
                acc += 2.0 * PI * (std::pow(R, q) - std::pow(lo, q)) / q *
                       std::exp(mem.log_k + mem.v.v[i]);
            break;
        }
        return (2.0 + 2.0 * a) * acc;
    }
    // Smooth integrand: trapezoid over the nodes plus the partial segment.
    auto integrand = [&](double s, double vs) {
        double w = mem.eps * mem.eps + s * s;
        double t = 2.0 * std::pow(w, a - 1.0) *
                   (mem.eps * mem.eps + (1.0 + a) * s * s);
        return 2.0 * PI * s * t * std::exp(mem.log_k + vs);
    };
    double acc = 0.0;
    std::size_t i = 0;
    for (; i + 1 < m.size() && m.r[i + 1] <= R; ++i)
        acc += 0.5 * (m.r[i + 1] - m.r[i]) *
               (integrand(m.r[i], mem.v.v[i]) + integrand(m.r[i + 1], mem.v.v[i + 1]));
    if (i + 1 < m.size() && m.r[i] < R) {
        RadialProbe p = probe_radial(m, mem.v.v, R);
        acc += 0.5 * (R - m.r[i]) * (integrand(m.r[i], mem.v.v[i]) + integrand(R, p.value));
    }
    return acc;
}

struct GridPatch {
    double value = 0.0;
    double gx = 0.0, gy = 0.0;
};

// Bilinear value and in-patch gradient of a grid field at (px, py).
GridPatch probe_grid(const DomainMesh& m, const std::vector<double>& v, double px,
                     double py) {
    int i = int(std::floor((px - m.gx0) / m.h));
    int j = int(std::floor((py - m.gy0) / m.h));
    i = std::max(0, std::min(m.nx - 2, i));
    j = std::max(0, std::min(m.ny - 2, j));
    double xi = (px - (m.gx0 + i * m.h)) / m.h;
    double et = (py - (m.gy0 + j * m.h)) / m.h;
    double v00 = v[m.grid_id(i, j)], v10 = v[m.grid_id(i + 1, j)];
    double v01 = v[m.grid_id(i, j + 1)], v11 = v[m.grid_id(i + 1, j + 1)];
    GridPatch p;
    p.value = v00 * (1 - xi) * (1 - et) + v10 * xi * (1 - et) + v01 * (1 - xi) * et +
              v11 * xi * et;
    p.gx = ((v10 - v00) * (1 - et) + (v11 - v01) * et) / m.h;
    p.gy = ((v01 - v00) * (1 - xi) + (v11 - v10) * xi) / m.h;
    return p;
}

double grid_half_extent(const DomainMesh& m) {
    double xmax = m.gx0 + (m.nx - 1) * m.h;
    double ymax = m.gy0 + (m.ny - 1) * m.h;
    return std::min(std::min(-m.gx0, xmax), std::min(-m.gy0, ymax));
}

double pointwise_weight(const FamilyMember& mem, double x, double y) {
    double q = mem.eps * mem.eps + x * x + y * y;
    if (q <= 0.0) return mem.alpha > 0.0 ? 0.0 : (mem.alpha == 0.0 ? std::exp(mem.log_k)
                                                                   : std::numeric_limits<double>::infinity());
    return std::pow(q, mem.alpha) * std::exp(mem.log_k);
}

// Stable log(1 + e^u).
double log1p_exp(double u) { return u > 30.0 ? u : std::log1p(std::exp(u)); }

struct ProfileFit {
    double log_b = 0.0;
    double residual = 0.0;
    std::size_t points = 0;
};

// One-parameter least squares of v against the concentration profile
//   v(s) = sup_v - 2 log(1 + B s^L),  L = lambda/(4 pi)
// over the annulus that drops the two cells nearest the peak and the outer
// 10% of the domain.
ProfileFit fit_log_model(const FamilyMember& mem) {
    const DomainMesh& m = *mem.v.mesh;
    const double L = mem.lambda / (4.0 * PI);
    double xc = m.x[mem.max_node], yc = m.y[mem.max_node];

    std::vector<std::pair<double, double>> pts; // (log s, v)
    if (m.kind == MeshKind::DiskRadial) {
        for (std::size_t i = 2; i < m.size(); ++i)
            if (m.r[i] <= 0.9) pts.emplace_back(std::log(m.r[i]), mem.v.v[i]);
    } else {
        double dom = 0.9 * grid_half_extent(m);
        for (std::size_t i = 0; i < m.size(); ++i) {
            double s = std::hypot(m.x[i] - xc, m.y[i] - yc);
            if (s < 2.0 * m.h) continue;
            if (std::max(std::abs(m.x[i]), std::abs(m.y[i])) > dom) continue;
            pts.emplace_back(std::log(s), mem.v.v[i]);
        }
    }
    ProfileFit fit;
    fit.points = pts.size();
    if (pts.size() < 8) {
        fit.residual = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }

    // Far-field seed: v ~ sup - 2 log B - 2 L log s on the outer quarter.
    std::sort(pts.begin(), pts.end());
    double b0 = 0.0;
    std::size_t q0 = pts.size() - pts.size() / 4;
    for (std::size_t i = q0; i < pts.size(); ++i)
        b0 += 0.5 * (mem.sup_v - pts[i].second) - L * pts[i].first;
    b0 /= double(pts.size() - q0);

    auto misfit = [&](double b) {
        double acc = 0.0;
        for (const auto& p : pts) {
            double r = p.second - (mem.sup_v - 2.0 * log1p_exp(b + L * p.first));
            acc += r * r;
        }
        return acc;
    };
    // Golden-section on a generous bracket around the seed.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = b0 - 12.0, hi = b0 + 12.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = misfit(x1), f2 = misfit(x2);
    for (int it = 0; it < 120; ++it) {
        if (f1 <= f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo); f1 = misfit(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo); f2 = misfit(x2);
        }
    }
    fit.log_b = 0.5 * (lo + hi);
    for (const auto& p : pts)
        fit.residual = std::max(
            fit.residual,
            std::abs(p.second - (mem.sup_v - 2.0 * log1p_exp(fit.log_b + L * p.first))));
    return fit;
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

} // namespace

FamilyMember make_member(ScalarField v, double sigma, double eps, double log_k,
                         double lambda_hint) {
    require_config(v.mesh != nullptr, "make_member: field has no mesh");
    const DomainMesh& m = *v.mesh;
    require_config(v.v.size() == m.size(), "make_member: field size mismatch");
    require_config(std::isfinite(sigma) && std::isfinite(log_k),
                   "make_member: sigma and log_k must be finite");
    require_config(std::isfinite(eps) && eps >= 0.0, "make_member: eps must be >= 0");
    require_config(std::isfinite(lambda_hint) && lambda_hint >= 0.0,
                   "make_member: lambda_hint must be >= 0");
    for (double x : v.v)
        require_config(std::isfinite(x), "make_member: field values must be finite");
    if (m.kind == MeshKind::Grid2D && eps == 0.0 && sigma < 0.0)
        throw domain_error(
            "make_member: sigma < 0 with eps = 0 needs the radial mesh "
            "(singular cell moments are only exact there)");

    FamilyMember out;
    out.eps = eps;
    out.sigma = sigma;
    out.log_k = log_k;
    out.lambda = solve_lambda(v, sigma, eps, log_k, lambda_hint);
    out.alpha = sigma * out.lambda / (4.0 * PI);
    require_domain(out.alpha > -1.0,
                   "make_member: weight exponent at or below -1 (non-integrable)");

    std::size_t k = 0;
    for (std::size_t i = 1; i < m.size(); ++i)
        if (v.v[i] > v.v[k]) k = i;
    out.max_node = int(k);
    out.sup_v = v.v[k];
    out.x_norm = std::hypot(m.x[k], m.y[k]);
    out.delta = std::exp(-out.sup_v / (2.0 * (1.0 + out.alpha)));
    out.t = std::max(out.x_norm, out.delta);

    double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.boundary[i]) {
            bmin = std::min(bmin, v.v[i]);
            bmax = std::max(bmax, v.v[i]);
        }
    out.boundary_osc = (bmax >= bmin) ? bmax - bmin : 0.0;
    out.v = std::move(v);
    return out;
}

std::vector<double> concentration_mass(const FamilyMember& m,
                                       const std::vector<double>& radii) {
    require_config(m.v.mesh != nullptr, "concentration_mass: member has no mesh");
    require_config(!radii.empty(), "concentration_mass: radii must be non-empty");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        require_config(std::isfinite(radii[i]) && radii[i] > 0.0,
                       "concentration_mass: radii must be positive");
        if (i) require_config(radii[i] > radii[i - 1],
                              "concentration_mass: radii must be increasing");
    }
    std::vector<double> mass = he_cell_masses(m.v, m.alpha, m.eps, m.log_k);
    const DomainMesh& mesh = *m.v.mesh;
    // Balls follow the concentration point: on grids they are centered at the
    // member's peak (the finite-n stand-in for x_n -> 0), on radial meshes at
    // the origin, which is where radial families peak anyway.
    double xc = 0.0, yc = 0.0;
    if (mesh.kind == MeshKind::Grid2D && m.max_node >= 0) {
        xc = mesh.x[std::size_t(m.max_node)];
        yc = mesh.y[std::size_t(m.max_node)];
    }
    // Cells contribute to every ball whose radius reaches their node.
    std::vector<double> bucket(radii.size(), 0.0);
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        double s = std::hypot(mesh.x[i] - xc, mesh.y[i] - yc);
        auto it = std::lower_bound(radii.begin(), radii.end(), s);
        if (it != radii.end()) bucket[std::size_t(it - radii.begin())] += mass[i];
    }
    std::vector<double> out(radii.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
        acc += bucket[j];
        out[j] = acc;
    }
    return out;
}

ConcentrationEstimate concentration_beta(const FamilyMember& m,
                                         const std::vector<double>& radii,
                                         double plateau_tol) {
    require_config(radii.size() >= 2, "concentration_beta: need at least 2 radii");
    require_config(plateau_tol > 0.0, "concentration_beta: plateau_tol must be > 0");
    std::vector<double> mass = concentration_mass(m, radii);

    ConcentrationEstimate est;
    est.interval = {mass.front(), mass.back()};
    for (std::size_t i = 0; i < radii.size(); ++i) {
        // the doubled radius, if the list contains it
        for (std::size_t j = i + 1; j < radii.size(); ++j) {
            if (std::abs(radii[j] - 2.0 * radii[i]) > 1e-9 * radii[i]) continue;
            if (mass[j] - mass[i] < plateau_tol) {
                est.plateau_found = true;
                est.r_plateau = radii[i];
                est.beta = 0.5 * (mass[i] + mass[j]);
                return est;
            }
            break;
        }
    }
    est.beta = 0.5 * (est.interval[0] + est.interval[1]);
    return est;
}

QuantizationWindow quantization_window(double sigma, double lambda_inf) {
    require_config(std::isfinite(sigma), "quantization_window: sigma must be finite");
    require_config(std::isfinite(lambda_inf) && lambda_inf > 0.0,
                   "quantization_window: lambda_inf must be > 0");
    QuantizationWindow w;
    if (sigma < 0.0) {
        w.lower = 8.0 * PI / (1.0 + 2.0 * -sigma);
        w.upper = 8.0 * PI;
        w.hypotheses_ok = lambda_inf < 4.0 * PI / -sigma;
        w.note = w.hypotheses_ok
                     ? "sigma < 0: admissible masses fill [8 pi/(1+2|sigma|), 8 pi]"
                     : "sigma < 0 with lambda_inf >= 4 pi/|sigma|: outside the "
                       "integrable range, window hypotheses fail";
    } else if (sigma == 0.0) {
        w.lower = w.upper = 8.0 * PI;
        w.hypotheses_ok = true;
        w.note = "sigma = 0: regular quantization at 8 pi";
    } else if (sigma <= 0.5) {
        w.lower = 8.0 * PI;
        double u = 4.0 * PI / sigma;
        if (sigma < 0.5) u = std::min(u, 8.0 * PI / (1.0 - 2.0 * sigma));
        w.upper = u;
        w.hypotheses_ok = lambda_inf <= 4.0 * PI / sigma;
        w.note = w.hypotheses_ok
                     ? "sigma in (0, 1/2]: admissible masses fill "
                       "[8 pi, min{8 pi/(1-2 sigma), 4 pi/sigma}]"
                     : "lambda_inf > 4 pi/sigma: blow-up without concentration "
                       "regime, window hypotheses fail";
    } else {
        w.hypotheses_ok = false;
        w.note = "sigma > 1/2: solutions stay bounded near the vortex, no "
                 "concentration window";
    }
    return w;
}

HomogeneousMass homogeneous_quantized_mass(double sigma_j, double lambda_inf, int m) {
    require_config(std::isfinite(sigma_j), "homogeneous mass: sigma_j must be finite");
    require_config(std::isfinite(lambda_inf) && lambda_inf > 0.0,
                   "homogeneous mass: lambda_inf must be > 0");
    require_config(m >= 1, "homogeneous mass: m must be a positive integer");
    HomogeneousMass out;
    if (sigma_j >= 0.5) {
        out.bounded_above = true; // uniformly bounded from above near the vortex
        return out;
    }
    out.per_point_mass = 8.0 * PI * (1.0 + lambda_inf * sigma_j / (4.0 * PI));
    out.lambda_inf = 8.0 * PI * m / (1.0 - 2.0 * sigma_j);
    return out;
}

double pohozaev_residual(const FamilyMember& mem, double radius) {
    require_config(mem.v.mesh != nullptr, "pohozaev: member has no mesh");
    const DomainMesh& m = *mem.v.mesh;
    require_config(std::isfinite(radius) && radius > 0.0,
                   "pohozaev: radius must be > 0");

    double lhs, boundary_term;
    if (m.kind == MeshKind::DiskRadial) {
        require_config(radius < m.r.back(), "pohozaev: radius must be inside the disk");
        RadialProbe p = probe_radial(m, mem.v.v, radius);
        lhs = -PI * radius * radius * p.deriv * p.deriv;
        boundary_term = 2.0 * PI * radius * radius *
                        pointwise_weight(mem, radius, 0.0) * std::exp(p.value);
        double rhs = boundary_term - pohozaev_bulk_radial(mem, radius);
        return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
    }

    require_config(radius < 0.95 * grid_half_extent(m),
                   "pohozaev: contour radius too close to the grid boundary");
    int M = std::max(256, 4 * int(std::ceil(2.0 * PI * radius / m.h)));
    double dtheta = 2.0 * PI / M;
    lhs = 0.0;
    boundary_term = 0.0;
    for (int j = 0; j < M; ++j) {
        double th = (j + 0.5) * dtheta;
        double px = radius * std::cos(th), py = radius * std::sin(th);
        GridPatch p = probe_grid(m, mem.v.v, px, py);
        double g2 = p.gx * p.gx + p.gy * p.gy;
        double vn = (p.gx * px + p.gy * py) / radius;
        lhs += 0.5 * g2 - vn * vn;
        boundary_term += pointwise_weight(mem, px, py) * std::exp(p.value);
    }
    lhs *= radius * radius * dtheta;
    boundary_term *= radius * radius * dtheta;

    double bulk = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double s2 = m.x[i] * m.x[i] + m.y[i] * m.y[i];
        if (s2 > radius * radius) continue;
        double q = mem.eps * mem.eps + s2;
        double t = (q > 0.0) ? 2.0 * std::pow(q, mem.alpha - 1.0) *
                                   (mem.eps * mem.eps + (1.0 + mem.alpha) * s2)
                             : 0.0;
        bulk += m.weight[i] * t * std::exp(mem.log_k + mem.v.v[i]);
    }
    double rhs = boundary_term - bulk;
    return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

std::vector<double> sup_plus_cinf_values(const SolutionFamily& f,
                                         double compact_radius, double C0) {
    require_config(!f.members.empty(), "sup+inf: family is empty");
    require_config(compact_radius > 0.0, "sup+inf: compact_radius must be > 0");
    double alpha_inf = f.members.back().alpha;
    require_config(alpha_inf > -1.0 && alpha_inf < 1.0,
                   "sup+inf: alpha_inf must lie in (-1, 1)");
    double c_min = std::max(1.0, (1.0 + alpha_inf) / (1.0 - alpha_inf));
    if (!(C0 > c_min)) {
        std::ostringstream os;
        os << "sup+inf: C0 = " << C0 << " must exceed max{1, (1+alpha)/(1-alpha)} = "
           << c_min << " at alpha_inf = " << alpha_inf;
        throw config_error(os.str());
    }
    std::vector<double> out;
    out.reserve(f.members.size());
    for (const FamilyMember& mem : f.members) {
        const DomainMesh& m = *mem.v.mesh;
        double sup = -std::numeric_limits<double>::infinity();
        double inf = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m.size(); ++i) {
            inf = std::min(inf, mem.v.v[i]);
            if (std::hypot(m.x[i], m.y[i]) <= compact_radius)
                sup = std::max(sup, mem.v.v[i]);
        }
        out.push_back(sup + C0 * inf);
    }
    return out;
}

double sup_plus_cinf_check(const SolutionFamily& f, double compact_radius, double C0) {
    std::vector<double> vals = sup_plus_cinf_values(f, compact_radius, C0);
    return *std::max_element(vals.begin(), vals.end());
}

BlowupReport classify_profile(const SolutionFamily& f, const ClassifyOptions& opts) {
    require_config(f.members.size() >= 2, "classify_profile: need at least 2 members");
    require_config(opts.ratio_threshold > 1.0,
                   "classify_profile: ratio_threshold must exceed 1");
    for (const FamilyMember& mem : f.members)
        require_config(std::abs(mem.sigma - f.sigma) <= 1e-12,
                       "classify_profile: member sigma differs from the family sigma");

    BlowupReport rep;
    std::ostringstream notes;
    const auto& mem = f.members;

    std::vector<double> sups, deltas;
    for (const FamilyMember& m : mem) {
        rep.lambdas.push_back(m.lambda);
        rep.eps_over_t.push_back(m.eps / m.t);
        rep.x_over_delta.push_back(m.x_norm / m.delta);
        sups.push_back(m.sup_v);
        deltas.push_back(m.delta);
        double r_poho = 0.8;
        if (m.v.mesh->kind == MeshKind::Grid2D)
            r_poho = std::min(r_poho, 0.9 * grid_half_extent(*m.v.mesh));
        rep.pohozaev.push_back(pohozaev_residual(m, r_poho));
    }

    rep.lambda_inf = aitken_limit(rep.lambdas);
    rep.beta = concentration_beta(mem.back(), opts.radii, opts.plateau_tol).beta;
    rep.eps0 = mem.back().eps / mem.back().delta;

    bool blowing_up = strictly_increasing(sups);
    for (std::size_t i = 1; blowing_up && i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1])) blowing_up = false;

    auto to_infinity = [&](const std::vector<double>& v) {
        return strictly_increasing(v) && v.back() > opts.ratio_threshold;
    };
    auto bounded = [&](const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end()) <= opts.ratio_threshold;
    };

    if (!blowing_up) {
        rep.label = BlowupCase::None;
        notes << "no blow-up trend (sup v_n not increasing against delta_n); ";
    } else if (to_infinity(rep.eps_over_t)) {
        rep.label = BlowupCase::I;
    } else if (bounded(rep.eps_over_t) && to_infinity(rep.x_over_delta)) {
        rep.label = BlowupCase::II;
    } else if (bounded(rep.eps_over_t) && bounded(rep.x_over_delta)) {
        rep.label = BlowupCase::III;
    } else {
        rep.label = BlowupCase::None;
        notes << "mixed ratio diagnostics, no clean trichotomy case; ";
    }

    rep.window = quantization_window(f.sigma, std::max(rep.lambda_inf, 1e-300));
    rep.in_window = rep.window.hypotheses_ok &&
                    rep.lambda_inf >= rep.window.lower * 0.97 &&
                    rep.lambda_inf <= rep.window.upper * 1.03;

    if (f.sigma == 0.5)
        notes << "open-regime: sigma = 1/2 is left open by the theory; ";
    else if (f.sigma >= 0.25 && f.sigma < 0.5 &&
             std::abs(rep.lambda_inf - 4.0 * PI / f.sigma) <=
                 0.03 * 4.0 * PI / f.sigma)
        notes << "open-regime: lambda_inf sits at the 4 pi/sigma endpoint; ";
    if (f.sigma > 0.0 && rep.lambda_inf > 4.0 * PI / f.sigma * 1.03)
        notes << "blow-up without concentration regime (lambda_inf > 4 pi/sigma), "
                 "flagged only; ";

    if (rep.label != BlowupCase::None) {
        ProfileFit fit = fit_log_model(mem.back());
        rep.fit_exponent = mem.back().lambda / (4.0 * PI);
        rep.fit_log_b = fit.log_b;
        rep.fit_residual = fit.residual;
    }

    double osc = 0.0;
    for (const FamilyMember& m : mem) osc = std::max(osc, m.boundary_osc);
    notes << "max boundary oscillation " << osc;
    rep.notes = notes.str();
    return rep;
}

bool ls_decay_check(const FamilyMember& m, double d, double C,
                    double outer_mass_fraction) {
    require_config(m.v.mesh != nullptr, "ls_decay_check: member has no mesh");
    require_config(d > 0.0 && 4.0 * d < 1.0,
                   "ls_decay_check: need 0 < 4d < 1 for a non-empty annulus");
    require_config(outer_mass_fraction > 0.0 && outer_mass_fraction <= 1.0,
                   "ls_decay_check: outer_mass_fraction must lie in (0, 1]");
    const DomainMesh& mesh = *m.v.mesh;
    double ap = 2.0 * (1.0 + m.alpha);
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        double s = std::hypot(mesh.x[i], mesh.y[i]);
        if (s < 4.0 * d || s > 1.0) continue;
        if (m.v.v[i] + ap * std::log(s) > C + 1e-12) return false;
    }
    std::vector<double> mass = he_cell_masses(m.v, m.alpha, m.eps, m.log_k);
    double outer = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i)
        if (std::hypot(mesh.x[i], mesh.y[i]) > 4.0 * d) outer += mass[i];
    return outer <= outer_mass_fraction * m.lambda;
}

EnergyTrend high_energy_divergence(const SolutionFamily& f) {
    require_config(f.members.size() >= 2,
                   "high_energy_divergence: need at least 2 members");
    EnergyTrend trend;
    for (const FamilyMember& m : f.members) {
        std::vector<double> mass = he_cell_masses(m.v, m.alpha, m.eps, m.log_k);
        double tot = 0.0;
        for (double x : mass) tot += x;
        require_config(tot > 0.0, "high_energy_divergence: member has no mass");
        ScalarField rho(m.v.mesh);
        for (std::size_t i = 0; i < mass.size(); ++i)
            rho[i] = mass[i] / (m.v.mesh->weight[i] * tot);
        trend.E.push_back(regularized_energy(rho, m.sigma, m.eps));
    }
    trend.increasing = strictly_increasing(trend.E);
    trend.ratio = trend.E.back() / trend.E.front();
    return trend;
}

// ---- planted families --------------------------------------------------------

SolutionFamily make_disk_blowup_family(double sigma,
                                       const std::vector<double>& lambda_fractions,
                                       int n_nodes) {
    require_config(!lambda_fractions.empty(), "disk family: no lambda fractions");
    for (std::size_t i = 0; i < lambda_fractions.size(); ++i) {
        require_config(lambda_fractions[i] > 0.0 && lambda_fractions[i] < 1.0,
                       "disk family: fractions must lie in (0, 1)");
        if (i) require_config(lambda_fractions[i] > lambda_fractions[i - 1],
                              "disk family: fractions must be increasing");
    }
    MeshPtr mesh = build_disk_mesh(n_nodes, Grading::LogNearOrigin);
    SolutionFamily fam;
    fam.sigma = sigma;
    for (double frac : lambda_fractions) {
        double lam = frac * lambda_sigma(sigma);
        DiskSolution ds = disk_solution(sigma, lam);
        ScalarField v(mesh);
        for (std::size_t i = 0; i < mesh->size(); ++i) v[i] = ds.v(mesh->r[i]);
        fam.members.push_back(make_member(std::move(v), sigma, 0.0, 0.0, lam));
    }
    return fam;
}

SolutionFamily make_case1_family(double sigma, const std::vector<double>& t0s,
                                 const std::vector<double>& deltas, int n_nodes,
                                 double core_c) {
    require_config(!t0s.empty() && t0s.size() == deltas.size(),
                   "case I family: t0s and deltas must match and be non-empty");
    require_config(sigma > 0.0 && sigma < 0.5,
                   "case I family: sigma must lie in (0, 1/2)");
    require_config(std::isfinite(core_c), "case I family: core_c must be finite");
    for (std::size_t i = 0; i < t0s.size(); ++i) {
        require_config(t0s[i] > 0.0, "case I family: t0 must be > 0");
        require_config(deltas[i] > 0.0 && deltas[i] < 1.0,
                       "case I family: deltas must lie in (0, 1)");
        if (i) {
            require_config(t0s[i] >= t0s[i - 1],
                           "case I family: t0s must be non-decreasing");
            require_config(deltas[i] < deltas[i - 1],
                           "case I family: deltas must decrease");
        }
    }
    MeshPtr mesh = build_disk_mesh(n_nodes, Grading::LogNearOrigin);
    SolutionFamily fam;
    fam.sigma = sigma;
    for (std::size_t k = 0; k < t0s.size(); ++k) {
        double alpha = bubble_selfconsistent_alpha(sigma, t0s[k], core_c);
        BubbleSolution b = bubble_solve(alpha, t0s[k], core_c);
        double shift = 2.0 * (1.0 + alpha) * std::log(deltas[k]);
        ScalarField v(mesh);
        for (std::size_t i = 0; i < mesh->size(); ++i)
            v[i] = b.value(mesh->r[i] / deltas[k]) - shift;
        fam.members.push_back(
            make_member(std::move(v), sigma, t0s[k] * deltas[k], 0.0, b.mass));
    }
    return fam;
}

SolutionFamily make_case2_family(double sigma, const std::vector<double>& x_centers,
                                 const std::vector<double>& deltas, double eps_ratio,
                                 double grid_h) {
    require_config(!x_centers.empty() && x_centers.size() == deltas.size(),
                   "case II family: x_centers and deltas must match and be non-empty");
    require_config(sigma > 0.0 && sigma < 0.5,
                   "case II family: sigma must lie in (0, 1/2)");
    require_config(eps_ratio > 0.0 && eps_ratio <= 2.0,
                   "case II family: eps_ratio must lie in (0, 2]");
    require_config(grid_h > 0.0 && grid_h <= 0.05,
                   "case II family: grid_h must lie in (0, 0.05]");
    double cells = 1.1 / grid_h;
    require_config(std::abs(cells - std::round(cells)) < 1e-9,
                   "case II family: grid_h must divide the half-width 1.1");
    MeshPtr mesh = build_grid_mesh(2.2, 2.2, grid_h);

    const double alpha = 2.0 * sigma; // the limiting exponent at mass 8 pi
    SolutionFamily fam;
    fam.sigma = sigma;
    double prev_ratio = 0.0;
    for (std::size_t k = 0; k < x_centers.size(); ++k) {
        double xs = std::round(x_centers[k] / grid_h) * grid_h; // center on a node
        require_config(xs > 0.0 && xs <= 0.6,
                       "case II family: centers must lie in (0, 0.6]");
        double delta = deltas[k];
        require_config(delta > 0.0 && delta < xs,
                       "case II family: deltas must satisfy 0 < delta < |x_n|");
        double ratio = xs / delta;
        require_config(ratio > prev_ratio, "case II family: |x_n|/delta must increase");
        prev_ratio = ratio;

        double eps = eps_ratio * xs;
        double W = std::pow(eps * eps + xs * xs, alpha);
        double mu = std::sqrt(W / 8.0) / std::pow(delta, 1.0 + alpha);
        require_config(mu * grid_h <= 1.0 / 3.0,
                       "case II family: bubble core below the grid resolution; "
                       "increase delta or refine grid_h");
        ScalarField v(mesh);
        double peak = std::log(8.0 * mu * mu / W);
        for (std::size_t i = 0; i < mesh->size(); ++i) {
            double dx = mesh->x[i] - xs, dy = mesh->y[i];
            v[i] = peak - 2.0 * std::log1p(mu * mu * (dx * dx + dy * dy));
        }
        fam.members.push_back(make_member(std::move(v), sigma, eps, 0.0, 8.0 * PI));
    }
    return fam;
}

SolutionFamily make_case3_family(double sigma, double beta_tilde, double eps0,
                                 const std::vector<double>& deltas, int n_nodes) {
    require_config(sigma > 0.0 && sigma < 0.5,
                   "case III family: sigma must lie in (0, 1/2)");
    require_config(std::isfinite(eps0) && eps0 > 0.0,
                   "case III family: eps0 must be > 0");
    require_config(!deltas.empty(), "case III family: deltas must be non-empty");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        require_config(deltas[i] > 0.0 && deltas[i] < 1.0,
                       "case III family: deltas must lie in (0, 1)");
        if (i) require_config(deltas[i] < deltas[i - 1],
                              "case III family: deltas must decrease");
    }
    double upper = std::min(8.0 * PI / (1.0 - 2.0 * sigma), 4.0 * PI / sigma);
    require_config(beta_tilde > 8.0 * PI && beta_tilde < upper,
                   "case III family: beta_tilde must lie in the open window "
                   "(8 pi, min{8 pi/(1-2 sigma), 4 pi/sigma})");

    double alpha = sigma * beta_tilde / (4.0 * PI);
    BubbleSolution b = bubble_solve_for_mass(alpha, eps0, beta_tilde);
    MeshPtr mesh = build_disk_mesh(n_nodes, Grading::LogNearOrigin);
    SolutionFamily fam;
    fam.sigma = sigma;
    for (double delta : deltas) {
        double shift = 2.0 * (1.0 + alpha) * std::log(delta);
        ScalarField v(mesh);
        for (std::size_t i = 0; i < mesh->size(); ++i)
            v[i] = b.value(mesh->r[i] / delta) - shift;
        fam.members.push_back(
            make_member(std::move(v), sigma, eps0 * delta, 0.0, beta_tilde));
    }
    return fam;
}

} // namespace vmf
