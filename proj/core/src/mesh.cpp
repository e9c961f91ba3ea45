#include "vortexmf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace vmf {

namespace {
const double PI = 3.14159265358979323846;
const double INF = std::numeric_limits<double>::infinity();
} // namespace

double WeightSpec::a() const { return sigma * lambda / (4.0 * PI); }

void WeightSpec::validate() const {
    require_config(lambda >= 0.0, "weight: lambda must be >= 0");
    require_config(eps >= 0.0, "weight: eps must be >= 0");
    require_config(std::isfinite(sigma) && std::isfinite(lambda) && std::isfinite(eps),
                   "weight: parameters must be finite");
    if (sigma < 0.0 && eps == 0.0)
        require_domain(lambda < 4.0 * PI / std::fabs(sigma),
                       "weight: non-integrable (sigma < 0, eps = 0 needs lambda < 4pi/|sigma|)");
}

// ---------------------------------------------------------------------------
// grid operator: 5-point Laplacian over interior nodes, factored once
// ---------------------------------------------------------------------------

class GridPoissonOperator {
  public:
    void init(const DomainMesh& m) {
        interior_.assign(m.size(), -1);
        int k = 0;
        for (std::size_t i = 0; i < m.size(); ++i)
            if (!m.boundary[i]) interior_[i] = k++;
        n_int_ = k;
    }

    // -Delta_h psi = b (pointwise, interior entries of b), psi = 0 on boundary
    std::vector<double> solve_pointwise(const DomainMesh& m, const std::vector<double>& b) {
        ensure_factorized(m);
        Eigen::VectorXd rhs(n_int_);
        for (std::size_t id = 0; id < interior_.size(); ++id)
            if (interior_[id] >= 0) rhs[interior_[id]] = b[id];
        return scatter(m, solve(rhs), nullptr);
    }

    // -Delta_h u = 0 interior, u = g on the boundary
    std::vector<double> extend(const DomainMesh& m, const std::vector<double>& g) {
        ensure_factorized(m);
        double s = 1.0 / (m.h * m.h);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_int_);
        for (int j = 1; j < m.ny - 1; ++j) {
            for (int i = 1; i < m.nx - 1; ++i) {
                int row = interior_[std::size_t(m.grid_id(i, j))];
                const int nb[4] = {m.grid_id(i - 1, j), m.grid_id(i + 1, j),
                                   m.grid_id(i, j - 1), m.grid_id(i, j + 1)};
                for (int bid : nb)
                    if (m.boundary[std::size_t(bid)]) rhs[row] += s * g[std::size_t(bid)];
            }
        }
        return scatter(m, solve(rhs), &g);
    }

  private:
    void ensure_factorized(const DomainMesh& m) {
        std::lock_guard<std::mutex> lock(mu_);
        if (factorized_) return;
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(std::size_t(n_int_) * 5);
        double s = 1.0 / (m.h * m.h);
        for (int j = 1; j < m.ny - 1; ++j) {
            for (int i = 1; i < m.nx - 1; ++i) {
                int row = interior_[std::size_t(m.grid_id(i, j))];
                trips.emplace_back(row, row, 4.0 * s);
                const int nb[4] = {m.grid_id(i - 1, j), m.grid_id(i + 1, j),
                                   m.grid_id(i, j - 1), m.grid_id(i, j + 1)};
                for (int bid : nb) {
                    int col = interior_[std::size_t(bid)];
                    if (col >= 0) trips.emplace_back(row, col, -s);
                }
            }
        }
        Eigen::SparseMatrix<double> A(n_int_, n_int_);
        A.setFromTriplets(trips.begin(), trips.end());
        ldlt_.compute(A);
        require_domain(ldlt_.info() == Eigen::Success, "grid Poisson factorization failed");
        factorized_ = true;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        Eigen::VectorXd u = ldlt_.solve(rhs);
        require_domain(ldlt_.info() == Eigen::Success, "grid Poisson solve failed");
        return u;
    }

    std::vector<double> scatter(const DomainMesh& m, const Eigen::VectorXd& u,
                                const std::vector<double>* boundary_values) const {
        std::vector<double> out(m.size(), 0.0);
        for (std::size_t id = 0; id < interior_.size(); ++id) {
            if (interior_[id] >= 0)
                out[id] = u[interior_[id]];
            else if (boundary_values)
                out[id] = (*boundary_values)[id];
        }
        return out;
    }

    std::vector<int> interior_;
    int n_int_ = 0;
    bool factorized_ = false;
    std::mutex mu_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

// ---------------------------------------------------------------------------
// mesh builders
// ---------------------------------------------------------------------------

MeshPtr build_disk_mesh(int n_nodes, Grading grading, double r_min, double r_switch) {
    require_config(n_nodes >= 16, "disk mesh needs at least 16 nodes");
    require_config(r_min > 0.0 && r_min < 1.0, "disk mesh: r_min must lie in (0,1)");
    require_config(r_switch > r_min && r_switch < 1.0,
                   "disk mesh: r_switch must lie in (r_min, 1)");

    auto mesh = std::make_shared<DomainMesh>();
    mesh->kind = MeshKind::DiskRadial;
    std::size_t n = std::size_t(n_nodes);
    auto& r = mesh->r;
    r.assign(n, 0.0);

    if (grading == Grading::Uniform) {
        for (std::size_t i = 0; i < n; ++i) r[i] = double(i) / double(n - 1);
    } else {
        // geometric nodes on [r_min, r_switch] for half the interior, uniform
        // on (r_switch, 1] for the rest; node 0 stays at the origin
        std::size_t n_log = (n - 1) / 2;
        std::size_t n_uni = n - 1 - n_log;
        double q = std::pow(r_switch / r_min, 1.0 / double(n_log - 1));
        r[1] = r_min;
        for (std::size_t k = 2; k <= n_log; ++k) r[k] = r[k - 1] * q;
        r[n_log] = r_switch; // kill accumulated roundoff at the junction
        for (std::size_t j = 1; j <= n_uni; ++j)
            r[n_log + j] = r_switch + double(j) * (1.0 - r_switch) / double(n_uni);
    }
    r[n - 1] = 1.0;

    mesh->rhalf.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) mesh->rhalf[i] = 0.5 * (r[i] + r[i + 1]);

    mesh->x = r;
    mesh->y.assign(n, 0.0);
    mesh->boundary.assign(n, 0);
    mesh->boundary[n - 1] = 1;
    mesh->weight.resize(n);
    mesh->weight[0] = PI * mesh->rhalf[0] * mesh->rhalf[0];
    for (std::size_t i = 1; i + 1 < n; ++i)
        mesh->weight[i] = PI * (mesh->rhalf[i] * mesh->rhalf[i]
                                - mesh->rhalf[i - 1] * mesh->rhalf[i - 1]);
    mesh->weight[n - 1] = PI * (1.0 - mesh->rhalf[n - 2] * mesh->rhalf[n - 2]);
    mesh->area = PI;
    return mesh;
}

MeshPtr build_grid_mesh(double width, double height, double h,
                        std::array<double, 2> origin_offset) {
    require_config(width > 0.0 && height > 0.0 && h > 0.0,
                   "grid mesh: width, height, h must be positive");
    double fx = width / h, fy = height / h;
    int mx = int(std::lround(fx)), my = int(std::lround(fy));
    require_config(std::fabs(fx - mx) <= 1e-9 * std::max(1.0, fx) && mx >= 4,
                   "grid mesh: width must be an integer multiple (>= 4) of h");
    require_config(std::fabs(fy - my) <= 1e-9 * std::max(1.0, fy) && my >= 4,
                   "grid mesh: height must be an integer multiple (>= 4) of h");

    auto mesh = std::make_shared<DomainMesh>();
    mesh->kind = MeshKind::Grid2D;
    mesh->nx = mx + 1;
    mesh->ny = my + 1;
    mesh->h = h;

    // rectangle centered at origin_offset; the vortex (0,0) must land exactly
    // on an interior node
    double gx0 = origin_offset[0] - width / 2.0;
    double gy0 = origin_offset[1] - height / 2.0;
    double ix = -gx0 / h, iy = -gy0 / h;
    int i0 = int(std::lround(ix)), j0 = int(std::lround(iy));
    require_config(std::fabs(ix - i0) <= 1e-9 && std::fabs(iy - j0) <= 1e-9,
                   "grid mesh: the origin must coincide with a grid node");
    require_config(i0 > 0 && i0 < mesh->nx - 1 && j0 > 0 && j0 < mesh->ny - 1,
                   "grid mesh: the origin must be an interior node");
    // re-anchor so the origin node is exactly (0,0)
    mesh->gx0 = -double(i0) * h;
    mesh->gy0 = -double(j0) * h;
    mesh->origin_node = mesh->grid_id(i0, j0);

    std::size_t n = std::size_t(mesh->nx) * std::size_t(mesh->ny);
    mesh->x.resize(n);
    mesh->y.resize(n);
    mesh->weight.resize(n);
    mesh->boundary.assign(n, 0);
    for (int j = 0; j < mesh->ny; ++j) {
        double wy = (j == 0 || j == mesh->ny - 1) ? h / 2.0 : h;
        for (int i = 0; i < mesh->nx; ++i) {
            std::size_t id = std::size_t(mesh->grid_id(i, j));
            mesh->x[id] = double(i - i0) * h;
            mesh->y[id] = double(j - j0) * h;
            double wx = (i == 0 || i == mesh->nx - 1) ? h / 2.0 : h;
            mesh->weight[id] = wx * wy;
            if (i == 0 || i == mesh->nx - 1 || j == 0 || j == mesh->ny - 1)
                mesh->boundary[id] = 1;
        }
    }
    mesh->area = width * height;
    mesh->grid_op = std::make_shared<GridPoissonOperator>();
    mesh->grid_op->init(*mesh);
    return mesh;
}

// ---------------------------------------------------------------------------
// radial finite-volume solve (symmetric tridiagonal, Thomas)
// ---------------------------------------------------------------------------

namespace {

// flux coefficient between node i and i+1
inline double radial_flux_coeff(const DomainMesh& m, std::size_t i) {
    return 2.0 * PI * m.rhalf[i] / (m.r[i + 1] - m.r[i]);
}

// conservative form: sum of fluxes out of cell i equals mass[i]; the last
// node carries a Dirichlet value
std::vector<double> radial_solve_mass(const DomainMesh& m, const std::vector<double>& mass,
                                      double boundary_value) {
    std::size_t n = m.size();
    std::size_t ni = n - 1; // unknowns: nodes 0..n-2
    std::vector<double> diag(ni), upper(ni), rhs(ni);
    for (std::size_t i = 0; i < ni; ++i) {
        double cl = (i == 0) ? 0.0 : radial_flux_coeff(m, i - 1);
        double cr = radial_flux_coeff(m, i);
        diag[i] = cl + cr;
        upper[i] = -cr;
        rhs[i] = mass[i];
    }
    rhs[ni - 1] += radial_flux_coeff(m, ni - 1) * boundary_value;

    for (std::size_t i = 1; i < ni; ++i) { // symmetric: lower[i] = upper[i-1]
        double w = upper[i - 1] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> out(n, 0.0);
    out[n - 1] = boundary_value;
    out[ni - 1] = rhs[ni - 1] / diag[ni - 1];
    for (std::size_t i = ni - 1; i-- > 0;)
        out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];
    return out;
}

void check_field(const ScalarField& f, const char* what) {
    require_config(f.mesh != nullptr, std::string(what) + ": field has no mesh");
    require_config(f.v.size() == f.mesh->size(), std::string(what) + ": field size mismatch");
}

} // namespace

ScalarField poisson_solve(const ScalarField& rhs) {
    check_field(rhs, "poisson_solve");
    const DomainMesh& m = *rhs.mesh;
    if (m.kind == MeshKind::DiskRadial) {
        std::vector<double> mass(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) mass[i] = m.weight[i] * rhs[i];
        return ScalarField(rhs.mesh, radial_solve_mass(m, mass, 0.0));
    }
    return ScalarField(rhs.mesh, m.grid_op->solve_pointwise(m, rhs.v));
}

ScalarField poisson_solve_mass(const MeshPtr& mesh, const std::vector<double>& cell_mass) {
    require_config(mesh != nullptr && cell_mass.size() == mesh->size(),
                   "poisson_solve_mass: size mismatch");
    const DomainMesh& m = *mesh;
    if (m.kind == MeshKind::DiskRadial)
        return ScalarField(mesh, radial_solve_mass(m, cell_mass, 0.0));
    std::vector<double> b(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!m.boundary[i]) b[i] = cell_mass[i] / m.weight[i];
    return ScalarField(mesh, m.grid_op->solve_pointwise(m, b));
}

ScalarField harmonic_extension(const MeshPtr& mesh, const ScalarField& boundary_values) {
    require_config(mesh != nullptr, "harmonic_extension: null mesh");
    check_field(boundary_values, "harmonic_extension");
    const DomainMesh& m = *mesh;
    if (m.kind == MeshKind::DiskRadial) {
        std::vector<double> zero(m.size(), 0.0);
        return ScalarField(mesh, radial_solve_mass(m, zero, boundary_values.v.back()));
    }
    return ScalarField(mesh, m.grid_op->extend(m, boundary_values.v));
}

// ---------------------------------------------------------------------------
// Green fields and weights
// ---------------------------------------------------------------------------

ScalarField green_vortex(const MeshPtr& mesh) {
    require_config(mesh != nullptr, "green_vortex: null mesh");
    const DomainMesh& m = *mesh;
    ScalarField g(mesh);
    if (m.kind == MeshKind::DiskRadial) {
        g[0] = INF;
        for (std::size_t i = 1; i < m.size(); ++i) g[i] = -std::log(m.r[i]) / (2.0 * PI);
        return g;
    }
    ScalarField bdata(mesh);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.boundary[i])
            bdata[i] = std::log(std::hypot(m.x[i], m.y[i])) / (2.0 * PI);
    ScalarField corr = harmonic_extension(mesh, bdata);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (int(i) == m.origin_node) {
            g[i] = INF;
        } else {
            g[i] = -std::log(std::hypot(m.x[i], m.y[i])) / (2.0 * PI) + corr[i];
        }
    }
    return g;
}

ScalarField regularized_green(const MeshPtr& mesh, double eps) {
    require_config(mesh != nullptr, "regularized_green: null mesh");
    require_config(eps > 0.0, "regularized_green: eps must be positive");
    const DomainMesh& m = *mesh;
    ScalarField g(mesh);
    double e2 = eps * eps;
    if (m.kind == MeshKind::DiskRadial) {
        for (std::size_t i = 0; i < m.size(); ++i)
            g[i] = std::log((1.0 + e2) / (e2 + m.r[i] * m.r[i])) / (4.0 * PI);
        return g;
    }
    ScalarField bdata(mesh);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.boundary[i])
            bdata[i] = std::log(e2 + m.x[i] * m.x[i] + m.y[i] * m.y[i]) / (4.0 * PI);
    ScalarField corr = harmonic_extension(mesh, bdata);
    for (std::size_t i = 0; i < m.size(); ++i)
        g[i] = -std::log(e2 + m.x[i] * m.x[i] + m.y[i] * m.y[i]) / (4.0 * PI) + corr[i];
    return g;
}

std::vector<double> green_vortex_cell_means(const MeshPtr& mesh, double eps) {
    require_config(mesh != nullptr, "green_vortex_cell_means: null mesh");
    if (eps > 0.0) return regularized_green(mesh, eps).v;
    const DomainMesh& m = *mesh;
    if (m.kind == MeshKind::DiskRadial) {
        auto plw = power_log_cell_weights(m, 0.0);
        std::vector<double> g(m.size());
        for (std::size_t i = 0; i < m.size(); ++i)
            g[i] = -plw[i] / (2.0 * PI * m.weight[i]);
        return g;
    }
    auto gv = green_vortex(mesh).v;
    std::size_t o = static_cast<std::size_t>(m.origin_node);
    auto corr = [&](std::size_t i) {
        return gv[i] + std::log(std::hypot(m.x[i], m.y[i])) / (2.0 * PI);
    };
    // the harmonic correction solves the exact 5-point Laplace equation at
    // the origin row, so its value there is the average of its neighbors
    double c0 = 0.25 * (corr(o - 1) + corr(o + 1) +
                        corr(o - static_cast<std::size_t>(m.nx)) +
                        corr(o + static_cast<std::size_t>(m.nx)));
    // cell average of log|x| over the h x h cell centered at the vortex:
    // (1/h^2) int log|x| = log(h/2) + log(2)/2 + pi/4 - 3/2
    double log_cell = std::log(0.5 * m.h) + 0.5 * std::log(2.0) + 0.25 * PI - 1.5;
    gv[o] = c0 - log_cell / (2.0 * PI);
    return gv;
}

ScalarField weight_field(const MeshPtr& mesh, const WeightSpec& spec) {
    require_config(mesh != nullptr, "weight_field: null mesh");
    spec.validate();
    const DomainMesh& m = *mesh;
    double a = spec.a();
    ScalarField H(mesh, 1.0);
    if (a == 0.0) return H; // sigma*lambda = 0: trivial weight, even at the vortex

    double slam = spec.sigma * spec.lambda;
    if (spec.eps > 0.0) {
        if (m.kind == MeshKind::DiskRadial) {
            double e2 = spec.eps * spec.eps;
            for (std::size_t i = 0; i < m.size(); ++i)
                H[i] = std::pow((e2 + m.r[i] * m.r[i]) / (1.0 + e2), a);
        } else {
            ScalarField gn = regularized_green(mesh, spec.eps);
            for (std::size_t i = 0; i < m.size(); ++i) H[i] = std::exp(-slam * gn[i]);
        }
        return H;
    }

    // exact singular weight H = e^{-sigma lambda G}
    if (m.kind == MeshKind::DiskRadial) {
        for (std::size_t i = 1; i < m.size(); ++i) H[i] = std::pow(m.r[i] * m.r[i], a);
        if (a > 0.0) {
            H[0] = 0.0;
        } else {
            // a in (-1,0) by validate(): report the exact cell average of r^{2a}
            // over the origin cell since the pointwise value is infinite
            H[0] = std::pow(m.rhalf[0], 2.0 * a) / (1.0 + a);
        }
        return H;
    }
    require_domain(a > 0.0,
                   "weight_field: exact negative-exponent weights need eps > 0 on grids");
    ScalarField g = green_vortex(mesh);
    for (std::size_t i = 0; i < m.size(); ++i)
        H[i] = (int(i) == m.origin_node) ? 0.0 : std::exp(-slam * g[i]);
    return H;
}

// ---------------------------------------------------------------------------
// quadrature and energy forms
// ---------------------------------------------------------------------------

double integrate(const ScalarField& f) {
    check_field(f, "integrate");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.mesh->weight[i] * f[i];
    return s;
}

double dirichlet_energy(const ScalarField& psi) {
    check_field(psi, "dirichlet_energy");
    const DomainMesh& m = *psi.mesh;
    double s = 0.0;
    if (m.kind == MeshKind::DiskRadial) {
        for (std::size_t i = 0; i + 1 < m.size(); ++i) {
            double d = psi[i + 1] - psi[i];
            s += radial_flux_coeff(m, i) * d * d;
        }
        return s;
    }
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i + 1 < m.nx; ++i) {
            double d = psi[std::size_t(m.grid_id(i + 1, j))] - psi[std::size_t(m.grid_id(i, j))];
            s += d * d;
        }
    for (int j = 0; j + 1 < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i) {
            double d = psi[std::size_t(m.grid_id(i, j + 1))] - psi[std::size_t(m.grid_id(i, j))];
            s += d * d;
        }
    return s;
}

std::vector<double> power_cell_weights(const DomainMesh& mesh, double e) {
    require_config(mesh.kind == MeshKind::DiskRadial,
                   "power_cell_weights: radial meshes only");
    require_config(e > -2.0, "power_cell_weights: exponent must exceed -2");
    std::size_t n = mesh.size();
    std::vector<double> pw(n);
    double q = e + 2.0;
    auto anti = [&](double r) { return r <= 0.0 ? 0.0 : std::pow(r, q) / q; };
    for (std::size_t i = 0; i < n; ++i) {
        double lo = (i == 0) ? 0.0 : mesh.rhalf[i - 1];
        double hi = (i + 1 == n) ? mesh.r[n - 1] : mesh.rhalf[i];
        pw[i] = 2.0 * PI * (anti(hi) - anti(lo));
    }
    return pw;
}

std::vector<double> power_log_cell_weights(const DomainMesh& mesh, double e) {
    require_config(mesh.kind == MeshKind::DiskRadial,
                   "power_log_cell_weights: radial meshes only");
    require_config(e > -2.0, "power_log_cell_weights: exponent must exceed -2");
    std::size_t n = mesh.size();
    std::vector<double> pw(n);
    double q = e + 2.0;
    // int r^{e+1} log r dr = r^{e+2} (log r / (e+2) - 1/(e+2)^2); -> 0 as r -> 0
    auto anti = [&](double r) {
        return r <= 0.0 ? 0.0 : std::pow(r, q) * (std::log(r) / q - 1.0 / (q * q));
    };
    for (std::size_t i = 0; i < n; ++i) {
        double lo = (i == 0) ? 0.0 : mesh.rhalf[i - 1];
        double hi = (i + 1 == n) ? mesh.r[n - 1] : mesh.rhalf[i];
        pw[i] = 2.0 * PI * (anti(hi) - anti(lo));
    }
    return pw;
}

// ---------------------------------------------------------------------------
// CSV io
// ---------------------------------------------------------------------------

void write_field_csv(std::ostream& os, const ScalarField& f) {
    check_field(f, "write_field_csv");
    const DomainMesh& m = *f.mesh;
    os << "node_id,x,y,weight,value\n";
    os.precision(17);
    for (std::size_t i = 0; i < f.size(); ++i)
        os << i << ',' << m.x[i] << ',' << m.y[i] << ',' << m.weight[i] << ',' << f[i]
           << '\n';
}

ScalarField read_field_csv(std::istream& is, const MeshPtr& mesh) {
    require_config(mesh != nullptr, "read_field_csv: null mesh");
    std::string line;
    require_config(bool(std::getline(is, line)), "read_field_csv: empty stream");
    ScalarField f(mesh);
    std::vector<char> seen(mesh->size(), 0);
    std::size_t count = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::size_t id = 0;
        double x, y, w, value;
        require_config(bool(ls >> id >> x >> y >> w >> value),
                       "read_field_csv: malformed row");
        require_config(id < mesh->size() && !seen[id], "read_field_csv: bad node id");
        seen[id] = 1;
        f[id] = value;
        ++count;
    }
    require_config(count == mesh->size(), "read_field_csv: row count mismatch");
    return f;
}

} // namespace vmf
