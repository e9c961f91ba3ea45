// Meshes, fields and the elementary Poisson/Green machinery.
//
// Two mesh kinds:
//   - disk-radial: nodes r_0=0 < r_1 < ... < r_N = 1 on the unit disk, finite
//     volume Laplacian (conservative flux form, exact for quadratics), cell
//     quadrature weights pi*(r_{i+1/2}^2 - r_{i-1/2}^2) that telescope to the
//     exact area pi.
//   - grid-2d: uniform lattice on a rectangle, 5-point Laplacian, trapezoid
//     cell-area weights summing to the exact area.
//
// The vortex sits at the origin, which is always a mesh node: green_vortex is
// the field G(x,0), regularized_green its smoothed version G_n with
// h_n = sqrt(eps^2+|x|^2), and weight_field evaluates H = exp(-sigma*lambda*G).
#pragma once
#include <array>
#include <cstddef>
#include <memory>
#include <iosfwd>
#include <vector>

#include "errors.hpp"

namespace vmf {

enum class MeshKind { DiskRadial, Grid2D };
enum class Grading { Uniform, LogNearOrigin };

class GridPoissonOperator; // prefactored 5-point solver, defined in mesh.cpp

struct DomainMesh {
    MeshKind kind;
    std::vector<double> x, y;      // node coordinates (radial: x = r, y = 0)
    std::vector<double> weight;    // quadrature weight per node (area measure)
    std::vector<char> boundary;    // 1 on Dirichlet boundary nodes
    double area = 0.0;

    // disk-radial extras
    std::vector<double> r;         // node radii
    std::vector<double> rhalf;     // cell interfaces, rhalf[i] between node i and i+1

    // grid-2d extras
    int nx = 0, ny = 0;            // node counts per direction
    double h = 0.0;                // lattice spacing
    double gx0 = 0.0, gy0 = 0.0;   // coordinates of node (0,0)
    int origin_node = -1;

    std::shared_ptr<GridPoissonOperator> grid_op; // lazy factorization

    std::size_t size() const { return x.size(); }
    int grid_id(int i, int j) const { return j * nx + i; }
};

using MeshPtr = std::shared_ptr<const DomainMesh>;

struct ScalarField {
    MeshPtr mesh;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(MeshPtr m, double fill = 0.0)
        : mesh(std::move(m)), v(mesh->size(), fill) {}
    ScalarField(MeshPtr m, std::vector<double> values)
        : mesh(std::move(m)), v(std::move(values)) {}

    std::size_t size() const { return v.size(); }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
};

// Weight specification: H = (eps^2+|x|^2)^a modulated by the regular part,
// with the exponent convention a = sigma*lambda/(4*pi). eps = 0 means the
// exact singular weight.
struct WeightSpec {
    double sigma = 0.0;
    double lambda = 0.0;
    double eps = 0.0;

    double a() const;
    // Throws domain_error on non-integrable combinations (sigma<0, eps=0,
    // lambda >= 4*pi/|sigma|), config_error on lambda < 0 or eps < 0.
    void validate() const;
};

MeshPtr build_disk_mesh(int n_nodes, Grading grading = Grading::Uniform,
                        double r_min = 1e-8, double r_switch = 0.2);
MeshPtr build_grid_mesh(double width, double height, double h,
                        std::array<double, 2> origin_offset = {0.0, 0.0});

// -Delta_h psi = rhs at interior nodes, psi = 0 on the boundary.
ScalarField poisson_solve(const ScalarField& rhs);
// Same solve driven by per-node cell masses (rhs integrated over cells);
// this is the form the mean-field iteration uses.
ScalarField poisson_solve_mass(const MeshPtr& mesh, const std::vector<double>& cell_mass);
// Discrete harmonic extension: -Delta_h u = 0 inside, u = g on the boundary.
ScalarField harmonic_extension(const MeshPtr& mesh, const ScalarField& boundary_values);

// G(x,0). The origin node carries an +inf sentinel; energy integrals must be
// assembled from regularized or analytically integrated pieces instead.
ScalarField green_vortex(const MeshPtr& mesh);
// G_n = -(1/2pi) log h_n + R_n with R_n harmonic, R_n = (1/2pi) log h_n on
// the boundary. Closed form on the disk, harmonic solve on grids.
ScalarField regularized_green(const MeshPtr& mesh, double eps);
// Cell-averaged values of the vortex Green function (eps = 0) or of its
// regularized version: finite everywhere. The disk uses exact log cell
// integrals; the grid integrates the log singularity over the origin cell in
// closed form and recovers the harmonic correction there from its stencil.
std::vector<double> green_vortex_cell_means(const MeshPtr& mesh, double eps);
// Pointwise H. Conventions at the origin for eps = 0: H(0) = 0 when a > 0;
// when a < 0 on the radial mesh the (finite) cell average of r^{2a} is
// reported since the pointwise value is +inf; a < 0 on grids is rejected.
ScalarField weight_field(const MeshPtr& mesh, const WeightSpec& spec);

double integrate(const ScalarField& f);                 // sum_i w_i f_i
double dirichlet_energy(const ScalarField& psi);        // edge form of int |grad psi|^2

// Exact power moments over radial cells, used wherever r^{2a}-type factors
// appear under an integral: pw[i] = 2pi int_cell r^{e+1} dr and
// pwlog[i] = 2pi int_cell r^{e+1} log r dr.
std::vector<double> power_cell_weights(const DomainMesh& mesh, double e);
std::vector<double> power_log_cell_weights(const DomainMesh& mesh, double e);

// CSV dump: node_id,x,y,weight,value
void write_field_csv(std::ostream& os, const ScalarField& f);
ScalarField read_field_csv(std::istream& is, const MeshPtr& mesh);

} // namespace vmf
