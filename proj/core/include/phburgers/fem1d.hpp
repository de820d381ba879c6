#ifndef PHBURGERS_FEM1D_HPP
#define PHBURGERS_FEM1D_HPP

#include "phburgers/banded.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace phb {

/*!
 * \brief Uniform partition of (0, 1) with the node layout of continuous P2
 *        Lagrange elements.
 *
 * Element e owns global nodes 2e, 2e+1 (midpoint) and 2e+2. The discrete
 * unknowns live on the interior nodes 1 .. 2n-1 only (homogeneous traces).
 */
struct Mesh1D
{
    std::size_t n_elems = 0;
    double h = 0.0;
    std::vector<double> nodes;                 // 2 n_elems + 1 coordinates
    std::vector<std::size_t> interior_to_global; // rank k -> global node k + 1

    std::size_t num_interior() const { return interior_to_global.size(); }
    std::size_t num_nodes() const { return nodes.size(); }
};

Mesh1D build_mesh(std::size_t n_elems);

//! Mesh with element width h; 1/h must be an integer up to rounding.
Mesh1D build_mesh_from_h(double h);

//! Reference-element data for P2 on [0, 1].
namespace p2 {

inline constexpr std::size_t num_quadrature_points = 5;

//! 5-point Gauss-Legendre rule mapped to [0, 1]; exact up to degree 9.
const std::array<double, num_quadrature_points>& quadrature_points();
const std::array<double, num_quadrature_points>& quadrature_weights();

std::array<double, 3> shape(double xi);
//! Derivatives with respect to the reference coordinate.
std::array<double, 3> shape_derivatives(double xi);

} // namespace p2

//! Coefficients of a field on element e. Fields come either as N interior
//! coefficients (boundary nodes read 0) or as values at all 2n + 1 nodes.
std::array<double, 3> element_coefficients(const Mesh1D& mesh, std::span<const double> interior, std::size_t elem);

//! Point evaluation of a field and of its derivative.
double evaluate(const Mesh1D& mesh, std::span<const double> interior, double x);
double evaluate_derivative(const Mesh1D& mesh, std::span<const double> interior, double x);

//! Nodal interpolant at the interior P2 nodes; boundary values are dropped.
Vector interpolate(const Mesh1D& mesh, const std::function<double(double)>& f);

//! Extend interior coefficients with zero boundary values (length 2n + 1).
Vector to_global(const Mesh1D& mesh, std::span<const double> interior);

//! Applies \p f to every quadrature point: f(element, x, weight, phi, dphi_dx).
template<class F>
void for_each_quadrature_point(const Mesh1D& mesh, F&& f)
{
    const auto& xs = p2::quadrature_points();
    const auto& ws = p2::quadrature_weights();
    std::array<std::array<double, 3>, p2::num_quadrature_points> phis;
    std::array<std::array<double, 3>, p2::num_quadrature_points> dphis;
    for (std::size_t q = 0; q < p2::num_quadrature_points; ++q)
    {
        phis[q] = p2::shape(xs[q]);
        dphis[q] = p2::shape_derivatives(xs[q]);
        for (double& d : dphis[q])
            d /= mesh.h;
    }
    for (std::size_t e = 0; e < mesh.n_elems; ++e)
    {
        const double x0 = mesh.nodes[2 * e];
        for (std::size_t q = 0; q < p2::num_quadrature_points; ++q)
            f(e, x0 + mesh.h * xs[q], mesh.h * ws[q], phis[q], dphis[q]);
    }
}

/*!
 * \brief Assembled matrices of the discrete Dirac structure.
 *
 * v and e live on the N interior basis functions, f_r and e_r on all
 * 2n + 1 nodes (the port space). mass(i,j) = int phi_j phi_i,
 * skew(i,j) = int phi_j dphi_i/dx and dissipative(i,j) = int dphi_j/dx phi_i
 * on the interior. port_gradient(j,k) = int dphi_k/dx phi_j over all nodes;
 * its interior block is dissipative.
 *
 * B_l, B_r vanish on the interior (the point-evaluation weights are kept as
 * scalars). Bnu_l = +delta_0 and Bnu_r = -delta_{2n} act on the port space.
 */
struct FeOperators
{
    Mesh1D mesh;
    BandMatrix mass;        // M
    BandMatrix skew;        // D
    BandMatrix dissipative; // R
    Vector b_left, b_right;       // convective boundary control vectors
    BandMatrix port_mass;     // mass over all nodes
    BandMatrix port_gradient;
    Vector bnu_left, bnu_right;   // dissipative boundary control vectors (port space)
    std::size_t half_bandwidth = 2;

    // B_l -> sqrt(2) at x=0, B_r -> -sqrt(2) at x=1.
    double trace_weight_left = 0.0;
    double trace_weight_right = 0.0;

    BandCholesky mass_factor;
    BandCholesky port_mass_factor;

    std::size_t size() const { return mesh.num_interior(); }
    std::size_t port_size() const { return mesh.num_nodes(); }
};

FeOperators assemble_operators(const Mesh1D& mesh);

//! Mass matrix over every P2 node including the two boundary vertices.
BandMatrix assemble_full_mass(const Mesh1D& mesh);

//! W(v)_ij = int v_d phi_j phi_i on the interior.
BandMatrix assemble_weighted_mass(const Mesh1D& mesh, std::span<const double> v);

//! W(w)_ij = int w_d phi_j phi_i over all nodes; w interior or all-node.
BandMatrix assemble_port_weighted_mass(const Mesh1D& mesh, std::span<const double> weight);

//! N(v)_i = int phi_i v_d^2 / 2.
Vector assemble_quadratic_load(const Mesh1D& mesh, std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

} // namespace phb

#endif
