#include "phburgers/fem1d.hpp"

#include "phburgers/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace phb {

namespace {

// Interior rank of a global node, if any.
std::optional<std::size_t> interior_rank(std::size_t n_elems, std::size_t global)
{
    if (global == 0 || global >= 2 * n_elems)
        return std::nullopt;
    return global - 1;
}

void check_length(const Mesh1D& mesh, std::span<const double> v, const char* what)
{
    if (v.size() != mesh.num_interior())
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(mesh.num_interior())
                                    + " interior coefficients, got " + std::to_string(v.size()));
}

// Interior (N) or all-node (2n + 1) coefficients.
void check_field_length(const Mesh1D& mesh, std::span<const double> v, const char* what)
{
    if (v.size() != mesh.num_interior() && v.size() != mesh.num_nodes())
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(mesh.num_interior()) + " or "
                                    + std::to_string(mesh.num_nodes()) + " coefficients, got "
                                    + std::to_string(v.size()));
}

std::size_t locate_element(const Mesh1D& mesh, double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw std::out_of_range("point " + std::to_string(x) + " outside [0, 1]");
    const auto e = static_cast<std::size_t>(std::floor(x / mesh.h));
    return std::min(e, mesh.n_elems - 1);
}

} // namespace

Mesh1D build_mesh(std::size_t n_elems)
{
    if (n_elems == 0)
        throw ConfigError("build_mesh: at least one element is required");

    Mesh1D mesh;
    mesh.n_elems = n_elems;
    mesh.h = 1.0 / static_cast<double>(n_elems);
    const std::size_t num_nodes = 2 * n_elems + 1;
    mesh.nodes.resize(num_nodes);
    // Coordinates as k / (2n) so vertices are exact multiples of h.
    const double denom = static_cast<double>(2 * n_elems);
    for (std::size_t k = 0; k < num_nodes; ++k)
        mesh.nodes[k] = static_cast<double>(k) / denom;
    mesh.nodes.back() = 1.0;

    mesh.interior_to_global.resize(num_nodes - 2);
    for (std::size_t k = 0; k + 2 < num_nodes; ++k)
        mesh.interior_to_global[k] = k + 1;
    return mesh;
}

Mesh1D build_mesh_from_h(double h)
{
    if (!(h > 0.0) || h > 1.0)
        throw ConfigError("mesh size h must lie in (0, 1], got " + std::to_string(h));
    const double n = std::round(1.0 / h);
    if (std::abs(n * h - 1.0) > 1e-9)
        throw ConfigError("1/h must be an integer, got h = " + std::to_string(h));
    return build_mesh(static_cast<std::size_t>(n));
}

namespace p2 {

const std::array<double, num_quadrature_points>& quadrature_points()
{
    static const std::array<double, num_quadrature_points> points = [] {
        const std::array<double, 5> t = {-0.9061798459386639927976269, -0.5384693101056830910363144, 0.0,
                                         0.5384693101056830910363144, 0.9061798459386639927976269};
        std::array<double, 5> x{};
        for (std::size_t q = 0; q < 5; ++q)
            x[q] = 0.5 * (t[q] + 1.0);
        return x;
    }();
    return points;
}

const std::array<double, num_quadrature_points>& quadrature_weights()
{
    static const std::array<double, num_quadrature_points> weights = {
        0.5 * 0.2369268850561890875142640, 0.5 * 0.4786286704993664680412915, 0.5 * 0.5688888888888888888888889,
        0.5 * 0.4786286704993664680412915, 0.5 * 0.2369268850561890875142640};
    return weights;
}

std::array<double, 3> shape(double xi)
{
    return {(1.0 - xi) * (1.0 - 2.0 * xi), 4.0 * xi * (1.0 - xi), xi * (2.0 * xi - 1.0)};
}

std::array<double, 3> shape_derivatives(double xi)
{
    return {4.0 * xi - 3.0, 4.0 - 8.0 * xi, 4.0 * xi - 1.0};
}

} // namespace p2

std::array<double, 3> element_coefficients(const Mesh1D& mesh, std::span<const double> interior, std::size_t elem)
{
    std::array<double, 3> c{};
    if (interior.size() == mesh.num_nodes())
        return {interior[2 * elem], interior[2 * elem + 1], interior[2 * elem + 2]};
    for (std::size_t a = 0; a < 3; ++a)
        if (auto k = interior_rank(mesh.n_elems, 2 * elem + a))
            c[a] = interior[*k];
    return c;
}

double evaluate(const Mesh1D& mesh, std::span<const double> interior, double x)
{
    check_field_length(mesh, interior, "evaluate");
    const std::size_t e = locate_element(mesh, x);
    const auto c = element_coefficients(mesh, interior, e);
    const auto phi = p2::shape((x - mesh.nodes[2 * e]) / mesh.h);
    return c[0] * phi[0] + c[1] * phi[1] + c[2] * phi[2];
}

double evaluate_derivative(const Mesh1D& mesh, std::span<const double> interior, double x)
{
    check_field_length(mesh, interior, "evaluate_derivative");
    const std::size_t e = locate_element(mesh, x);
    const auto c = element_coefficients(mesh, interior, e);
    const auto dphi = p2::shape_derivatives((x - mesh.nodes[2 * e]) / mesh.h);
    return (c[0] * dphi[0] + c[1] * dphi[1] + c[2] * dphi[2]) / mesh.h;
}

Vector interpolate(const Mesh1D& mesh, const std::function<double(double)>& f)
{
    Vector v(mesh.num_interior());
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = f(mesh.nodes[mesh.interior_to_global[k]]);
    return v;
}

Vector to_global(const Mesh1D& mesh, std::span<const double> interior)
{
    check_length(mesh, interior, "to_global");
    Vector g(mesh.num_nodes(), 0.0);
    for (std::size_t k = 0; k < interior.size(); ++k)
        g[mesh.interior_to_global[k]] = interior[k];
    return g;
}

namespace {

// Scatter a local 3x3 block into the interior band matrix.
void scatter(const Mesh1D& mesh, std::size_t e, const std::array<std::array<double, 3>, 3>& local, BandMatrix& out)
{
    for (std::size_t a = 0; a < 3; ++a)
    {
        const auto i = interior_rank(mesh.n_elems, 2 * e + a);
        if (!i)
            continue;
        for (std::size_t b = 0; b < 3; ++b)
            if (const auto j = interior_rank(mesh.n_elems, 2 * e + b))
                out.add(*i, *j, local[a][b]);
    }
}

using Local = std::array<std::array<double, 3>, 3>;

} // namespace

FeOperators assemble_operators(const Mesh1D& mesh)
{
    if (mesh.n_elems == 0)
        throw ConfigError("assemble_operators: empty mesh");
    const std::size_t n = mesh.num_interior();

    FeOperators ops;
    ops.mesh = mesh;
    ops.mass = BandMatrix(n, 2, 2);
    ops.skew = BandMatrix(n, 2, 2);

    std::vector<Local> mass_local(mesh.n_elems, Local{});
    std::vector<Local> skew_local(mesh.n_elems, Local{});
    for_each_quadrature_point(mesh, [&](std::size_t e, double, double w, const auto& phi, const auto& dphi) {
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
            {
                mass_local[e][a][b] += w * phi[b] * phi[a];
                skew_local[e][a][b] += w * phi[b] * dphi[a];
            }
    });
    // Exactly antisymmetric part plus the vertex traces [phi_a phi_b] / 2.
    for (auto& k : skew_local)
    {
        Local s{};
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
                s[a][b] = 0.5 * (k[a][b] - k[b][a]);
        s[0][0] = -0.5;
        s[2][2] = 0.5;
        k = s;
    }
    for (std::size_t e = 0; e < mesh.n_elems; ++e)
    {
        scatter(mesh, e, mass_local[e], ops.mass);
        scatter(mesh, e, skew_local[e], ops.skew);
    }
    ops.dissipative = ops.skew.transposed();

    const std::size_t g = mesh.num_nodes();
    ops.port_mass = assemble_full_mass(mesh);
    ops.port_gradient = BandMatrix(g, 2, 2);
    for_each_quadrature_point(mesh, [&](std::size_t e, double, double w, const auto& phi, const auto& dphi) {
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
                ops.port_gradient.add(2 * e + a, 2 * e + b, w * dphi[b] * phi[a]);
    });

    ops.b_left.assign(n, 0.0);
    ops.b_right.assign(n, 0.0);
    ops.bnu_left.assign(g, 0.0);
    ops.bnu_right.assign(g, 0.0);
    ops.bnu_left.front() = 1.0;
    ops.bnu_right.back() = -1.0;
    ops.trace_weight_left = std::sqrt(2.0);
    ops.trace_weight_right = -std::sqrt(2.0);

    ops.mass_factor = BandCholesky(ops.mass);
    ops.port_mass_factor = BandCholesky(ops.port_mass);
    return ops;
}

BandMatrix assemble_full_mass(const Mesh1D& mesh)
{
    BandMatrix full(mesh.num_nodes(), 2, 2);
    for_each_quadrature_point(mesh, [&](std::size_t e, double, double w, const auto& phi, const auto&) {
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
                full.add(2 * e + a, 2 * e + b, w * phi[a] * phi[b]);
    });
    return full;
}

BandMatrix assemble_weighted_mass(const Mesh1D& mesh, std::span<const double> v)
{
    check_length(mesh, v, "assemble_weighted_mass");
    BandMatrix out(mesh.num_interior(), 2, 2);
    std::size_t current = mesh.n_elems;
    std::array<double, 3> c{};
    for_each_quadrature_point(mesh, [&](std::size_t e, double, double w, const auto& phi, const auto&) {
        if (e != current)
        {
            c = element_coefficients(mesh, v, e);
            current = e;
        }
        const double vq = c[0] * phi[0] + c[1] * phi[1] + c[2] * phi[2];
        Local local{};
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
                local[a][b] = w * vq * phi[b] * phi[a];
        scatter(mesh, e, local, out);
    });
    return out;
}

BandMatrix assemble_port_weighted_mass(const Mesh1D& mesh, std::span<const double> weight)
{
    check_field_length(mesh, weight, "assemble_port_weighted_mass");
    BandMatrix out(mesh.num_nodes(), 2, 2);
    std::size_t current = mesh.n_elems;
    std::array<double, 3> c{};
    for_each_quadrature_point(mesh, [&](std::size_t e, double, double w, const auto& phi, const auto&) {
        if (e != current)
        {
            c = element_coefficients(mesh, weight, e);
            current = e;
        }
        const double q = c[0] * phi[0] + c[1] * phi[1] + c[2] * phi[2];
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
                out.add(2 * e + a, 2 * e + b, w * q * phi[b] * phi[a]);
    });
    return out;
}

Vector assemble_quadratic_load(const Mesh1D& mesh, std::span<const double> v)
{
    check_length(mesh, v, "assemble_quadratic_load");
    Vector out(mesh.num_interior(), 0.0);
    std::size_t current = mesh.n_elems;
    std::array<double, 3> c{};
    for_each_quadrature_point(mesh, [&](std::size_t e, double, double w, const auto& phi, const auto&) {
        if (e != current)
        {
            c = element_coefficients(mesh, v, e);
            current = e;
        }
        const double vq = c[0] * phi[0] + c[1] * phi[1] + c[2] * phi[2];
        for (std::size_t a = 0; a < 3; ++a)
            if (const auto i = interior_rank(mesh.n_elems, 2 * e + a))
                out[*i] += w * phi[a] * 0.5 * vq * vq;
    });
    return out;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

double norm_inf(std::span<const double> a)
{
    double m = 0.0;
    for (double x : a)
        m = std::max(m, std::abs(x));
    return m;
}

} // namespace phb
