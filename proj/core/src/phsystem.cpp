#include "phburgers/phsystem.hpp"

#include "phburgers/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace phb {

Mode Mode::viscous(double nu)
{
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw ConfigError("viscous mode requires nu > 0");
    return Mode(nu);
}

Vector project_costate(const FeOperators& ops, std::span<const double> v)
{
    Vector e = assemble_quadratic_load(ops.mesh, v);
    ops.mass_factor.solve_in_place(e);
    return e;
}

Vector port_gradient_apply(const FeOperators& ops, std::span<const double> port)
{
    if (port.size() != ops.port_size())
        throw std::invalid_argument("port_gradient_apply: expected one value per node");
    const Vector full = ops.port_gradient.multiply(port);
    return Vector(full.begin() + 1, full.end() - 1);
}

Vector port_gradient_transposed_apply(const FeOperators& ops, std::span<const double> interior)
{
    return ops.port_gradient.multiply_transposed(to_global(ops.mesh, interior));
}

std::pair<Vector, Vector> solve_viscous_ports(const FeOperators& ops, std::span<const double> v,
                                              std::span<const double> e, double nu)
{
    if (!(nu > 0.0))
        throw ConfigError("solve_viscous_ports: nu must be positive");

    Vector rt_e = port_gradient_transposed_apply(ops, e);
    Vector f_r = ops.port_mass_factor.solve(rt_e);

    const BandLU lu(assemble_port_weighted_mass(ops.mesh, v));
    if (lu.singular(singular_pivot_threshold))
    {
        std::ostringstream msg;
        msg << "weighted mass W(v) is numerically singular (pivot ratio " << lu.pivot_ratio() << ")";
        throw StepFailure(FailureReason::singular_weighted_mass, msg.str());
    }
    for (double& x : rt_e)
        x *= nu;
    Vector e_r = lu.solve(rt_e);
    return {std::move(f_r), std::move(e_r)};
}

State make_state(const FeOperators& ops, Vector v, double t, Mode mode)
{
    if (v.size() != ops.size())
        throw std::invalid_argument("make_state: state length does not match the mesh");
    State s;
    s.t = t;
    s.mode = mode;
    s.e = project_costate(ops, v);
    if (mode.is_viscous())
        std::tie(s.f_r, s.e_r) = solve_viscous_ports(ops, v, s.e, mode.viscosity());
    s.v = std::move(v);
    return s;
}

Vector flow(const FeOperators& ops, const State& state, const PortValues& controls)
{
    Vector f = ops.skew.multiply(state.e);
    if (state.mode.is_viscous())
    {
        const Vector r = port_gradient_apply(ops, state.e_r);
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] -= r[i];
    }
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] += ops.b_left[i] * controls.u_left + ops.b_right[i] * controls.u_right;
    return f;
}

Vector rhs(const FeOperators& ops, const State& state, const PortValues& controls)
{
    Vector w = flow(ops, state, controls);
    ops.mass_factor.solve_in_place(w);
    return w;
}

std::pair<double, double> boundary_traces(const Mesh1D& mesh, std::span<const double> global)
{
    if (global.size() != mesh.num_nodes())
        throw std::invalid_argument("boundary_traces: expected one value per P2 node");
    return {global.front(), global.back()};
}

BoundaryTraces boundary_traces(const FeOperators& ops, const State& state)
{
    BoundaryTraces tr;
    std::tie(tr.e_left, tr.e_right) = boundary_traces(ops.mesh, to_global(ops.mesh, state.e));
    if (state.mode.is_viscous())
    {
        tr.er_left = state.e_r.front();
        tr.er_right = state.e_r.back();
    }
    return tr;
}

PortValues outputs_from_traces(const BoundaryTraces& traces, const PortValues& controls)
{
    const double s = 1.0 / std::sqrt(2.0);
    PortValues p = controls;
    p.y_left = s * traces.e_left;
    p.y_right = -s * traces.e_right;
    p.ynu_left = traces.er_left;
    p.ynu_right = -traces.er_right;
    return p;
}

PortValues outputs(const FeOperators& ops, const State& state, const PortValues& controls)
{
    return outputs_from_traces(boundary_traces(ops, state), controls);
}

Vector interconnection_apply(const FeOperators& ops, std::span<const double> x)
{
    const std::size_t n = ops.size();
    const std::size_t g = ops.port_size();
    if (x.size() != n + g + 4)
        throw std::invalid_argument("interconnection_apply: expected 2N + 6 efforts");
    const auto e = x.subspan(0, n);
    const auto er = x.subspan(n, g);
    const double ul = x[n + g], ur = x[n + g + 1], unl = x[n + g + 2], unr = x[n + g + 3];

    Vector out(n + g + 4, 0.0);
    const Vector de = ops.skew.multiply(e);
    const Vector rer = port_gradient_apply(ops, er);
    const Vector rte = port_gradient_transposed_apply(ops, e);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = de[i] - rer[i] + ops.b_left[i] * ul + ops.b_right[i] * ur;
    for (std::size_t j = 0; j < g; ++j)
        out[n + j] = rte[j] + ops.bnu_left[j] * unl + ops.bnu_right[j] * unr;
    out[n + g] = -dot(ops.b_left, e);
    out[n + g + 1] = -dot(ops.b_right, e);
    out[n + g + 2] = -dot(ops.bnu_left, er);
    out[n + g + 3] = -dot(ops.bnu_right, er);
    return out;
}

Vector metric_apply(const FeOperators& ops, std::span<const double> x)
{
    const std::size_t n = ops.size();
    const std::size_t g = ops.port_size();
    if (x.size() != n + g + 4)
        throw std::invalid_argument("metric_apply: expected 2N + 6 entries");
    Vector out(n + g + 4);
    const Vector a = ops.mass.multiply(x.subspan(0, n));
    const Vector b = ops.port_mass.multiply(x.subspan(n, g));
    std::copy(a.begin(), a.end(), out.begin());
    std::copy(b.begin(), b.end(), out.begin() + static_cast<std::ptrdiff_t>(n));
    out[n + g] = 2.0 * x[n + g];
    out[n + g + 1] = 2.0 * x[n + g + 1];
    out[n + g + 2] = x[n + g + 2];
    out[n + g + 3] = x[n + g + 3];
    return out;
}

} // namespace phb
