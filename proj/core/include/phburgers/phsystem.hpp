#ifndef PHBURGERS_PHSYSTEM_HPP
#define PHBURGERS_PHSYSTEM_HPP

#include "phburgers/fem1d.hpp"

#include <span>
#include <utility>

namespace phb {

//! Inviscid (nu = 0) or viscous (nu > 0) dynamics.
class Mode
{
public:
    static Mode inviscid() { return Mode(0.0); }
    //! Throws ConfigError unless nu > 0.
    static Mode viscous(double nu);

    bool is_viscous() const { return nu_ > 0.0; }
    double viscosity() const { return nu_; }

private:
    explicit Mode(double nu) : nu_(nu) {}
    double nu_;
};

//! Relative pivot threshold below which W(v) counts as singular.
inline constexpr double singular_pivot_threshold = 1e-14;

/*!
 * \brief Snapshot of the discrete system at time t.
 *
 * v is the state; e, f_r and e_r are eliminated variables recomputed from v
 * by the constitutive solves (f_r and e_r stay empty in inviscid mode).
 * v and e hold N interior coefficients, f_r and e_r one value per node.
 */
struct State
{
    double t = 0.0;
    Vector v;
    Vector e;
    Vector f_r;
    Vector e_r;
    Mode mode = Mode::inviscid();
};

//! Boundary port values. Controls are inputs, observations are outputs.
struct PortValues
{
    double u_left = 0.0, u_right = 0.0;
    double y_left = 0.0, y_right = 0.0;
    double unu_left = 0.0, unu_right = 0.0;
    double ynu_left = 0.0, ynu_right = 0.0;
};

//! Dirichlet traces of the co-state fields at x = 0 and x = 1.
struct BoundaryTraces
{
    double e_left = 0.0, e_right = 0.0;
    double er_left = 0.0, er_right = 0.0;
};

//! Solves M e = N(v): e_d is the L2 projection of v_d^2 / 2.
Vector project_costate(const FeOperators& ops, std::span<const double> v);

//! R e_r restricted to the interior rows (e_r given on all nodes).
Vector port_gradient_apply(const FeOperators& ops, std::span<const double> port);

//! R^T e on the port space (e given on the interior).
Vector port_gradient_transposed_apply(const FeOperators& ops, std::span<const double> interior);

//! Solves M f_r = R^T e and W(v) e_r = nu M f_r on the port space.
//! Throws StepFailure(singular_weighted_mass) when W(v) is numerically singular.
std::pair<Vector, Vector> solve_viscous_ports(const FeOperators& ops, std::span<const double> v,
                                              std::span<const double> e, double nu);

//! Builds the consistent state for v (runs every constitutive solve).
State make_state(const FeOperators& ops, Vector v, double t, Mode mode);

//! D e - R e_r + B_l u_l + B_r u_r (R e_r dropped in inviscid mode).
Vector flow(const FeOperators& ops, const State& state, const PortValues& controls = {});

//! Time derivative coefficients w with M w = flow(ops, state, controls).
Vector rhs(const FeOperators& ops, const State& state, const PortValues& controls = {});

//! Boundary values of e (zero: interior expansion) and of e_r.
BoundaryTraces boundary_traces(const FeOperators& ops, const State& state);

//! Boundary traces of a field given on all 2n+1 P2 nodes.
std::pair<double, double> boundary_traces(const Mesh1D& mesh, std::span<const double> global);

//! Port outputs for the given traces; controls are copied through.
PortValues outputs_from_traces(const BoundaryTraces& traces, const PortValues& controls = {});

PortValues outputs(const FeOperators& ops, const State& state, const PortValues& controls = {});

/*!
 * \brief Interconnection matrix of the viscous discrete system applied to an
 *        effort vector.
 *
 * Efforts are ordered (e, e_r, u_l, u_r, unu_l, unu_r) with e on the N
 * interior coefficients and e_r on all N + 2 nodes; the result is the
 * metric-weighted flow Diag(M, M_port, 2, 2, 1, 1) (dv/dt, f_r, -y_l, -y_r,
 * -ynu_l, -ynu_r).
 */
Vector interconnection_apply(const FeOperators& ops, std::span<const double> efforts);

//! Diag(M, M_port, 2, 2, 1, 1) applied to a vector of length 2N + 6.
Vector metric_apply(const FeOperators& ops, std::span<const double> x);

} // namespace phb

#endif
