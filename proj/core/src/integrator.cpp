#include "phburgers/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phb {

const char* to_string(FailureReason reason)
{
    switch (reason)
    {
    case FailureReason::none: return "completed";
    case FailureReason::newton_divergence: return "newton_divergence";
    case FailureReason::singular_weighted_mass: return "singular_W";
    case FailureReason::dt_underflow: return "dt_underflow";
    }
    return "unknown";
}

Mode RunConfig::mode() const
{
    return beta > 0.0 ? Mode::viscous(viscosity()) : Mode::inviscid();
}

void RunConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw ConfigError("RunConfig: " + msg); };
    if (n_elems == 0)
        fail("n_elems must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        fail("alpha must be positive");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        fail("beta must be non-negative");
    if (!(t_final >= 0.0) || !std::isfinite(t_final))
        fail("t_final must be non-negative");
    if (!(newton_tol > 0.0))
        fail("newton_tol must be positive");
    if (newton_max_iter < 1)
        fail("newton_max_iter must be at least 1");
    if (!(dt_min_factor > 0.0) || dt_min_factor > 1.0)
        fail("dt_min_factor must lie in (0, 1]");
    if (!(dt_cap_factor >= 1.0))
        fail("dt_cap_factor must be at least 1");
    if (!(shrink > 0.0 && shrink < 1.0))
        fail("shrink must lie in (0, 1)");
    if (!(grow >= 1.0))
        fail("grow must be at least 1");
    if (grow_after < 1)
        fail("grow_after must be at least 1");
    if (fixed_dt && !(*fixed_dt > 0.0))
        fail("fixed_dt must be positive");
}

// ---------------------------------------------------------------------------

namespace {

void axpy(double a, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += a * x[i];
}

Vector residual_from(const FeOperators& ops, const State& state_n, const Vector& flow_n, const State& trial, double dt)
{
    Vector diff(trial.v);
    axpy(-1.0, state_n.v, diff);
    Vector r = ops.mass.multiply(diff);
    const Vector flow_trial = flow(ops, trial);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] -= 0.5 * dt * (flow_trial[i] + flow_n[i]);
    return r;
}

bool all_finite(std::span<const double> x)
{
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

/*
 * Linearized CN step, unknowns interleaved per P2 node g as (dv, de, de_r).
 * dv and de are pinned to zero on the two boundary nodes. Block rows:
 *   M dv - dt/2 D de + dt/2 R de_r        = -F
 *  -W(v) dv + M de                        = 0
 *   W(e_r) dv - nu R^T de + W(v) de_r     = 0   (viscous only, every node)
 */
BandMatrix newton_matrix(const FeOperators& ops, const State& trial, double dt)
{
    const std::size_t n = ops.size();
    const std::size_t g_count = ops.port_size();
    const std::size_t hb = ops.half_bandwidth;
    const bool viscous = trial.mode.is_viscous();
    const std::size_t f = viscous ? 3 : 2;
    const std::size_t band = f * hb + (f - 1);
    BandMatrix a(f * g_count, band, band);

    const BandMatrix w_v = assemble_weighted_mass(ops.mesh, trial.v);
    BandMatrix pw_v, pw_er;
    if (viscous)
    {
        pw_v = assemble_port_weighted_mass(ops.mesh, trial.v);
        pw_er = assemble_port_weighted_mass(ops.mesh, trial.e_r);
    }
    const double nu = trial.mode.viscosity();
    auto interior = [n](std::size_t g) { return g >= 1 && g <= n; };

    for (std::size_t g = 0; g < g_count; ++g)
    {
        const std::size_t k0 = g >= hb ? g - hb : 0;
        const std::size_t k1 = std::min(g_count - 1, g + hb);
        if (!interior(g))
        {
            a.at(f * g, f * g) = 1.0;
            a.at(f * g + 1, f * g + 1) = 1.0;
        }
        for (std::size_t k = k0; k <= k1; ++k)
        {
            if (interior(g) && interior(k))
            {
                const double m = ops.mass(g - 1, k - 1);
                a.at(f * g, f * k) = m;
                a.at(f * g, f * k + 1) = -0.5 * dt * ops.skew(g - 1, k - 1);
                a.at(f * g + 1, f * k) = -w_v(g - 1, k - 1);
                a.at(f * g + 1, f * k + 1) = m;
            }
            if (!viscous)
                continue;
            if (interior(g))
                a.at(f * g, f * k + 2) = 0.5 * dt * ops.port_gradient(g, k);
            if (interior(k))
            {
                a.at(f * g + 2, f * k) = pw_er(g, k);
                a.at(f * g + 2, f * k + 1) = -nu * ops.port_gradient(k, g);
            }
            a.at(f * g + 2, f * k + 2) = pw_v(g, k);
        }
    }
    return a;
}

} // namespace

Vector cn_residual(const FeOperators& ops, const State& state_n, std::span<const double> v_trial, double dt)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("cn_residual: dt must be positive");
    const State trial = make_state(ops, Vector(v_trial.begin(), v_trial.end()), state_n.t + dt, state_n.mode);
    return residual_from(ops, state_n, flow(ops, state_n), trial, dt);
}

Vector cn_jacobian_apply(const FeOperators& ops, const State& trial, double dt, std::span<const double> w)
{
    // de = M^{-1} W(v) w
    Vector de = assemble_weighted_mass(ops.mesh, trial.v).multiply(w);
    ops.mass_factor.solve_in_place(de);

    Vector inner = ops.skew.multiply(de);
    if (trial.mode.is_viscous())
    {
        // W(v) de_r = nu R^T de - W(e_r) w on the port space
        Vector b = port_gradient_transposed_apply(ops, de);
        const Vector wer = assemble_port_weighted_mass(ops.mesh, trial.e_r).multiply(to_global(ops.mesh, w));
        for (std::size_t i = 0; i < b.size(); ++i)
            b[i] = trial.mode.viscosity() * b[i] - wer[i];
        const BandLU lu(assemble_port_weighted_mass(ops.mesh, trial.v));
        const Vector der = lu.solve(b);
        axpy(-1.0, port_gradient_apply(ops, der), inner);
    }
    Vector out = ops.mass.multiply(w);
    axpy(-0.5 * dt, inner, out);
    return out;
}

NewtonResult newton_solve(const FeOperators& ops, const State& state_n, double dt, double tol, int max_iter)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("newton_solve: dt must be positive");

    const Vector flow_n = flow(ops, state_n);
    NewtonResult result;
    result.state = state_n;
    result.state.t = state_n.t + dt;

    Vector residual = residual_from(ops, state_n, flow_n, result.state, dt);
    const double scale = std::max(norm2(residual), norm2(ops.mass.multiply(state_n.v)));
    const double target = tol * scale;
    double rnorm = norm2(residual);

    const std::size_t n = ops.size();
    while (rnorm > target)
    {
        if (result.iterations >= max_iter)
        {
            std::ostringstream msg;
            msg << "Newton did not converge in " << max_iter << " iterations (|F| = " << rnorm
                << ", target " << target << ")";
            throw StepFailure(FailureReason::newton_divergence, msg.str());
        }

        const BandMatrix jac = newton_matrix(ops, result.state, dt);
        const BandLU lu(jac);
        if (lu.singular(singular_pivot_threshold))
            throw StepFailure(FailureReason::newton_divergence, "singular Newton matrix");
        const std::size_t f = jac.size() / ops.port_size();
        Vector rhs_vec(jac.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            rhs_vec[f * (i + 1)] = -residual[i];
        lu.solve_in_place(rhs_vec);

        Vector v = result.state.v;
        for (std::size_t i = 0; i < n; ++i)
            v[i] += rhs_vec[f * (i + 1)];
        if (!all_finite(v))
            throw StepFailure(FailureReason::newton_divergence, "Newton update is not finite");

        result.state = make_state(ops, std::move(v), state_n.t + dt, state_n.mode);
        ++result.iterations;
        residual = residual_from(ops, state_n, flow_n, result.state, dt);
        rnorm = norm2(residual);
        if (!std::isfinite(rnorm))
            throw StepFailure(FailureReason::newton_divergence, "Newton residual is not finite");
    }
    // W(v) is positive definite at v_n; an indefinite W(v) at the new state
    // means the step crossed the singular set of the constitutive relation.
    if (state_n.mode.is_viscous() && !positive_definite(assemble_port_weighted_mass(ops.mesh, result.state.v)))
        throw StepFailure(FailureReason::singular_weighted_mass, "W(v) lost positive definiteness during the step");
    result.residual_norm = rnorm;
    return result;
}

// ---------------------------------------------------------------------------

TimeStepController::TimeStepController(const RunConfig& config)
: adaptive_(!config.fixed_dt.has_value())
, dt_(config.fixed_dt.value_or(config.dt0()))
, dt_min_(config.dt0() * config.dt_min_factor)
, dt_cap_(config.dt0() * config.dt_cap_factor)
, shrink_(config.shrink)
, grow_(config.grow)
, grow_after_(config.grow_after)
, easy_iters_(config.easy_newton_iters)
{}

void TimeStepController::accepted(int newton_iters, bool final_step)
{
    if (!adaptive_ || final_step)
        return;
    if (newton_iters > easy_iters_)
    {
        easy_streak_ = 0;
        return;
    }
    if (++easy_streak_ >= grow_after_)
    {
        dt_ = std::min(dt_ * grow_, dt_cap_);
        easy_streak_ = 0;
    }
}

bool TimeStepController::rejected()
{
    easy_streak_ = 0;
    if (!adaptive_)
        return false;
    dt_ *= shrink_;
    return dt_ >= dt_min_;
}

std::pair<State, StepOutcome> adaptive_advance(const FeOperators& ops, const State& state, const RunConfig& config,
                                               TimeStepController& controller, PowerLedger& ledger)
{
    StepOutcome outcome;
    while (true)
    {
        const double remaining = config.t_final - state.t;
        const bool final_step = controller.dt() >= remaining - 1e-12 * std::max(1.0, config.t_final);
        const double dt = final_step ? remaining : controller.dt();
        try
        {
            NewtonResult nr = newton_solve(ops, state, dt, config.newton_tol, config.newton_max_iter);
            nr.state.t = final_step ? config.t_final : state.t + dt;
            outcome.accepted = true;
            outcome.dt_used = dt;
            outcome.newton_iters = nr.iterations;
            controller.accepted(nr.iterations, final_step);
            ledger.record(ops.mesh, nr.state, dt, nr.iterations);
            return {std::move(nr.state), outcome};
        }
        catch (const StepFailure& failure)
        {
            ++outcome.rejections;
            outcome.failure_reason = failure.reason();
            if (!controller.rejected())
            {
                outcome.accepted = false;
                outcome.dt_used = dt;
                if (controller.adaptive())
                    outcome.failure_reason = FailureReason::dt_underflow;
                return {state, outcome};
            }
        }
    }
}

Snapshot take_snapshot(const FeOperators& ops, const State& state)
{
    Snapshot s;
    s.t = state.t;
    s.x = ops.mesh.nodes;
    s.v = to_global(ops.mesh, state.v);
    s.e = to_global(ops.mesh, state.e);
    s.e_r = state.e_r.empty() ? Vector(ops.mesh.num_nodes(), 0.0) : state.e_r;
    return s;
}

SimulationResult run_simulation(const RunConfig& config, const InitialProfile& profile)
{
    config.validate();
    const FeOperators ops = assemble_operators(build_mesh(config.n_elems));

    SimulationResult result;
    State state = make_state(ops, interpolate(ops.mesh, profile.value), 0.0, config.mode());
    result.ledger.record(ops.mesh, state, 0.0, 0);

    std::size_t next_snapshot = 0;
    auto snapshot_time = [&](std::size_t k) {
        return config.t_final * static_cast<double>(k) / static_cast<double>(config.snapshots);
    };
    auto maybe_snapshot = [&](bool force) {
        if (config.snapshots == 0)
            return;
        if (next_snapshot > config.snapshots && !force)
            return;
        if (force || state.t >= snapshot_time(next_snapshot) - 1e-12)
        {
            result.snapshots.push_back(take_snapshot(ops, state));
            while (next_snapshot <= config.snapshots && snapshot_time(next_snapshot) <= state.t + 1e-12)
                ++next_snapshot;
        }
    };
    maybe_snapshot(false);

    TimeStepController controller(config);
    while (state.t < config.t_final)
    {
        auto [next, outcome] = adaptive_advance(ops, state, config, controller, result.ledger);
        result.summary.rejections += static_cast<std::size_t>(outcome.rejections);
        if (!outcome.accepted)
        {
            result.summary.termination = outcome.failure_reason;
            break;
        }
        state = std::move(next);
        ++result.summary.n_steps;
        maybe_snapshot(false);
    }
    if (!result.summary.completed() && (result.snapshots.empty() || result.snapshots.back().t != state.t))
        maybe_snapshot(true);

    result.summary.t_reached = state.t;
    result.summary.var = balance_variation(result.ledger);
    result.final_state = std::move(state);
    return result;
}

} // namespace phb
