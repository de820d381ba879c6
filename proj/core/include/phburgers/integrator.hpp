#ifndef PHBURGERS_INTEGRATOR_HPP
#define PHBURGERS_INTEGRATOR_HPP

#include "phburgers/diagnostics.hpp"
#include "phburgers/errors.hpp"
#include "phburgers/fem1d.hpp"
#include "phburgers/phsystem.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace phb {

/*!
 * \brief Parameters of one simulation.
 *
 * The initial step is dt0 = alpha h and the viscosity nu = beta h / alpha
 * (beta = 0 selects the inviscid system). nu is always derived, never stored.
 */
struct RunConfig
{
    std::size_t n_elems = 100;
    double alpha = 1.0;
    double beta = 0.0;
    double t_final = 0.4;

    double newton_tol = 1e-10;
    int newton_max_iter = 10;

    double dt_min_factor = 1.0 / 4096.0; // dt_min = dt0 * dt_min_factor
    double dt_cap_factor = 2.0;          // dt_cap = dt0 * dt_cap_factor
    double shrink = 0.5;
    double grow = 1.5;
    int grow_after = 5;      // consecutive easy acceptances before growing
    int easy_newton_iters = 3;

    //! Constant step without adaptation when set; failures end the run.
    std::optional<double> fixed_dt;

    std::size_t snapshots = 50;

    double h() const { return 1.0 / static_cast<double>(n_elems); }
    double dt0() const { return alpha * h(); }
    double viscosity() const { return beta * h() / alpha; }
    Mode mode() const;

    //! Throws ConfigError on invalid values.
    void validate() const;
};

struct StepOutcome
{
    bool accepted = false;
    double dt_used = 0.0;
    int newton_iters = 0;
    int rejections = 0;
    FailureReason failure_reason = FailureReason::none;
};

//! F(v) = M (v - v_n) - dt/2 [flow(v) + flow(v_n)] with e, f_r, e_r re-solved at v.
Vector cn_residual(const FeOperators& ops, const State& state_n, std::span<const double> v_trial, double dt);

//! Directional derivative of cn_residual at the consistent trial state.
Vector cn_jacobian_apply(const FeOperators& ops, const State& trial, double dt, std::span<const double> direction);

struct NewtonResult
{
    State state;
    int iterations = 0;
    double residual_norm = 0.0;
};

/*!
 * \brief Solves the Crank-Nicolson step from state_n with Newton's method.
 *
 * Converged when |F(v)| <= tol * max(|F(v_n)|, |M v_n|). Each iteration
 * solves the linearized system in the coupled unknowns (dv, de, de_r),
 * interleaved per node so the matrix stays banded.
 * Throws StepFailure on divergence or a singular W(v).
 */
NewtonResult newton_solve(const FeOperators& ops, const State& state_n, double dt, double tol, int max_iter);

//! Adaptive step size bookkeeping.
class TimeStepController
{
public:
    explicit TimeStepController(const RunConfig& config);

    double dt() const { return dt_; }
    double dt_min() const { return dt_min_; }
    double dt_cap() const { return dt_cap_; }
    bool adaptive() const { return adaptive_; }

    void accepted(int newton_iters, bool final_step);
    //! Returns false when the shrunk step fell below dt_min.
    bool rejected();

private:
    bool adaptive_;
    double dt_;
    double dt_min_;
    double dt_cap_;
    double shrink_;
    double grow_;
    int grow_after_;
    int easy_iters_;
    int easy_streak_ = 0;
};

//! Advances one accepted step (retrying on failure) and appends it to the ledger.
std::pair<State, StepOutcome> adaptive_advance(const FeOperators& ops, const State& state, const RunConfig& config,
                                               TimeStepController& controller, PowerLedger& ledger);

struct Snapshot
{
    double t = 0.0;
    std::vector<double> x, v, e, e_r; // at every P2 node, boundary included
};

Snapshot take_snapshot(const FeOperators& ops, const State& state);

struct RunSummary
{
    double t_reached = 0.0;
    std::size_t n_steps = 0;
    std::size_t rejections = 0;
    FailureReason termination = FailureReason::none;
    double var = 0.0;

    bool completed() const { return termination == FailureReason::none; }
};

struct SimulationResult
{
    std::vector<Snapshot> snapshots;
    PowerLedger ledger;
    RunSummary summary;
    State final_state;
};

//! Integrates from v(0, x) = profile(x) interpolated at the interior P2 nodes.
SimulationResult run_simulation(const RunConfig& config, const InitialProfile& profile = InitialProfile::gaussian());

} // namespace phb

#endif
