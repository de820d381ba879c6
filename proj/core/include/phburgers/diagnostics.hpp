#ifndef PHBURGERS_DIAGNOSTICS_HPP
#define PHBURGERS_DIAGNOSTICS_HPP

#include "phburgers/fem1d.hpp"
#include "phburgers/phsystem.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace phb {

//! H(v) = int v_d^3 / 6. Not sign-definite.
double hamiltonian(const Mesh1D& mesh, std::span<const double> v);

//! E(v) = int v_d^2 / 2.
double kinetic_energy(const Mesh1D& mesh, std::span<const double> v);

struct DissipationRates
{
    double hamiltonian = 0.0; // qH = (1/nu) int v_d e_rd^2
    double kinetic = 0.0;     // qE = nu int (dv_d/dx)^2
};

//! Both rates are zero in inviscid mode.
DissipationRates dissipation_rates(const Mesh1D& mesh, const State& state);

struct LedgerEntry
{
    double t = 0.0;
    double dt = 0.0;
    int newton_iters = 0;
    double H = 0.0;
    double E = 0.0;
    double qH = 0.0;
    double qE = 0.0;
    double QH = 0.0;
    double QE = 0.0;
    double bal = 0.0; // H + QH - H(t0)
};

/*!
 * \brief Time series of energy functionals over accepted steps.
 *
 * Cumulative dissipation uses the trapezoidal rule on the (possibly
 * non-uniform) step sequence. Times must be strictly increasing.
 */
class PowerLedger
{
public:
    void record(const Mesh1D& mesh, const State& state, double dt, int newton_iters);
    void record(double t, double dt, int newton_iters, double H, double E, double qH, double qE);

    const std::vector<LedgerEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const LedgerEntry& back() const { return entries_.back(); }
    const LedgerEntry& operator[](std::size_t i) const { return entries_[i]; }

    //! Cumulative QH at time t by linear interpolation between entries.
    double cumulative_hamiltonian_dissipation_at(double t) const;

private:
    std::vector<LedgerEntry> entries_;
};

//! max_n |H(t_n) + QH(t_n) - H(t_0)| / |H(t_0)|. Throws on an empty ledger.
double balance_variation(const PowerLedger& ledger);

//! Smooth initial velocity with its derivative.
struct InitialProfile
{
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;

    //! exp(-50 (x - 1/2)^2)
    static InitialProfile gaussian();
    //! 1 - x
    static InitialProfile linear_decreasing();
};

//! t* = -1 / min v0'(x) over [0, 1]. Throws NoShockError if v0' >= 0.
double shock_formation_time(const InitialProfile& profile);

//! max |v0'(x)| over [0, 1].
double max_slope(const InitialProfile& profile);

/*!
 * \brief Exact pre-shock solution by the method of characteristics.
 *
 * v(t, x) = v0(xi) with xi + t v0(xi) = x. The foot xi is unique for
 * t < t*; later times throw DomainError.
 */
class CharacteristicsOracle
{
public:
    explicit CharacteristicsOracle(InitialProfile profile);

    double shock_time() const { return t_star_; }
    double foot(double t, double x) const;
    double velocity(double t, double x) const;
    //! |xi + t v0(xi) - x| at the computed foot.
    double residual(double t, double x) const;

    const InitialProfile& profile() const { return profile_; }

private:
    InitialProfile profile_;
    double t_star_;
};

double characteristics_solution(const InitialProfile& profile, double t, double x);

//! (v_l + v_r) / 2.
double rankine_hugoniot_speed(double v_left, double v_right);

struct ShockDissipation
{
    double kinetic = 0.0;     // (v_r - v_l)^3 / 12
    double hamiltonian = 0.0; // (v_r - v_l)^3 (v_r + v_l) / 24
};

ShockDissipation shock_dissipation(double v_left, double v_right);

struct Front
{
    double x = 0.0;
    double v_left = 0.0;
    double v_right = 0.0;
};

/*!
 * \brief Locates the steepest descent of v_d and its edge states.
 *
 * The derivative is sampled ten times per element. A front exists when the
 * steepest |dv/dx| exceeds \p slope_threshold; the edge states are read five
 * viscous-layer widths (nu / max|v|) either side. Throws NoFrontError.
 */
Front detect_front(const Mesh1D& mesh, std::span<const double> v, double nu, double slope_threshold);

struct ShockSample
{
    double t = 0.0;
    double x = 0.0;
    double v_left = 0.0;
    double v_right = 0.0;
    double hamiltonian_rate = 0.0; // Rankine-Hugoniot shock term of dH/dt (<= 0)
};

/*!
 * \brief Inviscid entropy shock predicted from the characteristics.
 *
 * Starts at (t*, x*) and integrates x_s' = (v_l + v_r)/2, the edge states
 * being the outermost characteristic feet through x_s. Sampled every dt
 * up to t_end.
 */
std::vector<ShockSample> predict_shock(const InitialProfile& profile, double t_end, double dt);

//! -int dH_shock dt over the samples (trapezoidal), i.e. positive dissipation.
double predicted_shock_dissipation(std::span<const ShockSample> samples);

} // namespace phb

#endif
