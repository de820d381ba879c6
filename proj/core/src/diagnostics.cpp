#include "phburgers/diagnostics.hpp"

#include "phburgers/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace phb {

namespace {

double element_value(const std::array<double, 3>& c, const std::array<double, 3>& phi)
{
    return c[0] * phi[0] + c[1] * phi[1] + c[2] * phi[2];
}

// Integrates g(v_d, e_rd, dv_d/dx) with the element Gauss rule.
template<class G>
double integrate_fields(const Mesh1D& mesh, std::span<const double> v, std::span<const double> er, G&& g)
{
    double total = 0.0;
    std::size_t current = mesh.n_elems;
    std::array<double, 3> cv{}, cer{};
    for_each_quadrature_point(mesh, [&](std::size_t e, double, double w, const auto& phi, const auto& dphi) {
        if (e != current)
        {
            cv = element_coefficients(mesh, v, e);
            if (!er.empty())
                cer = element_coefficients(mesh, er, e);
            current = e;
        }
        total += w * g(element_value(cv, phi), element_value(cer, phi), element_value(cv, dphi));
    });
    return total;
}

void require_length(const Mesh1D& mesh, std::span<const double> v)
{
    if (v.size() != mesh.num_interior())
        throw std::invalid_argument("diagnostics: coefficient vector does not match the mesh");
}

// Golden-section minimizer on [a, b].
double golden_minimize(const std::function<double(double)>& f, double a, double b)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-15; ++it)
    {
        if (fc < fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Root of a continuous f on [a, b] with f(a) f(b) <= 0; Newton-safeguarded bisection.
double bracketed_root(const std::function<double(double)>& f, const std::function<double(double)>& df, double a,
                      double b)
{
    double fa = f(a);
    if (fa == 0.0)
        return a;
    double fb = f(b);
    if (fb == 0.0)
        return b;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it)
    {
        const double fx = f(x);
        if (fx == 0.0)
            return x;
        if ((fx < 0.0) == (fa < 0.0))
        {
            a = x;
            fa = fx;
        }
        else
        {
            b = x;
        }
        const double d = df(x);
        double next = d != 0.0 ? x - fx / d : 0.5 * (a + b);
        if (!(next > a && next < b))
            next = 0.5 * (a + b);
        if (std::abs(next - x) <= 1e-17 + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x))
            return next;
        x = next;
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
            break;
    }
    return x;
}

struct Extent
{
    double min = 0.0;
    double max = 0.0;
};

Extent value_extent(const InitialProfile& p)
{
    Extent ex{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    constexpr int samples = 4000;
    for (int k = 0; k <= samples; ++k)
    {
        const double v = p.value(static_cast<double>(k) / samples);
        ex.min = std::min(ex.min, v);
        ex.max = std::max(ex.max, v);
    }
    return ex;
}

// All roots of xi + t v0(xi) = x, sorted.
std::vector<double> characteristic_feet(const InitialProfile& p, const Extent& ex, double t, double x)
{
    const double pad = 1e-9 + 1e-6 * t;
    const double lo = x - t * ex.max - pad;
    const double hi = x - t * ex.min + pad;
    auto g = [&](double xi) { return xi + t * p.value(xi) - x; };
    auto dg = [&](double xi) { return 1.0 + t * p.derivative(xi); };

    std::vector<double> roots;
    constexpr int cells = 4000;
    double a = lo, ga = g(lo);
    for (int k = 1; k <= cells; ++k)
    {
        const double b = lo + (hi - lo) * k / cells;
        const double gb = g(b);
        if (ga == 0.0)
            roots.push_back(a);
        else if ((ga < 0.0) != (gb < 0.0) && gb != 0.0)
            roots.push_back(bracketed_root(g, dg, a, b));
        a = b;
        ga = gb;
    }
    if (ga == 0.0)
        roots.push_back(a);
    return roots;
}

} // namespace

double hamiltonian(const Mesh1D& mesh, std::span<const double> v)
{
    require_length(mesh, v);
    return integrate_fields(mesh, v, {}, [](double vq, double, double) { return vq * vq * vq / 6.0; });
}

double kinetic_energy(const Mesh1D& mesh, std::span<const double> v)
{
    require_length(mesh, v);
    return integrate_fields(mesh, v, {}, [](double vq, double, double) { return 0.5 * vq * vq; });
}

DissipationRates dissipation_rates(const Mesh1D& mesh, const State& state)
{
    require_length(mesh, state.v);
    if (!state.mode.is_viscous())
        return {};
    const double nu = state.mode.viscosity();
    if (state.e_r.size() != mesh.num_nodes())
        throw std::invalid_argument("dissipation_rates: e_r must hold one value per node");
    DissipationRates q;
    q.hamiltonian = integrate_fields(mesh, state.v, state.e_r,
                                     [](double vq, double erq, double) { return vq * erq * erq; })
                    / nu;
    q.kinetic = nu * integrate_fields(mesh, state.v, {}, [](double, double, double dv) { return dv * dv; });
    return q;
}

// ---------------------------------------------------------------------------

void PowerLedger::record(const Mesh1D& mesh, const State& state, double dt, int newton_iters)
{
    const auto q = dissipation_rates(mesh, state);
    record(state.t, dt, newton_iters, hamiltonian(mesh, state.v), kinetic_energy(mesh, state.v), q.hamiltonian,
           q.kinetic);
}

void PowerLedger::record(double t, double dt, int newton_iters, double H, double E, double qH, double qE)
{
    LedgerEntry entry{t, dt, newton_iters, H, E, qH, qE, 0.0, 0.0, 0.0};
    if (!entries_.empty())
    {
        const LedgerEntry& prev = entries_.back();
        if (!(t > prev.t))
            throw std::logic_error("PowerLedger: times must be strictly increasing");
        const double step = t - prev.t;
        entry.QH = prev.QH + 0.5 * step * (prev.qH + qH);
        entry.QE = prev.QE + 0.5 * step * (prev.qE + qE);
        entry.bal = H + entry.QH - entries_.front().H;
    }
    entries_.push_back(entry);
}

double PowerLedger::cumulative_hamiltonian_dissipation_at(double t) const
{
    if (entries_.empty())
        throw std::logic_error("PowerLedger: empty ledger");
    if (t <= entries_.front().t)
        return entries_.front().QH;
    if (t >= entries_.back().t)
        return entries_.back().QH;
    const auto it = std::upper_bound(entries_.begin(), entries_.end(), t,
                                     [](double value, const LedgerEntry& e) { return value < e.t; });
    const LedgerEntry& b = *it;
    const LedgerEntry& a = *(it - 1);
    const double s = (t - a.t) / (b.t - a.t);
    return a.QH + s * (b.QH - a.QH);
}

double balance_variation(const PowerLedger& ledger)
{
    if (ledger.empty())
        throw std::invalid_argument("balance_variation: empty ledger");
    const double h0 = ledger[0].H;
    double worst = 0.0;
    for (const auto& e : ledger.entries())
        worst = std::max(worst, std::abs(e.H + e.QH - h0));
    return worst / std::max(std::abs(h0), 1e-300);
}

// ---------------------------------------------------------------------------

InitialProfile InitialProfile::gaussian()
{
    return {"gaussian",
            [](double x) { return std::exp(-50.0 * (x - 0.5) * (x - 0.5)); },
            [](double x) { return -100.0 * (x - 0.5) * std::exp(-50.0 * (x - 0.5) * (x - 0.5)); }};
}

InitialProfile InitialProfile::linear_decreasing()
{
    return {"linear", [](double x) { return 1.0 - x; }, [](double) { return -1.0; }};
}

namespace {

double min_slope_location(const InitialProfile& profile)
{
    constexpr int samples = 10000;
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= samples; ++k)
    {
        const double d = profile.derivative(static_cast<double>(k) / samples);
        if (d < best_val)
        {
            best_val = d;
            best = k;
        }
    }
    const double a = std::max(0.0, (best - 1.0) / samples);
    const double b = std::min(1.0, (best + 1.0) / samples);
    const double x = golden_minimize(profile.derivative, a, b);
    return profile.derivative(x) <= best_val ? x : static_cast<double>(best) / samples;
}

} // namespace

double shock_formation_time(const InitialProfile& profile)
{
    const double x = min_slope_location(profile);
    const double slope = profile.derivative(x);
    if (!(slope < 0.0))
        throw NoShockError("initial profile '" + profile.name + "' is nowhere decreasing; no shock forms");
    return -1.0 / slope;
}

double max_slope(const InitialProfile& profile)
{
    constexpr int samples = 10000;
    double best = 0.0;
    int at = 0;
    for (int k = 0; k <= samples; ++k)
    {
        const double d = std::abs(profile.derivative(static_cast<double>(k) / samples));
        if (d > best)
        {
            best = d;
            at = k;
        }
    }
    const double a = std::max(0.0, (at - 1.0) / samples);
    const double b = std::min(1.0, (at + 1.0) / samples);
    const double x = golden_minimize([&](double s) { return -std::abs(profile.derivative(s)); }, a, b);
    return std::max(best, std::abs(profile.derivative(x)));
}

CharacteristicsOracle::CharacteristicsOracle(InitialProfile profile)
: profile_(std::move(profile))
, t_star_(std::numeric_limits<double>::infinity())
{
    try
    {
        t_star_ = shock_formation_time(profile_);
    }
    catch (const NoShockError&)
    {
        // rarefying data: characteristics never cross
    }
}

double CharacteristicsOracle::foot(double t, double x) const
{
    if (t < 0.0)
        throw DomainError("characteristics: negative time");
    if (t >= t_star_)
    {
        std::ostringstream msg;
        msg << "characteristics: t = " << t << " is not before the shock formation time " << t_star_;
        throw DomainError(msg.str());
    }
    if (t == 0.0)
        return x;
    auto g = [&](double xi) { return xi + t * profile_.value(xi) - x; };
    auto dg = [&](double xi) { return 1.0 + t * profile_.derivative(xi); };
    // g is strictly increasing before t*; expand a bracket around x.
    double a = x - 0.5, b = x + 0.5;
    for (int k = 0; k < 60 && g(a) > 0.0; ++k)
        a -= (b - a);
    for (int k = 0; k < 60 && g(b) < 0.0; ++k)
        b += (b - a);
    return bracketed_root(g, dg, a, b);
}

double CharacteristicsOracle::velocity(double t, double x) const
{
    return profile_.value(foot(t, x));
}

double CharacteristicsOracle::residual(double t, double x) const
{
    const double xi = foot(t, x);
    return std::abs(xi + t * profile_.value(xi) - x);
}

double characteristics_solution(const InitialProfile& profile, double t, double x)
{
    return CharacteristicsOracle(profile).velocity(t, x);
}

double rankine_hugoniot_speed(double v_left, double v_right)
{
    return 0.5 * (v_left + v_right);
}

ShockDissipation shock_dissipation(double v_left, double v_right)
{
    const double jump = v_right - v_left;
    const double cube = jump * jump * jump;
    return {cube / 12.0, cube * (v_right + v_left) / 24.0};
}

Front detect_front(const Mesh1D& mesh, std::span<const double> v, double nu, double slope_threshold)
{
    require_length(mesh, v);
    const std::size_t samples = 10 * mesh.n_elems;
    double steepest = std::numeric_limits<double>::infinity();
    double max_abs_slope = 0.0;
    double x_front = 0.0;
    for (std::size_t k = 0; k <= samples; ++k)
    {
        const double x = static_cast<double>(k) / static_cast<double>(samples);
        const double d = evaluate_derivative(mesh, v, x);
        max_abs_slope = std::max(max_abs_slope, std::abs(d));
        if (d < steepest)
        {
            steepest = d;
            x_front = x;
        }
    }
    if (!(max_abs_slope > slope_threshold) || !(steepest < 0.0))
    {
        std::ostringstream msg;
        msg << "no front: max |dv/dx| = " << max_abs_slope << " does not exceed " << slope_threshold;
        throw NoFrontError(msg.str());
    }

    const double vmax = norm_inf(v);
    const double offset = nu > 0.0 && vmax > 0.0 ? 5.0 * nu / vmax : 5.0 * mesh.h;
    Front f;
    f.x = x_front;
    f.v_left = evaluate(mesh, v, std::max(0.0, x_front - offset));
    f.v_right = evaluate(mesh, v, std::min(1.0, x_front + offset));
    return f;
}

std::vector<ShockSample> predict_shock(const InitialProfile& profile, double t_end, double dt)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("predict_shock: dt must be positive");
    const double x_min = min_slope_location(profile);
    const double t_star = -1.0 / profile.derivative(x_min);
    if (!(t_star > 0.0) || !std::isfinite(t_star))
        throw NoShockError("predict_shock: no shock forms");
    const Extent ex = value_extent(profile);

    auto edges = [&](double t, double x) {
        const auto feet = characteristic_feet(profile, ex, t, x);
        if (feet.empty())
            throw DomainError("predict_shock: lost the characteristics through the shock");
        return std::pair{profile.value(feet.front()), profile.value(feet.back())};
    };
    auto speed = [&](double t, double x) {
        const auto [vl, vr] = edges(t, x);
        return rankine_hugoniot_speed(vl, vr);
    };

    std::vector<ShockSample> out;
    double t = t_star;
    double x = x_min + t_star * profile.value(x_min);
    while (true)
    {
        const auto [vl, vr] = edges(t, x);
        out.push_back({t, x, vl, vr, shock_dissipation(vl, vr).hamiltonian});
        if (t >= t_end)
            break;
        const double step = std::min(dt, t_end - t);
        // classical RK4 on x_s' = (v_l + v_r) / 2
        const double k1 = speed(t, x);
        const double k2 = speed(t + 0.5 * step, x + 0.5 * step * k1);
        const double k3 = speed(t + 0.5 * step, x + 0.5 * step * k2);
        const double k4 = speed(t + step, x + step * k3);
        x += step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        t = (t_end - t <= dt) ? t_end : t + step;
    }
    return out;
}

double predicted_shock_dissipation(std::span<const ShockSample> samples)
{
    double q = 0.0;
    for (std::size_t k = 1; k < samples.size(); ++k)
        q -= 0.5 * (samples[k].t - samples[k - 1].t) * (samples[k].hamiltonian_rate + samples[k - 1].hamiltonian_rate);
    return q;
}

} // namespace phb
