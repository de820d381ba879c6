#include "oracles.hpp"

#include "phburgers/errors.hpp"
#include "phburgers/integrator.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

namespace {

std::vector<double> difference(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        d[i] = a[i] - b[i];
    return d;
}

// Crank-Nicolson step by Picard iteration v = v_n + dt/2 M^{-1} (flow(v) + flow(v_n)).
std::vector<double> picard_step(const phb::FeOperators& ops, const phb::State& sn, double dt)
{
    const auto fn = phb::flow(ops, sn);
    std::vector<double> v = sn.v;
    for (int k = 0; k < 200; ++k)
    {
        const auto s = phb::make_state(ops, v, sn.t + dt, sn.mode);
        auto f = phb::flow(ops, s);
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] = 0.5 * dt * (f[i] + fn[i]);
        const auto w = ops.mass_factor.solve(f);
        std::vector<double> next(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            next[i] = sn.v[i] + w[i];
        const double change = phb::norm_inf(difference(next, v));
        v = next;
        if (change < 1e-15)
            break;
    }
    return v;
}

} // namespace

TEST_SUITE("integrator")
{
    TEST_CASE("run configuration")
    {
        phb::RunConfig c;
        c.n_elems = 200;
        c.alpha = 2.0;
        c.beta = 1.0;
        CHECK(c.h() == doctest::Approx(5e-3));
        CHECK(c.dt0() == doctest::Approx(1e-2));
        CHECK(c.viscosity() == doctest::Approx(2.5e-3));
        CHECK(c.mode().is_viscous());
        CHECK_NOTHROW(c.validate());

        auto bad = [](auto edit) {
            phb::RunConfig c;
            edit(c);
            CHECK_THROWS_AS(c.validate(), phb::ConfigError);
        };
        bad([](phb::RunConfig& c) { c.n_elems = 0; });
        bad([](phb::RunConfig& c) { c.alpha = 0.0; });
        bad([](phb::RunConfig& c) { c.beta = -1.0; });
        bad([](phb::RunConfig& c) { c.t_final = std::nan(""); });
        bad([](phb::RunConfig& c) { c.dt_min_factor = 2.0; });
        bad([](phb::RunConfig& c) { c.shrink = 1.0; });
        bad([](phb::RunConfig& c) { c.fixed_dt = -1.0; });
    }

    TEST_CASE("step controller shrinks, grows up to the cap and underflows")
    {
        phb::RunConfig c;
        c.n_elems = 100;
        phb::TimeStepController ctl(c);
        CHECK(ctl.dt() == doctest::Approx(1e-2));
        CHECK(ctl.dt_cap() == doctest::Approx(1e-2 * c.dt_cap_factor));
        CHECK(ctl.dt_min() == doctest::Approx(1e-2 / 4096.0));

        for (int k = 0; k < 4; ++k)
            ctl.accepted(2, false);
        CHECK(ctl.dt() == doctest::Approx(1e-2));
        ctl.accepted(2, false);
        CHECK(ctl.dt() == doctest::Approx(1.5e-2));
        for (int k = 0; k < 50; ++k)
            ctl.accepted(1, false);
        CHECK(ctl.dt() == doctest::Approx(ctl.dt_cap()));

        // A hard step resets the streak.
        phb::TimeStepController ctl2(c);
        for (int k = 0; k < 4; ++k)
            ctl2.accepted(2, false);
        ctl2.accepted(7, false);
        ctl2.accepted(2, false);
        CHECK(ctl2.dt() == doctest::Approx(1e-2));

        CHECK(ctl2.rejected());
        CHECK(ctl2.dt() == doctest::Approx(5e-3));
        int shrinks = 1;
        while (ctl2.rejected())
            ++shrinks;
        CHECK(shrinks == 12);

        c.fixed_dt = 1e-3;
        phb::TimeStepController fixed(c);
        CHECK_FALSE(fixed.adaptive());
        for (int k = 0; k < 10; ++k)
            fixed.accepted(1, false);
        CHECK(fixed.dt() == 1e-3);
        CHECK_FALSE(fixed.rejected());
    }

    TEST_CASE("Jacobian matches finite differences")
    {
        std::mt19937 rng(21);
        std::normal_distribution<double> g;
        const auto ops = phb::assemble_operators(phb::build_mesh(8));
        for (bool viscous : {false, true})
        {
            const auto mode = viscous ? phb::Mode::viscous(0.05) : phb::Mode::inviscid();
            const auto sn = phb::make_state(ops, oracle::random_state(8, rng), 0.0, mode);
            const auto trial = phb::make_state(ops, oracle::random_state(8, rng), 0.0, mode);
            std::vector<double> d(ops.size());
            for (auto& x : d)
                x = g(rng);
            const double dt = 0.01;
            const auto jd = phb::cn_jacobian_apply(ops, trial, dt, d);
            const auto f0 = phb::cn_residual(ops, sn, trial.v, dt);
            double prev = 0.0;
            for (double eps : {1e-3, 1e-4})
            {
                std::vector<double> vp = trial.v;
                for (std::size_t i = 0; i < vp.size(); ++i)
                    vp[i] += eps * d[i];
                const auto f1 = phb::cn_residual(ops, sn, vp, dt);
                std::vector<double> err(f0.size());
                for (std::size_t i = 0; i < err.size(); ++i)
                    err[i] = f1[i] - f0[i] - eps * jd[i];
                const double e = phb::norm2(err);
                // Second-order remainder.
                if (prev > 0.0)
                    CHECK(prev / e == doctest::Approx(100.0).epsilon(0.1));
                prev = e;
            }
        }
    }

    TEST_CASE("Newton agrees with a Picard iteration of the same step")
    {
        std::mt19937 rng(22);
        const auto ops = phb::assemble_operators(phb::build_mesh(10));
        for (bool viscous : {false, true})
        {
            const auto mode = viscous ? phb::Mode::viscous(0.05) : phb::Mode::inviscid();
            const auto sn = phb::make_state(ops, oracle::random_state(10, rng), 0.0, mode);
            const double dt = 2e-3;
            const auto nr = phb::newton_solve(ops, sn, dt, 1e-13, 20);
            CHECK(nr.iterations >= 1);
            CHECK(nr.iterations <= 6);
            const auto ref = picard_step(ops, sn, dt);
            CHECK(phb::norm_inf(difference(nr.state.v, ref)) < 1e-11);
            CHECK(phb::norm_inf(phb::cn_residual(ops, sn, nr.state.v, dt)) < 1e-12);
        }
        CHECK_THROWS(phb::newton_solve(ops, phb::make_state(ops, oracle::random_state(10, rng), 0.0,
                                                            phb::Mode::inviscid()),
                                       0.0, 1e-10, 10));
    }

    TEST_CASE("inviscid step conserves H to solver tolerance")
    {
        const auto ops = phb::assemble_operators(phb::build_mesh(50));
        const auto sn = phb::make_state(ops, phb::interpolate(ops.mesh, phb::InitialProfile::gaussian().value), 0.0,
                                        phb::Mode::inviscid());
        const auto nr = phb::newton_solve(ops, sn, 0.02, 1e-13, 20);
        // Crank-Nicolson is not a discrete gradient; the drift is O(dt^3).
        const double h0 = phb::hamiltonian(ops.mesh, sn.v);
        CHECK(std::abs(phb::hamiltonian(ops.mesh, nr.state.v) - h0) < 1e-3 * std::abs(h0));
    }

    TEST_CASE("fixed-step run lands on t_final with the expected step count")
    {
        phb::RunConfig c;
        c.n_elems = 40;
        c.t_final = 0.05;
        c.fixed_dt = 0.01;
        c.snapshots = 5;
        const auto r = phb::run_simulation(c);
        CHECK(r.summary.completed());
        CHECK(r.summary.n_steps == 5);
        CHECK(r.summary.t_reached == 0.05);
        CHECK(r.ledger.size() == 6);
        CHECK(r.snapshots.size() == 6);
        CHECK(r.snapshots.front().t == 0.0);
        CHECK(r.snapshots.back().t == 0.05);
        CHECK(r.snapshots.front().x.size() == 81);
        CHECK(r.snapshots.front().v.front() == 0.0);
    }

    TEST_CASE("adaptive viscous run completes and the ledger is consistent")
    {
        phb::RunConfig c;
        c.n_elems = 100;
        c.beta = 1.0;
        c.t_final = 0.2;
        c.snapshots = 4;
        const auto r = phb::run_simulation(c);
        CHECK(r.summary.completed());
        CHECK(r.summary.t_reached == 0.2);
        CHECK(r.summary.var < 5e-3);
        const auto& entries = r.ledger.entries();
        for (std::size_t k = 1; k < entries.size(); ++k)
        {
            CHECK(entries[k].t > entries[k - 1].t);
            CHECK(entries[k].t - entries[k - 1].t == doctest::Approx(entries[k].dt));
            CHECK(entries[k].QH >= entries[k - 1].QH);
        }
        CHECK(r.final_state.t == 0.2);
        CHECK(r.snapshots.size() == 5);
    }

    TEST_CASE("an unstable configuration terminates with dt underflow")
    {
        phb::RunConfig c;
        c.n_elems = 50;
        c.beta = 2.0;
        c.t_final = 0.1;
        c.snapshots = 3;
        const auto r = phb::run_simulation(c);
        CHECK_FALSE(r.summary.completed());
        CHECK(r.summary.termination == phb::FailureReason::dt_underflow);
        CHECK(r.summary.t_reached < 0.1);
        CHECK(r.summary.rejections >= 12);
        CHECK(r.snapshots.back().t == r.summary.t_reached);
    }

    TEST_CASE("failure reasons have names")
    {
        CHECK(std::string(phb::to_string(phb::FailureReason::none)) == "completed");
        CHECK(std::string(phb::to_string(phb::FailureReason::dt_underflow)) == "dt_underflow");
    }
}
