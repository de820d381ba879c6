#include "oracles.hpp"

#include "phburgers/diagnostics.hpp"
#include "phburgers/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

TEST_SUITE("diagnostics")
{
    TEST_CASE("functionals match an independent quadrature")
    {
        std::mt19937 rng(31);
        const std::size_t n = 7;
        const auto mesh = phb::build_mesh(n);
        const auto v = oracle::random_state(n, rng, 0.3);
        const auto ve = oracle::to_eigen(v);
        CHECK(phb::hamiltonian(mesh, v)
              == doctest::Approx(oracle::integrate_field(n, ve, [](double x) { return x * x * x / 6.0; }))
                     .epsilon(1e-13));
        CHECK(phb::kinetic_energy(mesh, v)
              == doctest::Approx(oracle::integrate_field(n, ve, [](double x) { return x * x / 2.0; }))
                     .epsilon(1e-13));
        CHECK_THROWS(phb::hamiltonian(mesh, std::vector<double>(3, 1.0)));
    }

    TEST_CASE("Gaussian profile closed forms")
    {
        const auto p = phb::InitialProfile::gaussian();
        CHECK(p.value(0.5) == 1.0);
        CHECK(p.derivative(0.6) == doctest::Approx(-10.0 * std::exp(-0.5)));
        // Steepest descent at x = 0.6, slope -10 exp(-1/2).
        CHECK(phb::shock_formation_time(p) == doctest::Approx(std::exp(0.5) / 10.0).epsilon(1e-12));
        CHECK(phb::max_slope(p) == doctest::Approx(10.0 * std::exp(-0.5)).epsilon(1e-12));
        CHECK(phb::shock_formation_time(phb::InitialProfile::linear_decreasing()) == doctest::Approx(1.0));

        phb::InitialProfile rising{"rising", [](double x) { return x; }, [](double) { return 1.0; }};
        CHECK_THROWS_AS(phb::shock_formation_time(rising), phb::NoShockError);
    }

    TEST_CASE("characteristics")
    {
        const auto p = phb::InitialProfile::gaussian();
        const phb::CharacteristicsOracle o(p);
        for (double t : {0.0, 0.05, 0.12, 0.16})
            for (double x : {0.2, 0.5, 0.55, 0.62, 0.9})
            {
                const double xi = o.foot(t, x);
                CHECK(xi + t * p.value(xi) == doctest::Approx(x).epsilon(1e-12));
                CHECK(o.velocity(t, x) == doctest::Approx(p.value(xi)));
                CHECK(o.residual(t, x) < 1e-12);
            }
        CHECK(phb::characteristics_solution(p, 0.0, 0.3) == doctest::Approx(p.value(0.3)));
        // Linear data: v = (1 - x) / (1 - t).
        const auto lin = phb::InitialProfile::linear_decreasing();
        CHECK(phb::characteristics_solution(lin, 0.5, 0.25) == doctest::Approx(1.5));
        CHECK_THROWS_AS(o.velocity(0.2, 0.6), phb::DomainError);
        CHECK_THROWS_AS(o.velocity(-0.1, 0.6), phb::DomainError);
    }

    TEST_CASE("shock formulas")
    {
        CHECK(phb::rankine_hugoniot_speed(1.0, 0.0) == 0.5);
        CHECK(phb::rankine_hugoniot_speed(0.8, 0.2) == doctest::Approx(0.5));
        const auto d = phb::shock_dissipation(1.0, 0.0);
        CHECK(d.kinetic == doctest::Approx(-1.0 / 12.0));
        CHECK(d.hamiltonian == doctest::Approx(-1.0 / 24.0));
        const auto d2 = phb::shock_dissipation(0.8, 0.2);
        CHECK(d2.kinetic == doctest::Approx(std::pow(-0.6, 3) / 12.0));
        CHECK(d2.hamiltonian == doctest::Approx(std::pow(-0.6, 3) * 1.0 / 24.0));
    }

    TEST_CASE("front detection on a tanh layer")
    {
        const std::size_t n = 1000;
        const auto mesh = phb::build_mesh(n);
        const double nu = 1e-3;
        const double vl = 0.8, vr = 0.1;
        // Travelling viscous shock profile centred at 0.6, faded out near both ends.
        auto f = [&](double x) {
            const double fade = 1.0 - std::exp(-std::pow(x / 0.05, 2)) - std::exp(-std::pow((1.0 - x) / 0.05, 2));
            return fade * (0.5 * (vl + vr) - 0.5 * (vl - vr) * std::tanh((vl - vr) * (x - 0.6) / (4.0 * nu)));
        };
        const auto v = phb::interpolate(mesh, f);
        const auto front = phb::detect_front(mesh, v, nu, 20.0);
        CHECK(front.x == doctest::Approx(0.6).epsilon(2e-3));
        CHECK(front.v_left > 0.6);
        CHECK(front.v_right < 0.3);
        // The layer is symmetric about its centre, so the edge mean is exact.
        CHECK(phb::rankine_hugoniot_speed(front.v_left, front.v_right) == doctest::Approx(0.45).epsilon(1e-3));

        const auto flat = phb::interpolate(mesh, [](double x) { return std::sin(M_PI * x); });
        CHECK_THROWS_AS(phb::detect_front(mesh, flat, nu, 20.0), phb::NoFrontError);
    }

    TEST_CASE("ledger accumulates with the trapezoidal rule")
    {
        phb::PowerLedger l;
        l.record(0.0, 0.0, 0, 1.0, 2.0, 1.0, 0.5);
        l.record(0.1, 0.1, 3, 0.9, 1.9, 3.0, 0.5);
        l.record(0.3, 0.2, 2, 0.5, 1.8, 1.0, 0.5);
        CHECK(l.size() == 3);
        CHECK(l[1].QH == doctest::Approx(0.2));
        CHECK(l[2].QH == doctest::Approx(0.6));
        CHECK(l[2].QE == doctest::Approx(0.15));
        CHECK(l[1].bal == doctest::Approx(0.1));
        CHECK(l[2].bal == doctest::Approx(0.1));
        CHECK(phb::balance_variation(l) == doctest::Approx(0.1));
        CHECK(l.cumulative_hamiltonian_dissipation_at(0.2) == doctest::Approx(0.4));
        CHECK(l.cumulative_hamiltonian_dissipation_at(-1.0) == doctest::Approx(0.0));
        CHECK(l.cumulative_hamiltonian_dissipation_at(5.0) == doctest::Approx(0.6));
        CHECK_THROWS(l.record(0.3, 0.0, 1, 0.0, 0.0, 0.0, 0.0));

        phb::PowerLedger empty;
        CHECK_THROWS(phb::balance_variation(empty));
        CHECK_THROWS(empty.cumulative_hamiltonian_dissipation_at(0.1));
    }

    TEST_CASE("dissipation rates vanish for inviscid states")
    {
        const auto ops = phb::assemble_operators(phb::build_mesh(5));
        std::mt19937 rng(32);
        const auto s = phb::make_state(ops, oracle::random_state(5, rng), 0.0, phb::Mode::inviscid());
        const auto q = phb::dissipation_rates(ops.mesh, s);
        CHECK(q.hamiltonian == 0.0);
        CHECK(q.kinetic == 0.0);
    }

    TEST_CASE("kinetic dissipation rate is nu times the squared slope")
    {
        const std::size_t n = 6;
        std::mt19937 rng(33);
        const auto ops = phb::assemble_operators(phb::build_mesh(n));
        const auto v = oracle::random_state(n, rng);
        const auto s = phb::make_state(ops, v, 0.0, phb::Mode::viscous(0.1));
        double ref = 0.0;
        const auto ve = oracle::to_eigen(v);
        oracle::quadrature(n, [&](std::size_t e, const auto& nodes, double x, double w) {
            const double d = oracle::field_derivative(n, ve, e, nodes, x);
            ref += w * 0.1 * d * d;
        });
        CHECK(phb::dissipation_rates(ops.mesh, s).kinetic == doctest::Approx(ref).epsilon(1e-12));
    }

    TEST_CASE("predicted inviscid shock")
    {
        const auto p = phb::InitialProfile::gaussian();
        const auto samples = phb::predict_shock(p, 0.4, 1e-3);
        REQUIRE(samples.size() > 100);
        CHECK(samples.front().t == doctest::Approx(phb::shock_formation_time(p)));
        CHECK(samples.front().x == doctest::Approx(0.6 + phb::shock_formation_time(p) * std::exp(-0.5)).epsilon(1e-6));
        for (std::size_t k = 1; k < samples.size(); ++k)
        {
            CHECK(samples[k].x > samples[k - 1].x);
            CHECK(samples[k].v_left >= samples[k].v_right);
            CHECK(samples[k].hamiltonian_rate <= 0.0);
        }
        CHECK(phb::predicted_shock_dissipation(samples) > 0.0);
        CHECK_THROWS(phb::predict_shock(p, 0.4, 0.0));
    }
}
