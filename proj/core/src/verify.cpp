#include "phburgers/verify.hpp"

#include "phburgers/diagnostics.hpp"
#include "phburgers/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace phb {

namespace {

std::string describe(double value, double tol)
{
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << value << " (tol " << tol << ")";
    return os.str();
}

VerifyCheck bounded(std::string name, double value, double tol)
{
    return {std::move(name), value <= tol, describe(value, tol)};
}

Vector random_state(std::mt19937_64& rng, std::size_t n, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(n);
    for (double& x : v)
        x = u(rng);
    return v;
}

double structure_defect(std::size_t n_elems)
{
    const FeOperators ops = assemble_operators(build_mesh(n_elems));
    const double scale = ops.skew.max_abs();
    return std::max((ops.skew + ops.skew.transposed()).max_abs(),
                    (ops.dissipative - ops.skew.transposed()).max_abs())
           / scale;
}

} // namespace

std::vector<VerifyCheck> run_verification(unsigned seed)
{
    std::vector<VerifyCheck> checks;
    std::mt19937_64 rng(seed);

    double defect = 0.0;
    for (std::size_t n : {1u, 2u, 7u, 100u})
        defect = std::max(defect, structure_defect(n));
    checks.push_back(bounded("skew D and R = D^T", defect, 1e-14));

    const FeOperators ops = assemble_operators(build_mesh(10));
    const std::size_t n = ops.size();

    {
        double worst = 0.0;
        for (int k = 0; k < 20; ++k)
        {
            State s = make_state(ops, random_state(rng, n, -1.0, 1.0), 0.0, Mode::inviscid());
            const Vector w = rhs(ops, s);
            const double rate = dot(s.e, ops.mass.multiply(w));
            worst = std::max(worst, std::abs(rate) / (norm2(s.e) * norm2(s.v)));
        }
        checks.push_back(bounded("inviscid power balance", worst, 1e-12));
    }
    {
        double worst = 0.0;
        const double nu = 0.05;
        for (int k = 0; k < 20; ++k)
        {
            State s = make_state(ops, random_state(rng, n, 0.2, 1.0), 0.0, Mode::viscous(nu));
            const Vector w = rhs(ops, s);
            const double rate = dot(s.e, ops.mass.multiply(w));
            const double q = dissipation_rates(ops.mesh, s).hamiltonian;
            worst = std::max(worst, std::abs(rate + q) / std::max(std::abs(q), 1e-300));
        }
        checks.push_back(bounded("viscous power balance", worst, 1e-10));
    }
    {
        const std::size_t m = n + ops.port_size() + 4;
        double worst = 0.0;
        for (int k = 0; k < 10; ++k)
        {
            const Vector x = random_state(rng, m, -1.0, 1.0);
            const Vector jx = interconnection_apply(ops, x);
            worst = std::max(worst, std::abs(dot(x, jx)) / (norm2(x) * norm2(jx)));
        }
        checks.push_back(bounded("Dirac structure pairing", worst, 1e-13));
    }
    {
        // First-order decay of the finite-difference defect in epsilon.
        State s = make_state(ops, random_state(rng, n, 0.3, 1.0), 0.0, Mode::viscous(0.05));
        const double dt = 0.01;
        const Vector w = random_state(rng, n, -1.0, 1.0);
        const Vector f0 = cn_residual(ops, s, s.v, dt);
        const Vector jw = cn_jacobian_apply(ops, s, dt, w);
        auto defect_at = [&](double eps) {
            Vector v = s.v;
            for (std::size_t i = 0; i < n; ++i)
                v[i] += eps * w[i];
            Vector d = cn_residual(ops, s, v, dt);
            for (std::size_t i = 0; i < n; ++i)
                d[i] = (d[i] - f0[i]) / eps - jw[i];
            return norm2(d);
        };
        const double slope = std::log10(defect_at(1e-3) / defect_at(1e-5)) / 2.0;
        checks.push_back({"Jacobian vs finite differences", std::abs(slope - 1.0) < 0.2,
                          "observed slope " + std::to_string(slope)});
    }
    {
        const Mesh1D fine = build_mesh(1000);
        const Vector v0 = interpolate(fine, InitialProfile::gaussian().value);
        const double pi = std::numbers::pi;
        const double h_exact = std::sqrt(pi / 150.0) * std::erf(0.5 * std::sqrt(150.0)) / 6.0;
        const double e_exact = 0.5 * std::sqrt(pi / 100.0) * std::erf(0.5 * std::sqrt(100.0));
        checks.push_back(bounded("initial Hamiltonian", std::abs(hamiltonian(fine, v0) - h_exact), 1e-6));
        checks.push_back(bounded("initial kinetic energy", std::abs(kinetic_energy(fine, v0) - e_exact), 1e-6));
    }
    {
        const CharacteristicsOracle oracle(InitialProfile::gaussian());
        double worst = 0.0;
        for (double t : {0.02, 0.08, 0.15})
            for (double x = 0.05; x < 1.0; x += 0.1)
                worst = std::max(worst, oracle.residual(t, x));
        checks.push_back(bounded("characteristics residual", worst, 1e-12));
        checks.push_back(bounded("shock formation time", std::abs(oracle.shock_time() - std::exp(0.5) / 10.0), 1e-10));
    }
    {
        RunConfig c;
        c.n_elems = 50;
        c.t_final = 0.05;
        c.fixed_dt = 0.005;
        c.snapshots = 0;
        const SimulationResult r = run_simulation(c);
        checks.push_back({"short inviscid run", r.summary.completed() && r.summary.var < 1e-4,
                          "Var " + describe(r.summary.var, 1e-4)});
    }
    return checks;
}

bool all_passed(const std::vector<VerifyCheck>& checks)
{
    return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

} // namespace phb
