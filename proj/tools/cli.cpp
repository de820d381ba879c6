#include "cli.hpp"

#include "phburgers/diagnostics.hpp"
#include "phburgers/errors.hpp"
#include "phburgers/harness.hpp"
#include "phburgers/integrator.hpp"
#include "phburgers/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace phb::cli {

namespace {

struct RunOptions
{
    double h = 0.0;
    std::size_t n_elems = 0;
    double alpha = 1.0;
    double beta = 0.0;
    double t_final = 0.4;
    double newton_tol = 1e-10;
    double dt_min_factor = 1.0 / 4096.0;
    std::size_t snapshots = 50;
    std::string out_dir = "out";
};

struct SweepOptions
{
    std::vector<double> alphas{0.5, 1.0, 2.0};
    std::vector<double> betas{0.0, 1.0, 2.0, 5.0};
    std::vector<double> hs{5e-4, 1e-3, 2.5e-3, 5e-3, 1e-2};
    double t_final = 0.4;
    double newton_tol = 1e-10;
    double dt_min_factor = 1.0 / 4096.0;
    std::size_t workers = 0;
    std::string format = "csv";
    std::string out_dir = "out";
};

struct OracleOptions
{
    std::vector<double> shock_speed;
    std::vector<double> shock_dissipation;
    std::vector<double> characteristics;
    bool shock_time = false;
};

std::size_t elements_from(double h, std::size_t n_elems)
{
    if (n_elems > 0)
        return n_elems;
    if (!(h > 0.0))
        return 100;
    return build_mesh_from_h(h).n_elems;
}

int do_run(const RunOptions& o, std::ostream& err)
{
    RunConfig c;
    c.n_elems = elements_from(o.h, o.n_elems);
    c.alpha = o.alpha;
    c.beta = o.beta;
    c.t_final = o.t_final;
    c.newton_tol = o.newton_tol;
    c.dt_min_factor = o.dt_min_factor;
    c.snapshots = o.snapshots;

    const SimulationResult r = run_simulation(c);
    write_run_outputs(r, o.out_dir);
    err << "run: h=" << format_double(c.h()) << " alpha=" << format_double(c.alpha) << " beta="
        << format_double(c.beta) << " nu=" << format_double(c.viscosity()) << '\n'
        << "run: t_reached=" << format_double(r.summary.t_reached) << " steps=" << r.summary.n_steps
        << " rejections=" << r.summary.rejections << " Var=" << format_double(r.summary.var)
        << " termination=" << to_string(r.summary.termination) << '\n'
        << "run: wrote " << (std::filesystem::path(o.out_dir) / "ledger.csv").string() << " and "
        << r.snapshots.size() << " snapshots\n";
    return r.summary.completed() ? ExitCode::ok : ExitCode::dt_underflow;
}

int do_sweep(const SweepOptions& o, std::ostream& err)
{
    const TableFormat format = parse_table_format(o.format);
    SweepGrid grid;
    grid.alphas = o.alphas;
    grid.betas = o.betas;
    grid.hs = o.hs;
    grid.base.t_final = o.t_final;
    grid.base.newton_tol = o.newton_tol;
    grid.base.dt_min_factor = o.dt_min_factor;
    grid.validate();

    err << "sweep: " << grid.size() << " cells\n";
    const SweepResult result = run_sweep(grid, o.workers);
    const auto path = std::filesystem::path(o.out_dir) / (format == TableFormat::csv ? "table.csv" : "table.txt");
    write_file_atomic(path, emit_table(result, format));
    std::size_t early = 0;
    for (const auto& cell : result.cells)
        early += cell.termination == "completed" ? 0 : 1;
    err << "sweep: wrote " << path.string() << " (" << early << " cells terminated early)\n";
    return ExitCode::ok;
}

int do_verify(std::ostream& err)
{
    const auto checks = run_verification();
    for (const auto& c : checks)
        err << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    const bool ok = all_passed(checks);
    err << "verify: " << (ok ? "all checks passed" : "FAILED") << '\n';
    return ok ? ExitCode::ok : ExitCode::verification_failure;
}

int do_oracle(const OracleOptions& o, std::ostream& out)
{
    out.precision(17);
    bool any = false;
    if (!o.shock_speed.empty())
    {
        out << "shock_speed " << rankine_hugoniot_speed(o.shock_speed[0], o.shock_speed[1]) << '\n';
        any = true;
    }
    if (!o.shock_dissipation.empty())
    {
        const auto d = shock_dissipation(o.shock_dissipation[0], o.shock_dissipation[1]);
        out << "dE " << d.kinetic << "\ndH " << d.hamiltonian << '\n';
        any = true;
    }
    if (!o.characteristics.empty())
    {
        out << "v " << characteristics_solution(InitialProfile::gaussian(), o.characteristics[0], o.characteristics[1])
            << '\n';
        any = true;
    }
    if (o.shock_time)
    {
        out << "t_star " << shock_formation_time(InitialProfile::gaussian()) << '\n';
        any = true;
    }
    if (!any)
        throw UsageError("oracle: choose at least one of --shock-speed, --shock-dissipation, --characteristics, "
                         "--shock-time");
    return ExitCode::ok;
}

void add_run_options(CLI::App& sub, RunOptions& o)
{
    auto* h = sub.add_option("--h", o.h, "Element width (1/h must be an integer)");
    sub.add_option("--n-elems", o.n_elems, "Number of elements")->excludes(h);
    sub.add_option("--alpha", o.alpha, "Initial step multiplier, dt0 = alpha h")->capture_default_str();
    sub.add_option("--beta", o.beta, "Viscosity multiplier, nu = beta h / alpha")->capture_default_str();
    sub.add_option("--t-final", o.t_final, "Final time")->capture_default_str();
    sub.add_option("--newton-tol", o.newton_tol, "Relative Newton tolerance")->capture_default_str();
    sub.add_option("--dt-min-factor", o.dt_min_factor, "dt_min = dt0 * factor")->capture_default_str();
    sub.add_option("--snapshots", o.snapshots, "Number of snapshot intervals")->capture_default_str();
    sub.add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
}

void add_sweep_options(CLI::App& sub, SweepOptions& o)
{
    sub.add_option("--alpha", o.alphas, "alpha values")->delimiter(',')->capture_default_str();
    sub.add_option("--beta", o.betas, "beta values")->delimiter(',')->capture_default_str();
    sub.add_option("--h", o.hs, "Element widths")->delimiter(',')->capture_default_str();
    sub.add_option("--t-final", o.t_final, "Final time")->capture_default_str();
    sub.add_option("--newton-tol", o.newton_tol, "Relative Newton tolerance")->capture_default_str();
    sub.add_option("--dt-min-factor", o.dt_min_factor, "dt_min = dt0 * factor")->capture_default_str();
    sub.add_option("--workers", o.workers, "Worker threads (0 = all cores)")->capture_default_str();
    sub.add_option("--format", o.format, "Table format: csv or text")->capture_default_str();
    sub.add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
}

// Reads flat key=value files; keys outside a section belong to the chosen subcommand.
class SubcommandConfig : public CLI::ConfigINI
{
public:
    explicit SubcommandConfig(std::string section) : section_(std::move(section)) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override
    {
        auto items = CLI::ConfigINI::from_config(input);
        if (section_.empty())
            return items;
        for (auto& item : items)
            if (item.parents.empty() && item.name != "--")
                item.parents.push_back(section_);
        return items;
    }

private:
    std::string section_;
};

std::string chosen_subcommand(int argc, const char* const* argv)
{
    for (int i = 1; i < argc; ++i)
    {
        const std::string_view a = argv[i];
        if (a == "run" || a == "sweep")
            return std::string(a);
    }
    return {};
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Port-Hamiltonian P2 finite elements for the Burgers equation", "phburgers"};
    // "-h" would collide with the --h option.
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
    app.config_formatter(std::make_shared<SubcommandConfig>(chosen_subcommand(argc, argv)));

    RunOptions run_opts;
    SweepOptions sweep_opts;
    OracleOptions oracle_opts;

    auto* run = app.add_subcommand("run", "Run one simulation and write its ledger and snapshots");
    add_run_options(*run, run_opts);
    run->configurable()->fallthrough();

    auto* sweep = app.add_subcommand("sweep", "Run the (alpha, beta, h) grid and write the summary table");
    add_sweep_options(*sweep, sweep_opts);
    sweep->configurable()->fallthrough();

    auto* verify = app.add_subcommand("verify", "Check structural identities and oracles");

    auto* oracle = app.add_subcommand("oracle", "Print analytic reference values");
    oracle->add_option("--shock-speed", oracle_opts.shock_speed, "Rankine-Hugoniot speed of (v_l, v_r)")
        ->expected(2);
    oracle->add_option("--shock-dissipation", oracle_opts.shock_dissipation, "Shock dissipation rates of (v_l, v_r)")
        ->expected(2);
    oracle->add_option("--characteristics", oracle_opts.characteristics,
                       "Pre-shock solution at (t, x) for the Gaussian data")
        ->expected(2);
    oracle->add_flag("--shock-time", oracle_opts.shock_time, "Shock formation time of the Gaussian data");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? ExitCode::ok : ExitCode::usage_error;
    }

    try
    {
        if (*run)
            return do_run(run_opts, err);
        if (*sweep)
            return do_sweep(sweep_opts, err);
        if (*verify)
            return do_verify(err);
        return do_oracle(oracle_opts, out);
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return ExitCode::usage_error;
    }
}

} // namespace phb::cli
