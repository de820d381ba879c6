#include "phburgers/harness.hpp"

#include "phburgers/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>
#include <thread>

namespace phb {

namespace {

std::size_t elements_for(double h)
{
    const double n = 1.0 / h;
    const double rounded = std::round(n);
    if (!(h > 0.0) || !std::isfinite(n) || std::abs(n - rounded) > 1e-9 * rounded || rounded < 1.0)
        throw ConfigError("h = " + format_double(h) + " does not divide the unit interval");
    return static_cast<std::size_t>(rounded);
}

std::string sanitize(std::string s)
{
    std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

template<class T>
T parse_number(std::string_view field, std::size_t line_no)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw UsageError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
    return value;
}

std::string short_sci(double x, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits, x);
    return buf;
}

} // namespace

void SweepGrid::validate() const
{
    for (double a : alphas)
        if (!(a > 0.0) || !std::isfinite(a))
            throw ConfigError("SweepGrid: alpha must be positive");
    for (double b : betas)
        if (!(b >= 0.0) || !std::isfinite(b))
            throw ConfigError("SweepGrid: beta must be non-negative");
    for (double h : hs)
        elements_for(h);
}

RunConfig cell_config(const SweepGrid& grid, double alpha, double beta, double h)
{
    RunConfig c = grid.base;
    c.alpha = alpha;
    c.beta = beta;
    c.n_elems = elements_for(h);
    c.snapshots = 0;
    return c;
}

SweepCell run_cell(const SweepGrid& grid, double alpha, double beta, double h)
{
    SweepCell cell;
    cell.alpha = alpha;
    cell.beta = beta;
    cell.h = h;
    try
    {
        const SimulationResult r = run_simulation(cell_config(grid, alpha, beta, h));
        cell.var = r.summary.var;
        cell.t_final = r.summary.t_reached;
        cell.n_steps = r.summary.n_steps;
        cell.termination = to_string(r.summary.termination);
    }
    catch (const std::exception& e)
    {
        cell.termination = sanitize(std::string("error: ") + e.what());
    }
    return cell;
}

SweepResult run_sweep(const SweepGrid& grid, std::size_t workers)
{
    struct Job
    {
        double alpha, beta, h;
    };
    std::vector<Job> jobs;
    for (double a : grid.alphas)
        for (double b : grid.betas)
            for (double h : grid.hs)
                jobs.push_back({a, b, h});

    SweepResult result;
    result.cells.resize(jobs.size());
    if (jobs.empty())
        return result;

    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs.size());

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
            result.cells[i] = run_cell(grid, jobs[i].alpha, jobs[i].beta, jobs[i].h);
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(work);
    work();
    return result;
}

TableFormat parse_table_format(std::string_view name)
{
    if (name == "csv")
        return TableFormat::csv;
    if (name == "text")
        return TableFormat::text;
    throw UsageError("unknown table format '" + std::string(name) + "' (expected csv or text)");
}

std::string format_double(double x)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string emit_table(const SweepResult& result, TableFormat format)
{
    std::ostringstream out;
    if (format == TableFormat::csv)
    {
        out << "alpha,beta,h,var,t_final,n_steps,termination\n";
        for (const auto& c : result.cells)
            out << format_double(c.alpha) << ',' << format_double(c.beta) << ',' << format_double(c.h) << ','
                << format_double(c.var) << ',' << format_double(c.t_final) << ',' << c.n_steps << ','
                << c.termination << '\n';
        return out.str();
    }

    // Distinct values in order of first appearance.
    auto distinct = [&](auto field) {
        std::vector<double> v;
        for (const auto& c : result.cells)
            if (std::find(v.begin(), v.end(), field(c)) == v.end())
                v.push_back(field(c));
        return v;
    };
    const auto alphas = distinct([](const SweepCell& c) { return c.alpha; });
    const auto betas = distinct([](const SweepCell& c) { return c.beta; });
    const auto hs = distinct([](const SweepCell& c) { return c.h; });

    std::map<std::tuple<double, double, double>, const SweepCell*> lookup;
    for (const auto& c : result.cells)
        lookup[{c.alpha, c.beta, c.h}] = &c;

    constexpr int width = 24;
    char buf[128];
    for (double a : alphas)
    {
        out << "alpha = " << format_double(a) << '\n';
        std::snprintf(buf, sizeof buf, "%-8s", "beta\\h");
        out << buf;
        for (double h : hs)
        {
            std::snprintf(buf, sizeof buf, "%*s", width, short_sci(h, 1).c_str());
            out << buf;
        }
        out << '\n';
        for (double b : betas)
        {
            std::snprintf(buf, sizeof buf, "%-8.1f", b);
            out << buf;
            for (double h : hs)
            {
                const auto it = lookup.find({a, b, h});
                std::string entry = "-";
                if (it != lookup.end())
                {
                    const SweepCell& c = *it->second;
                    std::snprintf(buf, sizeof buf, "%s %.3f (%zu)%s", short_sci(c.var, 3).c_str(), c.t_final,
                                  c.n_steps, c.termination == "completed" ? "" : "*");
                    entry = buf;
                }
                std::snprintf(buf, sizeof buf, "%*s", width, entry.c_str());
                out << buf;
            }
            out << '\n';
        }
        out << '\n';
    }
    out << "entries: Var t_reached (steps); * marks early termination\n";
    return out.str();
}

SweepResult parse_csv_table(std::string_view text)
{
    SweepResult result;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty())
    {
        const std::size_t eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        if (!header_seen)
        {
            if (line != "alpha,beta,h,var,t_final,n_steps,termination")
                throw UsageError("unexpected table header '" + std::string(line) + "'");
            header_seen = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 7)
            throw UsageError("line " + std::to_string(line_no) + ": expected 7 fields, got "
                             + std::to_string(f.size()));
        SweepCell c;
        c.alpha = parse_number<double>(f[0], line_no);
        c.beta = parse_number<double>(f[1], line_no);
        c.h = parse_number<double>(f[2], line_no);
        c.var = parse_number<double>(f[3], line_no);
        c.t_final = parse_number<double>(f[4], line_no);
        c.n_steps = parse_number<std::size_t>(f[5], line_no);
        c.termination = std::string(f[6]);
        result.cells.push_back(std::move(c));
    }
    if (!header_seen)
        throw UsageError("empty table");
    return result;
}

std::string ledger_csv(const PowerLedger& ledger)
{
    std::ostringstream out;
    out << "t,dt,newton_iters,H,E,qH,qE,QH,QE,bal\n";
    for (const auto& e : ledger.entries())
        out << format_double(e.t) << ',' << format_double(e.dt) << ',' << e.newton_iters << ','
            << format_double(e.H) << ',' << format_double(e.E) << ',' << format_double(e.qH) << ','
            << format_double(e.qE) << ',' << format_double(e.QH) << ',' << format_double(e.QE) << ','
            << format_double(e.bal) << '\n';
    return out.str();
}

std::string snapshot_csv(const Snapshot& s)
{
    std::ostringstream out;
    out << "x,v,e,e_r\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
        out << format_double(s.x[i]) << ',' << format_double(s.v[i]) << ',' << format_double(s.e[i]) << ','
            << format_double(s.e_r[i]) << '\n';
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    namespace fs = std::filesystem;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp-" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os)
        {
            os.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
    {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw fs::filesystem_error("cannot move output into place", tmp, path, ec);
    }
}

void write_run_outputs(const SimulationResult& result, const std::filesystem::path& dir)
{
    write_file_atomic(dir / "ledger.csv", ledger_csv(result.ledger));
    std::ostringstream index;
    index << "index,t,file\n";
    for (std::size_t k = 0; k < result.snapshots.size(); ++k)
    {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%04zu.csv", k);
        write_file_atomic(dir / name, snapshot_csv(result.snapshots[k]));
        index << k << ',' << format_double(result.snapshots[k].t) << ',' << name << '\n';
    }
    write_file_atomic(dir / "snapshots.csv", index.str());
}

} // namespace phb
