#ifndef PHBURGERS_HARNESS_HPP
#define PHBURGERS_HARNESS_HPP

#include "phburgers/integrator.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace phb {

/*!
 * \brief Parameter grid of the stability study.
 *
 * Every cell runs \c base with (alpha, beta, n_elems = 1/h) substituted.
 */
struct SweepGrid
{
    std::vector<double> alphas{0.5, 1.0, 2.0};
    std::vector<double> betas{0.0, 1.0, 2.0, 5.0};
    std::vector<double> hs{5e-4, 1e-3, 2.5e-3, 5e-3, 1e-2};
    RunConfig base;

    std::size_t size() const { return alphas.size() * betas.size() * hs.size(); }
    //! Throws ConfigError on a non-positive alpha or h, a negative beta, or
    //! an h whose inverse is not an integer.
    void validate() const;
};

struct SweepCell
{
    double alpha = 0.0;
    double beta = 0.0;
    double h = 0.0;
    double var = 0.0;
    double t_final = 0.0; // time reached
    std::size_t n_steps = 0;
    std::string termination; // to_string(FailureReason) or "error: ..."

    bool operator==(const SweepCell&) const = default;
};

struct SweepResult
{
    std::vector<SweepCell> cells;

    bool operator==(const SweepResult&) const = default;
};

//! Configuration of one grid cell.
RunConfig cell_config(const SweepGrid& grid, double alpha, double beta, double h);

//! Runs a single cell; errors are recorded in termination, never thrown.
SweepCell run_cell(const SweepGrid& grid, double alpha, double beta, double h);

/*!
 * \brief Runs every cell of the grid on \p workers threads (0 = hardware
 *        concurrency).
 *
 * Cells are ordered alpha-major, then beta, then h, independent of the
 * scheduling.
 */
SweepResult run_sweep(const SweepGrid& grid, std::size_t workers = 0);

enum class TableFormat { csv, text };

//! "csv" or "text"; anything else throws UsageError.
TableFormat parse_table_format(std::string_view name);

/*!
 * \brief Serializes a sweep.
 *
 * csv: header alpha,beta,h,var,t_final,n_steps,termination and one row per
 * cell, numbers in shortest round-trip form. text: one block per alpha with
 * rows beta and columns h, each entry "Var  t (steps)".
 */
std::string emit_table(const SweepResult& result, TableFormat format);

//! Inverse of emit_table(result, TableFormat::csv). Throws UsageError.
SweepResult parse_csv_table(std::string_view text);

//! Shortest decimal form that reads back to the same double.
std::string format_double(double x);

std::string ledger_csv(const PowerLedger& ledger);
std::string snapshot_csv(const Snapshot& snapshot);

//! Writes through a temporary file in the same directory and renames it
//! into place, so \p path is either complete or untouched.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/*!
 * \brief Writes ledger.csv, snapshots.csv (index of output times) and
 *        snapshot_NNNN.csv files into \p dir.
 */
void write_run_outputs(const SimulationResult& result, const std::filesystem::path& dir);

} // namespace phb

#endif
