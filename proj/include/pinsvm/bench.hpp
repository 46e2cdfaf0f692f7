#pragma once

#include "pinsvm/data.hpp"
#include "pinsvm/dual.hpp"
#include "pinsvm/kernel.hpp"
#include "pinsvm/model.hpp"
#include "pinsvm/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pinsvm {

/// Candidate (C0, q) values. The default is {2^-7, ..., 2^7} for both.
struct GridSpec {
    std::vector<double> c_values;
    std::vector<double> q_values;

    [[nodiscard]] static GridSpec powers_of_two(int lo = -7, int hi = 7);
};

struct GridResult {
    double c0 = 0.0;
    /// 0 for the linear kernel.
    double q = 0.0;
    double cv_accuracy = 0.0;
};

struct GridOptions {
    std::size_t folds = 5;
    bool weighting = true;
    std::uint64_t seed = 0;
    SolverConfig solver{};
};

/// Stratified k-fold assignment; fold ids in [0, folds). Each class is shuffled with
/// `seed` and dealt round-robin.
[[nodiscard]] std::vector<std::size_t> stratified_folds(const Dataset &data, std::size_t folds, std::uint64_t seed);

/**
 * Cross-validated search over the grid with tau = 0 (unified dual, i.e. C-SVM).
 * Ties go to the smaller C, then the smaller q. If a class has fewer samples than
 * `folds`, the fold count is reduced to that class size (at least 2).
 */
[[nodiscard]] GridResult grid_search(const Dataset &train, const GridSpec &grid, KernelKind kernel_kind,
                                     const GridOptions &opts = {});

struct SweepParams {
    double c0 = 1.0;
    KernelSpec kernel = KernelSpec::linear();
    bool weighting = true;
    SolverConfig solver{};
};

struct SweepRow {
    double tau = 0.0;
    Formulation formulation = Formulation::unified;
    double accuracy = 0.0;
    double time_s = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double primal_objective = 0.0;
    bool hit_upper_cap = false;
    /// Set when the row was not trained (tau/formulation mismatch or a training error).
    std::optional<std::string> skip_reason;

    [[nodiscard]] bool evaluated() const noexcept { return !skip_reason; }
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

/// Evenly spaced taus from lo to hi inclusive (rounded to 1e-9 to avoid drift).
[[nodiscard]] std::vector<double> tau_grid(double lo, double hi, double step);

/// Trains every (tau, formulation) pair on `train` and scores it on `test`.
/// Incompatible pairs and training failures become skipped rows; the sweep never aborts.
[[nodiscard]] SweepResult tau_sweep(const Dataset &train, const Dataset &test, const SweepParams &params,
                                    const std::vector<double> &taus, const std::vector<Formulation> &formulations);

/// CSV with header "tau,formulation,accuracy,time_s,iterations,converged", evaluated
/// rows only, sorted by formulation then tau. Throws std::invalid_argument for an empty
/// result and std::runtime_error if the file cannot be written.
void emit_report(const SweepResult &result, const std::filesystem::path &path);
void write_report(const SweepResult &result, std::ostream &out);

enum class FileFormat { csv, libsvm, monk };

/// A named benchmark dataset and where to find it under a data directory.
struct DatasetEntry {
    std::string name;
    /// Number of training points; the rest is the test part.
    std::size_t train_points = 0;
    /// Ships with its own train/test files (MONK's problems, SPECT).
    bool canonical_split = false;
    /// Train/test file names for canonical splits, else a single-file stem
    /// looked up as <stem>.csv or <stem>.libsvm.
    std::string train_file;
    std::string test_file;
    FileFormat format = FileFormat::csv;
    /// For CSV files; negative counts from the end.
    int label_column = -1;
};

[[nodiscard]] const std::vector<DatasetEntry> &dataset_registry();
[[nodiscard]] const DatasetEntry *find_dataset(const std::string &name);

/// Picks a loader from the extension: .csv, .libsvm/.svm/.txt, and MONK's .train/.test files.
[[nodiscard]] FileFormat guess_format(const std::filesystem::path &path);
[[nodiscard]] Dataset load_file(const std::filesystem::path &path, FileFormat format, int label_column = -1);

/// Loads and normalizes a registry dataset. Returns nullopt if its files are missing.
[[nodiscard]] std::optional<std::pair<Dataset, Dataset>> load_registered(const DatasetEntry &entry,
                                                                         const std::filesystem::path &data_dir,
                                                                         std::uint64_t seed);

struct TableConfig {
    std::filesystem::path data_dir = "data";
    KernelKind kernel_kind = KernelKind::linear;
    GridSpec grid = GridSpec::powers_of_two();
    GridOptions grid_options{};
    std::vector<double> taus = tau_grid(-1.0, 1.0, 0.1);
    std::uint64_t split_seed = 0;
    /// Skip the grid search and use these parameters.
    std::optional<double> fixed_c0;
    std::optional<double> fixed_q;
};

/// One line of a results table: best accuracy over tau for one model family.
struct TableRow {
    std::string model;
    double accuracy = 0.0;
    double time_s = 0.0;
    /// NaN for the C-SVM row.
    double best_tau = 0.0;
};

struct TableBlock {
    std::string dataset;
    double c0 = 0.0;
    double q = 0.0;
    std::vector<TableRow> rows;
    SweepResult sweep;
};

struct TableReport {
    std::vector<TableBlock> blocks;
    /// Datasets whose files were missing.
    std::vector<std::string> skipped;
};

/**
 * Per dataset: grid search at tau = 0, then a tau sweep for the unified model and the
 * original Pin-SVM (legacy-pos for tau >= 0, incorrect-neg for tau < 0), plus the
 * C-SVM row at tau = 0. Best tau per model is chosen by test accuracy, ties toward
 * the smaller |tau| and then the smaller tau.
 */
[[nodiscard]] TableReport run_table_experiment(const std::vector<std::string> &datasets, const TableConfig &cfg);

void write_table(const TableReport &report, std::ostream &out);

}  // namespace pinsvm
