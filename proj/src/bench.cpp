#include "pinsvm/bench.hpp"

#include "pinsvm/error.hpp"

#include <fmt/core.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace pinsvm {

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

Eigen::MatrixXd select(const Eigen::MatrixXd &m, const std::vector<std::size_t> &rows,
                       const std::vector<std::size_t> &cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                m(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
        }
    }
    return out;
}

// Validation accuracy from a precomputed cross-Gram block (train rows x validation columns).
double held_out_accuracy(const Fit &fitted, const Eigen::MatrixXd &cross, const Eigen::VectorXd &train_labels,
                         const Eigen::VectorXd &val_labels) {
    const Eigen::VectorXd signed_lambda = fitted.solution.lambda.cwiseProduct(train_labels);
    const Eigen::VectorXd decision = cross.transpose() * signed_lambda;
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < val_labels.size(); ++i) {
        const double p = decision(i) + fitted.model.bias >= 0.0 ? 1.0 : -1.0;
        hits += p == val_labels(i) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(val_labels.size());
}

bool file_exists(const std::filesystem::path &p) {
    std::error_code ec;
    return std::filesystem::is_regular_file(p, ec);
}

}  // namespace

GridSpec GridSpec::powers_of_two(int lo, int hi) {
    GridSpec g;
    for (int e = lo; e <= hi; ++e) {
        g.c_values.push_back(std::ldexp(1.0, e));
    }
    g.q_values = g.c_values;
    return g;
}

std::vector<std::size_t> stratified_folds(const Dataset &data, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) {
        throw std::invalid_argument("cross-validation needs at least 2 folds");
    }
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < data.size(); ++i) {
        (data.labels()(static_cast<Eigen::Index>(i)) > 0 ? pos : neg).push_back(i);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    std::vector<std::size_t> fold_of(data.size());
    for (std::size_t k = 0; k < pos.size(); ++k) {
        fold_of[pos[k]] = k % folds;
    }
    // continue the deal where the positives stopped so fold sizes stay balanced
    for (std::size_t k = 0; k < neg.size(); ++k) {
        fold_of[neg[k]] = (pos.size() + k) % folds;
    }
    return fold_of;
}

GridResult grid_search(const Dataset &train, const GridSpec &grid, KernelKind kernel_kind, const GridOptions &opts) {
    if (grid.c_values.empty() || (kernel_kind == KernelKind::rbf && grid.q_values.empty())) {
        throw std::invalid_argument("grid must be nonempty");
    }
    const auto all_positive = [](const std::vector<double> &v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
    };
    if (!all_positive(grid.c_values) || !all_positive(grid.q_values)) {
        throw std::invalid_argument("grid values must be positive");
    }
    const std::size_t smallest_class = std::min(train.num_positive(), train.num_negative());
    if (smallest_class < 2) {
        throw std::invalid_argument("cross-validation needs at least 2 samples per class");
    }
    const std::size_t folds = std::clamp<std::size_t>(opts.folds, 2, smallest_class);
    const auto fold_of = stratified_folds(train, folds, opts.seed);

    std::vector<std::vector<std::size_t>> fit_rows(folds);
    std::vector<std::vector<std::size_t>> val_rows(folds);
    for (std::size_t i = 0; i < train.size(); ++i) {
        for (std::size_t f = 0; f < folds; ++f) {
            (fold_of[i] == f ? val_rows : fit_rows)[f].push_back(i);
        }
    }
    std::vector<Dataset> fit_sets;
    for (std::size_t f = 0; f < folds; ++f) {
        fit_sets.push_back(train.subset(fit_rows[f]));
    }

    const auto c_values = sorted_unique(grid.c_values);
    const auto q_values = kernel_kind == KernelKind::linear ? std::vector<double>{0.0} : sorted_unique(grid.q_values);

    GridResult best{0.0, 0.0, -1.0};
    for (const double c : c_values) {
        for (const double q : q_values) {
            const KernelSpec spec = kernel_kind == KernelKind::linear ? KernelSpec::linear() : KernelSpec::rbf(q);
            // one Gram over the whole training set serves every fold
            const GramMatrix full = gram(spec, train.features());
            TrainConfig cfg;
            cfg.c0 = c;
            cfg.tau = Tau(0.0);
            cfg.kernel = spec;
            cfg.formulation = Formulation::unified;
            cfg.solver = opts.solver;
            cfg.weighting = opts.weighting;

            double total = 0.0;
            for (std::size_t f = 0; f < folds; ++f) {
                auto sub = std::make_shared<const GramMatrix>(select(full, fit_rows[f], fit_rows[f]));
                const Fit fitted = fit(fit_sets[f], cfg, sub);
                const Eigen::MatrixXd cross = select(full, fit_rows[f], val_rows[f]);
                Eigen::VectorXd val_labels(static_cast<Eigen::Index>(val_rows[f].size()));
                for (std::size_t k = 0; k < val_rows[f].size(); ++k) {
                    val_labels(static_cast<Eigen::Index>(k)) = train.labels()(static_cast<Eigen::Index>(val_rows[f][k]));
                }
                total += held_out_accuracy(fitted, cross, fit_sets[f].labels(), val_labels);
            }
            const double mean = total / static_cast<double>(folds);
            if (mean > best.cv_accuracy + 1e-12) {
                best = {c, q, mean};
            }
        }
    }
    return best;
}

std::vector<double> tau_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || lo > hi || lo < -1.0 || hi > 1.0) {
        throw std::invalid_argument(fmt::format("bad tau range [{}, {}] step {}", lo, hi, step));
    }
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> taus;
    for (long k = 0; k <= n; ++k) {
        taus.push_back(std::round((lo + static_cast<double>(k) * step) * 1e9) / 1e9);
    }
    if (hi - taus.back() > 1e-9) {
        taus.push_back(hi);
    }
    return taus;
}

SweepResult tau_sweep(const Dataset &train, const Dataset &test, const SweepParams &params,
                      const std::vector<double> &taus, const std::vector<Formulation> &formulations) {
    if (test.dim() != train.dim()) {
        throw std::invalid_argument("train and test feature dimensions differ");
    }
    const auto shared_gram = std::make_shared<const GramMatrix>(gram(params.kernel, train.features()));
    SweepResult result;
    for (const Formulation f : formulations) {
        for (const double t : taus) {
            SweepRow row;
            row.tau = t;
            row.formulation = f;
            try {
                const Tau tau(t);
                if (!accepts(f, tau)) {
                    row.skip_reason = fmt::format("{} does not accept tau = {}", to_string(f), t);
                    result.rows.push_back(std::move(row));
                    continue;
                }
                TrainConfig cfg;
                cfg.c0 = params.c0;
                cfg.tau = tau;
                cfg.kernel = params.kernel;
                cfg.formulation = f;
                cfg.solver = params.solver;
                cfg.weighting = params.weighting;
                const auto start = std::chrono::steady_clock::now();
                const Fit fitted = fit(train, cfg, shared_gram);
                const auto stop = std::chrono::steady_clock::now();
                row.time_s = std::chrono::duration<double>(stop - start).count();
                row.accuracy = accuracy(fitted.model, test);
                row.iterations = fitted.solution.iterations;
                row.converged = fitted.solution.converged;
                row.hit_upper_cap = fitted.model.diagnostics.hit_upper_cap;
                row.primal_objective = primal_objective(fitted.solution.lambda, fitted.model.bias, *shared_gram,
                                                        train.labels(), fitted.weights, tau);
            } catch (const std::exception &e) {
                row.skip_reason = e.what();
            }
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

void write_report(const SweepResult &result, std::ostream &out) {
    std::vector<const SweepRow *> rows;
    for (const auto &r : result.rows) {
        if (r.evaluated()) {
            rows.push_back(&r);
        }
    }
    if (rows.empty()) {
        throw std::invalid_argument("sweep result has no evaluated rows");
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow *a, const SweepRow *b) {
        if (a->formulation != b->formulation) {
            return static_cast<int>(a->formulation) < static_cast<int>(b->formulation);
        }
        return a->tau < b->tau;
    });
    out << "tau,formulation,accuracy,time_s,iterations,converged\n";
    for (const auto *r : rows) {
        fmt::print(out, "{:.10g},{},{:.6f},{:.6f},{},{}\n", r->tau, to_string(r->formulation), r->accuracy, r->time_s,
                   r->iterations, r->converged ? 1 : 0);
    }
}

void emit_report(const SweepResult &result, const std::filesystem::path &path) {
    std::ostringstream buffer;
    write_report(result, buffer);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    }
    out << buffer.str();
    if (!out) {
        throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
    }
}

const std::vector<DatasetEntry> &dataset_registry() {
    static const std::vector<DatasetEntry> registry = {
        {"monk1", 124, true, "monks-1.train", "monks-1.test", FileFormat::monk},
        {"monk2", 169, true, "monks-2.train", "monks-2.test", FileFormat::monk},
        {"monk3", 122, true, "monks-3.train", "monks-3.test", FileFormat::monk},
        {"spect", 80, true, "SPECT.train", "SPECT.test", FileFormat::csv, 0},
        {"fertility", 50, false, "fertility", "", FileFormat::csv},
        {"echocardiogram", 80, false, "echocardiogram", "", FileFormat::csv},
        {"plrx", 100, false, "plrx", "", FileFormat::csv},
        {"sonar", 100, false, "sonar", "", FileFormat::csv},
        {"heart-statlog", 150, false, "heart-statlog", "", FileFormat::csv},
        {"haberman", 150, false, "haberman", "", FileFormat::csv},
        {"votes", 200, false, "votes", "", FileFormat::csv},
        {"ecoli", 200, false, "ecoli", "", FileFormat::csv},
        {"ionosphere", 200, false, "ionosphere", "", FileFormat::csv},
        {"bupa", 250, false, "bupa", "", FileFormat::csv},
        {"pima", 300, false, "pima", "", FileFormat::csv},
        {"breast-cancer", 400, false, "breast-cancer", "", FileFormat::csv},
        {"australian", 400, false, "australian", "", FileFormat::csv},
        {"diabetes", 500, false, "diabetes", "", FileFormat::csv},
        {"spambase", 4000, false, "spambase", "", FileFormat::csv},
    };
    return registry;
}

const DatasetEntry *find_dataset(const std::string &name) {
    const auto &reg = dataset_registry();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const DatasetEntry &e) { return e.name == name; });
    return it == reg.end() ? nullptr : &*it;
}

FileFormat guess_format(const std::filesystem::path &path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") {
        return FileFormat::csv;
    }
    if (ext == ".train" || ext == ".test") {
        return FileFormat::monk;
    }
    return FileFormat::libsvm;
}

Dataset load_file(const std::filesystem::path &path, FileFormat format, int label_column) {
    switch (format) {
    case FileFormat::csv:
        return load_csv(path, label_column);
    case FileFormat::libsvm:
        return load_libsvm(path);
    case FileFormat::monk:
        return load_monk(path);
    }
    throw std::invalid_argument("unknown file format");
}

std::optional<std::pair<Dataset, Dataset>> load_registered(const DatasetEntry &entry,
                                                           const std::filesystem::path &data_dir, std::uint64_t seed) {
    std::optional<Dataset> train;
    std::optional<Dataset> test;
    if (entry.canonical_split) {
        const auto train_path = data_dir / entry.train_file;
        const auto test_path = data_dir / entry.test_file;
        if (!file_exists(train_path) || !file_exists(test_path)) {
            return std::nullopt;
        }
        train = load_file(train_path, entry.format, entry.label_column);
        test = load_file(test_path, entry.format, entry.label_column);
    } else {
        std::optional<Dataset> full;
        if (const auto csv = data_dir / (entry.train_file + ".csv"); file_exists(csv)) {
            full = load_csv(csv, entry.label_column);
        } else if (const auto svm = data_dir / (entry.train_file + ".libsvm"); file_exists(svm)) {
            full = load_libsvm(svm);
        } else {
            return std::nullopt;
        }
        auto parts = split(*full, entry.train_points, seed);
        train = std::move(parts.first);
        test = std::move(parts.second);
    }
    auto [train_n, test_n, params] = normalize_minmax(*train, *test);
    return std::make_pair(std::move(train_n), std::move(test_n));
}

namespace {

TableRow best_row(const std::string &name, const std::vector<const SweepRow *> &rows) {
    TableRow out{name, -1.0, 0.0, std::numeric_limits<double>::quiet_NaN()};
    for (const auto *r : rows) {
        const bool better =
            r->accuracy > out.accuracy ||
            (r->accuracy == out.accuracy &&
             (std::abs(r->tau) < std::abs(out.best_tau) || (std::abs(r->tau) == std::abs(out.best_tau) && r->tau < out.best_tau)));
        if (better) {
            out.accuracy = r->accuracy;
            out.time_s = r->time_s;
            out.best_tau = r->tau;
        }
    }
    return out;
}

}  // namespace

TableReport run_table_experiment(const std::vector<std::string> &datasets, const TableConfig &cfg) {
    TableReport report;
    for (const auto &name : datasets) {
        const DatasetEntry *entry = find_dataset(name);
        if (entry == nullptr) {
            report.skipped.push_back(name + " (not in registry)");
            continue;
        }
        auto loaded = load_registered(*entry, cfg.data_dir, cfg.split_seed);
        if (!loaded) {
            report.skipped.push_back(name + " (files not found under " + cfg.data_dir.string() + ")");
            continue;
        }
        const auto &[train, test] = *loaded;

        TableBlock block;
        block.dataset = name;
        if (cfg.fixed_c0 && (cfg.kernel_kind == KernelKind::linear || cfg.fixed_q)) {
            block.c0 = *cfg.fixed_c0;
            block.q = cfg.kernel_kind == KernelKind::linear ? 0.0 : *cfg.fixed_q;
        } else {
            const auto g = grid_search(train, cfg.grid, cfg.kernel_kind, cfg.grid_options);
            block.c0 = cfg.fixed_c0.value_or(g.c0);
            block.q = g.q;
        }
        SweepParams params;
        params.c0 = block.c0;
        params.kernel = cfg.kernel_kind == KernelKind::linear ? KernelSpec::linear() : KernelSpec::rbf(block.q);
        params.weighting = cfg.grid_options.weighting;
        params.solver = cfg.grid_options.solver;
        block.sweep = tau_sweep(train, test, params, cfg.taus,
                                {Formulation::unified, Formulation::legacy_positive, Formulation::incorrect_negative});

        std::vector<const SweepRow *> unified;
        std::vector<const SweepRow *> original;
        std::vector<const SweepRow *> csvm;
        for (const auto &r : block.sweep.rows) {
            if (!r.evaluated()) {
                continue;
            }
            if (r.formulation == Formulation::unified) {
                unified.push_back(&r);
                if (r.tau == 0.0) {
                    csvm.push_back(&r);
                }
            } else {
                original.push_back(&r);
            }
        }
        block.rows.push_back(best_row("Unified Pin-SVM", unified));
        block.rows.push_back(best_row("Pin-SVM", original));
        auto c_row = best_row("C-SVM", csvm);
        c_row.best_tau = std::numeric_limits<double>::quiet_NaN();
        block.rows.push_back(c_row);
        report.blocks.push_back(std::move(block));
    }
    return report;
}

void write_table(const TableReport &report, std::ostream &out) {
    for (const auto &block : report.blocks) {
        fmt::print(out, "dataset {}  C0={:.6g}  q={:.6g}\n", block.dataset, block.c0, block.q);
        fmt::print(out, "  {:<16} {:>9} {:>9} {:>7}\n", "model", "accuracy", "time(s)", "tau");
        for (const auto &row : block.rows) {
            if (row.accuracy < 0.0) {
                fmt::print(out, "  {:<16} {:>9} {:>9} {:>7}\n", row.model, "-", "-", "-");
                continue;
            }
            const std::string tau = std::isnan(row.best_tau) ? "-" : fmt::format("{:.2f}", row.best_tau);
            fmt::print(out, "  {:<16} {:>9.2f} {:>9.3f} {:>7}\n", row.model, 100.0 * row.accuracy, row.time_s, tau);
        }
    }
    for (const auto &s : report.skipped) {
        fmt::print(out, "skipped {}\n", s);
    }
}

}  // namespace pinsvm
