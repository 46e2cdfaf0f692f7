// pinsvm: train, apply and benchmark pinball-loss SVMs from the command line.

#include "CLI11.hpp"

#include "pinsvm/bench.hpp"
#include "pinsvm/error.hpp"
#include "pinsvm/model.hpp"

#include <fmt/core.h>
#include <fmt/ostream.h>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace pinsvm;

struct Options {
    std::string data;
    std::string test;
    std::string model_path;
    std::string out;
    std::string format = "auto";
    int label_column = -1;
    std::string kernel = "linear";
    double q = 1.0;
    double c0 = 1.0;
    double tau = 0.0;
    std::string formulation = "unified";
    double tol = 1e-6;
    std::size_t max_iter = 10'000'000;
    std::uint64_t seed = 0;
    bool no_weighting = false;
    bool no_normalize = false;
    std::vector<double> taus;
    double tau_step = 0.1;
    std::vector<std::string> formulations;
    std::size_t folds = 5;
    std::vector<double> c_grid;
    std::vector<double> q_grid;
    std::vector<std::string> datasets;
    std::string data_dir = "data";
    bool fixed = false;
};

const std::map<std::string, FileFormat> format_names = {
    {"csv", FileFormat::csv}, {"libsvm", FileFormat::libsvm}, {"monk", FileFormat::monk}};

Dataset read(const std::string &path, const Options &o) {
    const FileFormat f = o.format == "auto" ? guess_format(path) : format_names.at(o.format);
    return load_file(path, f, o.label_column);
}

SolverConfig solver_config(const Options &o) {
    SolverConfig s;
    s.tol = o.tol;
    s.max_iter = o.max_iter;
    s.seed = o.seed;
    return s;
}

KernelSpec kernel_spec(const Options &o) {
    return parse_kernel_kind(o.kernel) == KernelKind::linear ? KernelSpec::linear() : KernelSpec::rbf(o.q);
}

// Train set always normalized on itself; the test set, if any, reuses those parameters.
std::pair<Dataset, std::optional<Dataset>> read_pair(const Options &o) {
    Dataset train = read(o.data, o);
    std::optional<Dataset> test;
    if (!o.test.empty()) {
        test = read(o.test, o);
    }
    if (o.no_normalize) {
        return {std::move(train), std::move(test)};
    }
    auto [tr, te, params] = normalize_minmax(train, test ? *test : train);
    if (test) {
        return {std::move(tr), std::move(te)};
    }
    return {std::move(tr), std::nullopt};
}

int run_train(const Options &o) {
    auto [train_set, test_set] = read_pair(o);
    TrainConfig cfg;
    cfg.c0 = o.c0;
    cfg.tau = Tau(o.tau);
    cfg.kernel = kernel_spec(o);
    cfg.formulation = parse_formulation(o.formulation);
    cfg.solver = solver_config(o);
    cfg.weighting = !o.no_weighting;
    const Fit fitted = fit(train_set, cfg);
    const auto &d = fitted.model.diagnostics;
    fmt::print("samples {}  support {}  bias {:.6g}\n", train_set.size(), fitted.model.coeffs.size(),
               fitted.model.bias);
    fmt::print("iterations {}  dual objective {:.10g}  kkt {:.3g}  converged {}\n", d.iterations, d.dual_objective,
               d.kkt_residual, d.converged ? "yes" : "no");
    if (d.hit_upper_cap) {
        fmt::print("warning: solution touches the artificial upper cap\n");
    }
    fmt::print("train accuracy {:.4f}\n", accuracy(fitted.model, train_set));
    if (test_set) {
        fmt::print("test accuracy {:.4f}\n", accuracy(fitted.model, *test_set));
    }
    if (!o.out.empty()) {
        save(fitted.model, o.out);
    }
    return 0;
}

int run_predict(const Options &o) {
    const Model model = load(o.model_path);
    const Dataset raw = read(o.data, o);
    const Eigen::MatrixXd x = model.normalization ? model.normalization->apply_rows(raw.features()) : raw.features();
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file) {
            throw std::runtime_error(fmt::format("cannot write '{}'", o.out));
        }
    }
    std::ostream &out = o.out.empty() ? std::cout : file;
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const Eigen::VectorXd row = x.row(i).transpose();
        const int label = predict(model, row);
        hits += label == static_cast<int>(raw.labels()(i)) ? 1 : 0;
        fmt::print(out, "{}\n", label);
    }
    fmt::print(std::cerr, "accuracy {:.4f}\n", static_cast<double>(hits) / static_cast<double>(x.rows()));
    return 0;
}

GridSpec grid_spec(const Options &o) {
    GridSpec g = GridSpec::powers_of_two();
    if (!o.c_grid.empty()) {
        g.c_values = o.c_grid;
    }
    if (!o.q_grid.empty()) {
        g.q_values = o.q_grid;
    }
    return g;
}

GridOptions grid_options(const Options &o) {
    GridOptions g;
    g.folds = o.folds;
    g.weighting = !o.no_weighting;
    g.seed = o.seed;
    g.solver = solver_config(o);
    return g;
}

int run_grid(const Options &o) {
    auto [train_set, test_set] = read_pair(o);
    const auto r = grid_search(train_set, grid_spec(o), parse_kernel_kind(o.kernel), grid_options(o));
    fmt::print("c0 {:.6g}  q {:.6g}  cv accuracy {:.4f}\n", r.c0, r.q, r.cv_accuracy);
    return 0;
}

int run_sweep(const Options &o) {
    auto [train_set, test_set] = read_pair(o);
    if (!test_set) {
        throw CLI::ValidationError("--test", "sweep needs a test set");
    }
    SweepParams p;
    p.c0 = o.c0;
    p.kernel = kernel_spec(o);
    p.weighting = !o.no_weighting;
    p.solver = solver_config(o);
    const auto taus = o.taus.empty() ? tau_grid(-1.0, 1.0, o.tau_step) : o.taus;
    std::vector<Formulation> forms;
    for (const auto &f : o.formulations) {
        forms.push_back(parse_formulation(f));
    }
    if (forms.empty()) {
        forms = {Formulation::unified, Formulation::legacy_positive, Formulation::incorrect_negative};
    }
    const auto result = tau_sweep(train_set, *test_set, p, taus, forms);
    for (const auto &r : result.rows) {
        if (r.skip_reason) {
            fmt::print(std::cerr, "skipped tau={} {}: {}\n", r.tau, to_string(r.formulation), *r.skip_reason);
        }
    }
    if (o.out.empty()) {
        write_report(result, std::cout);
    } else {
        emit_report(result, o.out);
    }
    return 0;
}

int run_table(const Options &o) {
    TableConfig cfg;
    cfg.data_dir = o.data_dir;
    cfg.kernel_kind = parse_kernel_kind(o.kernel);
    cfg.grid = grid_spec(o);
    cfg.grid_options = grid_options(o);
    cfg.taus = o.taus.empty() ? tau_grid(-1.0, 1.0, o.tau_step) : o.taus;
    cfg.split_seed = o.seed;
    if (o.fixed) {
        cfg.fixed_c0 = o.c0;
        cfg.fixed_q = o.q;
    }
    std::vector<std::string> names = o.datasets;
    if (names.empty()) {
        for (const auto &e : dataset_registry()) {
            names.push_back(e.name);
        }
    }
    const auto report = run_table_experiment(names, cfg);
    std::ostringstream text;
    write_table(report, text);
    if (o.out.empty()) {
        std::cout << text.str();
    } else {
        std::ofstream(o.out) << text.str();
    }
    return 0;
}

void add_solver_flags(CLI::App *cmd, Options &o) {
    cmd->add_option("--tol", o.tol, "KKT tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", o.max_iter, "maximum pair updates");
    cmd->add_option("--seed", o.seed, "seed for shuffles and splits");
    cmd->add_flag("--no-weighting", o.no_weighting, "use C0 for every sample");
}

void add_model_flags(CLI::App *cmd, Options &o) {
    cmd->add_option("--kernel", o.kernel, "linear or rbf")->check(CLI::IsMember({"linear", "rbf"}));
    cmd->add_option("--q", o.q, "RBF width")->check(CLI::PositiveNumber);
    cmd->add_option("--c0", o.c0, "base penalty")->check(CLI::PositiveNumber);
}

void add_data_flags(CLI::App *cmd, Options &o, bool need_test) {
    cmd->add_option("--data", o.data, "training file")->required()->check(CLI::ExistingFile);
    auto *t = cmd->add_option("--test", o.test, "test file")->check(CLI::ExistingFile);
    if (need_test) {
        t->required();
    }
    cmd->add_option("--format", o.format, "auto, csv, libsvm or monk")
        ->check(CLI::IsMember({"auto", "csv", "libsvm", "monk"}));
    cmd->add_option("--label-column", o.label_column, "CSV label column, negative counts from the end");
    cmd->add_flag("--no-normalize", o.no_normalize, "skip min-max scaling");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"pinball-loss SVM trainer and benchmark harness"};
    app.require_subcommand(1);
    Options o;
    const std::vector<std::string> formulation_names = {"unified", "legacy-pos", "corrected-neg", "incorrect-neg"};

    auto *train_cmd = app.add_subcommand("train", "fit a model");
    add_data_flags(train_cmd, o, false);
    add_model_flags(train_cmd, o);
    add_solver_flags(train_cmd, o);
    train_cmd->add_option("--tau", o.tau, "pinball parameter in [-1, 1]")->check(CLI::Range(-1.0, 1.0));
    train_cmd->add_option("--formulation", o.formulation, "dual to solve")->check(CLI::IsMember(formulation_names));
    train_cmd->add_option("--out", o.out, "model file to write");

    auto *predict_cmd = app.add_subcommand("predict", "label a data file with a saved model");
    predict_cmd->add_option("--model", o.model_path, "saved model")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--data", o.data, "file to label")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--format", o.format, "auto, csv, libsvm or monk")->check(CLI::IsMember({"auto", "csv", "libsvm", "monk"}));
    predict_cmd->add_option("--label-column", o.label_column, "CSV label column, negative counts from the end");
    predict_cmd->add_option("--out", o.out, "predictions file, one label per line");

    auto *grid_cmd = app.add_subcommand("grid", "cross-validated search for C0 and q at tau = 0");
    add_data_flags(grid_cmd, o, false);
    add_model_flags(grid_cmd, o);
    add_solver_flags(grid_cmd, o);
    grid_cmd->add_option("--folds", o.folds, "cross-validation folds")->check(CLI::PositiveNumber);
    grid_cmd->add_option("--c-grid", o.c_grid, "C0 candidates")->delimiter(',');
    grid_cmd->add_option("--q-grid", o.q_grid, "q candidates")->delimiter(',');

    auto *sweep_cmd = app.add_subcommand("sweep", "accuracy over a tau grid per formulation");
    add_data_flags(sweep_cmd, o, true);
    add_model_flags(sweep_cmd, o);
    add_solver_flags(sweep_cmd, o);
    sweep_cmd->add_option("--taus", o.taus, "explicit tau values")->delimiter(',')->check(CLI::Range(-1.0, 1.0));
    sweep_cmd->add_option("--tau-step", o.tau_step, "step of the default [-1, 1] grid")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--formulation", o.formulations, "duals to compare")->delimiter(',')->check(CLI::IsMember(formulation_names));
    sweep_cmd->add_option("--out", o.out, "CSV report");

    auto *table_cmd = app.add_subcommand("table", "grid search plus best-tau comparison per dataset");
    add_model_flags(table_cmd, o);
    add_solver_flags(table_cmd, o);
    table_cmd->add_option("--datasets", o.datasets, "registered dataset names")->delimiter(',');
    table_cmd->add_option("--data-dir", o.data_dir, "directory holding the dataset files");
    table_cmd->add_option("--folds", o.folds, "cross-validation folds")->check(CLI::PositiveNumber);
    table_cmd->add_option("--c-grid", o.c_grid, "C0 candidates")->delimiter(',');
    table_cmd->add_option("--q-grid", o.q_grid, "q candidates")->delimiter(',');
    table_cmd->add_option("--taus", o.taus, "explicit tau values")->delimiter(',')->check(CLI::Range(-1.0, 1.0));
    table_cmd->add_option("--tau-step", o.tau_step, "step of the default [-1, 1] grid")->check(CLI::PositiveNumber);
    table_cmd->add_flag("--fixed", o.fixed, "use --c0/--q instead of the grid search");
    table_cmd->add_option("--out", o.out, "report file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*train_cmd) {
            return run_train(o);
        }
        if (*predict_cmd) {
            return run_predict(o);
        }
        if (*grid_cmd) {
            return run_grid(o);
        }
        if (*sweep_cmd) {
            return run_sweep(o);
        }
        return run_table(o);
    } catch (const infeasible_problem &e) {
        fmt::print(std::cerr, "infeasible: {}\n", e.what());
        return 2;
    } catch (const CLI::Error &e) {
        fmt::print(std::cerr, "{}\n", e.what());
        return 1;
    } catch (const std::exception &e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return 1;
    }
}
