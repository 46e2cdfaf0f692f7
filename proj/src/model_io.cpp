#include "pinsvm/error.hpp"
#include "pinsvm/model.hpp"

#include <fmt/core.h>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace pinsvm {

namespace {

constexpr std::string_view magic = "UNIFIED-PINSVM";
constexpr std::string_view version = "v1";

std::string num(double v) {
    return fmt::format("{:.17g}", v);
}

double to_double(const std::string &token, std::string_view what) {
    double v = 0.0;
    const auto *first = token.data();
    if (!token.empty() && token.front() == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw model_format_error(fmt::format("bad number '{}' for {}", token, what));
    }
    return v;
}

std::uint64_t to_uint(const std::string &token, std::string_view what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw model_format_error(fmt::format("bad integer '{}' for {}", token, what));
    }
    return v;
}

using Section = std::map<std::string, std::vector<std::string>>;

const std::vector<std::string> &field(const Section &section, const std::string &section_name,
                                      const std::string &key) {
    const auto it = section.find(key);
    if (it == section.end() || it->second.empty()) {
        throw model_format_error(fmt::format("section [{}] is missing '{}'", section_name, key));
    }
    return it->second;
}

std::vector<std::string> tokens_of(const std::string &line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string t; in >> t;) {
        out.push_back(t);
    }
    return out;
}

}  // namespace

void save(const Model &model, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    }
    const auto &cfg = model.config;
    const auto &diag = model.diagnostics;
    out << magic << ' ' << version << '\n';
    out << "[kernel]\n"
        << "kind " << to_string(model.kernel.kind()) << '\n'
        << "q " << num(model.kernel.q()) << '\n';
    out << "[config]\n"
        << "c0 " << num(cfg.c0) << '\n'
        << "tau " << num(cfg.tau.value()) << '\n'
        << "formulation " << to_string(cfg.formulation) << '\n'
        << "weighting " << (cfg.weighting ? 1 : 0) << '\n'
        << "tol " << num(cfg.solver.tol) << '\n'
        << "max_iter " << cfg.solver.max_iter << '\n'
        << "seed " << cfg.solver.seed << '\n'
        << "bias " << num(model.bias) << '\n'
        << "iterations " << diag.iterations << '\n'
        << "dual_objective " << num(diag.dual_objective) << '\n'
        << "kkt_residual " << num(diag.kkt_residual) << '\n'
        << "converged " << (diag.converged ? 1 : 0) << '\n'
        << "bias_support " << diag.bias_support << '\n'
        << "hit_upper_cap " << (diag.hit_upper_cap ? 1 : 0) << '\n';
    if (model.normalization) {
        out << "[normalization]\nmin";
        for (Eigen::Index j = 0; j < model.normalization->min.size(); ++j) {
            out << ' ' << num(model.normalization->min(j));
        }
        out << "\nmax";
        for (Eigen::Index j = 0; j < model.normalization->max.size(); ++j) {
            out << ' ' << num(model.normalization->max(j));
        }
        out << '\n';
    }
    out << "[support] " << model.coeffs.size() << ' ' << model.support_x.cols() << '\n';
    for (Eigen::Index i = 0; i < model.coeffs.size(); ++i) {
        out << num(model.coeffs(i));
        for (Eigen::Index j = 0; j < model.support_x.cols(); ++j) {
            out << ' ' << num(model.support_x(i, j));
        }
        out << '\n';
    }
    out << "[end]\n";
    if (!out) {
        throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
    }
}

Model load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw model_format_error("empty model file");
    }
    const auto header = tokens_of(line);
    if (header.size() != 2 || header[0] != magic) {
        throw model_format_error(fmt::format("not a model file (header '{}')", line));
    }
    if (header[1] != version) {
        throw model_format_error(fmt::format("unsupported model version '{}'", header[1]));
    }

    std::map<std::string, Section> sections;
    std::vector<std::string> support_header;
    std::vector<std::vector<std::string>> support_rows;
    std::string current;
    bool ended = false;
    while (std::getline(in, line)) {
        auto toks = tokens_of(line);
        if (toks.empty()) {
            continue;
        }
        if (toks[0].size() > 2 && toks[0].front() == '[' && toks[0].back() == ']') {
            current = toks[0].substr(1, toks[0].size() - 2);
            if (current == "end") {
                ended = true;
                break;
            }
            sections[current];
            if (current == "support") {
                support_header.assign(toks.begin() + 1, toks.end());
            }
            continue;
        }
        if (current.empty()) {
            throw model_format_error(fmt::format("content outside a section: '{}'", line));
        }
        if (current == "support") {
            support_rows.push_back(std::move(toks));
        } else {
            auto key = toks[0];
            toks.erase(toks.begin());
            sections[current][key] = std::move(toks);
        }
    }
    for (const char *required : {"kernel", "config", "support"}) {
        if (sections.find(required) == sections.end()) {
            throw model_format_error(fmt::format("truncated model file: missing section [{}]", required));
        }
    }

    Model model;
    const auto &ks = sections["kernel"];
    const auto kind = parse_kernel_kind(field(ks, "kernel", "kind")[0]);
    model.kernel = kind == KernelKind::linear ? KernelSpec::linear()
                                              : KernelSpec::rbf(to_double(field(ks, "kernel", "q")[0], "q"));

    const auto &cs = sections["config"];
    auto get = [&](const std::string &key) { return field(cs, "config", key)[0]; };
    auto &cfg = model.config;
    cfg.c0 = to_double(get("c0"), "c0");
    cfg.tau = Tau(to_double(get("tau"), "tau"));
    cfg.formulation = parse_formulation(get("formulation"));
    cfg.kernel = model.kernel;
    cfg.weighting = to_uint(get("weighting"), "weighting") != 0;
    cfg.solver.tol = to_double(get("tol"), "tol");
    cfg.solver.max_iter = to_uint(get("max_iter"), "max_iter");
    cfg.solver.seed = to_uint(get("seed"), "seed");
    model.bias = to_double(get("bias"), "bias");
    auto &diag = model.diagnostics;
    diag.iterations = to_uint(get("iterations"), "iterations");
    diag.dual_objective = to_double(get("dual_objective"), "dual_objective");
    diag.kkt_residual = to_double(get("kkt_residual"), "kkt_residual");
    diag.converged = to_uint(get("converged"), "converged") != 0;
    diag.bias_support = to_uint(get("bias_support"), "bias_support");
    diag.hit_upper_cap = to_uint(get("hit_upper_cap"), "hit_upper_cap") != 0;

    if (const auto it = sections.find("normalization"); it != sections.end()) {
        const auto &mins = field(it->second, "normalization", "min");
        const auto &maxs = field(it->second, "normalization", "max");
        if (mins.size() != maxs.size()) {
            throw model_format_error("normalization min/max lengths differ");
        }
        NormalizationParams params{Eigen::VectorXd(static_cast<Eigen::Index>(mins.size())),
                                   Eigen::VectorXd(static_cast<Eigen::Index>(maxs.size()))};
        for (std::size_t j = 0; j < mins.size(); ++j) {
            params.min(static_cast<Eigen::Index>(j)) = to_double(mins[j], "normalization min");
            params.max(static_cast<Eigen::Index>(j)) = to_double(maxs[j], "normalization max");
        }
        model.normalization = std::move(params);
    }

    if (support_header.size() != 2) {
        throw model_format_error("section [support] needs '<count> <dim>'");
    }
    const auto count = static_cast<Eigen::Index>(to_uint(support_header[0], "support count"));
    const auto dim = static_cast<Eigen::Index>(to_uint(support_header[1], "support dim"));
    if (static_cast<Eigen::Index>(support_rows.size()) != count || !ended) {
        throw model_format_error(fmt::format("truncated model file: section [support] has {} of {} rows{}",
                                             support_rows.size(), count, ended ? "" : " and no [end] marker"));
    }
    model.support_x.resize(count, dim);
    model.coeffs.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto &row = support_rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != dim + 1) {
            throw model_format_error(fmt::format("support row {} has {} values, expected {}", i, row.size(), dim + 1));
        }
        model.coeffs(i) = to_double(row[0], "coefficient");
        for (Eigen::Index j = 0; j < dim; ++j) {
            model.support_x(i, j) = to_double(row[static_cast<std::size_t>(j) + 1], "support feature");
        }
    }
    return model;
}

}  // namespace pinsvm
