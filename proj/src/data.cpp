#include "pinsvm/data.hpp"

#include "pinsvm/error.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pinsvm {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<double> remap_label(double raw) {
    if (raw == 1.0) {
        return 1.0;
    }
    if (raw == -1.0 || raw == 0.0) {
        return -1.0;
    }
    return std::nullopt;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

std::ifstream open_input(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
    }
    return in;
}

Dataset assemble(const std::vector<std::vector<double>> &rows, const std::vector<double> &labels, std::size_t dim,
                 const std::filesystem::path &path) {
    if (rows.empty()) {
        throw parse_error(fmt::format("{}: no samples", path.string()));
    }
    if (dim == 0) {
        throw parse_error(fmt::format("{}: no feature columns", path.string()));
    }
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
        y(static_cast<Eigen::Index>(i)) = labels[i];
    }
    return Dataset(std::move(x), std::move(y));
}

}  // namespace

Eigen::VectorXd NormalizationParams::apply(const Eigen::Ref<const Eigen::VectorXd> &x) const {
    if (x.size() != min.size()) {
        throw std::invalid_argument(
            fmt::format("normalization expects {} features, got {}", min.size(), x.size()));
    }
    Eigen::VectorXd out(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double range = max(j) - min(j);
        out(j) = range > 0.0 ? 2.0 * (x(j) - min(j)) / range - 1.0 : 0.0;
    }
    return out;
}

Eigen::MatrixXd NormalizationParams::apply_rows(const Eigen::Ref<const Eigen::MatrixXd> &rows) const {
    Eigen::MatrixXd out(rows.rows(), rows.cols());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        out.row(i) = apply(Eigen::VectorXd(rows.row(i).transpose())).transpose();
    }
    return out;
}

Dataset::Dataset(Eigen::MatrixXd features, Eigen::VectorXd labels, std::optional<NormalizationParams> normalization)
    : features_(std::move(features)), labels_(std::move(labels)), normalization_(std::move(normalization)) {
    if (features_.rows() != labels_.size()) {
        throw std::invalid_argument(
            fmt::format("feature rows ({}) and labels ({}) differ", features_.rows(), labels_.size()));
    }
    if (features_.rows() < 1 || features_.cols() < 1) {
        throw std::invalid_argument("a dataset needs at least one sample and one feature");
    }
    for (Eigen::Index i = 0; i < labels_.size(); ++i) {
        if (labels_(i) != 1.0 && labels_(i) != -1.0) {
            throw std::invalid_argument(fmt::format("label {} at row {} is not +-1", labels_(i), i));
        }
    }
}

std::size_t Dataset::num_positive() const noexcept {
    return static_cast<std::size_t>((labels_.array() > 0.0).count());
}

Dataset Dataset::subset(const std::vector<std::size_t> &rows) const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), features_.cols());
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(rows[k]);
        x.row(static_cast<Eigen::Index>(k)) = features_.row(i);
        y(static_cast<Eigen::Index>(k)) = labels_(i);
    }
    return Dataset(std::move(x), std::move(y), normalization_);
}

Dataset load_csv(const std::filesystem::path &path, int label_column) {
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::vector<double> labels;
    std::size_t width = 0;
    std::size_t line_no = 0;
    bool first_content_row = true;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line, ',');
        std::vector<std::optional<double>> values;
        values.reserve(fields.size());
        bool any_text = false;
        for (const auto f : fields) {
            values.push_back(parse_double(f));
            any_text = any_text || !values.back();
        }
        if (first_content_row) {
            first_content_row = false;
            width = fields.size();
            if (any_text) {
                continue;  // header
            }
        }
        if (fields.size() != width) {
            throw parse_error(fmt::format("{}: row {} has {} columns, expected {}", path.string(), line_no,
                                          fields.size(), width));
        }
        const int resolved = label_column < 0 ? static_cast<int>(width) + label_column : label_column;
        if (resolved < 0 || resolved >= static_cast<int>(width)) {
            throw std::invalid_argument(
                fmt::format("label column {} out of range for {} columns", label_column, width));
        }
        std::vector<double> row;
        row.reserve(width - 1);
        for (std::size_t c = 0; c < width; ++c) {
            if (!values[c]) {
                throw parse_error(fmt::format("{}: non-numeric cell '{}' at row {}, column {}", path.string(),
                                              trim(fields[c]), line_no, c + 1));
            }
            if (static_cast<int>(c) == resolved) {
                const auto label = remap_label(*values[c]);
                if (!label) {
                    throw parse_error(fmt::format("{}: row {}: label {} not +-1 or 0/1", path.string(), line_no,
                                                  *values[c]));
                }
                labels.push_back(*label);
            } else {
                row.push_back(*values[c]);
            }
        }
        rows.push_back(std::move(row));
    }
    return assemble(rows, labels, width == 0 ? 0 : width - 1, path);
}

Dataset load_libsvm(const std::filesystem::path &path, std::size_t min_features) {
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::vector<double> labels;
    std::size_t dim = min_features;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        auto content = std::string_view(line);
        if (const auto hash = content.find('#'); hash != std::string_view::npos) {
            content = content.substr(0, hash);
        }
        const auto tokens = split_whitespace(content);
        if (tokens.empty()) {
            continue;
        }
        const auto raw = parse_double(tokens[0]);
        const auto label = raw ? remap_label(*raw) : std::nullopt;
        if (!label) {
            throw parse_error(
                fmt::format("{}: line {}: label '{}' not +-1 or 0/1", path.string(), line_no, tokens[0]));
        }
        std::vector<double> row;
        std::size_t last_index = 0;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            const auto tok = tokens[t];
            const auto colon = tok.find(':');
            if (colon == std::string_view::npos) {
                throw parse_error(fmt::format("{}: line {}: malformed pair '{}'", path.string(), line_no, tok));
            }
            std::size_t index = 0;
            const auto idx_str = tok.substr(0, colon);
            const auto [ptr, ec] = std::from_chars(idx_str.data(), idx_str.data() + idx_str.size(), index);
            const auto value = parse_double(tok.substr(colon + 1));
            if (ec != std::errc{} || ptr != idx_str.data() + idx_str.size() || index == 0 || !value) {
                throw parse_error(fmt::format("{}: line {}: malformed pair '{}'", path.string(), line_no, tok));
            }
            if (index <= last_index) {
                throw parse_error(fmt::format("{}: line {}: index {} does not increase", path.string(), line_no,
                                              index));
            }
            last_index = index;
            row.resize(index, 0.0);
            row[index - 1] = *value;
        }
        dim = std::max(dim, row.size());
        rows.push_back(std::move(row));
        labels.push_back(*label);
    }
    return assemble(rows, labels, dim, path);
}

Dataset load_monk(const std::filesystem::path &path) {
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::vector<double> labels;
    std::size_t width = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = split_whitespace(line);
        if (tokens.empty()) {
            continue;
        }
        if (tokens.size() < 3) {
            throw parse_error(fmt::format("{}: line {}: too few fields", path.string(), line_no));
        }
        // class, attributes..., id
        const std::size_t n_attr = tokens.size() - 2;
        if (width == 0) {
            width = n_attr;
        } else if (n_attr != width) {
            throw parse_error(fmt::format("{}: line {} has {} attributes, expected {}", path.string(), line_no,
                                          n_attr, width));
        }
        const auto raw = parse_double(tokens[0]);
        const auto label = raw ? remap_label(*raw) : std::nullopt;
        if (!label) {
            throw parse_error(fmt::format("{}: line {}: class '{}' not 0/1", path.string(), line_no, tokens[0]));
        }
        std::vector<double> row;
        for (std::size_t t = 1; t <= n_attr; ++t) {
            const auto v = parse_double(tokens[t]);
            if (!v) {
                throw parse_error(fmt::format("{}: non-numeric cell '{}' at row {}, column {}", path.string(),
                                              tokens[t], line_no, t + 1));
            }
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
        labels.push_back(*label);
    }
    return assemble(rows, labels, width, path);
}

std::tuple<Dataset, Dataset, NormalizationParams> normalize_minmax(const Dataset &train, const Dataset &test) {
    if (test.dim() != train.dim()) {
        throw std::invalid_argument(
            fmt::format("test has {} features, train has {}", test.dim(), train.dim()));
    }
    NormalizationParams params{train.features().colwise().minCoeff().transpose(),
                               train.features().colwise().maxCoeff().transpose()};
    Dataset train_out(params.apply_rows(train.features()), train.labels(), params);
    Dataset test_out(params.apply_rows(test.features()), test.labels(), params);
    return {std::move(train_out), std::move(test_out), std::move(params)};
}

std::pair<Dataset, Dataset> split(const Dataset &dataset, std::size_t n_train, std::uint64_t seed) {
    const std::size_t l = dataset.size();
    if (n_train < 1 || n_train >= l) {
        throw std::invalid_argument(fmt::format("n_train must be in [1, {}), got {}", l, n_train));
    }
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < l; ++i) {
        (dataset.labels()(static_cast<Eigen::Index>(i)) > 0 ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty()) {
        throw std::invalid_argument("split needs samples from both classes");
    }
    const double share = static_cast<double>(pos.size()) / static_cast<double>(l);
    auto n_pos = static_cast<std::size_t>(std::llround(share * static_cast<double>(n_train)));
    n_pos = std::clamp(n_pos, n_train > neg.size() ? n_train - neg.size() : std::size_t{0},
                       std::min(pos.size(), n_train));
    const std::size_t n_neg = n_train - n_pos;

    std::mt19937_64 rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    std::vector<bool> in_train(l, false);
    for (std::size_t k = 0; k < n_pos; ++k) {
        in_train[pos[k]] = true;
    }
    for (std::size_t k = 0; k < n_neg; ++k) {
        in_train[neg[k]] = true;
    }
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < l; ++i) {
        (in_train[i] ? train_rows : test_rows).push_back(i);
    }
    return {dataset.subset(train_rows), dataset.subset(test_rows)};
}

WeightVector class_weights(const Eigen::Ref<const Eigen::VectorXd> &labels, double c0) {
    if (!(c0 > 0.0)) {
        throw std::invalid_argument(fmt::format("C0 must be positive, got {}", c0));
    }
    const auto n_pos = (labels.array() > 0.0).count();
    const auto n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("degenerate class distribution: both classes are required");
    }
    const double negative_weight = c0 * static_cast<double>(n_pos) / static_cast<double>(n_neg);
    WeightVector c(labels.size());
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        c(i) = labels(i) > 0.0 ? c0 : negative_weight;
    }
    return c;
}

}  // namespace pinsvm
