#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

namespace pinsvm {

/// Per-feature affine map fitted on a training set, sending [min, max] to [-1, 1].
struct NormalizationParams {
    Eigen::VectorXd min;
    Eigen::VectorXd max;

    /// Maps one raw feature vector. Constant features map to 0; values outside the
    /// fitted range are not clamped.
    [[nodiscard]] Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd> &x) const;
    [[nodiscard]] Eigen::MatrixXd apply_rows(const Eigen::Ref<const Eigen::MatrixXd> &rows) const;
};

/**
 * Binary classification samples: an l x n feature matrix and l labels in {-1, +1}.
 *
 * Immutable once constructed; the constructor validates the invariants.
 */
class Dataset {
  public:
    Dataset(Eigen::MatrixXd features, Eigen::VectorXd labels,
            std::optional<NormalizationParams> normalization = std::nullopt);

    [[nodiscard]] const Eigen::MatrixXd &features() const noexcept { return features_; }
    [[nodiscard]] const Eigen::VectorXd &labels() const noexcept { return labels_; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(labels_.size()); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
    [[nodiscard]] std::size_t num_positive() const noexcept;
    [[nodiscard]] std::size_t num_negative() const noexcept { return size() - num_positive(); }

    /// Normalization that produced these features, if any.
    [[nodiscard]] const std::optional<NormalizationParams> &normalization() const noexcept { return normalization_; }

    /// Rows selected by index, in the given order.
    [[nodiscard]] Dataset subset(const std::vector<std::size_t> &rows) const;

  private:
    Eigen::MatrixXd features_;
    Eigen::VectorXd labels_;
    std::optional<NormalizationParams> normalization_;
};

/// Per-sample penalties C_i (see class_weights).
using WeightVector = Eigen::VectorXd;

/// Reads a comma-separated file. A first row containing any non-numeric cell is
/// treated as a header. Labels {0, 1} are remapped to {-1, +1}.
/// A negative label_column counts from the end (-1 is the last column).
[[nodiscard]] Dataset load_csv(const std::filesystem::path &path, int label_column = -1);

/// Reads sparse "label idx:val ..." lines with 1-based increasing indices.
/// The dense width is max(largest index seen, min_features).
[[nodiscard]] Dataset load_libsvm(const std::filesystem::path &path, std::size_t min_features = 0);

/// Reads the whitespace-separated MONK's problems layout: class label {0,1} first,
/// then the attributes, then a trailing instance id which is ignored.
[[nodiscard]] Dataset load_monk(const std::filesystem::path &path);

/// Fits min-max parameters on `train` only and applies them to both sets.
[[nodiscard]] std::tuple<Dataset, Dataset, NormalizationParams> normalize_minmax(const Dataset &train,
                                                                               const Dataset &test);

/// Stratified, seeded train/test partition. Each class contributes
/// round(n_train * class_share) rows to the train part, so class proportions
/// agree with the full set within one sample. Rows keep their original order.
[[nodiscard]] std::pair<Dataset, Dataset> split(const Dataset &dataset, std::size_t n_train, std::uint64_t seed);

/// C_i = C0 for positives and p * C0 for negatives, p = #positives / #negatives.
/// Throws std::invalid_argument on a single-class label vector or C0 <= 0.
[[nodiscard]] WeightVector class_weights(const Eigen::Ref<const Eigen::VectorXd> &labels, double c0);

}  // namespace pinsvm
