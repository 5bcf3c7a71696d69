#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "famoel/common.hpp"

namespace famoel {

enum class ColumnRole { NumericFeature, CategoricalFeature, Label, Sensitive };

enum class Group : std::uint8_t { Unprivileged = 0, Privileged = 1 };

struct DatasetSchema {
    std::map<std::string, ColumnRole> column_roles;
    std::string positive_label_value;
    std::string privileged_value;

    // Throws SchemaMismatch unless exactly one label and one sensitive column are declared.
    void validate() const;
    [[nodiscard]] std::string label_column() const;
    [[nodiscard]] std::string sensitive_column() const;
};

// JSON schema file:
//   { "columns": {"age": "numeric", "purpose": "categorical", "sex": "sensitive", "y": "label"},
//     "positive_label": "good", "privileged": "male" }
DatasetSchema load_schema(const std::filesystem::path& path);

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::size_t dropped_rows = 0;  // rows with an empty label or sensitive cell

    [[nodiscard]] std::size_t column_index(const std::string& name) const;
};

RawTable load_dataset(const std::filesystem::path& path, const DatasetSchema& schema);

struct EncodedDataset {
    Matrix features;  // N x d
    std::vector<int> labels;
    std::vector<Group> groups;
    std::vector<std::string> feature_names;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    [[nodiscard]] std::size_t n_features() const noexcept { return features.cols(); }

    [[nodiscard]] EncodedDataset subset(const std::vector<std::size_t>& rows) const;
};

// Encodes every row of `raw`; standardization statistics and numeric imputation means are
// computed on `train_rows` only. Zero-variance numeric columns are dropped with a warning.
EncodedDataset preprocess(const RawTable& raw, const DatasetSchema& schema,
                          const std::vector<std::size_t>& train_rows);

struct SplitRatios {
    double train = 0.6;
    double validation = 0.2;
    double test = 0.2;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

// Unstratified seeded permutation; |train| = floor(r_train N), |validation| = floor(r_val N),
// test takes the remainder.
SplitIndices split(std::size_t n, std::uint64_t seed, SplitRatios ratios = {});

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> holdout;
};

std::vector<Fold> kfold(std::size_t n, std::size_t k, std::uint64_t seed);

struct SplitBundle {
    EncodedDataset train;
    EncodedDataset validation;
    EncodedDataset test;
    std::uint64_t seed = 0;
};

SplitBundle make_split_bundle(const RawTable& raw, const DatasetSchema& schema, const SplitIndices& indices,
                              std::uint64_t seed);

// Fold `fold` of a k-fold partition becomes the test set; the remaining rows are divided
// train:validation = 3:1 so that the overall proportions stay 6:2:2 at k = 5.
SplitIndices fold_split(std::size_t n, std::size_t k, std::size_t fold, std::uint64_t seed);

}  // namespace famoel
