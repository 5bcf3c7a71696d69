#include "famoel/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "json.hpp"

#include "famoel/csv.hpp"

namespace famoel {

namespace {

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "?" || cell == "NA" || cell == "NaN" || cell == "nan";
}

ColumnRole parse_role(const std::string& s) {
    if (s == "numeric" || s == "numeric-feature") return ColumnRole::NumericFeature;
    if (s == "categorical" || s == "categorical-feature") return ColumnRole::CategoricalFeature;
    if (s == "label") return ColumnRole::Label;
    if (s == "sensitive") return ColumnRole::Sensitive;
    throw Error(ErrorCode::SchemaMismatch, "unknown column role '" + s + "'");
}

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

}  // namespace

void DatasetSchema::validate() const {
    std::size_t labels = 0;
    std::size_t sensitive = 0;
    for (const auto& [name, role] : column_roles) {
        labels += role == ColumnRole::Label;
        sensitive += role == ColumnRole::Sensitive;
    }
    if (labels != 1 || sensitive != 1) {
        throw Error(ErrorCode::SchemaMismatch, "schema needs exactly one label and one sensitive column (got " +
                                                   std::to_string(labels) + ", " + std::to_string(sensitive) + ")");
    }
}

std::string DatasetSchema::label_column() const {
    for (const auto& [name, role] : column_roles) {
        if (role == ColumnRole::Label) return name;
    }
    throw Error(ErrorCode::SchemaMismatch, "no label column");
}

std::string DatasetSchema::sensitive_column() const {
    for (const auto& [name, role] : column_roles) {
        if (role == ColumnRole::Sensitive) return name;
    }
    throw Error(ErrorCode::SchemaMismatch, "no sensitive column");
}

DatasetSchema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open schema " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("schema parse error: ") + e.what());
    }
    DatasetSchema schema;
    try {
        for (const auto& [name, role] : j.at("columns").items()) {
            schema.column_roles[name] = parse_role(role.get<std::string>());
        }
        schema.positive_label_value = j.at("positive_label").get<std::string>();
        schema.privileged_value = j.at("privileged").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("schema field error: ") + e.what());
    }
    schema.validate();
    return schema;
}

std::size_t RawTable::column_index(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw Error(ErrorCode::SchemaMismatch, "column '" + name + "' not in table");
    }
    return static_cast<std::size_t>(it - header.begin());
}

RawTable load_dataset(const std::filesystem::path& path, const DatasetSchema& schema) {
    schema.validate();
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::Io, "dataset not found: " + path.string());
    }
    csv::Table table = csv::read_file(path, true);
    RawTable raw;
    raw.header = std::move(table.header);
    for (const auto& [name, role] : schema.column_roles) {
        (void)raw.column_index(name);
    }
    const std::size_t label = raw.column_index(schema.label_column());
    const std::size_t sensitive = raw.column_index(schema.sensitive_column());
    for (auto& row : table.rows) {
        if (is_missing(row[label]) || is_missing(row[sensitive])) {
            ++raw.dropped_rows;
            continue;
        }
        raw.rows.push_back(std::move(row));
    }
    return raw;
}

EncodedDataset EncodedDataset::subset(const std::vector<std::size_t>& rows) const {
    EncodedDataset out;
    out.features = Matrix(rows.size(), features.cols());
    out.labels.reserve(rows.size());
    out.groups.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto src = features.row(rows[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels.push_back(labels[rows[i]]);
        out.groups.push_back(groups[rows[i]]);
    }
    out.feature_names = feature_names;
    out.warnings = warnings;
    return out;
}

EncodedDataset preprocess(const RawTable& raw, const DatasetSchema& schema,
                          const std::vector<std::size_t>& train_rows) {
    if (train_rows.empty()) {
        throw Error(ErrorCode::EmptyDataset, "preprocess needs at least one training row");
    }
    const std::size_t n = raw.rows.size();
    for (std::size_t r : train_rows) {
        if (r >= n) throw Error(ErrorCode::DimensionMismatch, "train row index out of range");
    }

    const std::size_t sensitive = raw.column_index(schema.sensitive_column());
    bool privileged_seen = false;
    for (const auto& row : raw.rows) {
        privileged_seen = privileged_seen || row[sensitive] == schema.privileged_value;
    }
    if (!privileged_seen && n > 0) {
        throw Error(ErrorCode::SchemaMismatch,
                    "privileged value '" + schema.privileged_value + "' never occurs in column " +
                        schema.sensitive_column());
    }

    EncodedDataset out;
    std::vector<std::vector<double>> columns;

    // Preserve the CSV column order for reproducible feature layout.
    for (std::size_t c = 0; c < raw.header.size(); ++c) {
        auto it = schema.column_roles.find(raw.header[c]);
        if (it == schema.column_roles.end()) continue;
        const std::string& name = raw.header[c];

        if (it->second == ColumnRole::NumericFeature) {
            std::vector<double> values(n, 0.0);
            std::vector<bool> missing(n, false);
            for (std::size_t r = 0; r < n; ++r) {
                if (is_missing(raw.rows[r][c])) {
                    missing[r] = true;
                } else {
                    values[r] = csv::parse_double(raw.rows[r][c]);
                }
            }
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t r : train_rows) {
                if (!missing[r]) {
                    sum += values[r];
                    ++count;
                }
            }
            const double impute = count ? sum / static_cast<double>(count) : 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                if (missing[r]) values[r] = impute;
            }
            double mean = 0.0;
            for (std::size_t r : train_rows) mean += values[r];
            mean /= static_cast<double>(train_rows.size());
            double var = 0.0;
            for (std::size_t r : train_rows) var += (values[r] - mean) * (values[r] - mean);
            var /= static_cast<double>(train_rows.size());
            const double sd = std::sqrt(var);
            if (!(sd > 0.0)) {
                out.warnings.push_back(std::string(to_string(ErrorCode::ConstantColumn)) + ": dropped '" + name + "'");
                continue;
            }
            for (double& v : values) v = (v - mean) / sd;
            columns.push_back(std::move(values));
            out.feature_names.push_back(name);
        } else if (it->second == ColumnRole::CategoricalFeature) {
            std::set<std::string> levels;
            for (const auto& row : raw.rows) {
                levels.insert(is_missing(row[c]) ? std::string("missing") : row[c]);
            }
            for (const auto& level : levels) {
                std::vector<double> values(n, 0.0);
                for (std::size_t r = 0; r < n; ++r) {
                    const std::string cell = is_missing(raw.rows[r][c]) ? std::string("missing") : raw.rows[r][c];
                    values[r] = cell == level ? 1.0 : 0.0;
                }
                columns.push_back(std::move(values));
                out.feature_names.push_back(name + "=" + level);
            }
        }
    }

    out.features = Matrix(n, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        for (std::size_t r = 0; r < n; ++r) out.features(r, j) = columns[j][r];
    }
    const std::size_t label = raw.column_index(schema.label_column());
    out.labels.resize(n);
    out.groups.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        out.labels[r] = raw.rows[r][label] == schema.positive_label_value ? 1 : 0;
        out.groups[r] = raw.rows[r][sensitive] == schema.privileged_value ? Group::Privileged : Group::Unprivileged;
    }
    return out;
}

SplitIndices split(std::size_t n, std::uint64_t seed, SplitRatios ratios) {
    if (n < 10) {
        throw Error(ErrorCode::TooFewSamples, "split needs N >= 10");
    }
    if (ratios.train <= 0 || ratios.validation <= 0 || ratios.test < 0 ||
        ratios.train + ratios.validation > 1.0 + 1e-12) {
        throw Error(ErrorCode::InvalidValue, "bad split ratios");
    }
    const auto idx = permutation(n, seed);
    // Small epsilon so that e.g. 0.6 * 10 floors to 6 despite binary rounding.
    const auto n_train = static_cast<std::size_t>(std::floor(ratios.train * static_cast<double>(n) + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(ratios.validation * static_cast<double>(n) + 1e-9));
    SplitIndices out;
    out.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.validation.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                          idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
    return out;
}

std::vector<Fold> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || n < k) {
        throw Error(ErrorCode::InvalidValue, "kfold needs k >= 2 and N >= k");
    }
    const auto idx = permutation(n, seed);
    std::vector<Fold> folds(k);
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= start && i < start + size) {
                folds[f].holdout.push_back(idx[i]);
            } else {
                folds[f].train.push_back(idx[i]);
            }
        }
        start += size;
    }
    return folds;
}

SplitIndices fold_split(std::size_t n, std::size_t k, std::size_t fold, std::uint64_t seed) {
    auto folds = kfold(n, k, seed);
    if (fold >= k) {
        throw Error(ErrorCode::InvalidValue, "fold index out of range");
    }
    SplitIndices out;
    out.test = folds[fold].holdout;
    auto rest = folds[fold].train;
    Rng rng(derive_seed(seed, static_cast<std::uint32_t>(fold), 0xF01Du));
    std::shuffle(rest.begin(), rest.end(), rng);
    const std::size_t n_train = (rest.size() * 3) / 4;
    out.train.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.validation.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_train), rest.end());
    return out;
}

SplitBundle make_split_bundle(const RawTable& raw, const DatasetSchema& schema, const SplitIndices& indices,
                              std::uint64_t seed) {
    EncodedDataset all = preprocess(raw, schema, indices.train);
    SplitBundle bundle;
    bundle.train = all.subset(indices.train);
    bundle.validation = all.subset(indices.validation);
    bundle.test = all.subset(indices.test);
    bundle.seed = seed;
    return bundle;
}

}  // namespace famoel
