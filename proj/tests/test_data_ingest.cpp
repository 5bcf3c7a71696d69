#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "test_util.hpp"

#include "famoel/csv.hpp"
#include "famoel/data_ingest.hpp"

using namespace famoel;
using testutil::TempDir;

namespace {

DatasetSchema age_sex_schema() {
    DatasetSchema s;
    s.column_roles = {{"age", ColumnRole::NumericFeature}, {"sex", ColumnRole::Sensitive}, {"y", ColumnRole::Label}};
    s.positive_label_value = "1";
    s.privileged_value = "M";
    return s;
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

void check_partition(std::size_t n, const std::vector<std::vector<std::size_t>>& parts) {
    std::vector<int> seen(n, 0);
    for (const auto& p : parts) {
        for (std::size_t i : p) {
            REQUIRE(i < n);
            ++seen[i];
        }
    }
    for (int s : seen) CHECK(s == 1);
}

}  // namespace

TEST_SUITE("data_ingest") {

TEST_CASE("csv parser handles quotes and rejects ragged rows") {
    const auto t = csv::parse("a,b\n\"x,1\",\"say \"\"hi\"\"\"\n");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == "x,1");
    CHECK(t.rows[0][1] == "say \"hi\"");
    CHECK(testutil::error_code_of([] { csv::parse("a,b\n1\n"); }) == ErrorCode::MalformedCsv);
    CHECK(testutil::error_code_of([] { csv::parse("a,b\n\"1,2\n"); }) == ErrorCode::MalformedCsv);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9, 0.0}) {
        CHECK(csv::parse_double(csv::format_double(v)) == v);
    }
}

TEST_CASE("load_dataset: identity load of a 4-row table") {
    TempDir dir("ingest");
    const auto p = dir.write("d.csv", "age,sex,y\n20,M,1\n30,F,0\n40,M,0\n50,F,1\n");
    const auto raw = load_dataset(p, age_sex_schema());
    CHECK(raw.rows.size() == 4);
    CHECK(raw.dropped_rows == 0);
}

TEST_CASE("load_dataset: missing sensitive column is a schema mismatch") {
    TempDir dir("ingest");
    const auto p = dir.write("d.csv", "age,y\n20,1\n30,0\n");
    CHECK(testutil::error_code_of([&] { load_dataset(p, age_sex_schema()); }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("load_dataset: a row with an empty label is dropped and counted") {
    TempDir dir("ingest");
    const auto p = dir.write("d.csv", "age,sex,y\n20,M,1\n30,F,\n40,M,0\n");
    const auto raw = load_dataset(p, age_sex_schema());
    CHECK(raw.rows.size() == 2);
    CHECK(raw.dropped_rows == 1);
}

TEST_CASE("load_dataset: malformed csv") {
    TempDir dir("ingest");
    const auto p = dir.write("d.csv", "age,sex,y\n20,M\n");
    CHECK(testutil::error_code_of([&] { load_dataset(p, age_sex_schema()); }) == ErrorCode::MalformedCsv);
}

TEST_CASE("schema file loads and validates roles") {
    TempDir dir("ingest");
    const auto ok = dir.write("s.json", R"({"columns":{"age":"numeric","c":"categorical","sex":"sensitive","y":"label"},
                                          "positive_label":"yes","privileged":"M"})");
    const auto s = load_schema(ok);
    CHECK(s.label_column() == "y");
    CHECK(s.sensitive_column() == "sex");
    const auto two_labels = dir.write("t.json", R"({"columns":{"a":"label","y":"label","sex":"sensitive"},
                                                  "positive_label":"1","privileged":"M"})");
    CHECK(testutil::error_code_of([&] { load_schema(two_labels); }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("preprocess: two-point z-score, group mapping, label mapping") {
    RawTable raw;
    raw.header = {"age", "sex", "y"};
    raw.rows = {{"2", "M", "1"}, {"4", "F", "0"}};
    const auto d = preprocess(raw, age_sex_schema(), {0, 1});
    REQUIRE(d.n_features() == 1);
    CHECK(d.features(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(d.features(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.groups == std::vector<Group>{Group::Privileged, Group::Unprivileged});
    CHECK(d.labels == std::vector<int>{1, 0});
}

TEST_CASE("preprocess: sensitive column [M, F, M]") {
    RawTable raw;
    raw.header = {"age", "sex", "y"};
    raw.rows = {{"1", "M", "1"}, {"2", "F", "0"}, {"3", "M", "0"}};
    const auto d = preprocess(raw, age_sex_schema(), {0, 1, 2});
    CHECK(d.groups == std::vector<Group>{Group::Privileged, Group::Unprivileged, Group::Privileged});
}

TEST_CASE("preprocess: three-level categorical gives three one-hot columns") {
    DatasetSchema s = age_sex_schema();
    s.column_roles["colour"] = ColumnRole::CategoricalFeature;
    RawTable raw;
    raw.header = {"age", "colour", "sex", "y"};
    raw.rows = {{"1", "red", "M", "1"}, {"2", "green", "F", "0"}, {"3", "blue", "M", "0"}, {"4", "red", "F", "1"}};
    const auto d = preprocess(raw, s, all_rows(4));
    std::size_t onehot = 0;
    for (const auto& name : d.feature_names) onehot += name.rfind("colour=", 0) == 0;
    CHECK(onehot == 3);
    for (std::size_t r = 0; r < d.size(); ++r) {
        double sum = 0;
        for (std::size_t c = 0; c < d.n_features(); ++c) {
            if (d.feature_names[c].rfind("colour=", 0) == 0) sum += d.features(r, c);
        }
        CHECK(sum == 1.0);
    }
}

TEST_CASE("preprocess: statistics come from train rows only; constant column dropped with warning") {
    DatasetSchema s = age_sex_schema();
    s.column_roles["k"] = ColumnRole::NumericFeature;
    RawTable raw;
    raw.header = {"age", "k", "sex", "y"};
    raw.rows = {{"0", "5", "M", "1"}, {"2", "5", "F", "0"}, {"100", "7", "M", "0"}};
    const auto d = preprocess(raw, s, {0, 1});
    REQUIRE(d.n_features() == 1);
    CHECK(d.feature_names[0] == "age");
    CHECK(d.features(2, 0) == doctest::Approx(99.0));  // (100 - 1) / 1
    REQUIRE(d.warnings.size() == 1);
    CHECK(d.warnings[0].find("ConstantColumn") != std::string::npos);
}

TEST_CASE("preprocess: standardized train columns have mean 0 and sd 1; re-standardizing is a no-op") {
    Rng rng(3);
    std::normal_distribution<double> nd(50, 12);
    RawTable raw;
    raw.header = {"age", "sex", "y"};
    for (int i = 0; i < 200; ++i) raw.rows.push_back({csv::format_double(nd(rng)), i % 3 ? "M" : "F", i % 2 ? "1" : "0"});
    const auto train = all_rows(150);
    const auto d = preprocess(raw, age_sex_schema(), train);
    double mean = 0, var = 0;
    for (std::size_t r : train) mean += d.features(r, 0) / 150.0;
    for (std::size_t r : train) var += (d.features(r, 0) - mean) * (d.features(r, 0) - mean) / 150.0;
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);

    RawTable again = raw;
    for (std::size_t r = 0; r < raw.rows.size(); ++r) again.rows[r][0] = csv::format_double(d.features(r, 0));
    const auto d2 = preprocess(again, age_sex_schema(), train);
    for (std::size_t r = 0; r < raw.rows.size(); ++r) CHECK(std::abs(d2.features(r, 0) - d.features(r, 0)) < 1e-9);
}

TEST_CASE("preprocess: missing numeric takes the train mean; missing categorical gets its own level") {
    DatasetSchema s = age_sex_schema();
    s.column_roles["c"] = ColumnRole::CategoricalFeature;
    RawTable raw;
    raw.header = {"age", "c", "sex", "y"};
    raw.rows = {{"1", "a", "M", "1"}, {"", "", "F", "0"}, {"3", "b", "M", "0"}};
    const auto d = preprocess(raw, s, {0, 1, 2});
    const auto age = std::find(d.feature_names.begin(), d.feature_names.end(), "age") - d.feature_names.begin();
    CHECK(d.features(1, static_cast<std::size_t>(age)) == doctest::Approx(0.0));
    CHECK(std::count_if(d.feature_names.begin(), d.feature_names.end(),
                        [](const std::string& n) { return n.rfind("c=", 0) == 0; }) == 3);
}

TEST_CASE("preprocess: privileged value never observed") {
    RawTable raw;
    raw.header = {"age", "sex", "y"};
    raw.rows = {{"1", "F", "1"}, {"2", "F", "0"}};
    CHECK(testutil::error_code_of([&] { preprocess(raw, age_sex_schema(), {0, 1}); }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("split: 6:2:2 sizes with floor/remainder rule") {
    auto s10 = split(10, 1);
    CHECK(s10.train.size() == 6);
    CHECK(s10.validation.size() == 2);
    CHECK(s10.test.size() == 2);
    auto s11 = split(11, 1);
    CHECK(s11.train.size() == 6);
    CHECK(s11.validation.size() == 2);
    CHECK(s11.test.size() == 3);
    CHECK(testutil::error_code_of([] { split(9, 1); }) == ErrorCode::TooFewSamples);
}

TEST_CASE("split: deterministic per seed and an exact partition for many seeds") {
    const auto a = split(37, 99);
    const auto b = split(37, 99);
    CHECK(a.train == b.train);
    CHECK(a.validation == b.validation);
    CHECK(a.test == b.test);
    CHECK(split(37, 100).train != a.train);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (std::size_t n : {10u, 11u, 57u, 1000u}) {
            const auto s = split(n, seed);
            check_partition(n, {s.train, s.validation, s.test});
        }
    }
}

TEST_CASE("kfold: sizes and partition") {
    const auto f10 = kfold(10, 5, 3);
    REQUIRE(f10.size() == 5);
    for (const auto& f : f10) CHECK(f.holdout.size() == 2);
    const auto f7 = kfold(7, 5, 3);
    std::multiset<std::size_t> sizes;
    for (const auto& f : f7) sizes.insert(f.holdout.size());
    CHECK(sizes == std::multiset<std::size_t>{1, 1, 1, 2, 2});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto folds = kfold(53, 5, seed);
        std::vector<std::vector<std::size_t>> holdouts;
        for (const auto& f : folds) {
            holdouts.push_back(f.holdout);
            check_partition(53, {f.train, f.holdout});
        }
        check_partition(53, holdouts);
    }
    CHECK(testutil::error_code_of([] { kfold(4, 5, 1); }) == ErrorCode::InvalidValue);
}

TEST_CASE("fold_split: holdout fold is the test set; remainder splits 3:1") {
    const auto folds = kfold(100, 5, 8);
    for (std::size_t k = 0; k < 5; ++k) {
        const auto s = fold_split(100, 5, k, 8);
        auto test = s.test;
        auto hold = folds[k].holdout;
        std::sort(test.begin(), test.end());
        std::sort(hold.begin(), hold.end());
        CHECK(test == hold);
        CHECK(s.train.size() == 60);
        CHECK(s.validation.size() == 20);
        check_partition(100, {s.train, s.validation, s.test});
    }
}

TEST_CASE("both groups appear after encoding when both were present") {
    TempDir dir("ingest");
    const auto p = dir.write("d.csv", "age,sex,y\n20,M,1\n30,F,0\n40,M,0\n50,F,1\n");
    const auto raw = load_dataset(p, age_sex_schema());
    const auto d = preprocess(raw, age_sex_schema(), {0, 1, 2, 3});
    const std::set<Group> g(d.groups.begin(), d.groups.end());
    CHECK(g.size() == 2);
}

}  // TEST_SUITE
