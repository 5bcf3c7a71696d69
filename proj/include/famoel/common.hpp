#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace famoel {

enum class ErrorCode {
    MalformedCsv,
    SchemaMismatch,
    ConstantColumn,
    ShapeMismatch,
    EmptyDataset,
    MissingGroup,
    TooFewSamples,
    InsufficientHistory,
    DimensionMismatch,
    TooFewPoints,
    DimensionTooHigh,
    EmptyPopulation,
    InvalidValue,
    TooFewBlocks,
    MissingArtifacts,
    Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    // Config-side failures (exit code 2) versus data-side failures (exit code 3).
    [[nodiscard]] bool is_config_error() const noexcept { return code_ == ErrorCode::InvalidValue; }

private:
    ErrorCode code_;
};

using Rng = std::mt19937_64;

// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream seed for (parent, a, b). Injective in (a, b) for a, b < 2^32
// because mix64 is a bijection.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint32_t a, std::uint32_t b) noexcept {
    return mix64(mix64(parent) + ((static_cast<std::uint64_t>(a) << 32) | b));
}

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }
    [[nodiscard]] std::vector<double> column(std::size_t c) const;

    void append_row(std::span<const double> values);

    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace famoel
