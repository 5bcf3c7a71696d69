#include "famoel/common.hpp"

#include <algorithm>

namespace famoel {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::MissingGroup: return "MissingGroup";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DimensionTooHigh: return "DimensionTooHigh";
    case ErrorCode::EmptyPopulation: return "EmptyPopulation";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::TooFewBlocks: return "TooFewBlocks";
    case ErrorCode::MissingArtifacts: return "MissingArtifacts";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out[r] = (*this)(r, c);
    }
    return out;
}

void Matrix::append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) {
        cols_ = values.size();
    }
    if (values.size() != cols_) {
        throw Error(ErrorCode::DimensionMismatch, "row width " + std::to_string(values.size()) +
                                                      " != matrix width " + std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

}  // namespace famoel
