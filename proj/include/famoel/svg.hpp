#pragma once

#include <string>
#include <vector>

#include "famoel/common.hpp"

namespace famoel::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Linear axes, one polyline per series, legend in the top-right corner.
std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

// cells(r, c) in [0, 1]; rows drawn top to bottom.
std::string heatmap(const std::string& title, const std::string& row_axis, const Matrix& cells,
                    const std::vector<std::string>& column_labels);

std::string bar_chart(const std::string& title, const std::string& y_label, const std::vector<std::string>& labels,
                      const std::vector<double>& values);

}  // namespace famoel::svg
