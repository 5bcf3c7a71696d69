#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "famoel/csv.hpp"
#include "famoel/experiment.hpp"
#include "famoel/svg.hpp"

namespace famoel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
}

std::size_t column_of(const LoadedRun& run, const std::string& name) {
    auto it = std::find(run.generation_columns.begin(), run.generation_columns.end(), name);
    if (it == run.generation_columns.end()) {
        throw Error(ErrorCode::MissingArtifacts, run.directory.string() + "/generations.csv lacks column " + name);
    }
    return static_cast<std::size_t>(it - run.generation_columns.begin());
}

// Mean of `column` per generation over runs; generations missing from some runs average the rest.
svg::Series mean_curve(const std::vector<LoadedRun>& runs, const std::string& column, const std::string& name) {
    std::map<double, std::pair<double, std::size_t>> acc;
    for (const auto& r : runs) {
        const std::size_t g = column_of(r, "generation");
        const std::size_t c = column_of(r, column);
        for (std::size_t i = 0; i < r.generations.rows(); ++i) {
            auto& [sum, count] = acc[r.generations(i, g)];
            sum += r.generations(i, c);
            ++count;
        }
    }
    svg::Series s{name, {}, {}};
    for (const auto& [gen, sc] : acc) {
        s.x.push_back(gen);
        s.y.push_back(sc.first / static_cast<double>(sc.second));
    }
    return s;
}

std::string group_label(const fs::path& group, const std::vector<LoadedRun>& runs) {
    std::string label = group.filename().string();
    if (label.empty() || label == ".") label = fs::absolute(group).filename().string();
    if (!runs.empty() && runs.front().info.contains("config")) {
        const auto& cfg = runs.front().info["config"];
        if (cfg.contains("mode")) label += " (" + cfg["mode"].get<std::string>() + ")";
    }
    return label;
}

}  // namespace

LoadedRun load_run(const fs::path& dir) {
    const fs::path gens = dir / "generations.csv";
    const fs::path masks = dir / "mask.csv";
    if (!fs::exists(gens) || !fs::exists(masks)) {
        throw Error(ErrorCode::MissingArtifacts, "missing generations.csv or mask.csv in " + dir.string());
    }
    LoadedRun run;
    run.directory = dir;
    const auto g = csv::read_file(gens);
    run.generation_columns = g.header;
    for (const auto& row : g.rows) {
        std::vector<double> values;
        for (const auto& cell : row) values.push_back(csv::parse_double(cell));
        run.generations.append_row(values);
    }
    const auto m = csv::read_file(masks);
    if (m.header.size() != kObjectiveCount + 1) {
        throw Error(ErrorCode::MalformedCsv, masks.string() + " must have 27 columns");
    }
    for (const auto& row : m.rows) {
        std::vector<double> values;
        for (std::size_t c = 1; c < row.size(); ++c) values.push_back(csv::parse_double(row[c]));
        run.masks.append_row(values);
    }
    if (run.masks.rows() == 0) run.masks = Matrix(0, kObjectiveCount);
    const fs::path info = dir / "run.json";
    if (fs::exists(info)) {
        std::ifstream in(info);
        run.info = json::parse(in);
    }
    return run;
}

std::vector<fs::path> find_runs(const fs::path& root) {
    std::vector<fs::path> out;
    if (!fs::exists(root)) return out;
    if (fs::exists(root / "generations.csv")) out.push_back(root);
    if (fs::is_directory(root)) {
        for (const auto& entry : fs::recursive_directory_iterator(root)) {
            if (entry.is_directory() && fs::exists(entry.path() / "generations.csv")) out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<fs::path> emit_plots(const std::vector<fs::path>& inputs, const fs::path& out_dir,
                                 const PlotOptions& options) {
    std::vector<fs::path> dirs;
    for (const auto& in : inputs) {
        const auto found = find_runs(in);
        if (found.empty()) throw Error(ErrorCode::MissingArtifacts, "no run artifacts under " + in.string());
        dirs.insert(dirs.end(), found.begin(), found.end());
    }
    if (dirs.empty()) throw Error(ErrorCode::MissingArtifacts, "no inputs given");
    std::sort(dirs.begin(), dirs.end());
    dirs.erase(std::unique(dirs.begin(), dirs.end()), dirs.end());

    std::map<fs::path, std::vector<LoadedRun>> groups;
    for (const auto& d : dirs) groups[d.parent_path()].push_back(load_run(d));

    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    const auto& names = objective_names();
    const std::vector<std::string> labels(names.begin(), names.end());

    std::vector<svg::Series> hv_series;
    for (const auto& [group, runs] : groups) hv_series.push_back(mean_curve(runs, "test_hv", group_label(group, runs)));
    written.push_back(out_dir / "hv_curve.svg");
    write_text(written.back(), svg::line_plot("HV on test data (mean over runs)", "generation", "HV", hv_series));

    std::size_t group_index = 0;
    for (const auto& [group, runs] : groups) {
        const std::string suffix = groups.size() == 1 ? std::string() : "_" + std::to_string(group_index);
        ++group_index;
        std::size_t rows = 0;
        for (const auto& r : runs) rows = std::max(rows, r.masks.rows());
        Matrix share(rows, kObjectiveCount);
        std::vector<double> counts(rows, 0.0);
        std::vector<double> selected(kObjectiveCount, 0.0);
        double total_generations = 0.0;
        for (const auto& r : runs) {
            for (std::size_t i = 0; i < r.masks.rows(); ++i) {
                counts[i] += 1.0;
                for (std::size_t k = 0; k < kObjectiveCount; ++k) {
                    share(i, k) += r.masks(i, k);
                    selected[k] += r.masks(i, k);
                }
            }
            total_generations += static_cast<double>(r.masks.rows());
        }
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t k = 0; k < kObjectiveCount; ++k) share(i, k) /= counts[i];
        }
        const std::string label = group_label(group, runs);

        written.push_back(out_dir / ("mask_heatmap" + suffix + ".svg"));
        write_text(written.back(), svg::heatmap("Selected objectives per generation: " + label,
                                                "generation (top = 1)", share, labels));

        written.push_back(out_dir / ("selection_frequency" + suffix + ".svg"));
        write_text(written.back(),
                   svg::bar_chart("Selection frequency: " + label, "generations selected", labels, selected));

        written.push_back(out_dir / ("selection_frequency" + suffix + ".csv"));
        std::ofstream out(written.back(), std::ios::binary);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + written.back().string());
        csv::write_row(out, std::vector<std::string>{"objective", "selected", "not_selected"});
        for (std::size_t k = 0; k < kObjectiveCount; ++k) {
            csv::write_row(out, std::vector<std::string>{labels[k], csv::format_double(selected[k]),
                                                         csv::format_double(total_generations - selected[k])});
        }
    }

    // Final test HV against tau, one point per distinct tau found in run.json.
    std::map<double, std::pair<double, std::size_t>> by_tau;
    for (const auto& [group, runs] : groups) {
        for (const auto& r : runs) {
            if (!r.info.contains("config") || !r.info["config"].contains("tau") || r.generations.rows() == 0) continue;
            auto& [sum, count] = by_tau[r.info["config"]["tau"].get<double>()];
            sum += r.generations(r.generations.rows() - 1, column_of(r, "test_hv"));
            ++count;
        }
    }
    if (options.tau_sweep || by_tau.size() > 1) {
        svg::Series s{"final test HV", {}, {}};
        for (const auto& [tau, sc] : by_tau) {
            s.x.push_back(tau);
            s.y.push_back(sc.first / static_cast<double>(sc.second));
        }
        written.push_back(out_dir / "tau_sweep.svg");
        write_text(written.back(), svg::line_plot("Final HV against selection threshold", "tau", "HV", {s}));
    }
    return written;
}

}  // namespace famoel
