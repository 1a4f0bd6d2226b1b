#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "1.0.0";

struct Diagnostic {
    std::string where;  // JSON pointer of the offending field, or "line L, column C" for syntax errors
    std::string message;
};

struct KindInfo {
    std::string name;
    std::string summary;
};
const std::vector<KindInfo>& experiment_kinds();

/// Parses JSON text; syntax errors are reported with line and column.
std::optional<json> parse_config(const std::string& text, std::vector<Diagnostic>& diagnostics);
/// Full schema check of a parsed config; empty result means valid.
std::vector<Diagnostic> validate_config(const json& config);

std::string sha256_hex(const std::string& bytes);
/// SHA-256 of the canonical (sorted-key, compact) serialization.
std::string config_hash(const json& config);

/// One CSV file with a fixed column set; every row is prefixed with the config hash on output.
struct Table {
    std::string file;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct TaskRow {
    std::size_t table = 0;
    std::vector<std::string> cells;
};
struct Task {
    std::string label;
    std::function<std::vector<TaskRow>()> run;
};

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};
struct Plot {
    std::string file;
    std::string title, x_label, y_label;
    bool log_x = false, log_y = false;
    std::vector<PlotSeries> series;
    std::vector<double> vertical_lines;
};

/// A batch of independent tasks. Rows land in grid (task) order regardless of completion order.
/// `then` receives the tables so far and may append a follow-up batch; `plots` runs last.
struct Plan {
    std::vector<Table> tables;
    std::vector<Task> tasks;
    std::function<std::optional<Plan>(std::vector<Table>&)> then;
    std::function<std::vector<Plot>(const std::vector<Table>&)> plots;
};

/// Builds the plan for a validated config. Throws fillrad::Error or std::invalid_argument.
Plan plan_experiment(const json& config);

struct RunOptions {
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    bool plots = false;
};
struct RunResult {
    int exit_code = 0;
    json manifest;
    std::vector<std::string> errors;
};
/// Writes CSVs, optional SVG plots and manifest.json into out_dir.
RunResult run_experiment(json config, const RunOptions& options);

/// Shortest round-trip decimal for doubles; "nan"/"inf" spelled out.
std::string fmt(double v);

std::string svg_plot(const Plot& plot);

}  // namespace lab
