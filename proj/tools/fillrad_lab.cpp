#include "lab/lab.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::optional<std::string> read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream s;
    s << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return s.str();
}

/// Parses and validates; prints diagnostics. Returns the config only when it is valid.
std::optional<lab::json> load(const std::string& path)
{
    const auto text = read_text(path);
    if (!text) {
        std::cerr << path << ": cannot read file\n";
        return std::nullopt;
    }
    std::vector<lab::Diagnostic> diags;
    auto config = lab::parse_config(*text, diags);
    if (config) diags = lab::validate_config(*config);
    for (const auto& d : diags) std::cerr << path << ": " << d.where << ": " << d.message << '\n';
    if (!diags.empty()) return std::nullopt;
    return config;
}

unsigned default_jobs()
{
    if (const char* env = std::getenv("FILLRAD_LAB_JOBS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fillrad-lab: batch experiments for filling radius, nerves and index pairings"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::optional<std::uint64_t> seed;
    unsigned jobs = default_jobs();
    bool plots = false;

    auto* run = app.add_subcommand("run", "Run an experiment and write CSVs and manifest.json");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--jobs", jobs, "Worker threads (default: FILLRAD_LAB_JOBS or 1)")->check(CLI::PositiveNumber);
    run->add_flag("--plots", plots, "Also write SVG plots of the sweep curves");

    auto* validate = app.add_subcommand("validate", "Check a config against the schema without running it");
    validate->add_option("--config", config_path, "Experiment config (JSON)")->required();

    auto* list = app.add_subcommand("list-experiments", "List experiment kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (const auto& k : lab::experiment_kinds()) std::cout << k.name << "\t" << k.summary << '\n';
        return 0;
    }
    if (validate->parsed()) {
        if (!load(config_path)) return 2;
        std::cout << "ok\n";
        return 0;
    }
    if (run->parsed()) {
        const auto config = load(config_path);
        if (!config) return 2;
        lab::RunOptions options;
        options.out_dir = out_dir;
        options.seed = seed;
        options.jobs = jobs;
        options.plots = plots;
        const lab::RunResult r = lab::run_experiment(*config, options);
        for (const auto& e : r.errors) std::cerr << "error: " << e << '\n';
        if (r.exit_code == 0) std::cout << "wrote " << out_dir << "/manifest.json\n";
        return r.exit_code;
    }
    return 2;
}
