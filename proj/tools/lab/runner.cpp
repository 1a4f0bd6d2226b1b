#include "lab.hpp"

#include "fillrad/error.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace lab {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
    std::vector<TaskRow> rows;
    std::string error;
    double seconds = 0.0;
};

std::string describe_exception(const std::exception_ptr& e)
{
    try {
        std::rethrow_exception(e);
    } catch (const fillrad::Error& err) {
        return std::string(fillrad::to_string(err.code())) + ": " + err.what();
    } catch (const std::exception& err) {
        return err.what();
    } catch (...) {
        return "unknown exception";
    }
}

std::vector<Outcome> run_batch(const std::vector<Task>& tasks, unsigned jobs)
{
    std::vector<Outcome> out(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const auto start = Clock::now();
            try {
                out[i].rows = tasks[i].run();
            } catch (...) {
                out[i].error = describe_exception(std::current_exception());
            }
            out[i].seconds = std::chrono::duration<double>(Clock::now() - start).count();
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

std::string csv_cell(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (const char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string render_csv(const Table& table, const std::string& hash)
{
    std::ostringstream out;
    out << "config_hash";
    for (const auto& c : table.columns) out << ',' << csv_cell(c);
    out << '\n';
    for (const auto& row : table.rows) {
        out << hash;
        for (const auto& c : row) out << ',' << csv_cell(c);
        out << '\n';
    }
    return out.str();
}

void write_file(const fs::path& path, const std::string& bytes)
{
    std::ofstream f(path, std::ios::binary);
    f << bytes;
    if (!f) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

RunResult run_experiment(json config, const RunOptions& options)
{
    RunResult result;
    if (options.seed) config["seed"] = *options.seed;
    for (const auto& d : validate_config(config)) result.errors.push_back(d.where + ": " + d.message);
    if (!result.errors.empty()) {
        result.exit_code = 2;
        return result;
    }
    const std::string hash = config_hash(config);
    const auto wall_start = Clock::now();

    json& m = result.manifest;
    m["config_hash"] = hash;
    m["version"] = kArtifactVersion;
    m["kind"] = config.at("kind");
    m["seed"] = config.value("seed", std::uint64_t{0});
    m["config"] = config;
    m["jobs"] = options.jobs;
    m["tasks"] = json::array();

    std::vector<Table> tables;
    std::function<std::vector<Plot>(const std::vector<Table>&)> plots;
    try {
        std::optional<Plan> plan = plan_experiment(config);
        while (plan) {
            for (auto& t : plan->tables) tables.push_back(std::move(t));
            if (plan->plots) plots = plan->plots;
            const auto outcomes = run_batch(plan->tasks, options.jobs);
            bool failed = false;
            for (std::size_t i = 0; i < outcomes.size(); ++i) {
                const Outcome& o = outcomes[i];
                json entry{{"label", plan->tasks[i].label}, {"seconds", o.seconds}};
                if (o.error.empty()) {
                    entry["status"] = "ok";
                    for (const auto& row : o.rows) tables.at(row.table).rows.push_back(row.cells);
                } else {
                    entry["status"] = "failed";
                    entry["error"] = o.error;
                    result.errors.push_back(plan->tasks[i].label + ": " + o.error);
                    failed = true;
                }
                m["tasks"].push_back(entry);
            }
            if (failed || !plan->then) break;
            plan = plan->then(tables);
        }
    } catch (...) {
        result.errors.push_back(describe_exception(std::current_exception()));
    }

    const fs::path dir(options.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        result.errors.push_back("cannot create " + dir.string() + ": " + ec.message());
        result.exit_code = 2;
        return result;
    }
    json outputs = json::object();
    try {
        for (const auto& t : tables) {
            const std::string bytes = render_csv(t, hash);
            write_file(dir / t.file, bytes);
            outputs[t.file] = sha256_hex(bytes);
        }
        if (options.plots && plots && result.errors.empty())
            for (const auto& p : plots(tables)) {
                const std::string bytes = svg_plot(p);
                write_file(dir / p.file, bytes);
                outputs[p.file] = sha256_hex(bytes);
            }
    } catch (...) {
        result.errors.push_back(describe_exception(std::current_exception()));
    }
    m["outputs"] = outputs;
    m["status"] = result.errors.empty() ? "ok" : "failed";
    m["errors"] = result.errors;
    m["wall_clock_seconds"] = std::chrono::duration<double>(Clock::now() - wall_start).count();
    try {
        write_file(dir / "manifest.json", m.dump(2) + "\n");
    } catch (...) {
        result.errors.push_back(describe_exception(std::current_exception()));
    }
    result.exit_code = result.errors.empty() ? 0 : 1;
    return result;
}

}  // namespace lab
