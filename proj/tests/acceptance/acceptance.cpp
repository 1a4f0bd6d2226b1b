// Acceptance runner: `acceptance N` checks criterion N (1..11), `acceptance` checks all of them.
// Criteria backed by an experiment kind run the lab runner on configs/ and read only its CSVs.

#include "fillrad/chains.hpp"
#include "fillrad/error.hpp"
#include "fillrad/index.hpp"
#include "lab/lab.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace fillrad;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
using Mat = Eigen::MatrixXcd;
using CsvRow = std::map<std::string, std::string>;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') cells.back() += line[++i];
            else if (c == '"') quoted = false;
            else cells.back() += c;
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back();
        } else {
            cells.back() += c;
        }
    }
    return cells;
}

std::vector<CsvRow> read_csv(const fs::path& p)
{
    std::istringstream in(read_file(p));
    std::string line;
    std::getline(in, line);
    const auto header = split_csv_line(line);
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        const auto cells = split_csv_line(line);
        CsvRow row;
        for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
        rows.push_back(row);
    }
    return rows;
}

double num(const CsvRow& r, const std::string& key) { return std::stod(r.at(key)); }

fs::path run_config(const std::string& name, const std::string& out, unsigned jobs = 1)
{
    const std::string text = read_file(fs::path(FILLRAD_CONFIG_DIR) / (name + ".json"));
    std::vector<lab::Diagnostic> diags;
    const auto config = lab::parse_config(text, diags);
    if (!config) throw std::runtime_error(name + ": config does not parse");
    lab::RunOptions options;
    options.out_dir = (fs::path("acceptance_out") / out).string();
    options.jobs = jobs;
    const lab::RunResult r = lab::run_experiment(*config, options);
    if (r.exit_code != 0) {
        std::string msg = name + ": run failed";
        for (const auto& e : r.errors) msg += "; " + e;
        throw std::runtime_error(msg);
    }
    return options.out_dir;
}

std::string g(double v)
{
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

// 1. Sphere filling-radius targets.
Verdict criterion1()
{
    Verdict v;
    for (const auto& [config, n, target, tol] : {std::tuple{"circle_fillrad", "64", kPi / 3.0, 0.07},
                                                 std::tuple{"sphere_fillrad", "300", 0.5 * std::acos(-1.0 / 3.0), 0.12}}) {
        const auto start = std::chrono::steady_clock::now();
        const auto rows = read_csv(run_config(config, std::string("c1_") + config) / "fillrad.csv");
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool found = false;
        for (const auto& r : rows)
            if (r.at("n") == n) {
                found = true;
                const double rel = std::abs(num(r, "estimate") - target) / target;
                v.note(r.at("model") + " n=" + n + " estimate " + g(num(r, "estimate")) + " rel.err " + g(rel) + " (tol " + g(tol) +
                       ", " + g(seconds) + "s)");
                v.require(rel <= tol, std::string(config) + " relative error");
            }
        v.require(found, std::string(config) + " has an n=" + n + " row");
        v.require(seconds <= 120.0, std::string(config) + " within 2 min");
    }
    return v;
}

std::vector<CsvRow> nerve_rows()
{
    auto rows = read_csv(run_config("nerve_audit_balls", "nerve_balls") / "nerve_audit.csv");
    const auto strips = read_csv(run_config("nerve_audit_strips", "nerve_strips") / "nerve_audit.csv");
    rows.insert(rows.end(), strips.begin(), strips.end());
    return rows;
}

// 2. Nerve Lipschitz bounds on >= 20 randomized covers.
Verdict criterion2()
{
    Verdict v;
    const auto rows = nerve_rows();
    std::size_t violations = 0;
    double worst = 0.0;
    for (const auto& r : rows) {
        if (num(r, "lip_l1") > num(r, "bound_l1") || num(r, "lip_spherical") > num(r, "bound_spherical")) ++violations;
        worst = std::max({worst, num(r, "lip_l1") / num(r, "bound_l1"), num(r, "lip_spherical") / num(r, "bound_spherical")});
    }
    v.note(std::to_string(rows.size()) + " covers, " + std::to_string(violations) + " violations, worst lip/bound " + g(worst));
    v.require(rows.size() >= 20, "at least 20 covers");
    v.require(violations == 0, "zero violations");
    return v;
}

// 3. Round trip g_r(f_r(p)) within D(r) at every sample point.
Verdict criterion3()
{
    Verdict v;
    const auto rows = nerve_rows();
    std::size_t violations = 0;
    double worst = 0.0;
    for (const auto& r : rows) {
        if (num(r, "max_round_trip") > num(r, "d_r")) ++violations;
        worst = std::max(worst, num(r, "max_round_trip") / num(r, "d_r"));
    }
    v.note(std::to_string(rows.size()) + " covers, worst displacement/D(r) " + g(worst));
    v.require(!rows.empty() && violations == 0, "round trip within D(r)");
    return v;
}

// 4. circle(1) against circle(1) x [-8, 8].
Verdict criterion4()
{
    Verdict v;
    const auto rows = read_csv(run_config("product_circle", "product") / "product_check.csv");
    v.require(rows.size() == 1, "one product row");
    for (const auto& r : rows) {
        v.note("base " + g(num(r, "base_estimate")) + ", product " + g(num(r, "product_estimate")) + ", relative gap " +
               g(num(r, "relative_gap")) + " (tol 0.15)");
        v.require(num(r, "half_length") == 8.0, "T = 8");
        v.require(num(r, "relative_gap") <= 0.15, "relative gap");
    }
    return v;
}

Mat random_idempotent(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank)
{
    std::normal_distribution<double> gauss(0.0, 0.3 / std::sqrt(static_cast<double>(n)));
    Mat s = Mat::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) s(i, j) += std::complex<double>(gauss(rng), gauss(rng));
    Eigen::VectorXcd diag = Eigen::VectorXcd::Zero(n);
    diag.head(rank).setOnes();
    return s * diag.asDiagonal() * s.inverse();
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// 5. Exact-algebra suite.
Verdict criterion5()
{
    Verdict v;
    std::mt19937_64 rng(5);
    std::size_t checks = 0, failures = 0;
    auto check = [&](double err) {
        ++checks;
        if (!(err <= 1e-10)) ++failures;
    };
    double worst_pattern = 0, worst_z = 0, worst_theta = 0;
    for (int trial = 0; trial < 24; ++trial) {
        const Eigen::Index n = 2 + trial % 7;
        const Mat beta = random_idempotent(rng, n, 1 + trial % n);
        const Mat e = e13(n);
        const double pattern = std::max(max_abs(difference_d(beta, beta) - e), max_abs(difference_product(beta, beta) - e));
        const Mat id = Mat::Identity(4 * n, 4 * n);
        const double z = std::max(max_abs(z_matrix(beta) * z_inverse(beta) - id), max_abs(z_inverse(beta) * z_matrix(beta) - id));
        const double th = std::max(max_abs(theta(beta, ThetaMethod::Spectral).theta - beta),
                                   max_abs(theta(beta, ThetaMethod::Contour).theta - beta));
        check(pattern);
        check(z);
        check(th);
        worst_pattern = std::max(worst_pattern, pattern);
        worst_z = std::max(worst_z, z);
        worst_theta = std::max(worst_theta, th);
    }

    // Boundary of a boundary on random Rips complexes, by exact sparse products over both fields.
    std::size_t nonzero = 0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t pts = 10 + static_cast<std::size_t>(trial);
        Eigen::MatrixXd dist(pts, pts);
        std::vector<std::pair<double, double>> xy(pts);
        for (auto& p : xy) p = {unit(rng), unit(rng)};
        for (std::size_t i = 0; i < pts; ++i)
            for (std::size_t j = 0; j < pts; ++j)
                dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::hypot(xy[i].first - xy[j].first, xy[i].second - xy[j].second);
        const SimplicialComplex k = vr_complex(validate_metric(dist), 0.5 + 0.05 * trial, 3);
        for (const Field f : {Field::Rational, Field::Z2})
            for (int d = 2; d <= k.dimension(); ++d) {
                const SparseMatrix hi = boundary_matrix(k, d, f), lo = boundary_matrix(k, d - 1, f);
                for (const auto& col : hi.columns) {
                    std::map<std::size_t, mpq_class> acc;
                    for (const auto& [row, c] : col)
                        for (const auto& [row2, c2] : lo.columns[row]) acc[row2] += c * c2;
                    bool zero = true;
                    for (const auto& [row, c] : acc) {
                        mpq_class x = c;
                        if (f == Field::Z2) x = mpz_class(x.get_num() % 2);
                        if (x != 0) zero = false;
                    }
                    ++checks;
                    if (!zero) {
                        ++nonzero;
                        ++failures;
                    }
                }
                for (const auto& s : k.simplices(d)) {
                    ChainVector c;
                    c.dimension = d;
                    c.field = f;
                    c.add(s, 1);
                    ++checks;
                    if (!boundary(boundary(c)).empty()) {
                        ++nonzero;
                        ++failures;
                    }
                }
            }
    }
    v.note(std::to_string(checks) + " checks, " + std::to_string(failures) + " failures; max |d(b,b)-e| " + g(worst_pattern) +
           ", max |ZZ^-1-I| " + g(worst_z) + ", max |Theta(p)-p| " + g(worst_theta) + ", nonzero boundary^2 " +
           std::to_string(nonzero));
    v.require(failures == 0, "all exact-algebra checks within 1e-10");
    return v;
}

// 6. Defect laws at N = 16.
Verdict criterion6()
{
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    const fs::path out = run_config("defect_sweep", "defects");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto defects = read_csv(out / "defects.csv");
    const auto fits = read_csv(out / "fits.csv");
    std::size_t large = 0, small = 0;
    for (const auto& r : defects) {
        v.require(r.at("n") == "16", "N = 16");
        (r.at("family") == "large_t" ? large : small)++;
    }
    v.require(large >= 5 && small >= 5, "at least 5 points per law");
    v.require(fits.size() == 2, "two fits");
    for (const auto& f : fits) {
        v.note(f.at("law") + " slope " + g(num(f, "slope")) + " R^2 " + std::to_string(num(f, "r_squared")));
        v.require(num(f, "r_squared") > 0.99, f.at("law") + " R^2 > 0.99");
    }
    v.note(g(seconds) + "s");
    v.require(seconds <= 300.0, "within 5 min");
    return v;
}

// 7. Pairing index against the kernel-count oracle for flux -2..2, stable across t.
Verdict criterion7()
{
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    for (int q = -2; q <= 2; ++q) {
        const LatticeModel model = lattice_dirac_torus(8, q, 1.0);
        const int oracle = overlap_kernel_count(8, q).index();
        std::vector<int> indices;
        std::string raw;
        for (const double t : {0.02, 0.05, 0.1}) {
            PairingOptions o;
            o.t = t;
            const PairingReport r = pairing(model.op, model.fields.p, model.fields.q, o, model.fields.region);
            indices.push_back(r.index);
            raw += (raw.empty() ? "" : "/") + g(r.raw_index);
        }
        const bool stable = indices[0] == indices[1] && indices[1] == indices[2];
        v.note("q=" + std::to_string(q) + ": oracle " + std::to_string(oracle) + ", pairing " + std::to_string(indices[0]) +
               (stable ? " at t=0.02,0.05,0.1" : " (unstable)") + " raw " + raw);
        v.require(oracle == q, "oracle = q for q=" + std::to_string(q));
        v.require(stable, "index stable across t for q=" + std::to_string(q));
        v.require(indices[0] == q, "pairing = q for q=" + std::to_string(q));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.note(g(seconds) + "s");
    v.require(seconds <= 300.0, "within 5 min");
    return v;
}

// 8. Vanishing below the fitted threshold.
Verdict criterion8()
{
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    const auto rows = read_csv(run_config("threshold", "threshold") / "threshold.csv");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::size_t sweep = 0, below = 0, bad = 0;
    double worst = 0.0;
    for (const auto& r : rows) {
        if (r.at("fraction") == "generator") continue;
        ++sweep;
        v.require(r.at("constants") == "fitted", "fitted constants");
        if (r.at("below_threshold") != "true") continue;
        ++below;
        const bool ok = !r.at("index").empty() && r.at("index") == "0" && num(r, "theta_to_e") < 1.0;
        if (!ok) ++bad;
        else worst = std::max(worst, num(r, "theta_to_e"));
    }
    if (!rows.empty())
        v.note("c1 " + g(num(rows.front(), "c1")) + ", c2 " + g(num(rows.front(), "c2")) + ", sigma " +
               g(num(rows.front(), "sigma")) + ", threshold " + g(num(rows.front(), "threshold")));
    v.note(std::to_string(below) + "/" + std::to_string(sweep) + " rows below threshold, " + std::to_string(bad) +
           " with nonzero index or |Theta-e| >= 1, max |Theta-e| " + g(worst) + ", " + g(seconds) + "s");
    v.require(sweep >= 10 && below >= 10, "10-point sweep below the threshold");
    v.require(bad == 0, "index 0 and |Theta-e| < 1");
    v.require(seconds <= 300.0, "within 5 min");
    return v;
}

// 9. Invariant chain on S^1, S^2 and the flat torus.
Verdict criterion9()
{
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    const auto rows = read_csv(run_config("invariants", "invariants") / "invariants.csv");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::map<std::string, std::size_t> per_space;
    std::size_t violations = 0;
    bool equality = false;
    double min_margin = INFINITY;
    for (const auto& r : rows) {
        per_space[r.at("space").substr(0, r.at("space").find('('))]++;
        if (r.at("pass") != "true") ++violations;
        min_margin = std::min(min_margin, num(r, "margin"));
        if (r.at("invariant").rfind("|inj/3", 0) == 0) {
            equality = r.at("pass") == "true";
            v.note("circle |inj/3 - fillrad|/fillrad " + g(num(r, "value")));
        }
    }
    v.note(std::to_string(rows.size()) + " rows, " + std::to_string(violations) + " violations, min margin " + g(min_margin) +
           ", " + g(seconds) + "s");
    v.require(per_space.count("circle") && per_space.count("sphere2") && per_space.count("flat-torus"), "all three spaces");
    v.require(violations == 0, "zero violations");
    v.require(equality, "circle equality case");
    v.require(seconds <= 120.0, "within 2 min");
    return v;
}

// 10. Bound calculator against hand-computed values.
Verdict criterion10()
{
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    const auto rows = read_csv(run_config("bound_cases", "bound") / "bound.csv");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // Hand-computed: 16 c1 c2 (m+1)^3 L_m / sigma (even) or 16 c1 c2 (m+2)^3 L_{m+1} / sigma (odd), then D.
    const std::map<std::string, std::string> expected{{"identity", "16"},
                                                      {"doubling", "7776"},
                                                      {"odd-branch", "21504"},
                                                      {"rational-affine", "337/3"},
                                                      {"odd-out-of-range", "51840"}};
    const std::map<std::string, std::string> in_range{{"rational-affine", "true"}, {"odd-out-of-range", "false"}};
    std::set<std::string> parities;
    for (const auto& r : rows) {
        const std::string name = r.at("name");
        parities.insert(r.at("parity"));
        v.require(expected.count(name) && r.at("value") == expected.at(name), name + " value " + r.at("value"));
        v.require(r.at("closed_form_matches") == "true", name + " L_m recursion matches the closed form");
        if (in_range.count(name)) {
            v.require(r.at("exponential_bound_holds") == "true", name + " L_j <= C1 e^{C2 j}");
            v.require(r.at("constants_in_range") == in_range.at(name), name + " C1 <= 1e20 and C2 <= 50");
        }
    }
    v.note(std::to_string(rows.size()) + " cases exact, parities " + std::to_string(parities.size()) + ", " + g(seconds) + "s");
    v.require(rows.size() == 5, "5 cases");
    v.require(parities.size() == 2, "both parity branches");
    v.require(seconds <= 1.0, "within 1 s");
    return v;
}

// 11. Same config and seed twice (1 and 2 workers) gives byte-identical CSVs and recomputable digests.
Verdict criterion11()
{
    Verdict v;
    std::size_t files = 0;
    for (const std::string config : {"circle_fillrad", "nerve_audit_balls", "product_circle", "bound_cases", "threshold"}) {
        const fs::path a = run_config(config, "det_a_" + config, 1), b = run_config(config, "det_b_" + config, 2);
        const lab::json manifest = lab::json::parse(read_file(a / "manifest.json"));
        for (const auto& entry : fs::directory_iterator(a)) {
            if (entry.path().extension() != ".csv") continue;
            ++files;
            const std::string bytes = read_file(entry.path());
            v.require(bytes == read_file(b / entry.path().filename()), config + "/" + entry.path().filename().string() + " identical");
            v.require(manifest.at("outputs").value(entry.path().filename().string(), "") == lab::sha256_hex(bytes),
                      config + " manifest digest recomputable");
        }
    }
    v.note(std::to_string(files) + " CSV files compared across two runs");
    v.require(files >= 5, "CSV outputs present");
    return v;
}

const std::vector<std::pair<const char*, std::function<Verdict()>>> kCriteria{
    {"sphere filling-radius targets", criterion1},
    {"nerve Lipschitz bounds", criterion2},
    {"round trip", criterion3},
    {"product stability", criterion4},
    {"exact-algebra suite", criterion5},
    {"defect laws", criterion6},
    {"index integrality", criterion7},
    {"vanishing threshold", criterion8},
    {"invariant chain", criterion9},
    {"bound calculator", criterion10},
    {"determinism", criterion11},
};

bool run_one(std::size_t i)
{
    Verdict v;
    try {
        v = kCriteria[i].second();
    } catch (const Error& e) {
        v.pass = false;
        v.detail = std::string("error ") + std::string(to_string(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail = std::string("error: ") + e.what();
    }
    std::cout << "criterion " << i + 1 << " [" << kCriteria[i].first << "]: " << (v.pass ? "PASS" : "FAIL") << " | " << v.detail
              << std::endl;
    return v.pass;
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc > 2) {
        std::cerr << "usage: acceptance [criterion 1-11]\n";
        return 2;
    }
    if (argc == 2) {
        const int n = std::atoi(argv[1]);
        if (n < 1 || n > static_cast<int>(kCriteria.size())) {
            std::cerr << "criterion must be 1-11\n";
            return 2;
        }
        return run_one(static_cast<std::size_t>(n - 1)) ? 0 : 1;
    }
    bool all = true;
    for (std::size_t i = 0; i < kCriteria.size(); ++i) all = run_one(i) && all;
    return all ? 0 : 1;
}
