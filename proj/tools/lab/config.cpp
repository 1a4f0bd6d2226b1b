#include "lab.hpp"

#include "fillrad/error.hpp"
#include "fillrad/ktheory.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace lab {
namespace {

constexpr double kPi = 3.14159265358979323846;

class Checker {
public:
    explicit Checker(std::vector<Diagnostic>& out) : out_(out) {}

    void error(const std::string& where, const std::string& message) { out_.push_back({where, message}); }

    bool object(const json& j, const std::string& where)
    {
        if (j.is_object()) return true;
        error(where, "expected an object");
        return false;
    }

    void only(const json& j, const std::string& where, const std::set<std::string>& allowed)
    {
        for (const auto& [key, value] : j.items())
            if (!allowed.count(key)) error(where + "/" + key, "unknown field");
    }

    const json* field(const json& j, const std::string& where, const std::string& key, bool required)
    {
        if (j.contains(key)) return &j.at(key);
        if (required) error(where + "/" + key, "missing required field");
        return nullptr;
    }

    void integer(const json& j, const std::string& where, const std::string& key, bool required, long lo, long hi)
    {
        const json* v = field(j, where, key, required);
        if (!v) return;
        if (!v->is_number_integer()) return error(where + "/" + key, "expected an integer");
        const long x = v->get<long>();
        if (x < lo || x > hi)
            error(where + "/" + key, "value " + std::to_string(x) + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }

    // Numbers with open or closed lower bounds.
    void number(const json& j, const std::string& where, const std::string& key, bool required, double lo, bool strict,
                double hi = INFINITY)
    {
        const json* v = field(j, where, key, required);
        if (v) check_number(*v, where + "/" + key, lo, strict, hi);
    }

    void check_number(const json& v, const std::string& where, double lo, bool strict, double hi)
    {
        if (!v.is_number()) return error(where, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x) || (strict ? x <= lo : x < lo) || x > hi) {
            std::ostringstream m;
            m << "value " << x << " out of range " << (strict ? "(" : "[") << lo << ", " << hi << "]";
            error(where, m.str());
        }
    }

    void numbers(const json& j, const std::string& where, const std::string& key, bool required, double lo, bool strict,
                 std::size_t min_count = 1)
    {
        const json* v = field(j, where, key, required);
        if (!v) return;
        if (!v->is_array() || v->size() < min_count)
            return error(where + "/" + key, "expected an array of at least " + std::to_string(min_count) + " numbers");
        for (std::size_t i = 0; i < v->size(); ++i) check_number((*v)[i], where + "/" + key + "/" + std::to_string(i), lo, strict, INFINITY);
    }

    void integers(const json& j, const std::string& where, const std::string& key, bool required, long lo)
    {
        const json* v = field(j, where, key, required);
        if (!v) return;
        if (!v->is_array() || v->empty()) return error(where + "/" + key, "expected a nonempty array of integers");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const auto& e = (*v)[i];
            if (!e.is_number_integer() || e.get<long>() < lo)
                error(where + "/" + key + "/" + std::to_string(i), "expected an integer >= " + std::to_string(lo));
        }
    }

    void choice(const json& j, const std::string& where, const std::string& key, bool required,
                const std::vector<std::string>& options)
    {
        const json* v = field(j, where, key, required);
        if (!v) return;
        if (!v->is_string() || std::find(options.begin(), options.end(), v->get<std::string>()) == options.end()) {
            std::string list;
            for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
            error(where + "/" + key, "expected one of: " + list);
        }
    }

    void boolean(const json& j, const std::string& where, const std::string& key)
    {
        const json* v = field(j, where, key, false);
        if (v && !v->is_boolean()) error(where + "/" + key, "expected true or false");
    }

    void string(const json& j, const std::string& where, const std::string& key)
    {
        const json* v = field(j, where, key, false);
        if (v && !v->is_string()) error(where + "/" + key, "expected a string");
    }

    // Exact rational given as a JSON number or a string such as "7/3".
    void rational(const json& j, const std::string& where, const std::string& key, bool required, int sign_rule)
    {
        const json* v = field(j, where, key, required);
        if (!v) return;
        if (!v->is_number() && !v->is_string()) return error(where + "/" + key, "expected a number or a rational string");
        try {
            const mpq_class q = fillrad::parse_rational(v->is_string() ? v->get<std::string>() : v->dump());
            if (sign_rule > 0 && q <= 0) error(where + "/" + key, "must be positive");
            if (sign_rule == 0 && q < 0) error(where + "/" + key, "must be nonnegative");
            if (sign_rule == 2 && q < 1) error(where + "/" + key, "must be at least 1");
        } catch (const fillrad::Error& e) {
            error(where + "/" + key, e.what());
        }
    }

private:
    std::vector<Diagnostic>& out_;
};

void check_model(Checker& c, const json& j, const std::string& where, bool closed_only)
{
    if (!c.object(j, where)) return;
    std::vector<std::string> types{"circle", "sphere2", "flat-torus"};
    if (!closed_only) {
        types.push_back("line-segment");
        types.push_back("product-with-interval");
    }
    c.choice(j, where, "type", true, types);
    const std::string type = j.contains("type") && j["type"].is_string() ? j["type"].get<std::string>() : "";
    std::set<std::string> allowed{"type", "placement"};
    c.choice(j, where, "placement", false, {"regular", "random"});
    if (type == "circle" || type == "sphere2") {
        allowed.insert("radius");
        c.number(j, where, "radius", false, 0.0, true);
    } else if (type == "flat-torus") {
        allowed.insert({"length1", "length2"});
        c.number(j, where, "length1", false, 0.0, true);
        c.number(j, where, "length2", false, 0.0, true);
    } else if (type == "line-segment") {
        allowed.insert("length");
        c.number(j, where, "length", false, 0.0, true);
    } else if (type == "product-with-interval") {
        allowed.insert({"base", "lower", "upper", "layers"});
        if (const json* b = c.field(j, where, "base", true)) check_model(c, *b, where + "/base", true);
        c.number(j, where, "lower", true, -INFINITY, false);
        c.number(j, where, "upper", true, -INFINITY, false);
        c.integer(j, where, "layers", true, 2, 100000);
        if (j.contains("lower") && j.contains("upper") && j["lower"].is_number() && j["upper"].is_number() &&
            j["upper"].get<double>() <= j["lower"].get<double>())
            c.error(where + "/upper", "must exceed lower");
    }
    c.only(j, where, allowed);
}

void check_lattice(Checker& c, const json& root)
{
    if (const json* l = c.field(root, "", "lattice", true); l && c.object(*l, "/lattice")) {
        c.only(*l, "/lattice", {"n", "flux", "mass"});
        c.integer(*l, "/lattice", "n", true, 8, 64);
        c.integer(*l, "/lattice", "flux", false, -1000, 1000);
        c.number(*l, "/lattice", "mass", false, 0.0, true);
    }
    if (const json* p = c.field(root, "", "pair", false); p && c.object(*p, "/pair")) {
        c.only(*p, "/pair", {"radius", "amplitude", "degree"});
        c.number(*p, "/pair", "radius", false, 0.0, true);
        c.number(*p, "/pair", "amplitude", false, 0.0, false, kPi);
        c.integer(*p, "/pair", "degree", false, -1000, 1000);
    }
}

void check_tolerances(Checker& c, const json& root, const std::set<std::string>& keys)
{
    const json* t = c.field(root, "", "tolerances", false);
    if (!t || !c.object(*t, "/tolerances")) return;
    c.only(*t, "/tolerances", keys);
    for (const auto& k : keys) c.number(*t, "/tolerances", k, false, 0.0, true);
}

}  // namespace

const std::vector<KindInfo>& experiment_kinds()
{
    static const std::vector<KindInfo> kinds{
        {"fillrad", "discrete filling radius of a sampled model over a grid of sample counts"},
        {"nerve-audit", "Lipschitz audits of f_r in both nerve metrics and g_r round trips over random covers"},
        {"product-check", "filling radius of a closed model against its product with an interval"},
        {"invariants", "inequality chain between injectivity radius, filling radius, widths and diameter"},
        {"defect-sweep", "defect norms of the difference construction on the lattice torus, with linear fits"},
        {"threshold", "index pairing below and above the fitted vanishing threshold"},
        {"bound-calculator", "exact evaluation of the filling radius bound and the L_m recursion"},
    };
    return kinds;
}

std::optional<json> parse_config(const std::string& text, std::vector<Diagnostic>& diagnostics)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line and column.
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string message = e.what();
        if (const auto pos = message.find("syntax error"); pos != std::string::npos) message = message.substr(pos);
        diagnostics.push_back({"line " + std::to_string(line) + ", column " + std::to_string(column), message});
        return std::nullopt;
    }
}

std::vector<Diagnostic> validate_config(const json& config)
{
    std::vector<Diagnostic> out;
    Checker c(out);
    if (!c.object(config, "")) return out;
    c.integer(config, "", "schema_version", true, kSchemaVersion, kSchemaVersion);
    std::vector<std::string> names;
    for (const auto& k : experiment_kinds()) names.push_back(k.name);
    c.choice(config, "", "kind", true, names);
    c.integer(config, "", "seed", false, 0, std::numeric_limits<long>::max());
    c.string(config, "", "description");
    if (!config.contains("kind") || !config["kind"].is_string()) return out;
    const std::string kind = config["kind"].get<std::string>();
    std::set<std::string> allowed{"schema_version", "kind", "seed", "description", "tolerances"};

    if (kind == "fillrad") {
        allowed.insert({"model", "grid", "field", "resolution"});
        if (const json* m = c.field(config, "", "model", true)) check_model(c, *m, "/model", false);
        if (const json* g = c.field(config, "", "grid", true); g && c.object(*g, "/grid")) {
            c.only(*g, "/grid", {"n"});
            c.integers(*g, "/grid", "n", true, 3);
        }
        c.choice(config, "", "field", false, {"Q", "Z2"});
        c.number(config, "", "resolution", false, 0.0, false);
        check_tolerances(c, config, {"relative_error"});
    } else if (kind == "nerve-audit") {
        allowed.insert({"model", "n", "cover", "grid"});
        if (const json* m = c.field(config, "", "model", true)) check_model(c, *m, "/model", false);
        c.integer(config, "", "n", true, 4, 5000);
        if (const json* cv = c.field(config, "", "cover", true); cv && c.object(*cv, "/cover")) {
            c.only(*cv, "/cover", {"type", "radius"});
            c.choice(*cv, "/cover", "type", true, {"ball", "strips"});
            c.number(*cv, "/cover", "radius", true, 0.0, true);
        }
        if (const json* g = c.field(config, "", "grid", true); g && c.object(*g, "/grid")) {
            c.only(*g, "/grid", {"r", "sample_seeds"});
            c.numbers(*g, "/grid", "r", true, 0.0, true);
            c.integers(*g, "/grid", "sample_seeds", false, 0);
        }
    } else if (kind == "product-check") {
        allowed.insert({"model", "n", "grid"});
        if (const json* m = c.field(config, "", "model", true)) check_model(c, *m, "/model", true);
        c.integer(config, "", "n", true, 3, 5000);
        if (const json* g = c.field(config, "", "grid", true); g && c.object(*g, "/grid")) {
            c.only(*g, "/grid", {"half_length", "layer_spacing"});
            c.numbers(*g, "/grid", "half_length", true, 0.0, false);
            c.numbers(*g, "/grid", "layer_spacing", true, 0.0, true);
        }
        check_tolerances(c, config, {"relative_gap"});
    } else if (kind == "invariants") {
        allowed.insert("spaces");
        const json* s = c.field(config, "", "spaces", true);
        if (s && (!s->is_array() || s->empty())) c.error("/spaces", "expected a nonempty array");
        if (s && s->is_array())
            for (std::size_t i = 0; i < s->size(); ++i) {
                const std::string where = "/spaces/" + std::to_string(i);
                if (!c.object((*s)[i], where)) continue;
                c.only((*s)[i], where, {"model", "n"});
                if (const json* m = c.field((*s)[i], where, "model", true)) check_model(c, *m, where + "/model", true);
                c.integer((*s)[i], where, "n", true, 4, 5000);
            }
        check_tolerances(c, config, {"equality"});
    } else if (kind == "defect-sweep") {
        allowed.insert({"lattice", "pair", "grid"});
        check_lattice(c, config);
        if (const json* g = c.field(config, "", "grid", true); g && c.object(*g, "/grid")) {
            c.only(*g, "/grid", {"large_t", "small_t", "amplitude"});
            c.numbers(*g, "/grid", "large_t", true, 0.0, true, 5);
            c.numbers(*g, "/grid", "small_t", true, 0.0, true, 5);
            c.numbers(*g, "/grid", "amplitude", false, 0.0, true);
        }
        check_tolerances(c, config, {"min_r_squared"});
    } else if (kind == "threshold") {
        allowed.insert({"lattice", "pair", "constants", "fit", "grid", "generator_row"});
        check_lattice(c, config);
        const json* k = c.field(config, "", "constants", false);
        const json* f = c.field(config, "", "fit", false);
        if (!k && !f) c.error("/constants", "either constants or fit is required");
        if (k && c.object(*k, "/constants")) {
            c.only(*k, "/constants", {"c1", "c2"});
            c.number(*k, "/constants", "c1", true, 0.0, true);
            c.number(*k, "/constants", "c2", true, 0.0, true);
        }
        if (f && c.object(*f, "/fit")) {
            c.only(*f, "/fit", {"large_t", "small_t"});
            c.numbers(*f, "/fit", "large_t", true, 0.0, true, 5);
            c.numbers(*f, "/fit", "small_t", true, 0.0, true, 5);
        }
        if (const json* g = c.field(config, "", "grid", true); g && c.object(*g, "/grid")) {
            c.only(*g, "/grid", {"fraction"});
            c.numbers(*g, "/grid", "fraction", true, 0.0, false);
        }
        c.boolean(config, "", "generator_row");
    } else if (kind == "bound-calculator") {
        allowed.insert("cases");
        const json* s = c.field(config, "", "cases", true);
        if (s && (!s->is_array() || s->empty())) c.error("/cases", "expected a nonempty array");
        if (s && s->is_array())
            for (std::size_t i = 0; i < s->size(); ++i) {
                const std::string w = "/cases/" + std::to_string(i);
                const json& e = (*s)[i];
                if (!c.object(e, w)) continue;
                c.only(e, w, {"name", "sigma", "m", "A1", "A2", "L0", "c1", "c2", "C1", "C2", "control", "parity", "expected"});
                c.string(e, w, "name");
                c.rational(e, w, "sigma", true, 1);
                c.integer(e, w, "m", true, 0, 1000);
                c.rational(e, w, "A1", false, 2);
                c.rational(e, w, "A2", false, 0);
                c.rational(e, w, "L0", true, 0);
                c.rational(e, w, "c1", true, 1);
                c.rational(e, w, "c2", true, 1);
                c.rational(e, w, "C1", false, 1);
                c.rational(e, w, "C2", false, 0);
                if (e.contains("C1") != e.contains("C2")) c.error(w + (e.contains("C1") ? "/C2" : "/C1"), "C1 and C2 go together");
                c.choice(e, w, "parity", false, {"even", "odd"});
                c.rational(e, w, "expected", false, -1);
                if (const json* ctl = c.field(e, w, "control", true); ctl && c.object(*ctl, w + "/control")) {
                    c.only(*ctl, w + "/control", {"type", "factor", "offset"});
                    c.choice(*ctl, w + "/control", "type", true, {"linear", "affine"});
                    c.rational(*ctl, w + "/control", "factor", false, 0);
                    c.rational(*ctl, w + "/control", "offset", false, -1);
                }
            }
    }
    c.only(config, "", allowed);
    return out;
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 || EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &length) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("SHA-256 failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string config_hash(const json& config) { return sha256_hex(config.dump()); }

}  // namespace lab
