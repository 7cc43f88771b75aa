// riskbias: reproduces the library's bound and simulation curves as CSV.
//
// Subcommands: envelope | bias | compare-vc | simulate | confidence.
// Common flags: --config PATH, --seed U64, --out PATH, --threads INT.
// Exit codes: 0 success, 2 configuration error, 3 domain error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "riskbias/asymptotics.hpp"
#include "riskbias/confidence.hpp"
#include "riskbias/exact_bias.hpp"
#include "riskbias/rng.hpp"
#include "riskbias/simulation.hpp"
#include "riskbias/vc_bound.hpp"
#include "riskbias/version.hpp"

namespace {

using riskbias::ProblemSize;

// ---------------------------------------------------------------------------
// config handling
// ---------------------------------------------------------------------------

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Aggregates every problem found in one invocation into a single report.
[[noreturn]] void raise_config_errors(const std::vector<std::string>& errors) {
    std::string msg = "configuration errors:";
    for (const std::string& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

using Section = std::map<std::string, std::string>;

// Flat key-value file with one [section] per command and '#' comments.
std::map<std::string, Section> parse_config_file(const std::string& path,
                                                 std::vector<std::string>& errors) {
    std::map<std::string, Section> sections;
    std::ifstream in(path);
    if (!in) {
        errors.push_back("cannot open config file '" + path + "'");
        return sections;
    }
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            current = trim(t.substr(1, t.size() - 2));
            sections[current];
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            errors.push_back(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            errors.push_back(path + ":" + std::to_string(lineno) + ": empty key");
            continue;
        }
        sections[current][key] = value;
    }
    return sections;
}

// Typed view over one section; collects every problem instead of stopping.
class Params {
public:
    Params(Section section, std::string scope, std::vector<std::string>& errors)
        : kv_(std::move(section)), scope_(std::move(scope)), errors_(errors) {}

    int get_int(const std::string& key, int fallback, int lo, int hi) {
        double v = get_double(key, fallback, lo, hi);
        if (v != static_cast<double>(static_cast<long long>(v))) {
            fail(key, "must be an integer");
            return fallback;
        }
        return static_cast<int>(v);
    }

    double get_double(const std::string& key, double fallback, double lo, double hi) {
        auto it = consume(key);
        if (it == kv_.end()) {
            echo_[key] = format(fallback);
            return fallback;
        }
        try {
            std::size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            if (v < lo || v > hi) {
                fail(key, "out of range [" + format(lo) + ", " + format(hi) + "]");
                return fallback;
            }
            echo_[key] = format(v);
            return v;
        } catch (const std::exception&) {
            fail(key, "is not a number: '" + it->second + "'");
            return fallback;
        }
    }

    std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback,
                                        double lo, double hi) {
        auto it = consume(key);
        if (it == kv_.end()) {
            echo_[key] = format_list(fallback);
            return fallback;
        }
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string item;
        bool ok = true;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                double v = std::stod(item);
                if (v < lo || v > hi) {
                    fail(key, "entry " + item + " out of range [" + format(lo) + ", " +
                                  format(hi) + "]");
                    ok = false;
                    break;
                }
                out.push_back(v);
            } catch (const std::exception&) {
                fail(key, "entry '" + item + "' is not a number");
                ok = false;
                break;
            }
        }
        if (!ok || out.empty()) {
            if (ok) fail(key, "must list at least one value");
            echo_[key] = format_list(fallback);
            return fallback;
        }
        echo_[key] = format_list(out);
        return out;
    }

    std::string get_choice(const std::string& key, const std::string& fallback,
                           const std::set<std::string>& allowed) {
        auto it = consume(key);
        std::string v = it == kv_.end() ? fallback : it->second;
        if (!allowed.count(v)) {
            std::string opts;
            for (const std::string& a : allowed) opts += (opts.empty() ? "" : "|") + a;
            fail(key, "must be one of " + opts);
            return fallback;
        }
        echo_[key] = v;
        return v;
    }

    std::vector<std::string> get_name_list(const std::string& key,
                                           const std::string& fallback,
                                           const std::set<std::string>& allowed) {
        auto it = consume(key);
        std::string raw = it == kv_.end() ? fallback : it->second;
        std::vector<std::string> out;
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            if (!allowed.count(item)) {
                std::string opts;
                for (const std::string& a : allowed) opts += (opts.empty() ? "" : "|") + a;
                fail(key, "entry '" + item + "' must be one of " + opts);
                continue;
            }
            if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
        }
        if (out.empty()) {
            fail(key, "must list at least one value");
        }
        std::string echo;
        for (const std::string& s : out) echo += (echo.empty() ? "" : ",") + s;
        echo_[key] = echo;
        return out;
    }

    // call after all gets: flags unknown keys as config errors
    void finish() {
        for (const auto& [key, value] : kv_) {
            if (!consumed_.count(key)) fail(key, "unknown key");
        }
    }

    const std::map<std::string, std::string>& echo() const { return echo_; }

    static std::string format(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return buf;
    }

private:
    static std::string format_list(const std::vector<double>& vs) {
        std::string s;
        for (double v : vs) s += (s.empty() ? "" : ",") + format(v);
        return s;
    }

    Section::const_iterator consume(const std::string& key) {
        consumed_.insert(key);
        return kv_.find(key);
    }

    void fail(const std::string& key, const std::string& why) {
        errors_.push_back("[" + scope_ + "] " + key + ": " + why);
    }

    Section kv_;
    std::string scope_;
    std::vector<std::string>& errors_;
    std::set<std::string> consumed_;
    std::map<std::string, std::string> echo_;
};

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : columns_(std::move(header)) {}

    void add_row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size()) {
            throw riskbias::InternalError("csv row width mismatch");
        }
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
        rows_.push_back(std::move(line));
    }

    void add_meta(const std::string& key, const std::string& value) {
        meta_.emplace_back(key, value);
    }

    std::string render() const {
        std::string out;
        for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
        out += '\n';
        for (const std::string& r : rows_) {
            out += r;
            out += '\n';
        }
        for (const auto& [k, v] : meta_) out += "# " + k + " = " + v + '\n';
        return out;
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
    std::vector<std::pair<std::string, std::string>> meta_;
};

std::string num(double v) { return Params::format(v); }

struct Output {
    std::optional<std::string> path;  // stdout when absent

    // RISKBIAS_OUT_DIR overrides the directory of relative output paths.
    static std::string resolve(const std::string& p) {
        const char* dir = std::getenv("RISKBIAS_OUT_DIR");
        if (!dir || p.empty() || p.front() == '/') return p;
        std::string d(dir);
        if (!d.empty() && d.back() != '/') d += '/';
        return d + p;
    }

    void write(const std::string& text, const std::string& suffix = "") const {
        if (!path) {
            std::cout << text;
            return;
        }
        std::string full = resolve(*path + suffix);
        std::ofstream out(full, std::ios::binary);
        if (!out) throw ConfigError("cannot open output file '" + full + "'");
        out << text;
    }
};

// Trailing metadata block: command, version, seed, then the effective
// parameters. --threads is deliberately not echoed so outputs stay identical
// across thread counts.
void stamp(Csv& csv, const std::string& command, std::uint64_t seed,
           const std::map<std::string, std::string>& echo) {
    csv.add_meta("command", command);
    csv.add_meta("version", riskbias::kVersion);
    csv.add_meta("seed", std::to_string(seed));
    for (const auto& [k, v] : echo) csv.add_meta(k, v);
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

struct Invocation {
    std::uint64_t seed = 1;
    Output out;
    int threads = 1;
    Section section;
};

int run_envelope(const Invocation& inv) {
    std::vector<std::string> errors;
    Params params(inv.section, "envelope", errors);
    int n = params.get_int("n", 20, 1, 100000);
    int k = params.get_int("k", 10, 1, 100000);
    std::vector<double> default_alphas;
    for (double f : {0.25, 0.5, 0.75, 1.0}) default_alphas.push_back(f / k);
    std::vector<double> alphas = params.get_double_list("alphas", default_alphas, 0.0, 1.0);
    int p_points = params.get_int("p_points", 101, 2, 100000);
    params.finish();
    if (n < k) errors.push_back("[envelope] n must be >= k");
    for (double a : alphas) {
        if (!(a > 0.0 && a <= 1.0 / k + 1e-15)) {
            errors.push_back("[envelope] alphas must lie in (0, 1/k]");
            break;
        }
    }
    if (!errors.empty()) raise_config_errors(errors);
    ProblemSize size(n, k);

    Csv csv({"alpha", "z", "k_mu_s", "envelope"});
    for (double alpha : alphas) {
        for (int i = 0; i < p_points; ++i) {
            double p = 0.5 * i / (p_points - 1);
            riskbias::CellParams cell{alpha, p};
            double z = k * riskbias::cell_expectation(cell, size,
                                                      riskbias::CellFunction::EmpiricalRisk);
            double y = k * riskbias::cell_expectation(cell, size, riskbias::CellFunction::Bias);
            csv.add_row({num(alpha), num(z), num(y), num(riskbias::envelope_at(size, z))});
        }
    }
    stamp(csv, "envelope", inv.seed, params.echo());
    inv.out.write(csv.render());
    return 0;
}

int run_bias(const Invocation& inv) {
    std::vector<std::string> errors;
    Params params(inv.section, "bias", errors);
    int k = params.get_int("k", 10, 2, 10000);
    std::vector<double> ms = params.get_double_list("m_list", {1.0, 2.0, 4.0, 8.0}, 1.0, 1e4);
    int e0_points = params.get_int("e0_points", 200, 2, 1000000);
    double e0_max = params.get_double("e0_max", 0.0, 0.0, 0.5);  // 0 = auto
    params.finish();
    for (double m : ms) {
        double n = m * k;
        if (std::abs(n - std::round(n)) > 1e-9) {
            errors.push_back("[bias] m_list entry " + num(m) + " times k is not an integer N");
        } else if (n > 100000) {
            errors.push_back("[bias] m_list entry " + num(m) + " gives N > 100000");
        }
    }
    if (!errors.empty()) raise_config_errors(errors);

    Csv csv({"M", "e0", "bias_exact", "bias_psi", "bias_psibar"});
    long omitted = 0;
    for (double m : ms) {
        ProblemSize size(static_cast<int>(std::round(m * k)), k);
        // rows outside either curve's admissible domain are dropped, counted
        // in the metadata footer
        double hi = e0_max > 0.0 ? e0_max
                                 : std::min(riskbias::attainable_empirical_risk(size).hi,
                                            riskbias::max_admissible_empirical_risk(m));
        for (int i = 0; i < e0_points; ++i) {
            double e0 = hi * i / (e0_points - 1);
            try {
                double exact = riskbias::max_bias_exact(e0, size).bias;
                double psi = riskbias::max_bias_asymptotic(e0, m);
                double approx = riskbias::bias_kernel_approx(m * e0) / m - e0;
                csv.add_row({num(m), num(e0), num(exact), num(psi), num(approx)});
            } catch (const riskbias::DomainError&) {
                ++omitted;
            }
        }
    }
    stamp(csv, "bias", inv.seed, params.echo());
    csv.add_meta("omitted_rows", std::to_string(omitted));
    inv.out.write(csv.render());
    return 0;
}

int run_compare_vc(const Invocation& inv) {
    std::vector<std::string> errors;
    Params params(inv.section, "compare-vc", errors);
    int n = params.get_int("n", 50, 1, 100000);
    int k = params.get_int("k", 10, 2, 10000);
    int e0_points = params.get_int("e0_points", 100, 2, 1000000);
    double e0_max = params.get_double("e0_max", 0.0, 0.0, 1.0);  // 0 = auto
    params.finish();
    if (n < k) errors.push_back("[compare-vc] n must be >= k");
    if (!errors.empty()) raise_config_errors(errors);
    ProblemSize size(n, k);

    Csv csv({"e0", "s_vc", "s_exact"});
    // an explicit e0_max beyond the attainable range propagates a domain error
    double hi = e0_max > 0.0 ? e0_max : riskbias::attainable_empirical_risk(size).hi;
    for (int i = 0; i < e0_points; ++i) {
        double e0 = hi * i / (e0_points - 1);
        csv.add_row({num(e0), num(riskbias::vc_bias(e0, size)),
                     num(riskbias::max_bias_exact(e0, size).bias)});
    }
    stamp(csv, "compare-vc", inv.seed, params.echo());
    inv.out.write(csv.render());
    return 0;
}

riskbias::ModelFamily make_family(const std::string& name, int dim, double theta0,
                                  int g1_points, int theta_points, int param_points) {
    riskbias::ModelFamily fam;
    fam.dim = dim;
    fam.theta0 = theta0;
    fam.g1_points = g1_points;
    fam.theta_points = theta_points;
    fam.param_points = param_points;
    if (name == "A") fam.variant = riskbias::ModelFamily::Variant::A;
    if (name == "B") fam.variant = riskbias::ModelFamily::Variant::B;
    if (name == "section6") fam.variant = riskbias::ModelFamily::Variant::Section6;
    return fam;
}

int run_simulate(const Invocation& inv) {
    std::vector<std::string> errors;
    Params params(inv.section, "simulate", errors);
    std::vector<std::string> families =
        params.get_name_list("families", "A,B", {"A", "B", "section6"});
    int dim = params.get_int("dim", 2, 1, 16);
    int n = params.get_int("n", 60, 2, 100000);
    int max_leaves = params.get_int("max_leaves", 3, 1, 4096);
    int reps = params.get_int("reps", 1000, 1, 100000000);
    double theta0 = params.get_double("theta0", 0.83, 0.0, 1.0);
    int g1_points = params.get_int("g1_points", 20, 1, 100000);
    int theta_points = params.get_int("theta_points", 20, 1, 100000);
    int param_points = params.get_int("param_points", 20, 1, 100000);
    params.finish();
    if (!errors.empty()) raise_config_errors(errors);

    Csv csv({"family", "param", "mean_e", "mean_r", "bias", "se_e", "se_r", "reps"});
    for (std::size_t fi = 0; fi < families.size(); ++fi) {
        riskbias::ModelFamily fam =
            make_family(families[fi], dim, theta0, g1_points, theta_points, param_points);
        // the family name, not list order, keys the stream: A's curve is the
        // same whether run alone or alongside B
        std::uint64_t tag = families[fi] == "A" ? 1 : families[fi] == "B" ? 2 : 3;
        std::vector<riskbias::McCurvePoint> curve = riskbias::mc_bias_curve(
            fam, n, max_leaves, reps, riskbias::substream(inv.seed, tag), inv.threads);
        for (const riskbias::McCurvePoint& pt : curve) {
            csv.add_row({pt.family, num(pt.param), num(pt.mean_empirical), num(pt.mean_risk),
                         num(pt.bias()), num(pt.se_empirical), num(pt.se_risk),
                         std::to_string(pt.reps)});
        }
    }
    stamp(csv, "simulate", inv.seed, params.echo());
    inv.out.write(csv.render());
    return 0;
}

int run_confidence(const Invocation& inv) {
    std::vector<std::string> errors;
    Params params(inv.section, "confidence", errors);
    int dim = params.get_int("dim", 2, 1, 16);
    int n = params.get_int("n", 50, 2, 100000);
    int max_leaves = params.get_int("max_leaves", 3, 1, 4096);
    int reps_fit = params.get_int("reps_fit", 3000, 100, 100000000);
    int reps_validate = params.get_int("reps_validate", 2000, 100, 100000000);
    double eta = params.get_double("eta", 0.9, 1e-6, 1.0 - 1e-6);
    int bins = params.get_int("bins", 50, 1, 100000);
    int param_points = params.get_int("param_points", 11, 1, 100000);
    std::string functional = params.get_choice("functional", "loo", {"loo", "empirical"});
    params.finish();
    if (!inv.out.path) {
        errors.push_back(
            "[confidence] an output path is required (--out or 'out' in the config); the "
            "command writes <out>.function.csv and <out>.coverage.csv");
    }
    if (!errors.empty()) raise_config_errors(errors);

    riskbias::ModelFamily fam = make_family("section6", dim, 0.83, 1, 1, param_points);
    riskbias::Functional u_fn = functional == "loo" ? riskbias::Functional::LeaveOneOut
                                                    : riskbias::Functional::EmpiricalRisk;
    // fresh-seed validation split is mandatory: the fit and validate runs use
    // disjoint substreams of the base seed
    std::vector<riskbias::MemberRuns> fit = riskbias::simulate_pairs(
        fam, n, max_leaves, reps_fit, u_fn, riskbias::substream(inv.seed, 1), inv.threads);
    riskbias::EstimatingFunction fn = riskbias::build_estimating_function(fit, eta, bins);
    std::vector<riskbias::MemberRuns> fresh = riskbias::simulate_pairs(
        fam, n, max_leaves, reps_validate, u_fn, riskbias::substream(inv.seed, 2),
        inv.threads);

    Csv fn_csv({"u", "r_hat"});
    for (std::size_t i = 0; i < fn.breakpoints.size(); ++i) {
        fn_csv.add_row({num(fn.breakpoints[i]), num(fn.values[i])});
    }
    stamp(fn_csv, "confidence", inv.seed, params.echo());

    Csv cov_csv({"param", "coverage", "se", "reps", "split"});
    for (int split = 0; split < 2; ++split) {
        const std::vector<riskbias::MemberRuns>& data = split == 0 ? fit : fresh;
        riskbias::CoverageReport report = riskbias::coverage_check(fn, data);
        for (const riskbias::MemberCoverage& m : report.members) {
            cov_csv.add_row({num(m.param), num(m.coverage), num(m.se), std::to_string(m.reps),
                             split == 0 ? "fit" : "validate"});
        }
    }
    stamp(cov_csv, "confidence", inv.seed, params.echo());

    inv.out.write(fn_csv.render(), ".function.csv");
    inv.out.write(cov_csv.render(), ".coverage.csv");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk-bias bounds and Monte Carlo experiments for histogram and tree "
                 "classifiers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 1;
    int threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--config", config_path, "flat key-value config file");
    app.add_option("--seed", seed, "base RNG seed")->capture_default_str();
    app.add_option("--out", out_path, "output CSV path (stdout when omitted)");
    app.add_option("--threads", threads, "worker thread cap")->capture_default_str();

    struct Cmd {
        const char* name;
        int (*run)(const Invocation&);
    };
    const std::vector<Cmd> commands = {
        {"envelope", run_envelope},     {"bias", run_bias},
        {"compare-vc", run_compare_vc}, {"simulate", run_simulate},
        {"confidence", run_confidence},
    };
    for (const Cmd& c : commands) app.add_subcommand(c.name, "")->fallthrough();

    CLI11_PARSE(app, argc, argv);

    const Cmd* selected = nullptr;
    for (const Cmd& c : commands) {
        if (app.got_subcommand(c.name)) selected = &c;
    }
    if (!selected) {
        std::cerr << "error: no subcommand selected\n";
        return 2;
    }

    std::vector<std::string> errors;
    Invocation inv;
    inv.seed = seed;
    inv.threads = std::max(1, threads);
    if (!out_path.empty()) inv.out.path = out_path;
    if (!config_path.empty()) {
        auto sections = parse_config_file(config_path, errors);
        auto it = sections.find(selected->name);
        if (it != sections.end()) inv.section = it->second;
        // 'out' and 'seed' may also live in the section; explicit flags win
        if (auto o = inv.section.find("out"); o != inv.section.end()) {
            if (!inv.out.path) inv.out.path = o->second;
            inv.section.erase(o);
        }
        if (auto s = inv.section.find("seed"); s != inv.section.end()) {
            try {
                if (app.count("--seed") == 0) inv.seed = std::stoull(s->second);
            } catch (const std::exception&) {
                errors.push_back(std::string("[") + selected->name + "] seed: not an integer");
            }
            inv.section.erase(s);
        }
    }
    if (!errors.empty()) {
        std::cerr << "configuration errors:\n";
        for (const std::string& e : errors) std::cerr << "  - " << e << '\n';
        return 2;
    }

    try {
        return selected->run(inv);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const riskbias::ArgumentError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const riskbias::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
