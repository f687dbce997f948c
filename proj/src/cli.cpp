#include "plaque/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <utility>

namespace plaque {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string out = "configuration invalid:";
    for (const std::string& s : issues) {
        out += "\n  ";
        out += s;
    }
    return out;
}

// Shortest round-trip decimal form; locale-independent.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct LineContext {
    int line;
    std::vector<std::string>* issues;

    void fail(const std::string& msg) const {
        issues->push_back("line " + std::to_string(line) + ": " + msg);
    }
};

bool parse_double(const std::string& text, double& out) {
    size_t pos = 0;
    try {
        out = std::stod(text, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == text.size() && std::isfinite(out);
}

bool parse_int(const std::string& text, int& out) {
    size_t pos = 0;
    try {
        out = std::stoi(text, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == text.size();
}

bool parse_bool(const std::string& text, bool& out) {
    if (text == "true" || text == "1") {
        out = true;
        return true;
    }
    if (text == "false" || text == "0") {
        out = false;
        return true;
    }
    return false;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, sep)) parts.push_back(trim(item));
    if (!text.empty() && text.back() == sep) parts.push_back("");
    return parts;
}

// Bounds for each overridable physical parameter.  lo_open means the
// value must exceed lo strictly; hi_open likewise for the upper end.
struct ParamRule {
    const char* key;
    double lo, hi;
    bool lo_open, hi_open;
};

constexpr double inf = std::numeric_limits<double>::infinity();

constexpr ParamRule param_rules[] = {
    {"k1", 0.0, inf, false, true},     {"k2", 0.0, inf, false, true},
    {"K1", 0.0, inf, true, true},      {"K2", 0.0, inf, true, true},
    {"D", 0.0, inf, true, true},       {"mu1", 0.0, inf, false, true},
    {"mu2", 0.0, inf, false, true},    {"r1", 0.0, inf, false, true},
    {"r2", 0.0, inf, false, true},     {"lambda", 0.0, inf, false, true},
    {"delta", -inf, inf, true, true},  {"M0", 0.0, inf, true, true},
    {"alpha", 0.0, inf, true, true},   {"beta", 0.0, inf, true, true},
    {"L0", 0.0, inf, false, true},     {"H0", 0.0, inf, false, true},
    {"F0", 0.0, inf, false, true},     {"epsilon", 0.0, 1.0, true, true},
    {"T", 0.0, inf, true, true},
};

const ParamRule* find_param_rule(const std::string& key) {
    for (const ParamRule& r : param_rules)
        if (key == r.key) return &r;
    return nullptr;
}

void apply_override(Parameters& p, const std::string& key, double v) {
    if (key == "k1") p.k1 = v;
    else if (key == "k2") p.k2 = v;
    else if (key == "K1") p.K1 = v;
    else if (key == "K2") p.K2 = v;
    else if (key == "D") p.D = v;
    else if (key == "mu1") p.mu1 = v;
    else if (key == "mu2") p.mu2 = v;
    else if (key == "r1") p.r1 = v;
    else if (key == "r2") p.r2 = v;
    else if (key == "lambda") p.lambda = v;
    else if (key == "delta") p.delta = v;
    else if (key == "M0") p.M0 = v;
    else if (key == "alpha") p.alpha = v;
    else if (key == "beta") p.beta = v;
    else if (key == "L0") p.L0 = v;
    else if (key == "H0") p.H0 = v;
    else if (key == "F0") p.F0 = v;
    else if (key == "epsilon") p.epsilon = v;
    else if (key == "T") p.T = v;
}

void parse_int_key(const LineContext& lc, const std::string& key, const std::string& value,
                   int lo, std::optional<int>& slot) {
    int v = 0;
    if (!parse_int(value, v))
        lc.fail("invalid integer for '" + key + "': " + value);
    else if (v < lo)
        lc.fail("'" + key + "' must be at least " + std::to_string(lo));
    else
        slot = v;
}

void parse_ladder(const LineContext& lc, const std::string& key, const std::string& value,
                  std::vector<int>& out) {
    std::vector<int> vals;
    for (const std::string& item : split(value, ',')) {
        int v = 0;
        if (!parse_int(item, v) || v < 2) {
            lc.fail("invalid entry in '" + key + "': " + item);
            return;
        }
        vals.push_back(v);
    }
    if (vals.empty()) {
        lc.fail("'" + key + "' must list at least one value");
        return;
    }
    for (size_t i = 1; i < vals.size(); ++i)
        if (vals[i] <= vals[i - 1]) {
            lc.fail("'" + key + "' must ascend strictly");
            return;
        }
    out = std::move(vals);
}

void parse_pairs(const LineContext& lc, const std::string& value, std::vector<RiskPair>& out) {
    std::vector<RiskPair> pairs;
    for (const std::string& item : split(value, ';')) {
        const std::vector<std::string> nums = split(item, ',');
        RiskPair pr;
        if (nums.size() != 2 || !parse_double(nums[0], pr.ldl_mgdl) ||
            !parse_double(nums[1], pr.hdl_mgdl) || pr.ldl_mgdl <= 0.0 || pr.hdl_mgdl <= 0.0) {
            lc.fail("invalid risk pair '" + item + "' (want 'LDL,HDL' in mg/dl)");
            return;
        }
        pairs.push_back(pr);
    }
    if (pairs.empty()) {
        lc.fail("'risk_pairs' must list at least one pair");
        return;
    }
    out = std::move(pairs);
}

void parse_bool_key(const LineContext& lc, const std::string& key, const std::string& value,
                    std::optional<bool>& slot) {
    bool v = false;
    if (!parse_bool(value, v))
        lc.fail("invalid boolean for '" + key + "': " + value);
    else
        slot = v;
}

// Everything a mode needs, with defaults filled in.
struct Resolved {
    RunMode mode = RunMode::Simulate;
    Parameters p;
    SchemeVariants variants;
    BasisKind kind = BasisKind::TFBL;
    int N = 0, M = 0, M_ref = 0, N_ref = 0, stride = 1;
    std::vector<int> M_list, N_list;
    std::vector<RiskPair> risk_pairs;
    double eps1 = 0.0;
    bool zero_dynamics = false;
    std::filesystem::path out_dir;
};

Resolved resolve(const RunConfig& c) {
    std::vector<std::string> issues;
    if (!c.mode) issues.push_back("no mode given (config key 'mode' or flag --mode)");
    Resolved r;
    r.mode = c.mode.value_or(RunMode::Simulate);
    r.out_dir = c.out_dir;

    // Mode defaults; the study modes default to horizons their step
    // ladders can resolve (the boundary-relaxation rate grows like
    // 1/(1-R), so long horizons need proportionally many steps).
    switch (r.mode) {
    case RunMode::Simulate:
        r.N = 16;
        r.M = 6000;
        break;
    case RunMode::ConvergenceTime:
        r.p.T = 6.0;
        r.N = 50;
        r.M_list = {100, 200, 400};
        r.M_ref = 1600;
        break;
    case RunMode::ConvergenceSpace:
        r.p.T = 6.0;
        r.N_list = {4, 6, 8, 10};
        r.N_ref = 16;
        r.M = 200;
        break;
    case RunMode::Condition:
        r.p.T = 6.0;
        r.N_list = {10, 20, 40, 80, 100};
        r.M = 100;
        break;
    case RunMode::RiskSweep:
        r.N = 16;
        r.M = 6000;
        r.risk_pairs = {{150.0, 45.0}, {120.0, 60.0}, {46.5, 139.5}};
        break;
    case RunMode::Mms:
        r.p.T = 1.0;
        r.N = 16;
        r.M_list = {50, 100, 200};
        break;
    case RunMode::Perturb:
        r.p.T = 6.0;
        r.N = 16;
        r.M = 200;
        r.eps1 = 1e-4;
        break;
    }

    for (const auto& [key, value] : c.param_overrides) apply_override(r.p, key, value);
    if (r.p.F0 > r.p.M0) issues.push_back("'F0' must not exceed 'M0'");

    if (c.basis) r.kind = *c.basis;
    if (c.N) r.N = *c.N;
    if (c.M) r.M = *c.M;
    if (c.M_ref) r.M_ref = *c.M_ref;
    if (c.N_ref) r.N_ref = *c.N_ref;
    if (c.stride) r.stride = *c.stride;
    if (!c.M_list.empty()) r.M_list = c.M_list;
    if (!c.N_list.empty()) r.N_list = c.N_list;
    if (!c.risk_pairs.empty()) r.risk_pairs = c.risk_pairs;
    if (c.eps1) r.eps1 = *c.eps1;
    if (c.zero_dynamics) r.zero_dynamics = *c.zero_dynamics;
    if (c.radius_drift_squared) r.variants.radius_drift_squared = *c.radius_drift_squared;
    if (c.diffusion_first_power) r.variants.diffusion_first_power = *c.diffusion_first_power;
    if (c.robin_slope_negative) r.variants.robin_slope_negative = *c.robin_slope_negative;

    switch (r.mode) {
    case RunMode::ConvergenceTime:
        for (int M : r.M_list)
            if (M >= r.M_ref || r.M_ref % M != 0)
                issues.push_back("'M_ref' must be a strict multiple of every 'M_list' entry");
        break;
    case RunMode::ConvergenceSpace:
        if (!r.N_list.empty() && r.N_list.back() >= r.N_ref)
            issues.push_back("'N_ref' must exceed every 'N_list' entry");
        break;
    default:
        break;
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return r;
}

std::string provenance(const Resolved& r) {
    static const char* mode_names[] = {"simulate",  "convergence-time", "convergence-space",
                                       "condition", "risk-sweep",       "mms",
                                       "perturb"};
    std::string s = "# mode=";
    s += mode_names[static_cast<int>(r.mode)];
    s += std::string(" basis=") + (r.kind == BasisKind::TFBL ? "tfbl" : "tfbm");
    auto add = [&s](const char* k, const std::string& v) {
        s += ' ';
        s += k;
        s += '=';
        s += v;
    };
    add("N", std::to_string(r.N));
    add("M", std::to_string(r.M));
    if (!r.M_list.empty()) {
        std::string v;
        for (int m : r.M_list) v += (v.empty() ? "" : ",") + std::to_string(m);
        add("M_list", v);
        add("M_ref", std::to_string(r.M_ref));
    }
    if (!r.N_list.empty()) {
        std::string v;
        for (int n : r.N_list) v += (v.empty() ? "" : ",") + std::to_string(n);
        add("N_list", v);
        if (r.mode == RunMode::ConvergenceSpace) add("N_ref", std::to_string(r.N_ref));
    }
    if (!r.risk_pairs.empty()) {
        std::string v;
        for (const RiskPair& pr : r.risk_pairs)
            v += (v.empty() ? "" : ";") + fmt(pr.ldl_mgdl) + "," + fmt(pr.hdl_mgdl);
        add("risk_pairs", v);
    }
    add("stride", std::to_string(r.stride));
    if (r.mode == RunMode::Perturb) add("eps1", fmt(r.eps1));
    add("zero_dynamics", r.zero_dynamics ? "true" : "false");
    add("radius_drift_squared", r.variants.radius_drift_squared ? "true" : "false");
    add("diffusion_first_power", r.variants.diffusion_first_power ? "true" : "false");
    add("robin_slope_negative", r.variants.robin_slope_negative ? "true" : "false");
    add("k1", fmt(r.p.k1));
    add("k2", fmt(r.p.k2));
    add("K1", fmt(r.p.K1));
    add("K2", fmt(r.p.K2));
    add("D", fmt(r.p.D));
    add("mu1", fmt(r.p.mu1));
    add("mu2", fmt(r.p.mu2));
    add("r1", fmt(r.p.r1));
    add("r2", fmt(r.p.r2));
    add("lambda", fmt(r.p.lambda));
    add("delta", fmt(r.p.delta));
    add("M0", fmt(r.p.M0));
    add("alpha", fmt(r.p.alpha));
    add("beta", fmt(r.p.beta));
    add("L0", fmt(r.p.L0));
    add("H0", fmt(r.p.H0));
    add("F0", fmt(r.p.F0));
    add("epsilon", fmt(r.p.epsilon));
    add("T", fmt(r.p.T));
    return s;
}

std::ofstream open_csv(const Resolved& r, const char* name, const char* header) {
    std::filesystem::create_directories(r.out_dir);
    std::ofstream os(r.out_dir / name, std::ios::trunc);
    if (!os) throw std::runtime_error(std::string("cannot open output file ") + name);
    os << provenance(r) << '\n' << header << '\n';
    return os;
}

SolveOptions solve_options(const Resolved& r) {
    SolveOptions opt;
    opt.variants = r.variants;
    opt.zero_dynamics = r.zero_dynamics;
    opt.stride = r.stride;
    return opt;
}

void write_trajectory(const Resolved& r, const Trajectory& tr) {
    const BasisSpec& basis = tr.basis;
    std::string header = "t,R,v0";
    for (const char* f : {"L", "H", "F"})
        for (int j = 1; j <= basis.n_nodes; ++j)
            header += std::string(",") + f + "_" + std::to_string(j);
    std::ofstream os = open_csv(r, "trajectory.csv", header.c_str());
    for (const SimState& s : tr.states) {
        os << fmt(s.t) << ',' << fmt(s.R) << ',' << fmt(s.v.v0);
        const std::vector<double> uL = values_at_nodes(basis, s.coeff_L);
        const std::vector<double> uH = values_at_nodes(basis, s.coeff_H);
        const std::vector<double> uF = values_at_nodes(basis, s.coeff_F);
        std::vector<HatPoint> hats(uL.size());
        for (size_t j = 0; j < uL.size(); ++j)
            hats[j] = hats_at(tr.params, s.R, basis.rho_nodes[j], uL[j], uH[j], uF[j],
                              r.variants);
        for (const HatPoint& h : hats) os << ',' << fmt(h.Lhat);
        for (const HatPoint& h : hats) os << ',' << fmt(h.Hhat);
        for (const HatPoint& h : hats) os << ',' << fmt(h.Fhat);
        os << '\n';
    }
}

int run_simulate(const Resolved& r) {
    const Trajectory tr =
        simulate(r.p, make_basis(r.kind, r.N), make_scheme(r.p.T, r.M), solve_options(r));
    write_trajectory(r, tr);
    if (tr.aborted) {
        std::fprintf(stderr, "run aborted at step %ld: %s\n", tr.abort_index,
                     tr.abort_reason.c_str());
        return 2;
    }
    return 0;
}

void write_convergence(const Resolved& r, const std::vector<ConvergenceRow>& rows) {
    std::ofstream os = open_csv(r, "convergence.csv",
                                "ladder_value,field,max_err,deriv_l2_err,xi,rate");
    for (const ConvergenceRow& row : rows)
        for (int f = 0; f < 3; ++f) {
            const size_t fi = static_cast<size_t>(f);
            os << row.ladder_value << ',' << field_name(static_cast<Field>(f)) << ','
               << fmt(row.report.max_err[fi]) << ',' << fmt(row.report.deriv_l2[fi]) << ','
               << fmt(row.report.xi) << ',' << fmt(row.rate[fi]) << '\n';
        }
}

int run_convergence_time(const Resolved& r) {
    const auto rows = self_convergence_study(r.p, make_basis(r.kind, r.N), r.M_list, r.M_ref,
                                             solve_options(r));
    write_convergence(r, rows);
    return 0;
}

int run_convergence_space(const Resolved& r) {
    const auto rows =
        space_convergence_study(r.p, r.kind, r.N_list, r.N_ref, r.M, solve_options(r));
    write_convergence(r, rows);
    return 0;
}

int run_condition(const Resolved& r) {
    const auto entries = condition_sweep(r.kind, r.N_list, r.p, make_scheme(r.p.T, r.M));
    std::ofstream os = open_csv(r, "condition.csv", "basis,N,field,cond");
    for (const ConditionEntry& e : entries)
        os << (e.kind == BasisKind::TFBL ? "tfbl" : "tfbm") << ',' << e.N << ','
           << field_name(e.field) << ',' << (e.singular ? "singular" : fmt(e.cond)) << '\n';
    return 0;
}

int run_risk_sweep(const Resolved& r) {
    const BasisSpec basis = make_basis(r.kind, r.N);
    const StepScheme scheme = make_scheme(r.p.T, r.M);
    std::vector<std::future<Trajectory>> runs;
    runs.reserve(r.risk_pairs.size());
    for (const RiskPair& pair : r.risk_pairs) {
        const Parameters pp = risk_parameters(r.p, pair);
        runs.push_back(std::async(std::launch::async, [pp, &basis, &scheme, &r] {
            return simulate(pp, basis, scheme, solve_options(r));
        }));
    }

    std::ofstream os = open_csv(r, "radius.csv", "pair,day,R");
    int status = 0;
    for (size_t i = 0; i < runs.size(); ++i) {
        const Trajectory tr = runs[i].get();
        const std::string tag =
            fmt(r.risk_pairs[i].ldl_mgdl) + "/" + fmt(r.risk_pairs[i].hdl_mgdl);
        for (int day = 0; day <= static_cast<int>(r.p.T + 1e-9); day += 10) {
            const long idx = std::lround(day / tr.scheme.h);
            if (tr.aborted && idx > tr.abort_index) break;
            os << tag << ',' << day << ',' << fmt(tr.at_index(idx).R) << '\n';
        }
        if (tr.aborted) {
            std::fprintf(stderr, "pair %s aborted at step %ld: %s\n", tag.c_str(),
                         tr.abort_index, tr.abort_reason.c_str());
            status = 2;
        }
    }
    return status;
}

int run_mms(const Resolved& r) {
    const ManufacturedCase mc = cosine_case();
    const BasisSpec basis = make_basis(r.kind, r.N);
    std::vector<std::future<MmsReport>> futs;
    futs.reserve(r.M_list.size());
    for (int M : r.M_list)
        futs.push_back(std::async(std::launch::async, [&, M] {
            return mms_residual(mc, r.p, basis, make_scheme(r.p.T, M), r.variants);
        }));
    std::ofstream os = open_csv(r, "mms.csv", "M,N,max_dev,observed_order");
    double prev = 0.0;
    for (size_t i = 0; i < futs.size(); ++i) {
        const MmsReport rep = futs[i].get();
        // Deviation over the settled half of the run; the startup's stiff
        // transient would otherwise mask the scheme order.
        const double order = i == 0 ? std::numeric_limits<double>::quiet_NaN()
                                    : convergence_rate(prev, rep.max_settled,
                                                       r.M_list[i - 1], r.M_list[i]);
        os << r.M_list[i] << ',' << r.N << ',' << fmt(rep.max_settled) << ',' << fmt(order)
           << '\n';
        prev = rep.max_settled;
    }
    return 0;
}

int run_perturb(const Resolved& r) {
    const BasisSpec basis = make_basis(r.kind, r.N);
    const StepScheme scheme = make_scheme(r.p.T, r.M);
    const SolveOptions opt = solve_options(r);
    // Deterministic bounded perturbations; each stays within [-eps1, eps1].
    const double e = r.eps1;
    Perturbations pert;
    pert.p1 = [e](double rho, double t) { return e * std::sin(3.0 * rho + t); };
    pert.p2 = [e](double rho, double t) { return e * std::cos(2.0 * rho - t); };
    pert.p3 = [e](double rho, double t) { return e * std::sin(rho) * std::cos(t); };
    pert.p4 = [e](double rho, double t) { return e * std::cos(rho + t); };

    auto base_fut = std::async(std::launch::async,
                               [&] { return simulate(r.p, basis, scheme, opt); });
    const Trajectory pt = perturbed_simulate(r.p, basis, scheme, pert, r.eps1, opt);
    const Trajectory base = base_fut.get();
    write_trajectory(r, pt);
    if (pt.aborted || base.aborted) {
        const Trajectory& bad = pt.aborted ? pt : base;
        std::fprintf(stderr, "run aborted at step %ld: %s\n", bad.abort_index,
                     bad.abort_reason.c_str());
        return 2;
    }

    double dev_R = 0.0, dev_u = 0.0;
    for (const SimState& s : pt.states) {
        const SimState& b = base.at_index(s.index);
        dev_R = std::max(dev_R, std::abs(s.R - b.R));
        for (Field f : {Field::L, Field::H, Field::F}) {
            const std::vector<double> a = values_at_nodes(basis, s.coeffs(f));
            const std::vector<double> bb = values_at_nodes(basis, b.coeffs(f));
            for (size_t j = 0; j < a.size(); ++j)
                dev_u = std::max(dev_u, std::abs(a[j] - bb[j]));
        }
    }
    std::printf("perturb eps1=%s: max field deviation %s, max radius deviation %s\n",
                fmt(r.eps1).c_str(), fmt(dev_u).c_str(), fmt(dev_R).c_str());
    return 0;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

RunMode mode_from_name(const std::string& name) {
    if (name == "simulate") return RunMode::Simulate;
    if (name == "convergence-time") return RunMode::ConvergenceTime;
    if (name == "convergence-space") return RunMode::ConvergenceSpace;
    if (name == "condition") return RunMode::Condition;
    if (name == "risk-sweep") return RunMode::RiskSweep;
    if (name == "mms") return RunMode::Mms;
    if (name == "perturb") return RunMode::Perturb;
    throw ConfigError({"unknown mode '" + name + "'"});
}

Parameters risk_parameters(const Parameters& base, const RiskPair& pair) {
    Parameters p = base;
    p.L0 = pair.ldl_mgdl * 1e-4; // mg/dl -> g/cm^3
    p.H0 = pair.hdl_mgdl * 1e-4;
    return p;
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::vector<std::string> issues;
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const LineContext lc{line_no, &issues};

        const size_t hash = raw.find('#');
        if (hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;

        const size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            lc.fail("expected 'key = value'");
            continue;
        }
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty() || value.empty()) {
            lc.fail("expected 'key = value'");
            continue;
        }

        if (key == "mode") {
            try {
                cfg.mode = mode_from_name(value);
            } catch (const ConfigError&) {
                lc.fail("unknown mode '" + value + "'");
            }
        } else if (key == "basis") {
            if (value == "tfbl") cfg.basis = BasisKind::TFBL;
            else if (value == "tfbm") cfg.basis = BasisKind::TFBM;
            else lc.fail("unknown basis '" + value + "' (want tfbl or tfbm)");
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "N") {
            parse_int_key(lc, key, value, 2, cfg.N);
        } else if (key == "M") {
            parse_int_key(lc, key, value, 2, cfg.M);
        } else if (key == "M_ref") {
            parse_int_key(lc, key, value, 2, cfg.M_ref);
        } else if (key == "N_ref") {
            parse_int_key(lc, key, value, 2, cfg.N_ref);
        } else if (key == "stride") {
            parse_int_key(lc, key, value, 1, cfg.stride);
        } else if (key == "M_list") {
            parse_ladder(lc, key, value, cfg.M_list);
        } else if (key == "N_list") {
            parse_ladder(lc, key, value, cfg.N_list);
        } else if (key == "risk_pairs") {
            parse_pairs(lc, value, cfg.risk_pairs);
        } else if (key == "eps1") {
            double v = 0.0;
            if (!parse_double(value, v) || v < 0.0)
                lc.fail("'eps1' must be a nonnegative number");
            else
                cfg.eps1 = v;
        } else if (key == "zero_dynamics") {
            parse_bool_key(lc, key, value, cfg.zero_dynamics);
        } else if (key == "radius_drift_squared") {
            parse_bool_key(lc, key, value, cfg.radius_drift_squared);
        } else if (key == "diffusion_first_power") {
            parse_bool_key(lc, key, value, cfg.diffusion_first_power);
        } else if (key == "robin_slope_negative") {
            parse_bool_key(lc, key, value, cfg.robin_slope_negative);
        } else if (const ParamRule* rule = find_param_rule(key)) {
            double v = 0.0;
            if (!parse_double(value, v)) {
                lc.fail("invalid number for '" + key + "': " + value);
            } else if ((rule->lo_open ? v <= rule->lo : v < rule->lo) ||
                       (rule->hi_open ? v >= rule->hi : v > rule->hi)) {
                std::string range = rule->lo_open ? "(" : "[";
                range += rule->lo == -inf ? "-inf" : fmt(rule->lo);
                range += ", ";
                range += rule->hi == inf ? "inf" : fmt(rule->hi);
                range += rule->hi_open ? ")" : "]";
                lc.fail("'" + key + "' out of range " + range);
            } else {
                cfg.param_overrides[key] = v;
            }
        } else {
            lc.fail("unknown key '" + key + "'");
        }
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

int run(const RunConfig& config) {
    const Resolved r = resolve(config);
    try {
        switch (r.mode) {
        case RunMode::Simulate: return run_simulate(r);
        case RunMode::ConvergenceTime: return run_convergence_time(r);
        case RunMode::ConvergenceSpace: return run_convergence_space(r);
        case RunMode::Condition: return run_condition(r);
        case RunMode::RiskSweep: return run_risk_sweep(r);
        case RunMode::Mms: return run_mms(r);
        case RunMode::Perturb: return run_perturb(r);
        }
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::runtime_error& e) {
        // Study helpers report aborted member runs this way.
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    return 2; // unreachable
}

} // namespace plaque
