#include "grashof/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace grashof {

namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("bad config line: " + line);
        kv[key] = val;
    }
    return kv;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " needs a number, got '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " needs an integer, got '" + v + "'");
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    for (const auto& [key, val] : parse_kv(text)) {
        if (key == "dimension") cfg.dimension = static_cast<int>(to_long(key, val));
        else if (key == "lambda") cfg.lambda = to_double(key, val);
        else if (key == "force") cfg.force = val;
        else if (key == "alpha_start") cfg.alpha_start = to_double(key, val);
        else if (key == "alpha_end") cfg.alpha_end = to_double(key, val);
        else if (key == "spacing") {
            if (val == "adaptive") cfg.steps.spacing = StepPolicy::Spacing::adaptive;
            else if (val == "geometric") cfg.steps.spacing = StepPolicy::Spacing::geometric;
            else throw ConfigError("spacing must be adaptive or geometric");
        } else if (key == "geometric_count") cfg.steps.geometric_count = static_cast<int>(to_long(key, val));
        else if (key == "step_first") cfg.steps.first_factor = to_double(key, val);
        else if (key == "step_max") cfg.steps.max_factor = to_double(key, val);
        else if (key == "step_min") cfg.steps.min_factor = to_double(key, val);
        else if (key == "step_grow") cfg.steps.grow = to_double(key, val);
        else if (key == "step_cut") cfg.steps.cut = to_double(key, val);
        else if (key == "easy_iters") cfg.steps.easy_iters = static_cast<int>(to_long(key, val));
        else if (key == "newton_tol") cfg.newton.tol = to_double(key, val);
        else if (key == "newton_max_iter") cfg.newton.max_iter = static_cast<int>(to_long(key, val));
        else if (key == "depth") cfg.depth = static_cast<int>(to_long(key, val));
        else if (key == "k_max") cfg.k_max = static_cast<int>(to_long(key, val));
        else if (key == "window_lo") cfg.compare.window_lo = to_double(key, val);
        else if (key == "window_hi") cfg.compare.window_hi = to_double(key, val);
        else if (key == "slope_threshold") cfg.compare.slope_threshold = to_double(key, val);
        else if (key == "plateau_dispersion") cfg.compare.plateau_dispersion = to_double(key, val);
        else if (key == "min_points") cfg.compare.min_points = static_cast<int>(to_long(key, val));
        else if (key == "trivial_threshold") cfg.limits.trivial_threshold = to_double(key, val);
        else if (key == "stagnation_tol") cfg.limits.stagnation_tol = to_double(key, val);
        else if (key == "tail_exclusion") cfg.limits.tail_exclusion = to_double(key, val);
        else if (key == "trend_ratio") cfg.limits.trend_ratio = to_double(key, val);
        else if (key == "settle_threshold") cfg.limits.settle_threshold = to_double(key, val);
        else if (key == "snapshots") cfg.snapshots = to_long(key, val) != 0;
        else if (key == "out") cfg.out = val;
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_long(key, val));
        else if (key == "construct") cfg.construct = val;
        else if (key == "w0") cfg.w0 = val;
        else if (key == "space") cfg.space = val;
        else if (key == "zero_bs_k") cfg.zero_bs_k = val;
        else if (key == "zero_bs_m") cfg.zero_bs_m = to_double(key, val);
        else if (key == "zero_bs_k3") cfg.zero_bs_k3 = val;
        else if (key == "plan_m") cfg.plan_m = to_double(key, val);
        else if (key == "plan_d0") cfg.plan_d0 = to_double(key, val);
        else if (key == "plan_depth") cfg.plan_depth = static_cast<int>(to_long(key, val));
        else if (key == "m_trunc") cfg.m_trunc = static_cast<int>(to_long(key, val));
        else if (key == "m_target") cfg.m_target = to_double(key, val);
        else if (key == "u_seed") cfg.u_seed = val;
        else if (key == "alpha_base") cfg.alpha_base = to_double(key, val);
        else if (key == "alpha_ratio") cfg.alpha_ratio = to_double(key, val);
        else if (key == "alpha_count") cfg.alpha_count = static_cast<int>(to_long(key, val));
        else throw ConfigError("unknown config key: " + key);
    }
    if (cfg.dimension != 2 && cfg.dimension != 3) throw ConfigError("dimension must be 2 or 3");
    if (!(cfg.newton.tol > 0)) throw ConfigError("tolerances must be positive");
    if (!(cfg.alpha_start < cfg.alpha_end)) throw ConfigError("alpha range is empty");
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

const std::map<std::string, std::string>& preset_registry() {
    static const std::map<std::string, std::string> reg = {
        {"paper-4.1",
         "# shear-forced branch on the lambda = 9 ball, alpha up to 2e5\n"
         "dimension = 3\n"
         "lambda = 9\n"
         "force = manufactured\n"
         "alpha_start = 1\n"
         "alpha_end = 200000\n"
         "spacing = adaptive\n"
         "newton_tol = 1e-9\n"
         "depth = 2\n"
         "k_max = 2\n"
         "snapshots = 1\n"},
        {"thm-6.10",
         "# vanishing-limit family with the force norm pinned to the shear force\n"
         "dimension = 3\n"
         "lambda = 9\n"
         "construct = vanishing\n"
         "u_seed = example-pair\n"
         "m_target = 17.608599228871054\n"
         "alpha_base = 10\n"
         "alpha_ratio = 2\n"
         "alpha_count = 20\n"},
        {"case1-plan",
         "# force expansion from a generic single-mode seed (coupled case)\n"
         "dimension = 3\n"
         "lambda = 9\n"
         "construct = plan\n"
         "w0 = single-mode:1,0,0\n"
         "plan_m = 1\n"
         "plan_d0 = 2\n"
         "plan_depth = 6\n"
         "alpha_base = 10\n"
         "alpha_ratio = 2\n"
         "alpha_count = 20\n"},
        {"case2-plan",
         "# force expansion on the decoupled mode set (seed orthogonal to everything)\n"
         "dimension = 3\n"
         "construct = plan\n"
         "space = zero-bs\n"
         "zero_bs_k = 3,0,0\n"
         "zero_bs_m = 1\n"
         "zero_bs_k3 = 0,1,0;0,-1,0\n"
         "plan_m = 1\n"
         "plan_d0 = 2\n"
         "plan_depth = 6\n"
         "alpha_base = 10\n"
         "alpha_ratio = 2\n"
         "alpha_count = 20\n"}};
    return reg;
}

WaveVector parse_wavevector(const std::string& s, int dim) {
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream ss(t);
    WaveVector k;
    k.dim = dim;
    for (int i = 0; i < dim; ++i)
        if (!(ss >> k.c[static_cast<std::size_t>(i)])) throw ConfigError("bad wave vector '" + s + "'");
    return k;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : preset_registry()) names.push_back(k);
    return names;
}

std::string preset_text(const std::string& name) {
    auto it = preset_registry().find(name);
    if (it == preset_registry().end()) throw ConfigError("unknown preset " + name);
    return it->second;
}

RunConfig preset(const std::string& name) { return parse_config_text(preset_text(name)); }

ManufacturedPair manufactured_pair(const ModeSetPtr& space) {
    if (space->dim() != 3) throw ConfigError("the manufactured force lives in three dimensions");
    SpectralField u(space);
    u.set_coefficient(WaveVector(1, 0, 0), {Complex{0, 0}, Complex{0, -0.5}, Complex{0, 0}});
    u.set_coefficient(WaveVector(0, 0, 1), {Complex{0, -0.5}, Complex{0, 0}, Complex{0, 0}});
    ManufacturedPair p{SpectralField(space), SpectralField(space)};
    p.g = bilinear_b(u, u) - u;
    p.state = -u;
    return p;
}

SpectralField example_pair_field(const ModeSetPtr& space) {
    SpectralField u(space);
    if (space->dim() == 3) {
        u.set_coefficient(WaveVector(1, 0, 0), {Complex{0, 0}, Complex{1, 0}, Complex{0, 0}});
        u.set_coefficient(WaveVector(0, 1, 0), {Complex{0, 0}, Complex{0, 0}, Complex{1, 0}});
    } else {
        // crossed rolls: k = (2,0) against j = (0,1)
        u.set_coefficient(WaveVector(2, 0), {Complex{0, 0}, Complex{2, 0}, Complex{0, 0}});
        u.set_coefficient(WaveVector(0, 1), {Complex{-1, 0}, Complex{0, 0}, Complex{0, 0}});
    }
    return u;
}

SpectralField load_force(const RunConfig& cfg, const ModeSetPtr& space) {
    if (cfg.force == "manufactured") return manufactured_pair(space).g;
    if (cfg.force.rfind("file:", 0) == 0) {
        const std::string path = cfg.force.substr(5);
        if (!fs::exists(path)) throw ConfigError("force file not found: " + path);
        SpectralField f = read_field(path);
        if (!f.modes().same(*space)) throw ConfigError("force file lives on a different mode set");
        return f;
    }
    if (cfg.force.rfind("inline:", 0) == 0) {
        SpectralField f(space);
        std::string body = cfg.force.substr(7);
        std::replace(body.begin(), body.end(), ';', '\n');
        std::istringstream is(body);
        std::string line;
        bool any = false;
        while (std::getline(is, line)) {
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            std::istringstream ss(line);
            WaveVector k;
            k.dim = cfg.dimension;
            for (int i = 0; i < cfg.dimension; ++i)
                if (!(ss >> k.c[static_cast<std::size_t>(i)])) throw ConfigError("bad inline force entry: " + line);
            std::array<Complex, 3> a{};
            for (int c = 0; c < cfg.dimension; ++c) {
                double re, im;
                if (!(ss >> re >> im)) throw ConfigError("bad inline force entry: " + line);
                a[static_cast<std::size_t>(c)] = Complex{re, im};
            }
            f.set_coefficient(k, a);
            any = true;
        }
        if (!any) throw ConfigError("inline force lists no modes");
        return f;
    }
    throw ConfigError("unknown force spec: " + cfg.force);
}

namespace {

void write_meta(const std::string& path, const RunConfig& cfg, const ContinuationRun& run) {
    std::ofstream os(path);
    os << "force_hnorm = " << format_double(norm_h(run.g)) << "\n";
    os << "grashof_start = " << format_double(cfg.alpha_start * norm_h(run.g)) << "\n";
    os << "grashof_end = " << format_double(cfg.alpha_end * norm_h(run.g)) << "\n";
    os << "states = " << run.states.size() << "\n";
    os << "newton_tol = " << format_double(cfg.newton.tol) << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "truncated = " << (run.truncated ? 1 : 0) << "\n";
    if (!run.diagnostic.empty()) os << "diagnostic = " << run.diagnostic << "\n";
}

}  // namespace

int cmd_continue(const RunConfig& cfg) {
    auto space = ModeSet::ball(cfg.dimension, cfg.lambda);
    SpectralField g = load_force(cfg, space);
    const SpectralField* seed = nullptr;
    SpectralField seed_field;
    if (cfg.force == "manufactured" && cfg.alpha_start == 1.0) {
        seed_field = manufactured_pair(space).state;
        seed = &seed_field;
    }
    ContinuationRun run = continue_branch(g, cfg.alpha_start, cfg.alpha_end, cfg.steps, cfg.newton, seed);
    fs::create_directories(cfg.out);
    write_branch_csv(cfg.out + "/branch.csv", run);
    write_field(cfg.out + "/force.sf", g);
    if (cfg.snapshots)
        for (std::size_t i = 0; i < run.states.size(); ++i)
            write_field(cfg.out + "/state_" + std::to_string(i) + ".sf", run.states[i].v);
    write_meta(cfg.out + "/meta.txt", cfg, run);
    if (run.truncated) {
        std::cerr << "branch truncated: " << run.diagnostic << "\n";
        return 1;
    }
    return 0;
}

namespace {

struct BranchData {
    std::vector<double> alphas;
    std::vector<SpectralField> states;
    SpectralField g;
};

BranchData load_branch(const std::string& dir) {
    if (!fs::exists(dir + "/branch.csv")) throw ConfigError("missing branch data in " + dir);
    BranchData b;
    for (const auto& row : read_branch_csv(dir + "/branch.csv")) b.alphas.push_back(row.alpha);
    b.g = read_field(dir + "/force.sf");
    for (std::size_t i = 0; i < b.alphas.size(); ++i) {
        const std::string p = dir + "/state_" + std::to_string(i) + ".sf";
        if (!fs::exists(p)) throw ConfigError("missing state snapshot " + p);
        b.states.push_back(read_field(p));
    }
    return b;
}

}  // namespace

int cmd_expand(const std::string& branch_dir, const std::string& out_dir, int depth, const RunConfig& cfg) {
    BranchData b = load_branch(branch_dir);
    UnitaryExpansion exp = extract_expansion(b.states, depth, cfg.limits);
    fs::create_directories(out_dir);
    write_expansion(out_dir, exp, b.alphas);
    std::ofstream os(out_dir + "/kind.txt");
    os << to_string(exp.kind) << " depth=" << exp.depth << "\n";
    for (const auto& n : exp.notes) os << "note: " << n << "\n";
    if (exp.kind == ExpansionKind::trivial) std::cerr << "expansion is trivial\n";
    return 0;
}

int cmd_classify(const std::string& branch_dir, const std::string& expansion_dir, const std::string& out_dir,
                 int k_max, const RunConfig& cfg) {
    BranchData b = load_branch(branch_dir);
    if (!fs::exists(expansion_dir + "/gamma.csv")) throw ConfigError("missing expansion dump in " + expansion_dir);
    ExpansionDump dump = read_expansion(expansion_dir);
    SigmaTable table = build_sigma_table(dump.exp, b.alphas, k_max, cfg.compare);
    CaseReport report = classify_case(b.g, dump.exp, table, cfg.compare);

    fs::create_directories(out_dir);
    write_sigma_csv(out_dir + "/sigma.csv", table);
    const std::vector<std::pair<SigmaLabel, SigmaLabel>> pairs = {
        {SigmaLabel::sigma(1), SigmaLabel::sigma(0, 1)}, {SigmaLabel::sigma(1), SigmaLabel::sigma(0, 2)},
        {SigmaLabel::sigma(1, 1), SigmaLabel::sigma(0, 2)}, {SigmaLabel::sigma(2), SigmaLabel::sigma(1, 1)},
        {SigmaLabel::sigma(1, 2), SigmaLabel::sigma(2)}};
    write_ratio_csv(out_dir + "/ratios.csv", table, pairs);
    const OrderReport* order_ptr = nullptr;
    OrderReport order;
    if (table.fully_decided()) {
        order = ordinal_assign(table);
        order_ptr = &order;
    }
    write_case_report(out_dir + "/case_report.txt", report, order_ptr);
    return 0;
}

int cmd_construct(const RunConfig& cfg) {
    fs::create_directories(cfg.out);
    std::vector<double> alphas;
    double a = cfg.alpha_base;
    for (int i = 0; i < cfg.alpha_count; ++i) {
        a *= cfg.alpha_ratio;
        alphas.push_back(a);
    }
    if (cfg.construct == "vanishing") {
        auto space = ModeSet::ball(cfg.dimension, cfg.lambda);
        SpectralField u;
        if (cfg.u_seed == "example-pair") u = example_pair_field(space);
        else if (cfg.u_seed.rfind("file:", 0) == 0) u = read_field(cfg.u_seed.substr(5));
        else throw ConfigError("unknown u_seed: " + cfg.u_seed);
        VanishingPair vp;
        try {
            vp = vanishing_limit_pair(u, cfg.m_target, alphas);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        write_field(cfg.out + "/w_1.sf", vp.w1);
        write_field(cfg.out + "/h_1.sf", vp.h1);
        write_field(cfg.out + "/g.sf", vp.g);
        std::ofstream os(cfg.out + "/plan.txt");
        os << "m_target = " << format_double(cfg.m_target) << "\n";
        os << "g_hnorm = " << format_double(norm_h(vp.g)) << "\n";
        os << "case = vanishing\n";
        std::ofstream csv(cfg.out + "/eval.csv");
        csv << "n,alpha,residual,tail_bound\n";
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            SpectralField r = stokes_apply(vp.v[i]) - vp.gn[i];
            SpectralField b = bilinear_b(vp.v[i], vp.v[i]);
            b *= alphas[i];
            r += b;
            csv << (i + 1) << "," << format_double(alphas[i]) << "," << format_double(norm_h(r)) << ",0\n";
        }
        return 0;
    }
    if (cfg.construct != "plan") throw ConfigError("construct must be plan or vanishing");

    ModeSetPtr space;
    if (cfg.space == "zero-bs") {
        const WaveVector k = parse_wavevector(cfg.zero_bs_k, cfg.dimension);
        std::vector<WaveVector> k3;
        std::string body = cfg.zero_bs_k3;
        std::replace(body.begin(), body.end(), ';', '\n');
        std::istringstream is(body);
        std::string item;
        while (std::getline(is, item))
            if (item.find_first_not_of(" \t") != std::string::npos) k3.push_back(parse_wavevector(item, cfg.dimension));
        ZeroBsSpace zs;
        try {
            zs = zero_bs_subspace(k, cfg.zero_bs_m, k3);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        space = zs.space;
        std::ofstream os(cfg.out + "/space.txt");
        os << "max_bs = " << format_double(zs.max_bs) << "\nchecks = " << zs.checks << "\n";
    } else {
        space = ModeSet::ball(cfg.dimension, cfg.lambda);
    }

    SpectralField w0(space);
    if (cfg.w0.rfind("single-mode:", 0) == 0) {
        const WaveVector k = parse_wavevector(cfg.w0.substr(12), cfg.dimension);
        auto hit = space->find(k);
        if (!hit) throw ConfigError("seed mode " + k.str() + " is outside the space");
        std::mt19937_64 rng(cfg.seed ^ 0xabcdef12345ull);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::array<Complex, 3> aa{};
        for (int c = 0; c < cfg.dimension; ++c) aa[static_cast<std::size_t>(c)] = Complex{gauss(rng), gauss(rng)};
        w0.set_coefficient(k, aa);
        w0 = leray_project(w0);
        const double n = norm_h(w0);
        if (n == 0) throw ConfigError("seed mode admits no divergence-free coefficient");
        w0 *= 1.0 / n;
    } else if (cfg.w0.rfind("file:", 0) == 0) {
        w0 = read_field(cfg.w0.substr(5));
    } else {
        throw ConfigError("unknown w0 spec: " + cfg.w0);
    }

    ForceExpansionPlan plan;
    try {
        plan = build_force_expansion(w0, cfg.plan_m, cfg.plan_d0, cfg.plan_depth, cfg.seed);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    write_plan(cfg.out, plan);
    const int m_trunc = cfg.m_trunc < 0 ? plan.depth() : cfg.m_trunc;
    PlanEvaluation ev = evaluate_plan(plan, alphas, m_trunc);
    write_evaluation_csv(cfg.out + "/eval.csv", ev);
    return 0;
}

}  // namespace grashof
