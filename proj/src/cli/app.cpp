#include <CLI11.hpp>

#include <filesystem>
#include <ostream>
#include <sstream>

#include "commands.hpp"
#include "pesym/common/keyvalue.hpp"
#include "pesym/fbsolve/fbsolve.hpp"
#include "pesym/simred/ode.hpp"
#include "pesym/symexpr/parse.hpp"

#ifndef PESYM_CATALOG_DIR
#define PESYM_CATALOG_DIR "catalog"
#endif

namespace pesym::cli {

Settings::Settings(RunManifest& manifest, const std::optional<std::string>& config_path, std::set<std::string> allowed)
    : manifest_(manifest) {
    if (!config_path) return;
    if (!std::filesystem::is_regular_file(*config_path)) throw UsageError("config file not found: " + *config_path);
    const auto kv = KeyValueFile::read(*config_path);
    for (const auto& line : kv.lines()) {
        if (!allowed.count(line.key)) kv.fail(line, "unknown setting '" + line.key + "' for " + manifest.command);
        config_[line.key] = line.value;
    }
    manifest_.set("config", std::filesystem::path(*config_path).filename().string());
    manifest_.add_digest(*config_path, "config");
}

std::optional<std::string> Settings::lookup(const std::string& key) const {
    const auto it = config_.find(key);
    if (it == config_.end()) return std::nullopt;
    return it->second;
}

double Settings::number(const std::string& key, const std::optional<double>& flag, double fallback) {
    double v = fallback;
    if (flag)
        v = *flag;
    else if (const auto c = lookup(key))
        v = parse_double(*c);
    manifest_.set(key, v);
    return v;
}

int Settings::integer(const std::string& key, const std::optional<int>& flag, int fallback) {
    int v = fallback;
    if (flag) {
        v = *flag;
    } else if (const auto c = lookup(key)) {
        const double d = parse_double(*c);
        if (d != static_cast<int>(d)) throw UsageError("setting '" + key + "' must be an integer");
        v = static_cast<int>(d);
    }
    manifest_.set(key, std::to_string(v));
    return v;
}

std::uint64_t Settings::seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
    std::uint64_t v = fallback;
    if (flag) {
        v = *flag;
    } else if (const auto c = lookup("seed")) {
        try {
            v = std::stoull(*c);
        } catch (const std::exception&) {
            throw UsageError("setting 'seed' must be a non-negative integer");
        }
    }
    manifest_.seed = v;
    return v;
}

std::string Settings::text(const std::string& key, const std::optional<std::string>& flag, const std::string& fallback) {
    auto v = text(key, flag);
    if (!v) {
        manifest_.set(key, fallback);
        return fallback;
    }
    return *v;
}

std::optional<std::string> Settings::text(const std::string& key, const std::optional<std::string>& flag) {
    std::optional<std::string> v = flag ? flag : lookup(key);
    if (v) manifest_.set(key, *v);
    return v;
}

std::set<std::string> model_keys() { return {"m", "n", "alpha_s", "c_inf", "omega0", "q0", "beta"}; }

simred::ModelParams resolve_model(Settings& s, const ModelFlags& f, simred::ModelParams d) {
    simred::ModelParams p;
    p.m = s.number("m", f.m, d.m);
    p.n = s.integer("n", f.n, d.n);
    p.alpha_s = s.number("alpha_s", f.alpha_s, d.alpha_s);
    p.c_inf = s.number("c_inf", f.c_inf, d.c_inf);
    p.omega0 = s.number("omega0", f.omega0, d.omega0);
    p.q0 = s.number("q0", f.q0, d.q0);
    p.beta = s.number("beta", f.beta, d.beta);
    try {
        p.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    return p;
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw UsageError("cannot write " + (dir / name).string());
    f.precision(17);
    return f;
}

namespace {

void add_model(CLI::App* sub, ModelFlags& f) {
    sub->add_option("--m", f.m, "Diffusion exponent (D = alpha^m)");
    sub->add_option("--n", f.n, "Geometry: 0 planar, 1 cylindrical, 2 spherical")->check(CLI::Range(0, 2));
    sub->add_option("--alpha-s", f.alpha_s, "Far-field cell density alpha_*");
    sub->add_option("--c-inf", f.c_inf, "Far-field nutrient concentration");
    sub->add_option("--omega0", f.omega0, "Front position in the similarity variable");
    sub->add_option("--q0", f.q0, "Nutrient uptake rate");
    sub->add_option("--beta", f.beta, "Exponent of (c_inf - c) in the sources");
}

void add_config(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "Plain-text key = value settings (flags take precedence)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lie symmetry verification and moving-boundary solver for parabolic-elliptic systems", "pesym"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(PESYM_VERSION));

    CatalogCmd cat;
    cat.catalog_dir = PESYM_CATALOG_DIR;
    auto* c0 = app.add_subcommand("catalog", "List the symmetry tables and the reduction rows");
    c0->add_option("--catalog", cat.catalog_dir, "Catalog directory");
    c0->add_flag("--json", cat.json, "One JSON object per entry");

    SymmetriesCmd sym;
    sym.catalog_dir = PESYM_CATALOG_DIR;
    auto* c1 = app.add_subcommand("verify-symmetries", "Check listed generators against their systems");
    add_config(c1, sym.common);
    c1->add_option("--catalog", sym.catalog_dir, "Catalog directory");
    c1->add_option("--table", sym.table, "Table number (1 or 2)")->check(CLI::Range(1, 2));
    c1->add_option("--case", sym.case_number, "Case number within the table");
    c1->add_flag("--all", sym.all, "Every entry");
    c1->add_flag("--negative", sym.negative, "Report only the negative controls");
    c1->add_option("--seed", sym.seed, "Random seed");
    c1->add_option("--trials", sym.trials, "Sample points per zero test")->check(CLI::PositiveNumber);
    c1->add_option("--instantiations", sym.instantiations, "Parameter draws per entry")->check(CLI::PositiveNumber);
    c1->add_option("--out", sym.out, "Write the JSON lines report here instead of stdout");

    TransformsCmd tr;
    tr.catalog_dir = PESYM_CATALOG_DIR;
    auto* c2 = app.add_subcommand("verify-transforms", "Check reduction rows and the equivalence group");
    add_config(c2, tr.common);
    c2->add_option("--catalog", tr.catalog_dir, "Catalog directory");
    c2->add_option("--table", tr.table, "Table number (3 or 4)")->check(CLI::Range(3, 4));
    c2->add_option("--case", tr.case_number, "Case number within the table");
    c2->add_option("--branch", tr.branch, "Sub-branch: a, b, or a parameter condition such as alpha=0");
    c2->add_flag("--all", tr.all, "Every row and the equivalence group");
    c2->add_flag("--equivalence", tr.equivalence, "Only the equivalence group scaling check");
    c2->add_option("--seed", tr.seed, "Random seed");
    c2->add_option("--trials", tr.trials, "Sample points per zero test")->check(CLI::PositiveNumber);
    c2->add_option("--instantiations", tr.instantiations, "Parameter draws per row")->check(CLI::PositiveNumber);
    c2->add_option("--out", tr.out, "Write the JSON lines report here instead of stdout");

    ReduceCmd red;
    auto* c3 = app.add_subcommand("reduce", "Similarity profiles: closed form or shooting");
    add_config(c3, red.common);
    add_model(c3, red.model);
    c3->add_option("--mode", red.mode, "exact or shoot")->check(CLI::IsMember({"exact", "shoot"}));
    c3->add_option("--points", red.points, "Profile grid size")->check(CLI::Range(2, 1000000));
    c3->add_flag("--cubic", red.cubic, "Use the cubic source (m = 0 only)");
    c3->add_option("--guess-phi0", red.guess_phi0, "Shooting guess for phi(0)");
    c3->add_option("--guess-psi0", red.guess_psi0, "Shooting guess for psi(0)");
    c3->add_option("--guess-omega0", red.guess_omega0, "Shooting guess for the front");
    c3->add_option("--out-dir", red.out_dir, "Output directory");

    SimulateCmd sim;
    auto* c4 = app.add_subcommand("simulate", "Front-fixing solution of the moving-boundary problem");
    add_config(c4, sim.common);
    add_model(c4, sim.model);
    c4->add_option("--N", sim.N, "Grid intervals")->check(CLI::Range(16, 100000));
    c4->add_option("--sigma", sim.sigma, "Safety factor on the step size");
    c4->add_option("--t0", sim.t0, "Start time (exact data)");
    c4->add_option("--t-end", sim.t_end, "Final time");
    c4->add_option("--output-every", sim.output_every, "Snapshot spacing in t (0: first and last)");
    c4->add_option("--source", sim.source, "exact, cubic or expr")->check(CLI::IsMember({"exact", "cubic", "expr"}));
    c4->add_option("--S", sim.S, "Cell source in alpha and c (with --source expr)");
    c4->add_option("--Q", sim.Q, "Nutrient uptake in alpha and c (with --source expr)");
    c4->add_option("--ladder", sim.ladder, "Comma-separated grid sizes for a convergence ladder");
    c4->add_option("--out-dir", sim.out_dir, "Output directory");

    FiguresCmd fig;
    auto* c5 = app.add_subcommand("figures", "Plot-ready CSV data for the five figures");
    add_config(c5, fig.common);
    add_model(c5, fig.model);
    c5->add_option("which", fig.which, "Figure number")->required()->check(CLI::Range(1, 5));
    c5->add_option("--t-min", fig.t_min, "First time level");
    c5->add_option("--t-max", fig.t_max, "Last time level");
    c5->add_option("--x-max", fig.x_max, "Right end of the spatial grid");
    c5->add_option("--nt", fig.nt, "Time levels")->check(CLI::Range(2, 100000));
    c5->add_option("--nx", fig.nx, "Spatial nodes")->check(CLI::Range(2, 100000));
    c5->add_option("--out-dir", fig.out_dir, "Output directory");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ExitPass : ExitUsage;
    }

    try {
        if (c0->parsed()) return cmd_catalog(cat, out);
        if (c1->parsed()) return cmd_verify_symmetries(sym, out, err);
        if (c2->parsed()) return cmd_verify_transforms(tr, out, err);
        if (c3->parsed()) return cmd_reduce(red, out, err);
        if (c4->parsed()) return cmd_simulate(sim, out, err);
        if (c5->parsed()) return cmd_figures(fig, out, err);
    } catch (const cli::UsageError& e) {
        err << "error: " << e.what() << '\n';
        return ExitUsage;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return ExitUsage;
    } catch (const symexpr::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return ExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return ExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return ExitUsage;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return ExitFailure;
    }
    return ExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace pesym::cli
