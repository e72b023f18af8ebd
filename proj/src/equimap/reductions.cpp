#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pesym/common/keyvalue.hpp"
#include "pesym/equimap/equimap.hpp"
#include "pesym/symexpr/parse.hpp"

namespace pesym::equimap {

using namespace symexpr;
using liealg::CatalogEntry;
using liealg::InvariantError;

namespace {

/// Printed tables use (tau, y, u, v) for the source; everything internal is (t, x, U, V).
const Bindings& canonical_names() {
    static const Bindings b{{"tau", var("t")}, {"y", var("x")}, {"u", var("U")}, {"v", var("V")}};
    return b;
}

Expr parse_source(std::string_view s) { return simplify(substitute(symexpr::parse(s), canonical_names())); }

std::pair<double, double> parse_window(const KeyValueFile& kv, std::string_view key, std::pair<double, double> dflt) {
    auto v = kv.get(key);
    if (!v) return dflt;
    auto parts = split_ws(*v);
    if (parts.size() != 2) throw FormatError(kv.origin() + ": " + std::string(key) + " needs two numbers");
    std::pair<double, double> w{parse_double(parts[0]), parse_double(parts[1])};
    if (!(w.first < w.second)) throw FormatError(kv.origin() + ": empty window in " + std::string(key));
    return w;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Point target_point(const ReductionEntry& e, const CatalogEntry& target, const Point& params) {
    Point out;
    for (const auto& spec : target.params) {
        auto it = std::find_if(e.target_params.begin(), e.target_params.end(),
                               [&](const auto& tp) { return tp.first == spec.name; });
        if (it != e.target_params.end()) {
            out[spec.name] = evaluate(it->second, params);
        } else if (auto p = params.find(spec.name); p != params.end()) {
            out[spec.name] = p->second;
        } else {
            throw InvariantError(e.id() + ": no value for target parameter " + spec.name);
        }
    }
    return out;
}

bool constraints_hold(const std::vector<liealg::Constraint>& cs, const Point& p) {
    return std::all_of(cs.begin(), cs.end(), [&](const auto& c) { return c.holds(p); });
}

Point sample(const ReductionEntry& e, const CatalogEntry& target, std::mt19937_64& rng, const Point& fixed,
             const std::vector<Point>& avoid) {
    Point fallback;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Point p;
        for (const auto& spec : e.params) {
            if (auto it = fixed.find(spec.name); it != fixed.end()) {
                p[spec.name] = it->second;
                continue;
            }
            std::uniform_int_distribution<std::size_t> pick(0, spec.values.size() - 1);
            p[spec.name] = spec.values[pick(rng)];
        }
        if (!constraints_hold(e.constraints, p)) continue;
        if (!constraints_hold(target.constraints, target_point(e, target, p))) continue;
        if (std::find(avoid.begin(), avoid.end(), p) == avoid.end() || attempt > 200) return p;
        fallback = p;
    }
    if (!fallback.empty() || e.params.empty()) return fallback;
    throw InvariantError(e.id() + ": no parameter values satisfy the constraints");
}

}  // namespace

std::string ReductionEntry::id() const {
    return "T" + std::to_string(table) + "." + std::to_string(case_number) + branch;
}

ReductionEntry ReductionEntry::parse(std::string_view text, std::string origin) {
    const auto kv = KeyValueFile::parse(text, std::move(origin));
    ReductionEntry e;
    e.source = kv.origin();
    try {
        e.table = static_cast<int>(parse_double(kv.require("table")));
        e.case_number = static_cast<int>(parse_double(kv.require("case")));
        e.branch = kv.get("branch").value_or("");
        e.title = kv.get("title").value_or("");
        e.D = parse_source(kv.require("D"));
        e.F = parse_source(kv.require("F"));
        e.G = parse_source(kv.require("G"));
        if (auto names = kv.get("params"))
            for (const auto& n : split_ws(*names)) e.params.push_back({n, liealg::default_param_domain()});
        for (const auto& line : kv.with_prefix("param")) {
            const std::string name = line.key.substr(6);
            std::vector<double> values;
            for (const auto& tok : split_ws(line.value)) values.push_back(parse_double(tok));
            if (values.empty()) kv.fail(line, "parameter '" + name + "' has no values");
            auto it = std::find_if(e.params.begin(), e.params.end(), [&](const auto& p) { return p.name == name; });
            if (it == e.params.end()) kv.fail(line, "parameter '" + name + "' is not declared in params");
            it->values = values;
        }
        for (const auto& c : kv.get_all("constraint")) e.constraints.push_back(liealg::Constraint::parse(c));
        if (auto f = kv.get("functions")) e.functions = split_ws(*f);

        const std::string mt = kv.get("new_t").value_or("tau");
        const std::string mx = kv.get("new_x").value_or("y");
        const std::string mu = kv.get("new_U").value_or("u");
        const std::string mv = kv.get("new_V").value_or("v");
        e.map = {parse_source(mt), parse_source(mx), parse_source(mu), parse_source(mv)};
        e.map_text = "t = " + mt + ", x = " + mx + ", U = " + mu + ", V = " + mv;
        e.window_x = parse_window(kv, "window_y", e.window_x);
        e.window_t = parse_window(kv, "window_tau", e.window_t);

        auto target = split_ws(kv.require("target"));
        if (target.size() != 2) throw FormatError(kv.origin() + ": target is 'table case'");
        e.target_table = static_cast<int>(parse_double(target[0]));
        e.target_case = static_cast<int>(parse_double(target[1]));
        for (const auto& line : kv.with_prefix("target_param"))
            e.target_params.emplace_back(trim(line.key.substr(13)), parse_source(line.value));
    } catch (const ParseError& err) {
        throw FormatError(kv.origin() + ": " + err.what());
    }
    if (e.table != 3 && e.table != 4) throw FormatError(kv.origin() + ": reduction tables are 3 and 4");
    if (e.target_table != e.table - 2) throw FormatError(kv.origin() + ": target must lie in table " + std::to_string(e.table - 2));
    return e;
}

ReductionEntry ReductionEntry::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

std::vector<ReductionEntry> load_reductions(const std::filesystem::path& dir) {
    std::vector<ReductionEntry> out;
    for (const char* sub : {"table3", "table4"}) {
        const auto d = dir / sub;
        if (!std::filesystem::is_directory(d)) throw FormatError("catalog directory missing: " + d.string());
        for (const auto& f : std::filesystem::directory_iterator(d))
            if (f.path().extension() == ".red") out.push_back(ReductionEntry::load(f.path()));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tuple{a.table, a.case_number, a.branch} < std::tuple{b.table, b.case_number, b.branch};
    });
    return out;
}

const CatalogEntry& find_entry(const std::vector<CatalogEntry>& catalog, int table, int case_number) {
    for (const auto& c : catalog)
        if (c.table == table && c.case_number == case_number) return c;
    throw InvariantError("catalog has no entry T" + std::to_string(table) + "." + std::to_string(case_number));
}

ReductionInstance instantiate_reduction(const ReductionEntry& e, const CatalogEntry& target, const Point& params) {
    for (const auto& p : e.params)
        if (!params.contains(p.name)) throw InvariantError(e.id() + ": parameter " + p.name + " not set");
    for (const auto& c : e.constraints)
        if (!c.holds(params)) throw InvariantError(e.id() + ": constraint violated: " + c.text);
    Bindings b;
    for (const auto& [name, value] : params) b[name] = num(value);
    ReductionInstance inst;
    inst.params = params;
    inst.source = PESystem{substitute(e.D, b), substitute(e.F, b), substitute(e.G, b), 0};
    inst.source.validate();
    inst.map = {simplify(substitute(e.map.t, b)), simplify(substitute(e.map.x, b)), simplify(substitute(e.map.U, b)),
                simplify(substitute(e.map.V, b))};
    inst.target = liealg::instantiate(target, target_point(e, target, params));
    return inst;
}

JetContext reduction_context(const ReductionEntry& e, const FunctionTable& functions) {
    JetContext ctx = JetContext::standard();
    ctx.functions = functions;
    ctx.windows["x"] = e.window_x;
    ctx.windows["t"] = e.window_t;
    return ctx;
}

bool ReductionReport::ok() const {
    return !records.empty() && std::all_of(records.begin(), records.end(), [](const auto& r) { return r.ok; });
}

ReductionReport verify_reduction(const ReductionEntry& e, const std::vector<CatalogEntry>& catalog,
                                 const ReductionOptions& opt) {
    const CatalogEntry& target = find_entry(catalog, e.target_table, e.target_case);
    ReductionReport report{e.id(), target.id(), {}};
    std::mt19937_64 rng(opt.seed ^ fnv1a(e.id()));
    std::vector<Point> used;
    for (int i = 0; i < opt.instantiations; ++i) {
        const Point params = sample(e, target, rng, opt.fixed_params, used);
        used.push_back(params);
        const auto inst = instantiate_reduction(e, target, params);

        ReductionRecord rec;
        rec.instantiation = i + 1;
        rec.params = params;
        rec.target_params = inst.target.params;

        const auto pushed = push_system(inst.source, inst.map, inst.target.system);
        const auto fp = fp_constraint_residuals(inst.map.form_preserving(), inst.source, inst.target.system);
        std::vector<bool> fp_zero(fp.size(), true);
        for (int s = 0; s < opt.standins; ++s) {
            FunctionTable fns;
            int k = 0;
            for (const auto& f : e.functions) fns[f] = random_standin(rng, s + k++);
            const JetContext ctx = reduction_context(e, fns);
            ZeroTestOptions zo;
            zo.trials = opt.trials;
            zo.tol = opt.tol;
            zo.seed = rng();
            for (const auto& r : is_zero_all({pushed.s1, pushed.s2}, ctx, zo)) {
                rec.push_zero = rec.push_zero && r.zero;
                if (r.worst_ratio >= rec.push_worst) {
                    rec.push_worst = r.worst_ratio;
                    rec.witness = r.witness;
                }
            }
            const auto fr = is_zero_all(fp, ctx, zo);
            for (std::size_t j = 0; j < fr.size(); ++j) {
                fp_zero[j] = fp_zero[j] && fr[j].zero;
                rec.constraints_worst = std::max(rec.constraints_worst, fr[j].worst_ratio);
            }
        }
        for (std::size_t j = 0; j < fp_zero.size(); ++j)
            if (!fp_zero[j]) rec.failed_constraints.push_back(static_cast<int>(j) + 1);
        rec.constraints_zero = rec.failed_constraints.empty();

        // Invertibility: the Jacobian stays away from zero across the window.
        const Expr J = jacobian(inst.map);
        rec.min_jacobian = INFINITY;
        std::uniform_real_distribution<double> ux(e.window_x.first, e.window_x.second),
            ut(e.window_t.first, e.window_t.second), uf(0.3, 2.0);
        for (int s = 0; s < 24; ++s) {
            Point pt{{"t", ut(rng)}, {"x", ux(rng)}, {"U", uf(rng)}, {"V", uf(rng)}};
            rec.min_jacobian = std::min(rec.min_jacobian, std::fabs(evaluate(J, pt)));
        }
        rec.ok = rec.push_zero && rec.constraints_zero && rec.min_jacobian > 1e-12;
        report.records.push_back(std::move(rec));
    }
    return report;
}

}  // namespace pesym::equimap
