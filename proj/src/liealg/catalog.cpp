#include "pesym/liealg/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pesym/common/keyvalue.hpp"
#include "pesym/symexpr/parse.hpp"

namespace pesym::liealg {

using namespace symexpr;

namespace {

Bindings numeric_bindings(const Point& params) {
    Bindings b;
    for (const auto& [name, value] : params) b[name] = num(value);
    return b;
}

Expr parse_simple(std::string_view s) { return simplify(symexpr::parse(s)); }

struct Triple {
    Expr D, F, G;
};

Triple parse_triple(std::string_view text) {
    auto parts = split(text, ';');
    if (parts.size() != 3) throw FormatError("expected 'D ; F ; G', got '" + std::string(text) + "'");
    return {parse_simple(parts[0]), parse_simple(parts[1]), parse_simple(parts[2])};
}

}  // namespace

Constraint Constraint::parse(std::string_view text) {
    static const char* ops[] = {"!=", "==", ">=", "<=", ">", "<"};
    for (const char* op : ops) {
        auto pos = text.find(op);
        if (pos == std::string_view::npos) continue;
        return {trim(text), parse_simple(text.substr(0, pos)), op,
                parse_simple(text.substr(pos + std::string_view(op).size()))};
    }
    throw FormatError("constraint needs a comparison: '" + std::string(text) + "'");
}

bool Constraint::holds(const Point& params) const {
    const double a = evaluate(lhs, params), b = evaluate(rhs, params);
    const double eps = 1e-12;
    if (op == "!=") return std::fabs(a - b) > eps;
    if (op == "==") return std::fabs(a - b) <= eps;
    if (op == ">") return a > b + eps;
    if (op == "<") return a < b - eps;
    if (op == ">=") return a >= b - eps;
    return a <= b + eps;
}

std::string CatalogEntry::id() const { return "T" + std::to_string(table) + "." + std::to_string(case_number); }

std::vector<std::string> CatalogEntry::param_names() const {
    std::vector<std::string> out;
    for (const auto& p : params) out.push_back(p.name);
    return out;
}

const std::vector<double>& default_param_domain() {
    static const std::vector<double> values{-1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0};
    return values;
}

CatalogEntry CatalogEntry::parse(std::string_view text, std::string origin) {
    const auto kv = KeyValueFile::parse(text, std::move(origin));
    CatalogEntry e;
    e.source = kv.origin();
    try {
        e.table = static_cast<int>(parse_double(kv.require("table")));
        e.case_number = static_cast<int>(parse_double(kv.require("case")));
        e.title = kv.get("title").value_or("");
        e.note = kv.get("note").value_or("");
        e.D = parse_simple(kv.require("D"));
        e.F = parse_simple(kv.require("F"));
        e.G = parse_simple(kv.require("G"));

        if (auto names = kv.get("params")) {
            for (const auto& n : split_ws(*names)) e.params.push_back({n, default_param_domain()});
        }
        for (const auto& line : kv.with_prefix("param")) {
            const std::string name = line.key.substr(6);
            std::vector<double> values;
            for (const auto& tok : split_ws(line.value)) values.push_back(parse_double(tok));
            if (values.empty()) kv.fail(line, "parameter '" + name + "' has no values");
            auto it = std::find_if(e.params.begin(), e.params.end(), [&](const auto& p) { return p.name == name; });
            if (it == e.params.end())
                e.params.push_back({name, values});
            else
                it->values = values;
        }
        for (const auto& c : kv.get_all("constraint")) e.constraints.push_back(Constraint::parse(c));
        if (auto f = kv.get("functions")) e.functions = split_ws(*f);
        if (auto f = kv.get("time_functions")) e.time_functions = split_ws(*f);
        for (const char* key : {"harmonic", "harmonic0"}) {
            for (const auto& h : kv.get_all(key)) {
                auto parts = split(h, ':');
                if (parts.size() != 2) throw FormatError(kv.origin() + ": expected 'symbol : alpha' in " + key);
                e.harmonics.push_back({parts[0], parse_simple(parts[1]), std::string(key) == "harmonic0"});
            }
        }
        for (const auto& g : kv.get_all("generator")) {
            e.generators.push_back(Generator::parse_tuple(g));
            e.generator_text.push_back(g);
        }
        e.negative_text = kv.require("negative");
        e.negative = Generator::parse_tuple(e.negative_text);
        if (auto p = kv.get("perturbed")) {
            auto t = parse_triple(*p);
            e.perturbed = PerturbedSystem{*p, t.D, t.F, t.G, static_cast<int>(parse_double(kv.require("perturbed_fails")))};
        }
        for (const auto& line : kv.lines()) {
            if (line.key != "printed") continue;
            auto colon = line.value.find(':');
            if (colon == std::string::npos) kv.fail(line, "expected 'index : generator'");
            int idx = static_cast<int>(parse_double(line.value.substr(0, colon)));
            if (idx < 1 || idx > static_cast<int>(e.generators.size()))
                kv.fail(line, "printed variant refers to generator " + std::to_string(idx));
            std::string tuple = trim(line.value.substr(colon + 1));
            e.printed.push_back({idx, Generator::parse_tuple(tuple), tuple});
        }
    } catch (const ParseError& err) {
        throw FormatError(kv.origin() + ": " + err.what());
    }
    if (e.generators.size() < 3) throw FormatError(kv.origin() + ": an entry lists at least three generators");
    return e;
}

CatalogEntry CatalogEntry::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

std::vector<CatalogEntry> load_catalog(const std::filesystem::path& dir) {
    std::vector<CatalogEntry> out;
    for (const char* sub : {"table1", "table2"}) {
        const auto d = dir / sub;
        if (!std::filesystem::is_directory(d)) throw FormatError("catalog directory missing: " + d.string());
        for (const auto& f : std::filesystem::directory_iterator(d))
            if (f.path().extension() == ".cat") out.push_back(CatalogEntry::load(f.path()));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::pair{a.table, a.case_number} < std::pair{b.table, b.case_number};
    });
    return out;
}

namespace {

/// Closed-form family for h_xx + a h + c = 0 with free time functions A, B.
Expr harmonic_family(double a, bool inhomogeneous, const std::string& A, const std::string& B) {
    const Expr x = var("x"), t = var("t");
    Expr s, c;
    if (a > 0) {
        s = sin(num(std::sqrt(a)) * x);
        c = cos(num(std::sqrt(a)) * x);
    } else if (a < 0) {
        s = exp(num(std::sqrt(-a)) * x);
        c = exp(num(-std::sqrt(-a)) * x);
    } else {
        s = x;
        c = num(1.0);
    }
    Expr h = func(A, 0, t) * s + func(B, 0, t) * c;
    if (inhomogeneous) h = h + (a != 0 ? num(-1.0 / a) : num(-0.5) * pow(x, 2.0));
    return h;
}

}  // namespace

Instance instantiate(const CatalogEntry& entry, const Point& params) {
    for (const auto& p : entry.params)
        if (!params.contains(p.name)) throw InvariantError(entry.id() + ": parameter " + p.name + " not set");
    for (const auto& c : entry.constraints)
        if (!c.holds(params)) throw InvariantError(entry.id() + ": constraint violated: " + c.text);

    Instance inst;
    inst.params = params;
    Bindings b = numeric_bindings(params);
    inst.time_symbols = entry.time_functions;
    for (const auto& h : entry.harmonics) {
        const double a = evaluate(substitute(h.alpha, b), params);
        const std::string A = h.symbol + "_A", B = h.symbol + "_B";
        b[h.symbol] = harmonic_family(a, h.inhomogeneous, A, B);
        inst.time_symbols.push_back(A);
        inst.time_symbols.push_back(B);
    }
    inst.system = PESystem{substitute(entry.D, b), substitute(entry.F, b), substitute(entry.G, b), 0};
    inst.system.validate();
    for (const auto& g : entry.generators) inst.generators.push_back(g.substituted(b));
    inst.negative = entry.negative.substituted(b);
    if (entry.perturbed)
        inst.perturbed = PESystem{substitute(entry.perturbed->D, b), substitute(entry.perturbed->F, b),
                                  substitute(entry.perturbed->G, b), 0};
    for (const auto& p : entry.printed) inst.printed.push_back(p.generator.substituted(b));
    for (const auto& g : inst.generators) g.validate();
    return inst;
}

Point sample_params(const CatalogEntry& entry, std::mt19937_64& rng, const Point& fixed) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Point p;
        for (const auto& spec : entry.params) {
            if (auto it = fixed.find(spec.name); it != fixed.end()) {
                p[spec.name] = it->second;
                continue;
            }
            std::uniform_int_distribution<std::size_t> pick(0, spec.values.size() - 1);
            p[spec.name] = spec.values[pick(rng)];
        }
        bool ok = true;
        for (const auto& c : entry.constraints) ok = ok && c.holds(p);
        if (ok) return p;
    }
    throw InvariantError(entry.id() + ": no parameter values satisfy the constraints");
}

FunctionTable standin_table(const CatalogEntry& entry, const Instance& inst, std::mt19937_64& rng, int which) {
    FunctionTable table;
    int i = 0;
    for (const auto& f : entry.functions) table[f] = random_standin(rng, which + i++);
    i = 0;
    for (const auto& s : inst.time_symbols) table[s] = time_sample((which + i++) % 3);
    return table;
}

}  // namespace pesym::liealg
