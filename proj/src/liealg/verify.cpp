#include "pesym/liealg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>

namespace pesym::liealg {

using namespace symexpr;

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct StandinOutcome {
    bool zero = true;
    double ratio = 0.0;
    double value = 0.0;
    Point witness;
};

/// Joint zero test of several residuals under one stand-in table; the outcome
/// reports the residual whose ratio peaked.
StandinOutcome test_all(const std::vector<Expr>& residuals, const FunctionTable& fns, const VerifyOptions& opt,
                        std::uint64_t seed) {
    JetContext ctx = JetContext::standard();
    ctx.functions = fns;
    ZeroTestOptions zo;
    zo.trials = opt.trials;
    zo.tol = opt.tol;
    zo.seed = seed;
    StandinOutcome out;
    bool first = true;
    for (const auto& r : is_zero_all(residuals, ctx, zo)) {
        out.zero = out.zero && r.zero;
        if (first || r.worst_ratio > out.ratio) {
            out.ratio = r.worst_ratio;
            out.value = r.worst_value;
            out.witness = r.witness;
            first = false;
        }
    }
    return out;
}

bool determining_applies(const PESystem& sys) { return sys.radial == 0 && !pdiff(sys.D, "U").is_number(0.0); }

GeneratorRecord check_generator(const PESystem& sys, const Generator& g, const std::vector<FunctionTable>& tables,
                                const VerifyOptions& opt, std::uint64_t seed) {
    GeneratorRecord rec;
    const auto inv = invariance_residuals(sys, g);
    std::vector<DeterminingResidual> det;
    const bool has_det = determining_applies(sys);
    if (has_det) det = determining_residuals(sys, g);

    rec.min_failure = INFINITY;
    bool agree = true, det_zero = true;
    std::set<std::string> det_failed;
    for (std::size_t j = 0; j < tables.size(); ++j) {
        const std::uint64_t s = seed + 7919 * j;
        auto o = test_all({inv.s1, inv.s2}, tables[j], opt, s);
        rec.invariance_zero = rec.invariance_zero && o.zero;
        if (j == 0 || o.ratio > rec.worst_ratio) {
            rec.worst_ratio = o.ratio;
            rec.worst_value = o.value;
            rec.witness = o.witness;
        }
        rec.min_failure = std::min(rec.min_failure, std::fabs(o.value));
        if (has_det) {
            std::vector<Expr> residuals;
            for (const auto& d : det) residuals.push_back(d.residual);
            JetContext ctx = JetContext::standard();
            ctx.functions = tables[j];
            ZeroTestOptions zo{opt.trials, opt.tol, s, 50};
            auto results = is_zero_all(residuals, ctx, zo);
            bool all = true;
            for (std::size_t k = 0; k < results.size(); ++k) {
                if (results[k].zero) continue;
                all = false;
                det_failed.insert("(" + std::to_string(det[k].equation) + ")" +
                                  (det[k].label.empty() ? "" : " " + det[k].label));
            }
            det_zero = det_zero && all;
            agree = agree && (all == o.zero);
        }
    }
    if (has_det) {
        rec.determining_zero = det_zero;
        rec.determining_failures.assign(det_failed.begin(), det_failed.end());
        rec.agreement = agree;
    }
    return rec;
}

void judge(GeneratorRecord& r, const VerifyOptions& opt) {
    if (r.kind == GeneratorRecord::Kind::Printed)
        r.ok = !r.invariance_zero && r.agreement.value_or(true);
    else if (r.expected_pass)
        r.ok = r.invariance_zero && r.determining_zero.value_or(true) && r.agreement.value_or(true);
    else
        r.ok = !r.invariance_zero && r.min_failure > opt.negative_threshold && r.agreement.value_or(true);
}

}  // namespace

std::string kind_name(GeneratorRecord::Kind k) {
    switch (k) {
        case GeneratorRecord::Kind::Listed: return "listed";
        case GeneratorRecord::Kind::Negative: return "negative";
        case GeneratorRecord::Kind::PerturbedSystem: return "perturbed-system";
        case GeneratorRecord::Kind::Printed: return "printed-erratum";
        case GeneratorRecord::Kind::Combination: return "combination";
    }
    return "?";
}

EntryReport verify_catalog_entry(const CatalogEntry& entry, const VerifyOptions& opt) {
    if (opt.instantiations < 2) throw std::invalid_argument("verification needs at least two instantiations");
    if (opt.standins < 1) throw std::invalid_argument("verification needs at least one stand-in");
    EntryReport report{entry.id(), entry.table, entry.case_number, {}};
    const std::uint64_t base_seed = opt.seed ^ fnv1a(entry.id());
    std::mt19937_64 rng(base_seed);
    std::vector<Point> seen;

    for (int i = 0; i < opt.instantiations; ++i) {
        Point params = sample_params(entry, rng, opt.fixed_params);
        for (int retry = 0; retry < 20 && std::find(seen.begin(), seen.end(), params) != seen.end(); ++retry)
            params = sample_params(entry, rng, opt.fixed_params);
        seen.push_back(params);
        const Instance inst = instantiate(entry, params);

        std::vector<FunctionTable> tables;
        for (int j = 0; j < opt.standins; ++j) tables.push_back(standin_table(entry, inst, rng, j));

        InstantiationReport ir{i, params, {}, {}};
        const std::uint64_t seed = base_seed + 1000003ull * static_cast<std::uint64_t>(i + 1);
        auto add = [&](GeneratorRecord r, GeneratorRecord::Kind kind, int index, std::string text, bool expected) {
            r.kind = kind;
            r.index = index;
            r.text = std::move(text);
            r.expected_pass = expected;
            judge(r, opt);
            ir.records.push_back(std::move(r));
        };

        for (std::size_t k = 0; k < inst.generators.size(); ++k)
            add(check_generator(inst.system, inst.generators[k], tables, opt, seed), GeneratorRecord::Kind::Listed,
                static_cast<int>(k + 1), entry.generator_text[k], true);

        add(check_generator(inst.system, inst.negative, tables, opt, seed), GeneratorRecord::Kind::Negative, 0,
            entry.negative_text, false);

        if (inst.perturbed) {
            const int idx = entry.perturbed->fails;
            add(check_generator(*inst.perturbed, inst.generators.at(idx - 1), tables, opt, seed),
                GeneratorRecord::Kind::PerturbedSystem, idx, entry.perturbed->text, false);
        }
        for (std::size_t k = 0; k < inst.printed.size(); ++k)
            add(check_generator(inst.system, inst.printed[k], tables, opt, seed), GeneratorRecord::Kind::Printed,
                entry.printed[k].replaces, entry.printed[k].text, false);

        std::uniform_real_distribution<double> coef(0.5, 2.0);
        Generator combo{num(0.0), num(0.0), num(0.0), num(0.0)};
        std::string text;
        for (std::size_t k = 0; k < inst.generators.size(); ++k) {
            double c = coef(rng) * (rng() % 2 ? 1.0 : -1.0);
            combo = combo + inst.generators[k].scaled(num(c));
            text += (k ? " + " : "") + std::to_string(c) + " X" + std::to_string(k + 1);
        }
        add(check_generator(inst.system, combo, tables, opt, seed), GeneratorRecord::Kind::Combination, 0, text,
            true);

        if (opt.closure) ir.closure = check_closure(entry, inst, seed);
        report.instantiations.push_back(std::move(ir));
    }
    return report;
}

bool EntryReport::listed_pass() const {
    for (const auto& i : instantiations)
        for (const auto& r : i.records)
            if ((r.kind == GeneratorRecord::Kind::Listed || r.kind == GeneratorRecord::Kind::Combination) &&
                !r.invariance_zero)
                return false;
    return !instantiations.empty();
}

bool EntryReport::negatives_fail() const {
    for (const auto& i : instantiations)
        for (const auto& r : i.records)
            if ((r.kind == GeneratorRecord::Kind::Negative || r.kind == GeneratorRecord::Kind::PerturbedSystem) && !r.ok)
                return false;
    return true;
}

bool EntryReport::determining_agree() const {
    for (const auto& i : instantiations)
        for (const auto& r : i.records) {
            if (r.agreement && !*r.agreement) return false;
            if (r.expected_pass && r.determining_zero && !*r.determining_zero) return false;
        }
    return true;
}

bool EntryReport::closure_ok() const {
    for (const auto& i : instantiations)
        for (const auto& c : i.closure)
            if (!c.ok) return false;
    return true;
}

namespace {

void collect_orders(const Expr& e, std::map<std::string, int>& max_order) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Sum>) {
                for (const auto& t : n.terms) collect_orders(t, max_order);
            } else if constexpr (std::is_same_v<T, Product>) {
                for (const auto& t : n.factors) collect_orders(t, max_order);
            } else if constexpr (std::is_same_v<T, Power>) {
                collect_orders(n.base, max_order);
                collect_orders(n.exponent, max_order);
            } else if constexpr (std::is_same_v<T, Neg> || std::is_same_v<T, Call>) {
                collect_orders(n.arg, max_order);
            } else if constexpr (std::is_same_v<T, Quotient>) {
                collect_orders(n.num, max_order);
                collect_orders(n.den, max_order);
            } else if constexpr (std::is_same_v<T, FuncApp>) {
                auto [it, inserted] = max_order.try_emplace(n.name, n.order);
                if (!inserted) it->second = std::max(it->second, n.order);
                collect_orders(n.arg, max_order);
            }
        },
        static_cast<const Node::variant&>(e.node()));
}

std::array<Expr, 4> components(const Generator& g) { return {g.xi0, g.xi1, g.eta1, g.eta2}; }

FunctionBinding zero_binding() {
    return [](int, double) { return 0.0; };
}
FunctionBinding unit_binding(int o) {
    return [o](int order, double) { return order == o ? 1.0 : 0.0; };
}

}  // namespace

std::vector<ClosureRecord> check_closure(const CatalogEntry& entry, const Instance& inst, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0xc105u);
    const std::set<std::string> tsyms(inst.time_symbols.begin(), inst.time_symbols.end());

    // Arbitrary functions never appear in generators, but bind them anyway so evaluation cannot fail.
    FunctionTable common;
    for (std::size_t i = 0; i < entry.functions.size(); ++i) common[entry.functions[i]] = random_standin(rng, static_cast<int>(i));

    constexpr int slices = 4, per_slice = 8;
    std::vector<Point> points;
    std::vector<int> slice_of;
    std::uniform_real_distribution<double> u(0.3, 2.0);
    for (int s = 0; s < slices; ++s) {
        const double t = 0.3 + (2.0 - 0.3) * (s + 0.5) / slices;
        for (int k = 0; k < per_slice; ++k) {
            points.push_back({{"t", t}, {"x", u(rng)}, {"U", u(rng)}, {"V", u(rng)}});
            slice_of.push_back(s);
        }
    }

    struct Basis {
        Generator g;
        FunctionTable plus;
        std::optional<FunctionTable> minus;
        bool sliced;
    };
    std::vector<Basis> basis;
    struct Member {
        Generator g;
        FunctionTable fns;
        std::string label;
    };
    std::vector<Member> members;

    for (std::size_t k = 0; k < inst.generators.size(); ++k) {
        const auto& g = inst.generators[k];
        std::map<std::string, int> orders;
        for (const auto& c : components(g)) collect_orders(c, orders);
        std::vector<std::string> syms;
        for (const auto& [name, o] : orders)
            if (tsyms.contains(name)) syms.push_back(name);

        const std::string label = "X" + std::to_string(k + 1);
        if (syms.empty()) {
            basis.push_back({g, common, std::nullopt, false});
            members.push_back({g, common, label});
            continue;
        }
        FunctionTable zero = common;
        for (const auto& s : syms) zero[s] = zero_binding();
        basis.push_back({g, zero, std::nullopt, false});
        for (const auto& s : syms) {
            for (int o = 0; o <= orders[s]; ++o) {
                FunctionTable unit = zero;
                unit[s] = unit_binding(o);
                basis.push_back({g, unit, zero, true});
            }
        }
        for (int which = 0; which < 3; ++which) {
            FunctionTable fns = common;
            int i = 0;
            for (const auto& s : syms) fns[s] = time_sample((which + i++) % 3);
            members.push_back({g, fns, label + "[" + time_sample_label(which) + "]"});
        }
    }

    // Column layout: unsliced basis elements get one column, sliced ones one per slice.
    std::vector<std::pair<int, int>> cols;  // (basis index, slice or -1)
    for (std::size_t b = 0; b < basis.size(); ++b) {
        if (!basis[b].sliced)
            cols.push_back({static_cast<int>(b), -1});
        else
            for (int s = 0; s < slices; ++s) cols.push_back({static_cast<int>(b), s});
    }

    const int rows = static_cast<int>(points.size()) * 4;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, static_cast<int>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto& [bi, slice] = cols[c];
        const auto& b = basis[bi];
        const auto comps = components(b.g);
        for (std::size_t p = 0; p < points.size(); ++p) {
            if (slice >= 0 && slice_of[p] != slice) continue;
            for (int q = 0; q < 4; ++q) {
                double v = evaluate(comps[q], points[p], b.plus);
                if (b.minus) v -= evaluate(comps[q], points[p], *b.minus);
                A(static_cast<int>(p) * 4 + q, static_cast<int>(c)) = v;
            }
        }
    }
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> solver(A);

    // Members carry their own bindings; a commutator of two members needs both tables.
    std::vector<ClosureRecord> out;
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            // Rename the second member's time functions so both bindings coexist.
            FunctionTable fns = members[a].fns;
            FunctionRenames rename;
            for (const auto& [name, fn] : members[b].fns) {
                if (!tsyms.contains(name)) continue;
                rename[name] = name + "__2";
                fns[name + "__2"] = fn;
            }
            Generator gb = members[b].g;
            if (!rename.empty())
                gb = {rename_functions(gb.xi0, rename), rename_functions(gb.xi1, rename),
                      rename_functions(gb.eta1, rename), rename_functions(gb.eta2, rename)};
            ClosureRecord rec;
            rec.pair = "[" + members[a].label + ", " + members[b].label + "]";
            const auto comm = commutator(members[a].g, gb);
            rec.in_class = comm.in_class;
            if (!comm.in_class) {
                rec.residual = INFINITY;
                out.push_back(rec);
                continue;
            }
            Eigen::VectorXd rhs(rows);
            const auto comps = components(comm.value);
            for (std::size_t p = 0; p < points.size(); ++p)
                for (int q = 0; q < 4; ++q) rhs(static_cast<int>(p) * 4 + q) = evaluate(comps[q], points[p], fns);
            const Eigen::VectorXd coef = solver.solve(rhs);
            rec.residual = (A * coef - rhs).norm() / (1.0 + rhs.norm());
            rec.ok = rec.residual < 1e-8;
            out.push_back(rec);
        }
    }
    return out;
}

std::vector<nlohmann::json> to_json_lines(const EntryReport& report) {
    std::vector<nlohmann::json> out;
    for (const auto& inst : report.instantiations) {
        nlohmann::json params = nlohmann::json::object();
        for (const auto& [k, v] : inst.params) params[k] = v;
        for (const auto& r : inst.records) {
            nlohmann::json j;
            j["entry"] = report.id;
            j["table"] = report.table;
            j["case"] = report.case_number;
            j["instantiation"] = inst.index;
            j["params"] = params;
            j["kind"] = kind_name(r.kind);
            j["index"] = r.index;
            j["generator"] = r.text;
            j["expected"] = r.expected_pass ? "pass" : "fail";
            j["invariance_zero"] = r.invariance_zero;
            j["worst_ratio"] = r.worst_ratio;
            j["worst_value"] = r.worst_value;
            if (!r.invariance_zero) {
                nlohmann::json w = nlohmann::json::object();
                for (const auto& [k, v] : r.witness) w[k] = v;
                j["witness"] = w;
            }
            j["determining_zero"] = r.determining_zero ? nlohmann::json(*r.determining_zero) : nlohmann::json();
            j["determining_failures"] = r.determining_failures;
            j["agreement"] = r.agreement ? nlohmann::json(*r.agreement) : nlohmann::json();
            j["ok"] = r.ok;
            out.push_back(std::move(j));
        }
        if (!inst.closure.empty()) {
            nlohmann::json j;
            j["entry"] = report.id;
            j["table"] = report.table;
            j["case"] = report.case_number;
            j["instantiation"] = inst.index;
            j["params"] = params;
            j["kind"] = "closure";
            double worst = 0.0;
            bool ok = true;
            nlohmann::json failures = nlohmann::json::array();
            for (const auto& c : inst.closure) {
                worst = std::max(worst, c.residual);
                ok = ok && c.ok;
                if (!c.ok) failures.push_back({{"pair", c.pair}, {"in_class", c.in_class}, {"residual", c.residual}});
            }
            j["pairs"] = inst.closure.size();
            j["worst_residual"] = worst;
            j["failures"] = failures;
            j["ok"] = ok;
            out.push_back(std::move(j));
        }
    }
    return out;
}

}  // namespace pesym::liealg
