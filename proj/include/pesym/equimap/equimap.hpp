#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pesym/liealg/catalog.hpp"
#include "pesym/liealg/system.hpp"
#include "pesym/symexpr/jet.hpp"

namespace pesym::equimap {

using liealg::Generator;
using liealg::PESystem;
using symexpr::Expr;

/// t -> a1 t + a2, x -> a3 x + a4, U -> a5 U + a6, V -> a7 V + a8.
struct EquivalenceParams {
    std::array<double, 8> a{1, 0, 1, 0, 1, 0, 1, 0};

    double& operator[](int i) { return a.at(static_cast<std::size_t>(i - 1)); }  ///< 1-based, as a1..a8
    double operator[](int i) const { return a.at(static_cast<std::size_t>(i - 1)); }
    /// Throws std::invalid_argument when a1, a3, a5 or a7 vanishes.
    void validate() const;
};

/// The equivalence that applies `first` and then `second`.
EquivalenceParams compose(const EquivalenceParams& first, const EquivalenceParams& second);

/// How the potential source scales under x -> a3 x: by a7 / a3^2 (derived from the
/// form-preserving constraints) or by a7 / a3 as printed with the equivalence group.
enum class GScaling { Derived, Printed };

/// (a3^2/a1) D, (a5/a1) F, (a7/a3^2) G composed with U = (W - a6)/a5, V = (Z - a8)/a7.
PESystem apply_equivalence(const PESystem& sys, const EquivalenceParams& p, GScaling g = GScaling::Derived);

/// Outcome of checking one potential-scaling candidate on random equivalences of a
/// generic system (arbitrary D, F, G).
struct ScalingCheck {
    GScaling scaling = GScaling::Derived;
    bool constraints_zero = true;  ///< all five form-preserving constraints vanish
    bool push_zero = true;         ///< the chain-rule push vanishes
    std::vector<int> failed_constraints;
    double worst = 0.0;            ///< largest residual ratio seen
};
std::string scaling_name(GScaling g);
/// Draws `samples` equivalences with |a3| away from 1 and checks both candidates.
std::vector<ScalingCheck> check_equivalence_scalings(std::uint64_t seed, int samples = 5, double tol = 1e-10);

/// tau = alpha(t), y = beta(t, x), W = K U + P, Z = L V + Q.
struct FormPreservingMap {
    Expr alpha;
    Expr beta;
    Expr K, P, L, Q;

    /// Structural checks: alpha depends on t only; beta, K, P, L, Q on (t, x) only.
    void validate() const;
};

/// A point map in full: the new variables as expressions in the old (t, x, U, V).
struct PointMap {
    Expr t, x, U, V;

    /// Splits U and V into the affine form K U + P, L V + Q; throws when the map
    /// is not of the form-preserving type.
    FormPreservingMap form_preserving() const;
};

PointMap equivalence_point_map(const EquivalenceParams& p);

/// Residuals of the five form-preserving constraints, as expressions in (t, x, U, V)
/// with the target coefficients evaluated at W = K U + P, Z = L V + Q.
std::vector<Expr> fp_constraint_residuals(const FormPreservingMap& map, const PESystem& source,
                                          const PESystem& target);

/// Target equations written on the source jet space through the chain rule and
/// restricted to the source manifold. Both vanish iff the map carries solutions of
/// `source` to solutions of `target`.
struct PushedSystem {
    Expr s1;
    Expr s2;
};
PushedSystem push_system(const PESystem& source, const PointMap& map, const PESystem& target);

/// Jacobian determinant of the point map, as an expression in (t, x, U, V).
Expr jacobian(const PointMap& map);

/// Pulls a generator of the target system back to the source variables.
Generator pull_back(const Generator& target_generator, const PointMap& map);

/// A row of the reduction tables: printed source system, printed change of
/// variables and the canonical target it lands on.
struct ReductionEntry {
    int table = 0;
    int case_number = 0;
    std::string branch;
    std::string title;
    Expr D, F, G;  ///< source, renamed to (t, x, U, V)
    std::vector<liealg::ParamSpec> params;
    std::vector<liealg::Constraint> constraints;
    std::vector<std::string> functions;
    PointMap map;  ///< renamed to source (t, x, U, V)
    std::string map_text;
    std::pair<double, double> window_x{0.3, 2.0};
    std::pair<double, double> window_t{0.3, 2.0};
    int target_table = 0;
    int target_case = 0;
    std::vector<std::pair<std::string, Expr>> target_params;
    std::filesystem::path source;

    std::string id() const;  ///< "T3.4" or "T4.3a"
    static ReductionEntry parse(std::string_view text, std::string origin = "<string>");
    static ReductionEntry load(const std::filesystem::path& path);
};

/// All *.red files below `dir/table3` and `dir/table4`.
std::vector<ReductionEntry> load_reductions(const std::filesystem::path& dir);

struct ReductionOptions {
    int instantiations = 2;
    int standins = 3;
    int trials = 12;
    double tol = 1e-9;
    std::uint64_t seed = 20240602;
    symexpr::Point fixed_params;
};

struct ReductionRecord {
    int instantiation = 0;
    symexpr::Point params;
    symexpr::Point target_params;
    bool push_zero = true;
    double push_worst = 0.0;
    bool constraints_zero = true;
    double constraints_worst = 0.0;
    std::vector<int> failed_constraints;  ///< 1-based
    double min_jacobian = 0.0;
    symexpr::Point witness;
    bool ok = false;
};

struct ReductionReport {
    std::string id;
    std::string target;
    std::vector<ReductionRecord> records;
    bool ok() const;
};

/// Instantiates source and target, then checks both the chain-rule push and the
/// five form-preserving constraints with shared stand-ins inside the entry's window.
ReductionReport verify_reduction(const ReductionEntry& entry, const std::vector<liealg::CatalogEntry>& catalog,
                                 const ReductionOptions& opt = {});

/// Source system, point map and target system of one instantiation, for callers
/// that need the concrete objects (symmetry transport, CLI output).
struct ReductionInstance {
    symexpr::Point params;
    PESystem source;
    PointMap map;
    liealg::Instance target;
};
ReductionInstance instantiate_reduction(const ReductionEntry& entry, const liealg::CatalogEntry& target,
                                        const symexpr::Point& params);
const liealg::CatalogEntry& find_entry(const std::vector<liealg::CatalogEntry>& catalog, int table, int case_number);

/// Sampling context for an entry: windows for x and t, stand-ins for its functions.
symexpr::JetContext reduction_context(const ReductionEntry& entry, const symexpr::FunctionTable& functions);

}  // namespace pesym::equimap
