#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pesym/liealg/system.hpp"
#include "pesym/symexpr/eval.hpp"

namespace pesym::liealg {

/// Values a parameter may take when an entry is instantiated.
struct ParamSpec {
    std::string name;
    std::vector<double> values;
};

/// `lhs op rhs` with op one of != == > < >= <=.
struct Constraint {
    std::string text;
    Expr lhs;
    std::string op;
    Expr rhs;

    static Constraint parse(std::string_view text);
    bool holds(const symexpr::Point& params) const;
};

/// A function of (t, x) fixed only through h_xx + alpha h + c = 0 (c = 0 or 1).
/// Instantiated as a closed-form solution with two free time functions.
struct HarmonicSpec {
    std::string symbol;
    Expr alpha;
    bool inhomogeneous = false;
};

/// A listed generator as printed next to a suspected erratum, kept so the
/// report shows the printed form failing next to the corrected one.
struct PrintedVariant {
    int replaces = 0;  ///< 1-based index into `generators`
    Generator generator;
    std::string text;
};

struct PerturbedSystem {
    std::string text;
    Expr D, F, G;
    int fails = 0;  ///< 1-based index of the generator expected to fail
};

struct CatalogEntry {
    int table = 0;
    int case_number = 0;
    std::string title;
    std::string note;
    Expr D, F, G;
    std::vector<ParamSpec> params;
    std::vector<Constraint> constraints;
    std::vector<std::string> functions;       ///< arbitrary functions of composite arguments
    std::vector<std::string> time_functions;  ///< arbitrary functions of t
    std::vector<HarmonicSpec> harmonics;
    std::vector<Generator> generators;
    std::vector<std::string> generator_text;
    Generator negative;
    std::string negative_text;
    std::optional<PerturbedSystem> perturbed;
    std::vector<PrintedVariant> printed;
    std::filesystem::path source;

    std::string id() const;  ///< "T1.7"
    /// Finite-dimensional part only: no time functions or harmonic families.
    bool finite_dimensional() const { return time_functions.empty() && harmonics.empty(); }
    std::vector<std::string> param_names() const;

    static CatalogEntry load(const std::filesystem::path& path);
    static CatalogEntry parse(std::string_view text, std::string origin = "<string>");
};

/// All *.cat files below `dir/table1` and `dir/table2`, ordered by table and case.
std::vector<CatalogEntry> load_catalog(const std::filesystem::path& dir);

/// The parameter values used when nothing else is declared.
const std::vector<double>& default_param_domain();

/// A concrete member of an entry: numbers for parameters, harmonic families
/// expanded, with the names of every time function that the expansion introduced.
struct Instance {
    symexpr::Point params;
    PESystem system;
    std::vector<Generator> generators;
    Generator negative;
    std::optional<PESystem> perturbed;
    std::vector<Generator> printed;
    std::vector<std::string> time_symbols;
};

/// Throws InvariantError when a constraint fails for `params` or a parameter is missing.
Instance instantiate(const CatalogEntry& entry, const symexpr::Point& params);

/// Draws constraint-satisfying parameters; `fixed` values are used as given.
symexpr::Point sample_params(const CatalogEntry& entry, std::mt19937_64& rng, const symexpr::Point& fixed = {});

/// Stand-in table for stand-in number `which`: arbitrary functions get random
/// smooth stand-ins (kind rotating with `which`), time functions get t, t^2, exp(t).
symexpr::FunctionTable standin_table(const CatalogEntry& entry, const Instance& inst, std::mt19937_64& rng,
                                     int which);

}  // namespace pesym::liealg
