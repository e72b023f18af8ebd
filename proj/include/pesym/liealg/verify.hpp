#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pesym/liealg/catalog.hpp"
#include "pesym/liealg/symmetry.hpp"

namespace pesym::liealg {

struct VerifyOptions {
    int instantiations = 2;
    int standins = 3;
    int trials = 12;
    double tol = 1e-9;
    std::uint64_t seed = 20240601;
    /// A negative control must exceed this residual for every stand-in.
    double negative_threshold = 1e-3;
    /// Parameter values forced for every instantiation.
    symexpr::Point fixed_params;
    bool closure = true;
};

/// Outcome of one generator (or control) on one instantiation, over all stand-ins.
struct GeneratorRecord {
    enum class Kind { Listed, Negative, PerturbedSystem, Printed, Combination };
    Kind kind = Kind::Listed;
    int index = 0;  ///< 1-based position in the entry (0 for controls without one)
    std::string text;
    bool expected_pass = true;
    bool invariance_zero = true;   ///< both residuals vanish for every stand-in
    double worst_ratio = 0.0;
    double worst_value = 0.0;      ///< residual at the worst point
    double min_failure = 0.0;      ///< smallest per-stand-in |residual| (controls)
    symexpr::Point witness;
    std::optional<bool> determining_zero;   ///< absent when the equations do not apply
    std::vector<std::string> determining_failures;
    std::optional<bool> agreement;
    bool ok = false;               ///< matched expectation
};

std::string kind_name(GeneratorRecord::Kind k);

struct ClosureRecord {
    std::string pair;
    bool in_class = true;
    double residual = 0.0;
    bool ok = false;
};

struct InstantiationReport {
    int index = 0;
    symexpr::Point params;
    std::vector<GeneratorRecord> records;
    std::vector<ClosureRecord> closure;
};

struct EntryReport {
    std::string id;
    int table = 0;
    int case_number = 0;
    std::vector<InstantiationReport> instantiations;

    bool listed_pass() const;
    bool negatives_fail() const;
    bool determining_agree() const;
    bool closure_ok() const;
    bool ok() const { return listed_pass() && negatives_fail() && determining_agree() && closure_ok(); }
};

/// Checks every listed generator of `entry` on `opt.instantiations` random members,
/// together with the negative controls, the agreement with the determining
/// equations and closure of the listed generators under commutation.
EntryReport verify_catalog_entry(const CatalogEntry& entry, const VerifyOptions& opt = {});

/// Least-squares test that each commutator of two sampled generators lies in the
/// span of the entry's generator templates (families admit per-time-slice coefficients).
std::vector<ClosureRecord> check_closure(const CatalogEntry& entry, const Instance& inst, std::uint64_t seed);

/// One JSON object per (instantiation, generator) record.
std::vector<nlohmann::json> to_json_lines(const EntryReport& report);

}  // namespace pesym::liealg
