#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pesym/cli/cli.hpp"
#include "pesym/simred/simred.hpp"

namespace pesym::cli {

/// Bad flags, bad config, missing inputs: exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Resolves each setting as flag > config file > default and records it in the manifest.
class Settings {
public:
    Settings(RunManifest& manifest, const std::optional<std::string>& config_path, std::set<std::string> allowed);

    double number(const std::string& key, const std::optional<double>& flag, double fallback);
    int integer(const std::string& key, const std::optional<int>& flag, int fallback);
    std::uint64_t seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback);
    std::string text(const std::string& key, const std::optional<std::string>& flag, const std::string& fallback);
    std::optional<std::string> text(const std::string& key, const std::optional<std::string>& flag);

private:
    std::optional<std::string> lookup(const std::string& key) const;
    RunManifest& manifest_;
    std::map<std::string, std::string> config_;
};

struct ModelFlags {
    std::optional<double> m, alpha_s, c_inf, omega0, q0, beta;
    std::optional<int> n;
};
/// Config keys understood by ModelFlags.
std::set<std::string> model_keys();
simred::ModelParams resolve_model(Settings& s, const ModelFlags& f, simred::ModelParams defaults = {});

struct Common {
    std::optional<std::string> config;
};

struct CatalogCmd {
    std::string catalog_dir;
    bool json = false;
};

struct SymmetriesCmd {
    Common common;
    std::string catalog_dir;
    std::optional<int> table, case_number, trials, instantiations;
    std::optional<std::uint64_t> seed;
    bool all = false;
    bool negative = false;
    std::optional<std::string> out;
};

struct TransformsCmd {
    Common common;
    std::string catalog_dir;
    std::optional<int> table, case_number, trials, instantiations;
    std::optional<std::string> branch;
    std::optional<std::uint64_t> seed;
    bool all = false;
    bool equivalence = false;
    std::optional<std::string> out;
};

struct ReduceCmd {
    Common common;
    ModelFlags model;
    std::optional<std::string> mode;
    std::optional<int> points;
    bool cubic = false;
    std::optional<double> guess_phi0, guess_psi0, guess_omega0;
    std::string out_dir = ".";
};

struct SimulateCmd {
    Common common;
    ModelFlags model;
    std::optional<int> N;
    std::optional<double> sigma, t0, t_end, output_every;
    std::optional<std::string> source, S, Q, ladder;
    std::string out_dir = ".";
};

struct FiguresCmd {
    Common common;
    ModelFlags model;
    int which = 1;
    std::optional<double> t_min, t_max, x_max;
    std::optional<int> nt, nx;
    std::string out_dir = ".";
};

int cmd_catalog(const CatalogCmd& c, std::ostream& out);
int cmd_verify_symmetries(const SymmetriesCmd& c, std::ostream& out, std::ostream& err);
int cmd_verify_transforms(const TransformsCmd& c, std::ostream& out, std::ostream& err);
int cmd_reduce(const ReduceCmd& c, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateCmd& c, std::ostream& out, std::ostream& err);
int cmd_figures(const FiguresCmd& c, std::ostream& out, std::ostream& err);

/// Opens a file for writing below `dir`, creating the directory; throws UsageError on failure.
std::ofstream open_output(const std::filesystem::path& dir, const std::string& name);

}  // namespace pesym::cli
