#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvedborn/protocol.hpp"

namespace cborn {

/// Experiment configuration: one self-contained JSON file per experiment,
/// strictly validated on load.  All randomness is derived from the seed, and
/// serialized outputs are byte-stable for a fixed config.

struct InitialParticle {
    int site = 0;
    std::string species = "x"; // "x" or "y"
    std::string spin = "up";   // x only: "up" or "down"
};

struct InitialStateSpec {
    enum class Kind { vacuum, single, product, random };
    Kind kind = Kind::vacuum;
    std::vector<InitialParticle> particles;
};

struct ExperimentConfig {
    std::string name;
    int n_sites = 0;
    GateModel model;
    InitialStateSpec initial;
    Surface surface;
    std::vector<SiteSet> patches;
    std::vector<int> ms;
    std::uint64_t seed = 0;
    bool retain_detected = false;
    double prune_tol = 1e-14;

    Partition partition() const { return Partition(n_sites, patches); }
};

ExperimentConfig load_config(const std::string &path);
ExperimentConfig parse_config_text(const std::string &text);

StateVector build_initial_state(const ExperimentConfig &config);
RunSpec make_run_spec(const ExperimentConfig &config, int m);

enum class SuiteKind { axioms, theorem, all };

struct SuiteOutcome {
    std::string report_json;
    bool pass = false;
};
SuiteOutcome run_suite(const ExperimentConfig &config, SuiteKind kind);

/// Deterministic serializers backing the command line surface.
std::string geometry_json(const ExperimentConfig &config);
std::string run_json(const ExperimentConfig &config);
std::string closed_json(const ExperimentConfig &config);
std::string born_json(const ExperimentConfig &config);
std::string bounds_json(const ExperimentConfig &config);
std::string trail_json(const ExperimentConfig &config);
std::string sweep_json(const ExperimentConfig &config, const std::vector<int> &ms);
std::string sweep_csv(const ExperimentConfig &config, const std::vector<int> &ms);
/// Aligned-column text: per round spacing, one row per pattern with the
/// bracket, the sequential weight and the curved Born value.
std::string pattern_table_text(const ExperimentConfig &config, const std::vector<int> &ms);

/// State serialization: amplitudes as [re, im] pairs in the documented
/// index order (mixed-radix little-endian over ascending sites).
std::string state_json(const StateVector &psi);
StateVector state_from_json(const std::string &text);

} // namespace cborn
