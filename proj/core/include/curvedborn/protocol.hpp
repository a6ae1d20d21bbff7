#pragma once

#include <cstdint>
#include <vector>

#include "curvedborn/events.hpp"
#include "curvedborn/fock.hpp"
#include "curvedborn/geometry.hpp"
#include "curvedborn/qca.hpp"

namespace cborn {

/// Sequential horizontal detection: evolve to each flat round surface,
/// project on the per-patch strip events, trace out the detection strip and
/// re-insert the vacuum (so nothing is counted twice), and chain the Born
/// weights.  The closed-form, curved-Born and bracket evaluators below give
/// the independent routes the run is checked against.

/// Exact walks enumerate up to 2^(patches * rounds) records; runs beyond
/// this budget are rejected rather than sampled.
constexpr int kMaxBranchBits = 20;

struct RunSpec {
    GateModel model;
    StateVector psi0; // on the full lattice at layer 0
    Surface sigma;
    Partition partition;
    int m = 1;
    bool retain_detected = false; // exploratory: skip the trace-out-and-vacuum step
    double prune_tol = 1e-14;
};

struct SequentialResult {
    SliceDecomposition dec;
    /// Explored records with weight above the prune tolerance, ascending key.
    std::vector<std::pair<OutcomeSeq, double>> outcomes;
    /// Coarse-grained weights accumulated during the walk, indexed by
    /// pattern bits.
    std::vector<double> pattern_probs;
    double total = 0.0;

    double prob_of(const OutcomeSeq &s) const;
};

SequentialResult run_sequential(const RunSpec &spec);

/// One collapse step: Born weight of the strip event plus the collapsed
/// state on the same surface.
struct DetectionOutcome {
    DensityOp collapsed;
    double weight = 0.0;
    bool pruned = false;
};
DetectionOutcome detection_map(const DensityOp &rho, std::uint32_t s_row,
                               const SliceDecomposition &dec, int k,
                               bool retain_detected = false, double prune_tol = 1e-14);

/// State prepared on the round before the first detection: everything that
/// already crossed the surface is traced out and replaced by vacuum.
DensityOp first_surface_prepare(const RunSpec &spec, const SliceDecomposition &dec);

StateVector surface_state(const RunSpec &spec);

/// Sum of record weights over the records compatible with each pattern.
std::vector<double> coarse_grain(const SequentialResult &result);

/// Per-record probability through the transported strip projections applied
/// to the surface state; equals the sequential weight identically.
class ClosedFormEvaluator {
  public:
    ClosedFormEvaluator(const RunSpec &spec, const SliceDecomposition &dec);
    double prob(const OutcomeSeq &s) const;
    const StateVector &psi_sigma() const { return psi_sigma_; }

  private:
    const SliceDecomposition &dec_;
    Species species_;
    StateVector psi_sigma_;
    std::vector<ReducedEvolution> w_per_round_; // k = kappa..k_max
};
double closed_form_probability(const RunSpec &spec, const SliceDecomposition &dec,
                               const OutcomeSeq &s);

double curved_born(const RunSpec &spec, const OutcomePattern &pattern);
double curved_born_event(const StateVector &psi_sigma, const Event &e);

struct Bracket {
    double lower = 0.0;
    double upper = 0.0;
};
/// Slab-event bracket around the coarse-grained weight of a pattern.
Bracket detection_bounds(const RunSpec &spec, const SliceDecomposition &dec,
                         const OutcomePattern &pattern);
/// Patch-band bracket; nested monotonically across m by construction.
Bracket patch_bounds(const RunSpec &spec, const OutcomePattern &pattern, int m);

/// Residuals of the four undetected-region state properties along one
/// record: the collapsed product form, the reduced-step transport form, the
/// normalization match and the conditional-probability match.
struct TrailCheck {
    int k = 0;
    double product_form = 0.0;
    double transport_form = 0.0;
    double norm_match = 0.0;
    double cond_prob = 0.0;
};
std::vector<TrailCheck> trail_checks(const RunSpec &spec, const OutcomeSeq &s);

struct SweepRow {
    int m = 0;
    std::uint32_t pattern_bits = 0;
    double lower_patch = 0.0;
    double lower_slab = 0.0;
    double sequential = 0.0;
    double upper_slab = 0.0;
    double upper_patch = 0.0;
    double born = 0.0;
};
struct SweepResult {
    std::vector<SweepRow> rows; // grouped by m in the order given
    double bracket_violation = 0.0;     // how far any row escapes its brackets
    double monotonicity_violation = 0.0; // patch-band nesting across the m list
    double finest_gap = 0.0;            // max |sequential - born| at the last m
};
SweepResult convergence_sweep(const RunSpec &base, const std::vector<int> &ms);

} // namespace cborn
