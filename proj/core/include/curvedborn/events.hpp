#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "curvedborn/geometry.hpp"

namespace cborn {

/// Configuration space over a finite ambient site set and the event algebra
/// generated by "no particle in R" / "some particle in R" / "all particles
/// in R".  Configurations are species-merged subsets of the ambient sites;
/// events are fully materialized bit sets over the 2^n configurations.

class Bitset {
  public:
    Bitset() = default;
    explicit Bitset(std::size_t n, bool value = false);

    std::size_t size() const { return n_; }
    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, bool v = true);
    std::size_t count() const;

    Bitset &operator&=(const Bitset &o);
    Bitset &operator|=(const Bitset &o);
    Bitset operator~() const;
    bool operator==(const Bitset &) const = default;
    bool is_subset_of(const Bitset &o) const;
    bool intersects(const Bitset &o) const;

  private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
    void trim();
};

/// Index of a configuration within Gamma(ambient): bit i of the compact
/// index corresponds to the i-th ambient site in ascending order.
std::uint32_t global_to_compact(SiteSet config, SiteSet ambient);
SiteSet compact_to_global(std::uint32_t compact, SiteSet ambient);

class Event {
  public:
    Event(SiteSet ambient, Bitset members);

    static Event none(SiteSet ambient);
    static Event all_configs(SiteSet ambient);
    static Event empty_in(SiteSet ambient, SiteSet r);  // no point in R
    static Event exists_in(SiteSet ambient, SiteSet r); // at least one point in R
    static Event all_in(SiteSet ambient, SiteSet r);    // all points in R
    static Event from_predicate(SiteSet ambient,
                                const std::function<bool(SiteSet)> &pred);

    SiteSet ambient() const { return ambient_; }
    int n_sites() const { return popcount(ambient_); }
    std::size_t config_count() const { return members_.count(); }
    bool contains_compact(std::uint32_t idx) const { return members_.test(idx); }
    bool contains(SiteSet global_config) const;
    const Bitset &members() const { return members_; }

    Event complement() const;
    Event operator&(const Event &o) const;
    Event operator|(const Event &o) const;
    bool operator==(const Event &) const = default;
    bool is_subset_of(const Event &o) const;
    bool disjoint(const Event &o) const;

  private:
    SiteSet ambient_ = 0;
    Bitset members_;
};

/// Detection record s: one 0/1 row per round k = kappa..k_max, one column
/// per patch.  Row bits are packed with bit (l) for patch l.
struct OutcomeSeq {
    int kappa = 0;
    int r = 0;
    std::vector<std::uint32_t> rows;

    int k_max() const { return kappa + static_cast<int>(rows.size()) - 1; }
    int bit(int k, int l) const { return (rows[k - kappa] >> l) & 1; }
    std::uint64_t key() const; // lexicographic in (k asc, l asc)
    bool operator==(const OutcomeSeq &) const = default;
};

/// Coarse-grained record L: bit l set iff patch l fired in some round.
struct OutcomePattern {
    int r = 0;
    std::uint32_t bits = 0;
    int bit(int l) const { return (bits >> l) & 1; }
    bool operator==(const OutcomePattern &) const = default;
};

OutcomePattern pattern_of(const OutcomeSeq &s);

class SliceDecomposition;

/// Round-k detection event on the full-lattice configuration space:
/// intersection over patches of empty/exists on the strip cells.
Event round_event(std::uint32_t s_row, const SliceDecomposition &dec, int k);
/// Same event restricted to Gamma(strip of round k).
Event round_event_on_strip(std::uint32_t s_row, const SliceDecomposition &dec, int k);

/// Patch-level event on Gamma(sigma) for a coarse-grained record.
Event pattern_event(const OutcomePattern &pattern, const Partition &p);

/// Middle/shrunk/grown slab events for one full record s, and their unions
/// over all records compatible with a pattern.  shrunk <= mid <= grown.
struct EventTriple {
    Event shrunk;
    Event mid;
    Event grown;
};
EventTriple record_slab_events(const OutcomeSeq &s, const SliceDecomposition &dec);
EventTriple pattern_slab_events(const OutcomePattern &pattern, const SliceDecomposition &dec);

/// Patch-band events: the bracketing pair around pattern_event built from
/// eroded/dilated patches; `lower` already includes the empty-boundary clause.
struct PatchBandEvents {
    Event lower;
    Event upper;
};
PatchBandEvents pattern_band_events(const OutcomePattern &pattern, const Partition &p,
                                    const PatchBands &bands);

/// All records s whose coarse-graining is `pattern`, in ascending key order.
std::vector<OutcomeSeq> compatible_outcomes(const OutcomePattern &pattern, int kappa,
                                            int k_max);
std::uint64_t compatible_outcome_count(const OutcomePattern &pattern, int n_rounds);

/// Recovers the configuration distribution from the probabilities of the
/// vacuum events: given vp[A] = P(no particle in A) for every site subset A,
/// returns p[q] by inclusion-exclusion over the subset lattice.
struct Reconstruction {
    std::vector<double> p;
    double min_mass = 0.0;
    bool consistent = true; // false when some mass < -1e-9
};
Reconstruction reconstruct_distribution(const std::vector<double> &vacuum_probs, int n_sites);

} // namespace cborn
