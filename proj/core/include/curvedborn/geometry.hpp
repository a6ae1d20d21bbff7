#pragma once

#include <cstdint>
#include <vector>

namespace cborn {

/// Discrete causal geometry of a 1+1 dimensional lattice with open
/// boundaries.  Sites live on [0, n) and micro time steps on the integers;
/// the lattice lightspeed is one site per layer.  Lightcones are truncated
/// at the lattice edges (no wraparound).

constexpr int kMaxSites = 24;

/// Bitmask over lattice sites; bit x is site x.
using SiteSet = std::uint32_t;

inline SiteSet site_bit(int x) { return SiteSet{1} << x; }
inline SiteSet full_sites(int n) { return (n >= 32) ? ~SiteSet{0} : ((SiteSet{1} << n) - 1); }
int popcount(SiteSet s);
/// Sites [lo, hi], inclusive.
SiteSet site_range(int lo, int hi);
std::vector<int> site_list(SiteSet s);

struct SpacetimePoint {
    int site = 0;
    int layer = 0;
};

/// Causal (non-strict) order: q lies in the causal future of p.
bool causal_leq(const SpacetimePoint &p, const SpacetimePoint &q);

/// A lattice Cauchy surface: one micro layer per site, with the spacelike
/// slope bound |layer(x+1) - layer(x)| <= 1.  Layers may be negative (used
/// internally for the round preceding the first detection).
class Surface {
  public:
    Surface() = default;
    explicit Surface(std::vector<int> layers); // throws if not lattice-spacelike
    static Surface flat(int n_sites, int layer);

    int n_sites() const { return static_cast<int>(layers_.size()); }
    int layer(int x) const { return layers_[x]; }
    int min_layer() const;
    int max_layer() const;
    const std::vector<int> &layers() const { return layers_; }

    bool operator==(const Surface &) const = default;

  private:
    std::vector<int> layers_;
};

/// A subset of a surface, identified with its site set.
struct Region {
    Surface surface;
    SiteSet sites = 0;
};

/// Intersection of the domain of influence (future and past cone) of `a`
/// with the target surface.
SiteSet grown_set(const Region &a, const Surface &target);

/// Intersection of the domain of dependence of `a` with the target surface:
/// sites x' whose full cone on a.surface lands inside a.sites.  Satisfies
/// shrunk == complement of grown_set of the complement, exactly.
SiteSet shrunk_set(const Region &a, const Surface &target);

/// Disjoint non-empty detector patches P_1..P_r on a surface; the remainder
/// is the implicit undetected patch.  On the counting measure admissibility
/// is exactly disjointness.
class Partition {
  public:
    Partition(int n_sites, std::vector<SiteSet> patches); // throws on overlap/empty
    int n_sites() const { return n_sites_; }
    int r() const { return static_cast<int>(patches_.size()); }
    SiteSet patch(int l) const { return patches_[l]; } // l in [0, r)
    SiteSet covered() const { return covered_; }
    SiteSet remainder() const { return full_sites(n_sites_) & ~covered_; }
    const std::vector<SiteSet> &patches() const { return patches_; }

  private:
    int n_sites_ = 0;
    std::vector<SiteSet> patches_;
    SiteSet covered_ = 0;
};

/// Per-round, per-patch detector cells.  `in_b`/`in_c` are the patch columns
/// of the detection strip and of the surface slab; `c_shrunk`/`c_grown`
/// bracket `in_c` between the sets reachable from the strip by shrinking and
/// growing, and `d_grown` is the part of the grown strip outside the slab.
struct PatchCells {
    SiteSet in_b = 0;
    SiteSet in_c = 0;
    SiteSet c_shrunk = 0;
    SiteSet c_grown = 0;
    SiteSet d_grown = 0;
};

/// One detection round k: the flat surface at layer k*m split into the
/// not-yet-crossed part `a`, the strip `b` grown from the slab `c` of sigma,
/// and the rest `r`.
struct SliceRound {
    int k = 0;
    SiteSet a = 0;
    SiteSet b = 0;
    SiteSet c = 0;
    SiteSet rest = 0;
    std::vector<PatchCells> cells;
};

class SliceDecomposition {
  public:
    Surface sigma;
    Partition partition;
    int m = 1;
    int kappa = 0; // first round touching the detector patches
    int k_max = 0; // last round touching the detector patches
    std::vector<SliceRound> rounds; // k = kappa-1 .. k_max
    SiteSet tail = 0;               // part of sigma above the last round

    const SliceRound &round(int k) const { return rounds.at(k - (kappa - 1)); }
    int upsilon_layer(int k) const { return k * m; }
    int n_rounds() const { return k_max - kappa + 1; }
    Surface upsilon(int k) const { return Surface::flat(sigma.n_sites(), k * m); }
    /// The mixed surface between rounds k and k+1: sigma clamped to
    /// [k*m, (k+1)*m].  Carries b+rest of round k, the slab c of round k+1,
    /// and a of round k+1.
    Surface between(int k_lo, int k_hi) const;
};

/// Computes the full round decomposition of `sigma` against detection every
/// `m` micro layers.  Requires m >= 1 and sigma at layers >= 0.
SliceDecomposition slice_decompose(const Surface &sigma, const Partition &p, int m);

/// Patch bands: erosion/dilation of each patch by `m` sites plus the union
/// of the boundary rings.  Monotone in m by construction.
struct PatchBands {
    int m = 1;
    std::vector<SiteSet> shrunk;
    std::vector<SiteSet> grown;
    SiteSet boundary = 0;
};
PatchBands patch_shrink_grow(const Partition &p, int m);

} // namespace cborn
