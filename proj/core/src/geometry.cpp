#include "curvedborn/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace cborn {

int popcount(SiteSet s) { return std::popcount(s); }

SiteSet site_range(int lo, int hi) {
    SiteSet s = 0;
    for (int x = lo; x <= hi; ++x)
        s |= site_bit(x);
    return s;
}

std::vector<int> site_list(SiteSet s) {
    std::vector<int> out;
    for (int x = 0; x < 32; ++x)
        if (s & site_bit(x))
            out.push_back(x);
    return out;
}

bool causal_leq(const SpacetimePoint &p, const SpacetimePoint &q) {
    return std::abs(q.site - p.site) <= q.layer - p.layer;
}

Surface::Surface(std::vector<int> layers) : layers_(std::move(layers)) {
    if (layers_.empty() || static_cast<int>(layers_.size()) > kMaxSites)
        throw std::invalid_argument("surface: needs 1.." + std::to_string(kMaxSites) + " sites");
    for (std::size_t x = 0; x + 1 < layers_.size(); ++x)
        if (std::abs(layers_[x + 1] - layers_[x]) > 1)
            throw std::invalid_argument("surface: not lattice-spacelike at sites " +
                                        std::to_string(x) + "," + std::to_string(x + 1) +
                                        " (|delta layer| > 1)");
}

Surface Surface::flat(int n_sites, int layer) {
    return Surface(std::vector<int>(static_cast<std::size_t>(n_sites), layer));
}

int Surface::min_layer() const { return *std::min_element(layers_.begin(), layers_.end()); }
int Surface::max_layer() const { return *std::max_element(layers_.begin(), layers_.end()); }

SiteSet grown_set(const Region &a, const Surface &target) {
    const int n = target.n_sites();
    SiteSet out = 0;
    for (int x = 0; x < n; ++x) {
        const SpacetimePoint tp{x, target.layer(x)};
        for (int y = 0; y < a.surface.n_sites(); ++y) {
            if (!(a.sites & site_bit(y)))
                continue;
            const SpacetimePoint ap{y, a.surface.layer(y)};
            if (causal_leq(ap, tp) || causal_leq(tp, ap)) {
                out |= site_bit(x);
                break;
            }
        }
    }
    return out;
}

SiteSet shrunk_set(const Region &a, const Surface &target) {
    const int n = target.n_sites();
    SiteSet out = 0;
    for (int x = 0; x < n; ++x) {
        const Region probe{target, site_bit(x)};
        const SiteSet cone = grown_set(probe, a.surface);
        if ((cone & ~a.sites) == 0)
            out |= site_bit(x);
    }
    return out;
}

Partition::Partition(int n_sites, std::vector<SiteSet> patches)
    : n_sites_(n_sites), patches_(std::move(patches)) {
    if (patches_.empty())
        throw std::invalid_argument("partition: needs at least one patch");
    const SiteSet full = full_sites(n_sites_);
    for (std::size_t l = 0; l < patches_.size(); ++l) {
        if (patches_[l] == 0)
            throw std::invalid_argument("partition: patch " + std::to_string(l + 1) + " empty");
        if (patches_[l] & ~full)
            throw std::invalid_argument("partition: patch " + std::to_string(l + 1) +
                                        " out of lattice bounds");
        if (patches_[l] & covered_) {
            const SiteSet overlap = patches_[l] & covered_;
            throw std::invalid_argument("partition: not disjoint (site " +
                                        std::to_string(site_list(overlap).front()) +
                                        " in more than one patch)");
        }
        covered_ |= patches_[l];
    }
}

Surface SliceDecomposition::between(int k_lo, int k_hi) const {
    std::vector<int> layers = sigma.layers();
    const int lo = upsilon_layer(k_lo);
    const int hi = upsilon_layer(k_hi);
    for (int &v : layers)
        v = std::clamp(v, lo, hi);
    return Surface(std::move(layers));
}

namespace {

// (x, layer) lies in the causal future of sigma.
bool in_future_of(const Surface &sigma, int x, int layer) {
    for (int y = 0; y < sigma.n_sites(); ++y)
        if (causal_leq({y, sigma.layer(y)}, {x, layer}))
            return true;
    return false;
}

// Surface point x of sigma lies in the causal past of the flat layer h.
bool in_past_of_flat(const Surface &sigma, int x, int h) {
    const int n = sigma.n_sites();
    for (int y = 0; y < n; ++y)
        if (causal_leq({x, sigma.layer(x)}, {y, h}))
            return true;
    return false;
}

int ceil_div(int a, int m) {
    return (a >= 0) ? (a + m - 1) / m : -((-a) / m);
}

SiteSet ball(int x, int radius, int n) {
    SiteSet s = 0;
    for (int y = std::max(0, x - radius); y <= std::min(n - 1, x + radius); ++y)
        s |= site_bit(y);
    return s;
}

} // namespace

SliceDecomposition slice_decompose(const Surface &sigma, const Partition &p, int m) {
    if (m <= 0)
        throw std::invalid_argument("slice_decompose: m must be >= 1");
    if (sigma.min_layer() < 0)
        throw std::invalid_argument("slice_decompose: surface must lie at layers >= 0");
    if (p.n_sites() != sigma.n_sites())
        throw std::invalid_argument("slice_decompose: partition/surface size mismatch");

    const int n = sigma.n_sites();
    int lo = 0, hi = 0;
    bool first = true;
    for (int x = 0; x < n; ++x) {
        if (!(p.covered() & site_bit(x)))
            continue;
        const int v = sigma.layer(x);
        lo = first ? v : std::min(lo, v);
        hi = first ? v : std::max(hi, v);
        first = false;
    }

    SliceDecomposition dec{sigma, p, m, ceil_div(lo, m), ceil_div(hi, m), {}, 0};

    for (int k = dec.kappa - 1; k <= dec.k_max; ++k) {
        SliceRound round;
        round.k = k;
        const int h = k * m;
        const int h_prev = (k - 1) * m;
        SiteSet c = 0;
        for (int x = 0; x < n; ++x) {
            if (!in_future_of(sigma, x, h))
                round.a |= site_bit(x);
            if (in_past_of_flat(sigma, x, h) && !in_past_of_flat(sigma, x, h_prev))
                c |= site_bit(x);
        }
        round.c = c;
        round.b = grown_set({sigma, c}, Surface::flat(n, h));
        round.rest = full_sites(n) & ~(round.a | round.b);

        const Surface upsilon_k = Surface::flat(n, h);
        round.cells.resize(p.r());
        for (int l = 0; l < p.r(); ++l) {
            PatchCells &cell = round.cells[l];
            cell.in_b = round.b & p.patch(l);
            cell.in_c = round.c & p.patch(l);
            const Region strip{upsilon_k, cell.in_b};
            // Lattice surfaces may contain lightlike segments, so the shrunk
            // set is clipped to the slab explicitly.
            cell.c_shrunk = shrunk_set(strip, sigma) & round.c;
            const SiteSet grown = grown_set(strip, sigma);
            cell.d_grown = grown & ~round.c;
            SiteSet past = 0;
            for (int x = 0; x < n; ++x) {
                if (!(round.c & site_bit(x)))
                    continue;
                for (int bsite : site_list(cell.in_b)) {
                    if (causal_leq({x, sigma.layer(x)}, {bsite, h})) {
                        past |= site_bit(x);
                        break;
                    }
                }
            }
            cell.c_grown = past;
        }
        dec.rounds.push_back(std::move(round));
    }

    for (int x = 0; x < n; ++x)
        if (!in_past_of_flat(sigma, x, dec.k_max * m))
            dec.tail |= site_bit(x);

    return dec;
}

PatchBands patch_shrink_grow(const Partition &p, int m) {
    if (m <= 0)
        throw std::invalid_argument("patch_shrink_grow: m must be >= 1");
    const int n = p.n_sites();
    PatchBands bands;
    bands.m = m;
    bands.shrunk.resize(p.r());
    bands.grown.resize(p.r());
    for (int l = 0; l < p.r(); ++l) {
        const SiteSet patch = p.patch(l);
        SiteSet shrunk = 0, grown = 0;
        for (int x = 0; x < n; ++x) {
            if (!(patch & site_bit(x)))
                continue;
            grown |= ball(x, m, n);
            if ((ball(x, m, n) & ~patch) == 0)
                shrunk |= site_bit(x);
        }
        bands.shrunk[l] = shrunk;
        bands.grown[l] = grown;
        bands.boundary |= grown & ~shrunk;
    }
    return bands;
}

} // namespace cborn
