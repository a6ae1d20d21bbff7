#include "curvedborn/events.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

namespace cborn {

Bitset::Bitset(std::size_t n, bool value) : n_(n), w_((n + 63) / 64, value ? ~0ull : 0ull) {
    trim();
}

void Bitset::trim() {
    if (n_ % 64 != 0 && !w_.empty())
        w_.back() &= (1ull << (n_ % 64)) - 1;
}

void Bitset::set(std::size_t i, bool v) {
    if (v)
        w_[i >> 6] |= 1ull << (i & 63);
    else
        w_[i >> 6] &= ~(1ull << (i & 63));
}

std::size_t Bitset::count() const {
    std::size_t c = 0;
    for (std::uint64_t word : w_)
        c += std::popcount(word);
    return c;
}

Bitset &Bitset::operator&=(const Bitset &o) {
    assert(n_ == o.n_);
    for (std::size_t i = 0; i < w_.size(); ++i)
        w_[i] &= o.w_[i];
    return *this;
}

Bitset &Bitset::operator|=(const Bitset &o) {
    assert(n_ == o.n_);
    for (std::size_t i = 0; i < w_.size(); ++i)
        w_[i] |= o.w_[i];
    return *this;
}

Bitset Bitset::operator~() const {
    Bitset out = *this;
    for (std::uint64_t &word : out.w_)
        word = ~word;
    out.trim();
    return out;
}

bool Bitset::is_subset_of(const Bitset &o) const {
    assert(n_ == o.n_);
    for (std::size_t i = 0; i < w_.size(); ++i)
        if (w_[i] & ~o.w_[i])
            return false;
    return true;
}

bool Bitset::intersects(const Bitset &o) const {
    assert(n_ == o.n_);
    for (std::size_t i = 0; i < w_.size(); ++i)
        if (w_[i] & o.w_[i])
            return true;
    return false;
}

std::uint32_t global_to_compact(SiteSet config, SiteSet ambient) {
    std::uint32_t out = 0;
    int pos = 0;
    for (int x = 0; x < 32; ++x) {
        const SiteSet bit = site_bit(x);
        if (!(ambient & bit))
            continue;
        if (config & bit)
            out |= 1u << pos;
        ++pos;
    }
    return out;
}

SiteSet compact_to_global(std::uint32_t compact, SiteSet ambient) {
    SiteSet out = 0;
    int pos = 0;
    for (int x = 0; x < 32; ++x) {
        const SiteSet bit = site_bit(x);
        if (!(ambient & bit))
            continue;
        if (compact & (1u << pos))
            out |= bit;
        ++pos;
    }
    return out;
}

Event::Event(SiteSet ambient, Bitset members) : ambient_(ambient), members_(std::move(members)) {
    if (popcount(ambient_) > kMaxSites)
        throw std::invalid_argument("event: ambient exceeds site cap");
    assert(members_.size() == (std::size_t{1} << popcount(ambient_)));
}

Event Event::none(SiteSet ambient) {
    return Event(ambient, Bitset(std::size_t{1} << popcount(ambient), false));
}

Event Event::all_configs(SiteSet ambient) {
    return Event(ambient, Bitset(std::size_t{1} << popcount(ambient), true));
}

Event Event::from_predicate(SiteSet ambient, const std::function<bool(SiteSet)> &pred) {
    const std::size_t dim = std::size_t{1} << popcount(ambient);
    Bitset members(dim);
    for (std::uint32_t idx = 0; idx < dim; ++idx)
        if (pred(compact_to_global(idx, ambient)))
            members.set(idx);
    return Event(ambient, std::move(members));
}

Event Event::empty_in(SiteSet ambient, SiteSet r) {
    assert((r & ~ambient) == 0);
    return from_predicate(ambient, [r](SiteSet q) { return (q & r) == 0; });
}

Event Event::exists_in(SiteSet ambient, SiteSet r) {
    assert((r & ~ambient) == 0);
    return from_predicate(ambient, [r](SiteSet q) { return (q & r) != 0; });
}

Event Event::all_in(SiteSet ambient, SiteSet r) {
    assert((r & ~ambient) == 0);
    return from_predicate(ambient, [r](SiteSet q) { return (q & ~r) == 0; });
}

bool Event::contains(SiteSet global_config) const {
    assert((global_config & ~ambient_) == 0);
    return members_.test(global_to_compact(global_config, ambient_));
}

Event Event::complement() const { return Event(ambient_, ~members_); }

Event Event::operator&(const Event &o) const {
    assert(ambient_ == o.ambient_);
    Bitset m = members_;
    m &= o.members_;
    return Event(ambient_, std::move(m));
}

Event Event::operator|(const Event &o) const {
    assert(ambient_ == o.ambient_);
    Bitset m = members_;
    m |= o.members_;
    return Event(ambient_, std::move(m));
}

bool Event::is_subset_of(const Event &o) const {
    assert(ambient_ == o.ambient_);
    return members_.is_subset_of(o.members_);
}

bool Event::disjoint(const Event &o) const {
    assert(ambient_ == o.ambient_);
    return !members_.intersects(o.members_);
}

std::uint64_t OutcomeSeq::key() const {
    std::uint64_t out = 0;
    for (std::uint32_t row : rows)
        for (int l = 0; l < r; ++l)
            out = (out << 1) | ((row >> l) & 1);
    return out;
}

OutcomePattern pattern_of(const OutcomeSeq &s) {
    std::uint32_t bits = 0;
    for (std::uint32_t row : s.rows)
        bits |= row;
    return OutcomePattern{s.r, bits};
}

Event round_event(std::uint32_t s_row, const SliceDecomposition &dec, int k) {
    const SiteSet ambient = full_sites(dec.sigma.n_sites());
    Event e = Event::all_configs(ambient);
    const SliceRound &round = dec.round(k);
    for (int l = 0; l < dec.partition.r(); ++l) {
        const SiteSet cell = round.cells[l].in_b;
        e = e & (((s_row >> l) & 1) ? Event::exists_in(ambient, cell)
                                    : Event::empty_in(ambient, cell));
    }
    return e;
}

Event round_event_on_strip(std::uint32_t s_row, const SliceDecomposition &dec, int k) {
    const SliceRound &round = dec.round(k);
    const SiteSet ambient = round.b;
    Event e = Event::all_configs(ambient);
    for (int l = 0; l < dec.partition.r(); ++l) {
        const SiteSet cell = round.cells[l].in_b;
        e = e & (((s_row >> l) & 1) ? Event::exists_in(ambient, cell)
                                    : Event::empty_in(ambient, cell));
    }
    return e;
}

Event pattern_event(const OutcomePattern &pattern, const Partition &p) {
    const SiteSet ambient = full_sites(p.n_sites());
    Event e = Event::all_configs(ambient);
    for (int l = 0; l < p.r(); ++l) {
        e = e & (pattern.bit(l) ? Event::exists_in(ambient, p.patch(l))
                                : Event::empty_in(ambient, p.patch(l)));
    }
    return e;
}

EventTriple record_slab_events(const OutcomeSeq &s, const SliceDecomposition &dec) {
    const SiteSet ambient = full_sites(dec.sigma.n_sites());
    Event shrunk = Event::all_configs(ambient);
    Event mid = Event::all_configs(ambient);
    Event grown = Event::all_configs(ambient);
    for (int k = s.kappa; k <= s.k_max(); ++k) {
        const SliceRound &round = dec.round(k);
        for (int l = 0; l < s.r; ++l) {
            const PatchCells &cell = round.cells[l];
            if (s.bit(k, l)) {
                shrunk = shrunk & Event::exists_in(ambient, cell.c_shrunk);
                mid = mid & Event::exists_in(ambient, cell.in_c);
                grown = grown & Event::exists_in(ambient, cell.c_grown);
            } else {
                shrunk = shrunk & Event::empty_in(ambient, cell.c_grown);
                mid = mid & Event::empty_in(ambient, cell.in_c);
                grown = grown & Event::empty_in(ambient, cell.c_shrunk);
            }
        }
    }
    return {std::move(shrunk), std::move(mid), std::move(grown)};
}

namespace {

// Membership of a configuration in the union over compatible records of the
// per-record slab event, without enumerating records: per (k, l) compute the
// admissible outcome bits, then check a per-patch assignment exists.
bool union_member(SiteSet q, const OutcomePattern &pattern, const SliceDecomposition &dec,
                  SiteSet PatchCells::*zero_cell, SiteSet PatchCells::*one_cell) {
    for (int l = 0; l < pattern.r; ++l) {
        bool any_one = false;
        for (int k = dec.kappa; k <= dec.k_max; ++k) {
            const PatchCells &cell = dec.round(k).cells[l];
            const bool zero_ok = (q & cell.*zero_cell) == 0;
            const bool one_ok = (q & cell.*one_cell) != 0;
            if (pattern.bit(l) == 0) {
                if (!zero_ok)
                    return false;
            } else {
                if (!zero_ok && !one_ok)
                    return false;
                any_one = any_one || one_ok;
            }
        }
        if (pattern.bit(l) == 1 && !any_one)
            return false;
    }
    return true;
}

} // namespace

EventTriple pattern_slab_events(const OutcomePattern &pattern, const SliceDecomposition &dec) {
    const SiteSet ambient = full_sites(dec.sigma.n_sites());
    // Which cell plays "must be empty" / "may fire" differs per bracket side.
    Event shrunk = Event::from_predicate(ambient, [&](SiteSet q) {
        return union_member(q, pattern, dec, &PatchCells::c_grown, &PatchCells::c_shrunk);
    });
    Event mid = Event::from_predicate(ambient, [&](SiteSet q) {
        return union_member(q, pattern, dec, &PatchCells::in_c, &PatchCells::in_c);
    });
    Event grown = Event::from_predicate(ambient, [&](SiteSet q) {
        return union_member(q, pattern, dec, &PatchCells::c_shrunk, &PatchCells::c_grown);
    });
    return {std::move(shrunk), std::move(mid), std::move(grown)};
}

PatchBandEvents pattern_band_events(const OutcomePattern &pattern, const Partition &p,
                                    const PatchBands &bands) {
    const SiteSet ambient = full_sites(p.n_sites());
    Event lower = Event::empty_in(ambient, bands.boundary);
    Event upper = Event::all_configs(ambient);
    for (int l = 0; l < p.r(); ++l) {
        if (pattern.bit(l)) {
            lower = lower & Event::exists_in(ambient, bands.shrunk[l]);
            upper = upper & Event::exists_in(ambient, bands.grown[l]);
        } else {
            lower = lower & Event::empty_in(ambient, bands.grown[l]);
            upper = upper & Event::empty_in(ambient, bands.shrunk[l]);
        }
    }
    return {std::move(lower), std::move(upper)};
}

std::vector<OutcomeSeq> compatible_outcomes(const OutcomePattern &pattern, int kappa,
                                            int k_max) {
    const int n_rounds = k_max - kappa + 1;
    // Per patch: the list of admissible column bit-vectors over rounds.
    std::vector<std::vector<std::uint32_t>> columns(pattern.r);
    for (int l = 0; l < pattern.r; ++l) {
        if (pattern.bit(l) == 0) {
            columns[l].push_back(0);
        } else {
            for (std::uint32_t c = 1; c < (1u << n_rounds); ++c)
                columns[l].push_back(c);
        }
    }
    std::vector<OutcomeSeq> out;
    std::vector<std::size_t> pick(pattern.r, 0);
    while (true) {
        OutcomeSeq s{kappa, pattern.r, std::vector<std::uint32_t>(n_rounds, 0)};
        for (int l = 0; l < pattern.r; ++l) {
            const std::uint32_t col = columns[l][pick[l]];
            for (int k = 0; k < n_rounds; ++k)
                if ((col >> k) & 1)
                    s.rows[k] |= 1u << l;
        }
        out.push_back(std::move(s));
        int l = pattern.r - 1;
        while (l >= 0 && ++pick[l] == columns[l].size()) {
            pick[l] = 0;
            --l;
        }
        if (l < 0)
            break;
    }
    std::sort(out.begin(), out.end(),
              [](const OutcomeSeq &a, const OutcomeSeq &b) { return a.key() < b.key(); });
    return out;
}

std::uint64_t compatible_outcome_count(const OutcomePattern &pattern, int n_rounds) {
    std::uint64_t c = 1;
    for (int l = 0; l < pattern.r; ++l)
        if (pattern.bit(l))
            c *= (std::uint64_t{1} << n_rounds) - 1;
    return c;
}

Reconstruction reconstruct_distribution(const std::vector<double> &vacuum_probs, int n_sites) {
    const std::size_t dim = std::size_t{1} << n_sites;
    if (vacuum_probs.size() != dim)
        throw std::invalid_argument("reconstruct_distribution: need one entry per site subset");
    const std::uint32_t full = static_cast<std::uint32_t>(dim - 1);
    // g[C] = P(configuration contained in C) = vacuum probability of C^c.
    std::vector<double> g(dim);
    for (std::uint32_t c = 0; c < dim; ++c)
        g[c] = vacuum_probs[full & ~c];
    // In-place Moebius inversion over the subset lattice.
    for (int bitpos = 0; bitpos < n_sites; ++bitpos) {
        const std::uint32_t bit = 1u << bitpos;
        for (std::uint32_t c = 0; c < dim; ++c)
            if (c & bit)
                g[c] -= g[c ^ bit];
    }
    Reconstruction rec{std::move(g), 0.0, true};
    for (double v : rec.p)
        rec.min_mass = std::min(rec.min_mass, v);
    rec.consistent = rec.min_mass >= -1e-9;
    return rec;
}

} // namespace cborn
