#include "curvedborn/protocol.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace cborn {

namespace {

SiteBasis full_basis(const RunSpec &spec) {
    return SiteBasis::over(spec.model.species, full_sites(spec.sigma.n_sites()));
}

Matrix density_as_matrix(const DensityOp &rho) {
    Matrix m(static_cast<int>(rho.dim()), static_cast<int>(rho.dim()));
    m.a = rho.mat();
    return m;
}

DensityOp matrix_as_density(const SiteBasis &basis, Matrix m) {
    DensityOp rho(basis);
    rho.mat() = std::move(m.a);
    return rho;
}

} // namespace

double SequentialResult::prob_of(const OutcomeSeq &s) const {
    const std::uint64_t key = s.key();
    auto it = std::lower_bound(outcomes.begin(), outcomes.end(), key,
                               [](const auto &entry, std::uint64_t k) {
                                   return entry.first.key() < k;
                               });
    if (it != outcomes.end() && it->first.key() == key)
        return it->second;
    return 0.0;
}

DetectionOutcome detection_map(const DensityOp &rho, std::uint32_t s_row,
                               const SliceDecomposition &dec, int k, bool retain_detected,
                               double prune_tol) {
    const PvmProjector proj =
        PvmProjector::from_event(round_event(s_row, dec, k), rho.basis());
    DetectionOutcome out;
    out.weight = proj.expectation(rho);
    if (out.weight <= prune_tol) {
        out.pruned = true;
        return out;
    }
    DensityOp collapsed = rho;
    proj.apply(collapsed);
    for (cplx &v : collapsed.mat())
        v /= out.weight;
    if (!retain_detected) {
        const SliceRound &round = dec.round(k);
        const SiteSet strip = round.b | round.rest;
        collapsed = embed_vacuum(partial_trace(collapsed, strip), strip);
    }
    out.collapsed = std::move(collapsed);
    return out;
}

DensityOp first_surface_prepare(const RunSpec &spec, const SliceDecomposition &dec) {
    const int n = spec.sigma.n_sites();
    const SliceRound &prep = dec.round(dec.kappa - 1);
    DensityOp rho = DensityOp::from_pure(spec.psi0);
    rho = evolve(rho, Surface::flat(n, 0), dec.upsilon(dec.kappa - 1), spec.model);
    const SiteSet strip = prep.b | prep.rest;
    if (strip != 0)
        rho = embed_vacuum(partial_trace(rho, strip), strip);
    return rho;
}

SequentialResult run_sequential(const RunSpec &spec) {
    SequentialResult result{slice_decompose(spec.sigma, spec.partition, spec.m), {}, {}, 0.0};
    const SliceDecomposition &dec = result.dec;
    const int r = spec.partition.r();
    if (r * dec.n_rounds() > kMaxBranchBits)
        throw CapacityError("run: " + std::to_string(r) + " patches over " +
                            std::to_string(dec.n_rounds()) +
                            " rounds exceed the branch budget of 2^" +
                            std::to_string(kMaxBranchBits) + " records");
    result.pattern_probs.assign(std::size_t{1} << r, 0.0);

    DensityOp rho0 = first_surface_prepare(spec, dec);

    std::vector<std::uint32_t> rows(dec.n_rounds(), 0);
    auto walk = [&](auto &&self, int k, const DensityOp &rho_prev, double weight) -> void {
        DensityOp rho = evolve(rho_prev, dec.upsilon(k - 1), dec.upsilon(k), spec.model);
        for (std::uint32_t s_row = 0; s_row < (1u << r); ++s_row) {
            DetectionOutcome step =
                detection_map(rho, s_row, dec, k, spec.retain_detected, spec.prune_tol);
            if (step.pruned)
                continue;
            rows[k - dec.kappa] = s_row;
            const double w = weight * step.weight;
            if (k == dec.k_max) {
                OutcomeSeq s{dec.kappa, r, rows};
                result.pattern_probs[pattern_of(s).bits] += w;
                result.total += w;
                result.outcomes.emplace_back(std::move(s), w);
            } else {
                self(self, k + 1, step.collapsed, w);
            }
        }
    };
    walk(walk, dec.kappa, rho0, 1.0);
    std::sort(result.outcomes.begin(), result.outcomes.end(),
              [](const auto &a, const auto &b) { return a.first.key() < b.first.key(); });
    return result;
}

StateVector surface_state(const RunSpec &spec) {
    return evolve(spec.psi0, Surface::flat(spec.sigma.n_sites(), 0), spec.sigma, spec.model);
}

std::vector<double> coarse_grain(const SequentialResult &result) {
    const int r = result.dec.partition.r();
    std::vector<double> out(std::size_t{1} << r, 0.0);
    for (std::uint32_t bits = 0; bits < (1u << r); ++bits) {
        const OutcomePattern pattern{r, bits};
        for (const OutcomeSeq &s :
             compatible_outcomes(pattern, result.dec.kappa, result.dec.k_max))
            out[bits] += result.prob_of(s);
    }
    return out;
}

ClosedFormEvaluator::ClosedFormEvaluator(const RunSpec &spec, const SliceDecomposition &dec)
    : dec_(dec), species_(spec.model.species), psi_sigma_(surface_state(spec)) {
    for (int k = dec.kappa; k <= dec.k_max; ++k) {
        const SliceRound &round = dec.round(k);
        w_per_round_.push_back(reduced_evolution_w_to(round.c, dec.sigma, dec.upsilon(k),
                                                      round.b, spec.model));
    }
}

double ClosedFormEvaluator::prob(const OutcomeSeq &s) const {
    StateVector phi = psi_sigma_;
    for (int k = dec_.kappa; k <= dec_.k_max; ++k) {
        const SliceRound &round = dec_.round(k);
        const ReducedEvolution &red = w_per_round_[k - dec_.kappa];
        const Event strip_event = round_event_on_strip(s.rows[k - s.kappa], dec_, k);
        const PvmProjector proj = PvmProjector::from_event(strip_event, red.to_basis);
        // W^dagger P W on the slab factor.
        Matrix masked = red.w;
        for (int row = 0; row < masked.rows; ++row)
            if (!proj.keeps(static_cast<std::size_t>(row)))
                for (int col = 0; col < masked.cols; ++col)
                    masked(row, col) = cplx{};
        const Matrix transported = adjoint(red.w) * masked;
        const std::vector<int> slab_sites = site_list(round.c);
        apply_gate(phi, slab_sites, transported);
    }
    const cplx amp = psi_sigma_.inner(phi);
    return amp.real();
}

double closed_form_probability(const RunSpec &spec, const SliceDecomposition &dec,
                               const OutcomeSeq &s) {
    return ClosedFormEvaluator(spec, dec).prob(s);
}

double curved_born(const RunSpec &spec, const OutcomePattern &pattern) {
    const StateVector psi = surface_state(spec);
    return curved_born_event(psi, pattern_event(pattern, spec.partition));
}

double curved_born_event(const StateVector &psi_sigma, const Event &e) {
    return PvmProjector::from_event(e, psi_sigma.basis()).expectation(psi_sigma);
}

Bracket detection_bounds(const RunSpec &spec, const SliceDecomposition &dec,
                         const OutcomePattern &pattern) {
    const StateVector psi = surface_state(spec);
    const EventTriple triple = pattern_slab_events(pattern, dec);
    return {curved_born_event(psi, triple.shrunk), curved_born_event(psi, triple.grown)};
}

Bracket patch_bounds(const RunSpec &spec, const OutcomePattern &pattern, int m) {
    const StateVector psi = surface_state(spec);
    const PatchBands bands = patch_shrink_grow(spec.partition, m);
    const PatchBandEvents events = pattern_band_events(pattern, spec.partition, bands);
    return {curved_born_event(psi, events.lower), curved_born_event(psi, events.upper)};
}

std::vector<TrailCheck> trail_checks(const RunSpec &spec, const OutcomeSeq &s) {
    const SliceDecomposition dec = slice_decompose(spec.sigma, spec.partition, spec.m);
    assert(s.kappa == dec.kappa && s.k_max() == dec.k_max);
    const SiteBasis full = full_basis(spec);

    // Sequential chain.
    DensityOp rho_prev = first_surface_prepare(spec, dec);
    // Undetected-region chain.
    const SliceRound &prep = dec.round(dec.kappa - 1);
    DensityOp rho_region = partial_trace(
        evolve(DensityOp::from_pure(spec.psi0), Surface::flat(full.n_sites(), 0),
               dec.upsilon(dec.kappa - 1), spec.model),
        prep.b | prep.rest);

    std::vector<TrailCheck> checks;
    for (int k = dec.kappa; k <= dec.k_max; ++k) {
        const SliceRound &round = dec.round(k);
        const SliceRound &prev_round = dec.round(k - 1);
        TrailCheck check;
        check.k = k;

        DensityOp rho_k = evolve(rho_prev, dec.upsilon(k - 1), dec.upsilon(k), spec.model);
        const PvmProjector proj =
            PvmProjector::from_event(round_event(s.rows[k - s.kappa], dec, k), full);
        const double weight = proj.expectation(rho_k);

        // Transport form: rho_k reconstructed from the previous region state.
        const SiteSet prev_region = prev_round.a;
        const SiteSet target = round.a | round.b;
        const ReducedEvolution red = reduced_evolution_w_to(
            prev_region, dec.upsilon(k - 1), dec.upsilon(k), target, spec.model);
        const Matrix moved =
            red.w * density_as_matrix(rho_region) * adjoint(red.w);
        const DensityOp rebuilt =
            embed_vacuum(matrix_as_density(red.to_basis, moved), full.site_mask() & ~target);
        double diff = 0.0;
        for (std::size_t i = 0; i < full.dim() * full.dim(); ++i)
            diff = std::max(diff, std::abs(rebuilt.mat()[i] - rho_k.mat()[i]));
        check.transport_form = diff;

        // Conditional probability evaluated on the rebuilt state.
        check.cond_prob = std::abs(proj.expectation(rebuilt) - weight);

        // Region-state update: transport into a|c, apply the transported
        // strip projection one-sidedly, trace the slab.
        const Surface mixed = dec.between(k - 1, k);
        Matrix u_red = region_evolution_matrix(prev_region, dec.upsilon(k - 1), mixed,
                                               spec.model);
        const SiteBasis region_basis = SiteBasis::over(spec.model.species, prev_region);
        Matrix sigma_rho = u_red * density_as_matrix(rho_region) * adjoint(u_red);
        const ReducedEvolution w_slab = reduced_evolution_w_to(round.c, dec.sigma,
                                                               dec.upsilon(k), round.b,
                                                               spec.model);
        const PvmProjector strip_proj = PvmProjector::from_event(
            round_event_on_strip(s.rows[k - s.kappa], dec, k), w_slab.to_basis);
        Matrix masked = w_slab.w;
        for (int row = 0; row < masked.rows; ++row)
            if (!strip_proj.keeps(static_cast<std::size_t>(row)))
                for (int col = 0; col < masked.cols; ++col)
                    masked(row, col) = cplx{};
        const Matrix transported = adjoint(w_slab.w) * masked;
        left_multiply_gate(sigma_rho, region_basis, site_list(round.c), transported);
        DensityOp projected = matrix_as_density(region_basis, std::move(sigma_rho));
        DensityOp next_region = partial_trace(projected, round.c);
        const double region_weight = next_region.trace_real();
        check.norm_match = std::abs(region_weight - weight);
        if (region_weight > spec.prune_tol)
            for (cplx &v : next_region.mat())
                v /= region_weight;

        // Product form of the collapsed state.
        DetectionOutcome step = detection_map(rho_k, s.rows[k - s.kappa], dec, k);
        if (!step.pruned) {
            const DensityOp product =
                embed_vacuum(next_region, full.site_mask() & ~round.a);
            double pdiff = 0.0;
            for (std::size_t i = 0; i < full.dim() * full.dim(); ++i)
                pdiff = std::max(pdiff,
                                 std::abs(product.mat()[i] - step.collapsed.mat()[i]));
            check.product_form = pdiff;
            rho_prev = std::move(step.collapsed);
        }
        rho_region = std::move(next_region);
        checks.push_back(check);
    }
    return checks;
}

SweepResult convergence_sweep(const RunSpec &base, const std::vector<int> &ms) {
    SweepResult sweep;
    const int r = base.partition.r();
    std::vector<std::vector<SweepRow>> by_m;
    for (int m : ms) {
        RunSpec spec = base;
        spec.m = m;
        const SequentialResult result = run_sequential(spec);
        const StateVector psi = surface_state(spec);
        std::vector<SweepRow> rows;
        for (std::uint32_t bits = 0; bits < (1u << r); ++bits) {
            const OutcomePattern pattern{r, bits};
            SweepRow row;
            row.m = m;
            row.pattern_bits = bits;
            const EventTriple triple = pattern_slab_events(pattern, result.dec);
            row.lower_slab = curved_born_event(psi, triple.shrunk);
            row.upper_slab = curved_born_event(psi, triple.grown);
            const PatchBandEvents bands = pattern_band_events(
                pattern, spec.partition, patch_shrink_grow(spec.partition, m));
            row.lower_patch = curved_born_event(psi, bands.lower);
            row.upper_patch = curved_born_event(psi, bands.upper);
            row.sequential = result.pattern_probs[bits];
            row.born = curved_born_event(psi, pattern_event(pattern, spec.partition));
            rows.push_back(row);

            double v = 0.0;
            v = std::max(v, row.lower_patch - row.lower_slab);
            v = std::max(v, row.lower_slab - row.sequential);
            v = std::max(v, row.sequential - row.upper_slab);
            v = std::max(v, row.upper_slab - row.upper_patch);
            v = std::max(v, row.lower_patch - row.born);
            v = std::max(v, row.born - row.upper_patch);
            sweep.bracket_violation = std::max(sweep.bracket_violation, v);
        }
        by_m.push_back(rows);
        sweep.rows.insert(sweep.rows.end(), rows.begin(), rows.end());
    }
    for (std::size_t i = 1; i < by_m.size(); ++i) {
        if (ms[i] >= ms[i - 1])
            continue; // nesting is claimed only along decreasing m
        for (std::size_t j = 0; j < by_m[i].size(); ++j) {
            sweep.monotonicity_violation =
                std::max(sweep.monotonicity_violation,
                         by_m[i - 1][j].lower_patch - by_m[i][j].lower_patch);
            sweep.monotonicity_violation =
                std::max(sweep.monotonicity_violation,
                         by_m[i][j].upper_patch - by_m[i - 1][j].upper_patch);
        }
    }
    if (!by_m.empty())
        for (const SweepRow &row : by_m.back())
            sweep.finest_gap = std::max(sweep.finest_gap, std::abs(row.sequential - row.born));
    return sweep;
}

} // namespace cborn
