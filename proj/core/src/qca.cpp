#include "curvedborn/qca.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace cborn {

namespace {
constexpr double kCreationAngle = 0.3; // fixed angle of the vacuum_creation defect
constexpr double kLongPhase = 1.0471975511965976; // pi/3
} // namespace

GateModel GateModel::free_walk(double theta) {
    GateModel m;
    m.species = Species::x_only;
    m.theta = theta;
    m.interacting = false;
    return m;
}

GateModel GateModel::emission_absorption(double theta, double theta_y, double lambda,
                                         double phase) {
    GateModel m;
    m.species = Species::xy;
    m.theta = theta;
    m.theta_y = theta_y;
    m.lambda = lambda;
    m.phase = phase;
    m.interacting = true;
    return m;
}

bool GateModel::has_defect(Defect d) const {
    return std::find(defects.begin(), defects.end(), d) != defects.end();
}

namespace {

Matrix coin_matrix(const GateModel &model) {
    const double c = std::cos(model.theta);
    const cplx is = cplx{0.0, std::sin(model.theta)};
    Matrix c3 = Matrix::identity(3);
    c3(x_up, x_up) = c;
    c3(x_up, x_down) = is;
    c3(x_down, x_up) = is;
    c3(x_down, x_down) = c;
    if (model.species == Species::x_only)
        return c3;
    Matrix c6(6, 6);
    for (int y = 0; y < 2; ++y)
        for (int xr = 0; xr < 3; ++xr)
            for (int xc = 0; xc < 3; ++xc)
                c6(xr + 3 * y, xc + 3 * y) = c3(xr, xc);
    return c6;
}

Matrix interaction_matrix(const GateModel &model) {
    const int d = local_dim(model.species);
    Matrix g = Matrix::identity(d);
    if (model.species == Species::xy && model.interacting) {
        const double c = std::cos(model.lambda);
        const cplx e = std::polar(std::sin(model.lambda), model.phase);
        for (int x = 1; x <= 2; ++x) {
            // rotate (x, no y) <-> (x, y); the empty-x sector is untouched
            g(x, x) = c;
            g(x + 3, x) = e;
            g(x, x + 3) = -std::conj(e);
            g(x + 3, x + 3) = c;
        }
    }
    if (model.has_defect(Defect::vacuum_creation)) {
        if (model.species != Species::xy)
            throw std::invalid_argument("vacuum_creation defect needs the y species");
        const double c = std::cos(kCreationAngle);
        const double s = std::sin(kCreationAngle);
        Matrix creation = Matrix::identity(6);
        creation(0, 0) = c;
        creation(3, 0) = s;
        creation(0, 3) = -s;
        creation(3, 3) = c;
        g = g * creation;
    }
    return g;
}

Matrix shift_matrix(const GateModel &model) {
    if (model.species == Species::x_only) {
        // Pair swap: (xa, xb) -> (xb, xa); occupation crosses one site per
        // layer, blocked double occupancy is inert.
        Matrix s(9, 9);
        for (int xa = 0; xa < 3; ++xa)
            for (int xb = 0; xb < 3; ++xb)
                s(xb + 3 * xa, xa + 3 * xb) = 1.0;
        return s;
    }
    // x part swaps, y part hops lazily between the two sites.
    const double c = std::cos(model.theta_y);
    const cplx is = cplx{0.0, std::sin(model.theta_y)};
    Matrix gy(4, 4); // index ya + 2*yb
    gy(0, 0) = 1.0;
    gy(3, 3) = 1.0;
    gy(1, 1) = c;
    gy(1, 2) = is;
    gy(2, 1) = is;
    gy(2, 2) = c;
    Matrix s(36, 36);
    for (int xa = 0; xa < 3; ++xa)
        for (int xb = 0; xb < 3; ++xb)
            for (int yr = 0; yr < 4; ++yr)
                for (int yc = 0; yc < 4; ++yc) {
                    if (gy(yr, yc) == cplx{})
                        continue;
                    const int ya_r = yr & 1, yb_r = yr >> 1;
                    const int ya_c = yc & 1, yb_c = yc >> 1;
                    const int row = (xb + 3 * ya_r) + 6 * (xa + 3 * yb_r);
                    const int col = (xa + 3 * ya_c) + 6 * (xb + 3 * yb_c);
                    s(row, col) = gy(yr, yc);
                }
    return s;
}

Matrix long_phase_matrix(int d) {
    Matrix g = Matrix::identity(d * d);
    const cplx ph = std::polar(1.0, kLongPhase);
    for (int a = 1; a < d; ++a)
        for (int b = 1; b < d; ++b)
            g(a + d * b, a + d * b) = ph;
    return g;
}

} // namespace

LocalGates local_gates(const GateModel &model) {
    LocalGates g;
    g.d = local_dim(model.species);
    g.coin = coin_matrix(model);
    g.interaction = interaction_matrix(model);
    g.on_site = g.interaction * g.coin;
    g.shift = shift_matrix(model);
    return g;
}

std::vector<int> GateOp::sites(int n_sites) const {
    (void)n_sites;
    switch (kind) {
    case Kind::on_site:
        return {site};
    case Kind::shift:
    case Kind::shift_extra:
        return {site, site + 1};
    case Kind::long_phase:
        return {site, site + 2};
    }
    return {};
}

bool is_brickwork_cut(const Surface &s) {
    for (int a = 0; a + 1 < s.n_sites(); ++a) {
        if (s.layer(a) == s.layer(a + 1))
            continue;
        const int t = std::min(s.layer(a), s.layer(a + 1));
        if (((a + t) % 2 + 2) % 2 == 0)
            return false; // the step cuts the transport gate at (a, a+1, t)
    }
    return true;
}

namespace {

std::vector<GateOp> all_gates_upto(int max_layer, int n, const GateModel &model) {
    std::vector<GateOp> out;
    const bool extra = model.has_defect(Defect::superluminal_shift);
    const bool nonlocal = model.has_defect(Defect::nonlocal_phase) && n >= 3;
    for (int t = 0; t < max_layer; ++t) {
        for (int x = 0; x < n; ++x)
            out.push_back({GateOp::Kind::on_site, t, 0, x});
        for (int a = (t % 2 + 2) % 2; a + 1 < n; a += 2)
            out.push_back({GateOp::Kind::shift, t, 1, a});
        if (extra)
            for (int a = ((t + 1) % 2 + 2) % 2; a + 1 < n; a += 2)
                out.push_back({GateOp::Kind::shift_extra, t, 2, a});
        if (nonlocal && t == 0)
            out.push_back({GateOp::Kind::long_phase, t, 3, 0});
    }
    return out;
}

bool below_surface(const GateOp &op, const Surface &s) {
    for (int x : op.sites(s.n_sites()))
        if (s.layer(x) < op.layer + 1)
            return false;
    return true;
}

const Matrix &matrix_of(const GateOp &op, const LocalGates &gates, const Matrix &longph) {
    switch (op.kind) {
    case GateOp::Kind::on_site:
        return gates.on_site;
    case GateOp::Kind::shift:
    case GateOp::Kind::shift_extra:
        return gates.shift;
    case GateOp::Kind::long_phase:
        return longph;
    }
    return gates.on_site;
}

} // namespace

std::vector<GateOp> gates_below(const Surface &s, const GateModel &model) {
    std::vector<GateOp> out;
    const int top = std::max(0, s.max_layer());
    for (const GateOp &op : all_gates_upto(top, s.n_sites(), model))
        if (below_surface(op, s))
            out.push_back(op);
    return out;
}

GatePlan gates_between(const Surface &from, const Surface &to, const GateModel &model) {
    assert(from.n_sites() == to.n_sites());
    const int top = std::max({0, from.max_layer(), to.max_layer()});
    GatePlan plan;
    for (const GateOp &op : all_gates_upto(top, from.n_sites(), model)) {
        const bool in_from = below_surface(op, from);
        const bool in_to = below_surface(op, to);
        if (in_from && !in_to)
            plan.undo.push_back(op);
        else if (in_to && !in_from)
            plan.apply.push_back(op);
    }
    std::reverse(plan.undo.begin(), plan.undo.end());
    return plan;
}

void apply_gate_op(StateVector &psi, const GateOp &op, const LocalGates &gates,
                   bool adjoint_gate) {
    static const Matrix empty;
    const Matrix longph = (op.kind == GateOp::Kind::long_phase)
                              ? long_phase_matrix(gates.d)
                              : empty;
    const Matrix &g = matrix_of(op, gates, longph);
    const std::vector<int> sites = op.sites(psi.basis().n_sites());
    if (adjoint_gate)
        apply_gate(psi, sites, adjoint(g));
    else
        apply_gate(psi, sites, g);
}

namespace {

template <class StateLike, class ApplyFn>
void run_plan(StateLike &state, const Surface &from, const Surface &to,
              const GateModel &model, ApplyFn &&apply_fn) {
    const LocalGates gates = local_gates(model);
    const Matrix longph = long_phase_matrix(gates.d);
    const GatePlan plan = gates_between(from, to, model);
    for (const GateOp &op : plan.undo)
        apply_fn(state, op.sites(from.n_sites()), adjoint(matrix_of(op, gates, longph)));
    for (const GateOp &op : plan.apply)
        apply_fn(state, op.sites(from.n_sites()), matrix_of(op, gates, longph));
}

} // namespace

StateVector evolve(const StateVector &psi, const Surface &from, const Surface &to,
                   const GateModel &model) {
    assert(psi.basis().n_sites() == from.n_sites());
    StateVector out = psi;
    run_plan(out, from, to, model,
             [](StateVector &s, const std::vector<int> &sites, const Matrix &g) {
                 apply_gate(s, sites, g);
             });
    return out;
}

DensityOp evolve(const DensityOp &rho, const Surface &from, const Surface &to,
                 const GateModel &model) {
    assert(rho.basis().n_sites() == from.n_sites());
    DensityOp out = rho;
    run_plan(out, from, to, model,
             [](DensityOp &r, const std::vector<int> &sites, const Matrix &g) {
                 conjugate_gate(r, sites, g);
             });
    return out;
}

Matrix region_evolution_matrix(SiteSet region, const Surface &from, const Surface &to,
                               const GateModel &model) {
    const SiteBasis basis = SiteBasis::over(model.species, region);
    Matrix u = Matrix::identity(static_cast<int>(basis.dim()));
    const LocalGates gates = local_gates(model);
    const Matrix longph = long_phase_matrix(gates.d);
    const GatePlan plan = gates_between(from, to, model);
    auto check_inside = [&](const GateOp &op) {
        for (int x : op.sites(from.n_sites()))
            if (!(region & site_bit(x)))
                throw std::logic_error("region evolution: plan gate leaves the region");
    };
    for (const GateOp &op : plan.undo) {
        check_inside(op);
        left_multiply_gate(u, basis, op.sites(from.n_sites()),
                           adjoint(matrix_of(op, gates, longph)));
    }
    for (const GateOp &op : plan.apply) {
        check_inside(op);
        left_multiply_gate(u, basis, op.sites(from.n_sites()), matrix_of(op, gates, longph));
    }
    return u;
}

namespace {

// Full-lattice basis state with the region digits set per `sub`, vacuum rest.
StateVector lattice_basis_state(const SiteBasis &full, const SiteBasis &region_basis,
                                std::size_t sub) {
    StateVector psi(full);
    std::size_t idx = 0;
    for (int i = 0; i < region_basis.n_sites(); ++i) {
        const int digit = region_basis.digit(sub, i);
        const int pos = full.pos_of_site(region_basis.sites()[i]);
        std::size_t stride = 1;
        for (int j = 0; j < pos; ++j)
            stride *= static_cast<std::size_t>(full.d());
        idx += static_cast<std::size_t>(digit) * stride;
    }
    psi.amps()[idx] = 1.0;
    return psi;
}

// Extract the sub-index of the digits belonging to `mask` (little-endian over
// the ascending sites of mask).
std::size_t sub_index(const SiteBasis &basis, std::size_t idx, SiteSet mask) {
    std::size_t out = 0;
    std::size_t stride = 1;
    for (int i = 0; i < basis.n_sites(); ++i) {
        const int digit = basis.digit(idx, i);
        if (mask & site_bit(basis.sites()[i])) {
            out += static_cast<std::size_t>(digit) * stride;
            stride *= static_cast<std::size_t>(basis.d());
        }
    }
    return out;
}

} // namespace

ReducedEvolution reduced_evolution_w_to(SiteSet region, const Surface &from,
                                        const Surface &to, SiteSet target,
                                        const GateModel &model) {
    const int n = from.n_sites();
    const SiteBasis full = SiteBasis::over(model.species, full_sites(n));
    ReducedEvolution red;
    red.from_region = region;
    red.to_region = target;
    red.from_basis = SiteBasis::over(model.species, region);
    red.to_basis = SiteBasis::over(model.species, target);
    red.w = Matrix(static_cast<int>(red.to_basis.dim()),
                   static_cast<int>(red.from_basis.dim()));
    const SiteSet rest = full_sites(n) & ~target;
    for (std::size_t col = 0; col < red.from_basis.dim(); ++col) {
        const StateVector in = lattice_basis_state(full, red.from_basis, col);
        const StateVector out = evolve(in, from, to, model);
        double captured = 0.0;
        for (std::size_t i = 0; i < out.dim(); ++i) {
            if (out.amps()[i] == cplx{})
                continue;
            if (sub_index(full, i, rest) != 0)
                continue; // vacuum partial inner product drops this component
            const std::size_t row = sub_index(full, i, target);
            red.w(static_cast<int>(row), static_cast<int>(col)) = out.amps()[i];
            captured += std::norm(out.amps()[i]);
        }
        red.norm_deficit = std::max(red.norm_deficit, std::abs(1.0 - captured));
    }
    if (red.norm_deficit > 1e-8)
        throw FsViolationError(
            "reduced evolution is not norm preserving (deficit " +
            std::to_string(red.norm_deficit) +
            "); the model leaks amplitude outside the grown region");
    red.isometry_residual = max_abs(
        adjoint(red.w) * red.w - Matrix::identity(static_cast<int>(red.from_basis.dim())));
    return red;
}

ReducedEvolution reduced_evolution_w(SiteSet region, const Surface &from, const Surface &to,
                                     const GateModel &model) {
    const SiteSet target = grown_set({from, region}, to);
    return reduced_evolution_w_to(region, from, to, target, model);
}

namespace {

Matrix dense_lattice_evolution(const Surface &from, const Surface &to, const GateModel &model) {
    const SiteBasis full = SiteBasis::over(model.species, full_sites(from.n_sites()));
    Matrix u = Matrix::identity(static_cast<int>(full.dim()));
    const LocalGates gates = local_gates(model);
    const Matrix longph = long_phase_matrix(gates.d);
    const GatePlan plan = gates_between(from, to, model);
    for (const GateOp &op : plan.undo)
        left_multiply_gate(u, full, op.sites(from.n_sites()),
                           adjoint(matrix_of(op, gates, longph)));
    for (const GateOp &op : plan.apply)
        left_multiply_gate(u, full, op.sites(from.n_sites()), matrix_of(op, gates, longph));
    return u;
}

void require_shared(const Surface &from, const Surface &to, SiteSet shared) {
    for (int x : site_list(shared))
        if (from.layer(x) != to.layer(x))
            throw std::invalid_argument("verify: shared region must agree on both surfaces");
}

// V[i][j] = <vac_shared, i | U | vac_shared, j>, the reduced factor on the
// complement under the vacuum slice of the shared region.
Matrix extract_reduced_factor(const Matrix &u, const SiteBasis &full, SiteSet shared) {
    const SiteSet comp = full.site_mask() & ~shared;
    const SiteBasis comp_basis = SiteBasis::over(full.species(), comp);
    Matrix v(static_cast<int>(comp_basis.dim()), static_cast<int>(comp_basis.dim()));
    std::vector<std::size_t> embed(comp_basis.dim());
    for (std::size_t i = 0; i < full.dim(); ++i)
        if (sub_index(full, i, shared) == 0)
            embed[sub_index(full, i, comp)] = i;
    for (std::size_t r = 0; r < comp_basis.dim(); ++r)
        for (std::size_t c = 0; c < comp_basis.dim(); ++c)
            v(static_cast<int>(r), static_cast<int>(c)) = u.a[embed[r] * full.dim() + embed[c]];
    return v;
}

} // namespace

VerifierReport verify_il(const Surface &from, const Surface &to, SiteSet shared,
                         const GateModel &model, double tol) {
    require_shared(from, to, shared);
    if (shared == 0)
        return {true, 0.0, "shared region empty; factorization trivial"};
    const SiteBasis full = SiteBasis::over(model.species, full_sites(from.n_sites()));
    const Matrix u = dense_lattice_evolution(from, to, model);
    const Matrix v = extract_reduced_factor(u, full, shared);
    const SiteSet comp = full.site_mask() & ~shared;
    double residual = 0.0;
    for (std::size_t r = 0; r < full.dim(); ++r) {
        for (std::size_t c = 0; c < full.dim(); ++c) {
            cplx expected{};
            if (sub_index(full, r, shared) == sub_index(full, c, shared))
                expected = v(static_cast<int>(sub_index(full, r, comp)),
                             static_cast<int>(sub_index(full, c, comp)));
            residual = std::max(residual, std::abs(u.a[r * full.dim() + c] - expected));
        }
    }
    return {residual <= tol, residual, "dense factorization residual"};
}

VerifierReport verify_il_sampled(const Surface &from, const Surface &to, SiteSet shared,
                                 const GateModel &model, int probes, Rng &rng, double tol) {
    require_shared(from, to, shared);
    if (shared == 0)
        return {true, 0.0, "shared region empty; factorization trivial"};
    const int n = from.n_sites();
    const SiteBasis full = SiteBasis::over(model.species, full_sites(n));
    const SiteSet comp = full.site_mask() & ~shared;
    const SiteBasis comp_basis = SiteBasis::over(model.species, comp);
    // Reduced factor from the vacuum-shared columns.
    Matrix v(static_cast<int>(comp_basis.dim()), static_cast<int>(comp_basis.dim()));
    for (std::size_t col = 0; col < comp_basis.dim(); ++col) {
        const StateVector in = lattice_basis_state(full, comp_basis, col);
        const StateVector out = evolve(in, from, to, model);
        for (std::size_t i = 0; i < out.dim(); ++i) {
            if (out.amps()[i] == cplx{})
                continue;
            if (sub_index(full, i, shared) != 0)
                continue;
            v(static_cast<int>(sub_index(full, i, comp)), static_cast<int>(col)) +=
                out.amps()[i];
        }
    }
    double residual = 0.0;
    for (int p = 0; p < probes; ++p) {
        StateVector x = random_state(full, rng);
        const StateVector ux = evolve(x, from, to, model);
        // (I_shared (x) V) x, assembled blockwise over the shared index.
        StateVector vx(full);
        for (std::size_t i = 0; i < full.dim(); ++i) {
            if (x.amps()[i] == cplx{})
                continue;
            const std::size_t si = sub_index(full, i, shared);
            const std::size_t ci = sub_index(full, i, comp);
            for (std::size_t r = 0; r < comp_basis.dim(); ++r) {
                const cplx vr = v(static_cast<int>(r), static_cast<int>(ci));
                if (vr == cplx{})
                    continue;
                // full index with shared digits si and comp digits r
                std::size_t idx = 0;
                std::size_t stride = 1;
                std::size_t srem = si, crem = r;
                for (int pos = 0; pos < full.n_sites(); ++pos) {
                    const bool is_shared = (shared & site_bit(full.sites()[pos])) != 0;
                    std::size_t digit;
                    if (is_shared) {
                        digit = srem % static_cast<std::size_t>(full.d());
                        srem /= static_cast<std::size_t>(full.d());
                    } else {
                        digit = crem % static_cast<std::size_t>(full.d());
                        crem /= static_cast<std::size_t>(full.d());
                    }
                    idx += digit * stride;
                    stride *= static_cast<std::size_t>(full.d());
                }
                vx.amps()[idx] += vr * x.amps()[i];
            }
        }
        double diff = 0.0;
        for (std::size_t i = 0; i < full.dim(); ++i)
            diff += std::norm(ux.amps()[i] - vx.amps()[i]);
        residual = std::max(residual, std::sqrt(diff));
    }
    return {residual <= tol, residual, "sampled factorization residual"};
}

VerifierReport verify_il_independence(const Surface &from1, const Surface &to1,
                                      const Surface &from2, const Surface &to2,
                                      SiteSet shared, const GateModel &model, double tol) {
    require_shared(from1, to1, shared);
    require_shared(from2, to2, shared);
    for (int x : site_list(full_sites(from1.n_sites()) & ~shared))
        if (from1.layer(x) != from2.layer(x) || to1.layer(x) != to2.layer(x))
            throw std::invalid_argument("verify: complements must agree across the two pairs");
    const SiteBasis full = SiteBasis::over(model.species, full_sites(from1.n_sites()));
    const Matrix v1 =
        extract_reduced_factor(dense_lattice_evolution(from1, to1, model), full, shared);
    const Matrix v2 =
        extract_reduced_factor(dense_lattice_evolution(from2, to2, model), full, shared);
    const double residual = max_abs(v1 - v2);
    return {residual <= tol, residual, "reduced factor dependence on the shared region"};
}

VerifierReport verify_fs(SiteSet region, const Surface &from, const Surface &to,
                         const GateModel &model, int trials, Rng &rng, double tol) {
    const int n = from.n_sites();
    const SiteBasis full = SiteBasis::over(model.species, full_sites(n));
    const SiteSet grown = grown_set({from, region}, to);
    double residual = 0.0;
    for (int t = 0; t < trials; ++t) {
        const StateVector psi = random_state_concentrated(full, region, rng);
        const StateVector out = evolve(psi, from, to, model);
        double outside = 0.0;
        for (std::size_t i = 0; i < out.dim(); ++i)
            if (full.config_of(i) & ~grown)
                outside += std::norm(out.amps()[i]);
        residual = std::max(residual, std::sqrt(outside));
    }
    return {residual <= tol, residual, "amplitude outside the grown region"};
}

VerifierReport verify_fs_operator(SiteSet region, const Surface &from, const Surface &to,
                                  const GateModel &model, double tol) {
    const SiteBasis full = SiteBasis::over(model.species, full_sites(from.n_sites()));
    const Matrix u = dense_lattice_evolution(from, to, model);
    const SiteSet shrunk = shrunk_set({from, region}, to);
    // P_to(empty(shrunk)) - U P_from(empty(region)) U^dagger >= 0
    Matrix m(static_cast<int>(full.dim()), static_cast<int>(full.dim()));
    for (std::size_t i = 0; i < full.dim(); ++i)
        if ((full.config_of(i) & shrunk) == 0)
            m(static_cast<int>(i), static_cast<int>(i)) = 1.0;
    Matrix up(static_cast<int>(full.dim()), static_cast<int>(full.dim()));
    for (std::size_t c = 0; c < full.dim(); ++c) {
        if (full.config_of(c) & region)
            continue;
        for (std::size_t r = 0; r < full.dim(); ++r)
            up(static_cast<int>(r), static_cast<int>(c)) = u.a[r * full.dim() + c];
    }
    m = m - up * adjoint(up);
    const double min_eig = min_hermitian_eigenvalue(std::move(m));
    return {min_eig >= -tol, std::max(0.0, -min_eig), "projector ordering defect"};
}

VerifierReport verify_ncfv(const Surface &from, const Surface &to, const GateModel &model,
                           double tol) {
    const SiteBasis full = SiteBasis::over(model.species, full_sites(from.n_sites()));
    const StateVector out = evolve(StateVector::vacuum(full), from, to, model);
    const double overlap = std::abs(out.amps()[0]);
    const double residual = std::sqrt(std::max(0.0, 1.0 - overlap * overlap));
    return {residual <= tol, residual, "vacuum subspace drift"};
}

VerifierReport verify_ncfv_local(const Surface &from, const Surface &to, SiteSet shared,
                                 const GateModel &model, double tol) {
    require_shared(from, to, shared);
    const SiteBasis full = SiteBasis::over(model.species, full_sites(from.n_sites()));
    const Matrix u = dense_lattice_evolution(from, to, model);
    const Matrix v = extract_reduced_factor(u, full, shared);
    const double overlap = std::abs(v(0, 0));
    const double residual = std::sqrt(std::max(0.0, 1.0 - overlap * overlap));
    return {residual <= tol, residual, "local vacuum subspace drift"};
}

Surface staircase_surface(int n_sites, int base, int cap, bool descending) {
    std::vector<int> layers(n_sites);
    for (int x = 0; x < n_sites; ++x) {
        const int v = descending ? base - x : base + x;
        layers[x] = std::clamp(v, 0, cap);
    }
    Surface s(std::move(layers));
    if (!is_brickwork_cut(s))
        throw std::invalid_argument(
            descending ? "staircase: descending start layer must be even to avoid gate cuts"
                       : "staircase: ascending start layer must be odd to avoid gate cuts");
    return s;
}

Surface vee_surface(int n_sites, int base, int cap) {
    if (n_sites < 2)
        throw std::invalid_argument("vee: needs at least two sites");
    const int c0 = (n_sites - 1) / 2;
    const int c1 = c0 + 1;
    std::vector<int> layers(n_sites);
    for (int x = 0; x < n_sites; ++x) {
        const int rise = std::max({0, c0 - x, x - c1});
        layers[x] = std::min(base + rise, cap);
    }
    Surface s(std::move(layers));
    if (!is_brickwork_cut(s))
        throw std::invalid_argument("vee: base parity cuts a gate; base + floor((n-1)/2) "
                                    "must be even");
    return s;
}

std::vector<Surface> enumerate_cuts(int n_sites, int min_layer, int max_layer) {
    std::vector<Surface> out;
    std::vector<int> layers(n_sites);
    auto rec = [&](auto &&self, int x) -> void {
        if (x == n_sites) {
            out.emplace_back(layers);
            return;
        }
        for (int v = min_layer; v <= max_layer; ++v) {
            if (x > 0) {
                const int prev = layers[x - 1];
                if (std::abs(v - prev) > 1)
                    continue;
                if (v != prev) {
                    const int t = std::min(v, prev);
                    if (((x - 1 + t) % 2 + 2) % 2 == 0)
                        continue;
                }
            }
            layers[x] = v;
            self(self, x + 1);
        }
    };
    rec(rec, 0);
    return out;
}

Surface random_cut(Rng &rng, int n_sites, int max_layer) {
    std::vector<int> layers(n_sites);
    layers[0] = rng.uniform_int(0, max_layer);
    for (int x = 1; x < n_sites; ++x) {
        int options[3];
        int count = 0;
        for (int step = -1; step <= 1; ++step) {
            const int v = layers[x - 1] + step;
            if (v < 0 || v > max_layer)
                continue;
            if (step != 0) {
                const int t = std::min(v, layers[x - 1]);
                if (((x - 1 + t) % 2 + 2) % 2 == 0)
                    continue;
            }
            options[count++] = v;
        }
        layers[x] = options[rng.uniform_int(0, count - 1)];
    }
    return Surface(std::move(layers));
}

} // namespace cborn
