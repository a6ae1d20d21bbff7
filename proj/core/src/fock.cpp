#include "curvedborn/fock.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace cborn {

int local_dim(Species s) { return s == Species::x_only ? 3 : 6; }

SiteBasis::SiteBasis(Species species, std::vector<int> sites)
    : species_(species), d_(local_dim(species)), sites_(std::move(sites)) {
    dim_ = 1;
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        dim_ *= static_cast<std::size_t>(d_);
        if (dim_ > kMaxHilbertDim)
            throw CapacityError("region of " + std::to_string(sites_.size()) +
                                " sites at local dim " + std::to_string(d_) +
                                " exceeds the dense capacity of 2^15 basis states");
        mask_ |= site_bit(sites_[i]);
        if (i > 0 && sites_[i] <= sites_[i - 1])
            ascending_ = false;
    }
}

SiteBasis SiteBasis::over(Species species, SiteSet sites) {
    return SiteBasis(species, site_list(sites));
}

int SiteBasis::digit(std::size_t index, int pos) const {
    for (int i = 0; i < pos; ++i)
        index /= static_cast<std::size_t>(d_);
    return static_cast<int>(index % static_cast<std::size_t>(d_));
}

int SiteBasis::pos_of_site(int site) const {
    for (std::size_t i = 0; i < sites_.size(); ++i)
        if (sites_[i] == site)
            return static_cast<int>(i);
    return -1;
}

SiteSet SiteBasis::config_of(std::size_t index) const {
    SiteSet q = 0;
    for (int i = 0; i < n_sites(); ++i) {
        if (index % static_cast<std::size_t>(d_) != 0)
            q |= site_bit(sites_[i]);
        index /= static_cast<std::size_t>(d_);
    }
    return q;
}

StateVector::StateVector(SiteBasis basis) : basis_(std::move(basis)), a_(basis_.dim()) {}

StateVector StateVector::vacuum(SiteBasis basis) {
    StateVector psi(std::move(basis));
    psi.a_[0] = 1.0;
    return psi;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const cplx &v : a_)
        s += std::norm(v);
    return std::sqrt(s);
}

void StateVector::normalize() {
    const double n = norm();
    if (n == 0.0)
        throw std::runtime_error("cannot normalize the zero state");
    for (cplx &v : a_)
        v /= n;
}

cplx StateVector::inner(const StateVector &o) const {
    assert(dim() == o.dim());
    cplx s{};
    for (std::size_t i = 0; i < a_.size(); ++i)
        s += std::conj(a_[i]) * o.a_[i];
    return s;
}

DensityOp::DensityOp(SiteBasis basis) : basis_(std::move(basis)), m_(basis_.dim() * basis_.dim()) {}

DensityOp DensityOp::from_pure(const StateVector &psi) {
    DensityOp rho(psi.basis());
    const std::size_t dim = psi.dim();
    for (std::size_t r = 0; r < dim; ++r) {
        if (psi.amps()[r] == cplx{})
            continue;
        for (std::size_t c = 0; c < dim; ++c)
            rho.m_[r * dim + c] = psi.amps()[r] * std::conj(psi.amps()[c]);
    }
    return rho;
}

double DensityOp::trace_real() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i)
        t += at(i, i).real();
    return t;
}

double DensityOp::hermiticity_residual() const {
    double s = 0.0;
    for (std::size_t r = 0; r < dim(); ++r)
        for (std::size_t c = r; c < dim(); ++c)
            s = std::max(s, std::abs(at(r, c) - std::conj(at(c, r))));
    return s;
}

double DensityOp::min_eigenvalue() const {
    Matrix m(static_cast<int>(dim()), static_cast<int>(dim()));
    m.a = m_;
    return min_hermitian_eigenvalue(std::move(m));
}

PvmProjector::PvmProjector(SiteBasis basis, Bitset mask)
    : basis_(std::move(basis)), mask_(std::move(mask)) {
    assert(mask_.size() == basis_.dim());
}

PvmProjector PvmProjector::from_event(const Event &e, const SiteBasis &basis) {
    if (e.ambient() != basis.site_mask())
        throw std::invalid_argument("pvm projector: event ambient does not match basis sites");
    if (!basis.ascending())
        throw std::invalid_argument("pvm projector: basis must be canonical (ascending sites)");
    Bitset mask(basis.dim());
    for (std::size_t i = 0; i < basis.dim(); ++i)
        if (e.contains(basis.config_of(i)))
            mask.set(i);
    return PvmProjector(basis, std::move(mask));
}

PvmProjector PvmProjector::vacuum_sector(const SiteBasis &basis) {
    Bitset mask(basis.dim());
    mask.set(0);
    return PvmProjector(basis, std::move(mask));
}

void PvmProjector::apply(StateVector &psi) const {
    assert(psi.basis() == basis_);
    for (std::size_t i = 0; i < psi.dim(); ++i)
        if (!mask_.test(i))
            psi.amps()[i] = cplx{};
}

void PvmProjector::apply(DensityOp &rho) const {
    assert(rho.basis() == basis_);
    const std::size_t dim = rho.dim();
    for (std::size_t r = 0; r < dim; ++r) {
        const bool keep_r = mask_.test(r);
        for (std::size_t c = 0; c < dim; ++c)
            if (!keep_r || !mask_.test(c))
                rho.at(r, c) = cplx{};
    }
}

double PvmProjector::expectation(const StateVector &psi) const {
    assert(psi.basis() == basis_);
    double s = 0.0;
    for (std::size_t i = 0; i < psi.dim(); ++i)
        if (mask_.test(i))
            s += std::norm(psi.amps()[i]);
    return s;
}

double PvmProjector::expectation(const DensityOp &rho) const {
    assert(rho.basis() == basis_);
    double s = 0.0;
    for (std::size_t i = 0; i < rho.dim(); ++i)
        if (mask_.test(i))
            s += rho.at(i, i).real();
    return s;
}

StateVector tensor_product(const StateVector &a, const StateVector &b) {
    assert(a.basis().species() == b.basis().species());
    assert((a.basis().site_mask() & b.basis().site_mask()) == 0);
    std::vector<int> sites = a.basis().sites();
    sites.insert(sites.end(), b.basis().sites().begin(), b.basis().sites().end());
    StateVector out{SiteBasis(a.basis().species(), std::move(sites))};
    const std::size_t da = a.dim();
    for (std::size_t j = 0; j < b.dim(); ++j) {
        if (b.amps()[j] == cplx{})
            continue;
        for (std::size_t i = 0; i < da; ++i)
            out.amps()[j * da + i] = a.amps()[i] * b.amps()[j];
    }
    return out;
}

namespace {

// Digit permutation: out digit i comes from in digit perm[i].
std::vector<std::size_t> permuted_index_map(const SiteBasis &from, const std::vector<int> &to_sites) {
    const int n = from.n_sites();
    const int d = from.d();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) {
        perm[i] = from.pos_of_site(to_sites[i]);
        assert(perm[i] >= 0);
    }
    std::vector<std::size_t> strides_in(n, 1);
    for (int i = 1; i < n; ++i)
        strides_in[i] = strides_in[i - 1] * static_cast<std::size_t>(d);
    std::vector<std::size_t> map(from.dim());
    for (std::size_t out_idx = 0; out_idx < from.dim(); ++out_idx) {
        std::size_t rem = out_idx;
        std::size_t in_idx = 0;
        for (int i = 0; i < n; ++i) {
            in_idx += (rem % static_cast<std::size_t>(d)) * strides_in[perm[i]];
            rem /= static_cast<std::size_t>(d);
        }
        map[out_idx] = in_idx;
    }
    return map;
}

std::vector<int> split_order(const SiteBasis &basis, SiteSet front) {
    assert((front & ~basis.site_mask()) == 0);
    std::vector<int> order = site_list(front);
    for (int s : site_list(basis.site_mask() & ~front))
        order.push_back(s);
    return order;
}

StateVector reorder(const StateVector &psi, std::vector<int> order) {
    const std::vector<std::size_t> map = permuted_index_map(psi.basis(), order);
    StateVector out{SiteBasis(psi.basis().species(), std::move(order))};
    for (std::size_t i = 0; i < map.size(); ++i)
        out.amps()[i] = psi.amps()[map[i]];
    return out;
}

DensityOp reorder(const DensityOp &rho, std::vector<int> order) {
    const std::vector<std::size_t> map = permuted_index_map(rho.basis(), order);
    DensityOp out{SiteBasis(rho.basis().species(), std::move(order))};
    const std::size_t dim = rho.dim();
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            out.at(r, c) = rho.at(map[r], map[c]);
    return out;
}

} // namespace

StateVector tensor_split(const StateVector &psi, SiteSet front) {
    return reorder(psi, split_order(psi.basis(), front));
}

StateVector tensor_join(const StateVector &split_view) {
    return reorder(split_view, site_list(split_view.basis().site_mask()));
}

DensityOp tensor_split(const DensityOp &rho, SiteSet front) {
    return reorder(rho, split_order(rho.basis(), front));
}

DensityOp tensor_join(const DensityOp &split_view) {
    return reorder(split_view, site_list(split_view.basis().site_mask()));
}

DensityOp partial_trace(const DensityOp &rho, SiteSet traced) {
    assert((traced & ~rho.basis().site_mask()) == 0);
    const SiteSet kept = rho.basis().site_mask() & ~traced;
    const DensityOp view = tensor_split(rho, kept); // kept digits low, traced high
    const SiteBasis kept_basis = SiteBasis::over(rho.basis().species(), kept);
    const std::size_t dk = kept_basis.dim();
    const std::size_t dt = view.dim() / dk;
    DensityOp out(kept_basis);
    for (std::size_t t = 0; t < dt; ++t)
        for (std::size_t r = 0; r < dk; ++r)
            for (std::size_t c = 0; c < dk; ++c)
                out.at(r, c) += view.at(t * dk + r, t * dk + c);
    return out;
}

DensityOp embed_vacuum(const DensityOp &rho, SiteSet extra) {
    assert((extra & rho.basis().site_mask()) == 0);
    if (extra == 0)
        return rho;
    const SiteBasis joint = SiteBasis::over(rho.basis().species(),
                                            rho.basis().site_mask() | extra);
    // Build in split order (old sites first, vacuum digits high), then join.
    std::vector<int> order = rho.basis().sites();
    for (int s : site_list(extra))
        order.push_back(s);
    DensityOp split(SiteBasis(rho.basis().species(), order));
    const std::size_t dim = rho.dim();
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            split.at(r, c) = rho.at(r, c);
    DensityOp out = tensor_join(split);
    assert(out.basis() == joint);
    return out;
}

StateVector embed_vacuum(const StateVector &psi, SiteSet extra) {
    assert((extra & psi.basis().site_mask()) == 0);
    if (extra == 0)
        return psi;
    StateVector vac = StateVector::vacuum(SiteBasis::over(psi.basis().species(), extra));
    return tensor_join(tensor_product(psi, vac));
}

bool is_concentrated(const StateVector &psi, SiteSet region, double tol) {
    double outside = 0.0;
    for (std::size_t i = 0; i < psi.dim(); ++i)
        if (psi.basis().config_of(i) & ~region)
            outside += std::norm(psi.amps()[i]);
    return std::sqrt(outside) <= tol;
}

bool is_concentrated(const DensityOp &rho, SiteSet region, double tol) {
    // || rho - P rho P || via the mask directly.
    double s = 0.0;
    const std::size_t dim = rho.dim();
    for (std::size_t r = 0; r < dim; ++r) {
        const bool in_r = (rho.basis().config_of(r) & ~region) == 0;
        for (std::size_t c = 0; c < dim; ++c) {
            const bool in_c = (rho.basis().config_of(c) & ~region) == 0;
            if (!(in_r && in_c))
                s += std::norm(rho.at(r, c));
        }
    }
    return std::sqrt(s) <= tol;
}

namespace {

std::vector<int> positions_of(const SiteBasis &basis, std::span<const int> sites) {
    std::vector<int> pos(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        pos[i] = basis.pos_of_site(sites[i]);
        if (pos[i] < 0)
            throw std::invalid_argument("gate site not in basis region");
    }
    return pos;
}

} // namespace

void apply_gate(StateVector &psi, std::span<const int> sites, const Matrix &g) {
    const std::vector<int> pos = positions_of(psi.basis(), sites);
    apply_digit_gate(psi.amps(), psi.basis().n_sites(), psi.basis().d(), pos, g);
}

void conjugate_gate(DensityOp &rho, std::span<const int> sites, const Matrix &g) {
    std::vector<int> pos = positions_of(rho.basis(), sites);
    const int n = rho.basis().n_sites();
    const int d = rho.basis().d();
    // vec(rho) over 2n digits: bra digits low, ket digits high.
    std::vector<int> ket(pos);
    for (int &p : ket)
        p += n;
    apply_digit_gate(rho.mat(), 2 * n, d, ket, g);
    Matrix gc(g.rows, g.cols);
    for (std::size_t i = 0; i < g.a.size(); ++i)
        gc.a[i] = std::conj(g.a[i]);
    apply_digit_gate(rho.mat(), 2 * n, d, pos, gc);
}

void left_multiply_gate(Matrix &op, const SiteBasis &basis, std::span<const int> sites,
                        const Matrix &g) {
    std::vector<int> pos = positions_of(basis, sites);
    const int n = basis.n_sites();
    for (int &p : pos)
        p += n; // row (output) digits sit high in row-major storage
    apply_digit_gate(op.a, 2 * n, basis.d(), pos, g);
}

StateVector random_state(const SiteBasis &basis, Rng &rng) {
    StateVector psi(basis);
    for (cplx &v : psi.amps())
        v = rng.gaussian_cplx();
    psi.normalize();
    return psi;
}

StateVector random_state_concentrated(const SiteBasis &basis, SiteSet region, Rng &rng) {
    StateVector part = random_state(SiteBasis::over(basis.species(), region), rng);
    StateVector psi = embed_vacuum(part, basis.site_mask() & ~region);
    assert(psi.basis() == basis);
    return psi;
}

} // namespace cborn
