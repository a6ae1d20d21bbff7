#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "curvedborn/events.hpp"
#include "curvedborn/geometry.hpp"
#include "curvedborn/linalg.hpp"
#include "curvedborn/rng.hpp"

namespace cborn {

/// Truncated Fock space over per-site occupation factors.  The x species
/// carries a hard-core spin-1/2 occupation {empty, up, down}; the optional
/// y species is a hard-core scalar {empty, occupied}.  Local dimension is
/// therefore 3 or 6, identical on every site of an experiment.
enum class Species : int {
    x_only, // d = 3
    xy,     // d = 6
};

int local_dim(Species s);

/// Local occupation encoding.  With the y species present the local index
/// is x + 3*y; the x digit is the fastest-varying one.
enum XState : int { x_empty = 0, x_up = 1, x_down = 2 };

constexpr std::size_t kMaxHilbertDim = std::size_t{1} << 15;

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Basis bookkeeping for a region: an ordered list of global site ids and a
/// mixed-radix index over them.  Index digits are little-endian: the first
/// listed site is the least significant digit.  Canonical bases list sites
/// ascending; tensor_split produces reordered views.
class SiteBasis {
  public:
    SiteBasis() = default;
    SiteBasis(Species species, std::vector<int> sites); // throws CapacityError
    static SiteBasis over(Species species, SiteSet sites);

    Species species() const { return species_; }
    int d() const { return d_; }
    int n_sites() const { return static_cast<int>(sites_.size()); }
    std::size_t dim() const { return dim_; }
    const std::vector<int> &sites() const { return sites_; }
    SiteSet site_mask() const { return mask_; }
    bool ascending() const { return ascending_; }

    int digit(std::size_t index, int pos) const;
    int pos_of_site(int site) const; // -1 when absent
    /// Global site mask of the occupied sites of a basis state
    /// (species-merged: occupied iff the local index is nonzero).
    SiteSet config_of(std::size_t index) const;

    bool operator==(const SiteBasis &) const = default;

  private:
    Species species_ = Species::x_only;
    int d_ = 3;
    std::vector<int> sites_;
    std::size_t dim_ = 1;
    SiteSet mask_ = 0;
    bool ascending_ = true;
};

class StateVector {
  public:
    StateVector() = default;
    explicit StateVector(SiteBasis basis);
    static StateVector vacuum(SiteBasis basis);

    const SiteBasis &basis() const { return basis_; }
    std::vector<cplx> &amps() { return a_; }
    const std::vector<cplx> &amps() const { return a_; }
    std::size_t dim() const { return a_.size(); }

    double norm() const;
    void normalize();
    cplx inner(const StateVector &o) const; // <this|o>

  private:
    SiteBasis basis_;
    std::vector<cplx> a_;
};

class DensityOp {
  public:
    DensityOp() = default;
    explicit DensityOp(SiteBasis basis);
    static DensityOp from_pure(const StateVector &psi);

    const SiteBasis &basis() const { return basis_; }
    std::size_t dim() const { return basis_.dim(); }
    std::vector<cplx> &mat() { return m_; }
    const std::vector<cplx> &mat() const { return m_; }
    cplx at(std::size_t r, std::size_t c) const { return m_[r * dim() + c]; }
    cplx &at(std::size_t r, std::size_t c) { return m_[r * dim() + c]; }

    double trace_real() const;
    double hermiticity_residual() const;
    double min_eigenvalue() const; // dense check; test/verifier use only

  private:
    SiteBasis basis_;
    std::vector<cplx> m_;
};

/// PVM projector: diagonal 0/1 mask in the occupation basis.
class PvmProjector {
  public:
    PvmProjector(SiteBasis basis, Bitset mask);
    /// Event ambient must equal the basis site set (and the basis must be
    /// canonical ascending so compact configuration indices line up).
    static PvmProjector from_event(const Event &e, const SiteBasis &basis);
    static PvmProjector vacuum_sector(const SiteBasis &basis);

    const SiteBasis &basis() const { return basis_; }
    bool keeps(std::size_t index) const { return mask_.test(index); }
    std::size_t rank() const { return mask_.count(); }
    const Bitset &mask() const { return mask_; }

    void apply(StateVector &psi) const;
    void apply(DensityOp &rho) const; // rho -> P rho P
    double expectation(const StateVector &psi) const;
    double expectation(const DensityOp &rho) const; // tr(P rho)

  private:
    SiteBasis basis_;
    Bitset mask_;
};

StateVector tensor_product(const StateVector &a, const StateVector &b);

/// Reindexes the state with the sites of `front` first (ascending), the
/// remaining sites after (ascending).  tensor_join restores the canonical
/// ascending order; split-then-join is a bit-exact round trip.
StateVector tensor_split(const StateVector &psi, SiteSet front);
StateVector tensor_join(const StateVector &split_view);
DensityOp tensor_split(const DensityOp &rho, SiteSet front);
DensityOp tensor_join(const DensityOp &split_view);

DensityOp partial_trace(const DensityOp &rho, SiteSet traced);
DensityOp embed_vacuum(const DensityOp &rho, SiteSet extra);
StateVector embed_vacuum(const StateVector &psi, SiteSet extra);

bool is_concentrated(const StateVector &psi, SiteSet region, double tol = 1e-10);
bool is_concentrated(const DensityOp &rho, SiteSet region, double tol = 1e-10);

/// Applies a gate to the listed global sites (matrix indexed mixed-radix
/// over the sites in the order given).
void apply_gate(StateVector &psi, std::span<const int> sites, const Matrix &g);
/// rho -> G rho G^dagger.
void conjugate_gate(DensityOp &rho, std::span<const int> sites, const Matrix &g);
/// Left-multiplies a dim x dim operator held in `op` (row-major) by the gate.
void left_multiply_gate(Matrix &op, const SiteBasis &basis, std::span<const int> sites,
                        const Matrix &g);

StateVector random_state(const SiteBasis &basis, Rng &rng);
/// Random normalized state of the form psi_region (x) vacuum.
StateVector random_state_concentrated(const SiteBasis &basis, SiteSet region, Rng &rng);

} // namespace cborn
