#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvedborn/fock.hpp"
#include "curvedborn/geometry.hpp"
#include "curvedborn/rng.hpp"

namespace cborn {

/// Local-gate unitary dynamics on the brickwork lattice.  Each micro layer t
/// applies the on-site gates (coin, then the emission-absorption coupling)
/// at every site, followed by the two-site transport gates on the pairs
/// (a, a+1) with a + t even.  Gates act strictly within their pair, so a
/// state influences at most one neighbouring site per layer and the
/// propagation-speed axiom holds exactly against the unit lightcone.

/// Deliberately broken gate sets for negative verifier tests.
enum class Defect {
    nonlocal_phase,    // long-range diagonal phase between sites 0 and 2
    superluminal_shift, // extra transport row on the wrong-parity pairs
    vacuum_creation,   // on-site rotation out of the empty state
};

struct GateModel {
    Species species = Species::x_only;
    double theta = 0.0;   // x coin angle
    double theta_y = 0.0; // y hop angle
    double lambda = 0.0;  // emission-absorption angle
    double phase = 0.0;   // emission phase
    bool interacting = false;
    std::vector<Defect> defects;

    static GateModel free_walk(double theta);
    static GateModel emission_absorption(double theta, double theta_y, double lambda,
                                         double phase);
    bool has_defect(Defect d) const;
};

struct LocalGates {
    int d = 3;
    Matrix coin;        // on-site spin rotation
    Matrix interaction; // on-site emission-absorption coupling (identity when free)
    Matrix on_site;     // interaction * coin, applied as one gate
    Matrix shift;       // two-site transport (pair swap on x, lazy hop on y)
};
LocalGates local_gates(const GateModel &model);

struct GateOp {
    enum class Kind { on_site, shift, shift_extra, long_phase };
    Kind kind = Kind::on_site;
    int layer = 0;
    int sub = 0;  // application rank within the layer
    int site = 0; // left site for pair gates
    std::vector<int> sites(int n_sites) const;
};

/// True when no shipped transport gate straddles the surface; only such
/// surfaces are cuts of the brickwork circuit and usable by the dynamics.
bool is_brickwork_cut(const Surface &s);

/// Gates strictly below the surface, in canonical causal order.
std::vector<GateOp> gates_below(const Surface &s, const GateModel &model);
/// Ordered difference: gates to undo (reverse order, adjoint) and to apply
/// when moving a state from `from` to `to`.
struct GatePlan {
    std::vector<GateOp> undo;
    std::vector<GateOp> apply;
};
GatePlan gates_between(const Surface &from, const Surface &to, const GateModel &model);

StateVector evolve(const StateVector &psi, const Surface &from, const Surface &to,
                   const GateModel &model);
DensityOp evolve(const DensityOp &rho, const Surface &from, const Surface &to,
                 const GateModel &model);
void apply_gate_op(StateVector &psi, const GateOp &op, const LocalGates &gates,
                   bool adjoint_gate);

/// Dense evolution operator restricted to a region whose complement the two
/// surfaces share; throws if any gate in the plan leaves the region.
Matrix region_evolution_matrix(SiteSet region, const Surface &from, const Surface &to,
                               const GateModel &model);

struct FsViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reduced evolution operator of a region: transports H_region into
/// H_target by the partial inner product with the vacuum on the rest.
/// Default target is the grown set of the region on `to`.
struct ReducedEvolution {
    SiteSet from_region = 0;
    SiteSet to_region = 0;
    SiteBasis from_basis;
    SiteBasis to_basis;
    Matrix w; // dim(to) x dim(from)
    double isometry_residual = 0.0;
    double norm_deficit = 0.0;
};
ReducedEvolution reduced_evolution_w(SiteSet region, const Surface &from, const Surface &to,
                                     const GateModel &model);
ReducedEvolution reduced_evolution_w_to(SiteSet region, const Surface &from,
                                        const Surface &to, SiteSet target,
                                        const GateModel &model);

struct VerifierReport {
    bool pass = false;
    double residual = 0.0;
    std::string detail;
};

/// Interaction locality: the evolution factorizes as identity on the shared
/// region times a reduced factor, checked densely.
VerifierReport verify_il(const Surface &from, const Surface &to, SiteSet shared,
                         const GateModel &model, double tol = 1e-11);
/// Column/probe-sampled variant for sizes where the dense check is too fat.
VerifierReport verify_il_sampled(const Surface &from, const Surface &to, SiteSet shared,
                                 const GateModel &model, int probes, Rng &rng,
                                 double tol = 1e-11);
/// The reduced factor depends only on the non-shared surface pieces: two
/// surface pairs with equal complements yield equal factors.
VerifierReport verify_il_independence(const Surface &from1, const Surface &to1,
                                      const Surface &from2, const Surface &to2,
                                      SiteSet shared, const GateModel &model,
                                      double tol = 1e-11);

/// Propagation speed: states concentrated in a region stay concentrated in
/// its grown set (sampled states), plus the projector-ordering form.
VerifierReport verify_fs(SiteSet region, const Surface &from, const Surface &to,
                         const GateModel &model, int trials, Rng &rng, double tol = 1e-11);
VerifierReport verify_fs_operator(SiteSet region, const Surface &from, const Surface &to,
                                  const GateModel &model, double tol = 1e-10);

/// Vacuum preservation, global and local (local form uses the reduced
/// factor extracted under interaction locality).
VerifierReport verify_ncfv(const Surface &from, const Surface &to, const GateModel &model,
                           double tol = 1e-11);
VerifierReport verify_ncfv_local(const Surface &from, const Surface &to, SiteSet shared,
                                 const GateModel &model, double tol = 1e-11);

/// Brickwork-cut surface builders and enumeration (deterministic).
Surface staircase_surface(int n_sites, int base, int cap, bool descending = false);
Surface vee_surface(int n_sites, int base, int cap);
std::vector<Surface> enumerate_cuts(int n_sites, int min_layer, int max_layer);
Surface random_cut(Rng &rng, int n_sites, int max_layer);

} // namespace cborn
