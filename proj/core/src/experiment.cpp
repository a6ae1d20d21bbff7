#include "curvedborn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cborn {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string &field, const std::string &what) {
    throw std::invalid_argument("config error: " + field + ": " + what);
}

GateModel parse_model(const json &j) {
    if (!j.contains("kind"))
        config_error("model", "missing kind (free | interacting)");
    const std::string kind = j.at("kind").get<std::string>();
    GateModel model;
    if (kind == "free") {
        model = GateModel::free_walk(j.value("theta", 0.0));
    } else if (kind == "interacting") {
        model = GateModel::emission_absorption(j.value("theta", 0.0), j.value("theta_y", 0.0),
                                               j.value("lambda", 0.0), j.value("phase", 0.0));
    } else {
        config_error("model.kind", "unknown kind '" + kind + "'");
    }
    for (const auto &d : j.value("defects", json::array())) {
        const std::string name = d.get<std::string>();
        if (name == "nonlocal_phase")
            model.defects.push_back(Defect::nonlocal_phase);
        else if (name == "superluminal_shift")
            model.defects.push_back(Defect::superluminal_shift);
        else if (name == "vacuum_creation")
            model.defects.push_back(Defect::vacuum_creation);
        else
            config_error("model.defects", "unknown defect '" + name + "'");
    }
    return model;
}

Surface parse_surface(const json &j, int n_sites) {
    std::string kind = j.value("kind", j.contains("layers") ? "explicit" : "");
    if (kind.empty())
        config_error("surface", "missing kind (flat | staircase | vee | explicit)");
    try {
        if (kind == "flat")
            return Surface::flat(n_sites, j.at("layer").get<int>());
        if (kind == "staircase")
            return staircase_surface(n_sites, j.at("base").get<int>(), j.at("cap").get<int>(),
                                     j.value("descending", false));
        if (kind == "vee")
            return vee_surface(n_sites, j.at("base").get<int>(), j.at("cap").get<int>());
        if (kind == "explicit") {
            std::vector<int> layers = j.at("layers").get<std::vector<int>>();
            if (static_cast<int>(layers.size()) != n_sites)
                config_error("surface.layers", "length must equal sites");
            return Surface(std::move(layers));
        }
    } catch (const std::invalid_argument &e) {
        config_error("surface", e.what());
    }
    config_error("surface.kind", "unknown kind '" + kind + "'");
}

std::vector<SiteSet> parse_patches(const json &j, int n_sites) {
    std::vector<SiteSet> patches;
    for (const auto &entry : j) {
        SiteSet mask = 0;
        if (entry.is_array() && entry.size() == 2 && entry[0].is_number_integer()) {
            const int lo = entry[0].get<int>();
            const int hi = entry[1].get<int>();
            if (lo < 0 || hi >= n_sites || lo > hi)
                config_error("partition", "range [" + std::to_string(lo) + "," +
                                              std::to_string(hi) + "] out of lattice bounds");
            mask = site_range(lo, hi);
        } else {
            config_error("partition", "each patch must be a [lo, hi] site range");
        }
        patches.push_back(mask);
    }
    return patches;
}

} // namespace

namespace {
ExperimentConfig parse_config_json(const json &j);
}

ExperimentConfig parse_config_text(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw std::invalid_argument(std::string("config error: parse: ") + e.what());
    }
    try {
        return parse_config_json(j);
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string("config error: ") + e.what());
    }
}

namespace {

ExperimentConfig parse_config_json(const json &j) {
    ExperimentConfig config;
    config.name = j.value("name", "experiment");
    if (!j.contains("sites"))
        config_error("sites", "missing");
    config.n_sites = j.at("sites").get<int>();
    if (config.n_sites < 1 || config.n_sites > kMaxSites)
        config_error("sites", "must be in [1, " + std::to_string(kMaxSites) + "]");
    if (!j.contains("model"))
        config_error("model", "missing");
    config.model = parse_model(j.at("model"));

    // Capacity: the full lattice must fit the dense budget.
    try {
        (void)SiteBasis::over(config.model.species, full_sites(config.n_sites));
    } catch (const CapacityError &e) {
        config_error("sites", e.what());
    }

    if (!j.contains("surface"))
        config_error("surface", "missing");
    config.surface = parse_surface(j.at("surface"), config.n_sites);
    if (config.surface.min_layer() < 0)
        config_error("surface", "must lie at layers >= 0 (in the future of the initial surface)");
    if (!is_brickwork_cut(config.surface))
        config_error("surface", "cuts a transport gate (not a brickwork causal cut); "
                                "shift the offending step by one layer");

    if (!j.contains("partition"))
        config_error("partition", "missing");
    config.patches = parse_patches(j.at("partition"), config.n_sites);
    try {
        (void)config.partition();
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument(std::string("config error: ") + e.what());
    }

    const json &m = j.contains("m") ? j.at("m") : json(1);
    if (m.is_array())
        config.ms = m.get<std::vector<int>>();
    else
        config.ms = {m.get<int>()};
    if (config.ms.empty())
        config_error("m", "needs at least one value");
    for (int v : config.ms)
        if (v < 1)
            config_error("m", "values must be >= 1");
    for (int v : config.ms) {
        const SliceDecomposition dec = slice_decompose(config.surface, config.partition(), v);
        const int bits = static_cast<int>(config.patches.size()) * dec.n_rounds();
        if (bits > kMaxBranchBits)
            config_error("m", "m=" + std::to_string(v) + " gives " +
                                  std::to_string(config.patches.size()) + " patches x " +
                                  std::to_string(dec.n_rounds()) +
                                  " rounds, past the branch budget of 2^" +
                                  std::to_string(kMaxBranchBits) + " records");
    }

    config.seed = j.value("seed", std::uint64_t{0});
    config.retain_detected = j.value("retain_detected", false);
    config.prune_tol = j.value("prune_tol", 1e-14);

    if (!j.contains("initial"))
        config_error("initial", "missing");
    const json &init = j.at("initial");
    const std::string kind = init.value("kind", "");
    if (kind == "vacuum") {
        config.initial.kind = InitialStateSpec::Kind::vacuum;
    } else if (kind == "random") {
        config.initial.kind = InitialStateSpec::Kind::random;
    } else if (kind == "single" || kind == "product") {
        config.initial.kind = kind == "single" ? InitialStateSpec::Kind::single
                                               : InitialStateSpec::Kind::product;
        json list = kind == "single" ? json::array({init}) : init.at("particles");
        for (const auto &p : list) {
            InitialParticle particle;
            particle.site = p.at("site").get<int>();
            particle.species = p.value("species", "x");
            particle.spin = p.value("spin", "up");
            if (particle.site < 0 || particle.site >= config.n_sites)
                config_error("initial.site", "site out of lattice bounds");
            if (particle.species != "x" && particle.species != "y")
                config_error("initial.species", "must be x or y");
            if (particle.species == "y" && config.model.species != Species::xy)
                config_error("initial.species", "y particles need an interacting model");
            if (particle.species == "x" && particle.spin != "up" && particle.spin != "down")
                config_error("initial.spin", "must be up or down");
            config.initial.particles.push_back(particle);
        }
    } else {
        config_error("initial.kind", "unknown kind '" + kind + "'");
    }
    return config;
}

} // namespace

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config error: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

StateVector build_initial_state(const ExperimentConfig &config) {
    const SiteBasis basis = SiteBasis::over(config.model.species, full_sites(config.n_sites));
    switch (config.initial.kind) {
    case InitialStateSpec::Kind::vacuum:
        return StateVector::vacuum(basis);
    case InitialStateSpec::Kind::random: {
        Rng rng(config.seed);
        return random_state(basis, rng);
    }
    case InitialStateSpec::Kind::single:
    case InitialStateSpec::Kind::product: {
        std::vector<int> local(config.n_sites, 0);
        for (const InitialParticle &p : config.initial.particles) {
            int &v = local[p.site];
            if (p.species == "x") {
                if (v % 3 != 0)
                    config_error("initial", "two x particles on site " + std::to_string(p.site));
                v += (p.spin == "up") ? x_up : x_down;
            } else {
                if (v >= 3)
                    config_error("initial", "two y particles on site " + std::to_string(p.site));
                v += 3;
            }
        }
        std::size_t idx = 0;
        std::size_t stride = 1;
        for (int x = 0; x < config.n_sites; ++x) {
            idx += static_cast<std::size_t>(local[x]) * stride;
            stride *= static_cast<std::size_t>(basis.d());
        }
        StateVector psi(basis);
        psi.amps()[idx] = 1.0;
        return psi;
    }
    }
    throw std::logic_error("unreachable");
}

RunSpec make_run_spec(const ExperimentConfig &config, int m) {
    return RunSpec{config.model,       build_initial_state(config), config.surface,
                   config.partition(), m,                           config.retain_detected,
                   config.prune_tol};
}

namespace {

json sites_json(SiteSet s) {
    json out = json::array();
    for (int x : site_list(s))
        out.push_back(x);
    return out;
}

json pattern_json(const OutcomePattern &pattern) {
    json out = json::array();
    for (int l = 0; l < pattern.r; ++l)
        out.push_back(pattern.bit(l));
    return out;
}

json record_json(const OutcomeSeq &s) {
    json rows = json::array();
    for (int k = s.kappa; k <= s.k_max(); ++k) {
        json row = json::array();
        for (int l = 0; l < s.r; ++l)
            row.push_back(s.bit(k, l));
        rows.push_back(row);
    }
    return rows;
}

json decomposition_json(const SliceDecomposition &dec) {
    json out;
    out["m"] = dec.m;
    out["kappa"] = dec.kappa;
    out["k_max"] = dec.k_max;
    out["tail"] = sites_json(dec.tail);
    json rounds = json::array();
    for (const SliceRound &round : dec.rounds) {
        json r;
        r["k"] = round.k;
        r["layer"] = dec.upsilon_layer(round.k);
        r["a"] = sites_json(round.a);
        r["b"] = sites_json(round.b);
        r["c"] = sites_json(round.c);
        r["rest"] = sites_json(round.rest);
        json cells = json::array();
        for (std::size_t l = 0; l < round.cells.size(); ++l) {
            const PatchCells &cell = round.cells[l];
            json c;
            c["patch"] = l + 1;
            c["b"] = sites_json(cell.in_b);
            c["c"] = sites_json(cell.in_c);
            c["c_shrunk"] = sites_json(cell.c_shrunk);
            c["c_grown"] = sites_json(cell.c_grown);
            c["d"] = sites_json(cell.d_grown);
            cells.push_back(c);
        }
        r["cells"] = cells;
        rounds.push_back(r);
    }
    out["rounds"] = rounds;
    return out;
}

json config_header(const ExperimentConfig &config) {
    json out;
    out["name"] = config.name;
    out["sites"] = config.n_sites;
    out["surface"] = config.surface.layers();
    json patches = json::array();
    for (SiteSet p : config.patches)
        patches.push_back(sites_json(p));
    out["partition"] = patches;
    out["seed"] = config.seed;
    return out;
}

} // namespace

std::string geometry_json(const ExperimentConfig &config) {
    json out = config_header(config);
    json decs = json::array();
    for (int m : config.ms) {
        json entry = decomposition_json(slice_decompose(config.surface, config.partition(), m));
        const PatchBands bands = patch_shrink_grow(config.partition(), m);
        json bj;
        bj["m"] = m;
        json shrunk = json::array(), grown = json::array();
        for (int l = 0; l < config.partition().r(); ++l) {
            shrunk.push_back(sites_json(bands.shrunk[l]));
            grown.push_back(sites_json(bands.grown[l]));
        }
        bj["shrunk"] = shrunk;
        bj["grown"] = grown;
        bj["boundary"] = sites_json(bands.boundary);
        entry["patch_bands"] = bj;
        decs.push_back(entry);
    }
    out["decompositions"] = decs;
    return out.dump(2) + "\n";
}

std::string run_json(const ExperimentConfig &config) {
    json out = config_header(config);
    out["retain_detected"] = config.retain_detected;
    json runs = json::array();
    for (int m : config.ms) {
        const RunSpec spec = make_run_spec(config, m);
        const SequentialResult result = run_sequential(spec);
        json entry;
        entry["m"] = m;
        json records = json::array();
        for (const auto &[s, p] : result.outcomes) {
            json rec;
            rec["s"] = record_json(s);
            rec["p"] = p;
            records.push_back(rec);
        }
        entry["records"] = records;
        json patterns = json::array();
        for (std::uint32_t bits = 0; bits < result.pattern_probs.size(); ++bits) {
            json pj;
            pj["pattern"] = pattern_json({spec.partition.r(), bits});
            pj["p"] = result.pattern_probs[bits];
            patterns.push_back(pj);
        }
        entry["patterns"] = patterns;
        entry["total"] = result.total;
        if (config.retain_detected) {
            // exploratory mode: report the gap against the standard rule,
            // with no expectation attached
            RunSpec standard = spec;
            standard.retain_detected = false;
            const SequentialResult base = run_sequential(standard);
            json std_patterns = json::array();
            double gap = 0.0;
            for (std::uint32_t bits = 0; bits < base.pattern_probs.size(); ++bits) {
                json pj;
                pj["pattern"] = pattern_json({spec.partition.r(), bits});
                pj["p"] = base.pattern_probs[bits];
                std_patterns.push_back(pj);
                gap = std::max(gap,
                               std::abs(base.pattern_probs[bits] - result.pattern_probs[bits]));
            }
            entry["patterns_standard"] = std_patterns;
            entry["max_pattern_difference"] = gap;
        }
        runs.push_back(entry);
    }
    out["runs"] = runs;
    return out.dump(2) + "\n";
}

std::string closed_json(const ExperimentConfig &config) {
    json out = config_header(config);
    json runs = json::array();
    for (int m : config.ms) {
        const RunSpec spec = make_run_spec(config, m);
        const SequentialResult result = run_sequential(spec);
        const ClosedFormEvaluator closed(spec, result.dec);
        json entry;
        entry["m"] = m;
        double max_diff = 0.0;
        json records = json::array();
        // every record = union over patterns of their compatible records
        for (std::uint32_t bits = 0; bits < (1u << spec.partition.r()); ++bits) {
            for (const OutcomeSeq &s :
                 compatible_outcomes({spec.partition.r(), bits}, result.dec.kappa,
                                     result.dec.k_max)) {
                const double sequential = result.prob_of(s);
                const double closed_p = closed.prob(s);
                max_diff = std::max(max_diff, std::abs(sequential - closed_p));
                json rec;
                rec["s"] = record_json(s);
                rec["sequential"] = sequential;
                rec["closed"] = closed_p;
                records.push_back(rec);
            }
        }
        entry["records"] = records;
        entry["max_abs_difference"] = max_diff;
        runs.push_back(entry);
    }
    out["runs"] = runs;
    return out.dump(2) + "\n";
}

std::string born_json(const ExperimentConfig &config) {
    json out = config_header(config);
    const RunSpec spec = make_run_spec(config, config.ms.front());
    const StateVector psi = surface_state(spec);
    json patterns = json::array();
    double total = 0.0;
    for (std::uint32_t bits = 0; bits < (1u << spec.partition.r()); ++bits) {
        const OutcomePattern pattern{spec.partition.r(), bits};
        const double p = curved_born_event(psi, pattern_event(pattern, spec.partition));
        total += p;
        json pj;
        pj["pattern"] = pattern_json(pattern);
        pj["p"] = p;
        patterns.push_back(pj);
    }
    out["patterns"] = patterns;
    out["total"] = total;
    return out.dump(2) + "\n";
}

std::string bounds_json(const ExperimentConfig &config) {
    json out = config_header(config);
    json runs = json::array();
    for (int m : config.ms) {
        const RunSpec spec = make_run_spec(config, m);
        const SequentialResult result = run_sequential(spec);
        json entry;
        entry["m"] = m;
        json patterns = json::array();
        for (std::uint32_t bits = 0; bits < (1u << spec.partition.r()); ++bits) {
            const OutcomePattern pattern{spec.partition.r(), bits};
            const Bracket slab = detection_bounds(spec, result.dec, pattern);
            const Bracket band = patch_bounds(spec, pattern, m);
            json pj;
            pj["pattern"] = pattern_json(pattern);
            pj["lower_patch"] = band.lower;
            pj["lower"] = slab.lower;
            pj["sequential"] = result.pattern_probs[bits];
            pj["upper"] = slab.upper;
            pj["upper_patch"] = band.upper;
            pj["born"] = curved_born(spec, pattern);
            patterns.push_back(pj);
        }
        entry["patterns"] = patterns;
        runs.push_back(entry);
    }
    out["runs"] = runs;
    return out.dump(2) + "\n";
}

std::string trail_json(const ExperimentConfig &config) {
    json out = config_header(config);
    json runs = json::array();
    for (int m : config.ms) {
        const RunSpec spec = make_run_spec(config, m);
        const SequentialResult result = run_sequential(spec);
        json entry;
        entry["m"] = m;
        // the heaviest record carries the most informative trail
        const auto top = std::max_element(
            result.outcomes.begin(), result.outcomes.end(),
            [](const auto &a, const auto &b) { return a.second < b.second; });
        if (top == result.outcomes.end()) {
            entry["trail"] = json::array();
        } else {
            entry["record"] = record_json(top->first);
            entry["p"] = top->second;
            json rounds = json::array();
            for (const TrailCheck &check : trail_checks(spec, top->first)) {
                json cj;
                cj["k"] = check.k;
                cj["product_form"] = check.product_form;
                cj["transport_form"] = check.transport_form;
                cj["norm_match"] = check.norm_match;
                cj["cond_prob"] = check.cond_prob;
                rounds.push_back(cj);
            }
            entry["trail"] = rounds;
        }
        runs.push_back(entry);
    }
    out["runs"] = runs;
    return out.dump(2) + "\n";
}

namespace {

SweepResult sweep_for(const ExperimentConfig &config, const std::vector<int> &ms) {
    const RunSpec base = make_run_spec(config, ms.front());
    return convergence_sweep(base, ms);
}

} // namespace

std::string sweep_json(const ExperimentConfig &config, const std::vector<int> &ms) {
    json out = config_header(config);
    const SweepResult sweep = sweep_for(config, ms);
    out["m_values"] = ms;
    json rows = json::array();
    for (const SweepRow &row : sweep.rows) {
        json rj;
        rj["m"] = row.m;
        rj["pattern"] = pattern_json({config.partition().r(), row.pattern_bits});
        rj["lower_patch"] = row.lower_patch;
        rj["lower"] = row.lower_slab;
        rj["sequential"] = row.sequential;
        rj["upper"] = row.upper_slab;
        rj["upper_patch"] = row.upper_patch;
        rj["born"] = row.born;
        rows.push_back(rj);
    }
    out["rows"] = rows;
    out["bracket_violation"] = sweep.bracket_violation;
    out["monotonicity_violation"] = sweep.monotonicity_violation;
    out["finest_gap"] = sweep.finest_gap;
    return out.dump(2) + "\n";
}

std::string sweep_csv(const ExperimentConfig &config, const std::vector<int> &ms) {
    const SweepResult sweep = sweep_for(config, ms);
    std::string out = "m,pattern,lower,sequential,upper,born\n";
    char buf[256];
    for (const SweepRow &row : sweep.rows) {
        std::string bits;
        for (int l = 0; l < config.partition().r(); ++l)
            bits += ((row.pattern_bits >> l) & 1) ? '1' : '0';
        std::snprintf(buf, sizeof(buf), "%d,%s,%.17e,%.17e,%.17e,%.17e\n", row.m,
                      bits.c_str(), row.lower_patch, row.sequential, row.upper_patch,
                      row.born);
        out += buf;
    }
    return out;
}

std::string pattern_table_text(const ExperimentConfig &config, const std::vector<int> &ms) {
    const SweepResult sweep = sweep_for(config, ms);
    std::string out = "   m  pattern        lower   sequential        upper         born\n";
    char buf[160];
    for (const SweepRow &row : sweep.rows) {
        std::string bits;
        for (int l = 0; l < config.partition().r(); ++l)
            bits += ((row.pattern_bits >> l) & 1) ? '1' : '0';
        std::snprintf(buf, sizeof(buf), "%4d  %-7s %12.9f %12.9f %12.9f %12.9f\n", row.m,
                      bits.c_str(), row.lower_patch, row.sequential, row.upper_patch,
                      row.born);
        out += buf;
    }
    return out;
}

std::string state_json(const StateVector &psi) {
    json out;
    out["species"] = psi.basis().species() == Species::x_only ? "x_only" : "xy";
    out["sites"] = psi.basis().sites();
    json amps = json::array();
    for (const cplx &v : psi.amps())
        amps.push_back(json::array({v.real(), v.imag()}));
    out["amplitudes"] = amps;
    return out.dump(2) + "\n";
}

StateVector state_from_json(const std::string &text) {
    const json j = json::parse(text);
    const Species species =
        j.at("species").get<std::string>() == "xy" ? Species::xy : Species::x_only;
    StateVector psi{SiteBasis(species, j.at("sites").get<std::vector<int>>())};
    const json &amps = j.at("amplitudes");
    if (amps.size() != psi.dim())
        throw std::invalid_argument("state: amplitude count does not match the basis");
    for (std::size_t i = 0; i < psi.dim(); ++i)
        psi.amps()[i] = cplx{amps[i][0].get<double>(), amps[i][1].get<double>()};
    return psi;
}

namespace {

struct CheckList {
    json checks = json::array();
    bool pass = true;

    void add(const std::string &name, const std::string &detail, double residual,
             double tolerance) {
        const bool ok = residual <= tolerance;
        json c;
        c["name"] = name;
        c["detail"] = detail;
        c["residual"] = residual;
        c["tolerance"] = tolerance;
        c["pass"] = ok;
        checks.push_back(c);
        pass = pass && ok;
    }
};

void axiom_suite(const ExperimentConfig &config, CheckList &list) {
    const GateModel &model = config.model;
    const int n = config.n_sites;
    const std::size_t dim = SiteBasis::over(model.species, full_sites(n)).dim();
    const int max_layer = (n <= 3) ? 3 : 2;
    std::vector<Surface> cuts = enumerate_cuts(n, 0, max_layer);
    // Deterministic thinning keeps the suite interactive at larger sizes.
    const std::size_t pair_budget = 160;
    std::size_t stride = 1;
    while (cuts.size() * cuts.size() / (stride * stride) > pair_budget)
        ++stride;
    Rng rng(config.seed + 1);

    double worst_ncfv = 0.0, worst_ncfv_local = 0.0, worst_il = 0.0, worst_fs = 0.0;
    for (std::size_t i = 0; i < cuts.size(); i += stride) {
        for (std::size_t j = 0; j < cuts.size(); j += stride) {
            const Surface &from = cuts[i];
            const Surface &to = cuts[j];
            worst_ncfv = std::max(worst_ncfv, verify_ncfv(from, to, model).residual);
            SiteSet shared = 0;
            for (int x = 0; x < n; ++x)
                if (from.layer(x) == to.layer(x))
                    shared |= site_bit(x);
            if (shared != 0 && shared != full_sites(n)) {
                const VerifierReport il =
                    dim <= 256 ? verify_il(from, to, shared, model)
                               : verify_il_sampled(from, to, shared, model, 4, rng);
                worst_il = std::max(worst_il, il.residual);
                worst_ncfv_local = std::max(
                    worst_ncfv_local, verify_ncfv_local(from, to, shared, model).residual);
            }
            const SiteSet region = site_bit(rng.uniform_int(0, n - 1));
            worst_fs =
                std::max(worst_fs, verify_fs(region, from, to, model, 2, rng).residual);
        }
    }
    list.add("ncfv_global", "vacuum drift over enumerated cut pairs", worst_ncfv, 1e-11);
    list.add("ncfv_local", "local vacuum drift on shared regions", worst_ncfv_local, 1e-11);
    list.add("interaction_locality", "factorization residual on shared regions", worst_il,
             1e-11);
    list.add("propagation_speed", "amplitude outside grown regions", worst_fs, 1e-11);
}

void theorem_suite(const ExperimentConfig &config, CheckList &list) {
    for (int m : config.ms) {
        const RunSpec spec = make_run_spec(config, m);
        const SequentialResult result = run_sequential(spec);
        const ClosedFormEvaluator closed(spec, result.dec);
        const std::string tag = " (m=" + std::to_string(m) + ")";

        double max_diff = 0.0;
        double total = 0.0;
        for (std::uint32_t bits = 0; bits < (1u << spec.partition.r()); ++bits) {
            for (const OutcomeSeq &s :
                 compatible_outcomes({spec.partition.r(), bits}, result.dec.kappa,
                                     result.dec.k_max)) {
                const double p = result.prob_of(s);
                total += p;
                max_diff = std::max(max_diff, std::abs(p - closed.prob(s)));
            }
        }
        list.add("sequential_equals_closed" + tag, "max |sequential - closed| over records",
                 max_diff, 1e-10);
        list.add("record_normalization" + tag, "|sum of record weights - 1|",
                 std::abs(total - 1.0), 1e-10);

        const std::vector<double> grained = coarse_grain(result);
        double pattern_total = 0.0, two_path = 0.0, bracket = 0.0;
        for (std::uint32_t bits = 0; bits < grained.size(); ++bits) {
            pattern_total += grained[bits];
            two_path = std::max(two_path,
                                std::abs(grained[bits] - result.pattern_probs[bits]));
            const Bracket slab =
                detection_bounds(spec, result.dec, {spec.partition.r(), bits});
            bracket = std::max(bracket, slab.lower - result.pattern_probs[bits]);
            bracket = std::max(bracket, result.pattern_probs[bits] - slab.upper);
        }
        list.add("pattern_normalization" + tag, "|sum of pattern weights - 1|",
                 std::abs(pattern_total - 1.0), 1e-10);
        list.add("coarse_grain_two_path" + tag, "walk accumulation vs compatible-record sum",
                 two_path, 1e-12);
        list.add("detection_bracket" + tag, "bracket escape over patterns", bracket, 1e-10);
    }
    if (config.ms.size() > 1) {
        const SweepResult sweep = sweep_for(config, config.ms);
        list.add("sweep_bracket", "bracket escape across the m list",
                 sweep.bracket_violation, 1e-10);
        list.add("sweep_monotonicity", "patch-band nesting across decreasing m",
                 sweep.monotonicity_violation, 1e-12);
        if (config.ms.back() == 1)
            list.add("born_limit", "max |sequential - born| at m=1", sweep.finest_gap, 1e-9);
    } else if (config.ms.front() == 1) {
        const SweepResult sweep = sweep_for(config, config.ms);
        list.add("born_limit", "max |sequential - born| at m=1", sweep.finest_gap, 1e-9);
    }
}

} // namespace

SuiteOutcome run_suite(const ExperimentConfig &config, SuiteKind kind) {
    CheckList list;
    if (kind == SuiteKind::axioms || kind == SuiteKind::all)
        axiom_suite(config, list);
    if (kind == SuiteKind::theorem || kind == SuiteKind::all)
        theorem_suite(config, list);
    json out = config_header(config);
    out["suite"] = kind == SuiteKind::axioms ? "axioms"
                   : kind == SuiteKind::theorem ? "theorem"
                                                : "all";
    out["checks"] = list.checks;
    out["pass"] = list.pass;
    return {out.dump(2) + "\n", list.pass};
}

} // namespace cborn
