#include "qmssb/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qmssb/astro.hpp"
#include "qmssb/cosmo.hpp"
#include "qmssb/epr.hpp"
#include "qmssb/error.hpp"
#include "qmssb/measurement.hpp"

namespace qmssb {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::int64_t readout_value(Readout r) { return static_cast<std::int64_t>(r); }

json estimate_json(const CorrelationEstimate &e) {
    return {{"C", number(e.value)},         {"stderr", number(e.stderr)}, {"n", e.n},
            {"n_decided", e.n_decided},     {"n_undecided", e.n_undecided}, {"n_pp", e.n_pp},
            {"n_pm", e.n_pm},               {"n_mp", e.n_mp},             {"n_mm", e.n_mm}};
}

DensityMatrix epr_state(const std::string &name) {
    if (name == "singlet") return make_singlet();
    if (name == "triplet0") return make_triplet_zero();
    if (name == "up_up") return make_product(make_pure_spin(0.0, 0.0), make_pure_spin(0.0, 0.0));
    if (name == "up_down") return make_product(make_pure_spin(0.0, 0.0), make_pure_spin(std::numbers::pi, 0.0));
    if (name == "mixed") return maximally_mixed(4);
    throw ConfigError("unknown epr state '" + name + "'");
}

EprConfig build_epr(const ExperimentConfig &c) {
    const EprBlock &b = *c.epr;
    EprConfig e;
    e.apparatus1 = *c.apparatus;
    e.apparatus2 = b.apparatus2 ? *b.apparatus2 : *c.apparatus;
    e.apparatus1.field = planar_field(b.field_strength1, b.theta1_deg * kDeg);
    e.apparatus2.field = planar_field(b.field_strength2, b.theta2_deg * kDeg);
    e.shared_rho0 = epr_state(b.state);
    e.enforce_field_constraint = b.enforce_field_constraint;
    e.t_end = b.t_end;
    e.dt = b.dt;
    return e;
}

ResultBundle run_measure(const ExperimentConfig &c, unsigned workers) {
    const ApparatusParams &p = *c.apparatus;
    const MeasureBlock &m = *c.measure;
    const DensityMatrix rho0 = make_pure_spin(m.polar_angle, m.azimuth);
    const MeasurementEnsemble ens = run_measurement_ensemble(rho0, p, m.t_end, m.dt, c.n, *c.master_seed, workers);

    const Vec3 axis = p.field / p.field_strength();
    const double delta = p.mu * spin_expectation(rho0, axis) * p.field_strength() / p.gamma;
    ResultBundle r;
    json stats = {{"n", ens.n},
                  {"n_plus", ens.n_plus},
                  {"n_minus", ens.n_minus},
                  {"n_undecided", ens.n_undecided},
                  {"p_plus", number(ens.p_plus)},
                  {"p_plus_stderr", number(ens.p_plus_stderr)},
                  {"median_decision_time", number(ens.median_decision_time)},
                  {"delta", delta},
                  {"p_plus_erf", p_plus_erf(delta, p.effective_variance())}};
    try {
        const MeasurementTime t0 = measurement_time(p, delta);
        stats["t0"] = t0.value;
        stats["t0_instantaneous"] = t0.instantaneous;
    } catch (const DomainError &) {
        stats["t0"] = nullptr;
    }
    r.summary["statistics"] = stats;
    if (10 * ens.n_undecided > ens.n) {
        r.warnings.push_back(std::to_string(ens.n_undecided) + " of " + std::to_string(ens.n) +
                             " measurements undecided");
    }

    Table t{"trials.csv", {"index", "seed", "readout", "final_phi", "decision_time", "final_polarization"}, {}};
    for (const MeasurementRecord &rec : ens.records) {
        t.rows.push_back({static_cast<std::uint64_t>(rec.index), rec.seed, readout_value(rec.readout), rec.final_phi,
                          rec.decision_time, rec.final_polarization});
    }
    r.tables.push_back(std::move(t));
    return r;
}

ResultBundle run_epr(const ExperimentConfig &c, unsigned workers) {
    const EprConfig e = build_epr(c);
    auto [est, trials] = run_epr_ensemble(e, c.n, *c.master_seed, workers);
    const double theta = (c.epr->theta1_deg - c.epr->theta2_deg) * kDeg;
    ResultBundle r;
    json stats = estimate_json(est);
    stats["oracle"] = correlation_quadrature_oracle(e);
    stats["minus_cos_theta"] = -std::cos(theta);
    r.summary["statistics"] = stats;
    if (est.warning) {
        r.warnings.push_back(*est.warning);
    }
    Table t{"trials.csv", {"index", "seed", "readout1", "readout2", "xi1_dot_b1", "xi2_dot_b2", "final_phi1", "final_phi2"}, {}};
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const PairOutcome &o = trials[i];
        t.rows.push_back({static_cast<std::uint64_t>(i), o.seed, readout_value(o.readout1), readout_value(o.readout2),
                          o.xi1.dot(e.apparatus1.field), o.xi2.dot(e.apparatus2.field), o.final_phi1, o.final_phi2});
    }
    r.tables.push_back(std::move(t));
    return r;
}

ResultBundle run_chsh(const ExperimentConfig &c, unsigned workers) {
    const EprConfig base = build_epr(c);
    const ChshBlock &b = *c.chsh;
    const ChshAngles angles{b.a_deg * kDeg, b.a_prime_deg * kDeg, b.b_deg * kDeg, b.b_prime_deg * kDeg};
    const auto configs = chsh_configs(base, angles);
    const ChshResult res = chsh_statistic(configs, c.n, *c.master_seed, workers);
    const double oracle = chsh_oracle(configs);

    ResultBundle r;
    json per = json::array();
    Table t{"chsh.csv", {"config_label", "C", "stderr", "n_decided", "n_undecided"}, {}};
    for (std::size_t j = 0; j < 4; ++j) {
        json item = estimate_json(res.correlations[j]);
        item["label"] = res.labels[j];
        item["oracle"] = correlation_quadrature_oracle(configs[j]);
        per.push_back(item);
        t.rows.push_back({res.labels[j], res.correlations[j].value, res.correlations[j].stderr,
                          static_cast<std::uint64_t>(res.correlations[j].n_decided),
                          static_cast<std::uint64_t>(res.correlations[j].n_undecided)});
    }
    r.summary["statistics"] = {{"correlations", per},
                               {"statistic", number(res.statistic)},
                               {"stderr", number(res.stderr)},
                               {"violation", res.violation},
                               {"oracle_statistic", oracle},
                               {"oracle_violation", std::abs(oracle) > 2.0},
                               {"idealized_statistic", chsh_idealized(angles)}};
    r.warnings = res.warnings;
    r.tables.push_back(std::move(t));
    return r;
}

ResultBundle run_cosmo(const ExperimentConfig &c, unsigned workers) {
    const CosmoBlock &b = *c.cosmo;
    const InflationParams ip{b.H, b.eta_start, b.eta_end};
    ReheatingParams rp;
    rp.lambda = b.lambda;
    rp.phi0 = b.phi0;
    rp.delta_t = b.delta_t ? *b.delta_t : energy_balance_delta_t(b.lambda, b.phi0);
    rp.steps = b.steps;
    rp.include_potential = b.include_potential;
    rp.include_memory = b.include_memory;
    rp.noise_density = b.noise_density;
    const SpectrumResult s = power_spectrum(b.k_grid, rp, ip, c.n, *c.master_seed, workers);

    ResultBundle r;
    double lo = s.power.front(), hi = s.power.front(), mean = 0.0;
    for (double v : s.power) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        mean += v;
    }
    mean /= static_cast<double>(s.power.size());
    r.summary["statistics"] = {{"reference", s.reference},
                               {"delta_t", rp.delta_t},
                               {"mean_power", mean},
                               {"ratio_to_reference", mean / s.reference},
                               {"max_over_min", lo > 0.0 ? json(hi / lo) : json(nullptr)}};
    Table t{"spectrum.csv", {"k", "P", "stderr", "reference"}, {}};
    for (std::size_t j = 0; j < s.k.size(); ++j) {
        t.rows.push_back({s.k[j], s.power[j], s.stderr[j], s.reference});
    }
    r.tables.push_back(std::move(t));
    return r;
}

ResultBundle run_astro() {
    const AstroEstimates a = astro_estimates();
    ResultBundle r;
    r.summary["statistics"] = {{"planet_mass", a.planet_mass},
                               {"planet_radius", a.planet_radius},
                               {"star_mass", a.star_mass},
                               {"star_radius", a.star_radius},
                               {"fusion_temperature", a.fusion_temperature}};
    Table t{"astro.csv", {"quantity", "value", "unit"}, {}};
    t.rows.push_back({std::string("planet_mass"), a.planet_mass, std::string("kg")});
    t.rows.push_back({std::string("planet_radius"), a.planet_radius, std::string("m")});
    t.rows.push_back({std::string("star_mass"), a.star_mass, std::string("kg")});
    t.rows.push_back({std::string("star_radius"), a.star_radius, std::string("m")});
    t.rows.push_back({std::string("fusion_temperature"), a.fusion_temperature, std::string("K")});
    r.tables.push_back(std::move(t));
    return r;
}

}  // namespace

ResultBundle run_experiment(const ExperimentConfig &config, unsigned workers) {
    validate(config);
    ResultBundle r;
    switch (config.kind) {
        case ExperimentKind::measure:
            r = run_measure(config, workers);
            break;
        case ExperimentKind::epr:
            r = run_epr(config, workers);
            break;
        case ExperimentKind::chsh:
            r = run_chsh(config, workers);
            break;
        case ExperimentKind::cosmo_spectrum:
            r = run_cosmo(config, workers);
            break;
        case ExperimentKind::astro_constants:
            r = run_astro();
            break;
    }
    r.summary["artifact_version"] = kArtifactVersion;
    r.summary["kind"] = to_string(config.kind);
    r.summary["config"] = to_json(config);
    r.summary["seed"] = config.master_seed ? json(*config.master_seed) : json(nullptr);
    r.summary["warnings"] = r.warnings;
    json tables = json::array();
    for (const Table &t : r.tables) {
        tables.push_back(t.name);
    }
    r.summary["tables"] = tables;
    return r;
}

std::string format_cell(const Cell &cell) {
    return std::visit(
        [](const auto &v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else {
                char buf[64];
                auto res = std::to_chars(buf, buf + sizeof buf, v);
                return std::string(buf, res.ptr);
            }
        },
        cell);
}

std::string to_csv(const Table &table) {
    std::ostringstream out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto &row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_cell(row[i]);
        }
        out << '\n';
    }
    return out.str();
}

std::vector<std::filesystem::path> emit_results(const ResultBundle &bundle, const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    auto write = [](const std::filesystem::path &path, const std::string &text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
        out.close();
        if (!out) {
            throw Error("cannot write '" + path.string() + "'");
        }
    };
    std::vector<std::filesystem::path> paths;
    const auto summary = dir / "summary.json";
    write(summary, bundle.summary.dump(2) + "\n");
    paths.push_back(summary);
    for (const Table &t : bundle.tables) {
        const auto path = dir / t.name;
        write(path, to_csv(t));
        paths.push_back(path);
    }
    return paths;
}

}  // namespace qmssb
