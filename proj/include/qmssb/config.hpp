#pragma once

// Experiment configuration: a JSON document with one section per module.
// Unknown keys, wrong types and out-of-range values raise ConfigError.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmssb/measurement.hpp"

namespace qmssb {

enum class ExperimentKind { measure, epr, chsh, cosmo_spectrum, astro_constants };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string &text);
bool is_stochastic(ExperimentKind kind);

struct MeasureBlock {
    double polar_angle = 1.5707963267948966;
    double azimuth = 0.0;
    double t_end = 12.0;
    double dt = 0.01;
};

struct EprBlock {
    std::string state = "singlet";  // singlet | triplet0 | up_up | up_down | mixed
    double theta1_deg = 0.0;
    double theta2_deg = 60.0;
    double field_strength1 = 1.0;
    double field_strength2 = 1.0;
    bool enforce_field_constraint = false;
    double t_end = 20.0;
    double dt = 0.01;
    /// Overrides the shared apparatus block for detector 2.
    std::optional<ApparatusParams> apparatus2;
};

struct ChshBlock {
    double a_deg = 90.0;
    double a_prime_deg = 0.0;
    double b_deg = 45.0;
    double b_prime_deg = 135.0;
};

struct CosmoBlock {
    double H = 1.0;
    double eta_start = -1000.0;
    double eta_end = -0.05;
    double lambda = 0.1;
    double phi0 = 1.0;
    /// Absent: sqrt(2 / lambda) / phi0.
    std::optional<double> delta_t;
    std::size_t steps = 1000;
    bool include_potential = false;
    bool include_memory = false;
    std::optional<double> noise_density;
    std::vector<double> k_grid{0.01, 0.1, 1.0};
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::astro_constants;
    std::optional<std::uint64_t> master_seed;
    std::size_t n = 1000;
    unsigned workers = 0;  // 0: QMSSB_WORKERS or hardware concurrency
    std::string output_dir = ".";
    std::optional<ApparatusParams> apparatus;
    std::optional<MeasureBlock> measure;
    std::optional<EprBlock> epr;
    std::optional<ChshBlock> chsh;
    std::optional<CosmoBlock> cosmo;
};

/// Parses and validates. Blocks required by the kind must be present; keys
/// inside a block default when absent.
ExperimentConfig parse_config(const nlohmann::json &doc);
ExperimentConfig load_config(const std::string &path);

/// Fully resolved form; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig &config);
nlohmann::json to_json(const ApparatusParams &p);

/// Throws ConfigError if the config cannot run as is.
void validate(const ExperimentConfig &config);

}  // namespace qmssb
