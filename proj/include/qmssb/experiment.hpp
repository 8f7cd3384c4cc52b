#pragma once

// Experiment orchestration and result persistence.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qmssb/config.hpp"

namespace qmssb {

inline constexpr const char *kArtifactVersion = "1.0.0";

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

struct Table {
    std::string name;  // file name
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct ResultBundle {
    /// kind, config echo, seed, statistics, warnings and artifact version.
    nlohmann::json summary;
    std::vector<Table> tables;
    std::vector<std::string> warnings;
};

/// Worker count affects only scheduling; the bundle depends on `config` alone.
ResultBundle run_experiment(const ExperimentConfig &config, unsigned workers = 0);

/// Writes summary.json and one CSV per table into `dir`; returns the paths.
std::vector<std::filesystem::path> emit_results(const ResultBundle &bundle, const std::filesystem::path &dir);

/// Shortest round-trip decimal text of a value.
std::string format_cell(const Cell &cell);
std::string to_csv(const Table &table);

}  // namespace qmssb
