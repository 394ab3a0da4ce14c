#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cvfp/diagnostics.hpp"
#include "cvfp/phase_grid.hpp"
#include "cvfp_cli/config.hpp"

namespace cvfp::cli {

enum class Subcommand { SimulateLinear, SimulateMcKean, SolveVfp, Validate };

std::optional<Subcommand> parse_subcommand(std::string_view name);
std::string_view to_string(Subcommand s) noexcept;

struct RunOptions {
    int threads = 1;
    std::optional<std::uint64_t> seed;
};

struct OutputFile {
    std::string name;
    std::string contents;
};

struct OutputBundle {
    std::vector<OutputFile> files;  ///< in emission order, manifest last
    DiagnosticsReport report;
    int exit_code() const noexcept { return report.all_pass() ? 0 : 2; }
    const OutputFile* find(std::string_view name) const noexcept;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes) noexcept;

/// Runs one pipeline entirely in memory. Bundle bytes depend only on the
/// config, the seed and the subcommand.
OutputBundle run_scenario(const ScenarioConfig& cfg, Subcommand cmd, const RunOptions& opts = {});

void write_bundle(const OutputBundle& bundle, const std::filesystem::path& dir);

// Building blocks shared with the acceptance suite.

/// Grid for a d = 1 scenario; vmax and dt are resolved from the config.
PhaseGrid make_grid(const ScenarioConfig& cfg);
/// Normalised initial density sampled on the grid nodes.
DensityField initial_density(const ScenarioConfig& cfg, const PhaseGrid& grid);
/// Draws one particle from the normalised initial density.
InitialSampler initial_sampler(const ScenarioConfig& cfg);

}  // namespace cvfp::cli
