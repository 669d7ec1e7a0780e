#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairport/bias_detect.hpp"
#include "fairport/io.hpp"
#include "fairport/synth_bench.hpp"

namespace fairport {

enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 2,
    kExitInvariant = 3,
};

struct RunConfig {
    std::optional<std::filesystem::path> input;
    std::optional<std::filesystem::path> output;
    std::optional<std::filesystem::path> calibrator;
    std::optional<std::filesystem::path> report;
    ColumnNames columns;
    std::vector<std::string> declared_groups;

    TaskKind task = TaskKind::Discrimination;
    std::optional<double> alpha;
    double threshold = 0.5;
    std::optional<double> jitter_eps;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool timing = true;

    // synth
    std::optional<std::filesystem::path> synth_config;
    std::vector<std::string> group_specs;
    bool labels = true;
    SplitConfig split;
    std::size_t repetitions = 10;
};

int cmd_fit(const RunConfig& cfg, std::ostream& out);
int cmd_transform(const RunConfig& cfg, std::ostream& out);
int cmd_audit(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bias_labels(const RunConfig& cfg, std::ostream& out);
int cmd_synth(const RunConfig& cfg, std::ostream& out);

/// Full command line entry point. `args[0]` is the program name. Errors are
/// reported on `err` and mapped to exit codes: 2 for input problems, 3 for
/// internal invariant violations. FAIRPORT_SEED overrides --seed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fairport
