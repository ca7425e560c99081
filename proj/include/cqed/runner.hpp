// runner.hpp: run one experiment and write its tables plus a manifest

#pragma once

#include "cqed/config.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cqed {

std::string_view version();

struct RunResult {
    std::filesystem::path directory;
    std::vector<std::filesystem::path> files;  // data tables, then manifest.txt
};

// Writes every table of `config.kind` into `out_dir`, each atomically. manifest.txt holds
// the version, seeds and the fully resolved config; it is itself a loadable config.
RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

// Named sub-experiments that together make up one figure's data.
struct FigurePart {
    std::string name;
    ExperimentConfig config;
};

// Ids: 1, 2, 3, 4, 5, 6, 7, 7b, 8.
std::vector<std::string> figure_ids();
std::vector<FigurePart> figure_parts(std::string_view id);

// Runs each part into root/fig<id>/<part name>. `adjust` is applied to every part first
// (CLI overrides).
template <typename Adjust>
std::vector<RunResult> reproduce_figure(std::string_view id, const std::filesystem::path& root,
                                        Adjust&& adjust) {
    std::vector<RunResult> results;
    for (FigurePart& part : figure_parts(id)) {
        adjust(part.config);
        part.config.output_dir = (root / part.config.output_dir).string();
        results.push_back(run_experiment(part.config, part.config.output_dir));
    }
    return results;
}

}  // namespace cqed
