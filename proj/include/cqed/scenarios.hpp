// scenarios.hpp: crystals, position sweeps, random ensembles and analyzer atoms

#pragma once

#include "cqed/dynamics.hpp"
#include "cqed/model.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace cqed {

enum class Placement {
    regular,          // atom j at center + (j - (M-1)/2) a
    random_per_cell,  // one atom uniform in each cell of width a around the regular sites
    stacked,          // every atom at `center`
};

std::string_view to_string(Placement placement);
Placement placement_from_string(std::string_view name);

struct CrystalSpec {
    Eigen::Index atom_count{1};  // odd; the central atom is the emitter
    double lattice_constant{0.0};
    Placement placement{Placement::regular};
    double center{0.0};
    std::uint64_t seed{0};
    bool pin_emitter{true};  // random_per_cell: keep the emitter at `center`
};

// Seed of ensemble member `index`: the SplitMix64 output for state master + (index + 1) * phi,
// with phi = 0x9E3779B97F4A7C15. Member positions are drawn from std::mt19937_64 seeded
// with that value, converted to doubles through the top 53 bits.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);
double uniform01(std::mt19937_64& engine);

// M atoms sharing the emitter's frequency and coupling; only the central one is excited.
SystemConfig build_crystal(const CrystalSpec& spec, const AtomSpec& emitter, const ModeBasis& modes,
                           CouplingModel coupling_model = CouplingModel::broadband);

struct SweepResult {
    std::vector<double> offsets;
    std::vector<double> times;
    std::vector<std::vector<double>> populations;  // [offset][time], excited atom
};

// Shifts the initially excited atom of `base` by each offset and simulates independently.
SweepResult run_position_sweep(const SystemConfig& base, std::span<const double> offsets,
                               std::span<const double> times, const EvolutionOptions& options = {});

struct EnsembleOptions {
    std::size_t threads{1};
    bool keep_members{false};
    std::uint64_t first_index{0};  // members use derive_seed(master, first_index + i)
    EvolutionOptions evolution{};
    CouplingModel coupling_model{CouplingModel::broadband};
};

struct EnsembleResult {
    std::size_t config_count{0};
    std::uint64_t master_seed{0};
    std::vector<double> times;
    std::vector<double> mean_population;            // emitter P_e averaged over members
    std::vector<std::vector<double>> members;       // filled when keep_members is set
    std::vector<std::uint64_t> seeds;               // seed ledger, one per member
};

// Members are independent and run on up to `threads` workers; the mean is a pairwise sum in
// member order, so the result does not depend on the thread count.
EnsembleResult run_ensemble(const CrystalSpec& spec, const AtomSpec& emitter,
                            const ModeBasis& modes, std::size_t n_configs,
                            std::span<const double> times, std::uint64_t master_seed,
                            const EnsembleOptions& options = {});

// Sum of values in index order by recursive halving.
double pairwise_sum(std::span<const double> values);

struct AnalyzerBank {
    Eigen::Index count{100};
    double offset{0.5};        // distance from the emitter, all analyzers co-located
    double gamma_ratio{1e-4};  // analyzer linewidth / emitter linewidth
    double span{3.0};          // frequency grid covers omega_a +- span * Gamma_a
};

struct AnalyzerSetup {
    SystemConfig config;
    Eigen::Index emitter{0};
    std::vector<Eigen::Index> analyzers;  // atom indices in config
    std::vector<double> frequencies;
    double emitter_rate{0.0};
    double analyzer_rate{0.0};
    double time_of_flight{0.0};
};

// Appends the analyzer bank to a configuration holding one excited emitter.
AnalyzerSetup build_analyzer_bank(const AnalyzerBank& bank, const SystemConfig& emitter_config);

struct AnalyzerSpectrum {
    double time{0.0};
    bool has_signal{false};  // false before the time of flight ("no signal yet")
    std::vector<double> frequencies;
    std::vector<double> populations;
    std::vector<double> normalized;  // unit peak
};

AnalyzerSpectrum analyzer_spectrum(const ExcitationState& state, const AnalyzerSetup& setup);

}  // namespace cqed
