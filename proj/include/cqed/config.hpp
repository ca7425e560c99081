// config.hpp: experiment description read from flat INI-style documents
//
//   [experiment]
//   kind = crystal
//   [crystal]
//   atom_count = 101
//   lattice_constant = lambda/8
//
// Lengths accept plain numbers or multiples of the resonant wavelength / cavity length:
// `lambda`, `lambda/8`, `3*lambda/4`, `-lambda/16`, `L/2`. Omitted keys take the defaults
// below (L = 2 pi, omega_cut = 200, omega_a = 100, g_a^2 = 1/2, atom at L/2).

#pragma once

#include "cqed/dynamics.hpp"
#include "cqed/errors.hpp"
#include "cqed/master_eq.hpp"
#include "cqed/model.hpp"
#include "cqed/scenarios.hpp"

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cqed {

enum class ExperimentKind { decay, sweep, crystal, ensemble, spectrum, analyzer, master_eq };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);

enum class MasterEqSystem { single, crystal };

std::string_view to_string(MasterEqSystem system);
std::string_view to_string(Backend backend);
Backend backend_from_string(std::string_view name);
std::string_view to_string(Frame frame);

// Malformed document: carries the offending line (1-based, 0 if not tied to a line) and key.
class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& what, int line, std::string key)
        : ValidationError(what), line_(line), key_(std::move(key)) {}
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

struct ExperimentConfig {
    ExperimentKind kind{ExperimentKind::decay};

    // [cavity]
    double cavity_length{2.0 * std::numbers::pi};
    double cutoff_frequency{200.0};
    CouplingModel coupling_model{CouplingModel::broadband};

    // [atom] (the emitter)
    double position{std::numbers::pi};
    double transition_frequency{100.0};
    double coupling_squared{0.5};

    // [time]
    double t_max{8.0};
    std::size_t samples{4001};

    // [backend]
    Backend backend{Backend::eig};
    double rk_step{kDefaultRkStep};

    // [sweep]: exactly one of the two lists is non-empty
    std::vector<double> sweep_offsets{0.0};
    std::vector<double> sweep_positions;

    // [crystal]
    std::size_t crystal_atoms{101};
    double lattice_constant{std::numbers::pi / 200.0};  // lambda_a / 4
    Placement placement{Placement::regular};
    bool pin_emitter{true};

    // [ensemble]
    std::size_t ensemble_configs{10};
    std::uint64_t seed{42};
    std::size_t threads{1};
    bool keep_members{false};

    // [spectrum]
    std::vector<double> spectrum_times{3.0};
    std::vector<double> density_times;
    bool overlap{true};
    std::size_t grid_points{2048};

    // [analyzer]
    std::size_t analyzer_count{100};
    double analyzer_offset{0.5};
    double analyzer_gamma_ratio{1e-4};
    double analyzer_span{3.0};
    std::vector<double> readout_times{2.5};

    // [master_eq]
    MasterEqSystem master_eq_system{MasterEqSystem::single};
    Frame frame{Frame::interaction};
    double validity_threshold{kDefaultValidityThreshold};

    // [output]
    std::string output_dir{"out"};

    bool operator==(const ExperimentConfig&) const = default;
};

// Parses and validates. Unknown sections or keys, duplicates and malformed values raise
// ConfigError; physically invalid setups raise ValidationError from the model layer.
// With `kind` set, the document's own [experiment] kind must be absent or agree with it.
ExperimentConfig parse_config(std::string_view text,
                              std::optional<ExperimentKind> kind = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<ExperimentKind> kind = std::nullopt);

// Every field, numbers at 17 significant digits; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

// Throws ValidationError naming the violated invariant.
void validate(const ExperimentConfig& config);

double resonant_wavelength(const ExperimentConfig& config);
ModeBasis mode_basis(const ExperimentConfig& config);
AtomSpec emitter_atom(const ExperimentConfig& config);
SystemConfig single_atom_system(const ExperimentConfig& config);
CrystalSpec crystal_spec(const ExperimentConfig& config);
SystemConfig crystal_system(const ExperimentConfig& config);
AnalyzerBank analyzer_bank(const ExperimentConfig& config);
std::vector<double> time_grid(const ExperimentConfig& config);
EvolutionOptions evolution_options(const ExperimentConfig& config);

}  // namespace cqed
