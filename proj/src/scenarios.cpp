// scenarios.cpp: experiment builders on top of model + dynamics

#include "cqed/scenarios.hpp"

#include "cqed/errors.hpp"
#include "cqed/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace cqed {

std::string_view to_string(Placement placement) {
    switch (placement) {
        case Placement::regular: return "regular";
        case Placement::random_per_cell: return "random_per_cell";
        case Placement::stacked: return "stacked";
    }
    return "regular";
}

Placement placement_from_string(std::string_view name) {
    if (name == "regular") return Placement::regular;
    if (name == "random_per_cell") return Placement::random_per_cell;
    if (name == "stacked") return Placement::stacked;
    throw ValidationError("unknown crystal placement '" + std::string(name) +
                          "' (expected regular, random_per_cell or stacked)");
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t z = master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

SystemConfig build_crystal(const CrystalSpec& spec, const AtomSpec& emitter, const ModeBasis& modes,
                           CouplingModel coupling_model) {
    const Eigen::Index M = spec.atom_count;
    if (M < 1 || M % 2 == 0) {
        throw ValidationError("crystal atom count must be odd so the emitter sits on the central site");
    }
    if (spec.placement != Placement::stacked && M > 1 && !(spec.lattice_constant > 0.0)) {
        throw ValidationError("crystal lattice constant must be positive");
    }
    const double L = modes.cavity_length;
    const double edge = 1e-9 * L;
    if (std::abs(emitter.position - spec.center) > edge) {
        throw ValidationError("emitter position must coincide with the crystal centre");
    }

    const Eigen::Index mid = (M - 1) / 2;
    const double a = spec.placement == Placement::stacked ? 0.0 : spec.lattice_constant;
    const auto site = [&](Eigen::Index j) {
        return spec.center + static_cast<double>(j - mid) * a;
    };
    const auto inside = [&](double r) { return r > edge && r < L - edge; };

    if (spec.placement == Placement::random_per_cell && M > 1) {
        if (site(0) - 0.5 * a < -edge || site(M - 1) + 0.5 * a > L + edge) {
            throw ValidationError("crystal overflows cavity: lattice cells extend past a mirror");
        }
    }

    std::mt19937_64 engine(spec.seed);
    SystemConfig config;
    config.modes = modes;
    config.coupling_model = coupling_model;
    config.atoms.reserve(static_cast<std::size_t>(M));
    for (Eigen::Index j = 0; j < M; ++j) {
        double r = site(j);
        const bool central = j == mid;
        if (spec.placement == Placement::random_per_cell && !(central && spec.pin_emitter)) {
            r = site(j) - 0.5 * a + a * uniform01(engine);
        }
        if (!inside(r)) {
            std::ostringstream msg;
            msg << "crystal overflows cavity: atom " << j << " at r = " << r
                << " is not strictly inside (0, " << L << ")";
            throw ValidationError(msg.str());
        }
        AtomSpec atom = emitter;
        atom.position = r;
        atom.role = central ? AtomRole::emitter : AtomRole::crystal;
        atom.initial_excited = central;
        config.atoms.push_back(atom);
    }
    validate(config);
    return config;
}

SweepResult run_position_sweep(const SystemConfig& base, std::span<const double> offsets,
                               std::span<const double> times, const EvolutionOptions& options) {
    const Eigen::Index emitter = excited_atom_index(base);
    SweepResult result;
    result.offsets.assign(offsets.begin(), offsets.end());
    result.times.assign(times.begin(), times.end());
    const double L = base.modes.cavity_length;
    for (const double offset : offsets) {
        SystemConfig config = base;
        const double r = config.atoms[static_cast<std::size_t>(emitter)].position + offset;
        if (!(r > 0.0 && r < L)) {
            std::ostringstream msg;
            msg << "sweep offset " << offset << " moves the atom to r = " << r
                << ", outside the cavity";
            throw ValidationError(msg.str());
        }
        config.atoms[static_cast<std::size_t>(emitter)].position = r;
        const auto states = simulate(config, times, options);
        std::vector<double> pe;
        pe.reserve(states.size());
        for (const auto& s : states) pe.push_back(atomic_population(s, emitter));
        result.populations.push_back(std::move(pe));
    }
    return result;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (const double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EnsembleResult run_ensemble(const CrystalSpec& spec, const AtomSpec& emitter,
                            const ModeBasis& modes, std::size_t n_configs,
                            std::span<const double> times, std::uint64_t master_seed,
                            const EnsembleOptions& options) {
    if (n_configs < 1) {
        throw ValidationError("ensemble needs at least one configuration");
    }
    if (spec.placement != Placement::random_per_cell) {
        throw ValidationError("ensemble crystals must use random_per_cell placement");
    }

    EnsembleResult result;
    result.config_count = n_configs;
    result.master_seed = master_seed;
    result.times.assign(times.begin(), times.end());
    result.seeds.resize(n_configs);
    for (std::size_t i = 0; i < n_configs; ++i) {
        result.seeds[i] = derive_seed(master_seed, options.first_index + i);
    }

    std::vector<std::vector<double>> members(n_configs);
    std::vector<std::exception_ptr> errors(n_configs);

    const auto run_member = [&](std::size_t i) {
        try {
            CrystalSpec member = spec;
            member.seed = result.seeds[i];
            const SystemConfig config = build_crystal(member, emitter, modes, options.coupling_model);
            const Eigen::Index e = excited_atom_index(config);
            const auto states = simulate(config, times, options.evolution);
            std::vector<double> pe;
            pe.reserve(states.size());
            for (const auto& s : states) pe.push_back(atomic_population(s, e));
            members[i] = std::move(pe);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, n_configs);
    if (workers == 1) {
        for (std::size_t i = 0; i < n_configs; ++i) run_member(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n_configs; i = next++) run_member(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < n_configs; ++i) {
        if (!errors[i]) continue;
        std::ostringstream prefix;
        prefix << "ensemble member " << (options.first_index + i) << " (seed " << result.seeds[i]
               << "): ";
        try {
            std::rethrow_exception(errors[i]);
        } catch (const NumericalError& e) {
            throw NumericalError(prefix.str() + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(prefix.str() + e.what());
        }
    }

    result.mean_population.resize(times.size());
    std::vector<double> column(n_configs);
    for (std::size_t t = 0; t < times.size(); ++t) {
        for (std::size_t i = 0; i < n_configs; ++i) column[i] = members[i][t];
        result.mean_population[t] = pairwise_sum(column) / static_cast<double>(n_configs);
    }
    if (options.keep_members) {
        result.members = std::move(members);
    }
    return result;
}

AnalyzerSetup build_analyzer_bank(const AnalyzerBank& bank, const SystemConfig& emitter_config) {
    validate(emitter_config);
    if (bank.count < 1) {
        throw ValidationError("analyzer bank needs at least one analyzer");
    }
    if (!(bank.gamma_ratio > 0.0)) {
        throw ValidationError("analyzer gamma_ratio must be positive (dark analyzers measure nothing)");
    }
    if (bank.gamma_ratio >= 0.1) {
        throw ValidationError("analyzer gamma_ratio must be much smaller than one");
    }
    if (!(bank.span >= 0.0)) {
        throw ValidationError("analyzer frequency span must be non-negative");
    }

    AnalyzerSetup setup;
    setup.config = emitter_config;
    setup.emitter = excited_atom_index(emitter_config);
    const AtomSpec& emitter = emitter_config.atoms[static_cast<std::size_t>(setup.emitter)];
    const double L = emitter_config.modes.cavity_length;

    const double r = emitter.position + bank.offset;
    if (!(r > 0.0 && r < L)) {
        throw ValidationError("analyzer bank overlaps a mirror");
    }
    setup.emitter_rate = golden_rule_rate(emitter.reduced_coupling, L);
    setup.analyzer_rate = bank.gamma_ratio * setup.emitter_rate;
    setup.time_of_flight = std::abs(bank.offset) / kSpeedOfLight;
    const double g = coupling_for_rate(setup.analyzer_rate, L);

    const double lo = emitter.transition_frequency - bank.span * setup.emitter_rate;
    const double hi = emitter.transition_frequency + bank.span * setup.emitter_rate;
    for (Eigen::Index j = 0; j < bank.count; ++j) {
        const double w = bank.count == 1
                             ? emitter.transition_frequency
                             : lo + (hi - lo) * static_cast<double>(j) /
                                        static_cast<double>(bank.count - 1);
        if (!(w > 0.0)) {
            throw ValidationError("analyzer frequency grid reaches non-positive frequencies");
        }
        AtomSpec atom;
        atom.position = r;
        atom.transition_frequency = w;
        atom.reduced_coupling = g;
        atom.role = AtomRole::analyzer;
        atom.initial_excited = false;
        setup.analyzers.push_back(setup.config.atom_count());
        setup.frequencies.push_back(w);
        setup.config.atoms.push_back(atom);
    }
    validate(setup.config);
    return setup;
}

AnalyzerSpectrum analyzer_spectrum(const ExcitationState& state, const AnalyzerSetup& setup) {
    if (state.atom_count != setup.config.atom_count() ||
        state.dimension() != setup.config.dimension()) {
        throw ValidationError("analyzer_spectrum: state does not belong to this analyzer setup");
    }
    AnalyzerSpectrum out;
    out.time = state.time;
    out.frequencies = setup.frequencies;
    out.populations.reserve(setup.analyzers.size());
    for (const Eigen::Index j : setup.analyzers) {
        out.populations.push_back(atomic_population(state, j));
    }
    const double peak = *std::max_element(out.populations.begin(), out.populations.end());
    out.has_signal = state.time >= setup.time_of_flight && peak > 0.0;
    if (out.has_signal) {
        out.normalized = normalize_peak(out.populations);
    } else {
        out.normalized.assign(out.populations.size(), 0.0);
    }
    return out;
}

}  // namespace cqed
