// runner.cpp: experiment dispatch and table output

#include "cqed/runner.hpp"

#include "cqed/master_eq.hpp"
#include "cqed/observables.hpp"
#include "cqed/table.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#ifndef CQED_VERSION
#define CQED_VERSION "0.0.0"
#endif

namespace cqed {

std::string_view version() { return CQED_VERSION; }

namespace {

class Output {
public:
    Output(const ExperimentConfig& config, std::filesystem::path dir)
        : config_(config), dir_(std::move(dir)) {}

    Table table(std::vector<std::string> columns) const {
        Table t(std::move(columns));
        t.meta("program", "cqed_sim " + std::string(version()));
        t.meta("kind", std::string(to_string(config_.kind)));
        return t;
    }

    void write(const std::string& name, const Table& t) {
        const auto path = dir_ / name;
        write_file_atomic(path, t.render());
        result_.files.push_back(path);
    }

    void seeds(std::vector<std::uint64_t> s) { seeds_ = std::move(s); }

    RunResult finish() {
        std::ostringstream m;
        m << "# cqed_sim run manifest; load with --config to regenerate every file listed\n";
        m << "# version = " << version() << '\n';
        m << "# kind = " << to_string(config_.kind) << '\n';
        for (const auto& f : result_.files) m << "# file = " << f.filename().string() << '\n';
        if (config_.kind == ExperimentKind::ensemble) {
            m << "# master_seed = " << config_.seed << '\n';
            for (std::size_t i = 0; i < seeds_.size(); ++i) {
                m << "# member_seed[" << i << "] = " << seeds_[i] << '\n';
            }
        }
        m << '\n' << serialize_config(config_);
        const auto path = dir_ / "manifest.txt";
        write_file_atomic(path, m.str());
        result_.files.push_back(path);
        result_.directory = dir_;
        return result_;
    }

private:
    const ExperimentConfig& config_;
    std::filesystem::path dir_;
    RunResult result_;
    std::vector<std::uint64_t> seeds_;
};

std::string index_name(std::string_view stem, std::size_t i) {
    return std::string(stem) + "_" + std::to_string(i);
}

std::vector<double> ascending_union(const std::vector<double>& a, const std::vector<double>& b) {
    std::set<double> s(a.begin(), a.end());
    s.insert(b.begin(), b.end());
    return {s.begin(), s.end()};
}

// Occupations of the modes the emitter couples to, in frequency order.
void spectrum_envelope(const std::vector<SpectrumRecord>& spectrum,
                       const std::vector<Eigen::Index>& modes, std::vector<double>& x,
                       std::vector<double>& y) {
    x.clear();
    y.clear();
    for (const Eigen::Index n : modes) {
        x.push_back(spectrum[static_cast<std::size_t>(n)].frequency);
        y.push_back(spectrum[static_cast<std::size_t>(n)].occupation);
    }
}

void run_decay(const ExperimentConfig& c, Output& out) {
    const SystemConfig system = single_atom_system(c);
    const auto times = time_grid(c);
    const auto states = simulate(system, times, evolution_options(c));
    Table t = out.table({"t", "P_e"});
    t.meta("golden_rule_rate", golden_rule_rate(system.atoms[0].reduced_coupling, c.cavity_length));
    for (const auto& s : states) t.add_row({s.time, atomic_population(s, 0)});
    out.write("decay.tsv", t);
}

void run_sweep(const ExperimentConfig& c, Output& out) {
    const SystemConfig base = single_atom_system(c);
    std::vector<double> offsets = c.sweep_offsets;
    if (!c.sweep_positions.empty()) {
        offsets.clear();
        for (double r : c.sweep_positions) offsets.push_back(r - c.position);
    }
    const auto times = time_grid(c);
    const SweepResult sweep = run_position_sweep(base, offsets, times, evolution_options(c));
    std::vector<std::string> columns{"t"};
    for (std::size_t k = 0; k < offsets.size(); ++k) columns.push_back(index_name("P_e", k));
    Table t = out.table(columns);
    for (std::size_t k = 0; k < offsets.size(); ++k) {
        t.meta(index_name("position", k), c.position + offsets[k]);
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> row{times[i]};
        for (const auto& series : sweep.populations) row.push_back(series[i]);
        t.add_row(row);
    }
    out.write("sweep.tsv", t);
}

void write_atoms(const SystemConfig& system, Output& out) {
    Table t = out.table({"atom", "position", "excited"});
    for (std::size_t j = 0; j < system.atoms.size(); ++j) {
        t.add_row({static_cast<double>(j), system.atoms[j].position,
                   system.atoms[j].initial_excited ? 1.0 : 0.0});
    }
    out.write("atoms.tsv", t);
}

void run_crystal(const ExperimentConfig& c, Output& out) {
    const SystemConfig system = crystal_system(c);
    const Eigen::Index e = excited_atom_index(system);
    const auto times = time_grid(c);
    const auto states = simulate(system, times, evolution_options(c));
    Table t = out.table({"t", "P_e", "R_atoms"});
    t.meta("atom_count", static_cast<double>(system.atom_count()));
    t.meta("lattice_constant", c.lattice_constant);
    t.meta("placement", std::string(to_string(c.placement)));
    for (const auto& s : states) {
        t.add_row({s.time, atomic_population(s, e), total_atomic_excitation(s)});
    }
    out.write("crystal.tsv", t);
    write_atoms(system, out);
}

void run_ensemble_kind(const ExperimentConfig& c, Output& out) {
    EnsembleOptions options;
    options.threads = c.threads;
    options.keep_members = c.keep_members;
    options.evolution = evolution_options(c);
    options.coupling_model = c.coupling_model;
    const auto times = time_grid(c);
    const EnsembleResult r = run_ensemble(crystal_spec(c), emitter_atom(c), mode_basis(c),
                                          c.ensemble_configs, times, c.seed, options);
    Table t = out.table({"t", "mean_P_e"});
    t.meta("configs", static_cast<double>(r.config_count));
    t.meta("master_seed", std::to_string(r.master_seed));
    for (std::size_t i = 0; i < times.size(); ++i) t.add_row({times[i], r.mean_population[i]});
    out.write("ensemble.tsv", t);

    Table s = out.table({"member", "seed"});
    for (std::size_t i = 0; i < r.seeds.size(); ++i) {
        s.add_cells({std::to_string(i), std::to_string(r.seeds[i])});
    }
    out.write("seeds.tsv", s);

    if (c.keep_members) {
        std::vector<std::string> columns{"t"};
        for (std::size_t k = 0; k < r.members.size(); ++k) columns.push_back(index_name("P_e", k));
        Table m = out.table(columns);
        for (std::size_t i = 0; i < times.size(); ++i) {
            std::vector<double> row{times[i]};
            for (const auto& member : r.members) row.push_back(member[i]);
            m.add_row(row);
        }
        out.write("members.tsv", m);
    }
    out.seeds(r.seeds);
}

void run_spectrum(const ExperimentConfig& c, Output& out) {
    const SystemConfig system = single_atom_system(c);
    const auto times = ascending_union(c.spectrum_times, c.density_times);
    const std::vector<Eigen::Index> interacting = interacting_modes(system, 0);
    const double rate = golden_rule_rate(system.atoms[0].reduced_coupling, c.cavity_length);
    std::vector<ExcitationState> states;
    if (!times.empty()) states = simulate(system, times, evolution_options(c));
    const auto state_at = [&](double t) -> const ExcitationState& {
        const auto it = std::lower_bound(times.begin(), times.end(), t);
        return states[static_cast<std::size_t>(it - times.begin())];
    };

    if (!c.spectrum_times.empty()) {
        Table t = out.table({"t", "n", "omega", "occupation", "interacting"});
        Table f = out.table({"t", "center", "width", "amplitude", "rms_residual"});
        f.meta("fit", "Lorentzian over interacting modes, width = full width at half maximum");
        std::vector<bool> coupled(static_cast<std::size_t>(system.modes.mode_count()), false);
        for (const Eigen::Index n : interacting) coupled[static_cast<std::size_t>(n)] = true;
        for (const double time : c.spectrum_times) {
            const auto spectrum = field_spectrum(state_at(time), system.modes);
            for (std::size_t n = 0; n < spectrum.size(); ++n) {
                t.add_row({time, static_cast<double>(spectrum[n].mode), spectrum[n].frequency,
                           spectrum[n].occupation, coupled[n] ? 1.0 : 0.0});
            }
            std::vector<double> x;
            std::vector<double> y;
            spectrum_envelope(spectrum, interacting, x, y);
            if (*std::max_element(y.begin(), y.end()) > 0.0) {
                const LorentzianFit fit = fit_lorentzian(x, y, c.transition_frequency, rate);
                f.add_row({time, fit.center, fit.width, fit.amplitude, fit.residual});
            } else {
                f.add_row({time, NAN, NAN, NAN, NAN});
            }
        }
        out.write("spectrum.tsv", t);
        out.write("spectrum_fit.tsv", f);
    }

    if (c.overlap) {
        const Propagator p = diagonalize(build_hamiltonian(system));
        const auto points = overlap_spectrum(p, initial_state(system));
        Table t = out.table({"energy", "weight"});
        for (const auto& o : points) t.add_row({o.energy, o.weight});
        out.write("overlap.tsv", t);
    }

    if (!c.density_times.empty()) {
        const SpatialGrid grid = SpatialGrid::uniform(c.cavity_length, c.grid_points);
        std::vector<std::string> columns{"r"};
        std::vector<std::vector<double>> columns_data;
        for (std::size_t k = 0; k < c.density_times.size(); ++k) {
            columns.push_back(index_name("I", k));
            columns_data.push_back(energy_density(state_at(c.density_times[k]), system.modes, grid));
        }
        Table t = out.table(columns);
        for (std::size_t k = 0; k < c.density_times.size(); ++k) {
            t.meta(index_name("time", k), c.density_times[k]);
        }
        for (std::size_t i = 0; i < grid.points.size(); ++i) {
            std::vector<double> row{grid.points[i]};
            for (const auto& col : columns_data) row.push_back(col[i]);
            t.add_row(row);
        }
        out.write("energy_density.tsv", t);
    }
}

void run_analyzer(const ExperimentConfig& c, Output& out) {
    const SystemConfig emitter_only = single_atom_system(c);
    const AnalyzerSetup setup = build_analyzer_bank(analyzer_bank(c), emitter_only);
    const double tf = setup.time_of_flight;

    std::vector<double> reference_times;
    for (double t : c.readout_times) reference_times.push_back(std::max(t - tf, 0.0));
    const auto readout_sorted = ascending_union(c.readout_times, {});
    const auto reference_sorted = ascending_union(reference_times, {});
    const auto readouts = simulate(setup.config, readout_sorted, evolution_options(c));
    const auto references = simulate(emitter_only, reference_sorted, evolution_options(c));
    const auto pick = [](const std::vector<double>& ts, const std::vector<ExcitationState>& ss,
                         double t) -> const ExcitationState& {
        return ss[static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin())];
    };
    const std::vector<Eigen::Index> interacting = interacting_modes(emitter_only, 0);
    const double w = c.transition_frequency;
    const double lo = w - c.analyzer_span * setup.emitter_rate;
    const double hi = w + c.analyzer_span * setup.emitter_rate;

    Table a = out.table({"t", "omega", "P_e", "normalized"});
    Table r = out.table({"t", "n", "omega", "occupation", "normalized"});
    a.meta("time_of_flight", tf);
    a.meta("analyzer_rate", setup.analyzer_rate);
    for (std::size_t k = 0; k < c.readout_times.size(); ++k) {
        const double t = c.readout_times[k];
        const ExcitationState& state = pick(readout_sorted, readouts, t);
        const AnalyzerSpectrum spec = analyzer_spectrum(state, setup);
        for (std::size_t j = 0; j < spec.frequencies.size(); ++j) {
            a.add_row({t, spec.frequencies[j], spec.populations[j], spec.normalized[j]});
        }
        const ExcitationState& ref = pick(reference_sorted, references, reference_times[k]);
        std::vector<double> x;
        std::vector<double> y;
        spectrum_envelope(field_spectrum(ref, emitter_only.modes), interacting, x, y);
        const auto yn = normalize_peak(y);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto n = interacting[i];
            r.add_row({reference_times[k], static_cast<double>(n + 1), x[i], y[i], yn[i]});
        }
        double analyzers = 0.0;
        for (double p : spec.populations) analyzers += p;
        const double field = 1.0 - total_atomic_excitation(state);
        a.meta(index_name("signal", k), spec.has_signal ? "yes" : "no signal yet");
        a.meta(index_name("back_action", k), field > 0.0 ? analyzers / field : NAN);
        if (spec.has_signal && *std::max_element(y.begin(), y.end()) > 0.0) {
            a.meta(index_name("correlation", k),
                   envelope_correlation(spec.frequencies, spec.normalized, x, yn, lo, hi));
        }
    }
    out.write("analyzer.tsv", a);
    out.write("reference_spectrum.tsv", r);
}

void run_master_eq(const ExperimentConfig& c, Output& out) {
    const SystemConfig system =
        c.master_eq_system == MasterEqSystem::crystal ? crystal_system(c) : single_atom_system(c);
    const Eigen::Index e = excited_atom_index(system);
    const RestrictedHamiltonian h = build_hamiltonian(system);
    const auto times = time_grid(c);
    const std::vector<ExcitationState> states =
        c.backend == Backend::eig ? evolve_eig(diagonalize(h), initial_state(system), times)
                                  : evolve_rk(h, initial_state(system), times, c.rk_step);
    MasterEqTrace trace = reconstruct_eta(h, states, e, c.validity_threshold);
    if (c.frame == Frame::interaction) {
        trace = free_atom_interaction_frame(trace, c.transition_frequency);
    }
    const auto reintegrated = reintegrate_population(trace);
    Table t = out.table({"t", "Gamma", "delta", "valid", "P_e", "P_e_reintegrated"});
    t.meta("frame", std::string(to_string(c.frame)));
    t.meta("system", std::string(to_string(c.master_eq_system)));
    t.meta("threshold", c.validity_threshold);
    t.meta("golden_rule_rate", golden_rule_rate(std::sqrt(c.coupling_squared), c.cavity_length));
    for (std::size_t i = 0; i < times.size(); ++i) {
        t.add_row({trace.times[i], trace.gamma[i], trace.delta[i], static_cast<double>(trace.valid[i]),
                   trace.population[i], reintegrated[i]});
    }
    out.write("master_eq.tsv", t);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    validate(config);
    Output out(config, out_dir);
    switch (config.kind) {
        case ExperimentKind::decay: run_decay(config, out); break;
        case ExperimentKind::sweep: run_sweep(config, out); break;
        case ExperimentKind::crystal: run_crystal(config, out); break;
        case ExperimentKind::ensemble: run_ensemble_kind(config, out); break;
        case ExperimentKind::spectrum: run_spectrum(config, out); break;
        case ExperimentKind::analyzer: run_analyzer(config, out); break;
        case ExperimentKind::master_eq: run_master_eq(config, out); break;
    }
    return out.finish();
}

}  // namespace cqed
