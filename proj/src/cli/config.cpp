// config.cpp: INI-style experiment documents

#include "cqed/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace cqed {

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::decay: return "decay";
        case ExperimentKind::sweep: return "sweep";
        case ExperimentKind::crystal: return "crystal";
        case ExperimentKind::ensemble: return "ensemble";
        case ExperimentKind::spectrum: return "spectrum";
        case ExperimentKind::analyzer: return "analyzer";
        case ExperimentKind::master_eq: return "master-eq";
    }
    return "decay";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
    for (auto k : {ExperimentKind::decay, ExperimentKind::sweep, ExperimentKind::crystal,
                   ExperimentKind::ensemble, ExperimentKind::spectrum, ExperimentKind::analyzer,
                   ExperimentKind::master_eq}) {
        if (to_string(k) == name) return k;
    }
    throw ValidationError("unknown experiment kind '" + std::string(name) +
                          "' (expected decay, sweep, crystal, ensemble, spectrum, analyzer or master-eq)");
}

std::string_view to_string(MasterEqSystem system) {
    return system == MasterEqSystem::crystal ? "crystal" : "single";
}

std::string_view to_string(Backend backend) { return backend == Backend::rk ? "rk" : "eig"; }

Backend backend_from_string(std::string_view name) {
    if (name == "eig") return Backend::eig;
    if (name == "rk") return Backend::rk;
    throw ValidationError("unknown backend '" + std::string(name) + "' (expected eig or rk)");
}

std::string_view to_string(Frame frame) { return frame == Frame::lab ? "lab" : "interaction"; }

namespace {

const std::set<std::string> kKnownKeys = {
    "experiment.kind",
    "cavity.length", "cavity.cutoff", "cavity.coupling_model",
    "atom.position", "atom.transition_frequency", "atom.coupling_squared", "atom.coupling",
    "time.t_max", "time.samples",
    "backend.method", "backend.rk_step",
    "sweep.offsets", "sweep.positions",
    "crystal.atom_count", "crystal.lattice_constant", "crystal.placement", "crystal.pin_emitter",
    "ensemble.configs", "ensemble.seed", "ensemble.threads", "ensemble.keep_members",
    "spectrum.times", "spectrum.density_times", "spectrum.overlap", "spectrum.grid_points",
    "analyzer.count", "analyzer.offset", "analyzer.gamma_ratio", "analyzer.span",
    "analyzer.readout_times",
    "master_eq.system", "master_eq.frame", "master_eq.threshold",
    "output.directory",
};

struct Entry {
    std::string value;
    int line{0};
};

std::string trim(std::string_view s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::string format_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

class Reader {
public:
    explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        const auto it = entries_.find(key);
        const int line = it == entries_.end() ? 0 : it->second.line;
        std::ostringstream msg;
        if (line > 0) msg << "line " << line << ": ";
        msg << "key '" << key << "': " << why;
        throw ConfigError(msg.str(), line, key);
    }

    std::string text(const std::string& key, std::string fallback) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.value;
    }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        return parse_number(key, entries_.at(key).value);
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const std::string& v = entries_.at(key).value;
        std::uint64_t out = 0;
        const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || end != v.data() + v.size()) {
            fail(key, "expected a non-negative integer, got '" + v + "'");
        }
        return out;
    }

    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string& v = entries_.at(key).value;
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        fail(key, "expected true or false, got '" + v + "'");
    }

    double length(const std::string& key, double fallback, double lambda, double cavity) const {
        if (!has(key)) return fallback;
        return parse_length(key, entries_.at(key).value, lambda, cavity);
    }

    std::vector<double> lengths(const std::string& key, std::vector<double> fallback,
                                double lambda, double cavity) const {
        if (!has(key)) return fallback;
        std::vector<double> out;
        for (const std::string& item : split(key)) out.push_back(parse_length(key, item, lambda, cavity));
        return out;
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
        if (!has(key)) return fallback;
        std::vector<double> out;
        for (const std::string& item : split(key)) out.push_back(parse_number(key, item));
        return out;
    }

    template <typename F>
    auto choice(const std::string& key, F&& convert, decltype(convert(std::string_view{})) fallback) const {
        if (!has(key)) return fallback;
        try {
            return convert(std::string_view(entries_.at(key).value));
        } catch (const ValidationError& e) {
            fail(key, e.what());
        }
    }

private:
    std::vector<std::string> split(const std::string& key) const {
        std::vector<std::string> out;
        const std::string& v = entries_.at(key).value;
        if (trim(v).empty()) return out;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = v.find(',', start);
            const std::string item = trim(std::string_view(v).substr(start, comma - start));
            if (item.empty()) fail(key, "empty list element");
            out.push_back(item);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }

    double parse_number(const std::string& key, const std::string& v) const {
        double out = 0.0;
        const char* first = v.data();
        if (!v.empty() && v[0] == '+') ++first;
        const auto [end, ec] = std::from_chars(first, v.data() + v.size(), out);
        if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(out)) {
            fail(key, "expected a finite number, got '" + v + "'");
        }
        return out;
    }

    double parse_length(const std::string& key, const std::string& v, double lambda, double cavity) const {
        static const std::regex pattern(
            R"(^([+-])?\s*(?:([0-9.eE+-]+)\s*\*\s*)?(lambda|L)\s*(?:/\s*([0-9.eE+-]+))?$)");
        std::smatch m;
        if (!std::regex_match(v, m, pattern)) return parse_number(key, v);
        double value = m[3] == "lambda" ? lambda : cavity;
        if (m[2].matched) value *= parse_number(key, m[2].str());
        if (m[4].matched) {
            const double d = parse_number(key, m[4].str());
            if (d == 0.0) fail(key, "division by zero in '" + v + "'");
            value /= d;
        }
        return m[1] == "-" ? -value : value;
    }

    std::map<std::string, Entry> entries_;
};

std::map<std::string, Entry> tokenize(std::string_view text) {
    std::map<std::string, Entry> entries;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string line(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header",
                                  line_no, "");
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            const bool known = std::any_of(kKnownKeys.begin(), kKnownKeys.end(), [&](const std::string& k) {
                return k.compare(0, section.size() + 1, section + ".") == 0;
            });
            if (!known) {
                throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]",
                                  line_no, section);
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                                  line + "'",
                              line_no, "");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                                  "' appears before any [section]",
                              line_no, key);
        }
        const std::string full = section + "." + key;
        if (!kKnownKeys.count(full)) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key +
                                  "' in [" + section + "]",
                              line_no, full);
        }
        if (entries.count(full)) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + full +
                                  "' (first set on line " + std::to_string(entries[full].line) + ")",
                              line_no, full);
        }
        entries[full] = {trim(std::string_view(line).substr(eq + 1)), line_no};
    }
    return entries;
}

Placement default_placement(ExperimentKind kind) {
    return kind == ExperimentKind::ensemble ? Placement::random_per_cell : Placement::regular;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> kind) {
    const Reader in(tokenize(text));
    ExperimentConfig c;

    c.kind = in.choice("experiment.kind", experiment_kind_from_string, c.kind);
    if (kind) {
        if (in.has("experiment.kind") && c.kind != *kind) {
            in.fail("experiment.kind", "document asks for '" + std::string(to_string(c.kind)) +
                                           "' but the command is '" + std::string(to_string(*kind)) + "'");
        }
        c.kind = *kind;
    }

    c.cavity_length = in.number("cavity.length", c.cavity_length);
    c.cutoff_frequency = in.number("cavity.cutoff", c.cutoff_frequency);
    c.coupling_model = in.choice("cavity.coupling_model", coupling_model_from_string, c.coupling_model);

    c.transition_frequency = in.number("atom.transition_frequency", c.transition_frequency);
    if (!(c.transition_frequency > 0.0)) {
        in.fail("atom.transition_frequency", "transition frequency must be positive");
    }
    const double lambda = resonant_wavelength(c.transition_frequency);
    const double L = c.cavity_length;
    c.position = in.length("atom.position", 0.5 * L, lambda, L);
    if (in.has("atom.coupling_squared") && in.has("atom.coupling")) {
        in.fail("atom.coupling", "set either coupling or coupling_squared, not both");
    }
    if (in.has("atom.coupling")) {
        const double g = in.number("atom.coupling", 0.0);
        if (g < 0.0) in.fail("atom.coupling", "coupling must be non-negative");
        c.coupling_squared = g * g;
    } else {
        c.coupling_squared = in.number("atom.coupling_squared", c.coupling_squared);
    }

    c.t_max = in.number("time.t_max", c.t_max);
    c.samples = in.count("time.samples", c.samples);

    c.backend = in.choice("backend.method", backend_from_string, c.backend);
    c.rk_step = in.number("backend.rk_step", c.rk_step);

    if (in.has("sweep.offsets") && in.has("sweep.positions")) {
        in.fail("sweep.positions", "set either offsets or positions, not both");
    }
    if (in.has("sweep.positions")) {
        c.sweep_offsets.clear();
        c.sweep_positions = in.lengths("sweep.positions", {}, lambda, L);
        if (c.sweep_positions.empty()) in.fail("sweep.positions", "empty list");
    } else {
        c.sweep_offsets = in.lengths("sweep.offsets", c.sweep_offsets, lambda, L);
        if (c.sweep_offsets.empty()) in.fail("sweep.offsets", "empty list");
    }

    c.crystal_atoms = in.count("crystal.atom_count", c.crystal_atoms);
    c.lattice_constant = in.length("crystal.lattice_constant", 0.25 * lambda, lambda, L);
    c.placement = in.choice("crystal.placement", placement_from_string, default_placement(c.kind));
    c.pin_emitter = in.flag("crystal.pin_emitter", c.pin_emitter);

    c.ensemble_configs = in.count("ensemble.configs", c.ensemble_configs);
    c.seed = in.count("ensemble.seed", c.seed);
    c.threads = in.count("ensemble.threads", c.threads);
    c.keep_members = in.flag("ensemble.keep_members", c.keep_members);

    c.spectrum_times = in.numbers("spectrum.times", c.spectrum_times);
    c.density_times = in.numbers("spectrum.density_times", c.density_times);
    c.overlap = in.flag("spectrum.overlap", c.overlap);
    c.grid_points = in.count("spectrum.grid_points", c.grid_points);

    c.analyzer_count = in.count("analyzer.count", c.analyzer_count);
    c.analyzer_offset = in.length("analyzer.offset", c.analyzer_offset, lambda, L);
    c.analyzer_gamma_ratio = in.number("analyzer.gamma_ratio", c.analyzer_gamma_ratio);
    c.analyzer_span = in.number("analyzer.span", c.analyzer_span);
    c.readout_times = in.numbers("analyzer.readout_times", c.readout_times);

    c.master_eq_system = in.choice(
        "master_eq.system",
        [](std::string_view v) {
            if (v == "single") return MasterEqSystem::single;
            if (v == "crystal") return MasterEqSystem::crystal;
            throw ValidationError("expected single or crystal");
        },
        c.master_eq_system);
    c.frame = in.choice(
        "master_eq.frame",
        [](std::string_view v) {
            if (v == "interaction") return Frame::interaction;
            if (v == "lab") return Frame::lab;
            throw ValidationError("expected interaction or lab");
        },
        c.frame);
    c.validity_threshold = in.number("master_eq.threshold", c.validity_threshold);

    c.output_dir = in.text("output.directory", c.output_dir);

    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read config file '" + path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    if (in.bad()) {
        throw IoError("error while reading config file '" + path.string() + "'");
    }
    return parse_config(text.str(), kind);
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    const auto line = [&](std::string_view key, const std::string& value) {
        out << key << " = " << value << '\n';
    };
    const auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    out << "[experiment]\n";
    line("kind", std::string(to_string(c.kind)));
    out << "\n[cavity]\n";
    line("length", format_double(c.cavity_length));
    line("cutoff", format_double(c.cutoff_frequency));
    line("coupling_model", std::string(to_string(c.coupling_model)));
    out << "\n[atom]\n";
    line("position", format_double(c.position));
    line("transition_frequency", format_double(c.transition_frequency));
    line("coupling_squared", format_double(c.coupling_squared));
    out << "\n[time]\n";
    line("t_max", format_double(c.t_max));
    line("samples", std::to_string(c.samples));
    out << "\n[backend]\n";
    line("method", std::string(to_string(c.backend)));
    line("rk_step", format_double(c.rk_step));
    out << "\n[sweep]\n";
    if (c.sweep_positions.empty()) {
        line("offsets", format_list(c.sweep_offsets));
    } else {
        line("positions", format_list(c.sweep_positions));
    }
    out << "\n[crystal]\n";
    line("atom_count", std::to_string(c.crystal_atoms));
    line("lattice_constant", format_double(c.lattice_constant));
    line("placement", std::string(to_string(c.placement)));
    line("pin_emitter", b(c.pin_emitter));
    out << "\n[ensemble]\n";
    line("configs", std::to_string(c.ensemble_configs));
    line("seed", std::to_string(c.seed));
    line("threads", std::to_string(c.threads));
    line("keep_members", b(c.keep_members));
    out << "\n[spectrum]\n";
    line("times", format_list(c.spectrum_times));
    line("density_times", format_list(c.density_times));
    line("overlap", b(c.overlap));
    line("grid_points", std::to_string(c.grid_points));
    out << "\n[analyzer]\n";
    line("count", std::to_string(c.analyzer_count));
    line("offset", format_double(c.analyzer_offset));
    line("gamma_ratio", format_double(c.analyzer_gamma_ratio));
    line("span", format_double(c.analyzer_span));
    line("readout_times", format_list(c.readout_times));
    out << "\n[master_eq]\n";
    line("system", std::string(to_string(c.master_eq_system)));
    line("frame", std::string(to_string(c.frame)));
    line("threshold", format_double(c.validity_threshold));
    out << "\n[output]\n";
    line("directory", c.output_dir);
    return out.str();
}

double resonant_wavelength(const ExperimentConfig& config) {
    return resonant_wavelength(config.transition_frequency);
}

ModeBasis mode_basis(const ExperimentConfig& config) {
    return build_modes(config.cavity_length, config.cutoff_frequency);
}

AtomSpec emitter_atom(const ExperimentConfig& config) {
    if (!(config.coupling_squared >= 0.0)) {
        throw ValidationError("coupling_squared must be non-negative");
    }
    AtomSpec atom;
    atom.position = config.position;
    atom.transition_frequency = config.transition_frequency;
    atom.reduced_coupling = std::sqrt(config.coupling_squared);
    atom.role = AtomRole::emitter;
    atom.initial_excited = true;
    return atom;
}

SystemConfig single_atom_system(const ExperimentConfig& config) {
    SystemConfig system;
    system.modes = mode_basis(config);
    system.atoms = {emitter_atom(config)};
    system.coupling_model = config.coupling_model;
    validate(system);
    return system;
}

CrystalSpec crystal_spec(const ExperimentConfig& config) {
    CrystalSpec spec;
    spec.atom_count = static_cast<Eigen::Index>(config.crystal_atoms);
    spec.lattice_constant = config.lattice_constant;
    spec.placement = config.placement;
    spec.center = config.position;
    spec.seed = config.seed;
    spec.pin_emitter = config.pin_emitter;
    return spec;
}

SystemConfig crystal_system(const ExperimentConfig& config) {
    return build_crystal(crystal_spec(config), emitter_atom(config), mode_basis(config),
                         config.coupling_model);
}

AnalyzerBank analyzer_bank(const ExperimentConfig& config) {
    AnalyzerBank bank;
    bank.count = static_cast<Eigen::Index>(config.analyzer_count);
    bank.offset = config.analyzer_offset;
    bank.gamma_ratio = config.analyzer_gamma_ratio;
    bank.span = config.analyzer_span;
    return bank;
}

std::vector<double> time_grid(const ExperimentConfig& config) {
    return uniform_times(config.t_max, config.samples);
}

EvolutionOptions evolution_options(const ExperimentConfig& config) {
    return {config.backend, config.rk_step};
}

void validate(const ExperimentConfig& c) {
    const SystemConfig single = single_atom_system(c);
    if (c.samples < 2 || !(c.t_max > 0.0)) {
        throw ValidationError("time grid needs t_max > 0 and at least two samples");
    }
    if (!(c.rk_step > 0.0)) {
        throw ValidationError("rk_step must be positive");
    }
    const double L = c.cavity_length;
    const auto check_times = [](const std::vector<double>& times, const char* what) {
        for (double t : times) {
            if (!(t >= 0.0)) throw ValidationError(std::string(what) + " must be non-negative");
        }
    };
    switch (c.kind) {
        case ExperimentKind::decay:
            break;
        case ExperimentKind::sweep: {
            const auto& list = c.sweep_positions.empty() ? c.sweep_offsets : c.sweep_positions;
            const double base = c.sweep_positions.empty() ? c.position : 0.0;
            if (list.empty()) throw ValidationError("sweep needs at least one offset or position");
            for (double v : list) {
                const double r = base + v;
                if (!(r > 0.0 && r < L)) {
                    std::ostringstream msg;
                    msg << "sweep moves the atom to r = " << r << ", outside the cavity";
                    throw ValidationError(msg.str());
                }
            }
            break;
        }
        case ExperimentKind::crystal:
            crystal_system(c);
            break;
        case ExperimentKind::ensemble:
            if (c.placement != Placement::random_per_cell) {
                throw ValidationError("ensemble crystals must use random_per_cell placement");
            }
            if (c.ensemble_configs < 1) throw ValidationError("ensemble needs at least one configuration");
            if (c.threads < 1) throw ValidationError("threads must be at least 1");
            crystal_system(c);
            break;
        case ExperimentKind::spectrum:
            check_times(c.spectrum_times, "spectrum times");
            check_times(c.density_times, "density times");
            if (c.grid_points < 2) throw ValidationError("spatial grid needs at least two points");
            break;
        case ExperimentKind::analyzer:
            check_times(c.readout_times, "readout times");
            if (c.readout_times.empty()) throw ValidationError("analyzer needs at least one readout time");
            build_analyzer_bank(analyzer_bank(c), single);
            break;
        case ExperimentKind::master_eq:
            if (!(c.validity_threshold > 0.0)) {
                throw ValidationError("master_eq threshold must be positive");
            }
            if (c.master_eq_system == MasterEqSystem::crystal) crystal_system(c);
            break;
    }
}

}  // namespace cqed
