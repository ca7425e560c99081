// figures.cpp: canned experiment sets, one per figure id

#include "cqed/runner.hpp"

#include <numbers>

namespace cqed {

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentConfig base(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    return c;
}

double lambda_a(const ExperimentConfig& c) { return resonant_wavelength(c); }

FigurePart crystal_part(std::string name, std::size_t atoms, double a,
                        Placement placement = Placement::regular) {
    ExperimentConfig c = base(ExperimentKind::crystal);
    c.crystal_atoms = atoms;
    c.lattice_constant = a;
    c.placement = placement;
    return {std::move(name), c};
}

std::vector<FigurePart> figure_1() {
    ExperimentConfig c = base(ExperimentKind::sweep);
    const double l = lambda_a(c);
    c.sweep_offsets = {0.0, l / 16.0, l / 8.0, l / 4.0};
    return {{"offsets", c}};
}

std::vector<FigurePart> figure_2() {
    ExperimentConfig c = base(ExperimentKind::spectrum);
    c.spectrum_times.clear();
    c.overlap = false;
    c.density_times = {0.5, 1.0, 2.0, kPi, 4.0, 5.0, 2.0 * kPi};
    return {{"energy_density", c}};
}

std::vector<FigurePart> figure_3() {
    ExperimentConfig near = base(ExperimentKind::sweep);
    const double l = lambda_a(near);
    near.t_max = 3.0;
    near.samples = 1501;
    near.sweep_offsets.clear();
    near.sweep_positions = {l / 2.0, l / 4.0, l / 8.0, l / 16.0, l / 32.0, near.position};
    ExperimentConfig far = base(ExperimentKind::sweep);
    far.sweep_offsets.clear();
    far.sweep_positions = {l, l + l / 4.0, l + l / 8.0, far.position};
    return {{"near_mirror", near}, {"far_positions", far}};
}

std::vector<FigurePart> regular_crystals() {
    const double l = lambda_a(ExperimentConfig{});
    return {
        crystal_part("single", 1, l / 4.0),
        crystal_part("a_lambda_2", 101, l / 2.0),
        crystal_part("a_lambda_4", 101, l / 4.0),
        crystal_part("a_lambda_8", 101, l / 8.0),
        crystal_part("a_lambda_16", 101, l / 16.0),
    };
}

std::vector<FigurePart> figure_4() {
    auto parts = regular_crystals();
    parts.push_back(crystal_part("stacked", 101, 0.0, Placement::stacked));
    return parts;
}

std::vector<FigurePart> figure_5() {
    const double l = lambda_a(ExperimentConfig{});
    std::vector<FigurePart> parts;
    const auto shorten = [](ExperimentConfig& c) {
        c.t_max = 4.0;
        c.samples = 801;
    };
    const struct {
        const char* name;
        std::size_t atoms;
        double a;
    } cases[] = {{"lambda_8", 101, l / 8.0}, {"lambda_4", 101, l / 4.0}, {"lambda_2", 101, l / 2.0}};
    for (const auto& k : cases) {
        ExperimentConfig random = base(ExperimentKind::ensemble);
        random.crystal_atoms = k.atoms;
        random.lattice_constant = k.a;
        random.placement = Placement::random_per_cell;
        random.ensemble_configs = 100;
        shorten(random);
        parts.push_back({std::string("random_") + k.name, random});
        FigurePart regular = crystal_part(std::string("regular_") + k.name, k.atoms, k.a);
        shorten(regular.config);
        parts.push_back(regular);
    }
    FigurePart single = crystal_part("single", 1, l / 4.0);
    shorten(single.config);
    parts.push_back(single);
    return parts;
}

std::vector<FigurePart> figure_6() {
    const double l = lambda_a(ExperimentConfig{});
    auto parts = regular_crystals();
    parts.erase(parts.begin());
    parts.push_back(crystal_part("a_lambda_4_M11", 11, l / 4.0));
    parts.push_back(crystal_part("a_lambda_4_M21", 21, l / 4.0));
    return parts;
}

std::vector<FigurePart> figure_7() {
    ExperimentConfig c = base(ExperimentKind::spectrum);
    c.spectrum_times = {0.3, 0.7, 1.0, 3.0};
    c.overlap = true;
    return {{"spectrum", c}};
}

std::vector<FigurePart> figure_7b() {
    ExperimentConfig c = base(ExperimentKind::analyzer);
    c.readout_times = {0.3 + c.analyzer_offset, 2.0 + c.analyzer_offset};
    return {{"analyzer", c}};
}

std::vector<FigurePart> figure_8() {
    ExperimentConfig single = base(ExperimentKind::master_eq);
    single.samples = 8001;
    ExperimentConfig crystal = single;
    crystal.master_eq_system = MasterEqSystem::crystal;
    crystal.crystal_atoms = 101;
    crystal.lattice_constant = lambda_a(crystal) / 8.0;
    return {{"single", single}, {"crystal", crystal}};
}

}  // namespace

std::vector<std::string> figure_ids() { return {"1", "2", "3", "4", "5", "6", "7", "7b", "8"}; }

std::vector<FigurePart> figure_parts(std::string_view id) {
    std::vector<FigurePart> parts;
    if (id == "1") parts = figure_1();
    else if (id == "2") parts = figure_2();
    else if (id == "3") parts = figure_3();
    else if (id == "4") parts = figure_4();
    else if (id == "5") parts = figure_5();
    else if (id == "6") parts = figure_6();
    else if (id == "7") parts = figure_7();
    else if (id == "7b") parts = figure_7b();
    else if (id == "8") parts = figure_8();
    else {
        throw ValidationError("unknown figure id '" + std::string(id) +
                              "' (expected 1, 2, 3, 4, 5, 6, 7, 7b or 8)");
    }
    for (FigurePart& part : parts) part.config.output_dir = "fig" + std::string(id) + "/" + part.name;
    return parts;
}

}  // namespace cqed
