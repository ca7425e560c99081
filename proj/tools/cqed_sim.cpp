// cqed_sim: command-line front end
//
//   cqed_sim decay --out runs/decay
//   cqed_sim ensemble --config ens.ini --seed 7 --threads 4
//   cqed_sim reproduce-figure 7b --out figures

#include "cqed/config.hpp"
#include "cqed/errors.hpp"
#include "cqed/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend;
    std::optional<std::size_t> threads;

    void apply(cqed::ExperimentConfig& c) const {
        if (seed) c.seed = *seed;
        if (backend) c.backend = cqed::backend_from_string(*backend);
        if (threads) c.threads = *threads;
    }
};

int report(std::string_view category, int code, const std::string& message,
           const cqed::ConfigError* config_error = nullptr) {
    nlohmann::json record = {
        {"status", "error"},
        {"category", category},
        {"exit_code", code},
        {"message", message},
    };
    if (config_error) {
        if (config_error->line() > 0) record["line"] = config_error->line();
        if (!config_error->key().empty()) record["key"] = config_error->key();
    }
    std::cerr << record.dump() << std::endl;
    return code;
}

void print_files(const cqed::RunResult& r) {
    for (const auto& f : r.files) std::cout << f.string() << '\n';
}

int run_kind(cqed::ExperimentKind kind, const Overrides& o) {
    cqed::ExperimentConfig config;
    if (!o.config_path.empty()) {
        config = cqed::load_config(o.config_path, kind);
    } else {
        config.kind = kind;
        if (kind == cqed::ExperimentKind::ensemble) config.placement = cqed::Placement::random_per_cell;
    }
    o.apply(config);
    cqed::validate(config);
    const std::filesystem::path out = o.out_dir.empty() ? config.output_dir : o.out_dir;
    if (!o.out_dir.empty()) config.output_dir = o.out_dir;
    print_files(cqed::run_experiment(config, out));
    return 0;
}

int run_figure(const std::string& id, const Overrides& o) {
    if (!o.config_path.empty()) {
        throw cqed::ValidationError("reproduce-figure uses built-in settings; --config is not accepted");
    }
    const std::filesystem::path root = o.out_dir.empty() ? "." : o.out_dir;
    const auto results =
        cqed::reproduce_figure(id, root, [&](cqed::ExperimentConfig& c) { o.apply(c); });
    for (const auto& r : results) print_files(r);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-excitation multimode cavity QED simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cqed::version()));

    Overrides o;
    std::uint64_t seed = 0;
    std::string backend;
    std::size_t threads = 1;
    app.add_option("--config", o.config_path, "Experiment config file");
    app.add_option("--out", o.out_dir, "Output directory (overrides [output] directory)");
    auto* seed_opt = app.add_option("--seed", seed, "Master seed for ensembles");
    auto* backend_opt =
        app.add_option("--backend", backend, "Propagator backend")->check(CLI::IsMember({"eig", "rk"}));
    auto* threads_opt =
        app.add_option("--threads", threads, "Worker threads for ensembles")->check(CLI::PositiveNumber);

    const std::pair<const char*, cqed::ExperimentKind> kinds[] = {
        {"decay", cqed::ExperimentKind::decay},
        {"sweep", cqed::ExperimentKind::sweep},
        {"crystal", cqed::ExperimentKind::crystal},
        {"ensemble", cqed::ExperimentKind::ensemble},
        {"spectrum", cqed::ExperimentKind::spectrum},
        {"analyzer", cqed::ExperimentKind::analyzer},
        {"master-eq", cqed::ExperimentKind::master_eq},
    };
    std::optional<cqed::ExperimentKind> chosen;
    for (const auto& [name, kind] : kinds) {
        auto* sub = app.add_subcommand(name, "Run a " + std::string(name) + " experiment");
        sub->fallthrough();
        sub->callback([&chosen, kind = kind] { chosen = kind; });
    }
    std::string figure;
    auto* fig = app.add_subcommand("reproduce-figure", "Write the data behind one figure");
    fig->fallthrough();
    fig->add_option("id", figure, "Figure id")->required()->check(CLI::IsMember(cqed::figure_ids()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return report("usage", 2, e.what());
    }
    if (*seed_opt) o.seed = seed;
    if (*backend_opt) o.backend = backend;
    if (*threads_opt) o.threads = threads;

    try {
        if (chosen) return run_kind(*chosen, o);
        return run_figure(figure, o);
    } catch (const cqed::ConfigError& e) {
        return report("config", 2, e.what(), &e);
    } catch (const cqed::ValidationError& e) {
        return report("validation", 2, e.what());
    } catch (const cqed::NumericalError& e) {
        return report("numerical", 3, e.what());
    } catch (const cqed::IoError& e) {
        return report("io", 4, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return report("io", 4, e.what());
    } catch (const std::bad_alloc&) {
        return report("numerical", 3, "out of memory");
    }
}
