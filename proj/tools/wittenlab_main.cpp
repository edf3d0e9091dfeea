#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wittenlab/cli/commands.hpp"

namespace fs = std::filesystem;
using namespace wittenlab;
using namespace wittenlab::cli;

namespace {

struct Flags {
    std::string config_path;
    std::string preset;
    std::optional<std::string> out;
    std::optional<double> tmax;
    std::optional<int> modes;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    bool duality = false;
};

ExperimentConfig resolve(const Flags& f) {
    ExperimentConfig c = f.preset.empty() ? ExperimentConfig{} : preset_config(f.preset);
    if (!f.config_path.empty()) c = load_config_file(f.config_path, c);
    if (f.tmax) c.t_max = *f.tmax;
    if (f.modes) c.cutoff = *f.modes;
    if (f.seed) c.seed = *f.seed;
    if (f.format) c.format = *f.format;
    if (f.out) c.output = *f.out;
    if (f.duality) c.duality = true;
    validate(c);
    return c;
}

void write_all(const CommandResult& r, const std::string& dir) {
    fs::create_directories(dir);
    for (const auto& a : r.files) {
        std::ofstream out(fs::path(dir) / a.name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / a.name).string());
        out << a.content;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wittenlab: Witten-deformed Laplacians, small spectral packages and torsion on S^1 and T^2"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    Flags flags;
    for (const auto& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", flags.config_path, "JSON experiment config (schemas/experiment-config.schema.json)");
        sub->add_option("--preset", flags.preset, "circle-sin2 | torus-sin2-product");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--tmax", flags.tmax, "final deformation time T_max");
        sub->add_option("--modes", flags.modes, "Fourier cutoff N per circle factor");
        sub->add_option("--seed", flags.seed, "seed for randomized suites");
        sub->add_option("--format", flags.format, "table format")->check(CLI::IsMember({"csv", "json"}));
        if (name == "torsion") sub->add_flag("--duality", flags.duality, "also compare with the -f package");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const ExperimentConfig c = resolve(flags);
        const CommandResult r = run_command(command, c);
        write_all(r, c.output);
        std::cout << command << ": " << r.summary << (r.summary.empty() || r.summary.back() == '\n' ? "" : "\n");
        std::cout << "wrote " << r.files.size() << " files to " << c.output << " (config sha256 " << config_digest(c) << ")\n";
        return r.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        const std::string hint = remediation(e);
        if (!hint.empty()) std::cerr << "hint: " << hint << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
