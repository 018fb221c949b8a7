#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qfound/harness.hpp"
#include "qfound/version.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << content;
}

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string seed;
    bool emit_plot = false;
};

int run(const std::string& experiment, const CommonOpts& opts) {
    using clock = std::chrono::steady_clock;
    try {
        qfound::KeyValueConfig overrides;
        if (!opts.config_path.empty())
            overrides = qfound::KeyValueConfig::parse(read_file(opts.config_path));
        if (!opts.seed.empty()) overrides.set("seed", opts.seed);

        const auto t0 = clock::now();
        const qfound::RunResult res = qfound::run_experiment(experiment, overrides);
        const double wall =
            std::chrono::duration<double>(clock::now() - t0).count();

        const std::string out_path =
            opts.out_path.empty() ? experiment + ".csv" : opts.out_path;
        write_file(out_path, res.table.to_csv());
        std::cout << experiment << ": " << res.table.rows.size() << " rows -> "
                  << out_path << " (" << wall << " s)\n";

        if (opts.emit_plot) {
            if (res.plot_script.empty()) {
                std::cout << "note: no plot template for " << experiment << "\n";
            } else {
                const std::string plot_path = out_path + ".gnuplot";
                write_file(plot_path, res.plot_script);
                std::cout << "plot script -> " << plot_path
                          << " (gnuplot -c " << plot_path << " " << out_path
                          << " out.png)\n";
            }
        }
        return 0;
    } catch (const qfound::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << experiment << " failed: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) try {
    CLI::App app{"qfound: configuration-driven quantum-foundations experiments"};
    app.set_version_flag("--version", qfound::kVersion);
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> experiments = {
        {"bell-bounds", "regime bounds by optimization and random search"},
        {"lhv-enumerate", "deterministic +-1 strategy enumeration"},
        {"chsh-scan", "coincidence Monte Carlo at four settings"},
        {"polarizer-chain", "two-polarizer transmission curve"},
        {"coincidence", "single coincidence run"},
        {"three-pol", "three-polarizer minimal-transmission scan"},
        {"bohm", "wavefunction decomposition diagnostics"},
        {"scattering", "dilation traces and resonance decay"},
        {"phase-op", "truncated ladder and phase-operator checks"},
    };

    std::vector<std::pair<std::string, CommonOpts>> runs;
    runs.reserve(experiments.size());
    for (const auto& [name, desc] : experiments) {
        runs.emplace_back(name, CommonOpts{});
        CommonOpts& opts = runs.back().second;
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", opts.config_path, "key = value config file");
        sub->add_option("--out", opts.out_path, "output CSV path");
        sub->add_option("--seed", opts.seed, "seed override");
        sub->add_flag("--emit-plot", opts.emit_plot, "write a gnuplot script");
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, opts] : runs)
        if (app.get_subcommand(name)->parsed()) return run(name, opts);
    return 1;
} catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
}
