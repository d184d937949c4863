#include "spdcsim/config.hpp"
#include "spdcsim/kernels.hpp"
#include "spdcsim/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_runtime = 3;

struct CommonOpts {
    std::string config_file;
    std::string out_dir;
    std::string format;
    long seed = -1;
    double duration = -1, pump_uw = -1, bin_ps = -1, window_ns = -1, tau_c_ns = -1;
    bool gnuplot = false;
    std::string backend;
};

void add_common(CLI::App* cmd, CommonOpts& o)
{
    cmd->add_option("--config", o.config_file, "configuration file (overlays the defaults)");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--format", o.format, "output format: csv|json");
    cmd->add_option("--duration", o.duration, "simulated duration, s");
    cmd->add_option("--pump-uw", o.pump_uw, "pump power, uW");
    cmd->add_option("--bin-ps", o.bin_ps, "histogram bin, ps");
    cmd->add_option("--window-ns", o.window_ns, "histogram half-window, ns");
    cmd->add_option("--tau-c-ns", o.tau_c_ns, "coincidence window, ns");
    cmd->add_flag("--gnuplot", o.gnuplot, "emit a gnuplot script next to the data");
    cmd->add_option("--kernels", o.backend, "arithmetic backend: scalar|avx2");
}

spdcsim::ScenarioConfig make_config(const std::string& scenario, const CommonOpts& o)
{
    spdcsim::ConfigTree tree;
    if (!o.config_file.empty())
        tree = spdcsim::ConfigTree::parse_file(o.config_file);
    if (!scenario.empty())
        tree.set("scenario.id", scenario);
    spdcsim::ScenarioConfig cfg = spdcsim::config_from_tree(tree);
    if (o.seed >= 0)
        cfg.seed = (std::uint64_t)o.seed;
    if (!o.out_dir.empty())
        cfg.out_dir = o.out_dir;
    if (!o.format.empty())
        cfg.format = o.format;
    if (o.duration > 0)
        cfg.duration = o.duration;
    if (o.pump_uw >= 0)
        cfg.pump_power = o.pump_uw * 1e-6;
    if (o.bin_ps > 0)
        cfg.bin = o.bin_ps * 1e-12;
    if (o.window_ns > 0)
        cfg.window = o.window_ns * 1e-9;
    if (o.tau_c_ns > 0)
        cfg.detection.tau_c = o.tau_c_ns * 1e-9;
    if (o.gnuplot)
        cfg.emit_gnuplot = true;
    if (!o.backend.empty()) {
        const auto b = o.backend == "avx2" ? spdcsim::kernels::Backend::avx2
                                           : spdcsim::kernels::Backend::scalar;
        if (!spdcsim::kernels::set_backend(b))
            throw std::runtime_error("kernel backend '" + o.backend + "' unavailable on this host");
    }
    return cfg;
}

int report_violations(const std::vector<spdcsim::Violation>& violations)
{
    if (violations.empty()) {
        std::puts("configuration valid");
        return exit_ok;
    }
    std::fprintf(stderr, "%zu violation(s):\n", violations.size());
    for (const auto& v : violations)
        std::fprintf(stderr, "  %s: %s\n", v.field.c_str(), v.message.c_str());
    return exit_config;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"spdcsim - cavity-enhanced SPDC single-photon source simulator"};
    app.require_subcommand(1);

    CommonOpts sim_opts;
    std::string scenario;
    CLI::App* sim = app.add_subcommand("simulate", "run a scenario and write its data files");
    sim->add_option("scenario", scenario, "fig1c|fig2a|fig2b|fig3a|fig3b|fig4a|fig4b|custom")
        ->required();
    add_common(sim, sim_opts);

    CommonOpts val_opts;
    CLI::App* val = app.add_subcommand("validate", "check a configuration file");
    val->add_option("--config", val_opts.config_file, "configuration file")->required();

    CommonOpts sweep_opts;
    std::string sweep_scenario, sweep_param, sweep_values;
    CLI::App* sweep = app.add_subcommand("sweep", "run a scenario over a list of parameter values");
    sweep->add_option("scenario", sweep_scenario, "scenario id")->required();
    sweep->add_option("--param", sweep_param, "config key, e.g. detection.eta")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    add_common(sweep, sweep_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const auto cfg = make_config(scenario, sim_opts);
            const auto violations = spdcsim::validate_config(cfg);
            if (!violations.empty())
                return report_violations(violations);
            const auto manifest = spdcsim::run_scenario(cfg);
            std::printf("%s: %zu file(s) under %s (config %s)\n", manifest.scenario.c_str(),
                        manifest.files.size(), cfg.out_dir.c_str(), manifest.config_hash.c_str());
            for (const auto& [k, v] : manifest.metrics)
                std::printf("  %s = %.6g\n", k.c_str(), v);
            return exit_ok;
        }
        if (val->parsed()) {
            const auto tree = spdcsim::ConfigTree::parse_file(val_opts.config_file);
            return report_violations(spdcsim::validate_config(spdcsim::config_from_tree(tree)));
        }
        if (sweep->parsed()) {
            spdcsim::ConfigTree values_probe;
            values_probe.set("v", sweep_values);
            const auto values = values_probe.get_doubles("v", {});
            if (values.empty())
                throw std::invalid_argument("--values holds no numbers");
            int index = 0;
            for (const double value : values) {
                auto cfg = make_config(sweep_scenario, sweep_opts);
                spdcsim::ConfigTree tree = spdcsim::config_to_tree(cfg);
                tree.set(sweep_param, value);
                cfg = spdcsim::config_from_tree(tree);
                cfg.out_dir += "/sweep_" + std::to_string(index++);
                const auto violations = spdcsim::validate_config(cfg);
                if (!violations.empty())
                    return report_violations(violations);
                const auto manifest = spdcsim::run_scenario(cfg);
                std::printf("%s=%.6g -> %s\n", sweep_param.c_str(), value, cfg.out_dir.c_str());
                (void)manifest;
            }
            return exit_ok;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_runtime;
    }
    return exit_ok;
}
