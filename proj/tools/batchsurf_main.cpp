#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "batchsurf/errors.hpp"
#include "batchsurf/pipeline.hpp"

namespace {

struct CliOverrides {
    std::optional<std::string> input_dir;
    std::optional<std::string> output_dir;
    std::optional<std::string> manifest;
    std::optional<double> threshold_hu;
    std::optional<double> iso_hu;
    std::optional<int> jobs;
    bool gifs = false;
};

void add_common_options(CLI::App& cmd, std::string& config_path, CliOverrides& over) {
    cmd.add_option("--config", config_path, "Run configuration file (key = value lines)")
        ->required();
    cmd.add_option("--input", over.input_dir, "Packet directory (overrides config)");
    cmd.add_option("--output", over.output_dir, "Output directory (overrides config)");
    cmd.add_option("--manifest", over.manifest, "Manifest CSV (overrides config)");
    cmd.add_option("--threshold", over.threshold_hu, "Segmentation threshold in HU");
    cmd.add_option("--iso", over.iso_hu, "Surfacing iso value in HU");
    cmd.add_option("--jobs", over.jobs, "Worker threads");
    cmd.add_flag("--gifs", over.gifs, "Also write turntable animations");
}

batchsurf::RunConfig make_config(const std::string& config_path, const CliOverrides& over) {
    auto config = batchsurf::load_config(config_path);
    if (over.input_dir) config.input_dir = *over.input_dir;
    if (over.output_dir) config.output_dir = *over.output_dir;
    if (over.manifest) config.manifest_path = *over.manifest;
    if (over.threshold_hu) config.segmentation.threshold_hu = *over.threshold_hu;
    if (over.iso_hu) config.surface.iso_hu = *over.iso_hu;
    if (over.jobs) config.parallelism = std::max(1, *over.jobs);
    if (over.gifs) config.emit_gifs = true;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch CT-to-mesh pipeline: segment scan packets, refine chop boxes, surface fragments"};
    app.require_subcommand(1);

    std::string config_path;
    CliOverrides over;
    auto* firstpass = app.add_subcommand(
        "firstpass", "Segment packets and write ChopLocations.csv plus previews");
    auto* refine = app.add_subcommand(
        "refine", "Regenerate previews from the edited ChopLocations.csv");
    auto* surface = app.add_subcommand(
        "surface", "Extract and write a mesh per chop box");
    for (CLI::App* cmd : {firstpass, refine, surface})
        add_common_options(*cmd, config_path, over);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = make_config(config_path, over);
        batchsurf::RunReport report;
        if (firstpass->parsed()) {
            report = batchsurf::cmd_firstpass(config);
        } else if (refine->parsed()) {
            report = batchsurf::cmd_refine(config);
        } else {
            report = batchsurf::cmd_surface(config);
        }
        std::cerr << "[" << report.stage << "] done: " << report.fragments_surfaced
                  << " surfaced, " << report.failures << " failures, "
                  << report.elapsed_seconds << " s\n";
        return batchsurf::report_exit_code(report);
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 2;
    }
}
