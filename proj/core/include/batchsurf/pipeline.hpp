#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "batchsurf/marching_cubes.hpp"
#include "batchsurf/mesh.hpp"
#include "batchsurf/segmentation.hpp"

namespace batchsurf {

struct RunConfig {
    std::filesystem::path input_dir;
    std::filesystem::path output_dir;
    std::filesystem::path manifest_path;
    SegmentationParams segmentation;
    SurfaceParams surface;
    std::map<std::string, double> iso_overrides;  // specimen id -> iso HU
    int parallelism = 1;
    bool emit_gifs = false;
};

/// Parses a `key = value` config file. Blank lines and lines starting
/// with # are skipped; unknown keys are rejected. Per-specimen iso
/// overrides use keys of the form `iso_hu.<specimen_id>`. Throws
/// ConfigError with the offending line number.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::string& source_name = "<memory>");

struct PacketRecord {
    std::string packet_id;
    std::string status;  // "ok" or "failed"
    int components_found = 0;
    std::vector<std::string> diagnostics;
};

struct FragmentRecord {
    std::string packet_id;
    int frag_index = 0;
    std::string specimen_id;
    std::string status;  // "ok" or "failed"
    std::string message;
    std::vector<std::string> outputs;  // file names under output_dir
    MeshStats stats;
    double wall_seconds = 0.0;
};

struct RunReport {
    std::string stage;
    std::vector<PacketRecord> packets;
    std::vector<FragmentRecord> fragments;
    int fragments_surfaced = 0;
    int failures = 0;
    double elapsed_seconds = 0.0;
};

std::string report_to_json(const RunReport& report);
void save_report(const RunReport& report, const std::filesystem::path& path);

/// Segments every packet under input_dir (one `<id>.rawvol` or one
/// `<id>/` DICOM directory per packet), writes a consolidated
/// ChopLocations.csv plus `<id>_xz.pgm` / `<id>_yz.pgm` previews into
/// output_dir. Per-packet failures are recorded and the batch continues.
RunReport cmd_firstpass(const RunConfig& config);

/// Re-reads the possibly human-edited ChopLocations.csv, validates boxes
/// against volume dims, and regenerates previews. No re-detection.
RunReport cmd_refine(const RunConfig& config);

/// Surfaces every box: extract, marching cubes (per-specimen iso
/// override when present), scale to mm, write `<specimen_id>.ply` and
/// optionally `.gif`, then run_report.json. Duplicate specimen ids
/// across packets abort before any write.
RunReport cmd_surface(const RunConfig& config);

/// 0 when everything succeeded, 1 when the report counts failures.
int report_exit_code(const RunReport& report);

}  // namespace batchsurf
