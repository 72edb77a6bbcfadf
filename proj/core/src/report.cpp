#include <json.hpp>

#include "batchsurf/pipeline.hpp"
#include "io_util.hpp"

namespace batchsurf {

std::string report_to_json(const RunReport& report) {
    nlohmann::ordered_json j;
    j["stage"] = report.stage;
    j["totals"] = {
        {"fragments_surfaced", report.fragments_surfaced},
        {"failures", report.failures},
        {"elapsed_seconds", report.elapsed_seconds},
    };

    j["packets"] = nlohmann::ordered_json::array();
    for (const auto& p : report.packets) {
        nlohmann::ordered_json pj;
        pj["packet_id"] = p.packet_id;
        pj["status"] = p.status;
        pj["components_found"] = p.components_found;
        pj["diagnostics"] = p.diagnostics;
        j["packets"].push_back(std::move(pj));
    }

    j["fragments"] = nlohmann::ordered_json::array();
    for (const auto& f : report.fragments) {
        nlohmann::ordered_json fj;
        fj["packet_id"] = f.packet_id;
        fj["frag_index"] = f.frag_index;
        fj["specimen_id"] = f.specimen_id;
        fj["status"] = f.status;
        if (!f.message.empty()) fj["message"] = f.message;
        fj["outputs"] = f.outputs;
        if (f.status == "ok") {
            fj["stats"] = {
                {"n_vertices", f.stats.n_vertices},
                {"n_triangles", f.stats.n_triangles},
                {"bbox_min", {f.stats.bbox_min.x, f.stats.bbox_min.y, f.stats.bbox_min.z}},
                {"bbox_max", {f.stats.bbox_max.x, f.stats.bbox_max.y, f.stats.bbox_max.z}},
                {"area_mm2", f.stats.area_mm2},
                {"volume_mm3", f.stats.volume_mm3},
                {"euler_characteristic", f.stats.euler_characteristic},
                {"watertight", f.stats.watertight},
            };
        }
        fj["wall_seconds"] = f.wall_seconds;
        j["fragments"].push_back(std::move(fj));
    }
    return j.dump(2) + "\n";
}

void save_report(const RunReport& report, const std::filesystem::path& path) {
    detail::write_file(path, report_to_json(report));
}

int report_exit_code(const RunReport& report) { return report.failures > 0 ? 1 : 0; }

}  // namespace batchsurf
