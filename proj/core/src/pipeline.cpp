#include "batchsurf/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "batchsurf/dicom.hpp"
#include "batchsurf/errors.hpp"
#include "batchsurf/manifest.hpp"
#include "batchsurf/ply.hpp"
#include "batchsurf/rawvol.hpp"
#include "batchsurf/render.hpp"
#include "io_util.hpp"

namespace batchsurf {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Runs fn(0..n-1) on up to `parallelism` worker threads. Jobs must not
/// share mutable state; the first job exception is rethrown after join.
void run_parallel(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers =
        std::min<std::size_t>(std::max(parallelism, 1), n == 0 ? 1 : n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct PacketSource {
    std::string packet_id;
    fs::path path;
    bool is_dicom_dir = false;
};

/// Packets are `<id>.rawvol` files or `<id>/` directories of DICOM
/// slices, directly under input_dir. When both exist the raw file wins.
std::vector<PacketSource> discover_packets(const fs::path& input_dir) {
    std::vector<PacketSource> raw, dirs;
    for (const auto& entry : fs::directory_iterator(input_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".rawvol") {
            raw.push_back({entry.path().stem().string(), entry.path(), false});
        } else if (entry.is_directory()) {
            bool has_file = false;
            for (const auto& inner : fs::directory_iterator(entry.path()))
                if (inner.is_regular_file()) {
                    has_file = true;
                    break;
                }
            if (has_file)
                dirs.push_back({entry.path().filename().string(), entry.path(), true});
        }
    }
    std::vector<PacketSource> out = std::move(raw);
    for (auto& d : dirs) {
        const bool shadowed = std::any_of(out.begin(), out.end(), [&](const PacketSource& s) {
            return s.packet_id == d.packet_id;
        });
        if (!shadowed) out.push_back(std::move(d));
    }
    std::sort(out.begin(), out.end(), [](const PacketSource& a, const PacketSource& b) {
        return a.packet_id < b.packet_id;
    });
    return out;
}

ScanVolume load_packet(const PacketSource& src) {
    if (src.is_dicom_dir) return load_dicom_dir(src.path, src.packet_id);
    auto vol = load_raw_volume(src.path);
    vol.metadata.packet_id = src.packet_id;
    return vol;
}

const PacketSource* find_source(const std::vector<PacketSource>& sources,
                                const std::string& packet_id) {
    for (const auto& s : sources)
        if (s.packet_id == packet_id) return &s;
    return nullptr;
}

bool box_fits(const ChopBox& b, const std::array<int, 3>& dims) {
    return b.x0 >= 0 && b.y0 >= 0 && b.z0 >= 0 && b.x0 < b.x1 && b.y0 < b.y1 && b.z0 < b.z1 &&
           b.x1 <= dims[0] && b.y1 <= dims[1] && b.z1 <= dims[2];
}

void log_packet(const std::string& stage, const PacketRecord& rec) {
    std::cerr << "[" << stage << "] packet " << rec.packet_id << ": " << rec.status;
    if (rec.status == "ok") std::cerr << ", " << rec.components_found << " boxes";
    for (const auto& d : rec.diagnostics) std::cerr << "\n  " << d;
    std::cerr << "\n";
}

/// Boxes grouped by packet id, groups ordered by first appearance,
/// boxes within a group in input order.
std::vector<std::pair<std::string, std::vector<ChopBox>>> group_by_packet(
    const std::vector<ChopBox>& boxes) {
    std::vector<std::pair<std::string, std::vector<ChopBox>>> groups;
    for (const auto& b : boxes) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == b.packet_id; });
        if (it == groups.end()) {
            groups.push_back({b.packet_id, {b}});
        } else {
            it->second.push_back(b);
        }
    }
    return groups;
}

}  // namespace

RunReport cmd_firstpass(const RunConfig& config) {
    const auto t0 = Clock::now();
    RunReport report;
    report.stage = "firstpass";

    const Manifest manifest = load_manifest(config.manifest_path);
    const auto sources = discover_packets(config.input_dir);
    fs::create_directories(config.output_dir);

    struct PacketOut {
        PacketRecord record;
        std::vector<ChopBox> boxes;
    };
    std::vector<PacketOut> outs(sources.size());

    run_parallel(sources.size(), config.parallelism, [&](std::size_t i) {
        const auto& src = sources[i];
        auto& out = outs[i];
        out.record.packet_id = src.packet_id;
        try {
            const ScanVolume vol = load_packet(src);
            const PacketEntry* entry = manifest.find(src.packet_id);
            if (!entry)
                throw std::runtime_error("packet '" + src.packet_id +
                                         "' is not listed in the manifest");
            ChopResult result = compute_chop_boxes(vol, *entry, config.segmentation);
            out.record.components_found = static_cast<int>(result.boxes.size());
            if (result.mismatch)
                out.record.diagnostics.push_back(
                    "component count mismatch: found " + std::to_string(result.mismatch->found) +
                    ", manifest lists " + std::to_string(result.mismatch->expected) +
                    "; specimen ids left as '?'");
            const PreviewPair previews = render_preview(vol, result.boxes);
            save_pgm(previews.xz, config.output_dir / (src.packet_id + "_xz.pgm"));
            save_pgm(previews.yz, config.output_dir / (src.packet_id + "_yz.pgm"));
            out.boxes = std::move(result.boxes);
            out.record.status = "ok";
        } catch (const std::exception& e) {
            out.record.status = "failed";
            out.record.diagnostics.push_back(e.what());
        }
    });

    std::vector<ChopBox> all_boxes;
    for (auto& out : outs) {
        if (out.record.status != "ok") ++report.failures;
        all_boxes.insert(all_boxes.end(), out.boxes.begin(), out.boxes.end());
        log_packet(report.stage, out.record);
        report.packets.push_back(std::move(out.record));
    }
    detail::write_file(config.output_dir / "ChopLocations.csv", write_chop_csv(all_boxes));

    report.elapsed_seconds = seconds_since(t0);
    save_report(report, config.output_dir / "run_report.json");
    return report;
}

RunReport cmd_refine(const RunConfig& config) {
    const auto t0 = Clock::now();
    RunReport report;
    report.stage = "refine";

    const auto csv_path = config.output_dir / "ChopLocations.csv";
    ChopCsvParse parsed = read_chop_csv_lenient(detail::read_text_file(csv_path));
    if (!parsed.row_errors.empty()) {
        PacketRecord rec;
        rec.packet_id = "ChopLocations.csv";
        rec.status = "failed";
        rec.diagnostics = parsed.row_errors;
        report.failures += static_cast<int>(parsed.row_errors.size());
        log_packet(report.stage, rec);
        report.packets.push_back(std::move(rec));
    }

    const auto sources = discover_packets(config.input_dir);
    auto groups = group_by_packet(parsed.boxes);
    std::vector<PacketRecord> records(groups.size());

    run_parallel(groups.size(), config.parallelism, [&](std::size_t i) {
        const auto& [packet_id, boxes] = groups[i];
        auto& rec = records[i];
        rec.packet_id = packet_id;
        try {
            const PacketSource* src = find_source(sources, packet_id);
            if (!src)
                throw std::runtime_error("no volume for packet '" + packet_id + "' under " +
                                         config.input_dir.string());
            const ScanVolume vol = load_packet(*src);
            std::vector<ChopBox> valid;
            for (const auto& b : boxes) {
                if (box_fits(b, vol.dims)) {
                    valid.push_back(b);
                } else {
                    rec.diagnostics.push_back(
                        "box " + std::to_string(b.frag_index) + " (specimen '" + b.specimen_id +
                        "') does not fit volume dims; dropped from previews");
                }
            }
            rec.components_found = static_cast<int>(valid.size());
            const PreviewPair previews = render_preview(vol, valid);
            save_pgm(previews.xz, config.output_dir / (packet_id + "_xz.pgm"));
            save_pgm(previews.yz, config.output_dir / (packet_id + "_yz.pgm"));
            rec.status = "ok";
        } catch (const std::exception& e) {
            rec.status = "failed";
            rec.diagnostics.push_back(e.what());
        }
    });

    for (auto& rec : records) {
        if (rec.status != "ok") ++report.failures;
        report.failures += static_cast<int>(
            std::count_if(rec.diagnostics.begin(), rec.diagnostics.end(),
                          [](const std::string& d) { return d.rfind("box ", 0) == 0; }));
        log_packet(report.stage, rec);
        report.packets.push_back(std::move(rec));
    }

    report.elapsed_seconds = seconds_since(t0);
    save_report(report, config.output_dir / "run_report.json");
    return report;
}

RunReport cmd_surface(const RunConfig& config) {
    const auto t0 = Clock::now();
    RunReport report;
    report.stage = "surface";

    const auto boxes = load_chop_csv(config.output_dir / "ChopLocations.csv");

    std::map<std::string, const ChopBox*> by_specimen;
    for (const auto& b : boxes) {
        if (b.specimen_id == "?") continue;
        const auto [it, fresh] = by_specimen.emplace(b.specimen_id, &b);
        if (!fresh)
            throw PipelineError(PipelineErrc::DuplicateOutputName,
                                "specimen id '" + b.specimen_id +
                                    "' appears in packets '" + it->second->packet_id +
                                    "' and '" + b.packet_id +
                                    "'; output names would collide");
    }

    const auto sources = discover_packets(config.input_dir);
    fs::create_directories(config.output_dir);
    auto groups = group_by_packet(boxes);

    for (const auto& [packet_id, packet_boxes] : groups) {
        PacketRecord prec;
        prec.packet_id = packet_id;
        prec.components_found = static_cast<int>(packet_boxes.size());
        std::vector<FragmentRecord> frags(packet_boxes.size());
        for (std::size_t k = 0; k < packet_boxes.size(); ++k) {
            frags[k].packet_id = packet_id;
            frags[k].frag_index = packet_boxes[k].frag_index;
            frags[k].specimen_id = packet_boxes[k].specimen_id;
        }

        const PacketSource* src = find_source(sources, packet_id);
        ScanVolume vol;
        std::string load_error;
        if (!src) {
            load_error = "no volume for packet '" + packet_id + "' under " +
                         config.input_dir.string();
        } else {
            try {
                vol = load_packet(*src);
            } catch (const std::exception& e) {
                load_error = e.what();
            }
        }

        if (!load_error.empty()) {
            prec.status = "failed";
            prec.diagnostics.push_back(load_error);
            for (auto& f : frags) {
                f.status = "failed";
                f.message = load_error;
            }
        } else {
            prec.status = "ok";
            run_parallel(packet_boxes.size(), config.parallelism, [&](std::size_t k) {
                const auto tf = Clock::now();
                auto& frag = frags[k];
                const ChopBox& box = packet_boxes[k];
                try {
                    if (box.specimen_id == "?")
                        throw std::runtime_error(
                            "specimen id is '?'; assign one in ChopLocations.csv");
                    SurfaceParams params = config.surface;
                    if (const auto it = config.iso_overrides.find(box.specimen_id);
                        it != config.iso_overrides.end())
                        params.iso_hu = it->second;

                    const ScanVolume sub = extract_subvolume(vol, box);
                    TriangleMesh mesh = marching_cubes(sub, params);
                    mesh = scale_mesh(mesh,
                                      {sub.spacing[0], sub.spacing[1], sub.spacing[2]},
                                      {sub.origin[0], sub.origin[1], sub.origin[2]});
                    mesh.name = box.specimen_id;
                    frag.stats = compute_stats(mesh);

                    save_ply(mesh, config.output_dir / (box.specimen_id + ".ply"));
                    frag.outputs.push_back(box.specimen_id + ".ply");
                    if (config.emit_gifs) {
                        save_turntable(mesh, 36, config.output_dir / (box.specimen_id + ".gif"));
                        frag.outputs.push_back(box.specimen_id + ".gif");
                    }
                    frag.status = "ok";
                } catch (const std::exception& e) {
                    frag.status = "failed";
                    frag.message = e.what();
                }
                frag.wall_seconds = seconds_since(tf);
            });
        }

        for (auto& f : frags) {
            if (f.status == "ok") {
                ++report.fragments_surfaced;
            } else {
                ++report.failures;
            }
            std::cerr << "[surface] " << packet_id << "/" << f.specimen_id << ": " << f.status;
            if (!f.message.empty()) std::cerr << " (" << f.message << ")";
            std::cerr << "\n";
            report.fragments.push_back(std::move(f));
        }
        report.packets.push_back(std::move(prec));
    }

    report.elapsed_seconds = seconds_since(t0);
    save_report(report, config.output_dir / "run_report.json");
    return report;
}

}  // namespace batchsurf
