#include "batchsurf/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "batchsurf/errors.hpp"
#include "io_util.hpp"

namespace batchsurf {

BinaryVolume threshold_volume(const ScanVolume& vol, double threshold_hu) {
    BinaryVolume bin;
    bin.dims = vol.dims;
    bin.data.resize(vol.voxel_count());
    for (std::size_t i = 0; i < vol.data.size(); ++i)
        bin.data[i] = static_cast<double>(vol.data[i]) >= threshold_hu ? 1 : 0;
    return bin;
}

std::vector<std::int64_t> project_occupancy(const BinaryVolume& bin) {
    const std::size_t slice = static_cast<std::size_t>(bin.dims[0]) * bin.dims[1];
    std::vector<std::int64_t> profile(bin.dims[2], 0);
    for (int z = 0; z < bin.dims[2]; ++z) {
        const std::uint8_t* p = bin.data.data() + z * slice;
        std::int64_t count = 0;
        for (std::size_t i = 0; i < slice; ++i) count += p[i];
        profile[z] = count;
    }
    return profile;
}

std::vector<ZInterval> find_z_components(const std::vector<std::int64_t>& profile,
                                         const SegmentationParams& params) {
    const int nz = static_cast<int>(profile.size());
    std::vector<std::uint8_t> occupied(nz);
    for (int z = 0; z < nz; ++z) occupied[z] = profile[z] > 0 ? 1 : 0;

    // Close interior gaps of at most close_gap_vox slices.
    int prev_occupied = -1;
    for (int z = 0; z < nz; ++z) {
        if (!occupied[z]) continue;
        if (prev_occupied >= 0 && z - prev_occupied - 1 <= params.close_gap_vox)
            for (int g = prev_occupied + 1; g < z; ++g) occupied[g] = 1;
        prev_occupied = z;
    }

    std::vector<ZInterval> intervals;
    int z = 0;
    while (z < nz) {
        if (!occupied[z]) {
            ++z;
            continue;
        }
        int z1 = z;
        while (z1 < nz && occupied[z1]) ++z1;
        std::int64_t mass = 0;
        for (int k = z; k < z1; ++k) mass += profile[k];
        if (mass >= params.min_component_vox) intervals.push_back({z, z1});
        z = z1;
    }
    return intervals;
}

ChopResult compute_chop_boxes(const ScanVolume& vol, const PacketEntry& entry,
                              const SegmentationParams& params) {
    const BinaryVolume bin = threshold_volume(vol, params.threshold_hu);
    const auto intervals = find_z_components(project_occupancy(bin), params);
    const auto order = assignment_order(entry);

    ChopResult result;
    if (intervals.size() != order.size())
        result.mismatch = ChopResult::CountMismatch{static_cast<int>(intervals.size()),
                                                    static_cast<int>(order.size())};

    const int nx = vol.dims[0], ny = vol.dims[1], nz = vol.dims[2];
    for (std::size_t k = 0; k < intervals.size(); ++k) {
        ChopBox box;
        box.packet_id = vol.metadata.packet_id;
        box.frag_index = static_cast<int>(k);
        box.specimen_id = result.mismatch ? "?" : order[k];

        int x0 = nx, x1 = -1, y0 = ny, y1 = -1;
        for (int z = intervals[k].z0; z < intervals[k].z1; ++z) {
            for (int y = 0; y < ny; ++y) {
                const std::uint8_t* row = bin.data.data() + bin.index(0, y, z);
                for (int x = 0; x < nx; ++x) {
                    if (!row[x]) continue;
                    x0 = std::min(x0, x);
                    x1 = std::max(x1, x);
                    y0 = std::min(y0, y);
                    y1 = std::max(y1, y);
                }
            }
        }
        // Intervals came from this volume's occupancy, so the slab holds
        // at least one true voxel.
        box.x0 = std::max(0, x0 - params.padding_vox);
        box.x1 = std::min(nx, x1 + 1 + params.padding_vox);
        box.y0 = std::max(0, y0 - params.padding_vox);
        box.y1 = std::min(ny, y1 + 1 + params.padding_vox);
        box.z0 = std::max(0, intervals[k].z0 - params.padding_vox);
        box.z1 = std::min(nz, intervals[k].z1 + params.padding_vox);
        result.boxes.push_back(std::move(box));
    }
    return result;
}

namespace {

constexpr const char* kChopHeader = "packet,frag_index,specimen_id,z0,z1,y0,y1,x0,x1";

std::vector<std::string> split_plain(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

struct ParsedRow {
    ChopBox box;
    int line_no = 0;
};

/// Parses data rows, routing per-row failures into errors. Returns rows
/// in file order.
std::vector<ParsedRow> parse_chop_rows(const std::string& text,
                                       std::vector<std::string>& errors) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_plain(line, ',') != split_plain(kChopHeader, ','))
        throw ChopCsvError(ChopCsvErrc::BadHeader,
                           std::string("chop csv: header must be exactly '") + kChopHeader + "'");

    std::vector<ParsedRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_plain(line, ',');
        const std::string where = "chop csv row " + std::to_string(line_no);
        if (cells.size() != 9) {
            errors.push_back(where + ": expected 9 cells, got " + std::to_string(cells.size()));
            continue;
        }
        ParsedRow row;
        row.line_no = line_no;
        row.box.packet_id = cells[0];
        const auto parse_int = [&](const std::string& cell, int& out) {
            try {
                std::size_t used = 0;
                out = std::stoi(cell, &used);
                return used == cell.size();
            } catch (const std::exception&) {
                return false;
            }
        };
        bool ok = true;
        int vals[7];
        for (int i = 0; i < 7; ++i)
            if (!parse_int(cells[i == 0 ? 1 : i + 2], vals[i])) {
                errors.push_back(where + ": cell '" + cells[i == 0 ? 1 : i + 2] +
                                 "' is not an integer");
                ok = false;
                break;
            }
        if (!ok) continue;
        row.box.frag_index = vals[0];
        row.box.specimen_id = cells[2];
        row.box.z0 = vals[1];
        row.box.z1 = vals[2];
        row.box.y0 = vals[3];
        row.box.y1 = vals[4];
        row.box.x0 = vals[5];
        row.box.x1 = vals[6];

        if (row.box.frag_index < 0 || row.box.z0 < 0 || row.box.y0 < 0 || row.box.x0 < 0 ||
            row.box.z0 >= row.box.z1 || row.box.y0 >= row.box.y1 || row.box.x0 >= row.box.x1) {
            errors.push_back(where + ": bounds must satisfy 0 <= lo < hi on every axis");
            continue;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Drops rows whose z-interval overlaps an earlier row of the same
/// packet; both rows are named in the error.
std::vector<ParsedRow> drop_z_overlaps(std::vector<ParsedRow> rows,
                                       std::vector<std::string>& errors) {
    std::vector<ParsedRow> kept;
    for (const auto& row : rows) {
        bool clash = false;
        for (const auto& prev : kept) {
            if (prev.box.packet_id != row.box.packet_id) continue;
            if (row.box.z0 < prev.box.z1 && prev.box.z0 < row.box.z1) {
                errors.push_back("chop csv row " + std::to_string(row.line_no) +
                                 ": z-interval overlaps row " + std::to_string(prev.line_no) +
                                 " of packet '" + row.box.packet_id + "'");
                clash = true;
                break;
            }
        }
        if (!clash) kept.push_back(row);
    }
    return kept;
}

}  // namespace

std::string write_chop_csv(const std::vector<ChopBox>& boxes) {
    auto sorted = boxes;
    std::sort(sorted.begin(), sorted.end(), [](const ChopBox& a, const ChopBox& b) {
        if (a.packet_id != b.packet_id) return a.packet_id < b.packet_id;
        return a.frag_index < b.frag_index;
    });
    std::string out = kChopHeader;
    out += '\n';
    for (const auto& b : sorted) {
        out += b.packet_id + ',' + std::to_string(b.frag_index) + ',' + b.specimen_id + ',' +
               std::to_string(b.z0) + ',' + std::to_string(b.z1) + ',' + std::to_string(b.y0) +
               ',' + std::to_string(b.y1) + ',' + std::to_string(b.x0) + ',' +
               std::to_string(b.x1) + '\n';
    }
    return out;
}

std::vector<ChopBox> read_chop_csv(const std::string& text) {
    std::vector<std::string> errors;
    auto rows = parse_chop_rows(text, errors);
    if (!errors.empty())
        throw ChopCsvError(ChopCsvErrc::BadBounds, errors.front());
    std::vector<std::string> overlaps;
    rows = drop_z_overlaps(std::move(rows), overlaps);
    if (!overlaps.empty())
        throw ChopCsvError(ChopCsvErrc::OverlappingZ, overlaps.front());
    std::vector<ChopBox> boxes;
    boxes.reserve(rows.size());
    for (auto& r : rows) boxes.push_back(std::move(r.box));
    return boxes;
}

std::vector<ChopBox> load_chop_csv(const std::filesystem::path& path) {
    return read_chop_csv(detail::read_text_file(path));
}

ChopCsvParse read_chop_csv_lenient(const std::string& text) {
    ChopCsvParse out;
    auto rows = parse_chop_rows(text, out.row_errors);
    rows = drop_z_overlaps(std::move(rows), out.row_errors);
    out.boxes.reserve(rows.size());
    for (auto& r : rows) out.boxes.push_back(std::move(r.box));
    return out;
}

namespace {

std::uint8_t window_hu(float hu) {
    const double t = (static_cast<double>(hu) + 200.0) / 2700.0;
    return static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
}

void draw_rect(GrayImage& img, int u0, int u1, int v0, int v1) {
    u0 = std::clamp(u0, 0, img.width - 1);
    u1 = std::clamp(u1 - 1, 0, img.width - 1);
    v0 = std::clamp(v0, 0, img.height - 1);
    v1 = std::clamp(v1 - 1, 0, img.height - 1);
    for (int u = u0; u <= u1; ++u) {
        img.at(u, v0) = 255;
        img.at(u, v1) = 255;
    }
    for (int v = v0; v <= v1; ++v) {
        img.at(u0, v) = 255;
        img.at(u1, v) = 255;
    }
}

}  // namespace

PreviewPair render_preview(const ScanVolume& vol, const std::vector<ChopBox>& boxes) {
    const int nx = vol.dims[0], ny = vol.dims[1], nz = vol.dims[2];
    PreviewPair out;
    out.xz = make_image(nx, nz);
    out.yz = make_image(ny, nz);

    for (int z = 0; z < nz; ++z) {
        for (int y = 0; y < ny; ++y) {
            const float* row = vol.data.data() + vol.index(0, y, z);
            for (int x = 0; x < nx; ++x) {
                const std::uint8_t v = window_hu(row[x]);
                if (v > out.xz.at(x, z)) out.xz.at(x, z) = v;
                if (v > out.yz.at(y, z)) out.yz.at(y, z) = v;
            }
        }
    }

    for (const auto& b : boxes) {
        draw_rect(out.xz, b.x0, b.x1, b.z0, b.z1);
        draw_rect(out.yz, b.y0, b.y1, b.z0, b.z1);
    }
    return out;
}

}  // namespace batchsurf
