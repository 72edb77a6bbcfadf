#include "batchsurf/dicom.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <optional>

#include "batchsurf/errors.hpp"
#include "io_util.hpp"

namespace batchsurf {
namespace {

constexpr const char* kExplicitLittleEndian = "1.2.840.10008.1.2.1";

bool is_long_vr(const char vr[2]) {
    static const char* kLong[] = {"OB", "OD", "OF", "OL", "OV", "OW", "SQ",
                                  "SV", "UC", "UN", "UR", "UT", "UV"};
    for (const char* v : kLong)
        if (vr[0] == v[0] && vr[1] == v[1]) return true;
    return false;
}

struct Cursor {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    std::size_t remaining() const { return bytes.size() - pos; }
    bool has(std::size_t n) const { return remaining() >= n; }

    std::uint16_t u16() {
        const std::uint16_t v = static_cast<std::uint16_t>(bytes[pos]) |
                                static_cast<std::uint16_t>(bytes[pos + 1] << 8);
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[pos + i];
        pos += 4;
        return v;
    }
};

struct Element {
    std::uint16_t group = 0;
    std::uint16_t element = 0;
    char vr[2] = {' ', ' '};
    std::uint32_t length = 0;     // 0xFFFFFFFF means undefined
    std::size_t value_pos = 0;    // offset of the value bytes
};

constexpr std::uint32_t kUndefined = 0xFFFFFFFFu;

/// Reads one element header. Returns nullopt when fewer bytes remain
/// than a minimal header needs.
std::optional<Element> read_element_header(Cursor& c) {
    if (!c.has(8)) return std::nullopt;
    Element e;
    e.group = c.u16();
    e.element = c.u16();
    if (e.group == 0xFFFE) {
        // Item / delimiter tags carry no VR, just a 4-byte length.
        e.length = c.u32();
        e.value_pos = c.pos;
        return e;
    }
    e.vr[0] = static_cast<char>(c.bytes[c.pos]);
    e.vr[1] = static_cast<char>(c.bytes[c.pos + 1]);
    c.pos += 2;
    if (is_long_vr(e.vr)) {
        if (!c.has(6)) return std::nullopt;
        c.pos += 2;  // reserved
        e.length = c.u32();
    } else {
        if (!c.has(2)) return std::nullopt;
        e.length = c.u16();
    }
    e.value_pos = c.pos;
    return e;
}

void skip_undefined_sequence(Cursor& c, const std::string& source);

/// Skips the elements of one undefined-length item, up to its delimiter.
void skip_undefined_item(Cursor& c, const std::string& source) {
    while (true) {
        auto e = read_element_header(c);
        if (!e) throw DicomError(DicomErrc::MissingRequiredTag,
                                 source + ": truncated inside sequence item");
        if (e->group == 0xFFFE && e->element == 0xE00D) return;  // item delimiter
        if (e->length == kUndefined) {
            skip_undefined_sequence(c, source);
        } else {
            if (!c.has(e->length))
                throw DicomError(DicomErrc::MissingRequiredTag,
                                 source + ": truncated inside sequence item");
            c.pos += e->length;
        }
    }
}

/// Skips an undefined-length SQ or UN value, up to its delimiter.
void skip_undefined_sequence(Cursor& c, const std::string& source) {
    while (true) {
        auto e = read_element_header(c);
        if (!e) throw DicomError(DicomErrc::MissingRequiredTag,
                                 source + ": truncated inside sequence");
        if (e->group == 0xFFFE && e->element == 0xE0DD) return;  // sequence delimiter
        if (e->group != 0xFFFE || e->element != 0xE000)
            throw DicomError(DicomErrc::MissingRequiredTag,
                             source + ": malformed sequence structure");
        if (e->length == kUndefined) {
            skip_undefined_item(c, source);
        } else {
            if (!c.has(e->length))
                throw DicomError(DicomErrc::MissingRequiredTag,
                                 source + ": truncated inside sequence");
            c.pos += e->length;
        }
    }
}

std::string ascii_value(const Cursor& c, const Element& e) {
    std::string s(reinterpret_cast<const char*>(c.bytes.data() + e.value_pos), e.length);
    while (!s.empty() && (s.back() == '\0' || s.back() == ' ')) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && s[start] == ' ') ++start;
    return s.substr(start);
}

std::vector<double> decimal_values(const Cursor& c, const Element& e, const std::string& source,
                                   const char* tag_name) {
    const std::string s = ascii_value(c, e);
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t sep = s.find('\\', start);
        const std::string cell = s.substr(start, sep == std::string::npos ? sep : sep - start);
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw DicomError(DicomErrc::MissingRequiredTag,
                             source + ": tag " + tag_name + " has non-numeric value '" + cell + "'");
        }
        if (sep == std::string::npos) break;
        start = sep + 1;
    }
    return out;
}

}  // namespace

SliceRecord parse_dicom_file(const std::vector<std::uint8_t>& bytes,
                             const std::string& source_name) {
    if (bytes.size() < 132 || std::memcmp(bytes.data() + 128, "DICM", 4) != 0)
        throw DicomError(DicomErrc::MissingMagic, source_name + ": no DICM magic at offset 128");

    Cursor c{bytes, 132};

    // File meta group, always explicit VR little endian.
    std::string transfer_syntax;
    while (c.has(8)) {
        const std::size_t mark = c.pos;
        auto e = read_element_header(c);
        if (!e || e->group != 0x0002) {
            c.pos = mark;
            break;
        }
        if (!c.has(e->length))
            throw DicomError(DicomErrc::MissingRequiredTag, source_name + ": truncated file meta");
        if (e->element == 0x0010) transfer_syntax = ascii_value(c, *e);
        c.pos += e->length;
    }
    if (transfer_syntax != kExplicitLittleEndian)
        throw DicomError(DicomErrc::UnsupportedTransferSyntax,
                         source_name + ": transfer syntax '" + transfer_syntax +
                             "' (only explicit VR little endian is supported)");

    SliceRecord rec;
    bool have_rows = false, have_cols = false, have_spacing = false, have_position = false;
    bool have_instance = false, have_slope = false, have_intercept = false;
    bool have_bits = false, have_repr = false, have_pixels = false;
    int bits_allocated = 0;
    int pixel_representation = 0;
    std::size_t pixel_pos = 0;
    std::uint32_t pixel_len = 0;

    while (c.has(8)) {
        auto e = read_element_header(c);
        if (!e) break;

        if (e->length == kUndefined) {
            if (e->group == 0x7FE0 && e->element == 0x0010)
                throw DicomError(DicomErrc::TruncatedPixelData,
                                 source_name + ": encapsulated pixel data is not supported");
            skip_undefined_sequence(c, source_name);
            continue;
        }
        if (!c.has(e->length)) {
            if (e->group == 0x7FE0 && e->element == 0x0010)
                throw DicomError(DicomErrc::TruncatedPixelData,
                                 source_name + ": pixel data extends past end of file");
            break;  // truncated tail; required-tag check below reports
        }

        const std::uint32_t key = (static_cast<std::uint32_t>(e->group) << 16) | e->element;
        switch (key) {
            case 0x00280010:
                rec.rows = static_cast<int>(Cursor{bytes, e->value_pos}.u16());
                have_rows = true;
                break;
            case 0x00280011:
                rec.cols = static_cast<int>(Cursor{bytes, e->value_pos}.u16());
                have_cols = true;
                break;
            case 0x00280030: {
                const auto v = decimal_values(c, *e, source_name, "PixelSpacing");
                if (v.size() != 2)
                    throw DicomError(DicomErrc::MissingRequiredTag,
                                     source_name + ": PixelSpacing needs 2 values");
                // Stored as row spacing (dy) then column spacing (dx).
                rec.pixel_spacing = {v[1], v[0]};
                have_spacing = true;
                break;
            }
            case 0x00200032: {
                const auto v = decimal_values(c, *e, source_name, "ImagePositionPatient");
                if (v.size() != 3)
                    throw DicomError(DicomErrc::MissingRequiredTag,
                                     source_name + ": ImagePositionPatient needs 3 values");
                rec.position_xy = {v[0], v[1]};
                rec.position_z = v[2];
                have_position = true;
                break;
            }
            case 0x00200013: {
                const std::string s = ascii_value(c, *e);
                try {
                    rec.instance_number = std::stoi(s);
                } catch (const std::exception&) {
                    throw DicomError(DicomErrc::MissingRequiredTag,
                                     source_name + ": InstanceNumber '" + s + "' is not an integer");
                }
                have_instance = true;
                break;
            }
            case 0x00281053:
                rec.rescale_slope = decimal_values(c, *e, source_name, "RescaleSlope").at(0);
                have_slope = true;
                break;
            case 0x00281052:
                rec.rescale_intercept =
                    decimal_values(c, *e, source_name, "RescaleIntercept").at(0);
                have_intercept = true;
                break;
            case 0x00280100:
                bits_allocated = static_cast<int>(Cursor{bytes, e->value_pos}.u16());
                have_bits = true;
                break;
            case 0x00280103:
                pixel_representation = static_cast<int>(Cursor{bytes, e->value_pos}.u16());
                have_repr = true;
                break;
            case 0x00180060:
                rec.acquisition_tags["KVP"] = ascii_value(c, *e);
                break;
            case 0x00181151:
                rec.acquisition_tags["XRayTubeCurrent"] = ascii_value(c, *e);
                break;
            case 0x00189311:
                rec.acquisition_tags["SpiralPitchFactor"] = ascii_value(c, *e);
                break;
            case 0x7FE00010:
                pixel_pos = e->value_pos;
                pixel_len = e->length;
                have_pixels = true;
                break;
            default:
                break;
        }
        c.pos = e->value_pos + e->length;
    }

    const auto require = [&](bool have, const char* name) {
        if (!have)
            throw DicomError(DicomErrc::MissingRequiredTag,
                             source_name + ": missing required tag " + name);
    };
    require(have_rows, "Rows");
    require(have_cols, "Columns");
    require(have_spacing, "PixelSpacing");
    require(have_position, "ImagePositionPatient");
    require(have_instance, "InstanceNumber");
    require(have_slope, "RescaleSlope");
    require(have_intercept, "RescaleIntercept");
    require(have_bits, "BitsAllocated");
    require(have_repr, "PixelRepresentation");
    require(have_pixels, "PixelData");

    if (bits_allocated != 16)
        throw DicomError(DicomErrc::UnsupportedTransferSyntax,
                         source_name + ": BitsAllocated " + std::to_string(bits_allocated) +
                             " (only 16 is supported)");

    const std::size_t n = static_cast<std::size_t>(rec.rows) * rec.cols;
    if (pixel_len < n * 2)
        throw DicomError(DicomErrc::TruncatedPixelData,
                         source_name + ": pixel data holds " + std::to_string(pixel_len) +
                             " bytes, need " + std::to_string(n * 2));

    rec.pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint16_t raw =
            static_cast<std::uint16_t>(bytes[pixel_pos + 2 * i]) |
            static_cast<std::uint16_t>(bytes[pixel_pos + 2 * i + 1] << 8);
        rec.pixels[i] = pixel_representation == 1
                            ? static_cast<std::int32_t>(static_cast<std::int16_t>(raw))
                            : static_cast<std::int32_t>(raw);
    }
    return rec;
}

ScanVolume assemble_series(std::vector<SliceRecord> slices, const std::string& packet_id) {
    if (slices.size() < 2)
        throw SeriesError(SeriesErrc::TooFewSlices,
                          "series '" + packet_id + "': need at least 2 slices, got " +
                              std::to_string(slices.size()));

    const auto& first = slices.front();
    for (std::size_t i = 1; i < slices.size(); ++i) {
        const auto& s = slices[i];
        if (s.rows != first.rows || s.cols != first.cols ||
            s.pixel_spacing != first.pixel_spacing ||
            s.rescale_slope != first.rescale_slope ||
            s.rescale_intercept != first.rescale_intercept)
            throw SeriesError(SeriesErrc::InconsistentGeometry,
                              "series '" + packet_id + "': slice " + std::to_string(i) +
                                  " disagrees on rows/cols/spacing/rescale");
    }

    std::sort(slices.begin(), slices.end(), [](const SliceRecord& a, const SliceRecord& b) {
        if (a.position_z != b.position_z) return a.position_z < b.position_z;
        return a.instance_number < b.instance_number;
    });

    std::vector<double> gaps(slices.size() - 1);
    for (std::size_t i = 0; i + 1 < slices.size(); ++i)
        gaps[i] = slices[i + 1].position_z - slices[i].position_z;
    std::vector<double> sorted_gaps = gaps;
    std::sort(sorted_gaps.begin(), sorted_gaps.end());
    const double dz = sorted_gaps[sorted_gaps.size() / 2];
    if (!(dz > 0.0))
        throw SeriesError(SeriesErrc::NonUniformSpacing,
                          "series '" + packet_id + "': slices do not advance along z");
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (std::abs(gaps[i] - dz) > 0.1 * dz)
            throw SeriesError(SeriesErrc::NonUniformSpacing,
                              "series '" + packet_id + "': gap between slices " +
                                  std::to_string(i) + " and " + std::to_string(i + 1) + " is " +
                                  std::to_string(gaps[i]) + " mm vs median " +
                                  std::to_string(dz) + " mm");
    }

    ScanVolume vol;
    vol.dims = {first.cols, first.rows, static_cast<int>(slices.size())};
    vol.spacing = {first.pixel_spacing[0], first.pixel_spacing[1], dz};
    vol.origin = {slices.front().position_xy[0], slices.front().position_xy[1],
                  slices.front().position_z};
    vol.metadata.packet_id = packet_id;
    vol.metadata.source = ScanMetadata::Source::DicomSeries;
    vol.metadata.rescale_slope = first.rescale_slope;
    vol.metadata.rescale_intercept = first.rescale_intercept;
    vol.metadata.acquisition_tags = first.acquisition_tags;

    vol.data.resize(vol.voxel_count());
    const std::size_t slice_size = static_cast<std::size_t>(first.rows) * first.cols;
    for (std::size_t k = 0; k < slices.size(); ++k) {
        const auto& px = slices[k].pixels;
        float* dst = vol.data.data() + k * slice_size;
        for (std::size_t i = 0; i < slice_size; ++i)
            dst[i] = static_cast<float>(first.rescale_slope * px[i] + first.rescale_intercept);
    }
    return vol;
}

ScanVolume load_series(const std::vector<std::vector<std::uint8_t>>& slice_files,
                       const std::string& packet_id) {
    std::vector<SliceRecord> slices;
    slices.reserve(slice_files.size());
    for (std::size_t i = 0; i < slice_files.size(); ++i)
        slices.push_back(parse_dicom_file(slice_files[i], "slice " + std::to_string(i)));
    return assemble_series(std::move(slices), packet_id);
}

ScanVolume load_dicom_dir(const std::filesystem::path& dir, const std::string& packet_id) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<SliceRecord> slices;
    slices.reserve(files.size());
    for (const auto& f : files)
        slices.push_back(parse_dicom_file(detail::read_file(f), f.filename().string()));
    return assemble_series(std::move(slices), packet_id);
}

}  // namespace batchsurf
