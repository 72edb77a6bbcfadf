#include "batchsurf/rawvol.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "batchsurf/errors.hpp"
#include "io_util.hpp"

namespace batchsurf {
namespace {

nlohmann::json parse_header(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw RawVolumeError(RawVolumeErrc::HeaderParse, "rawvol: header is not a JSON object");
    return j;
}

std::array<double, 3> triple(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3)
        throw RawVolumeError(RawVolumeErrc::HeaderParse,
                             std::string("rawvol: header key '") + key +
                                 "' must be an array of 3 numbers");
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        if (!j[key][i].is_number())
            throw RawVolumeError(RawVolumeErrc::HeaderParse,
                                 std::string("rawvol: header key '") + key + "' must be numeric");
        out[i] = j[key][i].get<double>();
    }
    return out;
}

}  // namespace

ScanVolume load_raw_volume(const std::string& header_text,
                           const std::vector<std::uint8_t>& payload) {
    const auto j = parse_header(header_text);

    ScanVolume vol;
    const auto dims = triple(j, "dims");
    for (int i = 0; i < 3; ++i) {
        if (dims[i] < 1 || dims[i] != std::floor(dims[i]))
            throw RawVolumeError(RawVolumeErrc::HeaderParse, "rawvol: dims must be integers >= 1");
        vol.dims[i] = static_cast<int>(dims[i]);
    }
    vol.spacing = triple(j, "spacing_mm");
    for (double s : vol.spacing)
        if (!(s > 0.0))
            throw RawVolumeError(RawVolumeErrc::HeaderParse, "rawvol: spacing_mm must be > 0");
    if (j.contains("origin_mm")) vol.origin = triple(j, "origin_mm");
    if (j.contains("packet_id")) {
        if (!j["packet_id"].is_string())
            throw RawVolumeError(RawVolumeErrc::HeaderParse, "rawvol: packet_id must be a string");
        vol.metadata.packet_id = j["packet_id"].get<std::string>();
    }
    vol.metadata.source = ScanMetadata::Source::RawVolume;

    const std::size_t expected = vol.voxel_count() * 2;
    if (payload.size() != expected)
        throw RawVolumeError(RawVolumeErrc::PayloadSizeMismatch,
                             "rawvol: payload is " + std::to_string(payload.size()) +
                                 " bytes, expected " + std::to_string(expected));

    vol.data.resize(vol.voxel_count());
    for (std::size_t i = 0; i < vol.data.size(); ++i) {
        const std::uint16_t raw =
            static_cast<std::uint16_t>(payload[2 * i]) |
            static_cast<std::uint16_t>(static_cast<std::uint16_t>(payload[2 * i + 1]) << 8);
        vol.data[i] = static_cast<float>(static_cast<std::int16_t>(raw));
    }
    return vol;
}

ScanVolume load_raw_volume(const std::filesystem::path& rawvol_path) {
    auto sidecar = rawvol_path;
    sidecar += ".json";
    auto vol = load_raw_volume(detail::read_text_file(sidecar), detail::read_file(rawvol_path));
    if (vol.metadata.packet_id.empty()) vol.metadata.packet_id = rawvol_path.stem().string();
    return vol;
}

void save_raw_volume(const ScanVolume& vol, const std::filesystem::path& rawvol_path) {
    std::vector<std::uint8_t> payload(vol.voxel_count() * 2);
    for (std::size_t i = 0; i < vol.data.size(); ++i) {
        const double clamped = std::clamp(std::round(static_cast<double>(vol.data[i])),
                                          -32768.0, 32767.0);
        const auto v = static_cast<std::int16_t>(clamped);
        payload[2 * i] = static_cast<std::uint8_t>(v & 0xff);
        payload[2 * i + 1] = static_cast<std::uint8_t>((v >> 8) & 0xff);
    }
    detail::write_file(rawvol_path, payload);

    nlohmann::ordered_json j;
    j["dims"] = vol.dims;
    j["spacing_mm"] = vol.spacing;
    j["origin_mm"] = vol.origin;
    j["packet_id"] = vol.metadata.packet_id;
    auto sidecar = rawvol_path;
    sidecar += ".json";
    detail::write_file(sidecar, j.dump(2) + "\n");
}

}  // namespace batchsurf
