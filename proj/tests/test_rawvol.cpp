#include <doctest.h>

#include <batchsurf/errors.hpp>
#include <batchsurf/rawvol.hpp>
#include <random>

#include "test_util.hpp"

using namespace batchsurf;

namespace {

const char* kHeader444 = R"({
  "dims": [4, 4, 4],
  "spacing_mm": [1.0, 1.0, 1.0],
  "packet_id": "t"
})";

}  // namespace

TEST_CASE("zero payload loads as a zero volume") {
    const auto vol = load_raw_volume(kHeader444, std::vector<std::uint8_t>(128, 0));
    CHECK(vol.dims == std::array<int, 3>{4, 4, 4});
    CHECK(vol.spacing == std::array<double, 3>{1.0, 1.0, 1.0});
    CHECK(vol.metadata.packet_id == "t");
    REQUIRE(vol.data.size() == 64);
    for (float v : vol.data) CHECK(v == 0.0f);
}

TEST_CASE("payload size must match the dims") {
    try {
        load_raw_volume(kHeader444, std::vector<std::uint8_t>(127, 0));
        FAIL("expected RawVolumeError");
    } catch (const RawVolumeError& e) {
        CHECK(e.code() == RawVolumeErrc::PayloadSizeMismatch);
    }
}

TEST_CASE("malformed headers are rejected") {
    const std::vector<std::uint8_t> payload(128, 0);
    for (const char* bad : {
             "not json at all",
             "{\"spacing_mm\": [1,1,1], \"packet_id\": \"t\"}",          // no dims
             "{\"dims\": [4, 4], \"spacing_mm\": [1,1,1]}",              // short dims
             "{\"dims\": [4, 4, 0], \"spacing_mm\": [1,1,1], \"packet_id\": \"t\"}",
             "{\"dims\": [4, 4, 4], \"spacing_mm\": [1,1,0], \"packet_id\": \"t\"}",
         }) {
        try {
            load_raw_volume(bad, payload);
            FAIL("expected RawVolumeError for: ", bad);
        } catch (const RawVolumeError& e) {
            CHECK(e.code() == RawVolumeErrc::HeaderParse);
        }
    }
}

TEST_CASE("payload bytes decode as little-endian int16") {
    // 2x1x1 volume: values -2 and 513.
    const std::string header =
        R"({"dims": [2,1,1], "spacing_mm": [1,1,1], "packet_id": "le"})";
    const std::vector<std::uint8_t> payload{0xFE, 0xFF, 0x01, 0x02};
    const auto vol = load_raw_volume(header, payload);
    CHECK(vol.data[0] == -2.0f);
    CHECK(vol.data[1] == 513.0f);
}

TEST_CASE("save and reload preserves every voxel") {
    testutil::TempDir tmp;
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> hu(-1024, 3071);

    ScanVolume vol;
    vol.dims = {6, 5, 4};
    vol.spacing = {0.25, 0.5, 1.5};
    vol.origin = {1.0, -2.0, 3.0};
    vol.metadata.packet_id = "RT";
    vol.data.resize(vol.voxel_count());
    for (auto& v : vol.data) v = static_cast<float>(hu(rng));

    const auto path = tmp / "RT.rawvol";
    save_raw_volume(vol, path);
    CHECK(std::filesystem::exists(tmp / "RT.rawvol.json"));

    const auto back = load_raw_volume(path);
    CHECK(back.dims == vol.dims);
    CHECK(back.spacing == vol.spacing);
    CHECK(back.origin == vol.origin);
    CHECK(back.metadata.packet_id == "RT");
    REQUIRE(back.data.size() == vol.data.size());
    for (std::size_t i = 0; i < vol.data.size(); ++i) CHECK(back.data[i] == vol.data[i]);
}

TEST_CASE("saving clamps HU to the int16 range") {
    testutil::TempDir tmp;
    ScanVolume vol;
    vol.dims = {2, 1, 1};
    vol.data = {40000.0f, -40000.0f};
    vol.metadata.packet_id = "clamp";
    save_raw_volume(vol, tmp / "clamp.rawvol");
    const auto back = load_raw_volume(tmp / "clamp.rawvol");
    CHECK(back.data[0] == 32767.0f);
    CHECK(back.data[1] == -32768.0f);
}
