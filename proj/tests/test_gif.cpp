#include <doctest.h>

#include <batchsurf/gif.hpp>
#include <cstdint>
#include <random>
#include <vector>

using namespace batchsurf;

// GIF89a parser and LZW decoder written from the format specification,
// independent of the encoder under test.
namespace {

struct DecodedGif {
    int width = 0;
    int height = 0;
    bool has_loop_extension = false;
    std::vector<int> frame_delays_cs;
    std::vector<std::vector<std::uint8_t>> frames;  // palette indices
};

struct ByteReader {
    const std::vector<std::uint8_t>& b;
    std::size_t pos = 0;

    std::uint8_t u8() {
        REQUIRE(pos < b.size());
        return b[pos++];
    }
    int u16() {
        const int lo = u8();
        return lo | (u8() << 8);
    }
    void skip(std::size_t n) {
        REQUIRE(pos + n <= b.size());
        pos += n;
    }
};

std::vector<std::uint8_t> lzw_decode(const std::vector<std::uint8_t>& data, int min_code_size) {
    const int clear = 1 << min_code_size;
    const int eoi = clear + 1;
    std::vector<int> prefix(4096, -1);
    std::vector<std::uint8_t> suffix(4096, 0);
    int next = eoi + 1;
    int width = min_code_size + 1;

    std::size_t bitpos = 0;
    const auto read_code = [&]() -> int {
        int v = 0;
        for (int i = 0; i < width; ++i) {
            const std::size_t byte = bitpos >> 3;
            REQUIRE(byte < data.size());
            v |= ((data[byte] >> (bitpos & 7)) & 1) << i;
            ++bitpos;
        }
        return v;
    };
    const auto expand = [&](int code) {
        std::vector<std::uint8_t> rev;
        while (code >= eoi + 1) {
            rev.push_back(suffix[code]);
            code = prefix[code];
        }
        REQUIRE(code < clear);
        rev.push_back(static_cast<std::uint8_t>(code));
        return std::vector<std::uint8_t>(rev.rbegin(), rev.rend());
    };

    std::vector<std::uint8_t> out;
    int prev = -1;
    while (true) {
        const int code = read_code();
        if (code == clear) {
            next = eoi + 1;
            width = min_code_size + 1;
            prev = -1;
            continue;
        }
        if (code == eoi) break;
        if (prev < 0) {
            REQUIRE(code < clear);
            out.push_back(static_cast<std::uint8_t>(code));
        } else {
            std::vector<std::uint8_t> entry;
            if (code < next) {
                entry = expand(code);
            } else {
                REQUIRE(code == next);  // the KwKwK case
                entry = expand(prev);
                entry.push_back(entry.front());
            }
            if (next < 4096) {
                prefix[next] = prev;
                suffix[next] = entry.front();
                ++next;
                if (next == (1 << width) && width < 12) ++width;
            }
            out.insert(out.end(), entry.begin(), entry.end());
        }
        prev = code;
    }
    return out;
}

DecodedGif decode_gif(const std::vector<std::uint8_t>& bytes) {
    ByteReader r{bytes};
    DecodedGif gif;

    REQUIRE(bytes.size() > 13);
    const char magic[] = {'G', 'I', 'F', '8', '9', 'a'};
    for (char c : magic) REQUIRE(r.u8() == static_cast<std::uint8_t>(c));

    gif.width = r.u16();
    gif.height = r.u16();
    const int flags = r.u8();
    REQUIRE((flags & 0x80) != 0);  // global color table present
    const int gct_size = 2 << (flags & 7);
    REQUIRE(gct_size == 256);
    r.skip(2);  // background index, aspect ratio
    for (int i = 0; i < 256; ++i) {
        REQUIRE(r.u8() == i);  // gray palette: r == g == b == index
        REQUIRE(r.u8() == i);
        REQUIRE(r.u8() == i);
    }

    int pending_delay = -1;
    while (true) {
        const int block = r.u8();
        if (block == 0x3B) break;  // trailer
        if (block == 0x21) {
            const int label = r.u8();
            if (label == 0xFF) {
                const int len = r.u8();
                std::string app;
                for (int i = 0; i < len; ++i) app.push_back(static_cast<char>(r.u8()));
                if (app.rfind("NETSCAPE", 0) == 0) gif.has_loop_extension = true;
                for (int len2 = r.u8(); len2 != 0; len2 = r.u8()) r.skip(len2);
            } else if (label == 0xF9) {
                REQUIRE(r.u8() == 4);
                r.u8();  // flags
                pending_delay = r.u16();
                r.u8();  // transparent index
                REQUIRE(r.u8() == 0);
            } else {
                for (int len = r.u8(); len != 0; len = r.u8()) r.skip(len);
            }
            continue;
        }
        REQUIRE(block == 0x2C);  // image descriptor
        REQUIRE(r.u16() == 0);
        REQUIRE(r.u16() == 0);
        REQUIRE(r.u16() == gif.width);
        REQUIRE(r.u16() == gif.height);
        REQUIRE(r.u8() == 0);  // no local palette, not interlaced

        const int min_code_size = r.u8();
        std::vector<std::uint8_t> data;
        for (int len = r.u8(); len != 0; len = r.u8())
            for (int i = 0; i < len; ++i) data.push_back(r.u8());

        gif.frames.push_back(lzw_decode(data, min_code_size));
        gif.frame_delays_cs.push_back(pending_delay);
        pending_delay = -1;
    }
    REQUIRE(r.pos == bytes.size());
    return gif;
}

GrayImage image_of(int w, int h, const std::vector<std::uint8_t>& px) {
    GrayImage im;
    im.width = w;
    im.height = h;
    im.pixels = px;
    return im;
}

}  // namespace

TEST_CASE("single frame carries the 89a magic and round-trips") {
    GrayImage im = image_of(3, 2, {0, 60, 120, 180, 240, 255});
    const auto bytes = encode_gif({im});
    CHECK(bytes[0] == 'G');
    CHECK(bytes[5] == 'a');

    const auto gif = decode_gif(bytes);
    CHECK(gif.width == 3);
    CHECK(gif.height == 2);
    CHECK_FALSE(gif.has_loop_extension);  // loop only written for animations
    REQUIRE(gif.frames.size() == 1);
    CHECK(gif.frames[0] == im.pixels);
}

TEST_CASE("multi-frame animation loops and keeps the delay") {
    std::vector<GrayImage> frames;
    for (int k = 0; k < 3; ++k) {
        auto im = image_of(4, 4, std::vector<std::uint8_t>(16, 0));
        im.at(k, k) = 200;
        frames.push_back(im);
    }
    const auto gif = decode_gif(encode_gif(frames, 12));
    CHECK(gif.has_loop_extension);
    REQUIRE(gif.frames.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(gif.frame_delays_cs[k] == 12);
        CHECK(gif.frames[k] == frames[k].pixels);
    }
}

TEST_CASE("uniform and gradient images round-trip") {
    auto flat = image_of(16, 16, std::vector<std::uint8_t>(256, 77));
    GrayImage grad = image_of(16, 16, {});
    grad.pixels.resize(256);
    for (int i = 0; i < 256; ++i) grad.pixels[i] = static_cast<std::uint8_t>(i);

    const auto gif = decode_gif(encode_gif({flat, grad}));
    CHECK(gif.frames[0] == flat.pixels);
    CHECK(gif.frames[1] == grad.pixels);
}

TEST_CASE("random noise frames force dictionary growth and reset") {
    // 256x128 of uniform noise does not compress; the code table fills
    // and the encoder must emit a mid-stream clear.
    std::mt19937 rng(53);
    std::uniform_int_distribution<int> level(0, 255);
    GrayImage im = image_of(256, 128, {});
    im.pixels.resize(256 * 128);
    for (auto& p : im.pixels) p = static_cast<std::uint8_t>(level(rng));

    const auto gif = decode_gif(encode_gif({im}));
    REQUIRE(gif.frames.size() == 1);
    CHECK(gif.frames[0] == im.pixels);
}

TEST_CASE("long constant runs exercise the KwKwK decode path") {
    GrayImage im = image_of(64, 64, std::vector<std::uint8_t>(4096, 9));
    const auto gif = decode_gif(encode_gif({im}));
    CHECK(gif.frames[0] == im.pixels);
}

TEST_CASE("frames of mismatched size are rejected") {
    const auto a = image_of(4, 4, std::vector<std::uint8_t>(16, 0));
    const auto b = image_of(5, 4, std::vector<std::uint8_t>(20, 0));
    CHECK_THROWS_AS(encode_gif({a, b}), std::invalid_argument);
}

TEST_CASE("identical frames produce identical bytes") {
    std::mt19937 rng(59);
    GrayImage im = image_of(32, 32, {});
    im.pixels.resize(1024);
    for (auto& p : im.pixels) p = static_cast<std::uint8_t>(rng() % 256);
    CHECK(encode_gif({im}) == encode_gif({im}));
}
