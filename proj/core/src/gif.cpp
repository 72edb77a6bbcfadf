#include "batchsurf/gif.hpp"

#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "io_util.hpp"

namespace batchsurf {
namespace {

void push_u16(std::vector<std::uint8_t>& out, int v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

/// LZW for GIF: variable-width codes, LSB-first bit packing, emitted in
/// sub-blocks of at most 255 bytes.
class LzwEncoder {
public:
    explicit LzwEncoder(std::vector<std::uint8_t>& out) : out_(out) {}

    void encode(const std::vector<std::uint8_t>& pixels) {
        out_.push_back(kMinCodeSize);
        reset_dict();
        emit(kClearCode);

        std::int32_t prefix = -1;
        for (std::uint8_t pixel : pixels) {
            if (prefix < 0) {
                prefix = pixel;
                continue;
            }
            const std::uint32_t key =
                (static_cast<std::uint32_t>(prefix) << 8) | pixel;
            const auto it = dict_.find(key);
            if (it != dict_.end()) {
                prefix = it->second;
                continue;
            }
            emit(prefix);
            if (next_code_ < kMaxCodes) {
                dict_.emplace(key, next_code_);
                if (next_code_ == (1 << code_bits_) && code_bits_ < 12) ++code_bits_;
                ++next_code_;
            } else {
                emit(kClearCode);
                reset_dict();
            }
            prefix = pixel;
        }
        if (prefix >= 0) emit(prefix);
        emit(kEndCode);
        flush_bits();
        flush_block();
        out_.push_back(0);  // block terminator
    }

private:
    static constexpr int kMinCodeSize = 8;
    static constexpr int kClearCode = 256;
    static constexpr int kEndCode = 257;
    static constexpr int kMaxCodes = 4096;

    void reset_dict() {
        dict_.clear();
        next_code_ = kEndCode + 1;
        code_bits_ = kMinCodeSize + 1;
    }

    void emit(std::int32_t code) {
        bit_buffer_ |= static_cast<std::uint32_t>(code) << bit_count_;
        bit_count_ += code_bits_;
        while (bit_count_ >= 8) {
            block_.push_back(static_cast<std::uint8_t>(bit_buffer_ & 0xff));
            bit_buffer_ >>= 8;
            bit_count_ -= 8;
            if (block_.size() == 255) flush_block();
        }
    }

    void flush_bits() {
        if (bit_count_ > 0) {
            block_.push_back(static_cast<std::uint8_t>(bit_buffer_ & 0xff));
            bit_buffer_ = 0;
            bit_count_ = 0;
            if (block_.size() == 255) flush_block();
        }
    }

    void flush_block() {
        if (block_.empty()) return;
        out_.push_back(static_cast<std::uint8_t>(block_.size()));
        out_.insert(out_.end(), block_.begin(), block_.end());
        block_.clear();
    }

    std::vector<std::uint8_t>& out_;
    std::vector<std::uint8_t> block_;
    std::unordered_map<std::uint32_t, std::int32_t> dict_;
    std::int32_t next_code_ = 0;
    int code_bits_ = 0;
    std::uint32_t bit_buffer_ = 0;
    int bit_count_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_gif(const std::vector<GrayImage>& frames, int delay_cs) {
    if (frames.empty()) throw std::invalid_argument("gif: no frames");
    const int w = frames.front().width;
    const int h = frames.front().height;
    for (const auto& f : frames)
        if (f.width != w || f.height != h)
            throw std::invalid_argument("gif: frames differ in size");

    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'G', 'I', 'F', '8', '9', 'a'});
    push_u16(out, w);
    push_u16(out, h);
    out.push_back(0xF7);  // global color table, 256 entries, 8-bit color
    out.push_back(0);     // background color index
    out.push_back(0);     // pixel aspect ratio
    for (int i = 0; i < 256; ++i) {
        out.push_back(static_cast<std::uint8_t>(i));
        out.push_back(static_cast<std::uint8_t>(i));
        out.push_back(static_cast<std::uint8_t>(i));
    }

    if (frames.size() > 1) {
        // Netscape looping extension, loop forever.
        out.insert(out.end(), {0x21, 0xFF, 0x0B});
        const char* app = "NETSCAPE2.0";
        out.insert(out.end(), app, app + 11);
        out.insert(out.end(), {0x03, 0x01, 0x00, 0x00, 0x00});
    }

    for (const auto& frame : frames) {
        out.insert(out.end(), {0x21, 0xF9, 0x04, 0x00});  // graphic control
        push_u16(out, delay_cs);
        out.push_back(0);  // transparent color index (unused)
        out.push_back(0);  // terminator

        out.push_back(0x2C);  // image descriptor
        push_u16(out, 0);
        push_u16(out, 0);
        push_u16(out, w);
        push_u16(out, h);
        out.push_back(0);  // no local color table, no interlace

        LzwEncoder(out).encode(frame.pixels);
    }
    out.push_back(0x3B);  // trailer
    return out;
}

void save_gif(const std::vector<GrayImage>& frames, const std::filesystem::path& path,
              int delay_cs) {
    detail::write_file(path, encode_gif(frames, delay_cs));
}

}  // namespace batchsurf
