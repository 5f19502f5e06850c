#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decdm/error.hpp"

namespace decdm::wire {

// Little-endian framing shared by the checkpoint and latent formats:
//   magic[4] | u16 version | u32 header length | UTF-8 JSON header | float32 payload

class Writer {
public:
    void magic(std::string_view m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void f32(float v) { put(std::bit_cast<std::uint32_t>(v), 4); }
    void text(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

    std::vector<unsigned char> take() { return std::move(bytes_); }

private:
    void put(std::uint64_t v, int n) {
        for (int k = 0; k < n; ++k) bytes_.push_back(static_cast<unsigned char>(v >> (8 * k)));
    }
    std::vector<unsigned char> bytes_;
};

class Reader {
public:
    Reader(std::span<const unsigned char> bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

    void expect_magic(std::string_view m) {
        need(m.size(), "magic");
        if (std::string_view(reinterpret_cast<const char*>(bytes_.data() + pos_), m.size()) != m)
            throw ProtocolError(what_ + ": bad magic (expected \"" + std::string(m) + "\")");
        pos_ += m.size();
    }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2, "u16")); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4, "u32")); }
    float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(get(4, "float32"))); }
    std::string text(std::size_t n) {
        need(n, "header");
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    std::size_t position() const { return pos_; }

    /// Throws if the payload is not exactly `count` float32 values long.
    void expect_floats(std::size_t count) const {
        if (remaining() != 4 * count)
            throw ProtocolError(what_ + ": payload length mismatch (expected " + std::to_string(4 * count) +
                                " bytes, found " + std::to_string(remaining()) + ")");
    }

private:
    void need(std::size_t n, const char* field) const {
        if (remaining() < n) throw ProtocolError(what_ + ": truncated while reading " + field);
    }
    std::uint64_t get(int n, const char* field) {
        need(static_cast<std::size_t>(n), field);
        std::uint64_t v = 0;
        for (int k = 0; k < n; ++k) v |= static_cast<std::uint64_t>(bytes_[pos_ + k]) << (8 * k);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    std::span<const unsigned char> bytes_;
    std::string what_;
    std::size_t pos_ = 0;
};

}  // namespace decdm::wire
