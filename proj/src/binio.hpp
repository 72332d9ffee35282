#pragma once

// Little-endian packed stream helpers and CRC32 for the dataset container.

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "bslab/errors.hpp"

namespace bslab::binio {

inline std::uint32_t crc32(const unsigned char* data, std::size_t len) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int j = 0; j < 8; ++j) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

class Writer {
public:
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    void u8(std::uint8_t v) { raw(&v, 1); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void f64(double v) { raw(&v, 8); }
    void finish_with_crc() { u32(crc32(buf_.data(), buf_.size())); }
    const std::vector<unsigned char>& bytes() const { return buf_; }

private:
    std::vector<unsigned char> buf_;
};

class Reader {
public:
    explicit Reader(std::vector<unsigned char> bytes) : buf_(std::move(bytes)) {}

    void raw(void* p, std::size_t n) {
        if (pos_ + n > buf_.size())
            throw DatasetIoError(DatasetIoError::Kind::truncated, "dataset file truncated");
        std::memcpy(p, buf_.data() + pos_, n);
        pos_ += n;
    }
    std::uint8_t u8() { std::uint8_t v; raw(&v, 1); return v; }
    std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
    double f64() { double v; raw(&v, 8); return v; }

    void verify_crc() {
        if (buf_.size() < 4)
            throw DatasetIoError(DatasetIoError::Kind::truncated, "dataset file truncated");
        std::uint32_t stored;
        std::memcpy(&stored, buf_.data() + buf_.size() - 4, 4);
        if (crc32(buf_.data(), buf_.size() - 4) != stored)
            throw DatasetIoError(DatasetIoError::Kind::corrupt_crc, "dataset CRC mismatch");
    }
    std::size_t payload_end() const {
        if (buf_.size() < 4)
            throw DatasetIoError(DatasetIoError::Kind::truncated, "dataset file truncated");
        return buf_.size() - 4;
    }
    std::size_t pos() const { return pos_; }

private:
    std::vector<unsigned char> buf_;
    std::size_t pos_ = 0;
};

std::vector<unsigned char> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<unsigned char>& bytes);

}  // namespace bslab::binio
