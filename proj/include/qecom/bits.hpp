#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qecom {

// One bit per byte, values 0/1. Index 0 is the leftmost bit of the string
// notation used throughout (MSB-first).
using BitString = std::vector<uint8_t>;

inline BitString bits_from_string(const std::string& s) {
    BitString out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '0') out.push_back(0);
        else if (c == '1') out.push_back(1);
        else if (c == ' ' || c == '_') continue;
        else throw std::invalid_argument("bits_from_string: bad character");
    }
    return out;
}

inline std::string bits_to_string(const BitString& b) {
    std::string s;
    s.reserve(b.size());
    for (uint8_t v : b) s.push_back(v ? '1' : '0');
    return s;
}

inline int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("bad hex digit");
}

// Hex of the MSB-first bit string, left-padded with zero bits to a nibble
// boundary. n_bits is required to undo the padding.
inline std::string bits_to_hex(const BitString& b) {
    static const char* digits = "0123456789abcdef";
    size_t pad = (4 - b.size() % 4) % 4;
    std::string out;
    out.reserve((b.size() + pad) / 4);
    int acc = 0, have = static_cast<int>(pad);
    for (uint8_t v : b) {
        acc = (acc << 1) | v;
        if (++have == 4) {
            out.push_back(digits[acc]);
            acc = 0;
            have = 0;
        }
    }
    return out;
}

inline BitString bits_from_hex(const std::string& hex, size_t n_bits) {
    if (hex.size() * 4 < n_bits) throw std::invalid_argument("hex too short for bit length");
    BitString all;
    all.reserve(hex.size() * 4);
    for (char c : hex) {
        int v = hex_digit(c);
        for (int k = 3; k >= 0; --k) all.push_back((v >> k) & 1);
    }
    size_t drop = all.size() - n_bits;
    for (size_t i = 0; i < drop; ++i)
        if (all[i]) throw std::invalid_argument("nonzero padding bits in hex");
    return BitString(all.begin() + drop, all.end());
}

// MSB-first per byte.
inline BitString bits_from_bytes(const std::vector<uint8_t>& bytes) {
    BitString out;
    out.reserve(bytes.size() * 8);
    for (uint8_t byte : bytes)
        for (int k = 7; k >= 0; --k) out.push_back((byte >> k) & 1);
    return out;
}

inline bool all_zero(const BitString& b) {
    for (uint8_t v : b)
        if (v) return false;
    return true;
}

inline BitString bits_xor(const BitString& a, const BitString& b) {
    if (a.size() != b.size()) throw std::invalid_argument("bits_xor: length mismatch");
    BitString out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

// FNV-1a over raw bytes; used for fixture manifests and key checksums.
inline uint64_t fnv1a64(const void* data, size_t len) {
    const uint8_t* p = static_cast<const uint8_t*>(data);
    uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace qecom
