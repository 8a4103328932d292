#pragma once

#include <stdexcept>
#include <string>

#include "bits.hpp"
#include "gf2.hpp"

namespace qecom {

// LFSR-based Toeplitz hash. The n x m hash matrix H has columns
// W^j * x3 for j = 0..m-1, where W is the companion matrix of the
// irreducible p(x) and x3 is the initial LFSR state. Evaluated in
// streaming form: for each message bit (most significant / j = 0 first)
// accumulate the current state if the bit is set, then advance the LFSR.
//
// Bit order: bit k of the n-bit state/seed strings is the component
// a_{n-k} (k = 0 is the top of the register). Advancing the register by W
// shifts every component up one slot and feeds the tap parity into the
// bottom.
class LfsrToeplitz {
  public:
    LfsrToeplitz(const Gf2Poly& p, const BitString& x3) {
        n_ = p.degree();
        if (n_ < 1) throw std::invalid_argument("lfsr_hash: polynomial degree must be >= 1");
        if (!is_irreducible(p)) throw std::invalid_argument("lfsr_hash: p(x) must be irreducible");
        if (x3.size() != static_cast<size_t>(n_)) throw std::invalid_argument("lfsr_hash: x3 length must equal deg p");
        if (all_zero(x3)) throw std::invalid_argument("lfsr_hash: x3 must not be all-zero");
        size_t words = (static_cast<size_t>(n_) + 63) / 64;
        state_.assign(words, 0);
        taps_.assign(words, 0);
        // state word-packing: bit i of the packed words is component a_{i+1},
        // i.e. string index k maps to packed bit n-1-k.
        for (size_t k = 0; k < x3.size(); ++k)
            if (x3[k]) set_bit(state_, static_cast<size_t>(n_) - 1 - k);
        // W's feedback row: new a_n = sum_i p_{i-1} * a_i, so tap bit j of the
        // packing is the polynomial coefficient p_j.
        for (int j = 0; j < n_; ++j)
            if (p.coeff(static_cast<size_t>(j))) set_bit(taps_, static_cast<size_t>(j));
    }

    int n() const { return n_; }

    // Hash an m-bit message; returns the n-bit digest H * msg.
    BitString hash(const BitString& msg) const {
        size_t words = state_.size();
        std::vector<uint64_t> acc(words, 0), st = state_;
        uint64_t top_mask = 1ull << ((n_ - 1) % 64);
        size_t top_word = static_cast<size_t>(n_ - 1) / 64;
        for (uint8_t bit : msg) {
            if (bit)
                for (size_t i = 0; i < words; ++i) acc[i] ^= st[i];
            // advance: a_i <- a_{i+1}, i.e. packed right shift by one, with
            // the tap parity fed back into the a_n slot.
            uint64_t fb = 0;
            for (size_t i = 0; i < words; ++i) fb ^= st[i] & taps_[i];
            fb = static_cast<uint64_t>(std::popcount(fb)) & 1;
            for (size_t i = 0; i + 1 < words; ++i) st[i] = (st[i] >> 1) | (st[i + 1] << 63);
            st[words - 1] >>= 1;
            if (fb) st[top_word] |= top_mask;
        }
        BitString out(static_cast<size_t>(n_));
        for (size_t k = 0; k < out.size(); ++k)
            out[k] = get_bit(acc, static_cast<size_t>(n_) - 1 - k);
        return out;
    }

  private:
    static void set_bit(std::vector<uint64_t>& w, size_t i) { w[i / 64] |= 1ull << (i % 64); }
    static bool get_bit(const std::vector<uint64_t>& w, size_t i) { return (w[i / 64] >> (i % 64)) & 1; }

    int n_;
    std::vector<uint64_t> state_;  // current register contents
    std::vector<uint64_t> taps_;   // feedback mask
};

inline BitString lfsr_hash(const Gf2Poly& p, const BitString& x3, const BitString& msg) {
    return LfsrToeplitz(p, x3).hash(msg);
}

// One signer's key material: x2 seeds the irreducible polynomial, x3 seeds
// the LFSR, x4 is the one-time pad over the digest. Strict one-time use.
struct SignatureKeys {
    BitString x2, x3, x4;

    SignatureKeys(BitString x2_, BitString x3_, BitString x4_)
        : x2(std::move(x2_)), x3(std::move(x3_)), x4(std::move(x4_)) {
        if (x2.size() != x3.size() || x2.size() != x4.size())
            throw std::invalid_argument("signature keys: x2, x3, x4 must be the same length");
        if (x2.size() < 2) throw std::invalid_argument("signature keys: n must be >= 2");
        if (all_zero(x2)) throw std::invalid_argument("signature keys: x2 must not be all-zero");
        if (all_zero(x3)) throw std::invalid_argument("signature keys: x3 must not be all-zero");
    }

    size_t n() const { return x2.size(); }

    bool consumed() const { return consumed_; }
    void mark_consumed() {
        if (consumed_) throw std::logic_error("signature keys: already consumed");
        consumed_ = true;
    }

  private:
    bool consumed_ = false;
};

struct SignatureTag {
    BitString digest;  // p-and-x3 hash of the message, before the pad
    BitString tag;     // digest XOR x4
};

// tag = lfsr_hash(gen_irreducible(x2), x3, msg) XOR x4. Consumes the keys.
inline SignatureTag sign(SignatureKeys& keys, const BitString& msg) {
    if (msg.empty()) throw std::invalid_argument("sign: empty message");
    keys.mark_consumed();
    Gf2Poly p = gen_irreducible(static_cast<int>(keys.n()), keys.x2);
    SignatureTag t;
    t.digest = lfsr_hash(p, keys.x3, msg);
    t.tag = bits_xor(t.digest, keys.x4);
    return t;
}

// Recomputes the tag from the disclosed keys; does not consume.
inline bool verify(const SignatureKeys& keys, const BitString& msg, const BitString& tag) {
    if (msg.empty()) throw std::invalid_argument("verify: empty message");
    if (tag.size() != keys.n()) return false;
    Gf2Poly p = gen_irreducible(static_cast<int>(keys.n()), keys.x2);
    BitString expect = bits_xor(lfsr_hash(p, keys.x3, msg), keys.x4);
    return expect == tag;
}

}  // namespace qecom
