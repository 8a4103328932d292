#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "bits.hpp"

namespace qecom {

struct generation_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Polynomial over GF(2). Packed words, bit i of word i/64 is the coefficient
// of x^i. Always normalized (no trailing zero words); the zero polynomial has
// degree -1.
class Gf2Poly {
  public:
    Gf2Poly() = default;

    static Gf2Poly zero() { return Gf2Poly(); }
    static Gf2Poly one() { return from_u64(1); }
    static Gf2Poly x() { return from_u64(2); }

    static Gf2Poly from_u64(uint64_t v) {
        Gf2Poly p;
        if (v) p.w_.push_back(v);
        return p;
    }

    // Coefficients most-significant term first: bit i of a length-(d+1)
    // string is the coefficient of x^(d-i).
    static Gf2Poly from_coeff_bits(const BitString& bits) {
        Gf2Poly p;
        for (size_t i = 0; i < bits.size(); ++i)
            if (bits[i]) p.set_coeff(bits.size() - 1 - i);
        return p;
    }

    static Gf2Poly from_hex(const std::string& hex) {
        Gf2Poly p;
        size_t nbits = hex.size() * 4;
        for (size_t i = 0; i < hex.size(); ++i) {
            int v = hex_digit(hex[i]);
            for (int k = 0; k < 4; ++k)
                if (v & (1 << k)) p.set_coeff(nbits - 4 * i - 4 + k);
        }
        return p;
    }

    int degree() const {
        if (w_.empty()) return -1;
        return static_cast<int>(64 * (w_.size() - 1) + 63 - std::countl_zero(w_.back()));
    }

    bool is_zero() const { return w_.empty(); }

    bool coeff(size_t i) const {
        size_t word = i / 64;
        if (word >= w_.size()) return false;
        return (w_[word] >> (i % 64)) & 1;
    }

    void set_coeff(size_t i, bool v = true) {
        size_t word = i / 64;
        if (word >= w_.size()) {
            if (!v) return;
            w_.resize(word + 1, 0);
        }
        if (v) w_[word] |= 1ull << (i % 64);
        else w_[word] &= ~(1ull << (i % 64));
        normalize();
    }

    size_t popcount() const {
        size_t c = 0;
        for (uint64_t w : w_) c += static_cast<size_t>(std::popcount(w));
        return c;
    }

    std::vector<size_t> term_exponents() const {
        std::vector<size_t> e;
        for (size_t j = 0; j < w_.size(); ++j) {
            uint64_t w = w_[j];
            while (w) {
                int b = std::countr_zero(w);
                e.push_back(64 * j + static_cast<size_t>(b));
                w &= w - 1;
            }
        }
        return e;
    }

    BitString coeff_bits() const {
        int d = degree();
        if (d < 0) return BitString{0};
        BitString out(static_cast<size_t>(d) + 1);
        for (int i = 0; i <= d; ++i) out[static_cast<size_t>(d - i)] = coeff(static_cast<size_t>(i)) ? 1 : 0;
        return out;
    }

    std::string to_hex() const { return is_zero() ? "0" : bits_to_hex(coeff_bits()); }

    friend Gf2Poly operator^(const Gf2Poly& a, const Gf2Poly& b) {
        Gf2Poly r;
        r.w_.resize(std::max(a.w_.size(), b.w_.size()), 0);
        for (size_t i = 0; i < a.w_.size(); ++i) r.w_[i] ^= a.w_[i];
        for (size_t i = 0; i < b.w_.size(); ++i) r.w_[i] ^= b.w_[i];
        r.normalize();
        return r;
    }

    friend bool operator==(const Gf2Poly& a, const Gf2Poly& b) { return a.w_ == b.w_; }

    const std::vector<uint64_t>& words() const { return w_; }

    static Gf2Poly from_words(std::vector<uint64_t> w) {
        Gf2Poly p;
        p.w_ = std::move(w);
        p.normalize();
        return p;
    }

  private:
    void normalize() {
        while (!w_.empty() && w_.back() == 0) w_.pop_back();
    }

    std::vector<uint64_t> w_;
};

namespace detail {

// dst ^= src << shift_bits
inline void xor_shifted(std::vector<uint64_t>& dst, const std::vector<uint64_t>& src, size_t shift_bits) {
    size_t ws = shift_bits / 64, bs = shift_bits % 64;
    size_t need = src.size() + ws + 1;
    if (dst.size() < need) dst.resize(need, 0);
    if (bs == 0) {
        for (size_t i = 0; i < src.size(); ++i) dst[i + ws] ^= src[i];
    } else {
        uint64_t carry = 0;
        for (size_t i = 0; i < src.size(); ++i) {
            dst[i + ws] ^= (src[i] << bs) | carry;
            carry = src[i] >> (64 - bs);
        }
        dst[src.size() + ws] ^= carry;
    }
}

inline int words_degree(const std::vector<uint64_t>& w) {
    for (size_t j = w.size(); j-- > 0;)
        if (w[j]) return static_cast<int>(64 * j + 63 - std::countl_zero(w[j]));
    return -1;
}

// Carry-less multiply with a 4-bit window.
inline std::vector<uint64_t> raw_mul(const Gf2Poly& a, const Gf2Poly& b) {
    std::vector<uint64_t> out;
    if (a.is_zero() || b.is_zero()) return out;
    const auto& aw = a.words();
    const auto& bw = b.words();
    std::array<std::vector<uint64_t>, 16> tab;
    tab[0] = {};
    tab[1] = aw;
    for (int v = 2; v < 16; ++v) {
        int low = v & -v;  // lowest set bit
        int rest = v ^ low;
        tab[v] = tab[rest].empty() ? std::vector<uint64_t>() : tab[rest];
        int sh = std::countr_zero(static_cast<unsigned>(low));
        xor_shifted(tab[v], aw, static_cast<size_t>(sh));
    }
    out.assign(aw.size() + bw.size() + 1, 0);
    for (size_t j = 0; j < bw.size(); ++j) {
        uint64_t w = bw[j];
        for (int k = 0; k < 64; k += 4) {
            int nib = static_cast<int>((w >> k) & 0xf);
            if (nib) xor_shifted(out, tab[nib], 64 * j + static_cast<size_t>(k));
        }
    }
    return out;
}

}  // namespace detail

inline Gf2Poly poly_mul(const Gf2Poly& a, const Gf2Poly& b) {
    return Gf2Poly::from_words(detail::raw_mul(a, b));
}

// Reduction helper bound to one modulus. Picks a strategy by modulus shape:
// term-list reduction for sparse moduli, a 256-entry remainder table for
// large dense ones, plain shift-and-xor otherwise.
class Gf2ModContext {
  public:
    explicit Gf2ModContext(Gf2Poly modulus) : m_(std::move(modulus)) {
        n_ = m_.degree();
        if (n_ < 1) throw std::invalid_argument("modulus must have degree >= 1");
        if (m_.popcount() <= 8) {
            mode_ = Mode::kSparse;
            low_terms_ = m_.term_exponents();
            low_terms_.pop_back();  // drop the leading x^n term
        } else if (n_ >= 256) {
            mode_ = Mode::kTable;
            build_table();
        } else {
            mode_ = Mode::kPlain;
        }
    }

    const Gf2Poly& modulus() const { return m_; }
    int degree() const { return n_; }

    Gf2Poly reduce(std::vector<uint64_t> prod) const {
        switch (mode_) {
            case Mode::kSparse: reduce_sparse(prod); break;
            case Mode::kTable: reduce_table(prod); break;
            case Mode::kPlain: reduce_plain(prod); break;
        }
        prod.resize(std::min(prod.size(), static_cast<size_t>(n_ + 63) / 64));
        return Gf2Poly::from_words(std::move(prod));
    }

    Gf2Poly mul(const Gf2Poly& a, const Gf2Poly& b) const { return reduce(detail::raw_mul(a, b)); }

    Gf2Poly square(const Gf2Poly& a) const {
        const auto& aw = a.words();
        std::vector<uint64_t> out(2 * aw.size() + 1, 0);
        for (size_t j = 0; j < aw.size(); ++j) {
            uint64_t w = aw[j];
            uint64_t lo = spread32(static_cast<uint32_t>(w));
            uint64_t hi = spread32(static_cast<uint32_t>(w >> 32));
            out[2 * j] = lo;
            out[2 * j + 1] = hi;
        }
        return reduce(std::move(out));
    }

  private:
    enum class Mode { kSparse, kTable, kPlain };

    static uint64_t spread32(uint32_t v) {
        uint64_t x = v;
        x = (x | (x << 16)) & 0x0000ffff0000ffffull;
        x = (x | (x << 8)) & 0x00ff00ff00ff00ffull;
        x = (x | (x << 4)) & 0x0f0f0f0f0f0f0f0full;
        x = (x | (x << 2)) & 0x3333333333333333ull;
        x = (x | (x << 1)) & 0x5555555555555555ull;
        return x;
    }

    void build_table() {
        // tab_[v] = (v(x) << n) mod m, degree < n.
        size_t words = static_cast<size_t>(n_ + 63) / 64;
        std::vector<std::vector<uint64_t>> pow(8);
        // pow[j] = (x^(n+j)) mod m
        std::vector<uint64_t> cur(words + 1, 0);
        {   // x^n mod m = m - x^n (lower terms of m)
            for (size_t i = 0; i < m_.words().size(); ++i) cur[i] = m_.words()[i];
            cur[static_cast<size_t>(n_) / 64] &= ~(1ull << (n_ % 64));  // clear leading term
            for (size_t i = static_cast<size_t>(n_) / 64 + 1; i < cur.size(); ++i) cur[i] = 0;
        }
        for (int j = 0; j < 8; ++j) {
            pow[j] = cur;
            // multiply by x
            uint64_t carry = 0;
            for (size_t i = 0; i < cur.size(); ++i) {
                uint64_t nc = cur[i] >> 63;
                cur[i] = (cur[i] << 1) | carry;
                carry = nc;
            }
            if (detail::words_degree(cur) == n_) {
                for (size_t i = 0; i < m_.words().size(); ++i) cur[i] ^= m_.words()[i];
            }
        }
        tab_.assign(256, {});
        tab_[0].assign(words, 0);
        for (int v = 1; v < 256; ++v) {
            int b = std::countr_zero(static_cast<unsigned>(v));
            tab_[v] = tab_[v & (v - 1)];
            tab_[v].resize(std::max(tab_[v].size(), pow[b].size()), 0);
            for (size_t i = 0; i < pow[b].size(); ++i) tab_[v][i] ^= pow[b][i];
        }
    }

    void reduce_sparse(std::vector<uint64_t>& p) const {
        size_t nwords = static_cast<size_t>(n_) / 64;  // word containing bit n
        for (size_t j = p.size(); j-- > nwords + 1;) {
            uint64_t v = p[j];
            if (!v) continue;
            p[j] = 0;
            size_t base = 64 * j - static_cast<size_t>(n_);
            std::vector<uint64_t> one_word{v};
            for (size_t e : low_terms_) detail::xor_shifted(p, one_word, base + e);
        }
        // boundary word: bits >= n handled one at a time
        while (true) {
            int d = detail::words_degree(p);
            if (d < n_) break;
            p[static_cast<size_t>(d) / 64] ^= 1ull << (d % 64);
            size_t base = static_cast<size_t>(d - n_);
            static const std::vector<uint64_t> kOne{1};
            for (size_t e : low_terms_) detail::xor_shifted(p, kOne, base + e);
        }
    }

    void reduce_table(std::vector<uint64_t>& p) const {
        int top = detail::words_degree(p);
        if (top < n_) return;
        long t = (top - n_) / 8;
        for (; t >= 0; --t) {
            size_t s = static_cast<size_t>(n_) + 8 * static_cast<size_t>(t);
            // extract byte at bits [s, s+7]
            size_t wj = s / 64, bj = s % 64;
            uint64_t v = p[wj] >> bj;
            if (bj > 56 && wj + 1 < p.size()) v |= p[wj + 1] << (64 - bj);
            v &= 0xff;
            if (!v) continue;
            // clear those bits
            p[wj] &= ~(0xffull << bj);
            if (bj > 56 && wj + 1 < p.size()) p[wj + 1] &= ~(0xffull >> (64 - bj));
            detail::xor_shifted(p, tab_[static_cast<size_t>(v)], s - static_cast<size_t>(n_));
        }
    }

    void reduce_plain(std::vector<uint64_t>& p) const {
        const auto& mw = m_.words();
        while (true) {
            int d = detail::words_degree(p);
            if (d < n_) break;
            detail::xor_shifted(p, mw, static_cast<size_t>(d - n_));
        }
    }

    Gf2Poly m_;
    int n_ = 0;
    Mode mode_ = Mode::kPlain;
    std::vector<size_t> low_terms_;
    std::vector<std::vector<uint64_t>> tab_;
};

// (a*b) mod m
inline Gf2Poly poly_mul_mod(const Gf2Poly& a, const Gf2Poly& b, const Gf2Poly& m) {
    if (m.is_zero()) throw std::invalid_argument("poly_mul_mod: zero modulus");
    if (m.degree() < 1) throw std::invalid_argument("poly_mul_mod: modulus degree must be >= 1");
    return Gf2ModContext(m).mul(a, b);
}

inline Gf2Poly poly_mod(const Gf2Poly& a, const Gf2Poly& m) {
    if (m.is_zero()) throw std::invalid_argument("poly_mod: zero modulus");
    if (m.degree() == 0) return Gf2Poly::zero();
    if (a.degree() < m.degree()) return a;
    return Gf2ModContext(m).reduce(a.words());
}

inline Gf2Poly poly_gcd(Gf2Poly a, Gf2Poly b) {
    while (!b.is_zero()) {
        Gf2Poly r = poly_mod(a, b);
        a = b;
        b = r;
    }
    return a;
}

namespace detail {

inline std::vector<int> prime_factors(int n) {
    std::vector<int> out;
    for (int d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// Single-word helpers for the degree <= 31 hot path: squares of degree < 31
// polynomials and left shifts of the modulus all stay inside one uint64_t,
// so the repeated-squaring chain runs without touching the heap.
inline uint64_t square_mod_u64(uint64_t a, uint64_t mod, int n) {
    uint64_t s = 0;
    while (a) {
        int i = std::countr_zero(a);
        a &= a - 1;
        s |= 1ull << (2 * i);
    }
    while (s >> n) {
        int d = 63 - std::countl_zero(s);
        s ^= mod << (d - n);
    }
    return s;
}

inline uint64_t mul_mod_u64(uint64_t a, uint64_t b, uint64_t mod, int n) {
    uint64_t r = 0;
    while (b) {
        int i = std::countr_zero(b);
        b &= b - 1;
        r ^= a << i;
    }
    while (r >> n) {
        int d = 63 - std::countl_zero(r);
        r ^= mod << (d - n);
    }
    return r;
}

inline uint64_t gcd_u64(uint64_t a, uint64_t b) {
    while (b) {
        int db = 63 - std::countl_zero(b);
        while (a && 63 - std::countl_zero(a) >= db) a ^= b << (63 - std::countl_zero(a) - db);
        std::swap(a, b);
    }
    return a;
}

}  // namespace detail

// Rabin's criterion: p of degree n is irreducible iff x^(2^n) = x (mod p) and
// gcd(x^(2^(n/d)) - x, p) = 1 for every prime factor d of n. Powers of two
// are taken by repeated squaring mod p.
inline bool is_irreducible(const Gf2Poly& p) {
    int n = p.degree();
    if (n < 1) throw std::invalid_argument("is_irreducible: degree must be >= 1");
    if (n == 1) return true;
    if (n <= 31) {
        uint64_t f = p.words()[0];
        if (!(f & 1)) return false;                 // divisible by x
        if (std::popcount(f) % 2 == 0) return false;  // p(1) = 0, divisible by x+1
        uint64_t cur = 2;  // x
        for (int i = 0; i < n; ++i) cur = detail::square_mod_u64(cur, f, n);
        if (cur != 2) return false;
        for (int d : detail::prime_factors(n)) {
            uint64_t c = 2;
            for (int i = 0; i < n / d; ++i) c = detail::square_mod_u64(c, f, n);
            if (detail::gcd_u64(c ^ 2, f) != 1) return false;
        }
        return true;
    }
    Gf2ModContext ctx(p);
    Gf2Poly x = Gf2Poly::x();
    Gf2Poly cur = x;
    for (int i = 0; i < n; ++i) cur = ctx.square(cur);
    if (!(cur == poly_mod(x, p))) return false;
    for (int d : detail::prime_factors(n)) {
        Gf2Poly c = x;
        for (int i = 0; i < n / d; ++i) c = ctx.square(c);
        Gf2Poly g = poly_gcd(c ^ x, p);
        if (g.degree() != 0) return false;
    }
    return true;
}

// Minimal-length LFSR connection polynomial of a GF(2) sequence. The returned
// polynomial h has h_j = c_j where s_i = sum_{j=1..L} c_j s_{i-j}; for a
// sequence of 2n field-trace values this is the minimal polynomial of the
// generating element. The all-zero sequence yields the constant 1.
inline Gf2Poly berlekamp_massey(const BitString& seq) {
    size_t n = seq.size();
    std::vector<uint8_t> C(n + 1, 0), B(n + 1, 0), T;
    C[0] = B[0] = 1;
    size_t L = 0, m = 1;
    for (size_t i = 0; i < n; ++i) {
        uint8_t d = seq[i];
        for (size_t j = 1; j <= L; ++j) d ^= C[j] & seq[i - j];
        if (d == 0) {
            ++m;
        } else if (2 * L <= i) {
            T = C;
            for (size_t j = 0; j + m <= n; ++j) C[j + m] ^= B[j];
            L = i + 1 - L;
            B = T;
            m = 1;
        } else {
            for (size_t j = 0; j + m <= n; ++j) C[j + m] ^= B[j];
            ++m;
        }
    }
    Gf2Poly h;
    for (size_t j = 0; j <= L; ++j)
        if (C[j]) h.set_coeff(j);
    return h;
}

// Preset base irreducible f(x) per degree. Degrees 2 and 8 are compiled in;
// other degrees are found once by a fixed deterministic scan (trinomials with
// ascending middle exponent, then pentanomials in ascending lexicographic
// order), verified with is_irreducible and cached.
inline const Gf2Poly& base_irreducible(int n) {
    auto sparse = [](int n, std::initializer_list<int> mids) {
        Gf2Poly p;
        p.set_coeff(static_cast<size_t>(n));
        p.set_coeff(0);
        for (int k : mids) p.set_coeff(static_cast<size_t>(k));
        return p;
    };
    // Entries beyond degrees 2 and 8 are memoized first hits of the scan
    // below, seeded for the key sizes the protocol actually uses.
    static std::map<int, Gf2Poly> cache = {
        {2, Gf2Poly::from_u64(0b111)},          // x^2+x+1
        {8, Gf2Poly::from_u64(0b111000011)},    // x^8+x^7+x^6+x+1
        {781, sparse(781, {2, 16, 17})},
        {1279, sparse(1279, {216})},
        {1971, sparse(1971, {4, 5, 20})},
        {6148, sparse(6148, {16, 18, 25})},
    };
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    if (n < 2) throw std::invalid_argument("base_irreducible: n must be >= 2");
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    auto candidate = [n](std::initializer_list<int> mids) {
        Gf2Poly p;
        p.set_coeff(static_cast<size_t>(n));
        p.set_coeff(0);
        for (int k : mids) p.set_coeff(static_cast<size_t>(k));
        return p;
    };
    for (int k = 1; k < n; ++k) {
        Gf2Poly p = candidate({k});
        if (is_irreducible(p)) return cache.emplace(n, std::move(p)).first->second;
    }
    for (int k3 = 3; k3 < n; ++k3)
        for (int k2 = 2; k2 < k3; ++k2)
            for (int k1 = 1; k1 < k2; ++k1) {
                Gf2Poly p = candidate({k1, k2, k3});
                if (is_irreducible(p)) return cache.emplace(n, std::move(p)).first->second;
            }
    throw generation_failure("base_irreducible: no sparse irreducible found for degree " + std::to_string(n));
}

// Random irreducible polynomial of degree n from an n-bit seed: the seed
// picks an element g of GF(2^n) (coefficients degree-descending), the
// constant terms of g^0..g^(2n-1) mod f feed Berlekamp-Massey, and the
// resulting minimal polynomial is the output. A short result triggers the
// deterministic retry g <- (x*g + 1) mod f, at most 64 times.
inline Gf2Poly gen_irreducible(int n, const BitString& seed) {
    if (n < 2) throw std::invalid_argument("gen_irreducible: n must be >= 2");
    if (seed.size() != static_cast<size_t>(n)) throw std::invalid_argument("gen_irreducible: seed length must equal n");
    if (all_zero(seed)) throw std::invalid_argument("gen_irreducible: seed must not be all-zero");
    const Gf2Poly& f = base_irreducible(n);
    if (n <= 31) {
        // single-word variant of the loop below; the signing hot path runs
        // this once per message at key sizes of 16 bits and under
        uint64_t fw = f.words()[0];
        uint64_t gw = 0;
        for (size_t i = 0; i < seed.size(); ++i)
            if (seed[i]) gw |= 1ull << (seed.size() - 1 - i);
        for (int attempt = 0; attempt < 64; ++attempt) {
            BitString seq(2 * static_cast<size_t>(n));
            uint64_t cur = 1;
            for (size_t i = 0; i < seq.size(); ++i) {
                seq[i] = static_cast<uint8_t>(cur & 1);
                cur = detail::mul_mod_u64(cur, gw, fw, n);
            }
            Gf2Poly h = berlekamp_massey(seq);
            if (h.degree() == n && is_irreducible(h)) return h;
            gw = detail::mul_mod_u64(gw, 2, fw, n) ^ 1;
            if (gw == 0) gw = 2;
        }
        throw generation_failure("gen_irreducible: retry budget exhausted");
    }
    Gf2ModContext ctx(f);
    Gf2Poly g = Gf2Poly::from_coeff_bits(seed);
    const Gf2Poly x = Gf2Poly::x();
    const Gf2Poly one = Gf2Poly::one();
    for (int attempt = 0; attempt < 64; ++attempt) {
        BitString seq(2 * static_cast<size_t>(n));
        Gf2Poly cur = one;
        for (size_t i = 0; i < seq.size(); ++i) {
            seq[i] = cur.coeff(0) ? 1 : 0;
            cur = ctx.mul(cur, g);
        }
        Gf2Poly h = berlekamp_massey(seq);
        if (h.degree() == n && is_irreducible(h)) return h;
        g = ctx.mul(g, x) ^ one;
        if (g.is_zero()) g = x;
    }
    throw generation_failure("gen_irreducible: retry budget exhausted");
}

}  // namespace qecom
