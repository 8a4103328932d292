// Independent reference implementations used only by tests: naive
// coefficient-vector GF(2) arithmetic, explicit Toeplitz matrix hashing, and
// small statistics helpers. Deliberately slow and obvious.
#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "qecom/bits.hpp"
#include "qecom/gf2.hpp"
#include "qecom/rng.hpp"

namespace oracle {

using qecom::BitString;

inline std::string data_dir() {
    const char* d = std::getenv("QECOM_DATA_DIR");
    return d ? std::string(d) : std::string("data");
}

inline std::string data_path(const std::string& name) { return data_dir() + "/" + name; }

// polynomials as coefficient vectors, index i = coefficient of x^i
using Coeffs = std::vector<int>;

inline Coeffs trim(Coeffs a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

inline Coeffs from_poly(const qecom::Gf2Poly& p) {
    Coeffs c;
    if (p.degree() < 0) return c;
    c.resize(static_cast<size_t>(p.degree()) + 1, 0);
    for (size_t i = 0; i < c.size(); ++i) c[i] = p.coeff(i) ? 1 : 0;
    return c;
}

inline qecom::Gf2Poly to_poly(const Coeffs& c) {
    qecom::Gf2Poly p;
    for (size_t i = 0; i < c.size(); ++i)
        if (c[i]) p.set_coeff(i, true);
    return p;
}

inline Coeffs mul(const Coeffs& a, const Coeffs& b) {
    if (a.empty() || b.empty()) return {};
    Coeffs r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] ^= a[i] & b[j];
    return trim(r);
}

inline Coeffs mod(Coeffs a, const Coeffs& m) {
    a = trim(a);
    Coeffs mm = trim(m);
    while (a.size() >= mm.size() && !mm.empty()) {
        size_t shift = a.size() - mm.size();
        for (size_t i = 0; i < mm.size(); ++i) a[i + shift] ^= mm[i];
        a = trim(a);
    }
    return a;
}

// Toeplitz hash by explicit matrix construction: column j of H is W^j x3,
// with W advancing the register a_i <- a_{i+1}, a_n <- sum p_{i-1} a_i.
// State vectors are indexed a[0] = a_1 .. a[n-1] = a_n; the string form of a
// state lists a_n first.
inline BitString naive_lfsr_hash(const qecom::Gf2Poly& p, const BitString& x3, const BitString& msg) {
    int n = p.degree();
    std::vector<int> a(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) a[static_cast<size_t>(n - 1 - k)] = x3[static_cast<size_t>(k)];
    std::vector<std::vector<int>> columns;
    columns.reserve(msg.size());
    for (size_t j = 0; j < msg.size(); ++j) {
        columns.push_back(a);
        std::vector<int> next(static_cast<size_t>(n));
        for (int i = 0; i + 1 < n; ++i) next[static_cast<size_t>(i)] = a[static_cast<size_t>(i) + 1];
        int fb = 0;
        for (int i = 1; i <= n; ++i)
            if (p.coeff(static_cast<size_t>(i - 1))) fb ^= a[static_cast<size_t>(i - 1)];
        next[static_cast<size_t>(n - 1)] = fb;
        a = std::move(next);
    }
    std::vector<int> acc(static_cast<size_t>(n), 0);
    for (size_t j = 0; j < msg.size(); ++j)
        if (msg[j])
            for (int i = 0; i < n; ++i) acc[static_cast<size_t>(i)] ^= columns[j][static_cast<size_t>(i)];
    BitString out(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) out[static_cast<size_t>(k)] = static_cast<uint8_t>(acc[static_cast<size_t>(n - 1 - k)]);
    return out;
}

inline BitString random_bits(qecom::CounterRng& rng, size_t len, bool nonzero = false) {
    BitString b(len);
    do {
        for (auto& x : b) x = static_cast<uint8_t>(rng.next_u64() & 1);
    } while (nonzero && qecom::all_zero(b));
    return b;
}

// 3-sigma binomial band around expected rate p over n trials
inline bool within_binomial_3sigma(uint64_t hits, uint64_t n, double p) {
    double mean = static_cast<double>(n) * p;
    double sigma = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
    return std::abs(static_cast<double>(hits) - mean) <= 3.0 * sigma + 1.0;
}

}  // namespace oracle
