#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qecom/otuh.hpp"
#include "qecom/rng.hpp"

using namespace qecom;

TEST_CASE("streaming hash equals the explicit Toeplitz-matrix oracle") {
    CounterRng rng(21);
    for (int t = 0; t < 400; ++t) {
        int n = 2 + static_cast<int>(rng.next_below(15));  // 2..16
        size_t m = 1 + rng.next_below(64);
        BitString x3 = oracle::random_bits(rng, static_cast<size_t>(n), true);
        BitString x2 = oracle::random_bits(rng, static_cast<size_t>(n), true);
        Gf2Poly p = gen_irreducible(n, x2);
        BitString msg = oracle::random_bits(rng, m);
        CHECK(lfsr_hash(p, x3, msg) == oracle::naive_lfsr_hash(p, x3, msg));
    }
}

TEST_CASE("hash is linear in the message") {
    CounterRng rng(22);
    Gf2Poly p = gen_irreducible(12, oracle::random_bits(rng, 12, true));
    BitString x3 = oracle::random_bits(rng, 12, true);
    for (int t = 0; t < 50; ++t) {
        BitString m1 = oracle::random_bits(rng, 80), m2 = oracle::random_bits(rng, 80);
        CHECK(lfsr_hash(p, x3, bits_xor(m1, m2)) == bits_xor(lfsr_hash(p, x3, m1), lfsr_hash(p, x3, m2)));
    }
}

TEST_CASE("sign/verify round trip and tamper rejection") {
    CounterRng rng(23);
    for (int t = 0; t < 50; ++t) {
        size_t n = 8 + rng.next_below(9);
        SignatureKeys keys(oracle::random_bits(rng, n, true), oracle::random_bits(rng, n, true),
                           oracle::random_bits(rng, n));
        SignatureKeys copy = keys;
        BitString msg = oracle::random_bits(rng, 64);
        SignatureTag tag = sign(keys, msg);
        CHECK(tag.tag == bits_xor(tag.digest, copy.x4));
        CHECK(verify(copy, msg, tag.tag));
        BitString tampered = msg;
        tampered[rng.next_below(64)] ^= 1;
        // a single-bit flip is always caught: the flipped column of the hash
        // matrix is W^j x3, never zero for invertible W and nonzero x3
        CHECK_FALSE(verify(copy, tampered, tag.tag));
        BitString wrong_tag = tag.tag;
        wrong_tag[rng.next_below(n)] ^= 1;
        CHECK_FALSE(verify(copy, msg, wrong_tag));
    }
}

TEST_CASE("keys are strictly one-time") {
    CounterRng rng(24);
    SignatureKeys keys(oracle::random_bits(rng, 8, true), oracle::random_bits(rng, 8, true),
                       oracle::random_bits(rng, 8));
    BitString msg = oracle::random_bits(rng, 32);
    CHECK_FALSE(keys.consumed());
    sign(keys, msg);
    CHECK(keys.consumed());
    CHECK_THROWS_AS(sign(keys, msg), std::logic_error);
}

TEST_CASE("verify does not consume and rejects malformed tags") {
    CounterRng rng(25);
    SignatureKeys keys(oracle::random_bits(rng, 10, true), oracle::random_bits(rng, 10, true),
                       oracle::random_bits(rng, 10));
    SignatureKeys signer = keys;
    BitString msg = oracle::random_bits(rng, 40);
    SignatureTag tag = sign(signer, msg);
    CHECK(verify(keys, msg, tag.tag));
    CHECK(verify(keys, msg, tag.tag));  // repeatable
    CHECK_FALSE(keys.consumed());
    CHECK_FALSE(verify(keys, msg, BitString(9)));  // wrong tag length
}

TEST_CASE("key material validation") {
    BitString ok = bits_from_string("1010"), zero(4);
    CHECK_THROWS_AS(SignatureKeys(zero, ok, ok), std::invalid_argument);
    CHECK_THROWS_AS(SignatureKeys(ok, zero, ok), std::invalid_argument);
    CHECK_NOTHROW(SignatureKeys(ok, ok, zero));  // x4 may be all-zero
    CHECK_THROWS_AS(SignatureKeys(ok, bits_from_string("101"), ok), std::invalid_argument);
    CHECK_THROWS_AS(SignatureKeys(bits_from_string("1"), bits_from_string("1"), bits_from_string("1")),
                    std::invalid_argument);
    CHECK_THROWS_AS(lfsr_hash(Gf2Poly::from_u64(0b110), ok, ok), std::invalid_argument);  // reducible p
}

TEST_CASE("collision rate respects the universal-hash bound") {
    // Pr[hash(m) = hash(m')] <= m * 2^(1-n) over random keys; n=8, m=16
    constexpr int kN = 8;
    constexpr size_t kM = 16;
    constexpr uint64_t kTrials = 100000;
    const double bound = static_cast<double>(kM) * std::pow(2.0, 1 - kN);
    CounterRng rng(26);
    uint64_t collisions = 0;
    for (uint64_t t = 0; t < kTrials; ++t) {
        CounterRng r = rng.fork(t);
        Gf2Poly p = gen_irreducible(kN, oracle::random_bits(r, kN, true));
        LfsrToeplitz h(p, oracle::random_bits(r, kN, true));
        BitString m1 = oracle::random_bits(r, kM), m2;
        do {
            m2 = oracle::random_bits(r, kM);
        } while (m2 == m1);
        if (h.hash(m1) == h.hash(m2)) ++collisions;
    }
    double rate = static_cast<double>(collisions) / static_cast<double>(kTrials);
    double sigma = std::sqrt(bound * (1.0 - bound) / static_cast<double>(kTrials));
    CHECK(rate <= bound + 3.0 * sigma);
}
