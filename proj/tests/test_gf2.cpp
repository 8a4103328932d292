#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qecom/gf2.hpp"
#include "qecom/rng.hpp"

using namespace qecom;

static Gf2Poly random_poly(CounterRng& rng, int max_deg) {
    Gf2Poly p;
    int deg = static_cast<int>(rng.next_below(static_cast<uint64_t>(max_deg))) + 1;
    for (int i = 0; i < deg; ++i)
        if (rng.next_u64() & 1) p.set_coeff(static_cast<size_t>(i), true);
    p.set_coeff(static_cast<size_t>(deg), true);
    return p;
}

TEST_CASE("hex serialization round-trips") {
    CHECK(Gf2Poly::from_u64(0b101111011).to_hex() == "17b");
    CHECK(Gf2Poly::from_hex("17b") == Gf2Poly::from_u64(0b101111011));
    CHECK(Gf2Poly::from_hex("0").degree() == -1);
    CounterRng rng(11);
    for (int t = 0; t < 200; ++t) {
        Gf2Poly p = random_poly(rng, 300);
        CHECK(Gf2Poly::from_hex(p.to_hex()) == p);
    }
}

TEST_CASE("multiplication matches the coefficient-vector oracle") {
    CounterRng rng(12);
    for (int t = 0; t < 200; ++t) {
        Gf2Poly a = random_poly(rng, 250), b = random_poly(rng, 250);
        CHECK(poly_mul(a, b) == oracle::to_poly(oracle::mul(oracle::from_poly(a), oracle::from_poly(b))));
    }
}

TEST_CASE("reduction matches the coefficient-vector oracle") {
    CounterRng rng(13);
    for (int t = 0; t < 200; ++t) {
        Gf2Poly a = random_poly(rng, 400), m = random_poly(rng, 280);
        CHECK(poly_mod(a, m) == oracle::to_poly(oracle::mod(oracle::from_poly(a), oracle::from_poly(m))));
    }
}

TEST_CASE("modular multiplication is consistent with mul-then-mod") {
    CounterRng rng(14);
    for (int t = 0; t < 100; ++t) {
        Gf2Poly m = random_poly(rng, 200);
        Gf2Poly a = poly_mod(random_poly(rng, 199), m), b = poly_mod(random_poly(rng, 199), m);
        CHECK(poly_mul_mod(a, b, m) == poly_mod(poly_mul(a, b), m));
    }
}

TEST_CASE("irreducibility predicate on known cases") {
    CHECK(is_irreducible(Gf2Poly::from_u64(0b111)));        // x^2+x+1
    CHECK(is_irreducible(Gf2Poly::from_u64(0b1011)));       // x^3+x+1
    CHECK(is_irreducible(Gf2Poly::from_u64(0b111000011)));  // x^8+x^7+x^6+x+1
    CHECK_FALSE(is_irreducible(Gf2Poly::from_u64(0b101)));  // (x+1)^2
    CHECK_FALSE(is_irreducible(Gf2Poly::from_u64(0b110)));  // x(x+1)
    // there are exactly three monic irreducible polynomials of degree 4
    int count = 0;
    for (uint64_t low = 0; low < 16; ++low)
        if (is_irreducible(Gf2Poly::from_u64((1ull << 4) | low))) ++count;
    CHECK(count == 3);
    // products of irreducibles are reducible
    CHECK_FALSE(is_irreducible(poly_mul(Gf2Poly::from_u64(0b111), Gf2Poly::from_u64(0b1011))));
}

TEST_CASE("Berlekamp-Massey recovers a minimal polynomial") {
    // worked sequence: powers of the seed modulo the base polynomial
    Gf2Poly f = Gf2Poly::from_u64(0b111000011);
    Gf2Poly g = Gf2Poly::from_u64(0b001111100);
    BitString seq;
    Gf2Poly cur = Gf2Poly::from_u64(1);
    for (int i = 0; i < 16; ++i) {
        seq.push_back(cur.coeff(0) ? 1 : 0);
        cur = poly_mul_mod(cur, g, f);
    }
    Gf2Poly h = berlekamp_massey(seq);
    CHECK(h == Gf2Poly::from_u64(0b101111011));
    CHECK(is_irreducible(h));
}

TEST_CASE("worked example: seed 01111100 over the degree-8 base") {
    BitString seed = bits_from_string("01111100");
    Gf2Poly p = gen_irreducible(8, seed);
    CHECK(p == Gf2Poly::from_u64(0b101111011));  // x^8+x^6+x^5+x^4+x^3+x+1
    CHECK(p.to_hex() == "17b");
}

TEST_CASE("gen_irreducible output contract") {
    CounterRng rng(15);
    for (int n : {2, 3, 8, 16, 64, 127}) {
        BitString seed = oracle::random_bits(rng, static_cast<size_t>(n), true);
        Gf2Poly p = gen_irreducible(n, seed);
        CHECK(p.degree() == n);
        CHECK(is_irreducible(p));
        CHECK(gen_irreducible(n, seed) == p);  // deterministic
    }
    CHECK_THROWS(gen_irreducible(8, BitString(8)));             // all-zero seed
    CHECK_THROWS(gen_irreducible(8, bits_from_string("101")));  // wrong length
}

TEST_CASE("base polynomials are irreducible with the preset low-degree entries") {
    CHECK(base_irreducible(2) == Gf2Poly::from_u64(0b111));
    CHECK(base_irreducible(8) == Gf2Poly::from_u64(0b111000011));
    for (int n : {3, 5, 16, 33, 100}) {
        const Gf2Poly& b = base_irreducible(n);
        CHECK(b.degree() == n);
        CHECK(is_irreducible(b));
    }
}

TEST_CASE("gcd and modulus edge cases") {
    Gf2Poly zero;
    Gf2Poly a = Gf2Poly::from_u64(0b1011);
    CHECK(poly_gcd(a, zero) == a);
    CHECK(poly_mod(a, Gf2Poly::from_u64(1)) == zero);  // degree-0 modulus
    Gf2Poly common = Gf2Poly::from_u64(0b111);
    Gf2Poly x = poly_mul(common, Gf2Poly::from_u64(0b1011));
    Gf2Poly y = poly_mul(common, Gf2Poly::from_u64(0b11001));
    CHECK(poly_mod(poly_gcd(x, y), common) == zero);
}
