#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qecom/security.hpp"

using namespace qecom;

// Characterized flaw set of the Merchant-Client1 pair (published values):
// xi = 0.72%, delta = 0.035, tan(theta) = 1e-3, psi = arcsin-level 5.89e-3,
// mu_THA = 1e-7, at pulse intensity alpha^2 = 0.0042.
static SourceFlaws client1_flaws() {
    SourceFlaws fl;
    fl.xi = 0.0072;
    fl.delta = 0.035;
    fl.tan_theta = 0.001;
    fl.psi = 0.00589;
    fl.mu_tha = 1e-7;
    return fl;
}

TEST_CASE("binary entropy pins") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binary_entropy(0.25) == doctest::Approx(0.8112781244591328).epsilon(1e-12));
    CHECK_THROWS(binary_entropy(-0.1));
    CHECK_THROWS(binary_entropy(1.1));
}

TEST_CASE("concentration bounds against the high-precision oracle") {
    CHECK(gamma_u(1e3, 1e6, 0.05, 1e-10) == doctest::Approx(0.0638138282953).epsilon(1e-9));
    CHECK(kato_delta(1e6, 1e-10) == doctest::Approx(3393.070212).epsilon(1e-8));
    // gamma_u shrinks as the sample grows
    CHECK(gamma_u(1e4, 1e6, 0.05, 1e-10) < gamma_u(1e3, 1e6, 0.05, 1e-10));
}

TEST_CASE("phase error rate from the quantum coin") {
    CHECK(phase_error_from_coin(0.0, 0.1) == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(phase_error_from_coin(0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    // the closed form satisfies the defining constraint
    double Ey = 0.0006, Delta = 0.02;
    double Ep = phase_error_from_coin(Ey, Delta);
    double lhs = 1.0 - 2.0 * Delta;
    double rhs = std::sqrt(Ey * Ep) + std::sqrt((1.0 - Ey) * (1.0 - Ep));
    CHECK(rhs == doctest::Approx(lhs).epsilon(1e-9));
    // monotone in Delta
    CHECK(phase_error_from_coin(0.0006, 0.05) > phase_error_from_coin(0.0006, 0.01));
}

TEST_CASE("pattern-effect correlation parameter") {
    CHECK(pattern_epsilon(0.0, 0.0074) == 0.0);
    CHECK(pattern_epsilon(5.58e-3, 7.40e-3) == doctest::Approx(2.30e-7).epsilon(0.01));
    CHECK(pattern_epsilon(0.02, 0.0074) > pattern_epsilon(0.01, 0.0074));
    CHECK(pattern_epsilon(0.01, 0.009) > pattern_epsilon(0.01, 0.0074));
}

TEST_CASE("fidelity with imperfect sources matches the complex-arithmetic oracle") {
    std::complex<double> f = fidelity_imperfect(client1_flaws(), 0.0042);
    CHECK(f.real() == doctest::Approx(0.999979630835).epsilon(1e-10));
    CHECK(f.imag() == doctest::Approx(7.33893169994e-5).epsilon(1e-7));
    CHECK(std::abs(f) == doctest::Approx(0.999979633528).epsilon(1e-10));
    // no flaws: fidelity is still below one because the states are
    // nonorthogonal coherent states, |F| = 0.99998240934 at alpha^2 = 0.0042
    SourceFlaws none;
    none.mu_tha = 0.0;
    CHECK(std::abs(fidelity_imperfect(none, 0.0042)) == doctest::Approx(0.99998240934).epsilon(1e-10));
}

TEST_CASE("coin imbalance vanishes for a flawless source") {
    SourceFlaws none;
    none.mu_tha = 0.0;
    CHECK(coin_imbalance(none, 0.0042, 0.5) == doctest::Approx(0.0).epsilon(1e-9));
    // and grows once flaws are present
    CHECK(coin_imbalance(client1_flaws(), 0.0042, 0.5) > 0.0);
}

TEST_CASE("min-entropy pin for the Merchant-Client1 inputs at l = 1247") {
    SecurityBudget budget;
    double E_p_bar = 0.0, E_p_bar_l = 0.0;
    double leak = 59209.0;
    double E_p_star = 0.28;
    double H = min_entropy_from_phase(1247, 4424989, E_p_star, leak, budget, &E_p_bar, &E_p_bar_l);
    CHECK(H == doctest::Approx(48.2243724346).epsilon(1e-8));
    CHECK(E_p_bar > E_p_star);
    CHECK(E_p_bar_l > E_p_bar);
}

TEST_CASE("optimizer reproduces the published signature rates") {
    const struct {
        uint64_t n_x, n_y, m_y;
        double E_p, leak, published_SR;
        uint64_t expect_n_star;
    } rows[] = {
        {13919127, 189603, 139, 0.230, 185875, 60.10, 781},
        {4424989, 60019, 38, 0.280, 59209, 11.83, 1279},
        {1382365, 18850, 19, 0.373, 18129, 0.82, 6148},
        {2545485, 35457, 195, 0.256, 168844, 4.47, 1971},
    };
    for (const auto& r : rows) {
        OptimizeInput in;
        in.n_x = r.n_x;
        in.n_y = r.n_y;
        in.m_y = r.m_y;
        in.leak_EC = r.leak;
        in.published_E_p = r.E_p;
        in.m = 428072;
        in.duration_s = 100.0;
        SecurityResult res = optimize_n(in);
        CHECK(res.n_star == r.expect_n_star);
        CHECK(std::abs(res.SR_per_second - r.published_SR) / r.published_SR < 0.10);
        CHECK(res.eps_for <= in.budget.eps_tot_target);
        CHECK(res.eps_tot <= 5e-10 + 1e-20);
        CHECK(res.SR_per_run == doctest::Approx(static_cast<double>(r.n_x) / (3.0 * res.n_star)));
    }
}

TEST_CASE("optimizer reports infeasibility on starved inputs") {
    OptimizeInput in;
    in.n_x = 3000;
    in.n_y = 50;
    in.m_y = 1;
    in.leak_EC = 2900.0;  // leaks nearly everything
    in.published_E_p = 0.45;
    in.m = 428072;
    in.duration_s = 100.0;
    CHECK_THROWS_AS(optimize_n(in), infeasible_error);
}

TEST_CASE("error budget composition") {
    OptimizeInput in;
    in.n_x = 4424989;
    in.n_y = 60019;
    in.m_y = 38;
    in.leak_EC = 59209.0;
    in.published_E_p = 0.28;
    in.m = 428072;
    in.duration_s = 100.0;
    SecurityResult r = optimize_n(in);
    CHECK(r.eps_rob == doctest::Approx(2.0 * in.budget.eps_EC + 2.0 * in.budget.eps_prime));
    CHECK(r.eps_rep == doctest::Approx(2.0 * in.budget.eps_prime));
    CHECK(r.eps_tot == doctest::Approx(std::max({r.eps_rob, r.eps_rep, r.eps_for})));
}

TEST_CASE("guess probability and input validation") {
    CHECK(guess_probability(10.0) == doctest::Approx(std::pow(2.0, -10.0)));
    CHECK_THROWS(min_entropy_from_phase(0, 100, 0.1, 0.0, SecurityBudget{}));
    CHECK_THROWS(min_entropy(10, 100, 0, 0, 0.0, 0.01, SecurityBudget{}));
    SourceFlaws bad;
    bad.xi = -1.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("Delta pipeline feeds the same machinery as published E_p") {
    // with the coin-imbalance entry path the pipeline still produces a
    // monotone, feasible plan; Delta here is the Client1 characterization
    double Delta = coin_imbalance(client1_flaws(), 0.0042, 0.5);
    OptimizeInput in;
    in.n_x = 4424989;
    in.n_y = 60019;
    in.m_y = 38;
    in.leak_EC = 59209.0;
    in.Delta = Delta;
    in.m = 428072;
    in.duration_s = 100.0;
    SecurityResult r = optimize_n(in);
    CHECK(r.n_star >= 1);
    CHECK(r.E_p_star < 0.28);  // measured flaws are milder than published E_p
    CHECK(r.eps_tot <= 5e-10 + 1e-20);
}
