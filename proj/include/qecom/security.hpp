#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qecom {

struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SourceFlaws {
    double xi = 0.0;               // relative intensity fluctuation
    double delta = 0.0;            // phase shift (radians)
    double tan_theta = 0.0;        // polarization extinction amplitude ratio
    double psi = 0.0;              // pattern-effect phase deviation (radians)
    double mu_tha = 1e-7;          // Trojan-horse reflected intensity (photons)
    double epsilon_pattern = 0.0;  // correlation parameter

    void validate() const {
        for (double v : {xi, delta, tan_theta, psi, mu_tha, epsilon_pattern})
            if (!(v >= 0.0)) throw std::invalid_argument("source flaws: all parameters must be >= 0");
        if (!(epsilon_pattern < 1.0)) throw std::invalid_argument("source flaws: epsilon_pattern must be < 1");
    }
};

// epsilon = 1 - exp(|alpha|^2 (2 cos psi - 2)): pattern-effect phase deviation
// mapped to the correlation parameter.
inline double pattern_epsilon(double psi, double alpha_sq) {
    return 1.0 - std::exp(alpha_sq * (2.0 * std::cos(psi) - 2.0));
}

struct SecurityBudget {
    double eps_EC = 1e-10;
    double eps_bar = 1e-10;
    double eps_F = 1e-10;
    double eps_prime = 1e-10;
    double eps_tot_target = 5e-10;

    void validate() const {
        for (double v : {eps_EC, eps_bar, eps_F, eps_prime, eps_tot_target})
            if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("budget: probabilities must be in (0,1)");
    }
};

struct SecurityResult {
    double H_n = 0.0;
    uint64_t n_star = 0;
    double SR_per_run = 0.0;
    double SR_per_second = 0.0;
    double eps_rob = 0.0, eps_rep = 0.0, eps_for = 0.0, eps_tot = 0.0;
    // pipeline intermediates at n_star
    double E_b_y_star = 0.0, E_p_star = 0.0, E_p_bar = 0.0, E_p_bar_l = 0.0;
};

inline double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("binary_entropy: x must be in [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// Statistical fluctuation of random sampling without replacement:
// gamma^U(l, k, lambda, eps) with A = max{l,k} and
// G = ((l+k)/(l k)) ln((l+k)/(2 pi l k lambda(1-lambda) eps^2)).
inline double gamma_u(double l, double k, double lambda, double eps) {
    if (!(l >= 1.0 && k >= 1.0)) throw std::invalid_argument("gamma_u: l, k must be >= 1");
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("gamma_u: lambda must be in (0,1)");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("gamma_u: eps must be in (0,1)");
    double A = std::max(l, k);
    double G = (l + k) / (l * k) *
               std::log((l + k) / (2.0 * std::numbers::pi * l * k * lambda * (1.0 - lambda) * eps * eps));
    double s = (l + k);
    double num = (1.0 - 2.0 * lambda) * A * G / s + std::sqrt(A * A * G * G / (s * s) + 4.0 * lambda * (1.0 - lambda) * G);
    double den = 2.0 + 2.0 * A * A * G / (s * s);
    return num / den;
}

// Concentration bound Delta_n = sqrt(n/2 * ln(1/eps_F)); lifts an observed
// count to an expectation bound (m* = m + Delta_n) and back.
inline double kato_delta(double n, double eps_F) {
    if (!(n >= 1.0)) throw std::invalid_argument("kato_delta: n must be >= 1");
    if (!(eps_F > 0.0 && eps_F <= 1.0)) throw std::invalid_argument("kato_delta: eps_F must be in (0,1]");
    return std::sqrt(0.5 * n * std::log(1.0 / eps_F));
}

// Largest E_p in [0,1] with 1-2*Delta <= sqrt(E_b_y E_p) + sqrt((1-E_b_y)(1-E_p)).
// Closed form: with c = 1-2*Delta, sqrt(E_p) = c sqrt(E_y) + sqrt((1-c^2)(1-E_y)).
inline double phase_error_from_coin(double E_b_y, double Delta) {
    if (!(E_b_y >= 0.0 && E_b_y <= 1.0)) throw std::invalid_argument("phase_error_from_coin: E_b_y in [0,1]");
    if (!(Delta >= 0.0 && Delta <= 0.5)) throw std::invalid_argument("phase_error_from_coin: Delta in [0,0.5]");
    double c = 1.0 - 2.0 * Delta;
    double s = c * std::sqrt(E_b_y) + std::sqrt((1.0 - c * c) * (1.0 - E_b_y));
    double ep = std::min(s * s, 1.0);
    // the closed form must be a root of the defining equality; fall back to
    // bisection if floating-point drift broke it
    auto rhs = [&](double e) { return std::sqrt(E_b_y * e) + std::sqrt((1.0 - E_b_y) * (1.0 - e)); };
    if (ep < 1.0 && std::abs(rhs(ep) - c) > 1e-9) {
        double lo = E_b_y, hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (rhs(mid) >= c ? lo : hi) = mid;
        }
        ep = lo;
    }
    return ep;
}

namespace detail {

inline std::complex<double> coherent_overlap(std::complex<double> beta, std::complex<double> gamma) {
    return std::exp(-(std::norm(beta) + std::norm(gamma)) / 2.0 + std::conj(beta) * gamma);
}

struct CoinTerms {
    // the four optical overlaps of the fidelity expression plus the scalar
    // prefactor 1/4 (1-eps) e^-mu cos^2(theta)
    std::complex<double> c1, c2, c3, c4;
    double pref;
};

inline CoinTerms coin_terms(const SourceFlaws& fl, double alpha_sq, int xi_sign) {
    const std::complex<double> i1(0.0, 1.0);
    double ap = std::sqrt(alpha_sq * (1.0 + xi_sign * fl.xi));
    std::complex<double> eid = std::exp(i1 * fl.delta);
    std::complex<double> x0 = ap, x1 = -eid * ap;        // X-basis pulses
    std::complex<double> y0 = i1 * eid * ap, y1 = -i1 * eid * ap;  // Y-basis pulses
    double eps = fl.epsilon_pattern > 0.0 ? fl.epsilon_pattern : pattern_epsilon(fl.psi, alpha_sq);
    double cth = std::cos(std::atan(fl.tan_theta));
    CoinTerms t;
    t.c1 = coherent_overlap(x0, y0);
    t.c2 = coherent_overlap(x1, y1);
    t.c3 = coherent_overlap(x0, y1);
    t.c4 = coherent_overlap(x1, y0);
    t.pref = 0.25 * (1.0 - eps) * std::exp(-fl.mu_tha) * cth * cth;
    return t;
}

inline std::complex<double> fidelity_from_terms(const CoinTerms& t) {
    const std::complex<double> i1(0.0, 1.0);
    return t.pref * ((1.0 - i1) * t.c1 + (1.0 - i1) * t.c2 + (1.0 + i1) * t.c3 + (1.0 + i1) * t.c4);
}

}  // namespace detail

// <Psi_X|Psi_Y> with imperfect sources, evaluated at the worst-case actual
// amplitude alpha'^2 = alpha^2 (1 +- xi) (the sign minimizing the magnitude).
inline std::complex<double> fidelity_imperfect(const SourceFlaws& flaws, double alpha_sq) {
    flaws.validate();
    if (!(alpha_sq > 0.0)) throw std::invalid_argument("fidelity_imperfect: alpha_sq must be > 0");
    std::complex<double> best;
    bool first = true;
    for (int sgn : {+1, -1}) {
        std::complex<double> v = detail::fidelity_from_terms(detail::coin_terms(flaws, alpha_sq, sgn));
        if (first || std::abs(v) < std::abs(best)) {
            best = v;
            first = false;
        }
    }
    return best;
}

namespace detail {

// Max over (delta_theta, delta_X, delta_Y) of
// Re(e^{i delta_theta} <Psi_Y,dY|Psi_X,dX>) |<Psi_Y|Psi_X>|. The free basis
// phases multiply the bit-1 components, so the X1 terms pick up e^{i dX} and
// the Y1 terms e^{-i dY}. The delta_theta maximum is |.| analytically; the
// remaining 2-D surface is scanned on a grid and polished by coordinate
// descent.
inline double coin_objective_max(const CoinTerms& t, int grid) {
    const std::complex<double> i1(0.0, 1.0);
    double mag0 = std::abs(fidelity_from_terms(t));
    auto val = [&](double dx, double dy) {
        std::complex<double> ex = std::exp(i1 * dx), eyc = std::exp(-i1 * dy);
        std::complex<double> f = t.pref * ((1.0 - i1) * t.c1 + (1.0 - i1) * ex * eyc * t.c2 +
                                           (1.0 + i1) * eyc * t.c3 + (1.0 + i1) * ex * t.c4);
        return std::abs(f) * mag0;
    };
    constexpr double kTau = 2.0 * std::numbers::pi;
    double best = 0.0, bx = 0.0, by = 0.0;
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b) {
            double v = val(kTau * a / grid, kTau * b / grid);
            if (v > best) {
                best = v;
                bx = kTau * a / grid;
                by = kTau * b / grid;
            }
        }
    double step = kTau / grid;
    while (step > 1e-12) {
        bool moved = false;
        for (auto [dx, dy] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
            double v = val(bx + dx, by + dy);
            if (v > best + 1e-15) {
                best = v;
                bx += dx;
                by += dy;
                moved = true;
            }
        }
        if (!moved) step *= 0.5;
    }
    return best;
}

}  // namespace detail

// Quantum-coin imbalance Delta from source flaws. The maximized objective is
// normalized by the same maximization with all flaws removed, so an ideal
// source gives exactly Delta = 0; Delta = (1 - max/max_ideal)/(2Q), clamped
// at 0.
inline double coin_imbalance(const SourceFlaws& flaws, double alpha_sq, double Q, int grid = 64) {
    flaws.validate();
    if (!(Q > 0.0 && Q <= 1.0)) throw std::invalid_argument("coin_imbalance: Q must be in (0,1]");
    if (grid < 8) throw std::invalid_argument("coin_imbalance: grid too coarse");
    double worst = -1.0;
    for (int sgn : {+1, -1}) {
        double m = detail::coin_objective_max(detail::coin_terms(flaws, alpha_sq, sgn), grid);
        if (worst < 0.0 || m < worst) worst = m;
    }
    SourceFlaws ideal;  // all zero except mu_tha
    ideal.mu_tha = 0.0;
    double ideal_max = detail::coin_objective_max(detail::coin_terms(ideal, alpha_sq, +1), grid);
    double delta = (1.0 - worst / ideal_max) / (2.0 * Q);
    return std::max(delta, 0.0);
}

namespace detail {

// subtract with a one-ulp downward guard so accumulated rounding can only
// under-report the extractable entropy
inline double guarded_sub(double a, double b) {
    return std::nextafter(a - b, -std::numeric_limits<double>::infinity());
}

}  // namespace detail

// Tail of the min-entropy pipeline, entered at E_p* (either derived from the
// Y-basis observation or injected directly from a published value).
inline double min_entropy_from_phase(uint64_t l, uint64_t n_x, double E_p_star, double leak_EC,
                                     const SecurityBudget& budget, double* E_p_bar_out = nullptr,
                                     double* E_p_bar_l_out = nullptr) {
    budget.validate();
    if (l < 1 || l > n_x) throw std::invalid_argument("min_entropy: need 1 <= l <= n_x");
    double nx = static_cast<double>(n_x);
    double m_p_star = nx * E_p_star;
    double m_bar_p = m_p_star + kato_delta(nx, budget.eps_F);
    double E_p_bar = std::min(m_bar_p / nx, 1.0);
    if (E_p_bar_out) *E_p_bar_out = E_p_bar;
    if (l == n_x) return 0.0;  // no sampling complement left
    if (E_p_bar <= 0.0 || E_p_bar >= 1.0) {
        if (E_p_bar_l_out) *E_p_bar_l_out = E_p_bar;
        return 0.0;
    }
    double E_p_bar_l = E_p_bar + gamma_u(static_cast<double>(l), nx - static_cast<double>(l),
                                         E_p_bar, budget.eps_bar);
    if (E_p_bar_l_out) *E_p_bar_l_out = E_p_bar_l;
    if (E_p_bar_l >= 0.5) return 0.0;
    double bracket = detail::guarded_sub(1.0, binary_entropy(E_p_bar_l));
    bracket = detail::guarded_sub(bracket, leak_EC / nx);
    bracket = detail::guarded_sub(bracket, std::log2(2.0 / budget.eps_EC) / nx);
    double H_n = static_cast<double>(l) * bracket;
    return std::max(H_n, 0.0);
}

// Full pipeline from the Y-basis observation (m_y of n_y) and coin imbalance.
inline double min_entropy(uint64_t l, uint64_t n_x, uint64_t n_y, uint64_t m_y, double leak_EC,
                          double Delta, const SecurityBudget& budget,
                          double* E_b_y_star_out = nullptr, double* E_p_star_out = nullptr) {
    if (n_y == 0) throw std::invalid_argument("min_entropy: n_y must be > 0");
    if (m_y > n_y) throw std::invalid_argument("min_entropy: m_y > n_y");
    double m_y_star = static_cast<double>(m_y) + kato_delta(static_cast<double>(n_y), budget.eps_F);
    double E_b_y_star = std::min(m_y_star / static_cast<double>(n_y), 1.0);
    if (E_b_y_star_out) *E_b_y_star_out = E_b_y_star;
    double E_p_star = phase_error_from_coin(E_b_y_star, Delta);
    if (E_p_star_out) *E_p_star_out = E_p_star;
    return min_entropy_from_phase(l, n_x, E_p_star, leak_EC, budget);
}

inline double guess_probability(double H_n) {
    if (!(H_n >= 0.0)) throw std::invalid_argument("guess_probability: H_n must be >= 0");
    return std::exp2(-H_n);
}

struct OptimizeInput {
    uint64_t n_x = 0;
    uint64_t n_y = 0;
    uint64_t m_y = 0;
    double leak_EC = 0.0;
    // exactly one of the two entry paths:
    double Delta = -1.0;            // >= 0 selects the coin-imbalance path
    double published_E_p = -1.0;    // in [0,1] selects direct injection
    uint64_t m = 0;                 // message bits
    double duration_s = 0.0;
    SecurityBudget budget;
};

// Minimal n with eps_for = m 2^(1-H_n) <= eps_tot_target, by exponential
// bracket + binary search; eps_for monotonicity over probed points is
// asserted and a linear scan takes over if it fails.
inline SecurityResult optimize_n(const OptimizeInput& in) {
    in.budget.validate();
    if (in.m < 1) throw std::invalid_argument("optimize_n: m must be >= 1");
    if (in.n_x < 3) throw infeasible_error("optimize_n: n_x too small");
    double E_b_y_star = 0.0, E_p_star;
    if (in.published_E_p >= 0.0) {
        if (in.published_E_p > 1.0) throw std::invalid_argument("optimize_n: published_E_p in [0,1]");
        E_p_star = in.published_E_p;
        if (in.n_y > 0)
            E_b_y_star = std::min(
                (static_cast<double>(in.m_y) + kato_delta(static_cast<double>(in.n_y), in.budget.eps_F)) /
                    static_cast<double>(in.n_y),
                1.0);
    } else if (in.Delta >= 0.0) {
        if (in.n_y == 0) throw std::invalid_argument("optimize_n: coin-imbalance path needs n_y > 0");
        double m_y_star = static_cast<double>(in.m_y) + kato_delta(static_cast<double>(in.n_y), in.budget.eps_F);
        E_b_y_star = std::min(m_y_star / static_cast<double>(in.n_y), 1.0);
        E_p_star = phase_error_from_coin(E_b_y_star, in.Delta);
    } else {
        throw std::invalid_argument("optimize_n: provide Delta or published_E_p");
    }

    auto eps_for_at = [&](uint64_t l, SecurityResult* fill = nullptr) {
        double epb = 0.0, epbl = 0.0;
        double H = min_entropy_from_phase(l, in.n_x, E_p_star, in.leak_EC, in.budget, &epb, &epbl);
        if (fill) {
            fill->H_n = H;
            fill->E_p_bar = epb;
            fill->E_p_bar_l = epbl;
        }
        return static_cast<double>(in.m) * std::exp2(1.0 - H);
    };

    const uint64_t n_max = in.n_x / 3;
    // exponential bracket
    uint64_t hi = 16;
    bool mono_ok = true;
    double prev = eps_for_at(1);
    while (hi < n_max && eps_for_at(hi) > in.budget.eps_tot_target) {
        double cur = eps_for_at(hi);
        if (cur > prev + 1e-6) mono_ok = false;
        prev = cur;
        hi *= 2;
    }
    if (hi > n_max) hi = n_max;
    uint64_t n_star = 0;
    if (eps_for_at(hi) > in.budget.eps_tot_target)
        throw infeasible_error("optimize_n: no n <= n_x/3 meets the target");
    if (mono_ok) {
        uint64_t lo = hi / 2 + 1;
        if (hi == 16) lo = 1;
        while (lo < hi) {
            uint64_t mid = lo + (hi - lo) / 2;
            if (eps_for_at(mid) <= in.budget.eps_tot_target) hi = mid;
            else lo = mid + 1;
        }
        n_star = lo;
    } else {
        for (uint64_t l = 1; l <= n_max; ++l)
            if (eps_for_at(l) <= in.budget.eps_tot_target) {
                n_star = l;
                break;
            }
        if (n_star == 0) throw infeasible_error("optimize_n: no n <= n_x/3 meets the target");
    }

    SecurityResult res;
    res.n_star = n_star;
    res.eps_for = eps_for_at(n_star, &res);
    res.E_b_y_star = E_b_y_star;
    res.E_p_star = E_p_star;
    res.eps_rob = 2.0 * in.budget.eps_EC + 2.0 * in.budget.eps_prime;
    res.eps_rep = 2.0 * in.budget.eps_prime;
    res.eps_tot = std::max({res.eps_rob, res.eps_rep, res.eps_for});
    res.SR_per_run = static_cast<double>(in.n_x) / (3.0 * static_cast<double>(n_star));
    res.SR_per_second = in.duration_s > 0.0 ? res.SR_per_run / in.duration_s : 0.0;
    return res;
}

}  // namespace qecom
