#pragma once

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bits.hpp"
#include "rng.hpp"

namespace qecom {

struct insufficient_data : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Modulated phases. X basis encodes {0, pi}, Y basis {pi/2, 3pi/2}.
enum class Phase : int { kZero = 0, kPi = 1, kHalfPi = 2, kThreeHalfPi = 3 };

inline double phase_angle(Phase p) {
    static constexpr double kPiV = 3.14159265358979323846;
    switch (p) {
        case Phase::kZero: return 0.0;
        case Phase::kPi: return kPiV;
        case Phase::kHalfPi: return kPiV / 2;
        case Phase::kThreeHalfPi: return 3 * kPiV / 2;
    }
    return 0.0;
}

inline const char* phase_label(Phase p) {
    switch (p) {
        case Phase::kZero: return "0";
        case Phase::kPi: return "π";
        case Phase::kHalfPi: return "π/2";
        case Phase::kThreeHalfPi: return "3π/2";
    }
    return "?";
}

inline bool phase_is_x(Phase p) { return p == Phase::kZero || p == Phase::kPi; }

struct DetectorConfig {
    double eta_d1 = 0.844, eta_d2 = 0.855;  // detection efficiencies
    double p_d1 = 4.4e-8, p_d2 = 2.5e-8;    // dark probability per window
};

struct KgpConfig {
    uint64_t N = 0;               // pulse pairs
    double p_x = 0.9;             // X-basis probability
    double intensity = 0.0;       // |alpha|^2 photons per pulse
    double channel_loss_db = 0.0; // per arm
    DetectorConfig detector;
    double phase_noise_sigma = 0.0;  // radians
    uint64_t seed = 0;

    void validate() const {
        if (!(p_x > 0.0 && p_x < 1.0)) throw std::invalid_argument("kgp: p_x must be in (0,1)");
        if (!(intensity >= 0.0)) throw std::invalid_argument("kgp: intensity must be >= 0");
        if (!(channel_loss_db >= 0.0)) throw std::invalid_argument("kgp: loss must be >= 0");
        for (double e : {detector.eta_d1, detector.eta_d2})
            if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("kgp: efficiencies must be in (0,1]");
        for (double d : {detector.p_d1, detector.p_d2})
            if (!(d >= 0.0 && d < 1.0)) throw std::invalid_argument("kgp: dark probabilities must be in [0,1)");
    }
};

struct DetectionSummary {
    uint64_t n = 0;    // effective events (exactly one detector clicked)
    uint64_t n_x = 0;  // both chose X
    uint64_t n_y = 0;  // both chose Y
    // (merchant phase, client phase, detector 0=D1/1=D2) -> count, matched bases only
    std::map<std::tuple<Phase, Phase, int>, uint64_t> per_phase_counts;
    uint64_t m_y = 0;  // Y-basis bit errors
    double duration_s = 0.0;
    bool empty_warning = false;

    void check() const {
        if (n_x + n_y > n) throw format_error("detection summary: n_x + n_y > n");
        if (m_y > n_y) throw format_error("detection summary: m_y > n_y");
    }
};

struct SiftedKeys {
    BitString merchant_bits, peer_bits;  // length n_x
    double E_b_x = 0.0, E_b_y = 0.0;
};

struct ErrorRates {
    double E_b_x = -1.0;  // -1 when neither sifted keys nor a published value exist
    double E_b_y = 0.0;
};

namespace detail {

struct ClickProbs {
    double p1, p2;  // marginal click probability of D1, D2
};

inline ClickProbs click_probs(double eta_alpha2, double delta_theta, const DetectorConfig& det) {
    double mu1 = eta_alpha2 * (1.0 + std::cos(delta_theta));
    double mu2 = eta_alpha2 * (1.0 - std::cos(delta_theta));
    return {1.0 - (1.0 - det.p_d1) * std::exp(-det.eta_d1 * mu1),
            1.0 - (1.0 - det.p_d2) * std::exp(-det.eta_d2 * mu2)};
}

}  // namespace detail

// Four-phase interference simulation. Pulses are processed in fixed 2^20
// chunks, each with its own forked RNG stream, so the outcome depends only on
// the seed, never on how chunks are scheduled.
inline std::pair<DetectionSummary, SiftedKeys> kgp_simulate(const KgpConfig& cfg) {
    cfg.validate();
    const double eta_alpha2 = std::pow(10.0, -cfg.channel_loss_db / 10.0) * cfg.intensity;

    // phase table: basis bit + key bit -> Phase
    static constexpr Phase kPhaseOf[2][2] = {{Phase::kZero, Phase::kPi},
                                             {Phase::kHalfPi, Phase::kThreeHalfPi}};
    // precomputed click probabilities for the 16 phase pairs (no-noise path)
    std::array<std::array<detail::ClickProbs, 4>, 4> table{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            table[a][b] = detail::click_probs(
                eta_alpha2, phase_angle(static_cast<Phase>(a)) - phase_angle(static_cast<Phase>(b)),
                cfg.detector);

    DetectionSummary sum;
    SiftedKeys keys;
    uint64_t x_err = 0;
    CounterRng root(cfg.seed);
    const uint64_t kChunk = 1ull << 20;
    const uint64_t n_chunks = (cfg.N + kChunk - 1) / kChunk;
    for (uint64_t c = 0; c < n_chunks; ++c) {
        CounterRng rng = root.fork("kgp-chunk-" + std::to_string(c));
        uint64_t pulses = std::min(kChunk, cfg.N - c * kChunk);
        for (uint64_t i = 0; i < pulses; ++i) {
            int basis_m = rng.next_double() < cfg.p_x ? 0 : 1;
            int basis_c = rng.next_double() < cfg.p_x ? 0 : 1;
            uint64_t r = rng.next_u64();
            int bit_m = static_cast<int>(r & 1), bit_c = static_cast<int>((r >> 1) & 1);
            Phase pm = kPhaseOf[basis_m][bit_m], pc = kPhaseOf[basis_c][bit_c];
            detail::ClickProbs cp;
            if (cfg.phase_noise_sigma > 0.0) {
                double noise = rng.next_gaussian() * cfg.phase_noise_sigma;
                cp = detail::click_probs(eta_alpha2, phase_angle(pm) - phase_angle(pc) + noise,
                                         cfg.detector);
            } else {
                cp = table[static_cast<int>(pm)][static_cast<int>(pc)];
            }
            bool d1 = rng.next_double() < cp.p1;
            bool d2 = rng.next_double() < cp.p2;
            if (d1 == d2) continue;  // no click or double click: discarded
            ++sum.n;
            if (basis_m != basis_c) continue;
            ++sum.per_phase_counts[{pm, pc, d2 ? 1 : 0}];
            int peer = bit_c ^ (d2 ? 1 : 0);  // Client flips on D2
            if (basis_m == 0) {
                ++sum.n_x;
                keys.merchant_bits.push_back(static_cast<uint8_t>(bit_m));
                keys.peer_bits.push_back(static_cast<uint8_t>(peer));
                if (bit_m != peer) ++x_err;
            } else {
                ++sum.n_y;
                if (bit_m != peer) ++sum.m_y;
            }
        }
    }
    sum.duration_s = static_cast<double>(cfg.N) / 1e8;  // 100 MHz repetition
    sum.empty_warning = (sum.n == 0);
    keys.E_b_x = sum.n_x ? static_cast<double>(x_err) / static_cast<double>(sum.n_x) : 0.0;
    keys.E_b_y = sum.n_y ? static_cast<double>(sum.m_y) / static_cast<double>(sum.n_y) : 0.0;
    sum.check();
    return {sum, keys};
}

namespace detail {

inline const std::array<std::pair<Phase, Phase>, 8>& counts_rows() {
    static const std::array<std::pair<Phase, Phase>, 8> rows = {{
        {Phase::kZero, Phase::kZero},
        {Phase::kZero, Phase::kPi},
        {Phase::kPi, Phase::kZero},
        {Phase::kPi, Phase::kPi},
        {Phase::kHalfPi, Phase::kHalfPi},
        {Phase::kHalfPi, Phase::kThreeHalfPi},
        {Phase::kThreeHalfPi, Phase::kHalfPi},
        {Phase::kThreeHalfPi, Phase::kThreeHalfPi},
    }};
    return rows;
}

inline std::string counts_row_label(Phase a, Phase b) {
    std::string la = phase_label(a), lb = phase_label(b);
    // single-character phases are written without a separator ("Detected 0π");
    // byte length misleads here (π is two UTF-8 bytes), so test for the '/'
    // that only the fractional phase labels carry
    bool spaced = la.find('/') != std::string::npos || lb.find('/') != std::string::npos;
    return "Detected " + la + (spaced ? " " : "") + lb;
}

}  // namespace detail

// Rebuilds a DetectionSummary from a measured count table. m_y counts clicks
/// at the detector inconsistent with the Y-phase difference: D2 for equal
// phases, D1 for opposite phases.
inline DetectionSummary kgp_replay(const nlohmann::json& table, double duration_s) {
    if (!table.is_object() || table.empty()) throw format_error("replay: empty table");
    DetectionSummary sum;
    sum.duration_s = duration_s;
    for (const char* field : {"n", "n_x", "n_y"})
        if (!table.contains(field)) throw format_error(std::string("replay: missing field ") + field);
    sum.n = table.at("n").get<uint64_t>();
    sum.n_x = table.at("n_x").get<uint64_t>();
    sum.n_y = table.at("n_y").get<uint64_t>();
    for (const auto& [pm, pc] : detail::counts_rows()) {
        std::string label = detail::counts_row_label(pm, pc);
        if (!table.contains(label)) throw format_error("replay: missing field " + label);
        const auto& cell = table.at(label);
        for (int d : {0, 1}) {
            std::string dk = d ? "D2" : "D1";
            if (!cell.contains(dk)) throw format_error("replay: missing " + label + " " + dk);
            sum.per_phase_counts[{pm, pc, d}] = cell.at(dk).get<uint64_t>();
        }
    }
    for (const auto& [pm, pc] : detail::counts_rows()) {
        if (phase_is_x(pm)) continue;
        int bad_det = (pm == pc) ? 1 : 0;
        sum.m_y += sum.per_phase_counts[{pm, pc, bad_det}];
    }
    sum.check();
    return sum;
}

// E_b_y from disclosed Y-basis counts; E_b_x from the sifted strings when a
// simulation produced them, otherwise from the caller-provided published value.
inline ErrorRates kgp_estimate(const DetectionSummary& sum, const SiftedKeys* sifted = nullptr,
                               double published_E_b_x = -1.0) {
    if (sum.n_y == 0) throw insufficient_data("estimate: n_y = 0");
    ErrorRates r;
    r.E_b_y = static_cast<double>(sum.m_y) / static_cast<double>(sum.n_y);
    if (sifted && !sifted->merchant_bits.empty()) {
        size_t err = 0;
        for (size_t i = 0; i < sifted->merchant_bits.size(); ++i)
            err += sifted->merchant_bits[i] != sifted->peer_bits[i];
        r.E_b_x = static_cast<double>(err) / static_cast<double>(sifted->merchant_bits.size());
    } else if (published_E_b_x >= 0.0) {
        r.E_b_x = published_E_b_x;
    }  // otherwise E_b_x stays at its unknown sentinel; replay tables cannot resolve it
    return r;
}

}  // namespace qecom
