// Command-line front end: binds key generation, reconciliation, signing,
// characterization, security planning, and the three-party protocol into
// reproducible pipelines. All reports are JSON with stable field order.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qecom/bits.hpp"
#include "qecom/cascade.hpp"
#include "qecom/charize.hpp"
#include "qecom/gf2.hpp"
#include "qecom/kgp.hpp"
#include "qecom/otuh.hpp"
#include "qecom/protocol.hpp"
#include "qecom/rng.hpp"
#include "qecom/security.hpp"

using nlohmann::json;
using nlohmann::ordered_json;
using namespace qecom;

namespace {

bool log_debug() {
    const char* v = std::getenv("QECOM_LOG");
    return v && std::string(v) == "debug";
}

void debug(const std::string& msg) {
    if (log_debug()) std::cerr << "[qecom] " << msg << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << body;
}

json read_json(const std::string& path) { return json::parse(read_file(path)); }

void emit(const ordered_json& report, const std::string& out_path) {
    std::string body = report.dump(2) + "\n";
    if (out_path.empty())
        std::cout << body;
    else
        write_file(out_path, body);
}

// key files: {"n": int, "x2": hex, "x3": hex, "x4": hex}, hex MSB-first,
// truncated to n bits
BitString hex_bits(const std::string& hex, size_t n) {
    if (hex.size() * 4 < n)
        throw std::runtime_error("hex string shorter than " + std::to_string(n) + " bits");
    BitString b = bits_from_hex(hex, hex.size() * 4);
    b.resize(n);
    return b;
}

SignatureKeys load_keys(const std::string& path) {
    json j = read_json(path);
    size_t n = j.at("n").get<size_t>();
    return SignatureKeys(hex_bits(j.at("x2").get<std::string>(), n),
                         hex_bits(j.at("x3").get<std::string>(), n),
                         hex_bits(j.at("x4").get<std::string>(), n));
}

// bit-string files: a line of '0'/'1' characters
BitString load_bit_file(const std::string& path) {
    std::string s = read_file(path);
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return bits_from_string(s);
}

SourceFlaws flaws_from_json(const json& j) {
    SourceFlaws fl;
    if (j.contains("xi")) fl.xi = j.at("xi").get<double>();
    if (j.contains("delta")) fl.delta = j.at("delta").get<double>();
    if (j.contains("tan_theta")) fl.tan_theta = j.at("tan_theta").get<double>();
    if (j.contains("psi")) fl.psi = j.at("psi").get<double>();
    if (j.contains("mu_tha")) fl.mu_tha = j.at("mu_tha").get<double>();
    if (j.contains("epsilon_pattern")) fl.epsilon_pattern = j.at("epsilon_pattern").get<double>();
    fl.validate();
    return fl;
}

SecurityBudget budget_from_json(const json& j) {
    SecurityBudget b;
    if (j.contains("eps_EC")) b.eps_EC = j.at("eps_EC").get<double>();
    if (j.contains("eps_bar")) b.eps_bar = j.at("eps_bar").get<double>();
    if (j.contains("eps_F")) b.eps_F = j.at("eps_F").get<double>();
    if (j.contains("eps_prime")) b.eps_prime = j.at("eps_prime").get<double>();
    if (j.contains("eps_tot_target")) b.eps_tot_target = j.at("eps_tot_target").get<double>();
    b.validate();
    return b;
}

ordered_json security_report(const SecurityResult& r) {
    ordered_json out;
    out["n_star"] = r.n_star;
    out["H_n"] = r.H_n;
    out["E_b_y_star"] = r.E_b_y_star;
    out["E_p_star"] = r.E_p_star;
    out["E_p_bar"] = r.E_p_bar;
    out["E_p_bar_l"] = r.E_p_bar_l;
    out["eps_rob"] = r.eps_rob;
    out["eps_rep"] = r.eps_rep;
    out["eps_for"] = r.eps_for;
    out["eps_tot"] = r.eps_tot;
    out["SR_per_run"] = r.SR_per_run;
    out["SR_per_second"] = r.SR_per_second;
    return out;
}

Adversary adversary_from_string(const std::string& s) {
    if (s == "none") return Adversary::kNone;
    if (s == "forge_client" || s == "forge-client") return Adversary::kForgeClient;
    if (s == "forge_tp" || s == "forge-tp") return Adversary::kForgeTp;
    if (s == "repudiate_merchant" || s == "repudiate") return Adversary::kRepudiateMerchant;
    throw std::runtime_error("unknown adversary: " + s);
}

Contract contract_from_json(const json& j) {
    Contract c;
    c.payload = j.at("payload").get<std::string>();
    c.timestamp = j.at("timestamp").get<uint64_t>();
    c.merchant_id = j.at("merchant_id").get<std::string>();
    c.client_id = j.at("client_id").get<std::string>();
    c.price = j.at("price").get<int64_t>();
    return c;
}

// ---------- subcommand bodies ----------

int cmd_gen_irreducible(int n, const std::string& seed_hex, const std::string& out_path) {
    BitString seed = hex_bits(seed_hex, static_cast<size_t>(n));
    Gf2Poly p = gen_irreducible(n, seed);
    ordered_json out;
    out["n"] = n;
    out["seed"] = seed_hex;
    out["irreducible_hex"] = p.to_hex();
    emit(out, out_path);
    return 0;
}

int cmd_sign(const std::string& contract_path, const std::string& keys_path, const std::string& out_path) {
    std::string raw = read_file(contract_path);
    BitString msg = bits_from_bytes(std::vector<uint8_t>(raw.begin(), raw.end()));
    SignatureKeys keys = load_keys(keys_path);
    size_t n = keys.n();
    SignatureTag tag = sign(keys, msg);
    ordered_json out;
    out["n"] = n;
    out["digest"] = bits_to_hex(tag.digest);
    out["tag"] = bits_to_hex(tag.tag);
    emit(out, out_path);
    return 0;
}

int cmd_verify(const std::string& contract_path, const std::string& tag_path, const std::string& keys_path) {
    std::string raw = read_file(contract_path);
    BitString msg = bits_from_bytes(std::vector<uint8_t>(raw.begin(), raw.end()));
    SignatureKeys keys = load_keys(keys_path);
    json tj = read_json(tag_path);
    BitString tag = hex_bits(tj.at("tag").get<std::string>(), keys.n());
    bool ok = verify(keys, msg, tag);
    std::cout << (ok ? "accept" : "reject") << "\n";
    return ok ? 0 : 1;
}

int cmd_cascade(const std::string& a_path, const std::string& b_path, uint64_t seed,
                size_t block_bits, size_t segment_bits, int max_passes, const std::string& out_path) {
    BitString a = load_bit_file(a_path), b = load_bit_file(b_path);
    CascadeConfig cfg;
    cfg.block_bits = block_bits;
    cfg.segment_bits = segment_bits;
    cfg.max_passes = max_passes;
    cfg.permutation_seed = seed;
    CascadeResult r = cascade_reconcile(a, b, cfg);
    ordered_json out;
    out["length"] = a.size();
    out["leaked_bits"] = r.leaked_bits;
    out["checksum_bits"] = r.checksum_bits;
    out["total_leaked"] = r.total_leaked();
    out["passes_used"] = r.passes_used;
    out["residual_mismatch"] = r.residual_mismatch;
    out["transcript_entries"] = r.transcript.size();
    emit(out, out_path);
    return r.residual_mismatch ? 2 : 0;
}

ordered_json summary_report(const DetectionSummary& sum) {
    ordered_json out;
    out["n"] = sum.n;
    out["n_x"] = sum.n_x;
    out["n_y"] = sum.n_y;
    out["m_y"] = sum.m_y;
    out["duration_s"] = sum.duration_s;
    return out;
}

int cmd_kgp_simulate(const std::string& config_path, const std::string& out_path) {
    json j = read_json(config_path);
    KgpConfig cfg;
    cfg.N = j.at("N").get<uint64_t>();
    cfg.seed = j.at("seed").get<uint64_t>();  // mandatory in simulate mode
    if (j.contains("p_x")) cfg.p_x = j.at("p_x").get<double>();
    cfg.intensity = j.at("intensity").get<double>();
    if (j.contains("channel_loss_db")) cfg.channel_loss_db = j.at("channel_loss_db").get<double>();
    if (j.contains("phase_noise_sigma")) cfg.phase_noise_sigma = j.at("phase_noise_sigma").get<double>();
    if (j.contains("eta_d1")) cfg.detector.eta_d1 = j.at("eta_d1").get<double>();
    if (j.contains("eta_d2")) cfg.detector.eta_d2 = j.at("eta_d2").get<double>();
    if (j.contains("p_d1")) cfg.detector.p_d1 = j.at("p_d1").get<double>();
    if (j.contains("p_d2")) cfg.detector.p_d2 = j.at("p_d2").get<double>();
    cfg.validate();
    auto [sum, keys] = kgp_simulate(cfg);
    ordered_json out = summary_report(sum);
    out["E_b_x"] = keys.E_b_x;
    out["E_b_y"] = keys.E_b_y;
    out["empty"] = sum.empty_warning;
    emit(out, out_path);
    return 0;
}

int cmd_kgp_replay(const std::string& table_path, const std::string& out_path) {
    json table = read_json(table_path);
    double duration = table.contains("duration_s") ? table.at("duration_s").get<double>() : 100.0;
    DetectionSummary sum = kgp_replay(table, duration);
    ErrorRates rates = kgp_estimate(sum);
    ordered_json out = summary_report(sum);
    out["E_b_y"] = rates.E_b_y;
    emit(out, out_path);
    return 0;
}

int cmd_security_plan(const std::string& input_path, const std::string& out_path) {
    json j = read_json(input_path);
    OptimizeInput in;
    const json& sum = j.contains("summary") ? j.at("summary") : j;
    in.n_x = sum.at("n_x").get<uint64_t>();
    in.n_y = sum.at("n_y").get<uint64_t>();
    in.m_y = sum.at("m_y").get<uint64_t>();
    in.leak_EC = j.at("leak_EC").get<double>();
    in.m = j.at("m").get<uint64_t>();
    in.duration_s = j.at("duration_s").get<double>();
    if (j.contains("budget")) in.budget = budget_from_json(j.at("budget"));
    if (j.contains("E_p")) {
        in.published_E_p = j.at("E_p").get<double>();
    } else if (j.contains("Delta")) {
        in.Delta = j.at("Delta").get<double>();
    } else if (j.contains("flaws")) {
        SourceFlaws fl = flaws_from_json(j.at("flaws"));
        double alpha_sq = j.at("alpha_sq").get<double>();
        double Q = j.at("Q").get<double>();
        in.Delta = coin_imbalance(fl, alpha_sq, Q);
    } else {
        throw std::runtime_error("security plan: need one of E_p, Delta, or flaws");
    }
    SecurityResult r = optimize_n(in);
    ordered_json out = security_report(r);
    if (in.Delta >= 0.0) out["Delta"] = in.Delta;
    emit(out, out_path);
    return 0;
}

int cmd_charize(const std::string& kind, const std::string& input_path, const std::string& out_path) {
    std::ifstream in(input_path);
    if (!in) throw std::runtime_error("cannot open " + input_path);
    ordered_json out;
    out["kind"] = kind;
    if (kind == "power") {
        out["xi"] = power_fluctuation(read_power_csv(in));
    } else if (kind == "phase") {
        out["delta"] = phase_shift_from_table(read_phase_csv(in));
    } else if (kind == "pattern") {
        PatternDeviation d = pattern_deviation(read_pattern_csv(in));
        out["group_sin_psi"] = d.group_sin_psi;
        out["sin_psi"] = d.sin_psi;
        out["psi"] = d.psi;
    } else if (kind == "polarization") {
        // rows: pair,power_fast,power_slow; worst pair reported as tan_theta
        std::vector<std::string> f;
        double worst = 0.0;
        ordered_json rows = ordered_json::array();
        bool header_skipped = false;
        while (detail::csv_next(in, f)) {
            if (!header_skipped && f.size() >= 1 && f[0] == "pair") {
                header_skipped = true;
                continue;
            }
            if (f.size() != 3) throw std::runtime_error("polarization csv: expected pair,power_fast,power_slow");
            PolarizationRatio r = polarization_ratio(std::stod(f[1]), std::stod(f[2]));
            rows.push_back({{"pair", f[0]}, {"tan_theta", r.tan_theta}, {"extinction_db", r.extinction_db}});
            worst = std::max(worst, r.tan_theta);
        }
        if (rows.empty()) throw std::runtime_error("polarization csv: no rows");
        out["rows"] = rows;
        out["tan_theta"] = worst;
    } else {
        throw std::runtime_error("unknown charize kind: " + kind);
    }
    emit(out, out_path);
    return 0;
}

E2EScenario scenario_from_json(const json& j) {
    E2EScenario sc;
    sc.n = j.at("n").get<size_t>();
    std::string mc = j.at("key_mc_hex").get<std::string>(), mt = j.at("key_mt_hex").get<std::string>();
    sc.key_mc = bits_from_hex(mc, mc.size() * 4);
    sc.key_mt = bits_from_hex(mt, mt.size() * 4);
    sc.contract = contract_from_json(j.at("contract"));
    if (j.contains("adversary")) sc.adversary = adversary_from_string(j.at("adversary").get<std::string>());
    if (j.contains("seed")) sc.seed = j.at("seed").get<uint64_t>();
    if (j.contains("client_agrees")) sc.client_agrees = j.at("client_agrees").get<bool>();
    if (j.contains("channel_failure_prob"))
        sc.channel_failure_prob = j.at("channel_failure_prob").get<double>();
    return sc;
}

int cmd_run_e2e(const std::string& scenario_path, const std::string& out_path) {
    E2EScenario sc = scenario_from_json(read_json(scenario_path));
    Transcript tr = run_e2e(sc);
    emit(transcript_to_json(tr), out_path);
    return tr.outcome == "completed" ? 0 : 2;
}

int cmd_attack(const std::string& kind, uint64_t trials, size_t n, size_t m, uint64_t seed,
               const std::string& out_path) {
    CounterRng root(seed);
    ordered_json out;
    out["kind"] = kind;
    out["trials"] = trials;
    if (kind == "forge-client" || kind == "forge-tp") {
        // tamper-acceptance rate of a one-bit message forgery under fresh
        // uniform keys, against the eps_for = m * 2^(1-n) ideal-key bound
        uint64_t accepted = 0;
        for (uint64_t t = 0; t < trials; ++t) {
            CounterRng r = root.fork(t);
            auto draw = [&](bool nonzero) {
                BitString b(n);
                do {
                    for (auto& x : b) x = static_cast<uint8_t>(r.next_u64() & 1);
                } while (nonzero && all_zero(b));
                return b;
            };
            SignatureKeys keys(draw(true), draw(true), draw(false));
            BitString msg(m);
            for (auto& x : msg) x = static_cast<uint8_t>(r.next_u64() & 1);
            SignatureTag tag = sign(keys, msg);
            msg[r.next_below(static_cast<uint64_t>(m))] ^= 1;
            if (verify(keys, msg, tag.tag)) ++accepted;
        }
        out["accepted_forgeries"] = accepted;
        out["rate"] = trials ? static_cast<double>(accepted) / static_cast<double>(trials) : 0.0;
        out["ideal_bound"] = static_cast<double>(m) * std::pow(2.0, 1.0 - static_cast<double>(n));
    } else if (kind == "repudiate") {
        // verdict symmetry under honest channels: Client and TP always agree
        uint64_t matched = 0;
        for (uint64_t t = 0; t < trials; ++t) {
            CounterRng r = root.fork(t);
            E2EScenario sc;
            sc.n = n;
            sc.key_mc.resize(3 * n);
            sc.key_mt.resize(3 * n);
            for (auto& x : sc.key_mc) x = static_cast<uint8_t>(r.next_u64() & 1);
            for (auto& x : sc.key_mt) x = static_cast<uint8_t>(r.next_u64() & 1);
            sc.contract = {"item", 1756166400 + t, "M", "C", 10};
            sc.adversary = Adversary::kRepudiateMerchant;
            sc.seed = r.next_u64();
            Transcript tr = run_e2e(sc);
            if (tr.client_verdict == tr.tp_verdict) ++matched;
        }
        out["verdicts_matched"] = matched;
        out["rate"] = trials ? static_cast<double>(matched) / static_cast<double>(trials) : 0.0;
    } else {
        throw std::runtime_error("unknown attack kind: " + kind);
    }
    emit(out, out_path);
    return 0;
}

// ---------- pipeline ----------

struct ChannelReport {
    ordered_json json_out;
    BitString corrected_key;
    uint64_t n_star = 0;
};

ChannelReport run_channel(const json& ch, uint64_t m_bits, const SecurityBudget& budget,
                          CounterRng&& rng) {
    ChannelReport rep;
    ordered_json& out = rep.json_out;
    if (ch.contains("name")) out["name"] = ch.at("name").get<std::string>();

    // source characterization (optional, reported alongside the plan)
    if (ch.contains("phase_csv")) {
        std::ifstream in(ch.at("phase_csv").get<std::string>());
        out["flaws"]["delta"] = phase_shift_from_table(read_phase_csv(in));
    }
    if (ch.contains("pattern_csv")) {
        std::ifstream in(ch.at("pattern_csv").get<std::string>());
        out["flaws"]["psi"] = pattern_deviation(read_pattern_csv(in)).psi;
    }
    if (ch.contains("power_csv")) {
        std::ifstream in(ch.at("power_csv").get<std::string>());
        out["flaws"]["xi"] = power_fluctuation(read_power_csv(in));
    }
    if (ch.contains("polarization_db"))
        out["flaws"]["tan_theta"] = std::pow(10.0, ch.at("polarization_db").get<double>() / 10.0);

    // key generation: replay of a measured table, or parametric simulation
    DetectionSummary sum;
    double E_b_x;
    BitString merchant, peer;
    std::string mode = ch.value("mode", "replay");
    if (mode == "replay") {
        json table = read_json(ch.at("table").get<std::string>());
        double duration = table.contains("duration_s") ? table.at("duration_s").get<double>() : 100.0;
        sum = kgp_replay(table, duration);
        E_b_x = ch.at("E_b_x").get<double>();  // published; cells do not resolve X-basis errors
        // synthesize a key pair with the published error rate so the
        // reconciliation and signing stages exercise real bit streams
        merchant.resize(sum.n_x);
        peer.resize(sum.n_x);
        CounterRng kr = rng.fork("keys");
        for (size_t i = 0; i < merchant.size(); ++i) {
            merchant[i] = static_cast<uint8_t>(kr.next_u64() & 1);
            peer[i] = merchant[i] ^ static_cast<uint8_t>(kr.next_double() < E_b_x);
        }
    } else if (mode == "simulate") {
        KgpConfig cfg;
        const json& k = ch.at("kgp");
        cfg.N = k.at("N").get<uint64_t>();
        cfg.intensity = k.at("intensity").get<double>();
        if (k.contains("p_x")) cfg.p_x = k.at("p_x").get<double>();
        if (k.contains("channel_loss_db")) cfg.channel_loss_db = k.at("channel_loss_db").get<double>();
        if (k.contains("phase_noise_sigma")) cfg.phase_noise_sigma = k.at("phase_noise_sigma").get<double>();
        cfg.seed = rng.fork("kgp").next_u64();
        cfg.validate();
        if (cfg.intensity <= 0.0) throw infeasible_error("pipeline: zero intensity produces no key");
        SiftedKeys keys;
        std::tie(sum, keys) = kgp_simulate(cfg);
        if (sum.empty_warning) throw infeasible_error("pipeline: no effective events");
        E_b_x = keys.E_b_x;
        merchant = keys.merchant_bits;
        peer = keys.peer_bits;
    } else {
        throw std::runtime_error("pipeline: mode must be replay or simulate");
    }
    ErrorRates rates = kgp_estimate(sum);
    out["summary"] = summary_report(sum);
    out["E_b_x"] = E_b_x;
    out["E_b_y"] = rates.E_b_y;

    // error correction with exact leakage accounting
    CascadeConfig ccfg;
    ccfg.permutation_seed = rng.fork("cascade").next_u64();
    CascadeResult cas = cascade_reconcile(merchant, peer, ccfg);
    if (cas.residual_mismatch) throw std::runtime_error("pipeline: reconciliation failed");
    out["cascade"] = {{"leaked_bits", cas.leaked_bits},
                      {"checksum_bits", cas.checksum_bits},
                      {"passes_used", cas.passes_used}};
    rep.corrected_key = cas.corrected_peer_key;

    // security plan
    OptimizeInput in;
    in.n_x = sum.n_x;
    in.n_y = sum.n_y;
    in.m_y = sum.m_y;
    in.leak_EC = static_cast<double>(cas.total_leaked());
    in.m = m_bits;
    in.duration_s = sum.duration_s;
    in.budget = budget;
    if (ch.contains("E_p"))
        in.published_E_p = ch.at("E_p").get<double>();
    else if (ch.contains("Delta"))
        in.Delta = ch.at("Delta").get<double>();
    else
        throw std::runtime_error("pipeline: channel needs E_p or Delta");
    SecurityResult sec = optimize_n(in);
    out["security"] = security_report(sec);
    rep.n_star = sec.n_star;
    return rep;
}

int cmd_pipeline(const std::string& config_path, const std::string& out_path) {
    json cfg = read_json(config_path);
    uint64_t seed = cfg.at("seed").get<uint64_t>();
    CounterRng root(seed);
    SecurityBudget budget;
    if (cfg.contains("budget")) budget = budget_from_json(cfg.at("budget"));

    Contract contract;
    uint64_t m_bits;
    if (cfg.contains("contract")) {
        std::string raw = read_file(cfg.at("contract").get<std::string>());
        contract.payload = raw;
        contract.timestamp = cfg.value("timestamp", 0ull);
        contract.merchant_id = cfg.value("merchant_id", "Merchant");
        contract.client_id = cfg.value("client_id", "Client");
        contract.price = cfg.value("price", 0ll);
        m_bits = contract.to_bits().size();
    } else {
        m_bits = cfg.at("message_bits").get<uint64_t>();
    }

    ordered_json report;
    report["seed"] = seed;
    report["message_bits"] = m_bits;
    report["channels"] = ordered_json::array();
    std::vector<ChannelReport> chans;
    size_t idx = 0;
    for (const json& ch : cfg.at("channels")) {
        debug("channel " + std::to_string(idx));
        chans.push_back(run_channel(ch, m_bits, budget, root.fork("channel-" + std::to_string(idx))));
        report["channels"].push_back(chans.back().json_out);
        ++idx;
    }

    int rc = 0;
    if (chans.size() >= 2 && cfg.contains("contract")) {
        // sign the contract over the Merchant-Client and Merchant-TP keys;
        // n must satisfy both plans, so take the larger optimum
        E2EScenario sc;
        sc.key_mc = chans[0].corrected_key;
        sc.key_mt = chans[1].corrected_key;
        sc.n = static_cast<size_t>(std::max(chans[0].n_star, chans[1].n_star));
        sc.contract = contract;
        sc.seed = root.fork("e2e").next_u64();
        if (cfg.contains("adversary"))
            sc.adversary = adversary_from_string(cfg.at("adversary").get<std::string>());
        Transcript tr = run_e2e(sc);
        report["transcript"] = transcript_to_json(tr);
        rc = tr.outcome == "completed" ? 0 : 2;
    }
    emit(report, out_path);
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum e-commerce toolkit"};
    app.require_subcommand(1);

    std::string out_path;

    // gf2 gen-irreducible
    auto* gf2 = app.add_subcommand("gf2", "GF(2) polynomial utilities");
    gf2->require_subcommand(1);
    auto* gen = gf2->add_subcommand("gen-irreducible", "generate an irreducible polynomial from a seed");
    int gen_n = 0;
    std::string gen_seed;
    gen->add_option("--n", gen_n, "degree")->required();
    gen->add_option("--seed", gen_seed, "seed bits, hex")->required();
    gen->add_option("--out", out_path, "output file (default stdout)");

    // sign / verify
    auto* sg = app.add_subcommand("sign", "sign a message file");
    std::string sg_contract, sg_keys, sg_out;
    sg->add_option("--contract", sg_contract)->required();
    sg->add_option("--keys", sg_keys)->required();
    sg->add_option("--out", sg_out)->required();

    auto* vf = app.add_subcommand("verify", "verify a signature tag");
    std::string vf_contract, vf_tag, vf_keys;
    vf->add_option("--contract", vf_contract)->required();
    vf->add_option("--tag", vf_tag)->required();
    vf->add_option("--keys", vf_keys)->required();

    // cascade
    auto* cas = app.add_subcommand("cascade", "reconcile two bit-string files");
    std::string cas_a, cas_b;
    uint64_t cas_seed = 0;
    size_t cas_block = 1ull << 20, cas_segment = 600;
    int cas_passes = 3;
    cas->add_option("--a", cas_a)->required();
    cas->add_option("--b", cas_b)->required();
    cas->add_option("--seed", cas_seed)->required();
    cas->add_option("--block-bits", cas_block);
    cas->add_option("--segment-bits", cas_segment);
    cas->add_option("--max-passes", cas_passes);
    cas->add_option("--out", out_path);

    // kgp
    auto* kgp = app.add_subcommand("kgp", "key generation process");
    kgp->require_subcommand(1);
    auto* ksim = kgp->add_subcommand("simulate", "parametric click-model simulation");
    std::string ksim_config;
    ksim->add_option("--config", ksim_config)->required();
    ksim->add_option("--out", out_path);
    auto* krep = kgp->add_subcommand("replay", "replay a measured detection table");
    std::string krep_table;
    krep->add_option("--table", krep_table)->required();
    krep->add_option("--out", out_path);

    // security plan
    auto* sec = app.add_subcommand("security", "finite-key security calculus");
    sec->require_subcommand(1);
    auto* plan = sec->add_subcommand("plan", "optimize n and report the signature rate");
    std::string plan_input;
    plan->add_option("--input", plan_input)->required();
    plan->add_option("--out", out_path);

    // charize
    auto* chz = app.add_subcommand("charize", "source-flaw characterization");
    std::string chz_kind, chz_input;
    chz->add_option("--kind", chz_kind, "power|phase|polarization|pattern")->required();
    chz->add_option("--input", chz_input)->required();
    chz->add_option("--out", out_path);

    // run-e2e
    auto* e2e = app.add_subcommand("run-e2e", "run the three-party protocol");
    std::string e2e_scenario;
    e2e->add_option("--scenario", e2e_scenario)->required();
    e2e->add_option("--out", out_path);

    // attack
    auto* atk = app.add_subcommand("attack", "adversary Monte-Carlo");
    std::string atk_kind;
    uint64_t atk_trials = 1000, atk_seed = 1;
    size_t atk_n = 16, atk_m = 64;
    atk->add_option("--kind", atk_kind, "forge-client|forge-tp|repudiate")->required();
    atk->add_option("--trials", atk_trials)->required();
    atk->add_option("--n", atk_n);
    atk->add_option("--m", atk_m);
    atk->add_option("--seed", atk_seed);
    atk->add_option("--out", out_path);

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "end-to-end orchestration from a config file");
    std::string pipe_config;
    pipe->add_option("--config", pipe_config)->required();
    pipe->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_irreducible(gen_n, gen_seed, out_path);
        if (sg->parsed()) return cmd_sign(sg_contract, sg_keys, sg_out);
        if (vf->parsed()) return cmd_verify(vf_contract, vf_tag, vf_keys);
        if (cas->parsed())
            return cmd_cascade(cas_a, cas_b, cas_seed, cas_block, cas_segment, cas_passes, out_path);
        if (ksim->parsed()) return cmd_kgp_simulate(ksim_config, out_path);
        if (krep->parsed()) return cmd_kgp_replay(krep_table, out_path);
        if (plan->parsed()) return cmd_security_plan(plan_input, out_path);
        if (chz->parsed()) return cmd_charize(chz_kind, chz_input, out_path);
        if (e2e->parsed()) return cmd_run_e2e(e2e_scenario, out_path);
        if (atk->parsed()) return cmd_attack(atk_kind, atk_trials, atk_n, atk_m, atk_seed, out_path);
        if (pipe->parsed()) return cmd_pipeline(pipe_config, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
