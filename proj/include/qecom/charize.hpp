#pragma once

#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "security.hpp"

namespace qecom {

struct insufficient_statistics : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// max |P - mean| / mean over the window, after dBm -> linear conversion
inline double power_fluctuation(const std::vector<double>& series_dbm) {
    if (series_dbm.size() < 2) throw std::invalid_argument("power_fluctuation: need >= 2 samples");
    std::vector<double> lin(series_dbm.size());
    double mean = 0.0;
    for (size_t i = 0; i < lin.size(); ++i) {
        lin[i] = std::pow(10.0, series_dbm[i] / 10.0);
        mean += lin[i];
    }
    mean /= static_cast<double>(lin.size());
    double worst = 0.0;
    for (double p : lin) worst = std::max(worst, std::abs(p - mean) / mean);
    return worst;
}

struct PhaseShiftRecord {
    double phi = 0.0;           // nominal phase: 0, pi/2, pi or 3pi/2
    double D1 = 0.0, D2 = 0.0;  // clicks at this phase
    double D1_0 = 0.0, D2_0 = 0.0;  // reference clicks at phi = 0
    double eta_d1 = 0.844, eta_d2 = 0.855;
    double eps = 1e-10;  // Hoeffding failure probability
};

namespace detail {

inline double hoeffding_shift(double D, double eps) { return std::sqrt(D / 2.0 * std::log(1.0 / eps)); }

}  // namespace detail

// Upper bound on the phase-modulation deviation at one nominal phase:
// delta_bar = max over the two bracketings of
// |phi_0 - 2 atan sqrt(((D2 +- h)/eta2 - (D2_0 -+ h0)/eta2) /
//                     ((D1 -+ h)/eta1 - (D2_0 +- h0)/eta1))|
// with phi_0 = phi for phi <= pi and phi - pi above.
inline double phase_shift_bound(const PhaseShiftRecord& rec) {
    constexpr double kPi = 3.14159265358979323846;
    if (rec.phi <= 0.0 || rec.phi > 2 * kPi) throw std::invalid_argument("phase_shift_bound: phi must be in (0, 2*pi]");
    double phi0 = rec.phi <= kPi ? rec.phi : rec.phi - kPi;
    double h1 = detail::hoeffding_shift(rec.D1, rec.eps);
    double h2 = detail::hoeffding_shift(rec.D2, rec.eps);
    double h20 = detail::hoeffding_shift(rec.D2_0, rec.eps);
    double D1u = rec.D1 + h1, D1l = rec.D1 - h1;
    double D2u = rec.D2 + h2, D2l = rec.D2 - h2;
    double D20u = rec.D2_0 + h20, D20l = rec.D2_0 - h20;

    auto branch = [&](double num, double den) {
        if (den <= 0.0 || num < 0.0)
            throw insufficient_statistics("phase_shift_bound: fluctuation bound turned a count negative");
        return std::abs(phi0 - 2.0 * std::atan(std::sqrt(num / den)));
    };
    double b1 = branch((D2u - D20l) / rec.eta_d2, (D1l - D20u) / rec.eta_d1);
    double b2 = branch((D2l - D20u) / rec.eta_d2, (D1u - D20l) / rec.eta_d1);
    return std::max(b1, b2);
}

// sixteen counts, counts[j][k] = clicks for pattern S_{j+1} -> S_{k+1}
struct PatternTable {
    std::array<std::array<double, 4>, 4> counts{};
};

struct PatternDeviation {
    std::array<double, 4> group_sin_psi{};  // per current-symbol group
    double sin_psi = 0.0;                   // max over groups
    double psi = 0.0;                       // arcsin(sin_psi)
};

// Per current-symbol group: max |count - group mean| / group mean.
inline PatternDeviation pattern_deviation(const PatternTable& table) {
    PatternDeviation out;
    for (int k = 0; k < 4; ++k) {
        double mean = 0.0;
        for (int j = 0; j < 4; ++j) mean += table.counts[static_cast<size_t>(j)][static_cast<size_t>(k)];
        mean /= 4.0;
        if (mean <= 0.0) throw std::invalid_argument("pattern_deviation: zero group mean");
        double dev = 0.0;
        for (int j = 0; j < 4; ++j)
            dev = std::max(dev, std::abs(table.counts[static_cast<size_t>(j)][static_cast<size_t>(k)] - mean) / mean);
        out.group_sin_psi[static_cast<size_t>(k)] = dev;
        out.sin_psi = std::max(out.sin_psi, dev);
    }
    out.psi = std::asin(out.sin_psi);
    return out;
}

struct PolarizationRatio {
    double tan_theta;
    double extinction_db;
};

// tan(theta) = fast/slow power ratio; a -30 dB extinction reading maps
// directly to 10^-3, so the dB value converts as 10^(dB/10).
inline PolarizationRatio polarization_ratio(double power_fast, double power_slow) {
    if (!(power_fast > 0.0 && power_slow > 0.0))
        throw std::invalid_argument("polarization_ratio: powers must be > 0");
    double ratio = power_fast / power_slow;
    return {ratio, 10.0 * std::log10(ratio)};
}

// ---------- CSV ingestion ----------

namespace detail {

inline std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) {
        size_t b = f.find_first_not_of(" \t\r");
        size_t e = f.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : f.substr(b, e - b + 1));
    }
    return out;
}

inline bool csv_next(std::istream& in, std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        fields = csv_fields(line);
        if (!fields.empty()) return true;
    }
    return false;
}

}  // namespace detail

// one dBm sample per line (or per comma-separated field)
inline std::vector<double> read_power_csv(std::istream& in) {
    std::vector<double> out;
    std::vector<std::string> f;
    while (detail::csv_next(in, f))
        for (const auto& s : f)
            if (!s.empty()) out.push_back(std::stod(s));
    return out;
}

// rows: phi,D1,D2 with phi in {0, pi/2, pi, 3pi/2}; the phi=0 row supplies
// the reference counts
struct PhaseShiftTable {
    std::map<std::string, std::pair<double, double>> rows;  // label -> (D1, D2)
};

inline PhaseShiftTable read_phase_csv(std::istream& in) {
    PhaseShiftTable t;
    std::vector<std::string> f;
    bool header_skipped = false;
    while (detail::csv_next(in, f)) {
        if (!header_skipped && f[0] == "phi") {
            header_skipped = true;
            continue;
        }
        if (f.size() != 3) throw std::invalid_argument("phase csv: expected phi,D1,D2");
        t.rows[f[0]] = {std::stod(f[1]), std::stod(f[2])};
    }
    return t;
}

// the delta for one participant pair: the bound for the key-encoding phase pi
// against the phi=0 reference. The pi/2 and 3pi/2 rows mix in detector-balance
// effects that this bound would over-attribute to phase, and those phases only
// enter the test basis, not the key encoding.
inline double phase_shift_from_table(const PhaseShiftTable& t, double eta_d1 = 0.844,
                                     double eta_d2 = 0.855, double eps = 1e-10) {
    constexpr double kPi = 3.14159265358979323846;
    auto ref = t.rows.find("0");
    if (ref == t.rows.end()) throw std::invalid_argument("phase table: missing phi=0 reference row");
    auto it = t.rows.find("pi");
    if (it == t.rows.end()) throw std::invalid_argument("phase table: missing phi=pi row");
    PhaseShiftRecord rec;
    rec.phi = kPi;
    rec.D1 = it->second.first;
    rec.D2 = it->second.second;
    rec.D1_0 = ref->second.first;
    rec.D2_0 = ref->second.second;
    rec.eta_d1 = eta_d1;
    rec.eta_d2 = eta_d2;
    rec.eps = eps;
    return phase_shift_bound(rec);
}

// rows: prev,cur,count with symbols S1..S4
inline PatternTable read_pattern_csv(std::istream& in) {
    PatternTable t;
    std::array<std::array<bool, 4>, 4> seen{};
    std::vector<std::string> f;
    auto sym = [](const std::string& s) {
        if (s.size() == 2 && s[0] == 'S' && s[1] >= '1' && s[1] <= '4') return s[1] - '1';
        throw std::invalid_argument("pattern csv: bad symbol " + s);
    };
    bool header_skipped = false;
    while (detail::csv_next(in, f)) {
        if (!header_skipped && f[0] == "prev") {
            header_skipped = true;
            continue;
        }
        if (f.size() != 3) throw std::invalid_argument("pattern csv: expected prev,cur,count");
        int j = sym(f[0]), k = sym(f[1]);
        t.counts[static_cast<size_t>(j)][static_cast<size_t>(k)] = std::stod(f[2]);
        seen[static_cast<size_t>(j)][static_cast<size_t>(k)] = true;
    }
    for (auto& row : seen)
        for (bool s : row)
            if (!s) throw std::invalid_argument("pattern csv: table must have all sixteen entries");
    return t;
}

}  // namespace qecom
