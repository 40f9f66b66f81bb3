#pragma once

// Repetition-code concatenation calculator with platform parameter presets
// and rate-to-probability conversion per correction round.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hqec/code.hpp"
#include "hqec/liouville.hpp"

namespace hqec {

struct RepetitionSpec {
    int d = 5;             // odd code distance
    double t_corr = 0.0;   // duration of one error-correction round

    void validate() const {
        if (d < 1 || d % 2 == 0) throw config_error("repetition distance must be odd");
        if (t_corr <= 0.0) throw config_error("t_corr must be positive");
    }
};

// q = (1 − e^{−2γ t_corr}) / 2, the flip probability accumulated per round.
inline double rate_to_round_prob(double gamma, double t_corr) {
    if (gamma < 0.0 || t_corr < 0.0)
        throw config_error("rate_to_round_prob: negative input");
    return 0.5 * (1.0 - std::exp(-2.0 * gamma * t_corr));
}

inline double round_prob_to_rate(double q, double t_corr) {
    if (q < 0.0 || q >= 0.5 || t_corr <= 0.0)
        throw config_error("round_prob_to_rate: invalid input");
    return -std::log(1.0 - 2.0 * q) / (2.0 * t_corr);
}

// Distance-d phase-repetition code:
//   P_Z = (1 − (1 − 2 q_Z)^d) / 2
//   P_X = Σ_{k ≥ (d+1)/2} C(d,k) q_X^k (1 − q_X)^{d−k}
inline std::pair<double, double> repetition_probs(double q_x, double q_z, int d) {
    if (d < 1 || d % 2 == 0) throw config_error("repetition distance must be odd");
    if (q_x < 0.0 || q_x > 0.5 || q_z < 0.0 || q_z > 0.5)
        throw config_error("round probabilities must lie in [0, 0.5]");
    double p_z = 0.5 * (1.0 - std::pow(1.0 - 2.0 * q_z, d));
    double p_x = 0.0;
    double binom = 1.0;
    // walk C(d,k) upward; start at k = (d+1)/2
    int k0 = (d + 1) / 2;
    for (int k = 1; k <= k0; ++k) binom = binom * double(d - k + 1) / double(k);
    for (int k = k0; k <= d; ++k) {
        p_x += binom * std::pow(q_x, k) * std::pow(1.0 - q_x, d - k);
        binom = binom * double(d - k) / double(k + 1);
    }
    return {p_x, p_z};
}

// ---- platform presets ---------------------------------------------------

struct RateRange {
    double low = 0.0;
    double high = 0.0;

    double pick(const std::string& policy) const {
        if (policy == "low") return low;
        if (policy == "high") return high;
        if (policy == "mid") return std::sqrt(low * high);  // geometric mean
        throw config_error("unknown selection policy '" + policy + "'");
    }
};

struct PlatformPreset {
    std::string name;  // "TI" or "SC"
    ThermalMode thermal_mode;
    double n_th = 0.0;        // finite-temperature mode only
    RateRange thermal;        // γ_th (TI) or κ_th (SC), angular units
    RateRange kappa_n;
    RateRange kappa_sx;
    RateRange kappa_sz;
    RateRange g;
    double gamma_b = 0.0;
    double t_corr = 0.0;

    NoiseParams noise_at(const std::string& policy) const {
        NoiseParams p;
        p.thermal_mode = thermal_mode;
        if (thermal_mode == ThermalMode::classical_field) {
            p.gamma_th = thermal.pick(policy);
        } else {
            p.kappa_th = thermal.pick(policy);
            p.n_th = n_th;
        }
        p.kappa_n = kappa_n.pick(policy);
        p.kappa_sx = kappa_sx.pick(policy);
        p.kappa_sz = kappa_sz.pick(policy);
        p.kappa_R = 4.0 * std::pow(g.pick(policy), 2) / gamma_b;
        return p;
    }
};

// Stored rates are angular: 2π × the tabulated Hz values.
inline PlatformPreset platform_table(const std::string& name) {
    constexpr double tau = 2.0 * std::numbers::pi;
    if (name == "TI") {
        PlatformPreset p;
        p.name = "TI";
        p.thermal_mode = ThermalMode::classical_field;
        p.thermal = {tau * 0.014, tau * 4.7};
        p.kappa_n = {tau * 1.6, tau * 4.0};
        p.kappa_sx = {tau * 0.003, tau * 0.03};   // table gives only "< 0.03 Hz"
        p.kappa_sz = {tau * 0.027, tau * 0.27};   // table gives only "< 0.27 Hz"
        p.g = {tau * 0.31e3, tau * 0.87e3};
        p.gamma_b = tau * 13.4e3;
        p.t_corr = 1e-3;
        return p;
    }
    if (name == "SC") {
        PlatformPreset p;
        p.name = "SC";
        p.thermal_mode = ThermalMode::finite_temperature;
        p.n_th = 1e-3;
        p.thermal = {tau * 2.1e3, tau * 2.3e3};
        p.kappa_n = {tau * 0.37e3, tau * 0.73e3};
        p.kappa_sx = {tau * 0.25e3, tau * 0.95e3};
        p.kappa_sz = {tau * 0.08e3, tau * 1.6e3};
        p.g = {tau * 0.3e6, tau * 60e6};
        p.gamma_b = tau * 10.7e6;
        p.t_corr = 1e-6;
        return p;
    }
    throw config_error("unknown platform '" + name + "' (expected TI or SC)");
}

// ---- concatenation sweep -------------------------------------------------

struct ConcatRow {
    double alpha;
    double gamma_x;
    double gamma_z;
    double q_x;
    double q_z;
    double p_x;
    double p_z;
};

// For each α: simulate physical logical rates under AutoQEC, convert to
// per-round probabilities with the platform t_corr, and apply the
// repetition-code combinatorics.
inline std::vector<ConcatRow> concat_sweep(const PlatformPreset& preset,
                                           const std::vector<double>& alpha_values,
                                           int d, const std::string& policy = "mid",
                                           const EvolveOptions& opts = {},
                                           double kappa_r_override = -1.0) {
    RepetitionSpec spec{d, preset.t_corr};
    spec.validate();
    NoiseParams noise = preset.noise_at(policy);
    if (kappa_r_override >= 0.0) noise.kappa_R = kappa_r_override;

    std::vector<ConcatRow> rows;
    for (double alpha : alpha_values) {
        HybridCode code = make_hybrid_code(alpha);
        LogicalRates rates = logical_error_rates(code, noise, opts);
        double q_x = rate_to_round_prob(rates.gamma_x.gamma, preset.t_corr);
        double q_z = rate_to_round_prob(rates.gamma_z.gamma, preset.t_corr);
        auto [p_x, p_z] = repetition_probs(q_x, q_z, d);
        rows.push_back({alpha, rates.gamma_x.gamma, rates.gamma_z.gamma, q_x, q_z,
                        p_x, p_z});
    }
    return rows;
}

}  // namespace hqec
