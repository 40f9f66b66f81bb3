#pragma once

// Config-driven experiment runner behind the CLI: named experiments, JSON
// run configs, CSV emission with a metadata header, and a worker pool for
// sweep points.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hqec/analysis.hpp"
#include "hqec/code.hpp"
#include "hqec/concat.hpp"
#include "hqec/liouville.hpp"
#include "hqec/metrology.hpp"
#include "hqec/propagate.hpp"

namespace hqec {

inline constexpr const char* kArtifactVersion = "1.0.0";

using Json = nlohmann::json;

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "gamma-grid",     "error-rates",     "decoded-rates",
        "cat-compare",    "concat",          "bath-check",
        "metrology-qcrb", "metrology-snr",   "verify-appendix-b"};
    return names;
}

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    Json metadata;

    void add_row(std::initializer_list<double> vals) {
        std::vector<std::string> r;
        char buf[64];
        for (double v : vals) {
            std::snprintf(buf, sizeof(buf), "%.12g", v);
            r.emplace_back(buf);
        }
        rows.push_back(std::move(r));
    }

    void write_csv(std::ostream& os) const {
        os << "# hqsim result table v" << kArtifactVersion << "\n";
        std::istringstream meta(metadata.dump(2));
        for (std::string line; std::getline(meta, line);) os << "# " << line << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << columns[i] << (i + 1 < columns.size() ? "," : "\n");
        for (const auto& r : rows)
            for (std::size_t i = 0; i < r.size(); ++i)
                os << r[i] << (i + 1 < r.size() ? "," : "\n");
    }
};

struct RunConfig {
    std::string experiment;
    double alpha = 1.0;
    int fock_truncation = 0;  // 0 = default rule
    NoiseParams noise;
    bool have_platform = false;
    std::string platform;
    std::string policy = "mid";
    std::string sweep_axis;
    std::vector<double> sweep_values;
    std::string output_path;
    EvolveOptions integrator;
    int workers = 0;  // 0 = hardware concurrency
    Json raw;         // resolved echo for the metadata block

    // experiment-specific knobs with defaults
    int resolution = 41;
    int distance = 5;
    double g_over_gamma_b = 0.05;
    double gamma_b = 1.0;
    int n_bath = 8;
    int samples = 20;
    double t_window = 1e-3;
    double t_final = -1.0;
    double beta = 0.1;
    double g_prep = 2.0;
    double tau = 1.0;
    int n_max = 3;
};

inline int worker_cap() {
    if (const char* env = std::getenv("HQSIM_MAX_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    return hw > 0 ? hw : 1;
}

namespace detail {

inline double rate_scale_factor(const Json& noise) {
    bool angular = noise.value("angular", false);
    return angular ? 1.0 : 2.0 * std::numbers::pi;
}

inline NoiseParams parse_noise(const Json& j) {
    NoiseParams p;
    double f = rate_scale_factor(j);
    std::string mode = j.value("thermal_mode", "finite_temperature");
    if (mode == "finite_temperature")
        p.thermal_mode = ThermalMode::finite_temperature;
    else if (mode == "classical_field")
        p.thermal_mode = ThermalMode::classical_field;
    else
        throw config_error("unknown thermal_mode '" + mode + "'");
    p.kappa_th = f * j.value("kappa_th", 0.0);
    p.gamma_th = f * j.value("gamma_th", 0.0);
    p.n_th = j.value("n_th", 0.0);  // dimensionless
    p.kappa_n = f * j.value("kappa_n", 0.0);
    p.kappa_sx = f * j.value("kappa_sx", 0.0);
    p.kappa_sz = f * j.value("kappa_sz", 0.0);
    p.kappa_R = f * j.value("kappa_R", 0.0);
    p.validate();
    return p;
}

// Ordered parallel map over sweep values.
template <typename Fn>
inline std::vector<std::vector<std::vector<std::string>>> parallel_rows(
    const std::vector<double>& values, int workers, Fn&& fn) {
    std::vector<std::vector<std::vector<std::string>>> results(values.size());
    int n_workers = std::min<int>(workers, static_cast<int>(values.size()));
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < values.size(); ++i) results[i] = fn(values[i]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_workers);
    for (int w = 0; w < n_workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < values.size(); i = next++)
                    results[i] = fn(values[i]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

inline std::vector<std::string> format_row(std::initializer_list<double> vals) {
    std::vector<std::string> r;
    char buf[64];
    for (double v : vals) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        r.emplace_back(buf);
    }
    return r;
}

}  // namespace detail

inline RunConfig parse_config(const Json& j) {
    RunConfig cfg;
    cfg.raw = j;
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw config_error("config requires an 'experiment' string");
    cfg.experiment = j["experiment"].get<std::string>();

    if (j.contains("code")) {
        cfg.alpha = j["code"].value("alpha", 1.0);
        cfg.fock_truncation = j["code"].value("fock_truncation", 0);
    }
    if (j.contains("noise")) {
        const Json& nj = j["noise"];
        if (nj.contains("platform")) {
            cfg.have_platform = true;
            cfg.platform = nj["platform"].get<std::string>();
            cfg.policy = nj.value("policy", "mid");
            cfg.noise = platform_table(cfg.platform).noise_at(cfg.policy);
        } else {
            cfg.noise = detail::parse_noise(nj);
        }
    }
    if (j.contains("sweep")) {
        cfg.sweep_axis = j["sweep"].value("axis", "");
        if (j["sweep"].contains("values"))
            cfg.sweep_values = j["sweep"]["values"].get<std::vector<double>>();
    }
    cfg.output_path = j.value("output", "");
    if (j.contains("integrator")) {
        const Json& ij = j["integrator"];
        cfg.integrator.rel_tol = ij.value("rel_tol", cfg.integrator.rel_tol);
        cfg.integrator.abs_tol = ij.value("abs_tol", cfg.integrator.abs_tol);
        cfg.integrator.leakage_check =
            ij.value("leakage_check", cfg.integrator.leakage_check);
        std::string engine = ij.value("engine", "automatic");
        if (engine == "rk45")
            cfg.integrator.engine = Engine::rk45;
        else if (engine == "spectral")
            cfg.integrator.engine = Engine::spectral;
        else if (engine == "automatic")
            cfg.integrator.engine = Engine::automatic;
        else
            throw config_error("unknown integrator engine '" + engine + "'");
    }
    cfg.workers = j.value("workers", 0);

    cfg.resolution = j.value("resolution", cfg.resolution);
    cfg.distance = j.value("distance", cfg.distance);
    cfg.g_over_gamma_b = j.value("g_over_gamma_b", cfg.g_over_gamma_b);
    cfg.gamma_b = j.value("gamma_b", cfg.gamma_b);
    cfg.n_bath = j.value("n_bath", cfg.n_bath);
    cfg.samples = j.value("samples", cfg.samples);
    cfg.t_window = j.value("t_window", cfg.t_window);
    cfg.t_final = j.value("t_final", cfg.t_final);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.g_prep = j.value("g_prep", cfg.g_prep);
    cfg.tau = j.value("tau", cfg.tau);
    cfg.n_max = j.value("n_max", cfg.n_max);
    return cfg;
}

// Validation never partially executes; it returns every violation found.
inline std::vector<std::string> validate_config(const Json& j) {
    std::vector<std::string> diags;
    if (!j.contains("experiment") || !j["experiment"].is_string()) {
        diags.push_back("missing 'experiment'");
        return diags;
    }
    std::string exp = j["experiment"].get<std::string>();
    bool known = false;
    for (const auto& name : experiment_names()) known = known || name == exp;
    if (!known) diags.push_back("unknown experiment '" + exp + "'");

    if (j.contains("code")) {
        double alpha = j["code"].value("alpha", 1.0);
        if (alpha <= 0) diags.push_back("code.alpha must be positive");
        int n = j["code"].value("fock_truncation", 0);
        if (n != 0 && n < 2) diags.push_back("code.fock_truncation must be >= 2");
    }
    if (j.contains("noise") && !j["noise"].contains("platform")) {
        for (const char* key :
             {"kappa_th", "gamma_th", "kappa_n", "kappa_sx", "kappa_sz", "kappa_R",
              "n_th"})
            if (j["noise"].value(key, 0.0) < 0.0)
                diags.push_back(std::string("noise.") + key + " must be nonnegative");
    }
    if (j.contains("noise") && j["noise"].contains("platform")) {
        std::string p = j["noise"]["platform"].get<std::string>();
        if (p != "TI" && p != "SC") diags.push_back("unknown platform '" + p + "'");
        std::string policy = j["noise"].value("policy", "mid");
        if (policy != "low" && policy != "mid" && policy != "high")
            diags.push_back("unknown selection policy '" + policy + "'");
    }
    if (j.contains("sweep")) {
        std::string axis = j["sweep"].value("axis", "");
        static const std::vector<std::string> axes = {"alpha", "beta", "t_window"};
        bool ok = false;
        for (const auto& a : axes) ok = ok || a == axis;
        if (!ok) diags.push_back("unrecognized sweep axis '" + axis + "'");
    }
    if (j.contains("distance")) {
        int d = j["distance"].get<int>();
        if (d < 1 || d % 2 == 0)
            diags.push_back("distance must be odd (repetition code requirement)");
    }
    if (j.contains("integrator")) {
        if (j["integrator"].value("rel_tol", 1.0) <= 0)
            diags.push_back("integrator.rel_tol must be positive");
        if (j["integrator"].value("abs_tol", 1.0) <= 0)
            diags.push_back("integrator.abs_tol must be positive");
    }
    return diags;
}

inline ResultTable run_experiment(const RunConfig& cfg) {
    ResultTable table;
    table.metadata["experiment"] = cfg.experiment;
    table.metadata["version"] = kArtifactVersion;
    table.metadata["config"] = cfg.raw;
    int workers = cfg.workers > 0 ? std::min(cfg.workers, worker_cap()) : worker_cap();
    table.metadata["workers"] = workers;

    std::vector<double> sweep = cfg.sweep_values;

    if (cfg.experiment == "gamma-grid") {
        double bmax = 2.0 * cfg.alpha;
        GammaGrid g = gamma_grid(cfg.alpha, -bmax, bmax, -1.0, 1.0, cfg.resolution);
        table.columns = {"beta_r", "sx", "gamma"};
        for (std::size_t i = 0; i < g.beta_r.size(); ++i)
            for (std::size_t k = 0; k < g.sx.size(); ++k)
                table.add_row({g.beta_r[i], g.sx[k], g.values(i, k)});
        return table;
    }

    if (cfg.experiment == "error-rates" || cfg.experiment == "cat-compare" ||
        cfg.experiment == "decoded-rates") {
        if (sweep.empty()) sweep = {cfg.alpha};
        if (cfg.experiment == "error-rates") {
            table.columns = {"alpha", "gamma_x", "gamma_z", "gx_residual",
                             "gz_residual"};
            auto rows = detail::parallel_rows(sweep, workers, [&](double alpha) {
                HybridCode code = make_hybrid_code(alpha, cfg.fock_truncation);
                LogicalRates r = logical_error_rates(code, cfg.noise, cfg.integrator);
                return std::vector<std::vector<std::string>>{detail::format_row(
                    {alpha, r.gamma_x.gamma, r.gamma_z.gamma, r.gamma_x.residual,
                     r.gamma_z.residual})};
            });
            for (auto& rs : rows)
                for (auto& r : rs) table.rows.push_back(std::move(r));
            return table;
        }
        if (cfg.experiment == "cat-compare") {
            table.columns = {"alpha", "hybrid_gamma_x", "hybrid_gamma_z",
                             "cat_gamma_x", "cat_gamma_z"};
            auto rows = detail::parallel_rows(sweep, workers, [&](double alpha) {
                HybridCode code = make_hybrid_code(alpha, cfg.fock_truncation);
                CatCode cat = make_cat_code(alpha, cfg.fock_truncation);
                LogicalRates h = logical_error_rates(code, cfg.noise, cfg.integrator);
                LogicalRates c = cat_error_rates(cat, cfg.noise, cfg.integrator);
                return std::vector<std::vector<std::string>>{detail::format_row(
                    {alpha, h.gamma_x.gamma, h.gamma_z.gamma, c.gamma_x.gamma,
                     c.gamma_z.gamma})};
            });
            for (auto& rs : rows)
                for (auto& r : rs) table.rows.push_back(std::move(r));
            return table;
        }
        table.columns = {"alpha", "gamma_z_raw", "gamma_z_decoded",
                         "raw_error_at_T", "decoded_error_at_T"};
        auto rows = detail::parallel_rows(sweep, workers, [&](double alpha) {
            HybridCode code = make_hybrid_code(alpha, cfg.fock_truncation);
            LogicalRates r = logical_error_rates(code, cfg.noise, cfg.integrator);
            DecodedPhase d = decoded_phase_rates(code, cfg.noise, cfg.integrator);
            return std::vector<std::vector<std::string>>{detail::format_row(
                {alpha, r.gamma_z.gamma, d.gamma_z_decoded.gamma,
                 d.raw_error.back(), d.decoded_error.back()})};
        });
        for (auto& rs : rows)
            for (auto& r : rs) table.rows.push_back(std::move(r));
        return table;
    }

    if (cfg.experiment == "concat") {
        if (sweep.empty()) sweep = {1.0, 1.5, 2.0};
        if (!cfg.have_platform)
            throw config_error("concat requires a platform preset in 'noise'");
        PlatformPreset preset = platform_table(cfg.platform);
        table.columns = {"alpha", "gamma_x", "gamma_z", "q_x", "q_z", "P_X", "P_Z"};
        auto rows = detail::parallel_rows(sweep, workers, [&](double alpha) {
            auto out = concat_sweep(preset, {alpha}, cfg.distance, cfg.policy,
                                    cfg.integrator);
            const ConcatRow& r = out.front();
            return std::vector<std::vector<std::string>>{detail::format_row(
                {r.alpha, r.gamma_x, r.gamma_z, r.q_x, r.q_z, r.p_x, r.p_z})};
        });
        for (auto& rs : rows)
            for (auto& r : rs) table.rows.push_back(std::move(r));
        return table;
    }

    if (cfg.experiment == "bath-check") {
        BathParams bath;
        bath.gamma_b = cfg.gamma_b;
        bath.g = cfg.g_over_gamma_b * cfg.gamma_b;
        bath.n_bath = cfg.n_bath;
        double kappa_r = bath.effective_kappa_r();
        double t_final = cfg.t_final > 0 ? cfg.t_final : 5.0 / kappa_r;
        HybridCode code = make_hybrid_code(cfg.alpha, cfg.fock_truncation);
        DensityMatrix rho0 = DensityMatrix::pure(
            (embed(pauli(Axis::z), code.space, 0) * code.logical_plus).normalized());
        AdiabaticComparison cmp = adiabatic_elimination_compare(
            cfg.alpha, bath, rho0, t_final, cfg.samples, cfg.integrator);
        table.metadata["regime_warning"] = cmp.regime_warning;
        table.metadata["kappa_R"] = kappa_r;
        table.columns = {"t", "trace_distance"};
        for (std::size_t i = 0; i < cmp.series.times.size(); ++i)
            table.add_row({cmp.series.times[i], cmp.series.values[i][0].real()});
        return table;
    }

    if (cfg.experiment == "metrology-qcrb") {
        if (sweep.empty()) sweep = {cfg.alpha};
        bool sweep_window = cfg.sweep_axis == "t_window";
        table.columns = {sweep_window ? "t_window" : "alpha", "qcrb_bare",
                         "qcrb_autoqec", "sub_sql_bare", "sub_sql_autoqec"};
        auto rows = detail::parallel_rows(sweep, workers, [&](double v) {
            double alpha = sweep_window ? cfg.alpha : v;
            double window = sweep_window ? v : cfg.t_window;
            HybridCode code = make_hybrid_code(alpha, cfg.fock_truncation);
            SensingScenario sc;
            sc.noise = cfg.noise;
            sc.t_window = window;
            sc.recovery_on = false;
            double bare = idle_then_qcrb(code, sc, cfg.integrator);
            sc.recovery_on = true;
            double prot = idle_then_qcrb(code, sc, cfg.integrator);
            return std::vector<std::vector<std::string>>{detail::format_row(
                {v, bare, prot, bare < 0.25 ? 1.0 : 0.0, prot < 0.25 ? 1.0 : 0.0})};
        });
        for (auto& rs : rows)
            for (auto& r : rs) table.rows.push_back(std::move(r));
        return table;
    }

    if (cfg.experiment == "metrology-snr") {
        if (sweep.empty()) sweep = {cfg.beta};
        RamseyConfig rc{cfg.g_prep, cfg.tau};
        table.columns = {"beta", "snr", "tan_4_alpha_beta"};
        auto rows = detail::parallel_rows(sweep, workers, [&](double beta) {
            double snr = ramsey_snr(rc, beta);
            return std::vector<std::vector<std::string>>{detail::format_row(
                {beta, snr, std::tan(4.0 * rc.alpha() * beta)})};
        });
        for (auto& rs : rows)
            for (auto& r : rs) table.rows.push_back(std::move(r));
        return table;
    }

    if (cfg.experiment == "verify-appendix-b") {
        IdentityReport rep = jump_action_check(cfg.alpha, cfg.n_max);
        // R² = α² − â² on a matching space
        int n = default_truncation(cfg.alpha) + cfg.n_max + 2;
        SpaceLabel space = SpaceLabel::spin_fock(n);
        Operator r = recovery_jump(cfg.alpha, space);
        Operator a2 = embed(fock_destroy(n) * fock_destroy(n), space, 1);
        double r2_res = ((r * r).matrix() -
                         (cfg.alpha * cfg.alpha * Matrix::Identity(2 * n, 2 * n) -
                          a2.matrix()))
                            .cwiseAbs()
                            .maxCoeff();
        double ortho = std::max(
            jump_basis_orthonormality_defect(cfg.alpha, JumpDirection::forward,
                                             cfg.n_max, n),
            jump_basis_orthonormality_defect(cfg.alpha, JumpDirection::backward,
                                             cfg.n_max, n));
        double compl_fwd =
            jump_basis_completeness_defect(cfg.alpha, JumpDirection::forward, n);
        table.columns = {"check", "residual"};
        char buf[64];
        auto push = [&](const std::string& name, double v) {
            std::snprintf(buf, sizeof(buf), "%.12g", v);
            table.rows.push_back({name, buf});
        };
        for (const auto& e : rep.entries) push(e.name, e.max_residual);
        push("R^2 = alpha^2 - a^2", r2_res);
        push("basis orthonormality", ortho);
        push("basis completeness", compl_fwd);
        return table;
    }

    throw config_error("unknown experiment '" + cfg.experiment + "'");
}

inline void write_result(const ResultTable& table, const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream oss;
        table.write_csv(oss);
        std::fputs(oss.str().c_str(), stdout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw error("cannot open output file '" + path + "'");
    table.write_csv(os);
}

}  // namespace hqec
