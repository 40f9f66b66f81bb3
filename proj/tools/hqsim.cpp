// hqsim: run, validate, and enumerate the built-in simulation experiments.
//
// Exit codes: 0 success, 1 usage, 2 config error, 3 numerical failure,
// 4 truncation leakage.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hqec/experiments.hpp"

namespace {

hqec::Json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw hqec::config_error("cannot open config file '" + path + "'");
    hqec::Json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw hqec::config_error(std::string("config parse failure: ") + e.what());
    }
    return j;
}

// key=value overrides with dotted paths, e.g. noise.kappa_R=0.5
void apply_override(hqec::Json& j, const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw hqec::config_error("override '" + spec + "' is not key=value");
    std::string path = spec.substr(0, eq);
    std::string val = spec.substr(eq + 1);
    hqec::Json* node = &j;
    std::size_t pos = 0;
    while (true) {
        std::size_t dot = path.find('.', pos);
        std::string key = path.substr(pos, dot - pos);
        if (key.empty()) throw hqec::config_error("bad override path '" + path + "'");
        if (dot == std::string::npos) {
            try {
                (*node)[key] = hqec::Json::parse(val);
            } catch (...) {
                (*node)[key] = val;  // bare strings
            }
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-oscillator autonomous error correction simulator"};
    app.require_subcommand(1);

    std::string config_path, output_path;
    int workers = 0;
    std::vector<std::string> overrides;

    auto* run = app.add_subcommand("run", "execute a run config");
    run->add_option("config", config_path, "JSON run config")->required();
    run->add_option("--output", output_path, "output CSV path (default: stdout)");
    run->add_option("--workers", workers, "cap on worker threads");
    run->add_option("--override", overrides, "key=value config overrides");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a run config");
    validate->add_option("config", validate_path, "JSON run config")->required();

    auto* list = app.add_subcommand("list-experiments", "list experiment names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (list->parsed()) {
            for (const auto& name : hqec::experiment_names())
                std::cout << name << "\n";
            return 0;
        }
        if (validate->parsed()) {
            hqec::Json j = load_json(validate_path);
            auto diags = hqec::validate_config(j);
            if (diags.empty()) {
                std::cout << "ok\n";
                return 0;
            }
            for (const auto& d : diags) std::cerr << "config: " << d << "\n";
            return 2;
        }
        hqec::Json j = load_json(config_path);
        for (const auto& o : overrides) apply_override(j, o);
        auto diags = hqec::validate_config(j);
        if (!diags.empty()) {
            for (const auto& d : diags) std::cerr << "config: " << d << "\n";
            return 2;
        }
        hqec::RunConfig cfg = hqec::parse_config(j);
        if (workers > 0) cfg.workers = workers;
        if (!output_path.empty()) cfg.output_path = output_path;
        hqec::ResultTable table = hqec::run_experiment(cfg);
        hqec::write_result(table, cfg.output_path);
        return 0;
    } catch (const hqec::config_error& e) {
        std::cerr << "config: " << e.what() << "\n";
        return 2;
    } catch (const hqec::leakage_error& e) {
        std::cerr << "leakage: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
