// Command-line front end. All processing goes through the eqlab C API; this
// file only handles argument parsing, config loading and seed overrides.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eqlab/capi.h"

namespace {

int run_stage(const std::string& stage, const std::string& config_text, const std::string& out_dir) {
    eqlab_session* session = eqlab_session_new();
    if (!session) {
        std::cerr << "eqlab: cannot create session\n";
        return 2;
    }
    eqlab_status st;
    if (stage == "simulate")
        st = eqlab_simulate(session, config_text.c_str(), out_dir.c_str());
    else if (stage == "train")
        st = eqlab_train(session, config_text.c_str(), out_dir.c_str());
    else if (stage == "evaluate")
        st = eqlab_evaluate(session, config_text.c_str(), out_dir.c_str());
    else if (stage == "audit")
        st = eqlab_audit(session, config_text.c_str(), out_dir.c_str());
    else if (stage == "complexity")
        st = eqlab_complexity(session, config_text.c_str(), out_dir.c_str());
    else
        st = eqlab_report(session, config_text.c_str(), out_dir.c_str());

    int rc = 0;
    if (st != EQLAB_OK) {
        std::cerr << "eqlab " << stage << ": " << eqlab_session_error(session) << "\n";
        rc = (st == EQLAB_ERR_CONFIG) ? 1 : 2;
    }
    eqlab_session_free(session);
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eqlab: coherent optical link + neural equalizer laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::vector<std::string> seed_overrides;
    bool deterministic = true;

    const std::vector<std::string> stages = {"simulate", "train",      "evaluate",
                                             "audit",    "complexity", "report"};
    std::map<std::string, CLI::App*> subs;
    for (const auto& s : stages) {
        auto* sub = app.add_subcommand(s);
        sub->add_option("--config", config_path, "experiment config JSON")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed-override", seed_overrides,
                        "override a seed, e.g. --seed-override data=42");
        sub->add_flag("--deterministic,!--no-deterministic", deterministic,
                      "deterministic mode (default on)");
        subs[s] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    std::string stage;
    for (const auto& s : stages)
        if (subs[s]->parsed()) stage = s;

    std::ifstream f(config_path);
    if (!f) {
        std::cerr << "eqlab: cannot open config: " << config_path << "\n";
        return 1;
    }
    std::stringstream buf;
    buf << f.rdbuf();

    nlohmann::json config;
    try {
        config = nlohmann::json::parse(buf.str());
    } catch (const std::exception& e) {
        std::cerr << "eqlab: config is not valid JSON: " << e.what() << "\n";
        return 1;
    }

    for (const auto& ov : seed_overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) {
            std::cerr << "eqlab: bad --seed-override '" << ov << "' (want key=value)\n";
            return 1;
        }
        std::string key = ov.substr(0, eq);
        std::uint64_t value;
        try {
            value = std::stoull(ov.substr(eq + 1));
        } catch (...) {
            std::cerr << "eqlab: bad --seed-override value in '" << ov << "'\n";
            return 1;
        }
        if (!config.contains("seeds") || !config["seeds"].contains(key)) {
            std::cerr << "eqlab: no seed named '" << key << "' in config\n";
            return 1;
        }
        config["seeds"][key] = value;
    }
    config["deterministic"] = deterministic;

    return run_stage(stage, config.dump(), out_dir);
}
