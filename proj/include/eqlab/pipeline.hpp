#pragma once

#include <string>

namespace eqlab::pipeline {

// Config-driven pipeline stages. Each takes the experiment config as a JSON
// string (strictly validated: unknown keys are rejected) and a writable
// output directory. ConfigError signals a bad config; other eqlab errors
// signal runtime failures. Every artifact written carries the config hash.
void run_simulate(const std::string& config_json, const std::string& out_dir);
void run_train(const std::string& config_json, const std::string& out_dir);
void run_evaluate(const std::string& config_json, const std::string& out_dir);
void run_audit(const std::string& config_json, const std::string& out_dir);
void run_complexity(const std::string& config_json, const std::string& out_dir);
void run_report(const std::string& config_json, const std::string& out_dir);

// Canonical (key-sorted) SHA-256 of a config document.
std::string config_hash(const std::string& config_json);

}  // namespace eqlab::pipeline
