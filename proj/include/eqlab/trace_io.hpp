#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "eqlab/nn.hpp"

namespace eqlab::io {

using cplx = std::complex<double>;

// Dual-polarization sample container: little-endian float64 quadruples
// (Re Ex, Im Ex, Re Ey, Im Ey) per sample in <base>.bin, metadata in the
// <base>.json sidecar. Symbol-rate sequences reuse the container with
// symbol_rate=true in the sidecar.
struct TraceSidecar {
    double sample_rate_hz = 0.0;
    double symbol_rate_hz = 0.0;
    double launch_power_dbm = 0.0;
    std::uint64_t seed = 0;
    bool symbol_rate = false;
    std::string generator_kind;  // e.g. "mersenne_twister", "prbs_lfsr_16"
    std::string link_config_json;  // embedded object, "{}" when absent
    std::string config_hash;
};

void write_trace(const std::string& base_path, const std::vector<cplx>& x,
                 const std::vector<cplx>& y, const TraceSidecar& meta);

struct Trace {
    std::vector<cplx> x, y;
    TraceSidecar meta;
};
Trace read_trace(const std::string& base_path);

// Model checkpoint: <base>.json carries the architecture descriptor plus the
// tensor manifest (name, shape, offset), <base>.params holds the raw
// little-endian float64 parameter blob.
void save_checkpoint(const std::string& base_path, const nn::Model& model);
std::unique_ptr<nn::Model> load_checkpoint(const std::string& base_path);

// Dataset manifest: trace file list, window size, split index ranges,
// seeds, constellation cardinality.
struct IndexRange {
    std::uint64_t begin = 0, end = 0;  // half-open record range
};
struct DatasetManifest {
    std::vector<std::string> trace_files;  // base paths
    int n_taps = 25;
    int cardinality = 16;
    std::uint64_t shuffle_seed = 0;
    IndexRange train, val, test;

    std::string to_json() const;
    static DatasetManifest from_json(const std::string& text);
};

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// SHA-256 of a string, hex-encoded; used for config provenance stamps.
std::string sha256_hex(const std::string& text);

}  // namespace eqlab::io
