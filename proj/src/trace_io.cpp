#include "eqlab/trace_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "eqlab/errors.hpp"

namespace eqlab::io {

namespace {

void put_f64_le(std::ofstream& f, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    char b[8];
    std::memcpy(b, &u, 8);
    f.write(b, 8);
}

double get_f64_le(std::ifstream& f) {
    char b[8];
    f.read(b, 8);
    std::uint64_t u;
    std::memcpy(&u, b, 8);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for write: " + path);
    f << text;
    if (!f) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return s;
}

void write_trace(const std::string& base_path, const std::vector<cplx>& x,
                 const std::vector<cplx>& y, const TraceSidecar& meta) {
    if (x.size() != y.size()) throw IoError("write_trace: polarization length mismatch");
    std::ofstream f(base_path + ".bin", std::ios::binary);
    if (!f) throw IoError("cannot open for write: " + base_path + ".bin");
    for (std::size_t i = 0; i < x.size(); ++i) {
        put_f64_le(f, x[i].real());
        put_f64_le(f, x[i].imag());
        put_f64_le(f, y[i].real());
        put_f64_le(f, y[i].imag());
    }
    if (!f) throw IoError("write failed: " + base_path + ".bin");
    f.close();

    nlohmann::json j;
    j["sample_rate_hz"] = meta.sample_rate_hz;
    j["symbol_rate_hz"] = meta.symbol_rate_hz;
    j["launch_power_dbm"] = meta.launch_power_dbm;
    j["seed"] = meta.seed;
    j["symbol_rate"] = meta.symbol_rate;
    j["generator_kind"] = meta.generator_kind;
    j["link"] = meta.link_config_json.empty() ? nlohmann::json::object()
                                              : nlohmann::json::parse(meta.link_config_json);
    j["config_hash"] = meta.config_hash;
    j["samples"] = x.size();
    write_text_file(base_path + ".json", j.dump(2) + "\n");
}

Trace read_trace(const std::string& base_path) {
    Trace t;
    auto text = read_text_file(base_path + ".json");
    auto j = nlohmann::json::parse(text);
    t.meta.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    t.meta.symbol_rate_hz = j.at("symbol_rate_hz").get<double>();
    t.meta.launch_power_dbm = j.at("launch_power_dbm").get<double>();
    t.meta.seed = j.at("seed").get<std::uint64_t>();
    t.meta.symbol_rate = j.at("symbol_rate").get<bool>();
    t.meta.generator_kind = j.at("generator_kind").get<std::string>();
    t.meta.link_config_json = j.at("link").dump();
    t.meta.config_hash = j.value("config_hash", "");
    std::uint64_t n = j.at("samples").get<std::uint64_t>();

    std::ifstream f(base_path + ".bin", std::ios::binary);
    if (!f) throw IoError("cannot open: " + base_path + ".bin");
    t.x.resize(n);
    t.y.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        double xr = get_f64_le(f), xi = get_f64_le(f);
        double yr = get_f64_le(f), yi = get_f64_le(f);
        t.x[i] = {xr, xi};
        t.y[i] = {yr, yi};
    }
    if (!f) throw IoError("trace shorter than sidecar claims: " + base_path);
    return t;
}

void save_checkpoint(const std::string& base_path, const nn::Model& model) {
    nlohmann::json j;
    j["arch"] = nlohmann::json::parse(model.arch_json());
    nlohmann::json tensors = nlohmann::json::array();
    for (const auto& t : model.params().manifest()) {
        nlohmann::json e;
        e["name"] = t.name;
        e["shape"] = t.shape;
        e["offset"] = t.offset;
        e["size"] = t.size;
        tensors.push_back(e);
    }
    j["tensors"] = tensors;
    j["param_count"] = model.params().size();
    write_text_file(base_path + ".json", j.dump(2) + "\n");

    std::ofstream f(base_path + ".params", std::ios::binary);
    if (!f) throw IoError("cannot open for write: " + base_path + ".params");
    for (double v : model.params().values()) put_f64_le(f, v);
    if (!f) throw IoError("write failed: " + base_path + ".params");
}

std::unique_ptr<nn::Model> load_checkpoint(const std::string& base_path) {
    auto j = nlohmann::json::parse(read_text_file(base_path + ".json"));
    auto model = nn::model_from_arch_json(j.at("arch").dump());
    std::uint64_t n = j.at("param_count").get<std::uint64_t>();
    if (n != model->params().size()) throw IoError("checkpoint: parameter count mismatch");
    std::ifstream f(base_path + ".params", std::ios::binary);
    if (!f) throw IoError("cannot open: " + base_path + ".params");
    for (std::uint64_t i = 0; i < n; ++i) model->params().values()[i] = get_f64_le(f);
    if (!f) throw IoError("checkpoint blob truncated: " + base_path);
    return model;
}

std::string DatasetManifest::to_json() const {
    nlohmann::json j;
    j["trace_files"] = trace_files;
    j["n_taps"] = n_taps;
    j["cardinality"] = cardinality;
    j["shuffle_seed"] = shuffle_seed;
    j["splits"] = {{"train", {train.begin, train.end}},
                   {"val", {val.begin, val.end}},
                   {"test", {test.begin, test.end}}};
    return j.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    DatasetManifest m;
    m.trace_files = j.at("trace_files").get<std::vector<std::string>>();
    m.n_taps = j.at("n_taps").get<int>();
    m.cardinality = j.at("cardinality").get<int>();
    m.shuffle_seed = j.at("shuffle_seed").get<std::uint64_t>();
    auto range = [&](const char* key) {
        auto arr = j.at("splits").at(key);
        return IndexRange{arr.at(0).get<std::uint64_t>(), arr.at(1).get<std::uint64_t>()};
    };
    m.train = range("train");
    m.val = range("val");
    m.test = range("test");
    return m;
}

// ---- SHA-256 (FIPS 180-4), enough for provenance stamps ----

namespace {
constexpr std::array<std::uint32_t, 64> kK = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }
}  // namespace

std::string sha256_hex(const std::string& text) {
    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::vector<std::uint8_t> msg(text.begin(), text.end());
    std::uint64_t bit_len = static_cast<std::uint64_t>(msg.size()) * 8;
    msg.push_back(0x80);
    while (msg.size() % 64 != 56) msg.push_back(0);
    for (int i = 7; i >= 0; --i) msg.push_back(static_cast<std::uint8_t>((bit_len >> (8 * i)) & 0xff));

    for (std::size_t off = 0; off < msg.size(); off += 64) {
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (static_cast<std::uint32_t>(msg[off + 4 * i]) << 24) |
                   (static_cast<std::uint32_t>(msg[off + 4 * i + 1]) << 16) |
                   (static_cast<std::uint32_t>(msg[off + 4 * i + 2]) << 8) |
                   static_cast<std::uint32_t>(msg[off + 4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int i = 0; i < 64; ++i) {
            std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            std::uint32_t ch = (e & f) ^ (~e & g);
            std::uint32_t t1 = hh + s1 + ch + kK[static_cast<std::size_t>(i)] + w[i];
            std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            std::uint32_t t2 = s0 + maj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        h[5] += f;
        h[6] += g;
        h[7] += hh;
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint32_t v : h)
        for (int i = 7; i >= 0; --i) out.push_back(hex[(v >> (4 * i)) & 0xf]);
    return out;
}

}  // namespace eqlab::io
