#include "rabi/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "rabi/format.hpp"

namespace rabi {

namespace {

void put(std::ostream& out, double v) { out << ',' << format_real(v); }

void put(std::ostream& out, const std::optional<double>& v) {
    out << ',';
    if (v)
        out << format_real(*v);
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    out << kSweepHeader << '\n';
    for (const auto& rec : records) {
        for (std::size_t k = 0; k < rec.levels.size(); ++k) {
            const StateObservables& obs = rec.levels[k];
            out << format_real(rec.g);
            put(out, rec.g_over_gc);
            out << ',' << k;
            put(out, obs.energy);
            for (int n = 0; n < 3; ++n)
                put(out, obs.pattern_energies(n));
            put(out, obs.photon_total);
            for (int n = 0; n < 3; ++n)
                put(out, obs.photon_by_pattern(n));
            put(out, obs.sigma_x_total);
            for (int n = 0; n < 3; ++n)
                put(out, obs.sigma_x_by_pattern(n));
            put(out, k < rec.d2e.size() ? rec.d2e[k] : std::nullopt);
            out << '\n';
        }
    }
}

void write_patterns_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    out << kPatternsHeader << '\n';
    for (const auto& rec : records) {
        out << format_real(rec.g);
        put(out, rec.g_over_gc);
        for (int n = 0; n < 3; ++n)
            put(out, rec.basis.lambdas(n));
        for (int n = 0; n < 3; ++n)
            for (int m = 0; m < 3; ++m)
                put(out, rec.basis.u(n, m));
        for (int n = 0; n < 3; ++n)
            put(out, rec.derivatives ? std::optional(rec.derivatives->dlambda(n)) : std::nullopt);
        for (int n = 0; n < 3; ++n)
            put(out, rec.derivatives ? std::optional(rec.derivatives->d2lambda(n)) : std::nullopt);
        out << '\n';
    }
}

void write_wavefunction_csv(std::ostream& out, const std::vector<WavefunctionRow>& rows) {
    out << kWavefunctionHeader << '\n';
    for (const auto& row : rows) {
        const WavefunctionSlice& s = row.slice;
        for (Eigen::Index m = 0; m < s.amplitudes.size(); ++m) {
            out << format_real(row.g_over_gc) << ',' << s.level << ',' << m;
            put(out, s.amplitudes(m));
            for (const auto& w : s.pattern_components)
                put(out, w(m));
            put(out, s.energy);
            out << '\n';
        }
    }
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 initialisation failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        if (got > 0)
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = command;
    j["config"] = config;
    j["n_max"] = n_max;
    j["timestamp"] = timestamp;
    j["files"] = nlohmann::json::array();
    for (const auto& f : files)
        j["files"].push_back({{"name", f.filename().string()}, {"sha256", sha256_file(f)}});
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream out;
    out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

}  // namespace rabi
