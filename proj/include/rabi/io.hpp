#pragma once

// CSV tables and run manifests consumed by the plotting layer.
//
// All numbers are written with 17 significant digits, '.' decimal point and '\n' line ends.
// Derivative cells that are undefined (sweep endpoints, degenerate 3x3 spectra) are empty.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "rabi/observables.hpp"
#include "rabi/sweep.hpp"

namespace rabi {

inline constexpr const char* kToolName = "rabi-patterns";
inline constexpr const char* kToolVersion = "1.0.0";

inline constexpr const char* kSweepHeader =
    "g,g_over_gc,level,energy,e_pat1,e_pat2,e_pat3,photon,photon_pat1,photon_pat2,photon_pat3,"
    "sigmax,sigmax_pat1,sigmax_pat2,sigmax_pat3,d2e";
inline constexpr const char* kPatternsHeader =
    "g,g_over_gc,lambda1,lambda2,lambda3,u11,u12,u13,u21,u22,u23,u31,u32,u33,dlam1,dlam2,dlam3,"
    "d2lam1,d2lam2,d2lam3";
inline constexpr const char* kWavefunctionHeader =
    "g_over_gc,level,m,psi_up,w1_up,w2_up,w3_up,energy";

// One row per (g, level), g-major.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
// One row per g.
void write_patterns_csv(std::ostream& out, const std::vector<SweepRecord>& records);

struct WavefunctionRow {
    double g_over_gc;
    WavefunctionSlice slice;
};
// One row per (g, level, m).
void write_wavefunction_csv(std::ostream& out, const std::vector<WavefunctionRow>& rows);

std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::size_t n_max{0};
    std::string timestamp;  // ISO-8601 UTC
    std::vector<std::filesystem::path> files;

    // Checksums are taken from the files as they are on disk now.
    nlohmann::json to_json() const;
};

std::string utc_timestamp();

// Writes text to path atomically enough for our purposes (truncate + write).
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace rabi
