#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rabi::validation {

struct Options {
    double delta{50.0};
    std::size_t n_max{200};
    std::size_t n_max_check{300};
    std::size_t points{61};
    std::uint64_t seed{20240601};
    std::size_t threads{1};
    // Test hook: the pattern-sum build uses delta + this offset in the dual-build check.
    double inject_delta_mismatch{0.0};
};

struct CheckResult {
    std::string name;
    bool passed{false};
    std::string detail;
};

std::vector<CheckResult> run_all(const Options& opts);

// "PASS name: detail" / "FAIL name: detail", one line per check.
void print_report(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace rabi::validation
