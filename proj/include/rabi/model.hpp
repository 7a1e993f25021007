#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rabi {

// Bad configuration (maps to CLI usage errors).
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Any failure of the numerics: non-convergence, degeneracy, tracking ambiguity.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DegenerateSpectrumError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// Rescaled Rabi model H = a†a + (Δ/2)σx + g(a+a†)σz, energies in units of ħω.
struct ModelParams {
    double delta{50.0};
    double g{0.0};
    std::size_t n_max{200};  // photon states 0..n_max
    std::size_t k_levels{4};

    std::size_t dim() const { return 2 * (n_max + 1); }

    // Throws ConfigError when an invariant is violated.
    void validate() const;
};

}  // namespace rabi
