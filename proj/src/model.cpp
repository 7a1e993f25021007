#include "rabi/model.hpp"

#include <cmath>

namespace rabi {

void ModelParams::validate() const {
    if (!(std::isfinite(delta) && delta >= 0.0))
        throw ConfigError("delta must be finite and >= 0, got " + std::to_string(delta));
    if (!(std::isfinite(g) && g >= 0.0))
        throw ConfigError("g must be finite and >= 0, got " + std::to_string(g));
    if (n_max < 1)
        throw ConfigError("n_max must be >= 1");
    if (k_levels < 1 || k_levels > dim())
        throw ConfigError("k_levels must lie in [1, " + std::to_string(dim()) + "], got " +
                          std::to_string(k_levels));
}

}  // namespace rabi
