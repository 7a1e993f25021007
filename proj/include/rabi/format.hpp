#pragma once

#include <string>

namespace rabi {

// Shortest-free, locale-independent 17 significant digit rendering ("%.17g" semantics).
std::string format_real(double value);

}  // namespace rabi
