#pragma once

#include <stdexcept>
#include <string>

namespace lyap {

/// Dyson index of the matrix entries: real, complex or real quaternion.
enum class Beta : int { real = 1, complex = 2, quaternion = 4 };

inline constexpr int value(Beta beta) { return static_cast<int>(beta); }

inline constexpr double half_beta(Beta beta) { return 0.5 * static_cast<double>(value(beta)); }

inline Beta beta_from_int(int beta)
{
    switch (beta) {
    case 1: return Beta::real;
    case 2: return Beta::complex;
    case 4: return Beta::quaternion;
    default:
        throw std::invalid_argument("beta must be 1, 2 or 4, got " + std::to_string(beta));
    }
}

} // namespace lyap
