// fixtures.hpp: configurations shared by the unit and acceptance tests

#pragma once

#include "cqed/model.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace cqed::testing {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLength = 2.0 * kPi;
inline constexpr double kOmegaA = 100.0;
inline constexpr double kCutoff = 200.0;
inline constexpr double kGammaA = kPi;
inline const double kCoupling = std::sqrt(0.5);
inline constexpr double kLambdaA = 2.0 * kPi / kOmegaA;

inline AtomSpec emitter_at(double r, double omega = kOmegaA, double g = kCoupling) {
    return AtomSpec{r, omega, g, AtomRole::emitter, true};
}

// Single atom in the 400-mode cavity, L = 2 pi, omega_a = 100, g_a^2 = 1/2.
inline SystemConfig standard_config(double position = kLength / 2.0, double cutoff = kCutoff,
                                    CouplingModel model = CouplingModel::broadband) {
    return SystemConfig{build_modes(kLength, cutoff), {emitter_at(position)}, model};
}

// M atoms at random positions, N = 40 modes, first atom excited.
inline SystemConfig small_random_config(std::uint64_t seed, int atoms = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(0.05, kPi - 0.05);
    std::uniform_real_distribution<double> freq(15.0, 25.0);
    std::uniform_real_distribution<double> cpl(0.3, 1.0);
    SystemConfig c;
    c.modes = build_modes(kPi, 40.0);
    for (int j = 0; j < atoms; ++j) {
        c.atoms.push_back(AtomSpec{pos(rng), freq(rng), cpl(rng),
                                   j == 0 ? AtomRole::emitter : AtomRole::crystal, j == 0});
    }
    return c;
}

}  // namespace cqed::testing
