// master_eq.hpp: time-local decay rate and level shift of the initially excited atom
//
// For the single-excitation initial state the reduced dynamics of the emitter obeys
//   d rho/dt = i delta(t)/2 [rho, s+ s-] + Gamma(t)/2 (2 s- rho s+ - s+ s- rho - rho s+ s-)
// with eta(t) = -2 (dc1/dt) / c1, Gamma = Re eta, delta = Im eta.

#pragma once

#include "cqed/dynamics.hpp"
#include "cqed/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace cqed {

inline constexpr double kDefaultValidityThreshold = 1e-6;

enum class Frame { lab, interaction };

struct MasterEqTrace {
    Frame frame{Frame::lab};
    double frame_frequency{0.0};  // omega_a removed from delta in the interaction frame
    std::vector<double> times;
    std::vector<std::complex<double>> eta;
    std::vector<std::complex<double>> eta_rate;  // d eta / dt
    std::vector<double> gamma;                   // Re eta, NaN where invalid
    std::vector<double> delta;                   // Im eta, NaN where invalid
    std::vector<double> population;              // |c1|^2
    std::vector<std::uint8_t> valid;             // |c1| >= threshold
};

// Derivatives of c1 come from the equation of motion on each stored state,
// dc1/dt = -i (H x)_1 and d^2c1/dt^2 = -(H H x)_1, never from finite differences.
MasterEqTrace reconstruct_eta(const RestrictedHamiltonian& h,
                              std::span<const ExcitationState> trajectory, Eigen::Index emitter,
                              double threshold = kDefaultValidityThreshold);

// eta computed from c1 exp(i omega_a t): delta loses the free rotation 2 omega_a, gamma is
// untouched.
MasterEqTrace free_atom_interaction_frame(const MasterEqTrace& trace, double transition_frequency);

// Integrates dP/dt = -Gamma(t) P across each run of consecutive valid samples, starting from
// the stored population at the first sample of the run. The flux Gamma * P is evaluated on
// the stored populations and integrated with the endpoint-corrected trapezoid rule, using
// d(Gamma P)/dt = (dGamma/dt - Gamma^2) P. NaN where invalid.
std::vector<double> reintegrate_population(const MasterEqTrace& trace);

// Trapezoid time average of Gamma over valid samples in [t_lo, t_hi].
double average_gamma(const MasterEqTrace& trace, double t_lo, double t_hi);
double average_delta(const MasterEqTrace& trace, double t_lo, double t_hi);

}  // namespace cqed
