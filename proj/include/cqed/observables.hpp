// observables.hpp: populations, mode spectrum, energy density and fits

#pragma once

#include "cqed/dynamics.hpp"
#include "cqed/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace cqed {

struct SpatialGrid {
    std::vector<double> points;  // ascending, inside [0, L]

    static SpatialGrid uniform(double cavity_length, std::size_t count = 2048);
};

struct SpectrumRecord {
    Eigen::Index mode{0};  // 1-based mode number n
    double frequency{0.0};
    double occupation{0.0};  // |d_n|^2
    double time{0.0};
};

struct OverlapPoint {
    double energy{0.0};
    double weight{0.0};  // |<psi0|Phi_k>|^2
};

double atomic_population(const ExcitationState& state, Eigen::Index atom);
double total_atomic_excitation(const ExcitationState& state);

std::vector<SpectrumRecord> field_spectrum(const ExcitationState& state, const ModeBasis& modes);

// <E(r)> for a state with an optional vacuum component of amplitude `vacuum_amplitude`.
// The annihilation operator links the one- and zero-excitation sectors, so for a pure
// single-excitation state (the default) the result is identically zero.
std::vector<double> electric_field_amplitude(const ExcitationState& state, const ModeBasis& modes,
                                             const SpatialGrid& grid,
                                             std::complex<double> vacuum_amplitude = 0.0);

// <:E^2(r):> = 2 |sum_n sqrt(omega_n / L) sin(k_n r) d_n|^2. Normalized so the integral over
// [0, L] equals the field energy sum_n omega_n |d_n|^2.
std::vector<double> energy_density(const ExcitationState& state, const ModeBasis& modes,
                                   const SpatialGrid& grid);

double trapezoid(std::span<const double> x, std::span<const double> y);

// One point per distinct eigenvalue; weights of degenerate eigenvalues are summed.
std::vector<OverlapPoint> overlap_spectrum(const Propagator& p, const ExcitationState& s0);

// Points carrying weight above rel_tol * peak, i.e. the eigenstates the initial state touches.
std::vector<OverlapPoint> overlap_envelope(std::span<const OverlapPoint> spectrum,
                                           double rel_tol = 1e-12);

// Least-squares slope of -ln P over samples with t in [t_lo, t_hi].
double fit_decay_rate(std::span<const double> times, std::span<const double> populations,
                      double t_lo, double t_hi);

// A (w/2)^2 / ((x - x0)^2 + (w/2)^2): `width` is the full width at half maximum.
struct LorentzianFit {
    double center{0.0};
    double width{0.0};
    double amplitude{0.0};
    double residual{0.0};  // root mean square
    int iterations{0};
};

double lorentzian(double x, double center, double width, double amplitude);

// Levenberg-Marquardt over {center, width, amplitude}.
LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y,
                             double center_seed, double width_seed);

// Modes whose coupling to `atom` is non-negligible (|g| > tol * max|g|). For an atom at
// the cavity centre these are exactly the odd modes.
std::vector<Eigen::Index> interacting_modes(const SystemConfig& config, Eigen::Index atom,
                                            double tol = 1e-9);

// Pearson correlation of two sampled curves on [lo, hi]; curve b is linearly interpolated
// onto the abscissae of curve a.
double envelope_correlation(std::span<const double> xa, std::span<const double> ya,
                            std::span<const double> xb, std::span<const double> yb, double lo,
                            double hi);

// Scales so the largest value is one; all-zero input is returned unchanged.
std::vector<double> normalize_peak(std::span<const double> values);

}  // namespace cqed
