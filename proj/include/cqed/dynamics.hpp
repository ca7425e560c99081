// dynamics.hpp: time evolution in the single-excitation sector
//
// Two independent backends: exact propagation through the eigendecomposition of the
// restricted Hamiltonian, and fixed-step classical RK4 on i dx/dt = H x.

#pragma once

#include "cqed/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace cqed {

// Amplitudes (c_1..c_M, d_1..d_N) at time t. The vacuum component is exactly decoupled
// under RWA and is not stored.
struct ExcitationState {
    Eigen::Index atom_count{0};
    Eigen::VectorXcd amplitudes;
    double time{0.0};

    Eigen::Index dimension() const { return amplitudes.size(); }
    Eigen::Index mode_count() const { return amplitudes.size() - atom_count; }
    auto atom_amplitudes() const { return amplitudes.head(atom_count); }
    auto mode_amplitudes() const { return amplitudes.tail(mode_count()); }

    double norm_squared() const { return amplitudes.squaredNorm(); }
};

// Expectation of the excitation-number operator R. Equal to the norm in this sector.
double excitation_number(const ExcitationState& state);

// <psi|H|psi>
double energy(const RestrictedHamiltonian& h, const ExcitationState& state);

ExcitationState initial_state(const SystemConfig& config);

struct Propagator {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // orthonormal columns
    Eigen::Index atom_count{0};

    Eigen::Index dimension() const { return eigenvalues.size(); }
};

Propagator diagonalize(const RestrictedHamiltonian& h);

// state(t) = Phi exp(-i E (t - t0)) Phi^T s0 at each requested time. Times may lie on
// either side of s0.time but must be ascending.
std::vector<ExcitationState> evolve_eig(const Propagator& p, const ExcitationState& s0,
                                        std::span<const double> times);

inline constexpr double kDefaultRkStep = 1e-4;

// Classical RK4 with the step shortened per interval so every requested time is hit
// exactly. Throws NumericalError when dt is outside the stability region or the norm
// drifts by more than 1e-4.
std::vector<ExcitationState> evolve_rk(const RestrictedHamiltonian& h, const ExcitationState& s0,
                                       std::span<const double> times,
                                       double step = kDefaultRkStep);

enum class Backend { eig, rk };

struct EvolutionOptions {
    Backend backend{Backend::eig};
    double rk_step{kDefaultRkStep};
};

// Builds the Hamiltonian, the initial state and evolves with the chosen backend.
std::vector<ExcitationState> simulate(const SystemConfig& config, std::span<const double> times,
                                      const EvolutionOptions& options = {});

// n uniformly spaced samples on [0, t_max], both endpoints included.
std::vector<double> uniform_times(double t_max, std::size_t samples);

}  // namespace cqed
