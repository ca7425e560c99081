// model.hpp: discrete cavity modes, atom couplings and the single-excitation Hamiltonian
//
// Units: hbar = c = eps0 = 1. The dipole prefactor of the coupling is folded into a
// per-atom reduced coupling g_a, so g_n^(j) = g_a * f(omega_n) * sin(k_n r_j).

#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace cqed {

inline constexpr double kSpeedOfLight = 1.0;

// The N standing-wave modes of a 1-D cavity with perfectly reflecting mirrors at 0 and L.
struct ModeBasis {
    double cavity_length{0.0};
    double cutoff_frequency{0.0};
    Eigen::VectorXd frequencies;  // omega_n = n pi c / L, n = 1..N
    Eigen::VectorXd wavenumbers;  // k_n = omega_n / c

    Eigen::Index mode_count() const { return frequencies.size(); }
    double spacing() const { return std::numbers::pi * kSpeedOfLight / cavity_length; }
};

ModeBasis build_modes(double cavity_length, double cutoff_frequency);

enum class AtomRole { emitter, crystal, analyzer };

struct AtomSpec {
    double position{0.0};
    double transition_frequency{0.0};
    double reduced_coupling{0.0};  // g_a, coupling with the mode function set to one
    AtomRole role{AtomRole::emitter};
    bool initial_excited{false};
};

enum class CouplingModel {
    broadband,    // frequency independent magnitude
    dipole_dE,    // sqrt(omega_n / omega_a) relative to broadband
    momentum_pA,  // sqrt(omega_a / omega_n) relative to broadband
};

std::string_view to_string(CouplingModel model);
CouplingModel coupling_model_from_string(std::string_view name);
std::string_view to_string(AtomRole role);
AtomRole atom_role_from_string(std::string_view name);

struct SystemConfig {
    ModeBasis modes;
    std::vector<AtomSpec> atoms;
    CouplingModel coupling_model{CouplingModel::broadband};

    Eigen::Index atom_count() const { return static_cast<Eigen::Index>(atoms.size()); }
    Eigen::Index dimension() const { return atom_count() + modes.mode_count(); }
};

// Throws ValidationError naming the first violated invariant.
void validate(const SystemConfig& config);

// Index of the single initially excited atom; throws unless exactly one exists.
Eigen::Index excited_atom_index(const SystemConfig& config);

// Resonant wavelength 2 pi c / omega.
inline double resonant_wavelength(double transition_frequency) {
    return 2.0 * std::numbers::pi * kSpeedOfLight / transition_frequency;
}

// Golden-rule decay rate of an atom far from the mirrors with broadband coupling:
// Gamma = 2 pi g_a^2 rho, where rho = L / (2 pi c) counts the modes the atom couples to
// (odd modes at the centre, all modes with an averaged sin^2 = 1/2 elsewhere).
inline double golden_rule_rate(double reduced_coupling, double cavity_length) {
    return reduced_coupling * reduced_coupling * cavity_length / kSpeedOfLight;
}

// Reduced coupling g_a that produces the given golden-rule rate.
double coupling_for_rate(double rate, double cavity_length);

// Space-mode function sin(k_n r) of mode n (1-based), exactly zero on its nodes.
double mode_shape(Eigen::Index n, double position, double cavity_length);

// g(j, n) for every atom j and mode n.
Eigen::MatrixXd coupling_matrix(const SystemConfig& config);

// Real symmetric (M+N)x(M+N) matrix: atom slots first in input order, then modes by
// ascending n. Off-diagonal atom-mode entries are -g_n^(j); everything else off-diagonal is 0.
struct RestrictedHamiltonian {
    Eigen::Index atom_count{0};
    Eigen::Index mode_count{0};
    Eigen::MatrixXd matrix;

    Eigen::Index dimension() const { return atom_count + mode_count; }

    // H x using the atom-mode block structure; O(M N) instead of O((M+N)^2).
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

    // Upper bound on the spectral norm (max absolute row sum).
    double norm_bound() const;
};

RestrictedHamiltonian build_hamiltonian(const SystemConfig& config);

}  // namespace cqed
