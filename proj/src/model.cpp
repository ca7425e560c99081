// model.cpp: mode basis, couplings and restricted Hamiltonian

#include "cqed/model.hpp"

#include "cqed/errors.hpp"

#include <cmath>
#include <sstream>

namespace cqed {

ModeBasis build_modes(double cavity_length, double cutoff_frequency) {
    if (!(cavity_length > 0.0) || !std::isfinite(cavity_length)) {
        throw ValidationError("cavity length must be positive and finite");
    }
    if (!std::isfinite(cutoff_frequency)) {
        throw ValidationError("cutoff frequency must be finite");
    }
    const double spacing = std::numbers::pi * kSpeedOfLight / cavity_length;
    if (cutoff_frequency < spacing) {
        std::ostringstream msg;
        msg << "cutoff frequency " << cutoff_frequency << " is below the first mode frequency "
            << spacing;
        throw ValidationError(msg.str());
    }
    // The ratio is an integer for the usual parameter choices (L = 2 pi, omega_cut = 200);
    // a relative nudge keeps floor() from landing one mode short through rounding.
    const double ratio = cutoff_frequency / spacing;
    const auto count = static_cast<Eigen::Index>(std::floor(ratio * (1.0 + 1e-12)));

    ModeBasis basis;
    basis.cavity_length = cavity_length;
    basis.cutoff_frequency = cutoff_frequency;
    basis.frequencies.resize(count);
    basis.wavenumbers.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const double n = static_cast<double>(i + 1);
        basis.wavenumbers(i) = n * std::numbers::pi / cavity_length;
        basis.frequencies(i) = kSpeedOfLight * basis.wavenumbers(i);
    }
    return basis;
}

double mode_shape(Eigen::Index n, double position, double cavity_length) {
    // sin(n pi r / L) with the argument reduced in units of pi first, so nodes that fall on
    // representable fractions of L (r = L/2 and even n, say) come out as an exact zero.
    const double x = std::fmod(static_cast<double>(n) * (position / cavity_length), 2.0);
    if (x == std::floor(x)) return 0.0;
    const double sign = x > 1.0 ? -1.0 : 1.0;
    double y = x > 1.0 ? x - 1.0 : x;
    if (y > 0.5) y = 1.0 - y;
    return sign * std::sin(std::numbers::pi * y);
}

std::string_view to_string(CouplingModel model) {
    switch (model) {
        case CouplingModel::broadband: return "broadband";
        case CouplingModel::dipole_dE: return "dipole_dE";
        case CouplingModel::momentum_pA: return "momentum_pA";
    }
    return "broadband";
}

CouplingModel coupling_model_from_string(std::string_view name) {
    if (name == "broadband") return CouplingModel::broadband;
    if (name == "dipole_dE") return CouplingModel::dipole_dE;
    if (name == "momentum_pA") return CouplingModel::momentum_pA;
    throw ValidationError("unknown coupling model '" + std::string(name) +
                          "' (expected broadband, dipole_dE or momentum_pA)");
}

std::string_view to_string(AtomRole role) {
    switch (role) {
        case AtomRole::emitter: return "emitter";
        case AtomRole::crystal: return "crystal";
        case AtomRole::analyzer: return "analyzer";
    }
    return "emitter";
}

AtomRole atom_role_from_string(std::string_view name) {
    if (name == "emitter") return AtomRole::emitter;
    if (name == "crystal") return AtomRole::crystal;
    if (name == "analyzer") return AtomRole::analyzer;
    throw ValidationError("unknown atom role '" + std::string(name) + "'");
}

void validate(const SystemConfig& config) {
    const ModeBasis& modes = config.modes;
    if (!(modes.cavity_length > 0.0) || modes.mode_count() == 0) {
        throw ValidationError("mode basis is empty");
    }
    const double L = modes.cavity_length;
    for (std::size_t j = 0; j < config.atoms.size(); ++j) {
        const AtomSpec& atom = config.atoms[j];
        std::ostringstream where;
        where << "atom " << j << ": ";
        if (!std::isfinite(atom.position) || atom.position < 0.0 || atom.position > L) {
            throw ValidationError(where.str() + "position outside the cavity");
        }
        if (atom.position == 0.0 || atom.position == L) {
            throw ValidationError(where.str() + "atom at mirror");
        }
        if (!(atom.transition_frequency > 0.0) || !std::isfinite(atom.transition_frequency)) {
            throw ValidationError(where.str() + "transition frequency must be positive");
        }
        if (!(atom.reduced_coupling >= 0.0) || !std::isfinite(atom.reduced_coupling)) {
            throw ValidationError(where.str() + "coupling must be non-negative");
        }
    }
}

Eigen::Index excited_atom_index(const SystemConfig& config) {
    Eigen::Index found = -1;
    int count = 0;
    for (std::size_t j = 0; j < config.atoms.size(); ++j) {
        if (config.atoms[j].initial_excited) {
            found = static_cast<Eigen::Index>(j);
            ++count;
        }
    }
    if (count == 0) {
        throw ValidationError("no initially excited atom");
    }
    if (count > 1) {
        throw ValidationError("more than one initially excited atom (outside the single-excitation sector)");
    }
    return found;
}

double coupling_for_rate(double rate, double cavity_length) {
    if (!(rate >= 0.0) || !(cavity_length > 0.0)) {
        throw ValidationError("coupling_for_rate: rate must be >= 0 and length > 0");
    }
    return std::sqrt(rate * kSpeedOfLight / cavity_length);
}

Eigen::MatrixXd coupling_matrix(const SystemConfig& config) {
    validate(config);
    const ModeBasis& modes = config.modes;
    const Eigen::Index M = config.atom_count();
    const Eigen::Index N = modes.mode_count();
    Eigen::MatrixXd g(M, N);
    for (Eigen::Index j = 0; j < M; ++j) {
        const AtomSpec& atom = config.atoms[static_cast<std::size_t>(j)];
        for (Eigen::Index n = 0; n < N; ++n) {
            double factor = 1.0;
            switch (config.coupling_model) {
                case CouplingModel::broadband:
                    break;
                case CouplingModel::dipole_dE:
                    factor = std::sqrt(modes.frequencies(n) / atom.transition_frequency);
                    break;
                case CouplingModel::momentum_pA:
                    factor = std::sqrt(atom.transition_frequency / modes.frequencies(n));
                    break;
            }
            g(j, n) = atom.reduced_coupling * factor * mode_shape(n + 1, atom.position, modes.cavity_length);
        }
    }
    return g;
}

RestrictedHamiltonian build_hamiltonian(const SystemConfig& config) {
    const Eigen::MatrixXd g = coupling_matrix(config);
    const Eigen::Index M = config.atom_count();
    const Eigen::Index N = config.modes.mode_count();

    RestrictedHamiltonian h;
    h.atom_count = M;
    h.mode_count = N;
    h.matrix = Eigen::MatrixXd::Zero(M + N, M + N);
    for (Eigen::Index j = 0; j < M; ++j) {
        h.matrix(j, j) = config.atoms[static_cast<std::size_t>(j)].transition_frequency;
    }
    for (Eigen::Index n = 0; n < N; ++n) {
        h.matrix(M + n, M + n) = config.modes.frequencies(n);
    }
    h.matrix.topRightCorner(M, N) = -g;
    h.matrix.bottomLeftCorner(N, M) = -g.transpose();
    return h;
}

Eigen::VectorXcd RestrictedHamiltonian::apply(const Eigen::VectorXcd& x) const {
    const Eigen::Index M = atom_count;
    const Eigen::Index N = mode_count;
    const auto block = matrix.topRightCorner(M, N);
    const auto diag = matrix.diagonal();

    Eigen::VectorXcd y(M + N);
    y.head(M) = diag.head(M).cwiseProduct(x.head(M)) + block * x.tail(N);
    y.tail(N) = diag.tail(N).cwiseProduct(x.tail(N)) + block.transpose() * x.head(M);
    return y;
}

double RestrictedHamiltonian::norm_bound() const {
    if (matrix.size() == 0) return 0.0;
    return matrix.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace cqed
