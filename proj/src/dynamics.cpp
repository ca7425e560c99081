// dynamics.cpp: eigendecomposition and RK4 propagators

#include "cqed/dynamics.hpp"

#include "cqed/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cqed {

namespace {

void require_ascending(std::span<const double> times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) {
            throw ValidationError("requested times must be finite");
        }
        if (i > 0 && times[i] < times[i - 1]) {
            throw ValidationError("requested times must be ascending");
        }
    }
}

}  // namespace

double excitation_number(const ExcitationState& state) {
    // R = sum_j (sigma_z + 1)/2 + sum_n a^dag a has eigenvalue 1 on every basis state.
    return state.atom_amplitudes().squaredNorm() + state.mode_amplitudes().squaredNorm();
}

double energy(const RestrictedHamiltonian& h, const ExcitationState& state) {
    if (h.dimension() != state.dimension()) {
        throw ValidationError("energy: state dimension does not match the Hamiltonian");
    }
    return state.amplitudes.dot(h.apply(state.amplitudes)).real();
}

ExcitationState initial_state(const SystemConfig& config) {
    const Eigen::Index excited = excited_atom_index(config);
    ExcitationState s;
    s.atom_count = config.atom_count();
    s.amplitudes = Eigen::VectorXcd::Zero(config.dimension());
    s.amplitudes(excited) = 1.0;
    s.time = 0.0;
    return s;
}

Propagator diagonalize(const RestrictedHamiltonian& h) {
    if (h.matrix.rows() != h.matrix.cols() || h.matrix.rows() != h.dimension()) {
        throw ValidationError("diagonalize: malformed Hamiltonian");
    }
    if (!h.matrix.allFinite()) {
        throw ValidationError("diagonalize: Hamiltonian has non-finite entries");
    }
    // Slots with no off-diagonal coupling at all (e.g. even modes seen from the cavity centre)
    // are eigenvectors already. Keeping them out of the solver makes their eigenvectors exact
    // unit vectors, so they pick up no rounding noise from the coupled block.
    const Eigen::Index dim = h.dimension();
    std::vector<Eigen::Index> coupled;
    std::vector<Eigen::Index> isolated;
    for (Eigen::Index i = 0; i < dim; ++i) {
        bool alone = true;
        for (Eigen::Index j = 0; j < dim && alone; ++j) {
            if (j != i && h.matrix(i, j) != 0.0) alone = false;
        }
        (alone ? isolated : coupled).push_back(i);
    }

    const auto nc = static_cast<Eigen::Index>(coupled.size());
    Eigen::MatrixXd block(nc, nc);
    for (Eigen::Index a = 0; a < nc; ++a) {
        for (Eigen::Index b = 0; b < nc; ++b) {
            block(a, b) = h.matrix(coupled[static_cast<std::size_t>(a)], coupled[static_cast<std::size_t>(b)]);
        }
    }
    Eigen::VectorXd values(dim);
    Eigen::MatrixXd vectors = Eigen::MatrixXd::Zero(dim, dim);
    if (nc > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
        if (solver.info() != Eigen::Success) {
            throw NumericalError("diagonalize: eigensolver did not converge");
        }
        values.head(nc) = solver.eigenvalues();
        for (Eigen::Index a = 0; a < nc; ++a) {
            vectors.row(coupled[static_cast<std::size_t>(a)]).head(nc) = solver.eigenvectors().row(a);
        }
    }
    for (std::size_t k = 0; k < isolated.size(); ++k) {
        const Eigen::Index col = nc + static_cast<Eigen::Index>(k);
        values(col) = h.matrix(isolated[k], isolated[k]);
        vectors(isolated[k], col) = 1.0;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
    Propagator p;
    p.eigenvalues.resize(dim);
    p.eigenvectors.resize(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        p.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
        p.eigenvectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
    }
    p.atom_count = h.atom_count;
    return p;
}

std::vector<ExcitationState> evolve_eig(const Propagator& p, const ExcitationState& s0,
                                        std::span<const double> times) {
    if (s0.dimension() != p.dimension()) {
        throw ValidationError("evolve_eig: state dimension does not match the propagator");
    }
    require_ascending(times);

    const Eigen::Index dim = p.dimension();
    const Eigen::Index count = static_cast<Eigen::Index>(times.size());
    const Eigen::VectorXcd coeffs = p.eigenvectors.transpose() * s0.amplitudes;

    // Phased eigen-coefficients for all times at once, split into real and imaginary parts
    // so the back-transform is two real GEMMs.
    Eigen::MatrixXd re(dim, count);
    Eigen::MatrixXd im(dim, count);
    for (Eigen::Index c = 0; c < count; ++c) {
        const double dt = times[static_cast<std::size_t>(c)] - s0.time;
        for (Eigen::Index k = 0; k < dim; ++k) {
            const std::complex<double> v = coeffs(k) * std::polar(1.0, -p.eigenvalues(k) * dt);
            re(k, c) = v.real();
            im(k, c) = v.imag();
        }
    }
    const Eigen::MatrixXd out_re = p.eigenvectors * re;
    const Eigen::MatrixXd out_im = p.eigenvectors * im;

    std::vector<ExcitationState> out;
    out.reserve(times.size());
    for (Eigen::Index c = 0; c < count; ++c) {
        ExcitationState s;
        s.atom_count = s0.atom_count;
        s.time = times[static_cast<std::size_t>(c)];
        if (s.time == s0.time) {
            s.amplitudes = s0.amplitudes;
        } else {
            s.amplitudes.resize(dim);
            s.amplitudes.real() = out_re.col(c);
            s.amplitudes.imag() = out_im.col(c);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ExcitationState> evolve_rk(const RestrictedHamiltonian& h, const ExcitationState& s0,
                                       std::span<const double> times, double step) {
    if (s0.dimension() != h.dimension()) {
        throw ValidationError("evolve_rk: state dimension does not match the Hamiltonian");
    }
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ValidationError("evolve_rk: step must be positive");
    }
    require_ascending(times);
    if (!times.empty() && times.front() < s0.time) {
        throw ValidationError("evolve_rk: requested times precede the initial state");
    }
    // RK4 is stable on the imaginary axis up to |z| = 2 sqrt(2).
    const double z = step * h.norm_bound();
    if (z >= 2.5) {
        std::ostringstream msg;
        msg << "evolve_rk: step " << step << " is unstable (dt*|H| = " << z << ")";
        throw NumericalError(msg.str());
    }

    const std::complex<double> minus_i(0.0, -1.0);
    const auto rhs = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
        return minus_i * h.apply(x);
    };

    const double norm0 = s0.norm_squared();
    Eigen::VectorXcd x = s0.amplitudes;
    double t = s0.time;

    std::vector<ExcitationState> out;
    out.reserve(times.size());
    for (const double target : times) {
        const double span = target - t;
        if (span > 0.0) {
            const auto steps = static_cast<long>(std::ceil(span / step - 1e-9));
            const double dt = span / static_cast<double>(std::max(steps, 1L));
            for (long s = 0; s < std::max(steps, 1L); ++s) {
                const Eigen::VectorXcd k1 = rhs(x);
                const Eigen::VectorXcd k2 = rhs(x + 0.5 * dt * k1);
                const Eigen::VectorXcd k3 = rhs(x + 0.5 * dt * k2);
                const Eigen::VectorXcd k4 = rhs(x + dt * k3);
                x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            t = target;
        }
        const double drift = std::abs(x.squaredNorm() - norm0);
        if (!(drift <= 1e-4)) {
            std::ostringstream msg;
            msg << "evolve_rk: norm drift " << drift << " at t = " << target
                << " exceeds the stability limit";
            throw NumericalError(msg.str());
        }
        ExcitationState s;
        s.atom_count = s0.atom_count;
        s.amplitudes = x;
        s.time = target;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ExcitationState> simulate(const SystemConfig& config, std::span<const double> times,
                                      const EvolutionOptions& options) {
    const RestrictedHamiltonian h = build_hamiltonian(config);
    const ExcitationState s0 = initial_state(config);
    if (options.backend == Backend::rk) {
        return evolve_rk(h, s0, times, options.rk_step);
    }
    return evolve_eig(diagonalize(h), s0, times);
}

std::vector<double> uniform_times(double t_max, std::size_t samples) {
    if (samples < 2 || !(t_max > 0.0)) {
        throw ValidationError("time grid needs t_max > 0 and at least two samples");
    }
    std::vector<double> t(samples);
    const double dt = t_max / static_cast<double>(samples - 1);
    for (std::size_t i = 0; i < samples; ++i) {
        t[i] = static_cast<double>(i) * dt;
    }
    t.back() = t_max;
    return t;
}

}  // namespace cqed
