// observables.cpp: measured quantities on single-excitation states

#include "cqed/observables.hpp"

#include "cqed/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cqed {

SpatialGrid SpatialGrid::uniform(double cavity_length, std::size_t count) {
    if (count < 2 || !(cavity_length > 0.0)) {
        throw ValidationError("spatial grid needs at least two points and a positive length");
    }
    SpatialGrid grid;
    grid.points.resize(count);
    const double h = cavity_length / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        grid.points[i] = static_cast<double>(i) * h;
    }
    grid.points.back() = cavity_length;
    return grid;
}

double atomic_population(const ExcitationState& state, Eigen::Index atom) {
    if (atom < 0 || atom >= state.atom_count) {
        std::ostringstream msg;
        msg << "atomic_population: atom index " << atom << " out of range [0, " << state.atom_count
            << ")";
        throw ValidationError(msg.str());
    }
    return std::norm(state.amplitudes(atom));
}

double total_atomic_excitation(const ExcitationState& state) {
    return state.atom_amplitudes().squaredNorm();
}

std::vector<SpectrumRecord> field_spectrum(const ExcitationState& state, const ModeBasis& modes) {
    if (state.mode_count() != modes.mode_count()) {
        throw ValidationError("field_spectrum: state does not match the mode basis");
    }
    std::vector<SpectrumRecord> out;
    out.reserve(static_cast<std::size_t>(modes.mode_count()));
    const auto d = state.mode_amplitudes();
    for (Eigen::Index n = 0; n < modes.mode_count(); ++n) {
        out.push_back({n + 1, modes.frequencies(n), std::norm(d(n)), state.time});
    }
    return out;
}

namespace {

// Rows: grid points. Columns: sqrt(omega_n / L) sin(k_n r). Rows at the mirrors are zero.
Eigen::MatrixXd mode_functions(const ModeBasis& modes, const SpatialGrid& grid) {
    const double L = modes.cavity_length;
    const Eigen::Index N = modes.mode_count();
    Eigen::MatrixXd f(static_cast<Eigen::Index>(grid.points.size()), N);
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const double r = grid.points[i];
        if (r < 0.0 || r > L) {
            throw ValidationError("spatial grid point outside [0, L]");
        }
        const auto row = static_cast<Eigen::Index>(i);
        if (r == 0.0 || r == L) {
            f.row(row).setZero();
            continue;
        }
        for (Eigen::Index n = 0; n < N; ++n) {
            f(row, n) = std::sqrt(modes.frequencies(n) / L) * mode_shape(n + 1, r, L);
        }
    }
    return f;
}

}  // namespace

std::vector<double> electric_field_amplitude(const ExcitationState& state, const ModeBasis& modes,
                                             const SpatialGrid& grid,
                                             std::complex<double> vacuum_amplitude) {
    if (state.mode_count() != modes.mode_count()) {
        throw ValidationError("electric_field_amplitude: state does not match the mode basis");
    }
    std::vector<double> out(grid.points.size(), 0.0);
    if (vacuum_amplitude == 0.0) {
        return out;
    }
    // <a_n + a_n^dag> = 2 Re(conj(c0) d_n)
    const Eigen::MatrixXd f = mode_functions(modes, grid);
    const Eigen::VectorXd weights = (std::conj(vacuum_amplitude) * state.mode_amplitudes()).real();
    const Eigen::VectorXd field = 2.0 * (f * weights);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = field(static_cast<Eigen::Index>(i));
    }
    return out;
}

std::vector<double> energy_density(const ExcitationState& state, const ModeBasis& modes,
                                   const SpatialGrid& grid) {
    if (state.mode_count() != modes.mode_count()) {
        throw ValidationError("energy_density: state does not match the mode basis");
    }
    const Eigen::MatrixXd f = mode_functions(modes, grid);
    const Eigen::VectorXcd d = state.mode_amplitudes();
    Eigen::VectorXcd positive(f.rows());
    positive.real() = f * d.real();
    positive.imag() = f * d.imag();

    std::vector<double> out(grid.points.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 2.0 * std::norm(positive(static_cast<Eigen::Index>(i)));
    }
    return out;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ValidationError("trapezoid: size mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    return sum;
}

std::vector<OverlapPoint> overlap_spectrum(const Propagator& p, const ExcitationState& s0) {
    if (s0.dimension() != p.dimension()) {
        throw ValidationError("overlap_spectrum: state dimension does not match the propagator");
    }
    const Eigen::VectorXcd proj = p.eigenvectors.transpose() * s0.amplitudes;
    // Only the projection onto a whole eigenspace is basis independent, so degenerate
    // eigenvalues are merged (e.g. a decoupled mode sitting exactly on a dressed level).
    const double scale = p.dimension() > 0 ? p.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    const double tol = 1e-10 * std::max(scale, 1.0);
    std::vector<OverlapPoint> out;
    out.reserve(static_cast<std::size_t>(p.dimension()));
    for (Eigen::Index k = 0; k < p.dimension(); ++k) {
        const double w = std::norm(proj(k));
        if (!out.empty() && p.eigenvalues(k) - out.back().energy <= tol) {
            out.back().weight += w;
        } else {
            out.push_back({p.eigenvalues(k), w});
        }
    }
    return out;
}

std::vector<OverlapPoint> overlap_envelope(std::span<const OverlapPoint> spectrum, double rel_tol) {
    double peak = 0.0;
    for (const auto& o : spectrum) peak = std::max(peak, o.weight);
    std::vector<OverlapPoint> out;
    for (const auto& o : spectrum) {
        if (o.weight > rel_tol * peak) out.push_back(o);
    }
    return out;
}

double fit_decay_rate(std::span<const double> times, std::span<const double> populations,
                      double t_lo, double t_hi) {
    if (times.size() != populations.size()) {
        throw ValidationError("fit_decay_rate: times and populations differ in length");
    }
    if (!(t_hi > t_lo)) {
        throw ValidationError("fit_decay_rate: degenerate window");
    }
    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(populations[i] > 0.0)) {
            std::ostringstream msg;
            msg << "fit_decay_rate: non-positive population " << populations[i] << " at t = "
                << times[i];
            throw ValidationError(msg.str());
        }
        ts.push_back(times[i]);
        ys.push_back(-std::log(populations[i]));
    }
    if (ts.size() < 2) {
        throw ValidationError("fit_decay_rate: fewer than two samples in the window");
    }
    const double n = static_cast<double>(ts.size());
    const double tm = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
    const double ym = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxx += (ts[i] - tm) * (ts[i] - tm);
        sxy += (ts[i] - tm) * (ys[i] - ym);
    }
    if (!(sxx > 0.0)) {
        throw ValidationError("fit_decay_rate: degenerate window");
    }
    return sxy / sxx;
}

double lorentzian(double x, double center, double width, double amplitude) {
    const double h = 0.5 * width;
    const double dx = x - center;
    return amplitude * h * h / (dx * dx + h * h);
}

LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y,
                             double center_seed, double width_seed) {
    if (x.size() != y.size() || x.size() < 3) {
        throw ValidationError("fit_lorentzian: need at least three (x, y) samples");
    }
    if (!(width_seed > 0.0)) {
        throw ValidationError("fit_lorentzian: width seed must be positive");
    }
    const auto m = static_cast<Eigen::Index>(x.size());
    Eigen::Vector3d p(center_seed, width_seed, *std::max_element(y.begin(), y.end()));

    const auto residuals = [&](const Eigen::Vector3d& q) {
        Eigen::VectorXd r(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            r(i) = lorentzian(x[static_cast<std::size_t>(i)], q(0), q(1), q(2)) -
                   y[static_cast<std::size_t>(i)];
        }
        return r;
    };
    const auto jacobian = [&](const Eigen::Vector3d& q) {
        Eigen::MatrixXd J(m, 3);
        const double h = 0.5 * q(1);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double dx = x[static_cast<std::size_t>(i)] - q(0);
            const double D = dx * dx + h * h;
            J(i, 0) = q(2) * h * h * 2.0 * dx / (D * D);
            J(i, 1) = q(2) * h * dx * dx / (D * D);
            J(i, 2) = h * h / D;
        }
        return J;
    };

    double lambda = 1e-3;
    Eigen::VectorXd r = residuals(p);
    double cost = r.squaredNorm();
    int it = 0;
    bool converged = false;
    for (; it < 200 && !converged; ++it) {
        const Eigen::MatrixXd J = jacobian(p);
        const Eigen::Matrix3d JtJ = J.transpose() * J;
        const Eigen::Vector3d g = J.transpose() * r;
        bool improved = false;
        while (!improved && lambda < 1e12) {
            Eigen::Matrix3d A = JtJ;
            A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-300);
            const Eigen::Vector3d step = A.ldlt().solve(-g);
            Eigen::Vector3d trial = p + step;
            trial(1) = std::abs(trial(1));
            const Eigen::VectorXd rt = residuals(trial);
            const double ct = rt.squaredNorm();
            if (std::isfinite(ct) && ct < cost) {
                const double rel = (cost - ct) / std::max(cost, 1e-300);
                converged = rel < 1e-14 || step.norm() < 1e-13 * (1.0 + p.norm());
                p = trial;
                r = rt;
                cost = ct;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) converged = true;
    }

    LorentzianFit fit;
    fit.center = p(0);
    fit.width = std::abs(p(1));
    fit.amplitude = p(2);
    fit.residual = std::sqrt(cost / static_cast<double>(m));
    fit.iterations = it;
    return fit;
}

std::vector<Eigen::Index> interacting_modes(const SystemConfig& config, Eigen::Index atom,
                                            double tol) {
    if (atom < 0 || atom >= config.atom_count()) {
        throw ValidationError("interacting_modes: atom index out of range");
    }
    const Eigen::MatrixXd g = coupling_matrix(config);
    const double gmax = g.row(atom).cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> out;
    for (Eigen::Index n = 0; n < g.cols(); ++n) {
        if (std::abs(g(atom, n)) > tol * gmax) out.push_back(n);
    }
    return out;
}

namespace {

double interpolate(std::span<const double> x, std::span<const double> y, double at) {
    const auto it = std::lower_bound(x.begin(), x.end(), at);
    if (it == x.begin()) return y.front();
    if (it == x.end()) return y.back();
    const auto i = static_cast<std::size_t>(it - x.begin());
    const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - w) * y[i - 1] + w * y[i];
}

}  // namespace

double envelope_correlation(std::span<const double> xa, std::span<const double> ya,
                            std::span<const double> xb, std::span<const double> yb, double lo,
                            double hi) {
    if (xa.size() != ya.size() || xb.size() != yb.size() || xb.size() < 2) {
        throw ValidationError("envelope_correlation: malformed curves");
    }
    if (!std::is_sorted(xb.begin(), xb.end())) {
        throw ValidationError("envelope_correlation: abscissae of the second curve must ascend");
    }
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t i = 0; i < xa.size(); ++i) {
        if (xa[i] < lo || xa[i] > hi || xa[i] < xb.front() || xa[i] > xb.back()) continue;
        a.push_back(ya[i]);
        b.push_back(interpolate(xb, yb, xa[i]));
    }
    if (a.size() < 3) {
        throw ValidationError("envelope_correlation: fewer than three common samples");
    }
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

std::vector<double> normalize_peak(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    if (out.empty()) return out;
    const double peak = *std::max_element(out.begin(), out.end());
    if (peak > 0.0) {
        for (double& v : out) v /= peak;
    }
    return out;
}

}  // namespace cqed
