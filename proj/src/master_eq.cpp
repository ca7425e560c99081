// master_eq.cpp: reconstruction of Gamma(t) and delta(t) from c1(t)

#include "cqed/master_eq.hpp"

#include "cqed/errors.hpp"

#include <cmath>
#include <limits>

namespace cqed {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double windowed_average(const MasterEqTrace& trace, const std::vector<double>& series,
                        double t_lo, double t_hi) {
    double area = 0.0;
    double span = 0.0;
    for (std::size_t i = 1; i < trace.times.size(); ++i) {
        const double a = trace.times[i - 1];
        const double b = trace.times[i];
        if (a < t_lo || b > t_hi) continue;
        if (!trace.valid[i - 1] || !trace.valid[i]) continue;
        area += 0.5 * (b - a) * (series[i - 1] + series[i]);
        span += b - a;
    }
    if (!(span > 0.0)) {
        throw ValidationError("master equation average: no valid samples in the window");
    }
    return area / span;
}

}  // namespace

MasterEqTrace reconstruct_eta(const RestrictedHamiltonian& h,
                              std::span<const ExcitationState> trajectory, Eigen::Index emitter,
                              double threshold) {
    if (trajectory.empty()) {
        throw ValidationError("reconstruct_eta: empty trajectory");
    }
    if (emitter < 0 || emitter >= h.atom_count) {
        throw ValidationError("reconstruct_eta: emitter index out of range");
    }
    const std::complex<double> minus_i(0.0, -1.0);

    MasterEqTrace trace;
    trace.frame = Frame::lab;
    const std::size_t n = trajectory.size();
    trace.times.reserve(n);
    trace.eta.reserve(n);
    trace.eta_rate.reserve(n);
    trace.gamma.reserve(n);
    trace.delta.reserve(n);
    trace.population.reserve(n);
    trace.valid.reserve(n);

    for (const ExcitationState& s : trajectory) {
        if (s.dimension() != h.dimension() || s.atom_count != h.atom_count) {
            throw ValidationError("reconstruct_eta: state does not match the Hamiltonian");
        }
        if (!trace.times.empty() && s.time < trace.times.back()) {
            throw ValidationError("reconstruct_eta: trajectory times must ascend");
        }
        const std::complex<double> c = s.amplitudes(emitter);
        const Eigen::VectorXcd hx = h.apply(s.amplitudes);
        const std::complex<double> dc = minus_i * hx(emitter);
        const std::complex<double> ddc = -h.apply(hx)(emitter);

        trace.times.push_back(s.time);
        trace.population.push_back(std::norm(c));
        if (std::abs(c) >= threshold) {
            const std::complex<double> ratio = dc / c;
            const std::complex<double> eta = -2.0 * ratio;
            const std::complex<double> rate = -2.0 * (ddc / c - ratio * ratio);
            trace.eta.push_back(eta);
            trace.eta_rate.push_back(rate);
            trace.gamma.push_back(eta.real());
            trace.delta.push_back(eta.imag());
            trace.valid.push_back(1);
        } else {
            trace.eta.push_back({kNaN, kNaN});
            trace.eta_rate.push_back({kNaN, kNaN});
            trace.gamma.push_back(kNaN);
            trace.delta.push_back(kNaN);
            trace.valid.push_back(0);
        }
    }
    return trace;
}

MasterEqTrace free_atom_interaction_frame(const MasterEqTrace& trace, double transition_frequency) {
    MasterEqTrace out = trace;
    // c1 -> c1 exp(i w t) adds i w to dc1/dt / c1, i.e. -2 i w to eta.
    const double shift = transition_frequency - (trace.frame == Frame::interaction
                                                     ? trace.frame_frequency
                                                     : 0.0);
    out.frame = Frame::interaction;
    out.frame_frequency = transition_frequency;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        if (!out.valid[i]) continue;
        out.eta[i] -= std::complex<double>(0.0, 2.0 * shift);
        out.delta[i] = out.eta[i].imag();
        out.gamma[i] = out.eta[i].real();
    }
    return out;
}

std::vector<double> reintegrate_population(const MasterEqTrace& trace) {
    const std::size_t n = trace.times.size();
    std::vector<double> out(n, kNaN);
    // Gamma itself spikes wherever c1 passes close to zero, but the rate of change
    // Gamma * P = -dP/dt stays smooth, so that product is what gets integrated.
    const auto flux = [&](std::size_t i) { return trace.gamma[i] * trace.population[i]; };
    const auto flux_rate = [&](std::size_t i) {
        const double g = trace.gamma[i];
        return (trace.eta_rate[i].real() - g * g) * trace.population[i];
    };
    double p = 0.0;
    bool running = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (!trace.valid[i]) {
            running = false;
            continue;
        }
        if (!running) {
            p = trace.population[i];
            running = true;
        } else {
            const double h = trace.times[i] - trace.times[i - 1];
            p -= 0.5 * h * (flux(i - 1) + flux(i)) + h * h / 12.0 * (flux_rate(i - 1) - flux_rate(i));
        }
        out[i] = p;
    }
    return out;
}

double average_gamma(const MasterEqTrace& trace, double t_lo, double t_hi) {
    return windowed_average(trace, trace.gamma, t_lo, t_hi);
}

double average_delta(const MasterEqTrace& trace, double t_lo, double t_hi) {
    return windowed_average(trace, trace.delta, t_lo, t_hi);
}

}  // namespace cqed
