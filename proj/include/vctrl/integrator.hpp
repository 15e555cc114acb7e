#ifndef VCTRL_INTEGRATOR_HPP
#define VCTRL_INTEGRATOR_HPP

#include "vctrl/control_policy.hpp"
#include "vctrl/epi_model.hpp"
#include "vctrl/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace vctrl {

enum class Method { rk4_fixed, adaptive };

enum class Scale { full, normalized };

struct IntegratorConfig {
    Method method = Method::adaptive;
    double step = 0.05;     ///< rk4_fixed: largest step in days
    double rel_tol = 1e-8;  ///< adaptive
    double abs_tol = 1e-10; ///< adaptive
    std::size_t output_points = 337;

    void validate() const;

    /// Adaptive defaults with one output sample every quarter day.
    static IntegratorConfig for_horizon(double t_f);
};

/// Output points for a grid of `per_day` samples per day over [0, t_f].
std::size_t output_points_for(double t_f, double per_day = 4.0);

template <std::size_t Dim>
struct BasicTrajectory {
    std::vector<double> times;
    std::vector<std::array<double, Dim>> states;
    Scale scale = Scale::normalized;

    double t_end() const noexcept { return times.back(); }
};

using Trajectory = BasicTrajectory<kNumCompartments>;

/// n >= 2 equispaced times from 0 to t_f inclusive; the last is exactly t_f.
std::vector<double> uniform_grid(double t_f, std::size_t n);

/// Sorted union of two sorted time lists, merging points closer than a
/// relative 1e-12 of the horizon.
std::vector<double> merge_times(std::span<const double> a, std::span<const double> b);

/// Linear interpolation. Throws RangeError outside [times.front(), times.back()].
template <std::size_t Dim>
std::array<double, Dim> sample_at(const BasicTrajectory<Dim>& traj, double t)
{
    const auto& ts = traj.times;
    if (ts.empty() || !(t >= ts.front() && t <= ts.back())) {
        throw RangeError("sample time " + std::to_string(t) + " outside trajectory span");
    }
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    auto i = static_cast<std::size_t>(std::distance(ts.begin(), it));
    if (ts[i] == t) {
        return traj.states[i];
    }
    const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    std::array<double, Dim> out{};
    for (std::size_t c = 0; c < Dim; ++c) {
        out[c] = (1.0 - w) * traj.states[i - 1][c] + w * traj.states[i][c];
    }
    return out;
}

namespace detail {

template <std::size_t Dim>
bool all_finite(const std::array<double, Dim>& x) noexcept
{
    for (double v : x) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

template <std::size_t Dim>
void axpy(std::array<double, Dim>& out, const std::array<double, Dim>& x, double h,
          const std::array<double, Dim>& d) noexcept
{
    for (std::size_t i = 0; i < Dim; ++i) {
        out[i] = x[i] + h * d[i];
    }
}

} // namespace detail

/**
 * Classical fourth-order Runge-Kutta over [t0, t1] in equal steps no longer
 * than max_step. The step count depends only on the span, so the result is a
 * smooth function of anything the system depends on.
 *
 * System signature: void(double t, const std::array<double,Dim>& x,
 *                        std::size_t segment, std::array<double,Dim>& dx).
 */
template <std::size_t Dim, class System>
void rk4_advance(const System& f, std::size_t segment, double t0, double t1, double max_step,
                 std::array<double, Dim>& x)
{
    const double span = t1 - t0;
    if (span <= 0.0) {
        return;
    }
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / max_step - 1e-9)));
    const double h = span / static_cast<double>(n);
    std::array<double, Dim> k1{}, k2{}, k3{}, k4{}, tmp{};
    for (std::size_t s = 0; s < n; ++s) {
        const double t = t0 + static_cast<double>(s) * h;
        f(t, x, segment, k1);
        detail::axpy(tmp, x, 0.5 * h, k1);
        f(t + 0.5 * h, tmp, segment, k2);
        detail::axpy(tmp, x, 0.5 * h, k2);
        f(t + 0.5 * h, tmp, segment, k3);
        detail::axpy(tmp, x, h, k3);
        f(t + h, tmp, segment, k4);
        for (std::size_t i = 0; i < Dim; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    if (!detail::all_finite(x)) {
        throw IntegrationDiverged(t1, "non-finite state");
    }
}

/// Dormand-Prince 5(4) with step-size control. Keeps its step proposal
/// between calls so consecutive spans continue smoothly.
template <std::size_t Dim>
class DormandPrince {
public:
    DormandPrince(double rel_tol, double abs_tol) : rel_tol_(rel_tol), abs_tol_(abs_tol) {}

    std::size_t accepted_steps() const noexcept { return accepted_; }
    std::size_t rejected_steps() const noexcept { return rejected_; }

    template <class System>
    void advance(const System& f, std::size_t segment, double t0, double t1, std::array<double, Dim>& x)
    {
        using std::abs;
        constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                         a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                         a65 = -5103.0 / 18656;
        constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                         b6 = 11.0 / 84;
        // difference between 5th and embedded 4th order weights
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                         e6 = 22.0 / 525, e7 = -1.0 / 40;

        double t = t0;
        std::array<double, Dim> k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, tmp{}, xn{};
        if (h_ <= 0.0) {
            h_ = initial_step(f, segment, t0, t1, x);
        }
        f(t, x, segment, k1);
        while (t < t1) {
            double h = h_;
            bool clipped = false;
            if (t + h >= t1 || t1 - (t + h) < 1e-10 * h) {
                h = t1 - t;
                clipped = true;
            }
            if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, abs(t))) {
                throw IntegrationDiverged(t, "step size underflow");
            }
            for (std::size_t i = 0; i < Dim; ++i) tmp[i] = x[i] + h * a21 * k1[i];
            f(t + c2 * h, tmp, segment, k2);
            for (std::size_t i = 0; i < Dim; ++i) tmp[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
            f(t + c3 * h, tmp, segment, k3);
            for (std::size_t i = 0; i < Dim; ++i) tmp[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            f(t + c4 * h, tmp, segment, k4);
            for (std::size_t i = 0; i < Dim; ++i)
                tmp[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            f(t + c5 * h, tmp, segment, k5);
            for (std::size_t i = 0; i < Dim; ++i)
                tmp[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            f(t + h, tmp, segment, k6);
            for (std::size_t i = 0; i < Dim; ++i)
                xn[i] = x[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            f(t + h, xn, segment, k7);

            double err = 0.0;
            for (std::size_t i = 0; i < Dim; ++i) {
                const double ei =
                    h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = abs_tol_ + rel_tol_ * std::max(abs(x[i]), abs(xn[i]));
                err += (ei / sc) * (ei / sc);
            }
            err = std::sqrt(err / static_cast<double>(Dim));

            if (!std::isfinite(err)) {
                // a blown-up trial step is treated as a rejection
                h_ = 0.2 * h;
                ++rejected_;
                if (++consecutive_nonfinite_ > 50) {
                    throw IntegrationDiverged(t, "non-finite state");
                }
                continue;
            }
            consecutive_nonfinite_ = 0;

            const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                t = clipped ? t1 : t + h;
                x = xn;
                k1 = k7;
                ++accepted_;
                if (!clipped) {
                    h_ = h * fac;
                } else {
                    h_ = std::max(h_ * std::min(fac, 1.0), h * fac);
                }
            } else {
                h_ = h * std::min(fac, 1.0);
                ++rejected_;
            }
            if (accepted_ + rejected_ > max_steps_) {
                throw IntegrationDiverged(t, "step budget exhausted");
            }
        }
        if (!detail::all_finite(x)) {
            throw IntegrationDiverged(t1, "non-finite state");
        }
    }

private:
    template <class System>
    double initial_step(const System& f, std::size_t segment, double t0, double t1,
                        const std::array<double, Dim>& x) const
    {
        std::array<double, Dim> dx{};
        f(t0, x, segment, dx);
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < Dim; ++i) {
            const double sc = abs_tol_ + rel_tol_ * std::abs(x[i]);
            d0 += (x[i] / sc) * (x[i] / sc);
            d1 += (dx[i] / sc) * (dx[i] / sc);
        }
        d0 = std::sqrt(d0 / Dim);
        d1 = std::sqrt(d1 / Dim);
        double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        return std::min(h, t1 - t0);
    }

    double rel_tol_;
    double abs_tol_;
    double h_ = 0.0;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
    std::size_t consecutive_nonfinite_ = 0;
    std::size_t max_steps_ = 50'000'000;
};

/**
 * Integrates a system over [0, t_f], reporting states on the uniform output
 * grid. `breakpoints` (sorted, from 0 to t_f, may be empty) mark where the
 * system's right-hand side may jump; no step crosses one, and the system
 * receives the index of the piece it is evaluated in.
 */
template <std::size_t Dim, class System>
BasicTrajectory<Dim> integrate_system(const System& f, const std::array<double, Dim>& x0,
                                      std::span<const double> breakpoints, const IntegratorConfig& cfg,
                                      double t_f)
{
    cfg.validate();
    if (!(t_f > 0.0) || !std::isfinite(t_f)) {
        throw ParamError("integration horizon must be positive");
    }
    const std::vector<double> outputs = uniform_grid(t_f, cfg.output_points);
    std::vector<double> bps(breakpoints.begin(), breakpoints.end());
    if (bps.empty()) {
        bps = {0.0, t_f};
    }
    const std::vector<double> mesh = merge_times(bps, outputs);

    BasicTrajectory<Dim> traj;
    traj.times = outputs;
    traj.states.reserve(outputs.size());
    traj.states.push_back(x0);

    std::array<double, Dim> x = x0;
    DormandPrince<Dim> dopri(cfg.rel_tol, cfg.abs_tol);
    std::size_t segment = 0;
    std::size_t next_out = 1;
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
        const double t0 = mesh[i];
        const double t1 = mesh[i + 1];
        while (segment + 2 < bps.size() && t0 >= bps[segment + 1]) {
            ++segment;
        }
        if (cfg.method == Method::rk4_fixed) {
            rk4_advance<Dim>(f, segment, t0, t1, cfg.step, x);
        } else {
            dopri.advance(f, segment, t0, t1, x);
        }
        while (next_out < outputs.size() && outputs[next_out] <= t1) {
            traj.states.push_back(x);
            ++next_out;
        }
    }
    return traj;
}

enum class SystemKind { full, normalized };

/**
 * Integrates the dengue model under a control policy. x0 is in the scale of
 * `kind`; the policy must cover [0, t_f]. Emitted states are clamped at zero
 * to remove integrator undershoot.
 */
Trajectory integrate(SystemKind kind, const StateArray& x0, const ControlPolicy& policy, const EpiParams& p,
                     const IntegratorConfig& cfg, double t_f);

/// Normalizes every sample of a full-scale trajectory.
Trajectory normalize(const Trajectory& full, const EpiParams& p);

} // namespace vctrl

#endif
