#include "vctrl/integrator.hpp"

#include <cmath>
#include <string>

namespace vctrl {

void IntegratorConfig::validate() const
{
    if (method == Method::rk4_fixed && !(step > 0.0 && std::isfinite(step))) {
        throw ParamError("fixed step must be positive");
    }
    if (method == Method::adaptive && !(rel_tol > 0.0 && abs_tol > 0.0)) {
        throw ParamError("integrator tolerances must be positive");
    }
    if (output_points < 2) {
        throw ParamError("at least two output points are required");
    }
}

std::size_t output_points_for(double t_f, double per_day)
{
    return static_cast<std::size_t>(std::max(1.0, std::ceil(t_f * per_day - 1e-9))) + 1;
}

IntegratorConfig IntegratorConfig::for_horizon(double t_f)
{
    IntegratorConfig cfg;
    cfg.output_points = output_points_for(t_f);
    return cfg;
}

std::vector<double> uniform_grid(double t_f, std::size_t n)
{
    if (n < 2) {
        throw ParamError("a grid needs at least two points");
    }
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = t_f * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    g.back() = t_f;
    return g;
}

std::vector<double> merge_times(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> all;
    all.reserve(a.size() + b.size());
    all.insert(all.end(), a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    if (all.empty()) {
        return all;
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(all.back()));
    std::vector<double> out;
    out.reserve(all.size());
    for (double t : all) {
        if (out.empty() || t - out.back() > tol) {
            out.push_back(t);
        }
    }
    return out;
}

namespace {

std::vector<double> horizon_breakpoints(const ControlPolicy& policy, double t_f)
{
    const auto& bp = policy.breakpoints();
    const double tol = 1e-9 * std::max(1.0, t_f);
    if (std::abs(bp.front()) > tol || bp.back() < t_f - tol) {
        throw ParamError("policy does not cover [0, " + std::to_string(t_f) + "]");
    }
    std::vector<double> out;
    for (double t : bp) {
        if (t < t_f - tol) {
            out.push_back(t);
        }
    }
    out.push_back(t_f);
    return out;
}

void clamp_nonnegative(Trajectory& traj)
{
    for (auto& s : traj.states) {
        for (double& v : s) {
            if (v < 0.0) {
                v = 0.0;
            }
        }
    }
}

} // namespace

Trajectory integrate(SystemKind kind, const StateArray& x0, const ControlPolicy& policy, const EpiParams& p,
                     const IntegratorConfig& cfg, double t_f)
{
    p.validate();
    for (double v : x0) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ParamError("initial state must be finite and nonnegative");
        }
    }
    const std::vector<double> bps = horizon_breakpoints(policy, t_f);
    const auto& values = policy.values();

    Trajectory traj;
    if (kind == SystemKind::normalized) {
        const NormKernel kernel(p);
        auto sys = [&](double, const StateArray& x, std::size_t seg, StateArray& dx) {
            kernel(x, values[seg], dx);
        };
        traj = integrate_system<kNumCompartments>(sys, x0, bps, cfg, t_f);
        traj.scale = Scale::normalized;
    } else {
        auto sys = [&](double t, const StateArray& x, std::size_t seg, StateArray& dx) {
            dx = rhs_full(t, FullState{x}, values[seg], p).v;
        };
        traj = integrate_system<kNumCompartments>(sys, x0, bps, cfg, t_f);
        traj.scale = Scale::full;
    }
    clamp_nonnegative(traj);
    return traj;
}

Trajectory normalize(const Trajectory& full, const EpiParams& p)
{
    if (full.scale != Scale::full) {
        throw ParamError("trajectory is already normalized");
    }
    Trajectory out;
    out.times = full.times;
    out.scale = Scale::normalized;
    out.states.reserve(full.states.size());
    for (const auto& s : full.states) {
        out.states.push_back(normalize(FullState{s}, p).v);
    }
    return out;
}

} // namespace vctrl
