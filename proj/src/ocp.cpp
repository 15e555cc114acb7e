#include "vctrl/ocp.hpp"

#include "vctrl/errors.hpp"
#include "vctrl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

namespace vctrl {

void CostWeights::validate() const
{
    const double w[] = {gamma_D, gamma_S, gamma_L, gamma_E};
    bool any = false;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ParamError("cost weights must be finite and nonnegative");
        }
        any = any || v > 0.0;
    }
    if (!any) {
        throw ParamError("at least one cost weight must be positive");
    }
}

CostWeights scenario_weights(WeightCase c) noexcept
{
    switch (c) {
    case WeightCase::A:
        return {0.25, 0.25, 0.25, 0.25};
    case WeightCase::B:
        return {0.55, 0.15, 0.15, 0.15};
    case WeightCase::C:
        return {0.10, 0.30, 0.30, 0.30};
    }
    return {};
}

WeightCase parse_weight_case(std::string_view text)
{
    if (text == "A" || text == "a") return WeightCase::A;
    if (text == "B" || text == "b") return WeightCase::B;
    if (text == "C" || text == "c") return WeightCase::C;
    throw ParamError("unknown weight case '" + std::string(text) + "' (expected A, B or C)");
}

std::string_view to_string(WeightCase c) noexcept
{
    switch (c) {
    case WeightCase::A:
        return "A";
    case WeightCase::B:
        return "B";
    case WeightCase::C:
        return "C";
    }
    return "?";
}

Channel parse_channel(std::string_view text)
{
    if (text == "larvicide") return Channel::larvicide;
    if (text == "adulticide") return Channel::adulticide;
    if (text == "mechanical") return Channel::mechanical;
    throw ParamError("unknown control channel '" + std::string(text) +
                     "' (expected adulticide, larvicide or mechanical)");
}

std::string_view to_string(Channel c) noexcept
{
    switch (c) {
    case Channel::larvicide:
        return "larvicide";
    case Channel::adulticide:
        return "adulticide";
    case Channel::mechanical:
        return "mechanical";
    }
    return "?";
}

double channel_value(const ControlTriple& u, Channel c) noexcept
{
    switch (c) {
    case Channel::larvicide:
        return u.c_A;
    case Channel::adulticide:
        return u.c_m;
    case Channel::mechanical:
        return u.alpha;
    }
    return 0.0;
}

void set_channel_value(ControlTriple& u, Channel c, double v) noexcept
{
    switch (c) {
    case Channel::larvicide:
        u.c_A = v;
        break;
    case Channel::adulticide:
        u.c_m = v;
        break;
    case Channel::mechanical:
        u.alpha = v;
        break;
    }
}

IntegratorConfig OcpProblem::default_ocp_integrator(double t_f)
{
    IntegratorConfig cfg;
    cfg.method = Method::rk4_fixed;
    cfg.step = 0.05;
    cfg.output_points = output_points_for(t_f);
    return cfg;
}

OcpProblem OcpProblem::with_horizon(double t_f, std::size_t n_intervals)
{
    OcpProblem prob;
    prob.t_f = t_f;
    prob.n_intervals =
        n_intervals > 0 ? n_intervals : static_cast<std::size_t>(std::max(1.0, std::round(t_f)));
    prob.integrator = default_ocp_integrator(t_f);
    return prob;
}

void OcpProblem::validate() const
{
    params.validate();
    weights.validate();
    integrator.validate();
    if (!(t_f > 0.0) || !std::isfinite(t_f)) {
        throw ParamError("t_f must be positive");
    }
    if (n_intervals < 1) {
        throw ParamError("at least one control interval is required");
    }
    for (double v : x0.v) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ParamError("initial state must be finite and nonnegative");
        }
    }
    bounds.check(frozen);
}

namespace {

constexpr std::size_t kAugDim = kNumCompartments + 1;
constexpr std::size_t kCost = kNumCompartments;
using Aug = std::array<double, kAugDim>;

double channel_lower(Channel c, const ControlBounds& b) noexcept
{
    return c == Channel::mechanical ? b.alpha_min : 0.0;
}

/// Normalized dynamics with the running cost as a seventh state.
struct AugmentedSystem {
    const NormKernel& kernel;
    const CostWeights& w;
    const std::vector<ControlTriple>& values;

    void operator()(double, const Aug& x, std::size_t seg, Aug& dx) const noexcept
    {
        const ControlTriple& u = values[seg];
        kernel(x, u, dx);
        const double e = 1.0 - u.alpha;
        dx[kCost] = w.gamma_D * x[kIh] * x[kIh] + w.gamma_S * u.c_m * u.c_m + w.gamma_L * u.c_A * u.c_A +
                    w.gamma_E * e * e;
    }
};

/**
 * Walks the mesh formed by the policy breakpoints and the output grid.
 * Perturbing interval j leaves everything before breakpoint j untouched, so
 * runs can restart from a stored breakpoint state.
 */
class CostRunner {
public:
    CostRunner(const ControlPolicy& policy, const OcpProblem& prob) : prob_(prob), kernel_(prob.params)
    {
        const double tol = 1e-9 * std::max(1.0, prob.t_f);
        const auto& bp = policy.breakpoints();
        if (std::abs(bp.front()) > tol || std::abs(bp.back() - prob.t_f) > tol) {
            throw ParamError("policy must span exactly [0, t_f]");
        }
        outputs_ = uniform_grid(prob.t_f, prob.integrator.output_points);
        mesh_ = merge_times(bp, outputs_);
        mesh_.back() = prob.t_f;

        const std::size_t n = policy.size();
        segment_.resize(mesh_.size(), 0);
        output_at_.assign(mesh_.size(), -1);
        break_at_.assign(n, 0);
        std::size_t seg = 0;
        for (std::size_t i = 0; i < mesh_.size(); ++i) {
            while (seg + 1 < n && mesh_[i] >= bp[seg + 1] - tol) {
                ++seg;
            }
            segment_[i] = seg;
        }
        for (std::size_t j = 0; j < n; ++j) {
            break_at_[j] = nearest(bp[j]);
        }
        for (std::size_t k = 0; k < outputs_.size(); ++k) {
            output_at_[nearest(outputs_[k])] = static_cast<long>(k);
        }
    }

    /// Integrates from breakpoint `from` with augmented state x; returns the
    /// final accumulated cost. Optionally records output samples and the
    /// state at every breakpoint passed.
    double run(const std::vector<ControlTriple>& values, double step, std::size_t from, Aug x,
               Trajectory* out = nullptr, std::vector<Aug>* at_breaks = nullptr) const
    {
        const AugmentedSystem sys{kernel_, prob_.weights, values};
        std::optional<DormandPrince<kAugDim>> dopri;
        if (prob_.integrator.method == Method::adaptive) {
            dopri.emplace(prob_.integrator.rel_tol, prob_.integrator.abs_tol);
        }
        std::size_t next_break = from;
        for (std::size_t i = break_at_[from]; i < mesh_.size(); ++i) {
            if (at_breaks && next_break < break_at_.size() && break_at_[next_break] == i) {
                (*at_breaks)[next_break++] = x;
            }
            if (out && output_at_[i] >= 0) {
                record(*out, static_cast<std::size_t>(output_at_[i]), x);
            }
            if (i + 1 == mesh_.size()) {
                break;
            }
            if (dopri) {
                dopri->advance(sys, segment_[i], mesh_[i], mesh_[i + 1], x);
            } else {
                rk4_advance<kAugDim>(sys, segment_[i], mesh_[i], mesh_[i + 1], step, x);
            }
        }
        return x[kCost];
    }

    std::size_t output_count() const noexcept { return outputs_.size(); }
    const std::vector<double>& outputs() const noexcept { return outputs_; }

private:
    std::size_t nearest(double t) const
    {
        auto it = std::lower_bound(mesh_.begin(), mesh_.end(), t - 1e-9 * std::max(1.0, prob_.t_f));
        return static_cast<std::size_t>(std::distance(mesh_.begin(), it));
    }

    static void record(Trajectory& out, std::size_t k, const Aug& x)
    {
        for (std::size_t c = 0; c < kNumCompartments; ++c) {
            out.states[k][c] = std::max(0.0, x[c]);
        }
    }

    const OcpProblem& prob_;
    NormKernel kernel_;
    std::vector<double> outputs_;
    std::vector<double> mesh_;
    std::vector<std::size_t> segment_;
    std::vector<long> output_at_;
    std::vector<std::size_t> break_at_;
};

Aug initial_aug(const OcpProblem& prob)
{
    Aug x{};
    std::copy(prob.x0.v.begin(), prob.x0.v.end(), x.begin());
    return x;
}

} // namespace

double stable_rk4_step(const ControlPolicy& policy, const OcpProblem& prob)
{
    const EpiParams& p = prob.params;
    const NormKernel k(p);
    // bound on the adult vector fraction s_m + i_m along any admissible trajectory
    const double adults = std::max(prob.x0[kSm] + prob.x0[kIm], k.mature * std::max(prob.x0[kAm], 1.0) / p.mu_m);
    const double stiffest = k.lay * adults / policy.min_alpha() + k.aquatic_loss + 1.0 + k.infect_h * adults +
                            p.eta_h + p.mu_h + k.infect_m + p.mu_m + 1.0;
    // RK4 is stable on the negative real axis up to about 2.78
    return std::min(prob.integrator.step, 2.5 / stiffest);
}

CostResult evaluate_cost(const ControlPolicy& policy, const OcpProblem& prob)
{
    prob.validate();
    const CostRunner runner(policy, prob);
    CostResult res{0.0, {}};
    res.trajectory.times = runner.outputs();
    res.trajectory.states.assign(runner.output_count(), StateArray{});
    res.trajectory.scale = Scale::normalized;
    res.objective = runner.run(policy.values(), stable_rk4_step(policy, prob), 0, initial_aug(prob), &res.trajectory);
    return res;
}

double objective(const ControlPolicy& policy, const OcpProblem& prob)
{
    prob.validate();
    const CostRunner runner(policy, prob);
    return runner.run(policy.values(), stable_rk4_step(policy, prob), 0, initial_aug(prob));
}

std::vector<double> fd_gradient(const ControlPolicy& policy, const OcpProblem& prob, std::size_t threads)
{
    prob.validate();
    const CostRunner runner(policy, prob);
    const std::size_t n = policy.size();
    const double step = stable_rk4_step(policy, prob);

    std::vector<Aug> at_breaks(n);
    const double base = runner.run(policy.values(), step, 0, initial_aug(prob), nullptr, &at_breaks);

    struct Task {
        std::size_t interval;
        Channel channel;
    };
    std::vector<Task> tasks;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            if (prob.free_channels[c]) {
                tasks.push_back({j, static_cast<Channel>(c)});
            }
        }
    }

    std::vector<double> grad(kNumChannels * n, 0.0);
    parallel_for(tasks.size(), threads, [&](std::size_t t) {
        const auto [j, ch] = tasks[t];
        const double v = channel_value(policy[j], ch);
        const double h = 1e-6 * std::max(1.0, std::abs(v));
        const double lo = channel_lower(ch, policy.bounds());
        const double hi = 1.0;

        std::vector<ControlTriple> values = policy.values();
        auto perturbed = [&](double value) {
            set_channel_value(values[j], ch, value);
            return runner.run(values, step, j, at_breaks[j]);
        };
        double g;
        if (v - h < lo) {
            g = (perturbed(v + h) - base) / h;
        } else if (v + h > hi) {
            g = (base - perturbed(v - h)) / h;
        } else {
            g = (perturbed(v + h) - perturbed(v - h)) / (2.0 * h);
        }
        grad[kNumChannels * j + static_cast<std::size_t>(ch)] = g;
    });
    return grad;
}

ControlPolicy initial_guess(const OcpProblem& prob)
{
    ControlTriple u = prob.frozen;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        if (prob.free_channels[c]) {
            set_channel_value(u, static_cast<Channel>(c), 0.5);
        }
    }
    return ControlPolicy::constant(prob.t_f, prob.n_intervals, u, prob.bounds);
}

namespace {

ControlPolicy random_policy_from(const OcpProblem& prob, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ControlPolicy base = ControlPolicy::constant(prob.t_f, prob.n_intervals, prob.frozen, prob.bounds);
    std::vector<ControlTriple> values = base.values();
    for (auto& u : values) {
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            if (prob.free_channels[c]) {
                const auto ch = static_cast<Channel>(c);
                const double lo = channel_lower(ch, prob.bounds);
                set_channel_value(u, ch, lo + (1.0 - lo) * unit(rng));
            }
        }
    }
    return ControlPolicy(base.breakpoints(), std::move(values), prob.bounds);
}

/// Maps the free channels of a policy to a flat variable vector.
class Variables {
public:
    Variables(const OcpProblem& prob, const ControlPolicy& shape) : prob_(prob), shape_(shape)
    {
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            if (prob.free_channels[c]) {
                channels_.push_back(static_cast<Channel>(c));
            }
        }
        lower_.reserve(size());
        for (std::size_t j = 0; j < shape.size(); ++j) {
            for (Channel ch : channels_) {
                lower_.push_back(channel_lower(ch, prob.bounds));
            }
        }
    }

    std::size_t size() const noexcept { return shape_.size() * channels_.size(); }
    double lower(std::size_t i) const noexcept { return lower_[i]; }
    static double upper() noexcept { return 1.0; }

    std::vector<double> from_policy(const ControlPolicy& policy) const
    {
        std::vector<double> x;
        x.reserve(size());
        for (std::size_t j = 0; j < policy.size(); ++j) {
            for (Channel ch : channels_) {
                x.push_back(channel_value(policy[j], ch));
            }
        }
        return x;
    }

    ControlPolicy to_policy(const std::vector<double>& x) const
    {
        std::vector<ControlTriple> values(shape_.size(), prob_.frozen);
        std::size_t i = 0;
        for (auto& u : values) {
            for (Channel ch : channels_) {
                set_channel_value(u, ch, x[i++]);
            }
        }
        return ControlPolicy(shape_.breakpoints(), std::move(values), prob_.bounds);
    }

    std::vector<double> restrict_gradient(const std::vector<double>& full) const
    {
        std::vector<double> g;
        g.reserve(size());
        for (std::size_t j = 0; j < shape_.size(); ++j) {
            for (Channel ch : channels_) {
                g.push_back(full[kNumChannels * j + static_cast<std::size_t>(ch)]);
            }
        }
        return g;
    }

    void project(std::vector<double>& x) const noexcept
    {
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = std::clamp(x[i], lower_[i], upper());
        }
    }

private:
    const OcpProblem& prob_;
    const ControlPolicy& shape_;
    std::vector<Channel> channels_;
    std::vector<double> lower_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) noexcept
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct LocalResult {
    std::vector<double> x;
    double f;
    std::size_t iterations;
    double pg_norm;
    bool converged;
    std::string reason;
    std::vector<double> history;
};

LocalResult solve_local(const OcpProblem& prob, const Variables& vars, std::vector<double> x,
                        const SolverOptions& opt)
{
    const std::size_t n = vars.size();
    vars.project(x);

    auto eval_f = [&](const std::vector<double>& v) {
        try {
            return objective(vars.to_policy(v), prob);
        } catch (const IntegrationDiverged&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    auto eval_g = [&](const std::vector<double>& v) {
        return vars.restrict_gradient(fd_gradient(vars.to_policy(v), prob, opt.threads));
    };
    auto pg_norm = [&](const std::vector<double>& v, const std::vector<double>& g) {
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double moved = std::clamp(v[i] - g[i], vars.lower(i), Variables::upper());
            r = std::max(r, std::abs(moved - v[i]));
        }
        return r;
    };

    double f = objective(vars.to_policy(x), prob);
    std::vector<double> g = eval_g(x);
    LocalResult res{x, f, 0, pg_norm(x, g), false, "iteration limit", {f}};

    std::deque<std::vector<double>> S, Y;
    std::vector<double> d(n), q(n), x_new(n), step(n);
    std::vector<char> free(n);

    while (res.iterations < opt.max_iterations) {
        res.pg_norm = pg_norm(x, g);
        if (res.pg_norm <= opt.projected_gradient_tol) {
            res.converged = true;
            res.reason = "projected gradient";
            break;
        }
        const auto& h = res.history;
        if (h.size() > opt.stall_window && h[h.size() - 1 - opt.stall_window] - f <= opt.stall_tol) {
            res.converged = true;
            res.reason = "objective stalled";
            break;
        }

        // variables held at a bound by the gradient stay fixed this iteration
        for (std::size_t i = 0; i < n; ++i) {
            const bool at_lo = x[i] <= vars.lower(i) && g[i] > 0.0;
            const bool at_hi = x[i] >= Variables::upper() && g[i] < 0.0;
            free[i] = !(at_lo || at_hi);
        }
        auto mask = [&](std::vector<double>& v) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!free[i]) v[i] = 0.0;
            }
        };

        // two-loop recursion on the free subspace
        q = g;
        mask(q);
        std::vector<double> a(S.size());
        for (std::size_t k = S.size(); k-- > 0;) {
            a[k] = dot(S[k], q) / dot(Y[k], S[k]);
            for (std::size_t i = 0; i < n; ++i) q[i] -= a[k] * Y[k][i];
        }
        mask(q);
        const double scale = S.empty() ? 1.0 : dot(S.back(), Y.back()) / dot(Y.back(), Y.back());
        for (std::size_t i = 0; i < n; ++i) d[i] = scale * q[i];
        for (std::size_t k = 0; k < S.size(); ++k) {
            const double b = dot(Y[k], d) / dot(Y[k], S[k]);
            for (std::size_t i = 0; i < n; ++i) d[i] += (a[k] - b) * S[k][i];
        }
        mask(d);
        for (double& v : d) v = -v;

        if (!(dot(g, d) < 0.0)) {
            d = g;
            mask(d);
            for (double& v : d) v = -v;
            S.clear();
            Y.clear();
        }

        double t = 1.0;
        if (S.empty()) {
            double dmax = 0.0;
            for (double v : d) dmax = std::max(dmax, std::abs(v));
            t = dmax > 1.0 ? 1.0 / dmax : 1.0;
        }
        bool accepted = false;
        double f_new = f;
        for (int trial = 0; trial < 40; ++trial, t *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + t * d[i];
            vars.project(x_new);
            for (std::size_t i = 0; i < n; ++i) step[i] = x_new[i] - x[i];
            const double slope = dot(g, step);
            if (!(slope < 0.0)) {
                continue;
            }
            f_new = eval_f(x_new);
            if (f_new <= f + 1e-4 * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!S.empty()) {
                S.clear();
                Y.clear();
                continue;
            }
            res.converged = false;
            res.reason = "line search failed";
            break;
        }

        std::vector<double> g_new = eval_g(x_new);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = g_new[i] - g[i];
        const double sy = dot(step, y);
        if (sy > 1e-12 * std::sqrt(dot(step, step) * dot(y, y))) {
            S.push_back(step);
            Y.push_back(std::move(y));
            if (S.size() > opt.memory) {
                S.pop_front();
                Y.pop_front();
            }
        }
        x = x_new;
        f = f_new;
        g = std::move(g_new);
        ++res.iterations;
        res.history.push_back(f);
    }
    res.x = x;
    res.f = f;
    res.pg_norm = pg_norm(x, g);
    return res;
}

} // namespace

ControlPolicy random_policy(const OcpProblem& prob, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    return random_policy_from(prob, rng);
}

OcpSolution solve(const OcpProblem& prob, const ControlPolicy& init, const SolverOptions& options)
{
    prob.validate();
    if (std::abs(init.t_end() - prob.t_f) > 1e-9 * std::max(1.0, prob.t_f)) {
        throw ParamError("initial policy must span [0, t_f]");
    }
    const Variables vars(prob, init);
    if (vars.size() == 0) {
        throw ParamError("no free control channel to optimize");
    }

    std::vector<std::vector<double>> starts{vars.from_policy(init)};
    std::mt19937_64 rng(options.seed);
    for (std::size_t s = 0; s < options.multistart; ++s) {
        starts.push_back(vars.from_policy(random_policy_from(prob, rng)));
    }

    std::optional<LocalResult> best;
    std::vector<double> finals;
    for (auto& x0 : starts) {
        LocalResult r = solve_local(prob, vars, std::move(x0), options);
        finals.push_back(r.f);
        if (!best || r.f < best->f) {
            best = std::move(r);
        }
    }

    ControlPolicy policy = vars.to_policy(best->x);
    CostResult cost = evaluate_cost(policy, prob);
    return OcpSolution{std::move(policy),
                       cost.objective,
                       std::move(cost.trajectory),
                       best->iterations,
                       best->pg_norm,
                       best->converged,
                       best->reason,
                       std::move(best->history),
                       std::move(finals)};
}

OcpProblem single_control_problem(Channel channel, const OcpProblem& prob)
{
    OcpProblem out = prob;
    out.weights = {0.5, 0.0, 0.0, 0.0};
    switch (channel) {
    case Channel::adulticide:
        out.weights.gamma_S = 0.5;
        break;
    case Channel::larvicide:
        out.weights.gamma_L = 0.5;
        break;
    case Channel::mechanical:
        out.weights.gamma_E = 0.5;
        break;
    }
    out.free_channels = {false, false, false};
    out.free_channels[static_cast<std::size_t>(channel)] = true;
    out.frozen = no_control;
    return out;
}

} // namespace vctrl
