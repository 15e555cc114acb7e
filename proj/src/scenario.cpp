#include "vctrl/scenario.hpp"

#include "vctrl/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <system_error>

namespace fs = std::filesystem;

namespace vctrl {

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9e", v == 0.0 ? 0.0 : v);
    return buf;
}

std::pair<double, double> infection_peak(const Trajectory& traj)
{
    double peak = -1.0;
    double when = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        if (traj.states[k][kIh] > peak) {
            peak = traj.states[k][kIh];
            when = traj.times[k];
        }
    }
    return {peak, when};
}

namespace {

/// Output file that reports failures as IoError.
class CsvFile {
public:
    explicit CsvFile(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc)
    {
        if (!out_) {
            throw IoError("cannot open " + path.string() + " for writing");
        }
    }

    CsvFile& operator<<(std::string_view s)
    {
        out_ << s;
        return *this;
    }

    CsvFile& operator<<(char c)
    {
        out_ << c;
        return *this;
    }

    void row(std::initializer_list<double> values)
    {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            out_ << format_number(v);
            first = false;
        }
        out_ << '\n';
    }

    void close()
    {
        out_.close();
        if (!out_) {
            throw IoError("failed writing " + path_.string());
        }
    }

private:
    fs::path path_;
    std::ofstream out_;
};

void write_curve(const fs::path& path, std::string_view name, const std::vector<double>& t,
                 const std::vector<double>& values)
{
    CsvFile f(path);
    f << "t," << name << "\n";
    for (std::size_t k = 0; k < t.size(); ++k) {
        f.row({t[k], values[k]});
    }
    f.close();
}

std::vector<double> compartment(const Trajectory& traj, std::size_t c)
{
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const auto& s : traj.states) {
        out.push_back(s[c]);
    }
    return out;
}

std::vector<double> channel_series(const ControlPolicy& policy, Channel ch, const std::vector<double>& t)
{
    std::vector<double> out;
    out.reserve(t.size());
    for (double time : t) {
        out.push_back(channel_value(policy.at(time), ch));
    }
    return out;
}

std::string_view channel_symbol(Channel ch) noexcept
{
    switch (ch) {
    case Channel::larvicide:
        return "c_A";
    case Channel::adulticide:
        return "c_m";
    case Channel::mechanical:
        return "alpha";
    }
    return "?";
}

fs::path prepare_dir(const std::string& dir)
{
    const fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) {
        throw IoError("cannot create output directory " + dir);
    }
    return p;
}

SummaryRow summarize(std::string name, const OcpSolution& sol)
{
    const auto [peak, when] = infection_peak(sol.trajectory);
    return {std::move(name), sol.objective, peak, when, 0.0, sol.iterations, sol.converged};
}

SummaryRow summarize(std::string name, const CostResult& cost, std::size_t iterations = 0, bool converged = true)
{
    const auto [peak, when] = infection_peak(cost.trajectory);
    return {std::move(name), cost.objective, peak, when, 0.0, iterations, converged};
}

struct Context {
    const RunConfig& cfg;
    fs::path dir;
    RunResult result;

    fs::path file(const std::string& name)
    {
        fs::path p = dir / name;
        result.files.push_back(p);
        return p;
    }

    void note(const OcpSolution& sol)
    {
        if (!sol.converged) {
            result.exit_code = kExitNotConverged;
        }
    }
};

OcpSolution optimize(const OcpProblem& prob, const RunConfig& cfg)
{
    return solve(prob, initial_guess(prob), cfg.solver_options());
}

ControlPolicy no_control_policy(const OcpProblem& prob)
{
    return ControlPolicy::constant(prob.t_f, prob.n_intervals, no_control, prob.bounds);
}

void run_optimize(Context& ctx, const OcpProblem& prob, bool with_baseline)
{
    const OcpSolution sol = optimize(prob, ctx.cfg);
    ctx.note(sol);
    write_trajectory_csv(ctx.file("trajectory.csv"), sol.trajectory);
    write_controls_csv(ctx.file("controls.csv"), sol.policy, sol.trajectory.times);

    std::vector<SummaryRow> rows;
    rows.push_back(summarize("optimal", sol));
    rows.back().r0_initial = r0_closed_form(sol.policy[0], prob.params);
    if (with_baseline) {
        const CostResult base = evaluate_cost(no_control_policy(prob), prob);
        write_trajectory_csv(ctx.file("baseline_trajectory.csv"), base.trajectory);
        rows.push_back(summarize("baseline", base));
        rows.back().r0_initial = r0_closed_form(no_control, prob.params);
    }
    write_summary_csv(ctx.file("summary.csv"), rows);
}

void run_simulate(Context& ctx)
{
    const RunConfig& cfg = ctx.cfg;
    const OcpProblem prob = cfg.problem();
    const ControlPolicy policy = ControlPolicy::constant(cfg.t_f, cfg.intervals(), cfg.controls, cfg.bounds);
    IntegratorConfig icfg = cfg.simulation_integrator();
    if (icfg.method == Method::rk4_fixed) {
        // small alpha makes the larval equation stiff; shrink the step like the optimizer does
        OcpProblem capped = prob;
        capped.integrator.step = icfg.step;
        icfg.step = stable_rk4_step(policy, capped);
    }
    const Trajectory traj = integrate(SystemKind::normalized, prob.x0.v, policy, cfg.params, icfg, cfg.t_f);
    write_trajectory_csv(ctx.file("trajectory.csv"), traj);
    write_controls_csv(ctx.file("controls.csv"), policy, traj.times);

    const auto [peak, when] = infection_peak(traj);
    SummaryRow row{"simulation", objective(policy, prob), peak, when, r0_closed_form(cfg.controls, cfg.params), 0,
                   true};
    write_summary_csv(ctx.file("summary.csv"), {row});
}

void run_r0_point(Context& ctx)
{
    const double nan = std::nan("");
    SummaryRow row{"r0", nan, nan, nan, r0_closed_form(ctx.cfg.controls, ctx.cfg.params), 0, true};
    write_summary_csv(ctx.file("summary.csv"), {row});
}

void write_sweep(Context& ctx, SweepPair pair, double fixed, const std::string& prefix)
{
    const RunConfig& cfg = ctx.cfg;
    const R0Grid grid = sweep(pair, fixed, cfg.sweep_resolution, cfg.params, cfg.bounds.alpha_min);
    write_r0_grid_csv(ctx.file(prefix + "r0_grid.csv"), grid);
    const auto curve = threshold_curve(pair, fixed, cfg.sweep_resolution, cfg.params, cfg.bounds.alpha_min);
    write_threshold_csv(ctx.file(prefix + "threshold.csv"), grid, curve);
}

} // namespace

void write_trajectory_csv(const fs::path& path, const Trajectory& traj)
{
    if (traj.scale != Scale::normalized) {
        throw ParamError("trajectory CSV expects normalized states");
    }
    CsvFile f(path);
    f << "t,s_h,i_h,r_h,a_m,s_m,i_m\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto& s = traj.states[k];
        f.row({traj.times[k], s[kSh], s[kIh], s[kRh], s[kAm], s[kSm], s[kIm]});
    }
    f.close();
}

void write_controls_csv(const fs::path& path, const ControlPolicy& policy, const std::vector<double>& times)
{
    CsvFile f(path);
    f << "t,c_A,c_m,alpha\n";
    for (double t : times) {
        const ControlTriple& u = policy.at(t);
        f.row({t, u.c_A, u.c_m, u.alpha});
    }
    f.close();
}

void write_r0_grid_csv(const fs::path& path, const R0Grid& grid)
{
    CsvFile f(path);
    f << "# x_name,y_name,fixed_name,fixed_value\n";
    f << "# " << to_string(grid.x_name) << ',' << to_string(grid.y_name) << ',' << to_string(grid.fixed_name)
      << ',' << format_number(grid.fixed_value) << '\n';
    f << "x,y,r0\n";
    for (std::size_t iy = 0; iy < grid.y.size(); ++iy) {
        for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
            f.row({grid.x[ix], grid.y[iy], grid.at(ix, iy)});
        }
    }
    f.close();
}

void write_threshold_csv(const fs::path& path, const R0Grid& grid, const std::vector<ThresholdPoint>& curve)
{
    CsvFile f(path);
    f << "# x_name,y_name,fixed_name,fixed_value\n";
    f << "# " << to_string(grid.x_name) << ',' << to_string(grid.y_name) << ',' << to_string(grid.fixed_name)
      << ',' << format_number(grid.fixed_value) << '\n';
    f << "x,y\n";
    for (const auto& pt : curve) {
        f.row({pt.x, pt.y});
    }
    f.close();
}

void write_summary_csv(const fs::path& path, const std::vector<SummaryRow>& rows)
{
    CsvFile f(path);
    f << "run,objective,peak_i_h,peak_time,r0_initial,iterations,converged\n";
    for (const auto& r : rows) {
        f << r.run << ',' << format_number(r.objective) << ',' << format_number(r.peak_i_h) << ','
          << format_number(r.peak_time) << ',' << format_number(r.r0_initial) << ','
          << std::to_string(r.iterations) << ',' << (r.converged ? "1" : "0") << "\n";
    }
    f.close();
}

RunResult run(const RunConfig& config)
{
    config.validate();
    Context ctx{config, prepare_dir(config.output_dir), {}};
    switch (config.scenario) {
    case ScenarioKind::simulate:
        run_simulate(ctx);
        break;
    case ScenarioKind::r0_point:
        run_r0_point(ctx);
        break;
    case ScenarioKind::r0_sweep:
        write_sweep(ctx, config.sweep_pair, config.fixed_sweep_value(), "");
        break;
    case ScenarioKind::optimize:
    case ScenarioKind::optimize_single:
        run_optimize(ctx, config.problem(), false);
        break;
    case ScenarioKind::compare:
        run_optimize(ctx, config.problem(), true);
        break;
    }
    return ctx.result;
}

Figure parse_figure(std::string_view text)
{
    static const std::map<std::string_view, Figure> names = {
        {"fig1a", Figure::fig1a}, {"fig1b", Figure::fig1b}, {"fig1c", Figure::fig1c}, {"fig2", Figure::fig2},
        {"fig3", Figure::fig3},   {"fig4", Figure::fig4},   {"fig5", Figure::fig5},   {"fig6", Figure::fig6},
        {"fig7", Figure::fig7},   {"fig8", Figure::fig8}};
    const auto it = names.find(text);
    if (it == names.end()) {
        throw ParamError("unknown figure '" + std::string(text) + "' (expected fig1a..fig1c or fig2..fig8)");
    }
    return it->second;
}

std::string_view to_string(Figure f) noexcept
{
    static constexpr std::string_view names[] = {"fig1a", "fig1b", "fig1c", "fig2", "fig3",
                                                 "fig4",  "fig5",  "fig6",  "fig7", "fig8"};
    return names[static_cast<std::size_t>(f)];
}

RunResult emit_figure_data(Figure which, const RunConfig& config)
{
    config.validate();
    Context ctx{config, prepare_dir(config.output_dir), {}};
    const std::string fig(to_string(which));
    const std::string prefix = fig + "_";

    RunConfig all = config;
    all.scenario = ScenarioKind::optimize;
    const OcpProblem all_prob = all.problem();

    auto solved = [&](const OcpProblem& prob) {
        OcpSolution sol = optimize(prob, config);
        ctx.note(sol);
        return sol;
    };
    auto i_h = [](const Trajectory& t) { return compartment(t, kIh); };

    switch (which) {
    case Figure::fig1a:
        write_sweep(ctx, SweepPair::cm_cA, 1.0, prefix);
        break;
    case Figure::fig1b:
        write_sweep(ctx, SweepPair::cm_alpha, 0.0, prefix);
        break;
    case Figure::fig1c:
        write_sweep(ctx, SweepPair::cA_alpha, 0.0, prefix);
        break;
    case Figure::fig2: {
        const OcpSolution sol = solved(all_prob);
        const CostResult base = evaluate_cost(no_control_policy(all_prob), all_prob);
        write_curve(ctx.file(prefix + "optimal.csv"), "i_h", sol.trajectory.times, i_h(sol.trajectory));
        write_curve(ctx.file(prefix + "no_control.csv"), "i_h", base.trajectory.times, i_h(base.trajectory));
        break;
    }
    case Figure::fig3: {
        const OcpSolution sol = solved(all_prob);
        for (Channel ch : {Channel::larvicide, Channel::adulticide, Channel::mechanical}) {
            const std::string sym(channel_symbol(ch));
            write_curve(ctx.file(prefix + sym + ".csv"), sym, sol.trajectory.times,
                        channel_series(sol.policy, ch, sol.trajectory.times));
        }
        break;
    }
    case Figure::fig4:
    case Figure::fig5:
        for (WeightCase wc : {WeightCase::A, WeightCase::B, WeightCase::C}) {
            OcpProblem prob = all_prob;
            prob.weights = scenario_weights(wc);
            const OcpSolution sol = solved(prob);
            const std::string tag = "case_" + std::string(to_string(wc));
            if (which == Figure::fig4) {
                write_curve(ctx.file(prefix + tag + ".csv"), "i_h", sol.trajectory.times, i_h(sol.trajectory));
                continue;
            }
            for (Channel ch : {Channel::adulticide, Channel::larvicide, Channel::mechanical}) {
                const std::string sym(channel_symbol(ch));
                write_curve(ctx.file(prefix + sym + "_" + tag + ".csv"), sym, sol.trajectory.times,
                            channel_series(sol.policy, ch, sol.trajectory.times));
            }
        }
        break;
    case Figure::fig6:
    case Figure::fig7:
    case Figure::fig8: {
        const Channel ch = which == Figure::fig6   ? Channel::adulticide
                           : which == Figure::fig7 ? Channel::larvicide
                                                   : Channel::mechanical;
        const std::string sym(channel_symbol(ch));
        const OcpSolution both = solved(all_prob);
        const OcpSolution single = solved(single_control_problem(ch, all_prob));
        const auto& t = both.trajectory.times;
        write_curve(ctx.file(prefix + sym + "_all.csv"), sym, t, channel_series(both.policy, ch, t));
        write_curve(ctx.file(prefix + sym + "_single.csv"), sym, t, channel_series(single.policy, ch, t));
        write_curve(ctx.file(prefix + "i_h_all.csv"), "i_h", t, i_h(both.trajectory));
        write_curve(ctx.file(prefix + "i_h_single.csv"), "i_h", t, i_h(single.trajectory));
        break;
    }
    }
    return ctx.result;
}

} // namespace vctrl
