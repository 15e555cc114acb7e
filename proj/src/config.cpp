#include "vctrl/config.hpp"

#include "vctrl/errors.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <string>

namespace vctrl {

ScenarioKind parse_scenario(std::string_view text)
{
    if (text == "simulate") return ScenarioKind::simulate;
    if (text == "r0-point") return ScenarioKind::r0_point;
    if (text == "r0-sweep") return ScenarioKind::r0_sweep;
    if (text == "optimize") return ScenarioKind::optimize;
    if (text == "optimize-single") return ScenarioKind::optimize_single;
    if (text == "compare") return ScenarioKind::compare;
    throw ParamError("unknown scenario '" + std::string(text) + "'");
}

std::string_view to_string(ScenarioKind s) noexcept
{
    switch (s) {
    case ScenarioKind::simulate:
        return "simulate";
    case ScenarioKind::r0_point:
        return "r0-point";
    case ScenarioKind::r0_sweep:
        return "r0-sweep";
    case ScenarioKind::optimize:
        return "optimize";
    case ScenarioKind::optimize_single:
        return "optimize-single";
    case ScenarioKind::compare:
        return "compare";
    }
    return "?";
}

std::size_t RunConfig::intervals() const
{
    return n_intervals.value_or(static_cast<std::size_t>(std::max(1.0, std::round(t_f))));
}

std::size_t RunConfig::points() const
{
    return output_points.value_or(output_points_for(t_f));
}

double RunConfig::fixed_sweep_value() const
{
    return sweep_fixed.value_or(no_control_value(fixed_control(sweep_pair)));
}

IntegratorConfig RunConfig::simulation_integrator() const
{
    IntegratorConfig c;
    c.method = method;
    c.step = step;
    c.rel_tol = rel_tol;
    c.abs_tol = abs_tol;
    c.output_points = points();
    return c;
}

OcpProblem RunConfig::problem() const
{
    OcpProblem prob = OcpProblem::with_horizon(t_f, intervals());
    prob.params = params;
    prob.weights = weights;
    prob.bounds = bounds;
    prob.integrator.step = ocp_step;
    prob.integrator.output_points = points();
    if (scenario == ScenarioKind::optimize_single) {
        prob = single_control_problem(single, prob);
    }
    return prob;
}

SolverOptions RunConfig::solver_options() const
{
    SolverOptions opt;
    opt.max_iterations = max_iterations;
    opt.multistart = multistart;
    opt.seed = seed;
    return opt;
}

void RunConfig::validate() const
{
    try {
        params.validate();
    } catch (const ParamError& e) {
        throw ValidationError("params", e.what());
    }
    if (!(t_f > 0.0) || !std::isfinite(t_f)) {
        throw ValidationError("t_f", "must be positive");
    }
    if (n_intervals && *n_intervals == 0) {
        throw ValidationError("n_intervals", "must be at least 1");
    }
    if (output_points && *output_points < 2) {
        throw ValidationError("integrator.output_points", "must be at least 2");
    }
    if (!(step > 0.0)) {
        throw ValidationError("integrator.step", "must be positive");
    }
    if (!(rel_tol > 0.0)) {
        throw ValidationError("integrator.rel_tol", "must be positive");
    }
    if (!(abs_tol > 0.0)) {
        throw ValidationError("integrator.abs_tol", "must be positive");
    }
    if (!(ocp_step > 0.0)) {
        throw ValidationError("solver.step", "must be positive");
    }
    try {
        weights.validate();
    } catch (const ParamError& e) {
        throw ValidationError("weights", e.what());
    }
    if (!(bounds.alpha_min > 0.0 && bounds.alpha_min <= 1.0)) {
        throw ValidationError("controls.alpha_min", "must lie in (0,1]");
    }
    if (!(controls.c_A >= 0.0 && controls.c_A <= 1.0)) {
        throw ValidationError("controls.c_A", "must lie in [0,1]");
    }
    if (!(controls.c_m >= 0.0 && controls.c_m <= 1.0)) {
        throw ValidationError("controls.c_m", "must lie in [0,1]");
    }
    if (!(controls.alpha > 0.0)) {
        throw ValidationError("controls.alpha", "must exceed 0");
    }
    if (!(controls.alpha >= bounds.alpha_min && controls.alpha <= 1.0)) {
        throw ValidationError("controls.alpha", "must lie in [alpha_min, 1]");
    }
    if (sweep_resolution < 2) {
        throw ValidationError("sweep.resolution", "must be at least 2");
    }
    const double fixed = fixed_sweep_value();
    const double lo = fixed_control(sweep_pair) == ControlName::alpha ? bounds.alpha_min : 0.0;
    if (!(fixed >= lo && fixed <= 1.0)) {
        throw ValidationError("sweep.fixed", "outside the box of the fixed control");
    }
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v)
{
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        throw ParamError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view v)
{
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ParamError(std::string(key) + ": expected a nonnegative integer, got '" + std::string(v) + "'");
    }
    return out;
}

template <class F>
auto named(std::string_view key, F&& parse)
{
    try {
        return parse();
    } catch (const ParamError& e) {
        throw ValidationError(std::string(key), e.what());
    }
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        auto param = [&t](const char* name, double EpiParams::*field) {
            t[std::string("params.") + name] = [field](RunConfig& c, std::string_view k, std::string_view v) {
                c.params.*field = to_double(k, v);
            };
        };
        param("N_h", &EpiParams::N_h);
        param("B", &EpiParams::B);
        param("beta_mh", &EpiParams::beta_mh);
        param("beta_hm", &EpiParams::beta_hm);
        param("mu_h", &EpiParams::mu_h);
        param("eta_h", &EpiParams::eta_h);
        param("mu_m", &EpiParams::mu_m);
        param("phi", &EpiParams::phi);
        param("mu_A", &EpiParams::mu_A);
        param("eta_A", &EpiParams::eta_A);
        param("m", &EpiParams::m);
        param("k", &EpiParams::k);

        t["scenario"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.scenario = named(k, [&] { return parse_scenario(v); });
        };
        t["output_dir"] = [](RunConfig& c, std::string_view, std::string_view v) { c.output_dir = v; };
        t["seed"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.seed = to_unsigned(k, v); };
        t["t_f"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.t_f = to_double(k, v); };
        t["n_intervals"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.n_intervals = to_unsigned(k, v);
        };

        t["integrator.method"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            if (v == "adaptive") {
                c.method = Method::adaptive;
            } else if (v == "rk4") {
                c.method = Method::rk4_fixed;
            } else {
                throw ValidationError(std::string(k), "expected 'adaptive' or 'rk4'");
            }
        };
        t["integrator.step"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.step = to_double(k, v); };
        t["integrator.rel_tol"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.rel_tol = to_double(k, v);
        };
        t["integrator.abs_tol"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.abs_tol = to_double(k, v);
        };
        t["integrator.output_points"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.output_points = to_unsigned(k, v);
        };

        t["weights.case"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.weight_case = named(k, [&] { return parse_weight_case(v); });
            c.weights = scenario_weights(c.weight_case);
        };
        auto weight = [&t](const char* name, double CostWeights::*field) {
            t[std::string("weights.") + name] = [field](RunConfig& c, std::string_view k, std::string_view v) {
                c.weights.*field = to_double(k, v);
            };
        };
        weight("gamma_D", &CostWeights::gamma_D);
        weight("gamma_S", &CostWeights::gamma_S);
        weight("gamma_L", &CostWeights::gamma_L);
        weight("gamma_E", &CostWeights::gamma_E);

        t["controls.c_A"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.controls.c_A = to_double(k, v);
        };
        t["controls.c_m"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.controls.c_m = to_double(k, v);
        };
        t["controls.alpha"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.controls.alpha = to_double(k, v);
        };
        t["controls.alpha_min"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.bounds.alpha_min = to_double(k, v);
        };

        t["single.channel"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.single = named(k, [&] { return parse_channel(v); });
        };

        t["sweep.pair"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.sweep_pair = named(k, [&] { return parse_sweep_pair(v); });
        };
        t["sweep.fixed"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.sweep_fixed = to_double(k, v);
        };
        t["sweep.resolution"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.sweep_resolution = to_unsigned(k, v);
        };

        t["solver.max_iterations"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.max_iterations = to_unsigned(k, v);
        };
        t["solver.multistart"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.multistart = to_unsigned(k, v);
        };
        t["solver.step"] = [](RunConfig& c, std::string_view k, std::string_view v) {
            c.ocp_step = to_double(k, v);
        };
        return t;
    }();
    return table;
}

} // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value)
{
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw ParamError("unknown key '" + std::string(key) + "'");
    }
    it->second(cfg, key, value);
}

RunConfig parse_config(std::string_view text)
{
    RunConfig cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "expected 'key = value'");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError(line_no, "expected 'key = value'");
        }
        try {
            apply_setting(cfg, key, value);
        } catch (const ParamError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    cfg.validate();
    return cfg;
}

} // namespace vctrl
