#ifndef VCTRL_CONFIG_HPP
#define VCTRL_CONFIG_HPP

#include "vctrl/epi_model.hpp"
#include "vctrl/integrator.hpp"
#include "vctrl/ocp.hpp"
#include "vctrl/r0.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vctrl {

enum class ScenarioKind { simulate, r0_point, r0_sweep, optimize, optimize_single, compare };

ScenarioKind parse_scenario(std::string_view text);
std::string_view to_string(ScenarioKind s) noexcept;

/**
 * Everything one CLI invocation needs. Fields left unset fall back to
 * defaults derived from t_f (daily control intervals, quarter-day output).
 */
struct RunConfig {
    ScenarioKind scenario = ScenarioKind::optimize;
    EpiParams params = default_params();
    double t_f = 84.0;
    std::optional<std::size_t> n_intervals;
    std::optional<std::size_t> output_points;

    /// Integrator for plain simulations.
    Method method = Method::adaptive;
    double step = 0.05;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;

    WeightCase weight_case = WeightCase::A;
    CostWeights weights = scenario_weights(WeightCase::A);

    /// Constant controls for simulate and r0-point.
    ControlTriple controls = no_control;
    ControlBounds bounds{};

    Channel single = Channel::adulticide;

    SweepPair sweep_pair = SweepPair::cm_cA;
    std::optional<double> sweep_fixed;
    std::size_t sweep_resolution = 101;

    std::size_t max_iterations = 500;
    std::size_t multistart = 0;
    double ocp_step = 0.05;

    std::string output_dir = "out";
    std::uint64_t seed = 0;

    std::size_t intervals() const;
    std::size_t points() const;
    double fixed_sweep_value() const;

    IntegratorConfig simulation_integrator() const;
    OcpProblem problem() const;
    SolverOptions solver_options() const;

    /// Throws ValidationError naming the first key that breaks a constraint.
    void validate() const;
};

/**
 * Parses a `key = value` document. Blank lines and `#` comments are
 * ignored. Unknown keys and malformed lines raise ParseError with the line
 * number; values outside their admissible range raise ValidationError.
 */
RunConfig parse_config(std::string_view text);

/// Applies one `key = value` assignment; used by the parser and CLI flags.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

} // namespace vctrl

#endif
