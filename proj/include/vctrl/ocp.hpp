#ifndef VCTRL_OCP_HPP
#define VCTRL_OCP_HPP

#include "vctrl/control_policy.hpp"
#include "vctrl/epi_model.hpp"
#include "vctrl/integrator.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vctrl {

/// Weights of the running cost
///   gamma_D*i_h^2 + gamma_S*c_m^2 + gamma_L*c_A^2 + gamma_E*(1-alpha)^2.
struct CostWeights {
    double gamma_D = 0.25; ///< infected humans
    double gamma_S = 0.25; ///< adulticide
    double gamma_L = 0.25; ///< larvicide
    double gamma_E = 0.25; ///< mechanical control (educational campaigns)

    void validate() const;
};

enum class WeightCase { A, B, C };

/// A: equal weights; B: disease-dominated; C: control-cost-dominated.
CostWeights scenario_weights(WeightCase c) noexcept;
WeightCase parse_weight_case(std::string_view text);
std::string_view to_string(WeightCase c) noexcept;

/// Control channels, in parameter-vector order.
enum class Channel : std::size_t { larvicide = 0, adulticide = 1, mechanical = 2 };
inline constexpr std::size_t kNumChannels = 3;

Channel parse_channel(std::string_view text);
std::string_view to_string(Channel c) noexcept;

double channel_value(const ControlTriple& u, Channel c) noexcept;
void set_channel_value(ControlTriple& u, Channel c, double v) noexcept;

struct OcpProblem {
    EpiParams params = default_params();
    CostWeights weights{};
    double t_f = 84.0;
    std::size_t n_intervals = 84;
    IntegratorConfig integrator = default_ocp_integrator(84.0);
    NormState x0 = default_initial_state();
    ControlBounds bounds{};
    /// Channels the optimizer may move; the others stay at `frozen`.
    std::array<bool, kNumChannels> free_channels{true, true, true};
    ControlTriple frozen = no_control;

    void validate() const;

    /// Fixed-step RK4 at 0.05 day with quarter-day output. The step is
    /// further capped per policy so the aquatic-phase dynamics stay stable
    /// for small alpha.
    static IntegratorConfig default_ocp_integrator(double t_f);

    /// Problem with the given horizon, N = t_f daily intervals, and the
    /// integrator output grid sized for the horizon.
    static OcpProblem with_horizon(double t_f, std::size_t n_intervals = 0);
};

/// Largest RK4 step that keeps the normalized system stable under `policy`.
double stable_rk4_step(const ControlPolicy& policy, const OcpProblem& prob);

struct CostResult {
    double objective;
    Trajectory trajectory; ///< normalized states on the output grid
};

/// Integrates the normalized model augmented with the running cost.
CostResult evaluate_cost(const ControlPolicy& policy, const OcpProblem& prob);

/// evaluate_cost without recording the trajectory.
double objective(const ControlPolicy& policy, const OcpProblem& prob);

/**
 * Finite-difference gradient of the objective with respect to every interval
 * value, laid out as g[3*j + channel]. Central differences with step
 * 1e-6*max(1,|v|); one-sided where a central stencil would leave the box.
 * Entries of frozen channels are zero. threads = 0 uses the default count.
 */
std::vector<double> fd_gradient(const ControlPolicy& policy, const OcpProblem& prob, std::size_t threads = 0);

struct SolverOptions {
    std::size_t max_iterations = 500;
    double projected_gradient_tol = 1e-6;
    double stall_tol = 1e-12;
    std::size_t stall_window = 5;
    std::size_t memory = 10;
    /// Additional uniformly random feasible starts after the given one.
    std::size_t multistart = 0;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

struct OcpSolution {
    ControlPolicy policy;
    double objective;
    Trajectory trajectory;
    std::size_t iterations;
    double projected_gradient_norm;
    bool converged;
    std::string stop_reason;
    /// Objective of every accepted iterate of the winning start.
    std::vector<double> history;
    /// Final objective of each start, in start order.
    std::vector<double> start_objectives;
};

/// Mid-box start (c_A = c_m = alpha = 0.5) with frozen channels at their values.
ControlPolicy initial_guess(const OcpProblem& prob);

/// Uniformly random feasible start; frozen channels at their values.
ControlPolicy random_policy(const OcpProblem& prob, std::uint64_t seed);

/**
 * Minimizes the objective over the free channels with a projected limited
 * memory quasi-Newton method. Stops on projected-gradient norm, stalled
 * objective, or the iteration cap, and returns the best iterate over all
 * starts.
 */
OcpSolution solve(const OcpProblem& prob, const ControlPolicy& init, const SolverOptions& options = {});

/// Problem with cost gamma_D = 0.5 plus 0.5 on one channel; the other two
/// channels are frozen at no control.
OcpProblem single_control_problem(Channel channel, const OcpProblem& prob);

} // namespace vctrl

#endif
