#include "doctest.h"

#include "vctrl/errors.hpp"
#include "vctrl/ocp.hpp"

#include <cmath>
#include <random>

using namespace vctrl;

namespace {

/// Composite Simpson rule on an odd number of equispaced samples.
double simpson(const std::vector<double>& t, const std::vector<double>& f)
{
    const std::size_t n = t.size();
    REQUIRE(n % 2 == 1);
    const double h = t[1] - t[0];
    double s = f.front() + f.back();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
    }
    return s * h / 3.0;
}

OcpProblem coarse_problem(std::size_t n_intervals = 12)
{
    return OcpProblem::with_horizon(84.0, n_intervals);
}

std::vector<double> random_direction(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> d(n);
    double norm = 0.0;
    for (double& v : d) {
        v = g(rng);
        norm += v * v;
    }
    for (double& v : d) {
        v /= std::sqrt(norm);
    }
    return d;
}

ControlPolicy shifted(const ControlPolicy& p, const std::vector<double>& d, double eps)
{
    std::vector<ControlTriple> values = p.values();
    for (std::size_t j = 0; j < values.size(); ++j) {
        values[j].c_A += eps * d[3 * j];
        values[j].c_m += eps * d[3 * j + 1];
        values[j].alpha += eps * d[3 * j + 2];
    }
    return ControlPolicy(p.breakpoints(), values, p.bounds());
}

ControlPolicy interior_random_policy(const OcpProblem& prob, std::uint64_t seed)
{
    // keep a margin from the box so every stencil is central
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    std::vector<ControlTriple> values(prob.n_intervals);
    for (auto& v : values) {
        v = {u(rng), u(rng), 0.02 + 0.97 * u(rng)};
    }
    return ControlPolicy(ControlPolicy::constant(prob.t_f, prob.n_intervals, no_control).breakpoints(), values);
}

} // namespace

TEST_CASE("weight presets")
{
    const CostWeights a = scenario_weights(WeightCase::A);
    CHECK(a.gamma_D == 0.25);
    CHECK(a.gamma_S == 0.25);
    CHECK(a.gamma_L == 0.25);
    CHECK(a.gamma_E == 0.25);
    const CostWeights b = scenario_weights(WeightCase::B);
    CHECK(b.gamma_D == 0.55);
    CHECK(b.gamma_S == 0.15);
    CHECK(b.gamma_E == 0.15);
    const CostWeights c = scenario_weights(WeightCase::C);
    CHECK(c.gamma_D == 0.10);
    CHECK(c.gamma_L == 0.30);
    CHECK(parse_weight_case("B") == WeightCase::B);
    CHECK_THROWS_AS(parse_weight_case("D"), ParamError);
    CHECK_THROWS_AS((CostWeights{0, 0, 0, 0}.validate()), ParamError);
    CHECK_THROWS_AS((CostWeights{-1, 1, 0, 0}.validate()), ParamError);
}

TEST_CASE("evaluate_cost")
{
    SUBCASE("integrand identically zero")
    {
        OcpProblem prob = coarse_problem();
        prob.weights = {0.0, 0.0, 0.0, 1.0};
        const auto res = evaluate_cost(ControlPolicy::constant(prob.t_f, prob.n_intervals, no_control), prob);
        CHECK(res.objective == 0.0);
    }
    SUBCASE("disease term equals an independent quadrature of the trajectory")
    {
        OcpProblem prob = OcpProblem::with_horizon(84.0);
        prob.integrator.output_points = 84 * 40 + 1;
        const auto res = evaluate_cost(ControlPolicy::constant(prob.t_f, prob.n_intervals, no_control), prob);
        std::vector<double> sq;
        for (const auto& s : res.trajectory.states) {
            sq.push_back(s[kIh] * s[kIh]);
        }
        const double quad = prob.weights.gamma_D * simpson(res.trajectory.times, sq);
        CHECK(res.objective == doctest::Approx(quad).epsilon(1e-6));
        CHECK(res.objective > 0.0);
    }
    SUBCASE("splitting an interval of a constant policy changes nothing")
    {
        const OcpProblem prob = coarse_problem();
        const ControlTriple u{0.1, 0.2, 0.9};
        const double one = objective(ControlPolicy::constant(prob.t_f, 12, u), prob);
        const double two = objective(ControlPolicy::constant(prob.t_f, 24, u), prob);
        CHECK(one == doctest::Approx(two).epsilon(1e-12));
        const ControlPolicy uneven({0.0, 10.0, 33.3, 84.0}, {u, u, u});
        CHECK(objective(uneven, prob) == doctest::Approx(one).epsilon(1e-9));
    }
    SUBCASE("trajectory conserves humans")
    {
        const OcpProblem prob = coarse_problem();
        const auto res = evaluate_cost(initial_guess(prob), prob);
        for (const auto& s : res.trajectory.states) {
            CHECK(std::abs(human_total(s) - 1.0) <= 1e-9);
        }
    }
    SUBCASE("policy must span the horizon")
    {
        const OcpProblem prob = coarse_problem();
        CHECK_THROWS_AS(objective(ControlPolicy::constant(50.0, 5, no_control), prob), ParamError);
    }
}

TEST_CASE("fd_gradient against closed-form control terms")
{
    OcpProblem prob = coarse_problem();
    const double length = prob.t_f / static_cast<double>(prob.n_intervals);

    SUBCASE("adulticide cost only")
    {
        prob.weights = {0.0, 0.7, 0.0, 0.0};
        const double c_m = 0.3;
        const auto g = fd_gradient(ControlPolicy::constant(prob.t_f, prob.n_intervals, {0.0, c_m, 1.0}), prob, 1);
        for (std::size_t j = 0; j < prob.n_intervals; ++j) {
            CHECK(g[3 * j + 1] == doctest::Approx(2.0 * 0.7 * c_m * length).epsilon(1e-4));
            CHECK(std::abs(g[3 * j]) < 1e-9);
        }
    }
    SUBCASE("mechanical cost only")
    {
        prob.weights = {0.0, 0.0, 0.0, 0.4};
        const double alpha = 0.6;
        const auto g = fd_gradient(ControlPolicy::constant(prob.t_f, prob.n_intervals, {0.0, 0.0, alpha}), prob);
        for (std::size_t j = 0; j < prob.n_intervals; ++j) {
            CHECK(g[3 * j + 2] == doctest::Approx(-2.0 * 0.4 * (1.0 - alpha) * length).epsilon(1e-4));
        }
    }
    SUBCASE("one-sided differences at the bounds")
    {
        prob.weights = {0.0, 0.5, 0.5, 0.0};
        const auto g = fd_gradient(ControlPolicy::constant(prob.t_f, prob.n_intervals, {1.0, 0.0, 1.0}), prob);
        for (std::size_t j = 0; j < prob.n_intervals; ++j) {
            CHECK(g[3 * j] == doctest::Approx(2.0 * 0.5 * length).epsilon(1e-4));
            CHECK(std::abs(g[3 * j + 1]) < 1e-5);
        }
    }
}

TEST_CASE("fd_gradient matches a secant oracle along random directions")
{
    const OcpProblem prob = coarse_problem();
    std::mt19937_64 rng(99);
    for (std::uint64_t s = 0; s < 4; ++s) {
        const ControlPolicy policy = interior_random_policy(prob, 1000 + s);
        const auto g = fd_gradient(policy, prob);
        const auto d = random_direction(g.size(), rng);
        double directional = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            directional += g[i] * d[i];
        }
        const double eps = 1e-4;
        const double secant =
            (objective(shifted(policy, d, eps), prob) - objective(shifted(policy, d, -eps), prob)) / (2.0 * eps);
        CHECK(directional == doctest::Approx(secant).epsilon(1e-5));
    }
}

TEST_CASE("fd_gradient is independent of the worker count")
{
    const OcpProblem prob = coarse_problem(6);
    const ControlPolicy policy = interior_random_policy(prob, 3);
    CHECK(fd_gradient(policy, prob, 1) == fd_gradient(policy, prob, 4));
}

TEST_CASE("single-control problems")
{
    const OcpProblem base = coarse_problem();
    const OcpProblem adult = single_control_problem(Channel::adulticide, base);
    CHECK(adult.weights.gamma_D == 0.5);
    CHECK(adult.weights.gamma_S == 0.5);
    CHECK(adult.weights.gamma_L == 0.0);
    CHECK(adult.weights.gamma_E == 0.0);
    CHECK(adult.free_channels == std::array<bool, 3>{false, true, false});

    const OcpProblem larva = single_control_problem(Channel::larvicide, base);
    CHECK(larva.frozen.c_m == 0.0);
    CHECK(larva.frozen.alpha == 1.0);
    CHECK(larva.weights.gamma_L == 0.5);

    const OcpProblem mech = single_control_problem(Channel::mechanical, base);
    CHECK(mech.weights.gamma_E == 0.5);
    CHECK(mech.weights.gamma_S == 0.0);
    CHECK(mech.weights.gamma_L == 0.0);

    const ControlPolicy init = initial_guess(larva);
    for (const auto& u : init.values()) {
        CHECK(u == ControlTriple{0.5, 0.0, 1.0});
    }
    const auto g = fd_gradient(init, larva);
    for (std::size_t j = 0; j < larva.n_intervals; ++j) {
        CHECK(g[3 * j + 1] == 0.0);
        CHECK(g[3 * j + 2] == 0.0);
    }
    CHECK(parse_channel("mechanical") == Channel::mechanical);
    CHECK_THROWS_AS(parse_channel("spray"), ParamError);
}

TEST_CASE("solve: pure adulticide cost drives the control to zero")
{
    OcpProblem prob = coarse_problem();
    prob.weights = {0.0, 1.0, 0.0, 0.0};
    const OcpSolution sol = solve(prob, initial_guess(prob));
    CHECK(sol.converged);
    CHECK(sol.objective == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    for (const auto& u : sol.policy.values()) {
        CHECK(u.c_m == 0.0);
    }
}

TEST_CASE("solve: descent, dominance and bounds on a coarse Case A problem")
{
    const OcpProblem prob = coarse_problem();
    const ControlPolicy init = initial_guess(prob);
    const OcpSolution sol = solve(prob, init);

    for (std::size_t k = 1; k < sol.history.size(); ++k) {
        CHECK(sol.history[k] <= sol.history[k - 1]);
    }
    CHECK(sol.objective >= 0.0);
    for (const auto& u : sol.policy.values()) {
        CHECK(prob.bounds.contains(u));
    }
    CHECK(sol.objective <= objective(init, prob));
    CHECK(sol.objective <= objective(ControlPolicy::constant(prob.t_f, prob.n_intervals, no_control), prob));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const ControlTriple c{u(rng), u(rng), 0.01 + 0.99 * u(rng)};
        CHECK(sol.objective <= objective(ControlPolicy::constant(prob.t_f, prob.n_intervals, c), prob));
    }
    CHECK(sol.trajectory.states.size() == prob.integrator.output_points);
    MESSAGE("coarse Case A objective " << sol.objective << " after " << sol.iterations << " iterations ("
                                       << sol.stop_reason << ")");
}

TEST_CASE("solve: multistart runs agree")
{
    const OcpProblem prob = coarse_problem();
    SolverOptions opt;
    opt.multistart = 5;
    opt.seed = 42;
    const OcpSolution sol = solve(prob, random_policy(prob, 1), opt);
    REQUIRE(sol.start_objectives.size() == 6);
    for (double f : sol.start_objectives) {
        CHECK(f - sol.objective <= 1e-4);
        CHECK(f >= sol.objective);
    }
    // identical seeds reproduce identical solutions
    const OcpSolution again = solve(prob, random_policy(prob, 1), opt);
    CHECK(again.objective == sol.objective);
    CHECK(again.policy.values() == sol.policy.values());
}
