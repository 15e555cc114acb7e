#include "doctest.h"

#include "vctrl/epi_model.hpp"
#include "vctrl/errors.hpp"

#include <cmath>
#include <random>

using namespace vctrl;

namespace {

ControlTriple random_control(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {u(rng), u(rng), 0.01 + 0.99 * u(rng)};
}

EpiParams random_params(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> f(0.5, 2.0);
    EpiParams p = default_params();
    p.N_h *= f(rng);
    p.B *= f(rng);
    p.beta_mh = std::min(1.0, p.beta_mh * f(rng));
    p.beta_hm = std::min(1.0, p.beta_hm * f(rng));
    p.eta_h *= f(rng);
    p.mu_m *= f(rng);
    p.phi *= f(rng);
    p.mu_A *= f(rng);
    p.eta_A *= f(rng);
    p.m *= f(rng);
    p.k *= f(rng);
    return p;
}

NormState random_norm_state(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    NormState x;
    const double a = u(rng), b = u(rng);
    x[kSh] = std::min(a, b);
    x[kIh] = std::max(a, b) - std::min(a, b);
    x[kRh] = 1.0 - std::max(a, b);
    x[kAm] = 1.5 * u(rng);
    x[kSm] = 1.5 * u(rng);
    x[kIm] = 0.5 * u(rng);
    return x;
}

} // namespace

TEST_CASE("default parameters match the outbreak study")
{
    const EpiParams p = default_params();
    CHECK(p.N_h == 480000.0);
    CHECK(p.B == 0.8);
    CHECK(p.beta_mh == 0.375);
    CHECK(p.beta_hm == 0.375);
    CHECK(p.mu_h == doctest::Approx(1.0 / 25915.0).epsilon(1e-15));
    CHECK(p.mu_h == doctest::Approx(3.8588e-5).epsilon(1e-4));
    CHECK(p.eta_h == doctest::Approx(1.0 / 3.0));
    CHECK(p.mu_m == doctest::Approx(0.1));
    CHECK(p.phi == 6.0);
    CHECK(p.mu_A == 0.25);
    CHECK(p.eta_A == 0.08);
    CHECK(p.m == 3.0);
    CHECK(p.k == 3.0);
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("parameter validation")
{
    EpiParams p = default_params();
    p.phi = 0.0;
    CHECK_THROWS_AS(p.validate(), ParamError);
    p = default_params();
    p.beta_hm = 1.5;
    CHECK_THROWS_AS(p.validate(), ParamError);
    p = default_params();
    p.k = std::nan("");
    CHECK_THROWS_AS(p.validate(), ParamError);
}

TEST_CASE("control bounds")
{
    const ControlBounds b;
    CHECK(b.contains(no_control));
    CHECK(b.contains({1.0, 1.0, 0.01}));
    CHECK_FALSE(b.contains({0.0, 0.0, 0.0}));
    CHECK_FALSE(b.contains({-0.1, 0.0, 1.0}));
    CHECK_FALSE(b.contains({0.0, 1.1, 1.0}));
    CHECK_THROWS_AS(b.check({0.0, 0.0, 0.005}), ParamError);
}

TEST_CASE("rhs_full at hand-evaluated points")
{
    const EpiParams p = default_params();

    SUBCASE("disease-free and mosquito-free human block is at rest")
    {
        FullState x;
        x[kSh] = p.N_h;
        const FullState dx = rhs_full(0.0, x, no_control, p);
        CHECK(dx[kSh] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(dx[kIh] == 0.0);
    }
    SUBCASE("infection pressure from a fully infected vector population")
    {
        FullState x;
        x[kSh] = p.N_h;
        x[kIm] = p.m * p.N_h;
        const FullState dx = rhs_full(0.0, x, no_control, p);
        // 0.8 * 0.375 * 3 * 480000
        CHECK(dx[kIh] == doctest::Approx(432000.0).epsilon(1e-12));
    }
    SUBCASE("alpha must be positive")
    {
        CHECK_THROWS_AS(rhs_full(0.0, FullState{}, {0.0, 0.0, 0.0}, p), ParamError);
        CHECK_THROWS_AS(rhs_full(0.0, FullState{}, {0.0, 0.0, -1.0}, p), ParamError);
    }
}

TEST_CASE("rhs_norm at the outbreak start")
{
    const EpiParams p = default_params();
    const NormState dx = rhs_norm(0.0, default_initial_state(), no_control, p);
    CHECK(dx[kIh] == doctest::Approx(-(p.eta_h + p.mu_h) * 0.0001).epsilon(1e-12));
    CHECK(dx[kIh] == doctest::Approx(-3.3337192102386e-05).epsilon(1e-10));
    CHECK_THROWS_AS(rhs_norm(0.0, default_initial_state(), {0.0, 0.0, 0.0}, p), ParamError);
}

TEST_CASE("scale maps")
{
    const EpiParams p = default_params();
    FullState all_susceptible;
    all_susceptible[kSh] = p.N_h;
    const NormState n = normalize(all_susceptible, p);
    CHECK(n[kSh] == 1.0);
    for (std::size_t i = 1; i < kNumCompartments; ++i) {
        CHECK(n[i] == 0.0);
    }

    NormState larvae;
    larvae[kAm] = 1.0;
    CHECK(denormalize(larvae, p)[kAm] == doctest::Approx(1440000.0).epsilon(1e-15));
}

TEST_CASE("property: round trip, scale consistency and conservation")
{
    std::mt19937_64 rng(20240611);
    for (int draw = 0; draw < 500; ++draw) {
        const EpiParams p = random_params(rng);
        const ControlTriple u = random_control(rng);
        const NormState xn = random_norm_state(rng);
        const FullState xf = denormalize(xn, p);

        const NormState back = normalize(xf, p);
        for (std::size_t i = 0; i < kNumCompartments; ++i) {
            CHECK(back[i] == doctest::Approx(xn[i]).epsilon(1e-12));
        }

        const NormState dn = rhs_norm(0.0, xn, u, p);
        const NormState dn_from_full = normalize(rhs_full(0.0, xf, u, p), p);
        for (std::size_t i = 0; i < kNumCompartments; ++i) {
            CHECK(dn[i] == doctest::Approx(dn_from_full[i]).epsilon(1e-10).scale(1e-12));
        }

        CHECK(std::abs(human_total(dn)) <= 1e-15);
        const FullState df = rhs_full(0.0, xf, u, p);
        CHECK(std::abs(human_total(df)) <= 1e-15 * p.N_h * (1.0 + p.B));
    }
}

TEST_CASE("property: nonnegative orthant is forward invariant")
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> pick(0, kNumCompartments - 1);
    for (int draw = 0; draw < 2000; ++draw) {
        const EpiParams p = random_params(rng);
        const ControlTriple u = random_control(rng);
        NormState x = random_norm_state(rng);
        const std::size_t zero = pick(rng);
        x[zero] = 0.0;
        const NormState dx = rhs_norm(0.0, x, u, p);
        CHECK(dx[zero] >= 0.0);

        const FullState xf = denormalize(x, p);
        const FullState dxf = rhs_full(0.0, xf, u, p);
        CHECK(dxf[zero] >= 0.0);
    }
}
