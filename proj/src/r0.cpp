#include "vctrl/r0.hpp"

#include "vctrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace vctrl {

double mosquito_factor(const ControlTriple& u, const EpiParams& p) noexcept
{
    return p.eta_A * p.phi - (p.eta_A + p.mu_A + u.c_A) * (p.mu_m + u.c_m);
}

double r0_closed_form(const ControlTriple& u, const EpiParams& p)
{
    const double M = mosquito_factor(u, p);
    if (M <= 0.0) {
        return 0.0;
    }
    const double adult_loss = u.c_m + p.mu_m;
    const double num = u.alpha * p.k * p.B * p.B * p.beta_hm * p.beta_mh * M;
    const double den = p.phi * (p.eta_h + p.mu_h) * adult_loss * adult_loss;
    return std::sqrt(num / den);
}

NormState disease_free_equilibrium(const ControlTriple& u, const EpiParams& p)
{
    const double adult_loss = p.mu_m + u.c_m;
    const double larval_loss = p.eta_A + p.mu_A + u.c_A;
    const double a_m = std::max(0.0, u.alpha * (1.0 - larval_loss * adult_loss / (p.phi * p.eta_A)));
    NormState x;
    x[kSh] = 1.0;
    x[kAm] = a_m;
    x[kSm] = (p.k / p.m) * p.eta_A * a_m / adult_loss;
    return x;
}

double r0_ngm(const ControlTriple& u, const EpiParams& p)
{
    const NormState dfe = disease_free_equilibrium(u, p);

    // infected subsystem (i_h, i_m) linearized at the equilibrium
    const double F[2][2] = {{0.0, p.B * p.beta_mh * p.m * dfe[kSh]}, {p.B * p.beta_hm * dfe[kSm], 0.0}};
    const double V[2][2] = {{p.eta_h + p.mu_h, 0.0}, {0.0, p.mu_m + u.c_m}};

    const double det_v = V[0][0] * V[1][1] - V[0][1] * V[1][0];
    if (!(std::abs(det_v) > 0.0) || !std::isfinite(det_v)) {
        throw ParamError("transition matrix is singular");
    }
    const double Vi[2][2] = {{V[1][1] / det_v, -V[0][1] / det_v}, {-V[1][0] / det_v, V[0][0] / det_v}};

    double K[2][2];
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            K[i][j] = F[i][0] * Vi[0][j] + F[i][1] * Vi[1][j];
        }
    }
    const double tr = K[0][0] + K[1][1];
    const double det = K[0][0] * K[1][1] - K[0][1] * K[1][0];
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4.0 - det, 0.0));
    const auto l1 = std::complex<double>(tr / 2.0) + disc;
    const auto l2 = std::complex<double>(tr / 2.0) - disc;
    return std::max(std::abs(l1), std::abs(l2));
}

std::string_view to_string(ControlName c) noexcept
{
    switch (c) {
    case ControlName::c_A:
        return "c_A";
    case ControlName::c_m:
        return "c_m";
    case ControlName::alpha:
        return "alpha";
    }
    return "?";
}

SweepPair parse_sweep_pair(std::string_view text)
{
    if (text == "cm_cA") return SweepPair::cm_cA;
    if (text == "cm_alpha") return SweepPair::cm_alpha;
    if (text == "cA_alpha") return SweepPair::cA_alpha;
    throw ParamError("unknown sweep pair '" + std::string(text) + "' (expected cm_cA, cm_alpha or cA_alpha)");
}

std::string_view to_string(SweepPair pair) noexcept
{
    switch (pair) {
    case SweepPair::cm_cA:
        return "cm_cA";
    case SweepPair::cm_alpha:
        return "cm_alpha";
    case SweepPair::cA_alpha:
        return "cA_alpha";
    }
    return "?";
}

ControlName x_control(SweepPair pair) noexcept
{
    return pair == SweepPair::cA_alpha ? ControlName::c_A : ControlName::c_m;
}

ControlName y_control(SweepPair pair) noexcept
{
    return pair == SweepPair::cm_cA ? ControlName::c_A : ControlName::alpha;
}

ControlName fixed_control(SweepPair pair) noexcept
{
    switch (pair) {
    case SweepPair::cm_cA:
        return ControlName::alpha;
    case SweepPair::cm_alpha:
        return ControlName::c_A;
    case SweepPair::cA_alpha:
        return ControlName::c_m;
    }
    return ControlName::alpha;
}

double no_control_value(ControlName c) noexcept
{
    return c == ControlName::alpha ? 1.0 : 0.0;
}

namespace {

void set_control(ControlTriple& u, ControlName c, double v) noexcept
{
    switch (c) {
    case ControlName::c_A:
        u.c_A = v;
        break;
    case ControlName::c_m:
        u.c_m = v;
        break;
    case ControlName::alpha:
        u.alpha = v;
        break;
    }
}

ControlTriple pair_point(SweepPair pair, double fixed_value, double x, double y)
{
    ControlTriple u = no_control;
    set_control(u, fixed_control(pair), fixed_value);
    set_control(u, x_control(pair), x);
    set_control(u, y_control(pair), y);
    return u;
}

void check_sweep_args(SweepPair pair, double fixed_value, std::size_t resolution, double alpha_min)
{
    if (resolution < 2) {
        throw ParamError("sweep resolution must be at least 2");
    }
    const double lo = fixed_control(pair) == ControlName::alpha ? alpha_min : 0.0;
    if (!(fixed_value >= lo && fixed_value <= 1.0)) {
        throw ParamError(std::string("fixed ") + std::string(to_string(fixed_control(pair))) +
                         " outside its box");
    }
}

} // namespace

std::vector<double> control_axis(ControlName c, std::size_t resolution, double alpha_min)
{
    if (resolution < 2) {
        throw ParamError("axis resolution must be at least 2");
    }
    const double lo = c == ControlName::alpha ? alpha_min : 0.0;
    std::vector<double> axis(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
        axis[i] = lo + (1.0 - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1);
    }
    axis.back() = 1.0;
    return axis;
}

R0Grid sweep(SweepPair pair, double fixed_value, std::size_t resolution, const EpiParams& p, double alpha_min)
{
    p.validate();
    check_sweep_args(pair, fixed_value, resolution, alpha_min);
    R0Grid g{x_control(pair), y_control(pair), fixed_control(pair), fixed_value, {}, {}, {}};
    g.x = control_axis(g.x_name, resolution, alpha_min);
    g.y = control_axis(g.y_name, resolution, alpha_min);
    g.values.reserve(g.x.size() * g.y.size());
    for (double y : g.y) {
        for (double x : g.x) {
            g.values.push_back(r0_closed_form(pair_point(pair, fixed_value, x, y), p));
        }
    }
    return g;
}

std::vector<ThresholdPoint> threshold_curve(SweepPair pair, double fixed_value, std::size_t resolution,
                                            const EpiParams& p, double alpha_min)
{
    p.validate();
    check_sweep_args(pair, fixed_value, resolution, alpha_min);
    const std::vector<double> ys = control_axis(y_control(pair), resolution, alpha_min);
    const double x_lo = x_control(pair) == ControlName::alpha ? alpha_min : 0.0;
    const double x_hi = 1.0;

    std::vector<ThresholdPoint> curve;
    curve.reserve(ys.size());
    for (double y : ys) {
        auto excess = [&](double x) { return r0_closed_form(pair_point(pair, fixed_value, x, y), p) - 1.0; };
        // R0 is non-increasing in either insecticide, so a crossing exists iff
        // the endpoints straddle 1
        double lo = x_lo;
        double hi = x_hi;
        const double f_lo = excess(lo);
        const double f_hi = excess(hi);
        if (f_lo < 0.0 || f_hi > 0.0) {
            curve.push_back({std::numeric_limits<double>::quiet_NaN(), y, false});
            continue;
        }
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            if (excess(mid) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        curve.push_back({0.5 * (lo + hi), y, true});
    }
    return curve;
}

} // namespace vctrl
