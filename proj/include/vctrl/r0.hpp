#ifndef VCTRL_R0_HPP
#define VCTRL_R0_HPP

#include "vctrl/epi_model.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vctrl {

/**
 * Net vector growth factor eta_A*phi - (eta_A+mu_A+c_A)*(mu_m+c_m).
 *
 * Positive when each adult mosquito replaces itself through the aquatic
 * phase; at or below zero the vector population dies out.
 */
double mosquito_factor(const ControlTriple& u, const EpiParams& p) noexcept;

/// Basic reproduction number in closed form; 0 when mosquito_factor <= 0.
double r0_closed_form(const ControlTriple& u, const EpiParams& p);

/// Disease-free equilibrium of the normalized system under constant controls.
NormState disease_free_equilibrium(const ControlTriple& u, const EpiParams& p);

/**
 * Basic reproduction number as the spectral radius of F*V^-1 at the
 * disease-free equilibrium, with F the new-infection and V the transition
 * Jacobians of (i_h, i_m). Throws ParamError if V is singular.
 */
double r0_ngm(const ControlTriple& u, const EpiParams& p);

enum class ControlName { c_A, c_m, alpha };

std::string_view to_string(ControlName c) noexcept;

/// The three axis pairs of the control-sweep surfaces; first is the x axis.
enum class SweepPair { cm_cA, cm_alpha, cA_alpha };

SweepPair parse_sweep_pair(std::string_view text);
std::string_view to_string(SweepPair pair) noexcept;
ControlName x_control(SweepPair pair) noexcept;
ControlName y_control(SweepPair pair) noexcept;
ControlName fixed_control(SweepPair pair) noexcept;

/// Value of the third control when no intervention is applied on it.
double no_control_value(ControlName c) noexcept;

struct R0Grid {
    ControlName x_name;
    ControlName y_name;
    ControlName fixed_name;
    double fixed_value;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> values; ///< row-major: values[iy * x.size() + ix]

    double at(std::size_t ix, std::size_t iy) const { return values[iy * x.size() + ix]; }
};

/// Axis values for one control: [0,1] for insecticides, [alpha_min,1] for alpha.
std::vector<double> control_axis(ControlName c, std::size_t resolution, double alpha_min = 0.01);

/// Closed-form R0 over the unit box of a control pair with the third held fixed.
R0Grid sweep(SweepPair pair, double fixed_value, std::size_t resolution, const EpiParams& p,
             double alpha_min = 0.01);

/// A point on the R0 = 1 contour. x is the first control of the pair solved
/// for the given y; has_crossing is false (x = NaN) if R0 does not cross 1
/// anywhere on that line of the box.
struct ThresholdPoint {
    double x;
    double y;
    bool has_crossing;
};

std::vector<ThresholdPoint> threshold_curve(SweepPair pair, double fixed_value, std::size_t resolution,
                                            const EpiParams& p, double alpha_min = 0.01);

} // namespace vctrl

#endif
