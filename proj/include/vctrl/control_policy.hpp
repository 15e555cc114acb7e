#ifndef VCTRL_CONTROL_POLICY_HPP
#define VCTRL_CONTROL_POLICY_HPP

#include "vctrl/epi_model.hpp"

#include <cstddef>
#include <vector>

namespace vctrl {

/**
 * Piecewise-constant control schedule.
 *
 * Interval j is [breakpoints[j], breakpoints[j+1]) and carries values[j];
 * the last interval is closed on the right. Construction validates ordering
 * and the box.
 */
class ControlPolicy {
public:
    ControlPolicy(std::vector<double> breakpoints, std::vector<ControlTriple> values,
                  ControlBounds bounds = {});

    /// n equal intervals over [0, t_f], all set to u.
    static ControlPolicy constant(double t_f, std::size_t n, const ControlTriple& u, ControlBounds bounds = {});

    std::size_t size() const noexcept { return values_.size(); }
    double t_end() const noexcept { return breakpoints_.back(); }

    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<ControlTriple>& values() const noexcept { return values_; }
    const ControlBounds& bounds() const noexcept { return bounds_; }

    const ControlTriple& operator[](std::size_t j) const noexcept { return values_[j]; }

    /// Index of the interval containing t. Throws RangeError outside the span.
    std::size_t interval_of(double t) const;
    const ControlTriple& at(double t) const { return values_[interval_of(t)]; }

    /// Copy with interval j replaced; the new value must be inside the box.
    ControlPolicy with_value(std::size_t j, const ControlTriple& u) const;

    /// Smallest alpha used anywhere in the schedule.
    double min_alpha() const noexcept;

private:
    std::vector<double> breakpoints_;
    std::vector<ControlTriple> values_;
    ControlBounds bounds_;
};

} // namespace vctrl

#endif
