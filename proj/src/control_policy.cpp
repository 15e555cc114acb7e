#include "vctrl/control_policy.hpp"

#include "vctrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vctrl {

ControlPolicy::ControlPolicy(std::vector<double> breakpoints, std::vector<ControlTriple> values,
                             ControlBounds bounds)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), bounds_(bounds)
{
    if (values_.empty() || breakpoints_.size() != values_.size() + 1) {
        throw ParamError("a policy with N intervals needs N+1 breakpoints and N >= 1");
    }
    if (!(bounds_.alpha_min > 0.0 && bounds_.alpha_min <= 1.0)) {
        throw ParamError("alpha_min must lie in (0,1]");
    }
    for (std::size_t j = 0; j + 1 < breakpoints_.size(); ++j) {
        if (!std::isfinite(breakpoints_[j]) || !(breakpoints_[j + 1] > breakpoints_[j])) {
            throw ParamError("policy breakpoints must be finite and strictly increasing");
        }
    }
    for (const auto& u : values_) {
        bounds_.check(u);
    }
}

ControlPolicy ControlPolicy::constant(double t_f, std::size_t n, const ControlTriple& u, ControlBounds bounds)
{
    if (!(t_f > 0.0) || n == 0) {
        throw ParamError("constant policy needs t_f > 0 and at least one interval");
    }
    std::vector<double> bp(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        bp[j] = t_f * static_cast<double>(j) / static_cast<double>(n);
    }
    bp[n] = t_f;
    return ControlPolicy(std::move(bp), std::vector<ControlTriple>(n, u), bounds);
}

std::size_t ControlPolicy::interval_of(double t) const
{
    if (!(t >= breakpoints_.front() && t <= breakpoints_.back())) {
        throw RangeError("time " + std::to_string(t) + " outside the policy horizon");
    }
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    auto j = static_cast<std::size_t>(std::distance(breakpoints_.begin(), it));
    return std::min(j == 0 ? 0 : j - 1, values_.size() - 1);
}

ControlPolicy ControlPolicy::with_value(std::size_t j, const ControlTriple& u) const
{
    ControlPolicy copy = *this;
    bounds_.check(u);
    copy.values_.at(j) = u;
    return copy;
}

double ControlPolicy::min_alpha() const noexcept
{
    double a = 1.0;
    for (const auto& u : values_) {
        a = std::min(a, u.alpha);
    }
    return a;
}

} // namespace vctrl
