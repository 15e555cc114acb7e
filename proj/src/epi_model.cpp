#include "vctrl/epi_model.hpp"

#include "vctrl/errors.hpp"

#include <cmath>
#include <string>

namespace vctrl {

namespace {

void require_positive(double value, const char* name)
{
    if (!std::isfinite(value) || value <= 0.0) {
        throw ParamError(std::string("parameter ") + name + " must be finite and positive, got " +
                         std::to_string(value));
    }
}

void require_alpha(const ControlTriple& u)
{
    if (!(u.alpha > 0.0)) {
        throw ParamError("mechanical control alpha must be > 0, got " + std::to_string(u.alpha));
    }
}

} // namespace

void EpiParams::validate() const
{
    require_positive(N_h, "N_h");
    require_positive(B, "B");
    require_positive(beta_mh, "beta_mh");
    require_positive(beta_hm, "beta_hm");
    require_positive(mu_h, "mu_h");
    require_positive(eta_h, "eta_h");
    require_positive(mu_m, "mu_m");
    require_positive(phi, "phi");
    require_positive(mu_A, "mu_A");
    require_positive(eta_A, "eta_A");
    require_positive(m, "m");
    require_positive(k, "k");
    if (beta_mh > 1.0 || beta_hm > 1.0) {
        throw ParamError("transmission probabilities must not exceed 1");
    }
}

EpiParams default_params()
{
    EpiParams p{};
    p.N_h = 480000.0;
    p.B = 0.8;
    p.beta_mh = 0.375;
    p.beta_hm = 0.375;
    p.mu_h = 1.0 / (71.0 * 365.0);
    p.eta_h = 1.0 / 3.0;
    p.mu_m = 1.0 / 10.0;
    p.phi = 6.0;
    p.mu_A = 1.0 / 4.0;
    p.eta_A = 0.08;
    p.m = 3.0;
    p.k = 3.0;
    return p;
}

bool ControlBounds::contains(const ControlTriple& u) const noexcept
{
    return u.c_A >= 0.0 && u.c_A <= 1.0 && u.c_m >= 0.0 && u.c_m <= 1.0 && u.alpha >= alpha_min &&
           u.alpha <= 1.0;
}

void ControlBounds::check(const ControlTriple& u) const
{
    if (!(u.c_A >= 0.0 && u.c_A <= 1.0)) {
        throw ParamError("c_A must lie in [0,1], got " + std::to_string(u.c_A));
    }
    if (!(u.c_m >= 0.0 && u.c_m <= 1.0)) {
        throw ParamError("c_m must lie in [0,1], got " + std::to_string(u.c_m));
    }
    if (!(u.alpha >= alpha_min && u.alpha <= 1.0)) {
        throw ParamError("alpha must lie in [" + std::to_string(alpha_min) + ",1], got " +
                         std::to_string(u.alpha));
    }
}

NormState default_initial_state()
{
    NormState x;
    x.v = {0.9999, 0.0001, 0.0, 1.0, 1.0, 0.0};
    return x;
}

FullState rhs_full(double /*t*/, const FullState& x, const ControlTriple& u, const EpiParams& p)
{
    require_alpha(u);
    const double S_h = x[kSh];
    const double I_h = x[kIh];
    const double R_h = x[kRh];
    const double A_m = x[kAm];
    const double S_m = x[kSm];
    const double I_m = x[kIm];

    const double bite_h = p.B * p.beta_mh * I_m / p.N_h;
    const double bite_m = p.B * p.beta_hm * I_h / p.N_h;

    FullState dx;
    dx[kSh] = p.mu_h * p.N_h - (bite_h + p.mu_h) * S_h;
    dx[kIh] = bite_h * S_h - (p.eta_h + p.mu_h) * I_h;
    dx[kRh] = p.eta_h * I_h - p.mu_h * R_h;
    dx[kAm] = p.phi * (1.0 - A_m / (u.alpha * p.k * p.N_h)) * (S_m + I_m) - (p.eta_A + p.mu_A + u.c_A) * A_m;
    dx[kSm] = p.eta_A * A_m - (bite_m + p.mu_m + u.c_m) * S_m;
    dx[kIm] = bite_m * S_m - (p.mu_m + u.c_m) * I_m;
    return dx;
}

NormState rhs_norm(double /*t*/, const NormState& x, const ControlTriple& u, const EpiParams& p)
{
    require_alpha(u);
    NormState dx;
    const NormKernel kernel(p);
    kernel(x, u, dx);
    return dx;
}

NormState normalize(const FullState& x, const EpiParams& p)
{
    NormState y;
    y[kSh] = x[kSh] / p.N_h;
    y[kIh] = x[kIh] / p.N_h;
    y[kRh] = x[kRh] / p.N_h;
    y[kAm] = x[kAm] / (p.k * p.N_h);
    y[kSm] = x[kSm] / (p.m * p.N_h);
    y[kIm] = x[kIm] / (p.m * p.N_h);
    return y;
}

FullState denormalize(const NormState& x, const EpiParams& p)
{
    FullState y;
    y[kSh] = x[kSh] * p.N_h;
    y[kIh] = x[kIh] * p.N_h;
    y[kRh] = x[kRh] * p.N_h;
    y[kAm] = x[kAm] * p.k * p.N_h;
    y[kSm] = x[kSm] * p.m * p.N_h;
    y[kIm] = x[kIm] * p.m * p.N_h;
    return y;
}

} // namespace vctrl
