#ifndef VCTRL_EPI_MODEL_HPP
#define VCTRL_EPI_MODEL_HPP

#include <array>
#include <cstddef>

namespace vctrl {

/**
 * Biological and demographic rates of the SIR+ASI dengue model.
 *
 * Rates are per day. Populations are head counts; m and k are ratios of
 * female mosquitoes and larvae to humans.
 */
struct EpiParams {
    double N_h;     ///< total human population
    double B;       ///< bites per mosquito per day
    double beta_mh; ///< transmission probability mosquito -> human, per bite
    double beta_hm; ///< transmission probability human -> mosquito, per bite
    double mu_h;    ///< human death (and birth) rate
    double eta_h;   ///< human recovery rate (1 / viremic period)
    double mu_m;    ///< adult mosquito death rate
    double phi;     ///< eggs per mosquito per day
    double mu_A;    ///< aquatic-phase death rate
    double eta_A;   ///< aquatic-phase maturation rate
    double m;       ///< female mosquitoes per human
    double k;       ///< larvae per human

    /// Throws ParamError unless every field is finite and positive and the
    /// transmission probabilities lie in [0,1].
    void validate() const;
};

/// Parameter set of the Cape Verde 2009 outbreak study.
EpiParams default_params();

/// Larvicide, adulticide and mechanical-control intensities.
struct ControlTriple {
    double c_A = 0.0;
    double c_m = 0.0;
    double alpha = 1.0;

    friend bool operator==(const ControlTriple&, const ControlTriple&) = default;
};

/// The triple applied when no intervention takes place.
inline constexpr ControlTriple no_control{0.0, 0.0, 1.0};

/// Closed admissible box for the controls. alpha is bounded away from zero
/// because it divides the larval carrying capacity.
struct ControlBounds {
    double alpha_min = 0.01;

    bool contains(const ControlTriple& u) const noexcept;
    /// Throws ParamError naming the offending channel.
    void check(const ControlTriple& u) const;
};

enum Compartment : std::size_t { kSh = 0, kIh, kRh, kAm, kSm, kIm };
inline constexpr std::size_t kNumCompartments = 6;

using StateArray = std::array<double, kNumCompartments>;

/// Head counts (S_h, I_h, R_h, A_m, S_m, I_m). Also used for their rates.
struct FullState {
    StateArray v{};

    double& operator[](std::size_t i) noexcept { return v[i]; }
    double operator[](std::size_t i) const noexcept { return v[i]; }
};

/// Fractions (s_h, i_h, r_h, a_m, s_m, i_m): humans over N_h, larvae over
/// k*N_h, mosquitoes over m*N_h. Also used for their rates.
struct NormState {
    StateArray v{};

    double& operator[](std::size_t i) noexcept { return v[i]; }
    double operator[](std::size_t i) const noexcept { return v[i]; }
};

/// Initial condition of the outbreak in normalized scale.
NormState default_initial_state();

/// Rates of the full-scale system. Throws ParamError if alpha <= 0.
FullState rhs_full(double t, const FullState& x, const ControlTriple& u, const EpiParams& p);

/// Rates of the normalized system. Throws ParamError if alpha <= 0.
NormState rhs_norm(double t, const NormState& x, const ControlTriple& u, const EpiParams& p);

NormState normalize(const FullState& x, const EpiParams& p);
FullState denormalize(const NormState& x, const EpiParams& p);

/// Human compartments summed (s_h + i_h + r_h or S_h + I_h + R_h).
template <class State>
double human_total(const State& x) noexcept
{
    return x[kSh] + x[kIh] + x[kRh];
}

/// Parameter combinations of the normalized system, precomputed once so the
/// hot integration loop does no redundant arithmetic. No validation.
struct NormKernel {
    double infect_h; // B * beta_mh * m
    double infect_m; // B * beta_hm
    double mu_h;
    double eta_h;
    double lay;      // phi * m / k
    double mature;   // eta_A * k / m
    double aquatic_loss;
    double mu_m;

    explicit NormKernel(const EpiParams& p) noexcept
        : infect_h(p.B * p.beta_mh * p.m), infect_m(p.B * p.beta_hm), mu_h(p.mu_h), eta_h(p.eta_h),
          lay(p.phi * p.m / p.k), mature(p.eta_A * p.k / p.m), aquatic_loss(p.eta_A + p.mu_A), mu_m(p.mu_m)
    {
    }

    template <class In, class Out>
    void operator()(const In& x, const ControlTriple& u, Out& dx) const noexcept
    {
        const double force_h = infect_h * x[kIm];
        const double force_m = infect_m * x[kIh];
        const double adult_loss = mu_m + u.c_m;
        dx[kSh] = mu_h - (force_h + mu_h) * x[kSh];
        dx[kIh] = force_h * x[kSh] - (eta_h + mu_h) * x[kIh];
        dx[kRh] = eta_h * x[kIh] - mu_h * x[kRh];
        dx[kAm] = lay * (1.0 - x[kAm] / u.alpha) * (x[kSm] + x[kIm]) - (aquatic_loss + u.c_A) * x[kAm];
        dx[kSm] = mature * x[kAm] - (force_m + adult_loss) * x[kSm];
        dx[kIm] = force_m * x[kSm] - adult_loss * x[kIm];
    }
};

} // namespace vctrl

#endif
