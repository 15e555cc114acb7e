#ifndef VCTRL_SCENARIO_HPP
#define VCTRL_SCENARIO_HPP

#include "vctrl/config.hpp"
#include "vctrl/integrator.hpp"
#include "vctrl/ocp.hpp"
#include "vctrl/r0.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vctrl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

struct RunResult {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> files;
};

/// Fixed 10-significant-digit scientific notation, e.g. 2.456379757e+00.
std::string format_number(double v);

struct SummaryRow {
    std::string run;
    double objective;
    double peak_i_h;
    double peak_time;
    double r0_initial;
    std::size_t iterations;
    bool converged;
};

/// Peak of i_h and the first time it is attained.
std::pair<double, double> infection_peak(const Trajectory& traj);

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_controls_csv(const std::filesystem::path& path, const ControlPolicy& policy,
                        const std::vector<double>& times);
void write_r0_grid_csv(const std::filesystem::path& path, const R0Grid& grid);
void write_threshold_csv(const std::filesystem::path& path, const R0Grid& grid,
                         const std::vector<ThresholdPoint>& curve);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

/// Runs the configured scenario and writes its CSV files into output_dir.
/// Returns kExitNotConverged (files still written) if an optimization did
/// not meet its convergence test.
RunResult run(const RunConfig& config);

enum class Figure { fig1a, fig1b, fig1c, fig2, fig3, fig4, fig5, fig6, fig7, fig8 };

Figure parse_figure(std::string_view text);
std::string_view to_string(Figure f) noexcept;

/// Writes one `<figure>_<curve>.csv` per plotted curve.
RunResult emit_figure_data(Figure which, const RunConfig& config);

} // namespace vctrl

#endif
