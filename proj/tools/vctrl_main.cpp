#include "vctrl/config.hpp"
#include "vctrl/errors.hpp"
#include "vctrl/scenario.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

struct Flags {
    std::string config_path;
    std::string out;
    std::string weight_case;
    std::string single;
    std::string sweep;
    std::optional<double> t_f;
    std::optional<std::size_t> intervals;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> multistart;
    std::string figure = "all";
};

void add_common(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--config", f.config_path, "key = value configuration file");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--tf", f.t_f, "horizon in days");
    cmd->add_option("--intervals", f.intervals, "number of piecewise-constant control intervals");
    cmd->add_option("--seed", f.seed, "seed for multistart draws");
}

void add_solver(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--case", f.weight_case, "cost weight case")->check(CLI::IsMember({"A", "B", "C"}));
    cmd->add_option("--multistart", f.multistart, "extra random starting points");
}

vctrl::RunConfig build_config(const Flags& f)
{
    vctrl::RunConfig cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) {
            throw vctrl::IoError("cannot read " + f.config_path);
        }
        std::ostringstream text;
        text << in.rdbuf();
        cfg = vctrl::parse_config(text.str());
    }
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (!f.weight_case.empty()) vctrl::apply_setting(cfg, "weights.case", f.weight_case);
    if (!f.single.empty()) cfg.single = vctrl::parse_channel(f.single);
    if (!f.sweep.empty()) cfg.sweep_pair = vctrl::parse_sweep_pair(f.sweep);
    if (f.t_f) cfg.t_f = *f.t_f;
    if (f.intervals) cfg.n_intervals = *f.intervals;
    if (f.seed) cfg.seed = *f.seed;
    if (f.multistart) cfg.multistart = *f.multistart;
    return cfg;
}

int report(const vctrl::RunResult& r)
{
    for (const auto& p : r.files) {
        std::cout << p.string() << '\n';
    }
    if (r.exit_code == vctrl::kExitNotConverged) {
        std::cerr << "warning: optimizer stopped before meeting its convergence test\n";
    }
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dengue vector-control model: simulation, R0 sweeps and optimal control"};
    app.require_subcommand(1);
    Flags f;

    auto* simulate = app.add_subcommand("simulate", "integrate the model under constant controls");
    add_common(simulate, f);

    auto* r0 = app.add_subcommand("r0", "basic reproduction number, at a point or over a control sweep");
    add_common(r0, f);
    r0->add_option("--sweep", f.sweep, "sweep pair: cm_cA, cm_alpha or cA_alpha");

    auto* optimize = app.add_subcommand("optimize", "solve the optimal control problem");
    add_common(optimize, f);
    add_solver(optimize, f);
    optimize->add_option("--single", f.single, "optimize one control only")
        ->check(CLI::IsMember({"adulticide", "larvicide", "mechanical"}));

    auto* compare = app.add_subcommand("compare", "optimal control against the uncontrolled baseline");
    add_common(compare, f);
    add_solver(compare, f);

    auto* figure = app.add_subcommand("figure", "write the data behind one figure, or all of them");
    add_common(figure, f);
    add_solver(figure, f);
    figure->add_option("which", f.figure, "fig1a..fig1c, fig2..fig8 or all");

    CLI11_PARSE(app, argc, argv);

    try {
        vctrl::RunConfig cfg = build_config(f);
        if (simulate->parsed()) {
            cfg.scenario = vctrl::ScenarioKind::simulate;
        } else if (r0->parsed()) {
            cfg.scenario = f.sweep.empty() ? vctrl::ScenarioKind::r0_point : vctrl::ScenarioKind::r0_sweep;
        } else if (optimize->parsed()) {
            cfg.scenario = f.single.empty() ? vctrl::ScenarioKind::optimize : vctrl::ScenarioKind::optimize_single;
        } else if (compare->parsed()) {
            cfg.scenario = vctrl::ScenarioKind::compare;
        } else {
            int code = vctrl::kExitOk;
            if (f.figure == "all") {
                for (int i = 0; i <= static_cast<int>(vctrl::Figure::fig8); ++i) {
                    const int c = report(vctrl::emit_figure_data(static_cast<vctrl::Figure>(i), cfg));
                    code = std::max(code, c);
                }
            } else {
                code = report(vctrl::emit_figure_data(vctrl::parse_figure(f.figure), cfg));
            }
            return code;
        }
        return report(vctrl::run(cfg));
    } catch (const vctrl::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return vctrl::kExitError;
    }
}
