#include "doctest.h"

#include "vctrl/errors.hpp"
#include "vctrl/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace vctrl;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir()
    {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("vctrl_test_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Csv {
    std::string header;
    std::vector<std::vector<std::string>> rows;

    double num(std::size_t r, std::size_t c) const { return std::stod(rows.at(r).at(c)); }
};

Csv read_csv(const fs::path& p)
{
    std::ifstream in(p);
    REQUIRE(in);
    Csv csv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (csv.header.empty()) {
            csv.header = line;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        csv.rows.push_back(cells);
    }
    return csv;
}

void check_conservation(const Csv& traj)
{
    REQUIRE(traj.header == "t,s_h,i_h,r_h,a_m,s_m,i_m");
    double worst = 0.0;
    for (std::size_t r = 0; r < traj.rows.size(); ++r) {
        worst = std::max(worst, std::abs(traj.num(r, 1) + traj.num(r, 2) + traj.num(r, 3) - 1.0));
    }
    CHECK(worst <= 1e-9);
}

RunConfig coarse(ScenarioKind kind, const fs::path& dir)
{
    RunConfig cfg;
    cfg.scenario = kind;
    cfg.n_intervals = 12;
    cfg.output_dir = dir.string();
    return cfg;
}

} // namespace

TEST_CASE("format_number keeps ten significant digits")
{
    CHECK(format_number(2.4563797565938494) == "2.456379757e+00");
    CHECK(format_number(0.0) == "0.000000000e+00");
    CHECK(format_number(-0.0) == "0.000000000e+00");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("simulate writes a conserving trajectory")
{
    TempDir tmp;
    const RunResult r = run(coarse(ScenarioKind::simulate, tmp.path()));
    CHECK(r.exit_code == kExitOk);
    const Csv traj = read_csv(tmp.path() / "trajectory.csv");
    CHECK(traj.rows.size() == output_points_for(84.0));
    CHECK(traj.num(traj.rows.size() - 1, 0) == 84.0);
    check_conservation(traj);

    const Csv controls = read_csv(tmp.path() / "controls.csv");
    CHECK(controls.header == "t,c_A,c_m,alpha");
    CHECK(controls.rows.size() == traj.rows.size());
    CHECK(controls.num(5, 3) == 1.0);

    const Csv summary = read_csv(tmp.path() / "summary.csv");
    CHECK(summary.header == "run,objective,peak_i_h,peak_time,r0_initial,iterations,converged");
    CHECK(summary.num(0, 4) == doctest::Approx(2.4564).epsilon(2e-4));
}

TEST_CASE("r0-point reports the baseline reproduction number")
{
    TempDir tmp;
    run(coarse(ScenarioKind::r0_point, tmp.path()));
    const Csv summary = read_csv(tmp.path() / "summary.csv");
    REQUIRE(summary.rows.size() == 1);
    CHECK(std::abs(summary.num(0, 4) - 2.4564) <= 5e-4);
}

TEST_CASE("r0-sweep grid layout")
{
    TempDir tmp;
    RunConfig cfg = coarse(ScenarioKind::r0_sweep, tmp.path());
    cfg.sweep_pair = SweepPair::cA_alpha;
    cfg.sweep_resolution = 11;
    run(cfg);

    std::ifstream in(tmp.path() / "r0_grid.csv");
    std::string first, second;
    std::getline(in, first);
    std::getline(in, second);
    CHECK(first == "# x_name,y_name,fixed_name,fixed_value");
    CHECK(second == "# c_A,alpha,c_m,0.000000000e+00");

    const Csv grid = read_csv(tmp.path() / "r0_grid.csv");
    CHECK(grid.header == "x,y,r0");
    REQUIRE(grid.rows.size() == 121);
    // last row: c_A = 1, alpha = 1
    CHECK(grid.num(120, 0) == 1.0);
    CHECK(grid.num(120, 1) == 1.0);
    CHECK(grid.num(0, 1) == doctest::Approx(0.01));

    const Csv curve = read_csv(tmp.path() / "threshold.csv");
    CHECK(curve.header == "x,y");
    CHECK(curve.rows.size() == 11);
}

TEST_CASE("compare: optimum beats the baseline")
{
    TempDir tmp;
    const RunResult r = run(coarse(ScenarioKind::compare, tmp.path()));
    CHECK(r.exit_code == kExitOk);
    check_conservation(read_csv(tmp.path() / "trajectory.csv"));
    check_conservation(read_csv(tmp.path() / "baseline_trajectory.csv"));

    const Csv summary = read_csv(tmp.path() / "summary.csv");
    REQUIRE(summary.rows.size() == 2);
    CHECK(summary.rows[0][0] == "optimal");
    CHECK(summary.rows[1][0] == "baseline");
    CHECK(summary.num(0, 1) <= summary.num(1, 1));
    CHECK(summary.num(0, 2) < summary.num(1, 2));
    CHECK(summary.rows[0][6] == "1");
}

TEST_CASE("identical configs give byte-identical files")
{
    TempDir a, b;
    RunConfig cfg = coarse(ScenarioKind::optimize, a.path());
    cfg.multistart = 2;
    cfg.seed = 3;
    const RunResult ra = run(cfg);
    cfg.output_dir = b.path().string();
    const RunResult rb = run(cfg);
    REQUIRE(ra.files.size() == rb.files.size());
    for (std::size_t i = 0; i < ra.files.size(); ++i) {
        CHECK(ra.files[i].filename() == rb.files[i].filename());
        CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
    }
}

TEST_CASE("iteration cap gives the not-converged status but still writes files")
{
    TempDir tmp;
    RunConfig cfg = coarse(ScenarioKind::optimize, tmp.path());
    cfg.max_iterations = 1;
    const RunResult r = run(cfg);
    CHECK(r.exit_code == kExitNotConverged);
    CHECK(fs::exists(tmp.path() / "summary.csv"));
    CHECK(read_csv(tmp.path() / "summary.csv").rows[0][6] == "0");
}

TEST_CASE("unwritable output directory")
{
    TempDir tmp;
    const fs::path blocker = tmp.path() / "file";
    std::ofstream(blocker) << "x";
    RunConfig cfg = coarse(ScenarioKind::r0_point, blocker / "sub");
    CHECK_THROWS_AS(run(cfg), IoError);
}

TEST_CASE("figure data files")
{
    TempDir tmp;
    RunConfig cfg = coarse(ScenarioKind::optimize, tmp.path());
    cfg.sweep_resolution = 5;

    RunResult r = emit_figure_data(Figure::fig1a, cfg);
    CHECK(fs::exists(tmp.path() / "fig1a_r0_grid.csv"));

    r = emit_figure_data(Figure::fig6, cfg);
    CHECK(r.files.size() == 4);
    for (const char* name : {"fig6_c_m_all.csv", "fig6_c_m_single.csv", "fig6_i_h_all.csv", "fig6_i_h_single.csv"}) {
        CHECK(fs::exists(tmp.path() / name));
    }
    const Csv single = read_csv(tmp.path() / "fig6_i_h_single.csv");
    CHECK(single.header == "t,i_h");

    r = emit_figure_data(Figure::fig4, cfg);
    CHECK(r.files.size() == 3);

    CHECK(parse_figure("fig8") == Figure::fig8);
    CHECK_THROWS_AS(parse_figure("fig9"), ParamError);
}

TEST_CASE("fixed-step simulation survives the smallest mechanical control")
{
    TempDir tmp;
    RunConfig cfg = coarse(ScenarioKind::simulate, tmp.path());
    cfg.method = Method::rk4_fixed;
    cfg.controls = {1.0, 1.0, 0.01};
    CHECK(run(cfg).exit_code == kExitOk);
    check_conservation(read_csv(tmp.path() / "trajectory.csv"));
}
