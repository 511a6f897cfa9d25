// Command-line driver: simulation runs and the quantitative studies, all
// randomness and parallelism pinned by explicit flags.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgflow/config.hpp"
#include "sgflow/diagnostics.hpp"
#include "sgflow/io.hpp"
#include "sgflow/numerics.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::int64_t seed = -1;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "configuration file (.cfg)")
        ->required();
    cmd->add_option("--out", flags.out_path, "output path")->required();
    cmd->add_option("--seed", flags.seed, "override the quantization seeds");
    cmd->add_option("--threads", flags.threads, "worker threads (0 = auto)");
}

sgflow::SimulationConfig prepare(const CommonFlags& flags,
                                 std::map<std::string, double>& timings) {
    sgflow::set_thread_count(flags.threads);
    const auto start = Clock::now();
    sgflow::SimulationConfig config = sgflow::load_config(flags.config_path);
    if (flags.seed >= 0)
        sgflow::override_seeds(config, static_cast<std::uint64_t>(flags.seed));
    timings["load_config"] = ms_since(start);
    return config;
}

int run_command(const CommonFlags& flags) {
    std::map<std::string, double> timings;
    sgflow::SimulationConfig config = prepare(flags, timings);

    auto start = Clock::now();
    const sgflow::Trajectory traj = sgflow::simulate(config);
    timings["simulate"] = ms_since(start);

    start = Clock::now();
    sgflow::write_trajectory(traj, flags.out_path);
    timings["write"] = ms_since(start);

    const std::string manifest_path = flags.out_path + ".manifest.json";
    sgflow::write_manifest(config, sgflow::bounds_for_config(config), timings,
                           {flags.out_path}, manifest_path);
    std::cout << "wrote " << traj.snapshots.size() << " snapshots to " << flags.out_path
              << "\n";
    if (traj.soft_radius_warnings > 0)
        std::cout << "note: " << traj.soft_radius_warnings
                  << " snapshots exceeded the definition-level support radius\n";
    return 0;
}

int study_tau_command(const CommonFlags& flags, const std::vector<double>& grid) {
    std::map<std::string, double> timings;
    sgflow::SimulationConfig config = prepare(flags, timings);

    const auto start = Clock::now();
    const sgflow::RateFit fit = sgflow::tau_rate_study(config, grid);
    timings["study"] = ms_since(start);

    sgflow::write_rate_report(fit, "tau", flags.out_path);
    sgflow::write_manifest(config, sgflow::bounds_for_config(config), timings,
                           {flags.out_path}, flags.out_path + ".manifest.json");
    std::cout << sgflow::rate_table(fit, "tau");
    return 0;
}

int study_eps_command(const CommonFlags& flags, const std::vector<double>& grid) {
    std::map<std::string, double> timings;
    sgflow::SimulationConfig config = prepare(flags, timings);

    sgflow::SinkhornOptions opts;
    opts.tol = config.sinkhorn_tol;
    opts.max_iter = config.sinkhorn_max_iter;

    const auto start = Clock::now();
    const sgflow::EpsGapReport report = sgflow::eps_gap_study(
        config.alpha0.realize(), config.mu0.realize(), grid, opts);
    timings["study"] = ms_since(start);

    sgflow::write_eps_report(report, flags.out_path);
    sgflow::write_manifest(config, sgflow::bounds_for_config(config), timings,
                           {flags.out_path}, flags.out_path + ".manifest.json");
    std::cout << sgflow::eps_table(report);
    return 0;
}

int study_joint_command(const CommonFlags& flags, const std::string& schedule_path) {
    std::map<std::string, double> timings;
    sgflow::SimulationConfig config = prepare(flags, timings);
    const std::vector<sgflow::JointScheduleRow> schedule =
        sgflow::load_schedule(schedule_path);

    const auto start = Clock::now();
    const sgflow::JointReport report = sgflow::joint_convergence_study(config, schedule);
    timings["study"] = ms_since(start);

    sgflow::write_joint_report(report, flags.out_path);
    sgflow::write_manifest(config, sgflow::bounds_for_config(config), timings,
                           {flags.out_path}, flags.out_path + ".manifest.json");
    std::cout << sgflow::joint_table(report);
    return 0;
}

int report_energy_command(const CommonFlags& flags, const std::string& traj_path) {
    std::map<std::string, double> timings;
    sgflow::SimulationConfig config = prepare(flags, timings);

    auto start = Clock::now();
    const sgflow::Trajectory traj = sgflow::read_trajectory(traj_path);
    timings["read_trajectory"] = ms_since(start);

    sgflow::SinkhornOptions opts;
    opts.tol = config.sinkhorn_tol;
    opts.max_iter = config.sinkhorn_max_iter;

    start = Clock::now();
    const sgflow::EnergyReport report =
        sgflow::energy_report(traj, config.mu0.realize(), config.epsilon, opts);
    timings["study"] = ms_since(start);

    sgflow::write_energy_report(report, flags.out_path);
    sgflow::write_manifest(config, sgflow::bounds_for_config(config), timings,
                           {flags.out_path}, flags.out_path + ".manifest.json");
    std::cout << sgflow::energy_table(report);
    return 0;
}

int error_exit(const sgflow::Error& e) {
    nlohmann::json record{{"error", e.name()}, {"message", e.what()}};
    std::cerr << record.dump() << "\n";
    if (dynamic_cast<const sgflow::SolveFailure*>(&e)) return 3;
    if (dynamic_cast<const sgflow::IoFailure*>(&e)) return 4;
    return 2; // validation / config
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropic semi-geostrophic particle flows"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    CLI::App* run = app.add_subcommand("run", "integrate a trajectory (.sgt output)");
    add_common(run, run_flags);

    CommonFlags tau_flags;
    std::vector<double> tau_grid;
    CLI::App* study_tau =
        app.add_subcommand("study-tau", "time-step convergence rate (.rpt output)");
    add_common(study_tau, tau_flags);
    study_tau->add_option("--tau-grid", tau_grid, "decreasing comma-separated steps")
        ->required()
        ->delimiter(',');

    CommonFlags eps_flags;
    std::vector<double> eps_grid;
    CLI::App* study_eps =
        app.add_subcommand("study-eps", "entropic-gap decay (.rpt output)");
    add_common(study_eps, eps_flags);
    study_eps->add_option("--eps-grid", eps_grid, "decreasing comma-separated epsilons")
        ->required()
        ->delimiter(',');

    CommonFlags joint_flags;
    std::string schedule_path;
    CLI::App* study_joint =
        app.add_subcommand("study-joint", "simultaneous refinement study (.rpt output)");
    add_common(study_joint, joint_flags);
    study_joint->add_option("--schedule", schedule_path, "schedule file")->required();

    CommonFlags energy_flags;
    std::string traj_path;
    CLI::App* report_energy =
        app.add_subcommand("report-energy", "total energy along a trajectory (.rpt output)");
    add_common(report_energy, energy_flags);
    report_energy->add_option("--traj", traj_path, "trajectory file (.sgt)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1; // usage errors are exit code 1
    }

    try {
        if (run->parsed()) return run_command(run_flags);
        if (study_tau->parsed()) return study_tau_command(tau_flags, tau_grid);
        if (study_eps->parsed()) return study_eps_command(eps_flags, eps_grid);
        if (study_joint->parsed()) return study_joint_command(joint_flags, schedule_path);
        if (report_energy->parsed())
            return report_energy_command(energy_flags, traj_path);
    } catch (const sgflow::Error& e) {
        return error_exit(e);
    }
    return 1;
}
