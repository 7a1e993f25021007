#include "rabi/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rabi/io.hpp"
#include "rabi/sweep.hpp"
#include "rabi/validation.hpp"

namespace rabi::cli {

namespace fs = std::filesystem;

namespace {

struct SweepArgs {
    SweepConfig config;
    std::string out_dir{"."};
};

struct WavefunctionArgs {
    double delta{50.0};
    std::size_t n_max{200};
    std::vector<double> at{0.5, 1.0, 1.5};
    std::vector<std::size_t> levels{0, 1};
    bool parity{false};
    std::string out_dir{"."};
};

void add_model_flags(CLI::App* cmd, double& delta, std::size_t& n_max) {
    cmd->add_option("--delta", delta, "two-level splitting in units of the mode frequency")
        ->capture_default_str();
    cmd->add_option("--nmax", n_max, "Fock truncation N (photon states 0..N)")
        ->capture_default_str();
}

nlohmann::json sweep_config_json(const SweepConfig& c) {
    return {{"delta", c.delta},
            {"n_max", c.n_max},
            {"k_levels", c.k_levels},
            {"g_over_gc_min", c.g_over_gc_min},
            {"g_over_gc_max", c.g_over_gc_max},
            {"n_points", c.n_points},
            {"g_c", critical_coupling(c.delta)},
            {"parity", c.use_parity},
            {"grid", "uniform in g/g_c"}};
}

void write_manifest(const fs::path& path, const std::string& command, nlohmann::json config,
                    std::size_t n_max, std::vector<fs::path> files) {
    RunManifest manifest{command, std::move(config), n_max, utc_timestamp(), std::move(files)};
    write_text_file(path, manifest.to_json().dump(2) + "\n");
}

int cmd_sweep(const SweepArgs& args, std::ostream& out) {
    const std::vector<SweepRecord> records = run_sweep(args.config);

    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    std::ostringstream sweep_csv;
    write_sweep_csv(sweep_csv, records);
    std::ostringstream patterns_csv;
    write_patterns_csv(patterns_csv, records);
    write_text_file(dir / "sweep.csv", sweep_csv.str());
    write_text_file(dir / "patterns.csv", patterns_csv.str());
    write_manifest(dir / "manifest.json", "sweep", sweep_config_json(args.config),
                   args.config.n_max, {dir / "sweep.csv", dir / "patterns.csv"});

    out << "wrote " << records.size() * args.config.k_levels << " level rows and "
        << records.size() << " pattern rows to " << dir.string() << '\n';
    return kSuccess;
}

int cmd_wavefunction(const WavefunctionArgs& args, std::ostream& out) {
    if (args.at.empty())
        throw ConfigError("--at needs at least one coupling value");
    if (args.levels.empty())
        throw ConfigError("--levels needs at least one level index");
    for (double x : args.at)
        if (!(x >= 0.0))
            throw ConfigError("--at values must be >= 0");

    const std::size_t top = *std::max_element(args.levels.begin(), args.levels.end());
    const double gc = critical_coupling(args.delta);
    ModelParams params{args.delta, 0.0, args.n_max, top + 1};
    params.validate();
    const Primitives prims = build_primitives(args.n_max);

    std::vector<WavefunctionRow> rows;
    for (double x : args.at) {
        params.g = x * gc;
        const PointSolution sol = solve_point(params, prims, args.parity);
        for (std::size_t level : args.levels) {
            const auto col = static_cast<Eigen::Index>(level);
            rows.push_back({x, wavefunction_slice(sol.spectrum.states.col(col),
                                                  sol.spectrum.energies[level], sol.basis,
                                                  sol.ops, level, params.g)});
        }
    }

    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    std::ostringstream csv;
    write_wavefunction_csv(csv, rows);
    write_text_file(dir / "wavefunction.csv", csv.str());
    nlohmann::json config{{"delta", args.delta},
                          {"n_max", args.n_max},
                          {"at", args.at},
                          {"levels", args.levels},
                          {"g_c", gc},
                          {"parity", args.parity}};
    write_manifest(dir / "wavefunction_manifest.json", "wavefunction", std::move(config),
                   args.n_max, {dir / "wavefunction.csv"});

    out << "wrote " << rows.size() << " slices to " << (dir / "wavefunction.csv").string()
        << '\n';
    return kSuccess;
}

int cmd_validate(const validation::Options& opts, std::ostream& out) {
    if (opts.points < 3)
        throw ConfigError("--points must be >= 3");
    if (opts.n_max < 1 || opts.n_max_check < 1)
        throw ConfigError("--nmax and --nmax-check must be >= 1");
    const auto results = validation::run_all(opts);
    validation::print_report(out, results);
    const bool ok = std::all_of(results.begin(), results.end(),
                                [](const validation::CheckResult& r) { return r.passed; });
    out << (ok ? "all checks passed" : "validation failed") << '\n';
    return ok ? kSuccess : kValidationFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pattern decomposition of the quantum Rabi model", "rabi-patterns"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "coupling sweep -> sweep.csv, patterns.csv");
    add_model_flags(sweep_cmd, sweep.config.delta, sweep.config.n_max);
    sweep_cmd->add_option("--levels", sweep.config.k_levels, "number of low-lying levels")
        ->capture_default_str();
    sweep_cmd->add_option("--gmin", sweep.config.g_over_gc_min, "lower bound in units of g_c")
        ->capture_default_str();
    sweep_cmd->add_option("--gmax", sweep.config.g_over_gc_max, "upper bound in units of g_c")
        ->capture_default_str();
    sweep_cmd->add_option("--points", sweep.config.n_points, "grid size (>= 3)")
        ->capture_default_str();
    sweep_cmd->add_option("--out-dir", sweep.out_dir, "output directory")->capture_default_str();
    sweep_cmd->add_flag("--parity", sweep.config.use_parity, "solve parity blocks separately");
    sweep_cmd->add_option("--threads", sweep.config.threads, "worker threads (0 = all cores)")
        ->capture_default_str();

    WavefunctionArgs wave;
    auto* wave_cmd = app.add_subcommand("wavefunction", "up-spin wavefunction slices");
    add_model_flags(wave_cmd, wave.delta, wave.n_max);
    wave_cmd->add_option("--at", wave.at, "coupling in units of g_c (repeatable)")
        ->capture_default_str();
    wave_cmd->add_option("--levels", wave.levels, "comma-separated level indices")
        ->delimiter(',')
        ->capture_default_str();
    wave_cmd->add_option("--out-dir", wave.out_dir, "output directory")->capture_default_str();
    wave_cmd->add_flag("--parity", wave.parity, "solve parity blocks separately");

    validation::Options vopts;
    auto* val_cmd = app.add_subcommand("validate", "run the invariant suite");
    add_model_flags(val_cmd, vopts.delta, vopts.n_max);
    val_cmd->add_option("--nmax-check", vopts.n_max_check, "second cutoff for the convergence check")
        ->capture_default_str();
    val_cmd->add_option("--points", vopts.points, "sweep size for the sum-rule check")
        ->capture_default_str();
    val_cmd->add_option("--seed", vopts.seed, "seed for the random parameter draws")
        ->capture_default_str();
    val_cmd->add_option("--threads", vopts.threads, "worker threads (0 = all cores)")
        ->capture_default_str();
    val_cmd->add_option("--inject-delta-mismatch", vopts.inject_delta_mismatch)
        ->group("");  // test hook

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (*sweep_cmd)
            return cmd_sweep(sweep, out);
        if (*wave_cmd)
            return cmd_wavefunction(wave, out);
        return cmd_validate(vopts, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

}  // namespace rabi::cli
