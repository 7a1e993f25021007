#include "rabi/validation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "rabi/observables.hpp"
#include "rabi/operator_space.hpp"
#include "rabi/pattern_core.hpp"
#include "rabi/spectral.hpp"
#include "rabi/sweep.hpp"

namespace rabi::validation {

namespace {

std::string describe(const char* what, double value, double bound) {
    std::ostringstream out;
    out.precision(3);
    out << what << " = " << std::scientific << value << " (bound " << bound << ")";
    return out.str();
}

CheckResult dual_build(const Options& opts) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> delta_dist(0.0, 60.0);
    std::uniform_real_distribution<double> g_dist(0.0, 6.0);
    const std::size_t cutoffs[] = {1, 5, 50};
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        ModelParams p{delta_dist(rng), g_dist(rng), cutoffs[trial % 3], 1};
        const Primitives prims = build_primitives(p.n_max);
        ModelParams shifted = p;
        shifted.delta += opts.inject_delta_mismatch;
        const PatternBasis basis = diagonalize_pattern(coupling_matrix(shifted, p.g));
        const Eigen::MatrixXd diff = build_hamiltonian_patterns(basis, prims).entries -
                                     build_hamiltonian_direct(p, prims).entries;
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    return {"dual_build", worst < 1e-12, describe("max |H_patterns - H_direct|", worst, 1e-12)};
}

CheckResult decoupled_limit(const Options& opts) {
    const ModelParams p{opts.delta, 0.0, opts.n_max, 4};
    const Primitives prims = build_primitives(p.n_max);
    const PointSolution sol = solve_point(p, prims, false);

    // At g = 0 the spectrum is {m ± Δ/2}.
    std::vector<double> expected;
    for (std::size_t m = 0; m <= p.n_max && expected.size() < 16; ++m) {
        expected.push_back(static_cast<double>(m) - p.delta / 2.0);
        expected.push_back(static_cast<double>(m) + p.delta / 2.0);
    }
    std::sort(expected.begin(), expected.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        worst = std::max(worst, std::abs(sol.spectrum.energies[i] - expected[i]));
    const StateObservables& ground = sol.levels.front();
    const Eigen::Vector3d e_expected(-p.delta / 2.0, 0.0, 0.0);
    const double pattern_err = (ground.pattern_energies - e_expected).cwiseAbs().maxCoeff();
    const double photon_err = std::abs(ground.photon_total);
    const double sx_err = p.delta > 0.0 ? std::abs(ground.sigma_x_total + 1.0) : 0.0;
    const double gap_err = std::abs((sol.spectrum.energies[1] - sol.spectrum.energies[0]) -
                                    (expected[1] - expected[0]));

    const bool ok = worst < 1e-10 && pattern_err < 1e-10 && photon_err < 1e-12 &&
                    sx_err < 1e-12 && gap_err < 1e-10;
    std::ostringstream detail;
    detail.precision(3);
    detail << std::scientific << "energy err " << worst << ", pattern err " << pattern_err
           << ", photon " << photon_err << ", sigma_x err " << sx_err << ", gap err " << gap_err;
    return {"decoupled_limit", ok, detail.str()};
}

CheckResult sum_rules(const Options& opts) {
    SweepConfig cfg;
    cfg.delta = opts.delta;
    cfg.n_max = opts.n_max;
    cfg.n_points = opts.points;
    cfg.threads = opts.threads;
    const auto records = run_sweep(cfg);
    double worst = 0.0;
    for (const auto& rec : records) {
        for (const auto& obs : rec.levels) {
            worst = std::max({worst, std::abs(obs.pattern_energies.sum() - obs.energy),
                              std::abs(obs.photon_by_pattern.sum() - obs.photon_total),
                              std::abs(obs.sigma_x_by_pattern.sum() - obs.sigma_x_total)});
        }
    }
    return {"sum_rules", worst < 1e-9, describe("max sum-rule violation", worst, 1e-9)};
}

CheckResult pattern_derivative_check(const Options& opts) {
    std::mt19937_64 rng(opts.seed + 1);
    std::uniform_real_distribution<double> delta_dist(0.0, 60.0);
    std::uniform_real_distribution<double> g_dist(0.1, 6.0);
    constexpr double h = 1e-4;
    double worst = 0.0;
    int accepted = 0;
    while (accepted < 20) {
        const ModelParams p{delta_dist(rng), g_dist(rng), 1, 1};
        const CouplingMatrix m = coupling_matrix(p, p.g);
        const PatternBasis basis = diagonalize_pattern(m);
        const Eigen::Vector3d& l = basis.lambdas;
        if (std::min({std::abs(l(0) - l(1)), std::abs(l(0) - l(2)), std::abs(l(1) - l(2))}) < 0.5)
            continue;
        ++accepted;
        const PatternDerivatives d = pattern_derivatives(m, basis);
        const Eigen::Vector3d lp = diagonalize_pattern(coupling_matrix(p, p.g + h)).lambdas;
        const Eigen::Vector3d lm = diagonalize_pattern(coupling_matrix(p, p.g - h)).lambdas;
        const Eigen::Vector3d first = (lp - lm) / (2.0 * h);
        const Eigen::Vector3d second = (lp - 2.0 * l + lm) / (h * h);
        worst = std::max({worst, (first - d.dlambda).cwiseAbs().maxCoeff(),
                          (second - d.d2lambda).cwiseAbs().maxCoeff()});
    }
    return {"pattern_derivatives", worst < 1e-6,
            describe("max |analytic - finite difference|", worst, 1e-6)};
}

CheckResult hellmann_feynman(const Options& opts) {
    const double gc = critical_coupling(opts.delta);
    const Primitives prims = build_primitives(opts.n_max);
    constexpr double h = 1e-3;
    double worst = 0.0;
    for (int i = 1; i <= 10; ++i) {
        const double g = 0.09 * i * gc;
        const ModelParams p{opts.delta, g, opts.n_max, 1};
        const PointSolution sol = solve_point(p, prims, false);
        const double analytic = coupling_expectation(sol.spectrum.states.col(0), prims);
        worst = std::max(worst, std::abs(energy_derivative_fd(p, 0, h, prims) - analytic));
    }
    return {"hellmann_feynman", worst < 1e-5,
            describe("max |dE0/dg - <(a+a^dag)sigma_z>|", worst, 1e-5)};
}

CheckResult truncation(const Options& opts) {
    const double g = 1.5 * critical_coupling(opts.delta);
    auto ground = [&](std::size_t n_max) {
        const ModelParams p{opts.delta, g, n_max, 1};
        return solve_point(p, build_primitives(n_max), false).spectrum.energies.front();
    };
    const double e_a = ground(opts.n_max);
    const double e_b = ground(opts.n_max_check);
    std::ostringstream detail;
    detail.precision(17);
    detail << "E0(N=" << opts.n_max << ") = " << e_a << ", E0(N=" << opts.n_max_check
           << ") = " << e_b << ", " << describe("|difference|", std::abs(e_a - e_b), 1e-8);
    return {"truncation_convergence", std::abs(e_a - e_b) < 1e-8, detail.str()};
}

template <typename Fn>
CheckResult guarded(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        return {name, false, std::string("error: ") + e.what()};
    }
}

}  // namespace

std::vector<CheckResult> run_all(const Options& opts) {
    std::vector<CheckResult> out;
    out.push_back(guarded("dual_build", [&] { return dual_build(opts); }));
    out.push_back(guarded("decoupled_limit", [&] { return decoupled_limit(opts); }));
    out.push_back(guarded("sum_rules", [&] { return sum_rules(opts); }));
    out.push_back(guarded("pattern_derivatives", [&] { return pattern_derivative_check(opts); }));
    out.push_back(guarded("hellmann_feynman", [&] { return hellmann_feynman(opts); }));
    out.push_back(guarded("truncation_convergence", [&] { return truncation(opts); }));
    return out;
}

void print_report(std::ostream& out, const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
}

}  // namespace rabi::validation
