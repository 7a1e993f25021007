#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "rabi/io.hpp"
#include "rabi/sweep.hpp"

using namespace rabi;

namespace {

std::string as_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream out;
    write_sweep_csv(out, records);
    write_patterns_csv(out, records);
    return out.str();
}

// Grid argmin of the stencil curvature of E_0 computed by Sturm bisection.
double oracle_transition(const SweepConfig& cfg) {
    const std::vector<double> g = coupling_grid(cfg);
    std::vector<double> e(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        e[i] = oracle::rabi_level(cfg.delta, g[i], cfg.n_max, 0);
    const double h = g[1] - g[0];
    std::size_t best = 1;
    double best_val = 1e300;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        const double d2 = (e[i + 1] - 2 * e[i] + e[i - 1]) / (h * h);
        if (d2 < best_val) {
            best_val = d2;
            best = i;
        }
    }
    return g[best];
}

}  // namespace

TEST_CASE("second derivative stencil") {
    const std::vector<double> xs{0.0, 0.25, 0.5, 0.75, 1.0};
    const std::vector<double> flat(5, 3.0);
    for (double v : second_derivative_series(xs, flat))
        CHECK(v == 0.0);

    std::vector<double> xs2, sq;
    for (int i = 0; i < 11; ++i) {
        xs2.push_back(-1.0 + 0.3 * i);
        sq.push_back(xs2.back() * xs2.back());
    }
    const std::vector<double> d2 = second_derivative_series(xs2, sq);
    CHECK(d2.size() == 9);
    for (double v : d2)
        CHECK(v == doctest::Approx(2.0).epsilon(1e-12));

    const std::vector<double> uneven{0.0, 0.1, 0.3, 0.4};
    CHECK_THROWS_AS(second_derivative_series(uneven, std::vector<double>(4, 0.0)), ConfigError);
    CHECK_THROWS_AS(second_derivative_series(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0}),
                    ConfigError);
}

TEST_CASE("sweep configuration is validated") {
    SweepConfig cfg;
    cfg.n_points = 2;
    CHECK_THROWS_AS(run_sweep(cfg), ConfigError);
    cfg.n_points = 5;
    cfg.g_over_gc_min = 1.0;
    cfg.g_over_gc_max = 1.0;
    CHECK_THROWS_AS(run_sweep(cfg), ConfigError);
    cfg.g_over_gc_min = 0.0;
    cfg.k_levels = 0;
    CHECK_THROWS_AS(run_sweep(cfg), ConfigError);
}

TEST_CASE("default sweep") {
    SweepConfig cfg;  // Δ = 50, N = 200, four levels, 0 -> 1.5 g_c
    const auto records = run_sweep(cfg);
    REQUIRE(records.size() == 61);

    const double gc = critical_coupling(50.0);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].g_over_gc == doctest::Approx(0.025 * i).epsilon(1e-12));
        CHECK(records[i].g == doctest::Approx(0.025 * i * gc).epsilon(1e-12));
        if (i > 0) {
            CHECK(records[i].g > records[i - 1].g);
            CHECK(records[i].levels[0].energy <= records[i - 1].levels[0].energy);
        }
        const auto& rec = records[i];
        REQUIRE(rec.levels.size() == 4);
        CHECK(rec.residual_norm < 1e-9 * std::max(1.0, std::abs(rec.levels[0].energy)));
        CHECK((rec.states.transpose() * rec.states - Eigen::MatrixXd::Identity(4, 4))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
        for (const auto& obs : rec.levels) {
            CHECK(std::abs(obs.pattern_energies.sum() - obs.energy) < 1e-9);
            CHECK(std::abs(obs.photon_by_pattern.sum() - obs.photon_total) < 1e-9);
            CHECK(std::abs(obs.sigma_x_by_pattern.sum() - obs.sigma_x_total) < 1e-9);
        }
        CHECK(rec.d2e[0].has_value() == (i > 0 && i + 1 < records.size()));
        CHECK(rec.derivatives.has_value());
    }

    SUBCASE("first grid point is the decoupled limit") {
        const SweepRecord& r0 = records.front();
        const double expected[] = {-25, -24, -23, -22};
        for (int k = 0; k < 4; ++k)
            CHECK(r0.levels[static_cast<std::size_t>(k)].energy == doctest::Approx(expected[k]).epsilon(1e-13));
        CHECK(r0.basis.lambdas == Eigen::Vector3d(-12.5, 1.0, 12.5));
        CHECK(std::abs(r0.levels[0].pattern_energies(0) + 25.0) < 1e-12);
        CHECK(std::abs(r0.levels[0].photon_total) < 1e-12);
        CHECK(std::abs(r0.levels[0].sigma_x_total + 1.0) < 1e-12);
        CHECK(r0.derivatives->dlambda(1) == 0.0);
    }

    SUBCASE("level curves are continuous") {
        const Primitives prims = build_primitives(cfg.n_max);
        for (std::size_t i = 0; i + 1 < records.size(); ++i) {
            const double h = records[i + 1].g - records[i].g;
            for (Eigen::Index k = 0; k < 4; ++k) {
                const double s0 = coupling_expectation(records[i].states.col(k), prims);
                const double s1 = coupling_expectation(records[i + 1].states.col(k), prims);
                const double jump = std::abs(records[i + 1].levels[static_cast<std::size_t>(k)].energy -
                                             records[i].levels[static_cast<std::size_t>(k)].energy);
                CAPTURE(i);
                CAPTURE(k);
                CHECK(jump < 10.0 * h * std::max(std::abs(s0), std::abs(s1)));
            }
        }
    }

    SUBCASE("gap series") {
        const auto gaps = gap_series(records);
        CHECK(std::abs(gaps.front().second - 1.0) < 1e-10);
        for (const auto& [g, gap] : gaps) {
            CHECK(std::isfinite(gap));
            CHECK(gap >= 0.0);
        }
        CHECK(gaps.back().second < 1e-8 * std::abs(records.back().levels[0].energy));
    }

    SUBCASE("curvature dips near the transition") {
        std::size_t argmin = 1;
        for (std::size_t i = 1; i + 1 < records.size(); ++i)
            if (*records[i].d2e[0] < *records[argmin].d2e[0])
                argmin = i;
        CHECK(*records[argmin].d2e[0] < -1.0);
        CHECK(records[argmin].g_over_gc > 0.9);
        CHECK(records[argmin].g_over_gc < 1.2);
    }
}

TEST_CASE("transition locator") {
    const std::vector<double> xs{0, 1, 2, 3, 4, 5};
    CHECK_THROWS_AS(locate_transition(xs, std::vector<double>(6, -2.0)), NumericalError);

    SweepConfig cfg;
    cfg.n_max = 80;
    cfg.k_levels = 1;
    cfg.g_over_gc_min = 0.5;
    cfg.g_over_gc_max = 1.5;
    cfg.n_points = 121;
    const auto coarse = run_sweep(cfg);
    const double g_star = locate_transition(coarse);
    CHECK(g_star == doctest::Approx(oracle_transition(cfg)).epsilon(1e-12));

    const double spacing = coarse[1].g - coarse[0].g;
    cfg.n_points = 241;
    const double fine = locate_transition(run_sweep(cfg));
    CHECK(std::abs(fine - g_star) < spacing);

    std::vector<SweepRecord> one_level = coarse;
    CHECK_THROWS_AS(gap_series(one_level), ConfigError);
}

TEST_CASE("sweeps are deterministic and independent of threading") {
    SweepConfig cfg;
    cfg.n_max = 60;
    cfg.n_points = 21;
    cfg.k_levels = 3;
    const std::string serial = as_csv(run_sweep(cfg));
    CHECK(serial == as_csv(run_sweep(cfg)));
    cfg.threads = 4;
    CHECK(serial == as_csv(run_sweep(cfg)));
}

TEST_CASE("parity sweep reproduces the plain sweep") {
    SweepConfig cfg;
    cfg.n_max = 80;
    cfg.n_points = 13;
    const auto plain = run_sweep(cfg);
    cfg.use_parity = true;
    const auto split = run_sweep(cfg);
    for (std::size_t i = 0; i < plain.size(); ++i)
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(std::abs(plain[i].levels[k].energy - split[i].levels[k].energy) < 1e-10);
            CHECK(std::abs(plain[i].levels[k].photon_total - split[i].levels[k].photon_total) < 1e-8);
        }
}

TEST_CASE("finite-difference energy derivative") {
    const Primitives prims = build_primitives(10);
    const ModelParams p{2.0, 0.0005, 10, 1};
    CHECK_THROWS_AS(energy_derivative_fd(p, 0, 1e-3, prims), ConfigError);
    CHECK_THROWS_AS(energy_derivative_fd(p, 0, 0.0, prims), ConfigError);
}
