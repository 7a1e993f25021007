#pragma once

// Coupling-strength sweeps on a grid uniform in g/g_c.
//
// A sweep runs in four passes: pattern bases are built and sign-aligned sequentially,
// grid points are solved concurrently, eigenstates are matched across neighbouring
// points by overlap, and finally finite-difference curvatures fill the interior points.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rabi/model.hpp"
#include "rabi/observables.hpp"
#include "rabi/operator_space.hpp"
#include "rabi/pattern_core.hpp"
#include "rabi/spectral.hpp"

namespace rabi {

struct SweepConfig {
    double delta{50.0};
    std::size_t n_max{200};
    std::size_t k_levels{4};
    double g_over_gc_min{0.0};
    double g_over_gc_max{1.5};
    std::size_t n_points{61};
    bool fd_enabled{true};
    bool use_parity{false};
    std::size_t threads{1};  // 0 = hardware concurrency

    void validate() const;
    ModelParams params_at(double g) const { return {delta, g, n_max, k_levels}; }
};

struct SweepRecord {
    double g{0.0};
    double g_over_gc{0.0};
    PatternBasis basis;
    std::optional<PatternDerivatives> derivatives;  // absent where the 3x3 spectrum is degenerate
    std::vector<StateObservables> levels;           // tracked level order
    std::vector<std::optional<double>> d2e;         // d²E_k/dg², interior points only
    Eigen::MatrixXd states;                         // column k is level k
    double residual_norm{0.0};
};

// Everything computed at one coupling value.
struct PointSolution {
    PatternBasis basis;
    PatternOperators ops;
    EigenSolution spectrum;
    std::vector<StateObservables> levels;
};

PointSolution solve_point(const ModelParams& params, const PatternBasis& basis,
                          const Primitives& prims, bool use_parity);
PointSolution solve_point(const ModelParams& params, const Primitives& prims, bool use_parity);

// Grid of g values (not rescaled).
std::vector<double> coupling_grid(const SweepConfig& config);

std::vector<SweepRecord> run_sweep(const SweepConfig& config);

// Central stencil (y[i+1] - 2y[i] + y[i-1])/h² on the n-2 interior points.
// Throws ConfigError on a non-uniform grid or fewer than three points.
std::vector<double> second_derivative_series(std::span<const double> xs,
                                             std::span<const double> ys);

// Grid point of most negative curvature. Throws NumericalError if it sits on the edge
// of the interior series (window too narrow to bracket the transition).
double locate_transition(std::span<const double> xs, std::span<const double> ys);
double locate_transition(const std::vector<SweepRecord>& records);

std::vector<std::pair<double, double>> gap_series(const std::vector<SweepRecord>& records);

// dE_level/dg from fresh solves at g ± h.
double energy_derivative_fd(const ModelParams& params, std::size_t level, double h,
                            const Primitives& prims);

}  // namespace rabi
