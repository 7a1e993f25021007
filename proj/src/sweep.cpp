#include "rabi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace rabi {

namespace {

constexpr double kMinStateOverlap = 0.5;
constexpr double kClusterTolerance = 1e-9;
constexpr double kGridUniformityTolerance = 1e-9;

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failed_at = count;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    // Keep the error of the lowest index so failures are reproducible.
                    std::lock_guard lock(failure_mutex);
                    if (i < failed_at) {
                        failed_at = i;
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
}

constexpr std::size_t kTrackingGuardLevels = 2;

struct Candidates {
    std::vector<StateObservables> levels;
    Eigen::MatrixXd states;
};

// Picks, for each tracked level of prev, the candidate column at the next grid point.
// Candidates whose energies coincide within kClusterTolerance are an arbitrary rotation
// of one another, so levels are matched to clusters by the weight of their projection,
// and inside a cluster the ascending energy order is kept.
std::vector<Eigen::Index> track_levels(const SweepRecord& prev, const Candidates& cur) {
    const std::size_t k = prev.levels.size();
    const std::size_t n = cur.levels.size();
    const Eigen::MatrixXd overlap = prev.states.transpose() * cur.states;

    std::vector<std::vector<Eigen::Index>> clusters;
    for (std::size_t j = 0; j < n; ++j) {
        const double e = cur.levels[j].energy;
        if (!clusters.empty()) {
            const double last = cur.levels[static_cast<std::size_t>(clusters.back().back())].energy;
            if (std::abs(e - last) <= kClusterTolerance * std::max({1.0, std::abs(e), std::abs(last)})) {
                clusters.back().push_back(static_cast<Eigen::Index>(j));
                continue;
            }
        }
        clusters.push_back({static_cast<Eigen::Index>(j)});
    }

    Eigen::MatrixXd weight(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(clusters.size()));
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (std::size_t i = 0; i < k; ++i) {
            double w = 0.0;
            for (Eigen::Index j : clusters[c])
                w += overlap(static_cast<Eigen::Index>(i), j) * overlap(static_cast<Eigen::Index>(i), j);
            weight(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = w;
        }

    for (std::size_t i = 0; i < k; ++i) {
        const double best = std::sqrt(weight.row(static_cast<Eigen::Index>(i)).maxCoeff());
        if (best < kMinStateOverlap) {
            std::ostringstream msg;
            msg << "level " << i << " cannot be followed from g=" << prev.g << " (max overlap "
                << best << " < " << kMinStateOverlap << "); use a finer grid";
            throw NumericalError(msg.str());
        }
    }

    // Greedy by weight; each cluster takes at most as many levels as it has states.
    std::vector<int> cluster_of(k, -1);
    std::vector<std::size_t> capacity(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c)
        capacity[c] = clusters[c].size();
    for (std::size_t step = 0; step < k; ++step) {
        double best = -1.0;
        std::size_t bi = 0, bc = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if (cluster_of[i] >= 0)
                continue;
            for (std::size_t c = 0; c < clusters.size(); ++c) {
                const double w = weight(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
                if (capacity[c] > 0 && w > best) {
                    best = w;
                    bi = i;
                    bc = c;
                }
            }
        }
        cluster_of[bi] = static_cast<int>(bc);
        --capacity[bc];
    }

    std::vector<Eigen::Index> columns(k);
    std::vector<std::size_t> used(clusters.size(), 0);
    for (std::size_t i = 0; i < k; ++i) {  // ascending level index -> ascending column
        const auto c = static_cast<std::size_t>(cluster_of[i]);
        columns[i] = clusters[c][used[c]++];
    }
    return columns;
}

void take_levels(SweepRecord& rec, const Candidates& cand, const std::vector<Eigen::Index>& columns) {
    rec.levels.clear();
    rec.states.resize(cand.states.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < columns.size(); ++i) {
        rec.levels.push_back(cand.levels[static_cast<std::size_t>(columns[i])]);
        rec.states.col(static_cast<Eigen::Index>(i)) = cand.states.col(columns[i]);
    }
}

}  // namespace

void SweepConfig::validate() const {
    if (n_points < 3)
        throw ConfigError("a sweep needs at least 3 points for the curvature stencil");
    if (!(g_over_gc_min >= 0.0 && g_over_gc_min < g_over_gc_max))
        throw ConfigError("sweep bounds must satisfy 0 <= min < max");
    if (!std::isfinite(g_over_gc_max))
        throw ConfigError("sweep bounds must be finite");
    params_at(0.0).validate();
}

PointSolution solve_point(const ModelParams& params, const PatternBasis& basis,
                          const Primitives& prims, bool use_parity) {
    PointSolution out;
    out.basis = basis;
    out.ops = build_pattern_operators(basis, prims);
    const OperatorMatrix h = build_hamiltonian_patterns(basis, out.ops);
    out.spectrum = use_parity ? eigensolve_parity(parity_blocks(h, prims.n_max), params.k_levels)
                              : eigensolve(h, params.k_levels);
    out.levels.reserve(out.spectrum.size());
    for (std::size_t i = 0; i < out.spectrum.size(); ++i)
        out.levels.push_back(observe_state(out.spectrum.states.col(static_cast<Eigen::Index>(i)),
                                           out.spectrum.energies[i], basis, out.ops, prims));
    return out;
}

PointSolution solve_point(const ModelParams& params, const Primitives& prims, bool use_parity) {
    return solve_point(params, diagonalize_pattern(coupling_matrix(params, params.g)), prims,
                       use_parity);
}

std::vector<double> coupling_grid(const SweepConfig& config) {
    const double gc = critical_coupling(config.delta);
    const double step =
        (config.g_over_gc_max - config.g_over_gc_min) / static_cast<double>(config.n_points - 1);
    std::vector<double> grid(config.n_points);
    for (std::size_t i = 0; i < config.n_points; ++i)
        grid[i] = (config.g_over_gc_min + static_cast<double>(i) * step) * gc;
    return grid;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
    config.validate();
    const double gc = critical_coupling(config.delta);
    const std::vector<double> grid = coupling_grid(config);
    const std::size_t n = grid.size();

    std::vector<SweepRecord> records(n);
    for (std::size_t i = 0; i < n; ++i) {
        const ModelParams params = config.params_at(grid[i]);
        const CouplingMatrix m = coupling_matrix(params, grid[i]);
        PatternBasis basis = diagonalize_pattern(m);
        if (i > 0)
            basis = align_signs(records[i - 1].basis, basis);
        records[i].g = grid[i];
        records[i].g_over_gc = grid[i] / gc;
        records[i].basis = basis;
        try {
            records[i].derivatives = pattern_derivatives(m, basis);
        } catch (const DegenerateSpectrumError&) {
            records[i].derivatives.reset();
        }
    }

    const Primitives prims = build_primitives(config.n_max);
    const std::size_t k = config.k_levels;
    const std::size_t n_candidates =
        std::min(k + kTrackingGuardLevels, config.params_at(0.0).dim());
    std::vector<Candidates> candidates(n);
    parallel_for(n, config.threads, [&](std::size_t i) {
        SweepRecord& rec = records[i];
        ModelParams params = config.params_at(rec.g);
        params.k_levels = n_candidates;
        try {
            PointSolution sol = solve_point(params, rec.basis, prims, config.use_parity);
            candidates[i].levels = std::move(sol.levels);
            candidates[i].states = std::move(sol.spectrum.states);
            rec.residual_norm = sol.spectrum.residual_norm;
        } catch (const NumericalError& e) {
            std::ostringstream msg;
            msg << "at g=" << rec.g << ": " << e.what();
            throw NumericalError(msg.str());
        }
    });

    std::vector<Eigen::Index> lowest(k);
    std::iota(lowest.begin(), lowest.end(), Eigen::Index{0});
    take_levels(records[0], candidates[0], lowest);
    for (std::size_t i = 1; i < n; ++i)
        take_levels(records[i], candidates[i], track_levels(records[i - 1], candidates[i]));

    for (auto& rec : records)
        rec.d2e.assign(config.k_levels, std::nullopt);
    if (config.fd_enabled) {
        std::vector<double> ys(n);
        for (std::size_t k = 0; k < config.k_levels; ++k) {
            for (std::size_t i = 0; i < n; ++i)
                ys[i] = records[i].levels[k].energy;
            const std::vector<double> d2 = second_derivative_series(grid, ys);
            for (std::size_t i = 1; i + 1 < n; ++i)
                records[i].d2e[k] = d2[i - 1];
        }
    }
    return records;
}

std::vector<double> second_derivative_series(std::span<const double> xs,
                                             std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw ConfigError("grid and values differ in length");
    if (xs.size() < 3)
        throw ConfigError("second derivative needs at least 3 points");
    const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    if (!(h > 0.0))
        throw ConfigError("grid must be strictly increasing");
    const double scale = std::max(std::abs(xs.front()), std::abs(xs.back()));
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (std::abs((xs[i] - xs[i - 1]) - h) > kGridUniformityTolerance * std::max(h, scale))
            throw ConfigError("second derivative needs a uniform grid");
    }
    std::vector<double> out(xs.size() - 2);
    for (std::size_t i = 1; i + 1 < xs.size(); ++i)
        out[i - 1] = (ys[i + 1] - 2.0 * ys[i] + ys[i - 1]) / (h * h);
    return out;
}

double locate_transition(std::span<const double> xs, std::span<const double> ys) {
    const std::vector<double> d2 = second_derivative_series(xs, ys);
    const auto it = std::min_element(d2.begin(), d2.end());
    const auto idx = static_cast<std::size_t>(it - d2.begin());
    if (idx == 0 || idx + 1 == d2.size()) {
        std::ostringstream msg;
        msg << "curvature minimum at the edge of the window (g=" << xs[idx + 1]
            << "); widen the sweep";
        throw NumericalError(msg.str());
    }
    return xs[idx + 1];
}

double locate_transition(const std::vector<SweepRecord>& records) {
    std::vector<double> xs, ys;
    for (const auto& rec : records) {
        if (rec.levels.empty())
            throw ConfigError("records carry no levels");
        xs.push_back(rec.g);
        ys.push_back(rec.levels.front().energy);
    }
    return locate_transition(xs, ys);
}

std::vector<std::pair<double, double>> gap_series(const std::vector<SweepRecord>& records) {
    std::vector<std::pair<double, double>> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.levels.size() < 2)
            throw ConfigError("gap series needs at least two levels");
        out.emplace_back(rec.g, rec.levels[1].energy - rec.levels[0].energy);
    }
    return out;
}

double energy_derivative_fd(const ModelParams& params, std::size_t level, double h,
                            const Primitives& prims) {
    if (!(h > 0.0) || params.g < h)
        throw ConfigError("finite-difference step must be positive and not exceed g");
    ModelParams p = params;
    p.k_levels = std::max(params.k_levels, level + 1);
    auto energy_at = [&](double g) {
        p.g = g;
        return solve_point(p, prims, false).spectrum.energies[level];
    };
    return (energy_at(params.g + h) - energy_at(params.g - h)) / (2.0 * h);
}

}  // namespace rabi
