#include "rabi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rabi {

namespace {

constexpr double kSignTieTolerance = 1e-10;

struct Pairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

Pairs dense_solve(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "symmetric eigensolver did not converge (dim " << h.rows() << ")";
        throw NumericalError(msg.str());
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double max_residual(const Eigen::MatrixXd& h, const EigenSolution& sol) {
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const auto psi = sol.states.col(static_cast<Eigen::Index>(i));
        worst = std::max(worst, (h * psi - sol.energies[i] * psi).norm());
    }
    return worst;
}

void check_residual(const EigenSolution& sol) {
    const double bound = kResidualTolerance * std::max(1.0, std::abs(sol.energies.front()));
    if (!(sol.residual_norm < bound)) {
        std::ostringstream msg;
        msg << "eigenpair residual " << sol.residual_norm << " exceeds " << bound;
        throw NumericalError(msg.str());
    }
}

ParityBlock make_block(const Eigen::MatrixXd& h, std::size_t n_max, int parity) {
    const auto p = static_cast<Eigen::Index>(n_max + 1);
    const double r = 1.0 / std::sqrt(2.0);
    ParityBlock block;
    block.parity = parity;
    block.embedding = Eigen::MatrixXd::Zero(2 * p, p);
    for (Eigen::Index m = 0; m < p; ++m) {
        const double alternating = (m % 2 == 0) ? 1.0 : -1.0;
        block.embedding(m, m) = r;
        block.embedding(p + m, m) = parity * alternating * r;
    }
    block.hamiltonian = block.embedding.transpose() * h * block.embedding;
    return block;
}

}  // namespace

void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
    if (v.size() == 0)
        return;
    const double largest = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= largest - kSignTieTolerance) {
            if (v(i) < 0.0)
                v *= -1.0;
            return;
        }
    }
}

EigenSolution eigensolve(const OperatorMatrix& h, std::size_t k) {
    if (h.entries.rows() != h.entries.cols())
        throw ConfigError("eigensolve needs a square matrix");
    if (k < 1 || k > static_cast<std::size_t>(h.dim()))
        throw ConfigError("requested level count outside [1, dim]");

    const Pairs pairs = dense_solve(h.entries);
    EigenSolution sol;
    const auto kk = static_cast<Eigen::Index>(k);
    sol.energies.assign(pairs.values.data(), pairs.values.data() + kk);
    sol.states = pairs.vectors.leftCols(kk);
    for (Eigen::Index i = 0; i < kk; ++i)
        canonicalize_sign(sol.states.col(i));
    sol.residual_norm = max_residual(h.entries, sol);
    check_residual(sol);
    return sol;
}

ParityBlocks parity_blocks(const OperatorMatrix& h, std::size_t n_max) {
    if (h.dim() != static_cast<Eigen::Index>(2 * (n_max + 1)))
        throw ConfigError("operator dimension does not match the truncation");
    return {make_block(h.entries, n_max, +1), make_block(h.entries, n_max, -1)};
}

ParityBlocks parity_blocks(const ModelParams& params, const Primitives& prims) {
    return parity_blocks(build_hamiltonian_direct(params, prims), prims.n_max);
}

EigenSolution eigensolve_parity(const ParityBlocks& blocks, std::size_t k) {
    const Eigen::Index half = blocks.even.hamiltonian.rows();
    if (k < 1 || k > static_cast<std::size_t>(2 * half))
        throw ConfigError("requested level count outside [1, dim]");

    const Pairs even = dense_solve(blocks.even.hamiltonian);
    const Pairs odd = dense_solve(blocks.odd.hamiltonian);

    // Merge by energy; on exact ties the even block comes first.
    struct Entry {
        double energy;
        bool is_even;
        Eigen::Index column;
    };
    std::vector<Entry> merged;
    merged.reserve(static_cast<std::size_t>(2 * half));
    for (Eigen::Index i = 0; i < half; ++i) {
        merged.push_back({even.values(i), true, i});
        merged.push_back({odd.values(i), false, i});
    }
    std::stable_sort(merged.begin(), merged.end(),
                     [](const Entry& x, const Entry& y) { return x.energy < y.energy; });

    EigenSolution sol;
    const auto kk = static_cast<Eigen::Index>(k);
    sol.states.resize(2 * half, kk);
    for (Eigen::Index i = 0; i < kk; ++i) {
        const Entry& e = merged[static_cast<std::size_t>(i)];
        const ParityBlock& block = e.is_even ? blocks.even : blocks.odd;
        const Pairs& pairs = e.is_even ? even : odd;
        sol.energies.push_back(e.energy);
        sol.states.col(i) = block.embedding * pairs.vectors.col(e.column);
        canonicalize_sign(sol.states.col(i));
    }

    // Residual against the full matrix reassembled from the blocks.
    const Eigen::MatrixXd full =
        blocks.even.embedding * blocks.even.hamiltonian * blocks.even.embedding.transpose() +
        blocks.odd.embedding * blocks.odd.hamiltonian * blocks.odd.embedding.transpose();
    sol.residual_norm = max_residual(full, sol);
    check_residual(sol);
    return sol;
}

}  // namespace rabi
