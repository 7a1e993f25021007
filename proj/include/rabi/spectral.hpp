#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rabi/model.hpp"
#include "rabi/operator_space.hpp"

namespace rabi {

struct EigenSolution {
    std::vector<double> energies;  // ascending
    Eigen::MatrixXd states;        // column i is the state of energies[i]
    double residual_norm{0.0};     // max_i ||H ψ_i - E_i ψ_i||

    std::size_t size() const { return energies.size(); }
};

inline constexpr double kResidualTolerance = 1e-9;  // relative to max(1, |E_0|)

// Flips v so that its largest-magnitude entry (first one on ties) is positive.
void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v);

// Lowest k eigenpairs of a dense real symmetric matrix (Householder tridiagonalization
// followed by implicit symmetric QR). Throws NumericalError on non-convergence or when
// the residual exceeds kResidualTolerance·max(1, |E_0|).
EigenSolution eigensolve(const OperatorMatrix& h, std::size_t k);

// Parity Π = σx (-1)^{a†a}. Block p is spanned by (|↑,m> + p(-1)^m |↓,m>)/√2.
struct ParityBlock {
    int parity{1};
    Eigen::MatrixXd hamiltonian;  // (N+1) x (N+1)
    Eigen::MatrixXd embedding;    // 2(N+1) x (N+1), columns are the block basis vectors
};

struct ParityBlocks {
    ParityBlock even;
    ParityBlock odd;
};

ParityBlocks parity_blocks(const OperatorMatrix& h, std::size_t n_max);
ParityBlocks parity_blocks(const ModelParams& params, const Primitives& prims);

// Solves both blocks, merges the lowest k by energy and lifts the states to the full basis.
EigenSolution eigensolve_parity(const ParityBlocks& blocks, std::size_t k);

}  // namespace rabi
