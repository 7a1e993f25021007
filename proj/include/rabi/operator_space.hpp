#pragma once

// Dense operator matrices on the truncated product basis |σz, m>, m = 0..N.
//
// Basis ordering is spin-major: the up block (σz = +1) occupies flat indices 0..N and
// the down block N+1..2N+1. All operators are real; iσy replaces σy as the primitive.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "rabi/model.hpp"
#include "rabi/pattern_core.hpp"

namespace rabi {

enum class Spin { up = 0, down = 1 };

struct BasisIndex {
    Spin spin{Spin::up};
    std::size_t photon{0};

    std::size_t flat(std::size_t n_max) const {
        return static_cast<std::size_t>(spin) * (n_max + 1) + photon;
    }
    static BasisIndex from_flat(std::size_t index, std::size_t n_max);
};

struct OperatorMatrix {
    std::string label;
    Eigen::MatrixXd entries;

    Eigen::Index dim() const { return entries.rows(); }
};

struct Primitives {
    std::size_t n_max{0};
    OperatorMatrix a;
    OperatorMatrix a_dag;
    OperatorMatrix i_sigma_y;
    OperatorMatrix sigma_z;
    OperatorMatrix sigma_x;
    OperatorMatrix number;

    Eigen::Index dim() const { return a.dim(); }
};

using PatternOperators = std::array<OperatorMatrix, 3>;

// Kronecker product spin ⊗ photon in the spin-major ordering.
Eigen::MatrixXd spin_photon_product(const Eigen::Matrix2d& spin, const Eigen::MatrixXd& photon);

// Photon-space ladder operator a on m = 0..n_max.
Eigen::MatrixXd photon_annihilation(std::size_t n_max);

Primitives build_primitives(std::size_t n_max);

// A_n = u_{n,1} iσy + u_{n,2} σz + u_{n,3} a, with n in 1..3.
OperatorMatrix build_pattern_operator(const PatternBasis& basis, int n, const Primitives& prims);
PatternOperators build_pattern_operators(const PatternBasis& basis, const Primitives& prims);

// a†a + (Δ/2)σx + g(a+a†)σz assembled from the tensor factors.
OperatorMatrix build_hamiltonian_direct(const ModelParams& params, const Primitives& prims);

// Σ_n λ_n A_nᵀ A_n.
OperatorMatrix build_hamiltonian_patterns(const PatternBasis& basis, const PatternOperators& ops);
OperatorMatrix build_hamiltonian_patterns(const PatternBasis& basis, const Primitives& prims);

// Debug dump: "row,col,value" for every nonzero entry in row-major order.
void write_operator_csv(std::ostream& out, const OperatorMatrix& op);

}  // namespace rabi
