#pragma once

// Operator-space coupling matrix and its three eigen-patterns.
//
// The Rabi Hamiltonian is a quadratic form over the operator vector
// (iσy, σz, a) with a real symmetric 3x3 coupling matrix
//
//        | 0    Δ/4  0 |
//    M = | Δ/4  0    g |
//        | 0    g    1 |
//
// Diagonalizing M gives H = Σ_n λ_n A_n† A_n with A_n = u_{n,1} iσy + u_{n,2} σz + u_{n,3} a.
// Patterns keep a fixed identity along a coupling sweep: pattern 2 is the one that is
// purely photonic at g = 0, patterns 1 and 3 are the (1,-1,0)/√2 and (1,1,0)/√2 spin rows.

#include <Eigen/Dense>

#include "rabi/model.hpp"

namespace rabi {

// Rows/columns ordered (iσy, σz, a).
struct CouplingMatrix {
    Eigen::Matrix3d entries;
    double g_value{0.0};
};

struct PatternBasis {
    Eigen::Vector3d lambdas;  // λ_1, λ_2, λ_3 by pattern label, not by size
    Eigen::Matrix3d u;        // row n-1 holds u_n
    double g_value{0.0};
    bool degenerate{false};   // two λ within 1e-10
};

struct PatternDerivatives {
    Eigen::Vector3d dlambda;   // dλ_n/dg
    Eigen::Vector3d d2lambda;  // d²λ_n/dg²
    Eigen::Matrix3d du;        // row n-1 holds du_n/dg
};

inline constexpr double kPatternDegeneracyFlag = 1e-10;
inline constexpr double kPatternDerivativeGap = 1e-8;

double critical_coupling(double delta);

CouplingMatrix coupling_matrix(const ModelParams& params, double g);

// dM/dg: ones at (σz, a) and (a, σz).
Eigen::Matrix3d coupling_matrix_derivative();

// Cyclic Jacobi eigensolver for a real symmetric 3x3 matrix. Eigenvalues ascending,
// eigenvectors as rows. Exposed for the tests; diagonalize_pattern applies the labels.
struct SymmetricEigen3 {
    Eigen::Vector3d values;
    Eigen::Matrix3d rows;
};
SymmetricEigen3 jacobi_eigen3(const Eigen::Matrix3d& m);

// Full decomposition with pattern labels and the first-point sign convention applied.
PatternBasis diagonalize_pattern(const CouplingMatrix& m);

// Largest-magnitude component of each row made positive (first index wins ties).
PatternBasis canonical_signs(PatternBasis basis);

// Relabels cur by maximal row overlap with prev, then flips rows that point away from
// their predecessor. Throws NumericalError when the grid is too coarse to match rows.
PatternBasis align_signs(const PatternBasis& prev, const PatternBasis& cur);

// First/second-order perturbation formulas in g. Throws DegenerateSpectrumError when
// two eigenvalues are closer than kPatternDerivativeGap.
PatternDerivatives pattern_derivatives(const CouplingMatrix& m, const PatternBasis& basis);

}  // namespace rabi
