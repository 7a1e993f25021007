#pragma once

// Total and per-pattern expectation values for a normalized eigenstate.
//
// Pattern attribution goes through the exact inverse transforms a = Σ_n u_{n,3} A_n and
// σz = Σ_n u_{n,2} A_n, so every decomposition sums to its total by construction:
//   photon_n  = u_{n,3} <ψ| a† A_n |ψ>
//   sigma_x_n = u_{n,2} <ψ| (-iσy) A_n |ψ>      using (-iσy) σz = σx
//   energy_n  = λ_n ||A_n ψ||²

#include <array>
#include <cstddef>

#include <Eigen/Dense>

#include "rabi/operator_space.hpp"
#include "rabi/pattern_core.hpp"

namespace rabi {

struct Decomposition {
    double total{0.0};
    Eigen::Vector3d components{Eigen::Vector3d::Zero()};
};

struct StateObservables {
    double energy{0.0};
    Eigen::Vector3d pattern_energies{Eigen::Vector3d::Zero()};
    double photon_total{0.0};
    Eigen::Vector3d photon_by_pattern{Eigen::Vector3d::Zero()};
    double sigma_x_total{0.0};
    Eigen::Vector3d sigma_x_by_pattern{Eigen::Vector3d::Zero()};
};

struct WavefunctionSlice {
    double g_value{0.0};
    std::size_t level{0};
    Eigen::VectorXd amplitudes;                     // ψ(↑, m), m = 0..N
    std::array<Eigen::VectorXd, 3> pattern_components;  // w_n(↑, m), w_n = λ_n A_nᵀ A_n ψ
    double energy{0.0};
};

Eigen::Vector3d pattern_energies(const Eigen::VectorXd& state, const PatternBasis& basis,
                                 const PatternOperators& ops);

Decomposition photon_decomposition(const Eigen::VectorXd& state, const PatternBasis& basis,
                                   const PatternOperators& ops, const Primitives& prims);

Decomposition sigma_x_decomposition(const Eigen::VectorXd& state, const PatternBasis& basis,
                                    const PatternOperators& ops, const Primitives& prims);

StateObservables observe_state(const Eigen::VectorXd& state, double energy,
                               const PatternBasis& basis, const PatternOperators& ops,
                               const Primitives& prims);

// <ψ|(a + a†)σz|ψ>, i.e. dE/dg by Hellmann–Feynman.
double coupling_expectation(const Eigen::VectorXd& state, const Primitives& prims);

WavefunctionSlice wavefunction_slice(const Eigen::VectorXd& state, double energy,
                                     const PatternBasis& basis, const PatternOperators& ops,
                                     std::size_t level, double g);

}  // namespace rabi
