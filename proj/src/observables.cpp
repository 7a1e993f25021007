#include "rabi/observables.hpp"

namespace rabi {

Eigen::Vector3d pattern_energies(const Eigen::VectorXd& state, const PatternBasis& basis,
                                 const PatternOperators& ops) {
    Eigen::Vector3d out;
    for (int n = 0; n < 3; ++n)
        out(n) = basis.lambdas(n) * (ops[n].entries * state).squaredNorm();
    return out;
}

Decomposition photon_decomposition(const Eigen::VectorXd& state, const PatternBasis& basis,
                                   const PatternOperators& ops, const Primitives& prims) {
    const Eigen::VectorXd a_psi = prims.a.entries * state;
    Decomposition d;
    d.total = state.dot(prims.number.entries * state);
    for (int n = 0; n < 3; ++n)
        d.components(n) = basis.u(n, 2) * a_psi.dot(ops[n].entries * state);
    return d;
}

Decomposition sigma_x_decomposition(const Eigen::VectorXd& state, const PatternBasis& basis,
                                    const PatternOperators& ops, const Primitives& prims) {
    // <ψ|(-iσy) X|ψ> = (iσy ψ)·(X ψ) since (iσy)ᵀ = -iσy.
    const Eigen::VectorXd isy_psi = prims.i_sigma_y.entries * state;
    Decomposition d;
    d.total = state.dot(prims.sigma_x.entries * state);
    for (int n = 0; n < 3; ++n)
        d.components(n) = basis.u(n, 1) * isy_psi.dot(ops[n].entries * state);
    return d;
}

StateObservables observe_state(const Eigen::VectorXd& state, double energy,
                               const PatternBasis& basis, const PatternOperators& ops,
                               const Primitives& prims) {
    StateObservables obs;
    obs.energy = energy;
    obs.pattern_energies = pattern_energies(state, basis, ops);
    const Decomposition photons = photon_decomposition(state, basis, ops, prims);
    obs.photon_total = photons.total;
    obs.photon_by_pattern = photons.components;
    const Decomposition flips = sigma_x_decomposition(state, basis, ops, prims);
    obs.sigma_x_total = flips.total;
    obs.sigma_x_by_pattern = flips.components;
    return obs;
}

double coupling_expectation(const Eigen::VectorXd& state, const Primitives& prims) {
    const Eigen::VectorXd quad_psi = (prims.a.entries + prims.a_dag.entries) * state;
    return state.dot(prims.sigma_z.entries * quad_psi);
}

WavefunctionSlice wavefunction_slice(const Eigen::VectorXd& state, double energy,
                                     const PatternBasis& basis, const PatternOperators& ops,
                                     std::size_t level, double g) {
    const Eigen::Index up = state.size() / 2;
    WavefunctionSlice slice;
    slice.g_value = g;
    slice.level = level;
    slice.energy = energy;
    slice.amplitudes = state.head(up);
    for (int n = 0; n < 3; ++n) {
        const Eigen::VectorXd a_psi = ops[n].entries * state;
        const Eigen::VectorXd w = basis.lambdas(n) * (ops[n].entries.transpose() * a_psi);
        slice.pattern_components[static_cast<std::size_t>(n)] = w.head(up);
    }
    return slice;
}

}  // namespace rabi
