#include "rabi/operator_space.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/SparseCore>

#include "rabi/format.hpp"

namespace rabi {

BasisIndex BasisIndex::from_flat(std::size_t index, std::size_t n_max) {
    if (index >= 2 * (n_max + 1))
        throw ConfigError("basis index out of range");
    const std::size_t block = n_max + 1;
    return BasisIndex{index < block ? Spin::up : Spin::down, index % block};
}

Eigen::MatrixXd spin_photon_product(const Eigen::Matrix2d& spin, const Eigen::MatrixXd& photon) {
    const Eigen::Index p = photon.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * p, 2 * p);
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
            if (spin(s, t) != 0.0)
                out.block(s * p, t * p, p, p) = spin(s, t) * photon;
    return out;
}

Eigen::MatrixXd photon_annihilation(std::size_t n_max) {
    const auto p = static_cast<Eigen::Index>(n_max + 1);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index m = 1; m < p; ++m)
        a(m - 1, m) = std::sqrt(static_cast<double>(m));
    return a;
}

Primitives build_primitives(std::size_t n_max) {
    if (n_max < 1)
        throw ConfigError("n_max must be >= 1");
    const auto p = static_cast<Eigen::Index>(n_max + 1);
    const Eigen::MatrixXd photon_id = Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd ladder = photon_annihilation(n_max);

    // (up, down) ordering: iσy|up> = -|down>, iσy|down> = |up>.
    Eigen::Matrix2d i_sy;
    i_sy << 0.0, 1.0,
           -1.0, 0.0;
    Eigen::Matrix2d sz;
    sz << 1.0, 0.0,
          0.0, -1.0;
    Eigen::Matrix2d sx;
    sx << 0.0, 1.0,
          1.0, 0.0;

    Primitives prims;
    prims.n_max = n_max;
    prims.a = {"a", spin_photon_product(Eigen::Matrix2d::Identity(), ladder)};
    prims.a_dag = {"a_dag", prims.a.entries.transpose()};
    prims.i_sigma_y = {"i_sigma_y", spin_photon_product(i_sy, photon_id)};
    prims.sigma_z = {"sigma_z", spin_photon_product(sz, photon_id)};
    prims.sigma_x = {"sigma_x", spin_photon_product(sx, photon_id)};

    Eigen::MatrixXd count = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index m = 0; m < p; ++m)
        count(m, m) = static_cast<double>(m);
    prims.number = {"number", spin_photon_product(Eigen::Matrix2d::Identity(), count)};
    return prims;
}

OperatorMatrix build_pattern_operator(const PatternBasis& basis, int n, const Primitives& prims) {
    if (n < 1 || n > 3)
        throw ConfigError("pattern index must be 1, 2 or 3, got " + std::to_string(n));
    const auto row = basis.u.row(n - 1);
    OperatorMatrix op;
    op.label = "A" + std::to_string(n);
    op.entries = row(0) * prims.i_sigma_y.entries + row(1) * prims.sigma_z.entries +
                 row(2) * prims.a.entries;
    return op;
}

PatternOperators build_pattern_operators(const PatternBasis& basis, const Primitives& prims) {
    return {build_pattern_operator(basis, 1, prims), build_pattern_operator(basis, 2, prims),
            build_pattern_operator(basis, 3, prims)};
}

OperatorMatrix build_hamiltonian_direct(const ModelParams& params, const Primitives& prims) {
    const Eigen::MatrixXd ladder = photon_annihilation(prims.n_max);
    const Eigen::MatrixXd quadrature = ladder + ladder.transpose();
    Eigen::Matrix2d sz;
    sz << 1.0, 0.0,
          0.0, -1.0;

    OperatorMatrix h;
    h.label = "H_direct";
    h.entries = prims.number.entries + (params.delta / 2.0) * prims.sigma_x.entries +
                params.g * spin_photon_product(sz, quadrature);
    return h;
}

OperatorMatrix build_hamiltonian_patterns(const PatternBasis& basis, const PatternOperators& ops) {
    const Eigen::Index dim = ops[0].dim();
    OperatorMatrix h;
    h.label = "H_patterns";
    h.entries = Eigen::MatrixXd::Zero(dim, dim);
    // A_n has at most three nonzeros per column; form the products on a sparse view.
    for (int n = 0; n < 3; ++n) {
        const Eigen::SparseMatrix<double> a = ops[n].entries.sparseView();
        const Eigen::SparseMatrix<double> gram = a.transpose() * a;
        h.entries += basis.lambdas(n) * Eigen::MatrixXd(gram);
    }
    return h;
}

OperatorMatrix build_hamiltonian_patterns(const PatternBasis& basis, const Primitives& prims) {
    return build_hamiltonian_patterns(basis, build_pattern_operators(basis, prims));
}

void write_operator_csv(std::ostream& out, const OperatorMatrix& op) {
    out << "row,col,value\n";
    for (Eigen::Index i = 0; i < op.entries.rows(); ++i)
        for (Eigen::Index j = 0; j < op.entries.cols(); ++j)
            if (op.entries(i, j) != 0.0)
                out << i << ',' << j << ',' << format_real(op.entries(i, j)) << '\n';
}

}  // namespace rabi
