#include "rabi/pattern_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rabi {

namespace {

constexpr int kJacobiMaxSweeps = 64;
constexpr double kSignTieTolerance = 1e-12;
constexpr double kMinRowOverlap = 0.5;

void rotate(Eigen::Matrix3d& a, int i, int j, int k, int l, double s, double tau) {
    const double g = a(i, j);
    const double h = a(k, l);
    a(i, j) = g - s * (h + g * tau);
    a(k, l) = h + s * (g - h * tau);
}

double min_gap(const Eigen::Vector3d& v) {
    return std::min({std::abs(v(0) - v(1)), std::abs(v(0) - v(2)), std::abs(v(1) - v(2))});
}

}  // namespace

double critical_coupling(double delta) {
    return std::sqrt(1.0 + std::sqrt(1.0 + delta * delta / 16.0));
}

CouplingMatrix coupling_matrix(const ModelParams& params, double g) {
    if (!(g >= 0.0))
        throw ConfigError("coupling g must be >= 0");
    const double q = params.delta / 4.0;
    CouplingMatrix m;
    m.entries << 0.0, q, 0.0,
                 q, 0.0, g,
                 0.0, g, 1.0;
    m.g_value = g;
    return m;
}

Eigen::Matrix3d coupling_matrix_derivative() {
    Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
    d(1, 2) = 1.0;
    d(2, 1) = 1.0;
    return d;
}

// Classic cyclic Jacobi with threshold skipping of negligible off-diagonals.
SymmetricEigen3 jacobi_eigen3(const Eigen::Matrix3d& m) {
    Eigen::Matrix3d a = 0.5 * (m + m.transpose());
    Eigen::Matrix3d v = Eigen::Matrix3d::Identity();
    Eigen::Vector3d d = a.diagonal();
    Eigen::Vector3d b = d;
    Eigen::Vector3d z = Eigen::Vector3d::Zero();

    int sweep = 0;
    for (; sweep < kJacobiMaxSweeps; ++sweep) {
        const double off = std::abs(a(0, 1)) + std::abs(a(0, 2)) + std::abs(a(1, 2));
        if (off == 0.0)
            break;
        const double thresh = sweep < 3 ? 0.2 * off / 9.0 : 0.0;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const double g = 100.0 * std::abs(a(p, q));
                if (sweep > 3 && std::abs(d(p)) + g == std::abs(d(p)) &&
                    std::abs(d(q)) + g == std::abs(d(q))) {
                    a(p, q) = 0.0;
                    continue;
                }
                if (std::abs(a(p, q)) <= thresh)
                    continue;
                const double h = d(q) - d(p);
                double t;
                if (std::abs(h) + g == std::abs(h)) {
                    t = a(p, q) / h;
                } else {
                    const double theta = 0.5 * h / a(p, q);
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0)
                        t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double hh = t * a(p, q);
                z(p) -= hh;
                z(q) += hh;
                d(p) -= hh;
                d(q) += hh;
                a(p, q) = 0.0;
                for (int j = 0; j < p; ++j)
                    rotate(a, j, p, j, q, s, tau);
                for (int j = p + 1; j < q; ++j)
                    rotate(a, p, j, j, q, s, tau);
                for (int j = q + 1; j < 3; ++j)
                    rotate(a, p, j, q, j, s, tau);
                for (int j = 0; j < 3; ++j)
                    rotate(v, j, p, j, q, s, tau);
            }
        }
        b += z;
        d = b;
        z.setZero();
    }
    if (sweep == kJacobiMaxSweeps)
        throw NumericalError("3x3 Jacobi iteration did not converge");

    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int x, int y) { return d(x) < d(y); });
    SymmetricEigen3 out;
    for (int i = 0; i < 3; ++i) {
        out.values(i) = d(order[i]);
        out.rows.row(i) = v.col(order[i]).transpose();
    }
    return out;
}

PatternBasis canonical_signs(PatternBasis basis) {
    for (int n = 0; n < 3; ++n) {
        const double largest = basis.u.row(n).cwiseAbs().maxCoeff();
        for (int k = 0; k < 3; ++k) {
            if (std::abs(basis.u(n, k)) >= largest - kSignTieTolerance) {
                if (basis.u(n, k) < 0.0)
                    basis.u.row(n) *= -1.0;
                break;
            }
        }
    }
    return basis;
}

PatternBasis diagonalize_pattern(const CouplingMatrix& m) {
    PatternBasis basis;
    basis.g_value = m.g_value;
    const double q = m.entries(0, 1);

    if (m.g_value == 0.0) {
        // Block-diagonal: exact rows, also valid when Δ = 0 or Δ = 4 make them degenerate.
        const double r = 1.0 / std::sqrt(2.0);
        basis.lambdas << -q, m.entries(2, 2), q;
        basis.u << r, -r, 0.0,
                   0.0, 0.0, 1.0,
                   r, r, 0.0;
    } else {
        const SymmetricEigen3 eig = jacobi_eigen3(m.entries);
        // For g > 0 the tridiagonal M has simple eigenvalues, so the labels fixed at
        // g -> 0+ keep their ascending positions. Below Δ = 4 the photon row (λ = 1)
        // starts above +Δ/4 and is the largest eigenvalue.
        const std::array<int, 3> position = q >= 1.0 ? std::array<int, 3>{0, 1, 2}
                                                      : std::array<int, 3>{0, 2, 1};
        for (int n = 0; n < 3; ++n) {
            basis.lambdas(n) = eig.values(position[n]);
            basis.u.row(n) = eig.rows.row(position[n]);
        }
    }
    basis.degenerate = min_gap(basis.lambdas) < kPatternDegeneracyFlag;
    return canonical_signs(basis);
}

PatternBasis align_signs(const PatternBasis& prev, const PatternBasis& cur) {
    const Eigen::Matrix3d overlap = prev.u * cur.u.transpose();
    std::array<int, 3> match{};
    std::array<bool, 3> taken{};
    for (int n = 0; n < 3; ++n) {
        int best = 0;
        overlap.row(n).cwiseAbs().maxCoeff(&best);
        if (std::abs(overlap(n, best)) < kMinRowOverlap || taken[best]) {
            std::ostringstream msg;
            msg << "pattern rows cannot be matched between g=" << prev.g_value << " and g="
                << cur.g_value << " (max |overlap| " << std::abs(overlap(n, best))
                << "); refine the coupling grid";
            throw NumericalError(msg.str());
        }
        taken[best] = true;
        match[n] = best;
    }

    PatternBasis out = cur;
    for (int n = 0; n < 3; ++n) {
        const int j = match[n];
        out.lambdas(n) = cur.lambdas(j);
        out.u.row(n) = cur.u.row(j);
        if (overlap(n, j) < 0.0)
            out.u.row(n) *= -1.0;
    }
    return out;
}

PatternDerivatives pattern_derivatives(const CouplingMatrix& m, const PatternBasis& basis) {
    if (min_gap(basis.lambdas) <= kPatternDerivativeGap) {
        std::ostringstream msg;
        msg << "pattern eigenvalues near-degenerate at g=" << m.g_value
            << "; derivatives undefined";
        throw DegenerateSpectrumError(msg.str());
    }
    const Eigen::Matrix3d dm = coupling_matrix_derivative();
    // coupling(m, n) = u_m · M' u_n
    const Eigen::Matrix3d coupling = basis.u * dm * basis.u.transpose();

    PatternDerivatives out;
    out.du.setZero();
    for (int n = 0; n < 3; ++n) {
        out.dlambda(n) = coupling(n, n);
        double second = 0.0;
        for (int k = 0; k < 3; ++k) {
            if (k == n)
                continue;
            const double gap = basis.lambdas(n) - basis.lambdas(k);
            out.du.row(n) += (coupling(k, n) / gap) * basis.u.row(k);
            second += coupling(k, n) * coupling(k, n) / gap;
        }
        out.d2lambda(n) = 2.0 * second;
    }
    return out;
}

}  // namespace rabi
