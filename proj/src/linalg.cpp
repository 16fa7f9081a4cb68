#include "ultraheat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ultraheat/errors.hpp"

namespace ultraheat {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j) acc += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(acc);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, double tolerance, int max_sweeps) {
    if (input.rows() != input.cols()) throw ValidationError("eigensolver needs a square matrix");
    const Eigen::Index n = input.rows();
    Eigen::MatrixXd a = 0.5 * (input + input.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double scale = std::max(a.norm(), 1e-300);

    int sweep = 0;
    while (off_diagonal_norm(a) > tolerance * scale) {
        if (sweep++ >= max_sweeps) throw NumericalRefusal("Jacobi eigensolver did not converge");
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rotation annihilating a(p, q) (Golub & Van Loan, sym.schur2).
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    out.sweeps = sweep;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = a(src, src);
        Eigen::VectorXd col = v.col(src);
        Eigen::Index big = 0;
        col.cwiseAbs().maxCoeff(&big);
        if (col(big) < 0.0) col = -col;
        out.vectors.col(k) = col;
    }
    return out;
}

Eigen::MatrixXd symmetric_exp(const Eigen::MatrixXd& a, double scale) {
    const SymmetricEigen e = jacobi_eigen(a);
    const Eigen::VectorXd d = (scale * e.values).array().exp();
    return e.vectors * d.asDiagonal() * e.vectors.transpose();
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& c, int dimension, double relative_tolerance) {
    if (c.rows() == 0) return Eigen::MatrixXd::Identity(dimension, dimension);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double top = sv.size() > 0 ? sv(0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > relative_tolerance * std::max(top, 1e-300)) ++rank;
    return svd.matrixV().rightCols(dimension - rank);
}

}  // namespace ultraheat
