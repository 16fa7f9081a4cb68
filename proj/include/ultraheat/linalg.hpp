#pragma once

#include <Eigen/Dense>

namespace ultraheat {

struct SymmetricEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // orthonormal columns, matching `values`
    int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `tolerance` times the Frobenius norm of the input. Each eigenvector is signed
/// so that its largest-magnitude component is positive.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, double tolerance = 1e-12, int max_sweeps = 100);

/// V diag(f(lambda)) V^T for a symmetric matrix, with f = exp(scale * lambda).
Eigen::MatrixXd symmetric_exp(const Eigen::MatrixXd& a, double scale = 1.0);

/// Orthonormal basis (columns) of the null space of `c`; singular values below
/// `relative_tolerance` times the largest count as zero.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& c, int dimension, double relative_tolerance = 1e-10);

/// Composite Simpson rule with an even number of subintervals.
template <typename F>
double simpson(F&& f, double a, double b, int subintervals) {
    const double h = (b - a) / subintervals;
    double acc = f(a) + f(b);
    for (int i = 1; i < subintervals; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

}  // namespace ultraheat
