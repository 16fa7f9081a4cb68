#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ultraheat/l2space.hpp"
#include "ultraheat/timegraph.hpp"

namespace ultraheat {

/// Zuniga operator A(t): vertex values <- A(t) v; wavelets are annihilated.
L2Function apply_adjacency(const TimeGraph& g, double t, const L2Function& f);
/// Matrix operator (Laplacian matrix lifted to X_N): vertex values <- L(t) v; wavelets <- 0.
L2Function apply_matrix_laplacian(const TimeGraph& g, double t, const L2Function& f);
/// Zuniga Laplacian A(t) - Gamma(t): vertex values <- L(t) v; wavelet c <- -gamma_I(t) c.
L2Function apply_laplacian(const TimeGraph& g, double t, const L2Function& f);
L2Function apply_laplacian(const Snapshot& snap, const L2Function& f);

struct MismatchWitness {
    double matrix_operator = 0.0;  // (matrix Laplacian f)(x0)
    double zuniga_laplacian = 0.0;  // (Zuniga Laplacian f)(x0)
};

/// Evaluates both Laplacians on the indicator of B_{p^-r}(center) at x0.
/// Requires the ball to lie in B_{p^-N}(vertex); for a proper sub-ball x0 must lie
/// in the vertex ball but outside the sub-ball.
MismatchWitness mismatch_witness(const TimeGraph& g, double t, int vertex, int r, const PAdic& center,
                                 const PAdic& x0);

/// Eigenpairs of L(t) with columns matched to a reference frame when one is given.
struct SpectralFrame {
    double t = 0.0;
    Eigen::VectorXd eigenvalues;  // ascending unless reordered to follow a reference
    Eigen::MatrixXd modal;        // orthogonal; column k is the eigenvector for eigenvalue k
    std::vector<int> permutation;  // column k came from sorted eigenpair permutation[k]
    std::vector<bool> flipped;     // column k had its sign flipped during matching
    bool tracked = false;
    double min_gap = 0.0;          // smallest gap between sorted eigenvalues
    std::vector<std::string> warnings;

    bool degenerate(double gap_tolerance = 1e-9) const { return min_gap < gap_tolerance; }
};

SpectralFrame spectral_frame(const Eigen::MatrixXd& laplacian, double t, const SpectralFrame* reference = nullptr);
SpectralFrame spectral_frame(const TimeGraph& g, double t, const SpectralFrame* reference = nullptr);

}  // namespace ultraheat
