#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ultraheat/expr.hpp"
#include "ultraheat/padic.hpp"

namespace ultraheat {

struct WeightSpec {
    int i = 0;
    int j = 0;
    Expr weight;
};

/// Evaluated graph at one instant: adjacency, degrees, Laplacian A - diag(gamma).
struct Snapshot {
    double t = 0.0;
    Eigen::MatrixXd adjacency;
    Eigen::VectorXd degree;
    Eigen::MatrixXd laplacian;
};

/// Graph on a fixed vertex set whose symmetric edge weights are expressions in t.
/// Unlisted pairs have weight 0; the diagonal is always 0.
class TimeGraph {
public:
    TimeGraph(Embedding embedding, std::vector<WeightSpec> weights);

    const Embedding& embedding() const noexcept { return embedding_; }
    int vertices() const noexcept { return embedding_.vertices; }
    int prime() const noexcept { return embedding_.prime; }
    int level() const noexcept { return embedding_.level; }
    const std::vector<WeightSpec>& weights() const noexcept { return weights_; }

    /// Throws ValidationError if a weight is negative or non-finite anywhere on a
    /// 256-point grid of [s, t] (endpoints included).
    void validate_window(double s, double t, int grid_points = 256) const;

    Snapshot snapshot(double t) const;

    /// gamma_I(t) without assembling the full snapshot.
    double degree(int vertex, double t) const;
    /// A_IJ(t) for every J, in vertex order.
    void row(int vertex, double t, std::span<double> out) const;

    /// A(x, y, t) = p^N A_IJ(t) for x in B_I and y in B_J, 0 outside K_N.
    double kernel_value(const PAdic& x, const PAdic& y, double t) const;

    /// Max over grid pairs of ||L(t_i) L(t_j) - L(t_j) L(t_i)||_F.
    double commutation_defect(std::span<const double> grid) const;

    /// sum_{I,J} |A_IJ(t) - A_IJ(s)| over ordered pairs.
    double continuity_modulus(double s, double t) const;

private:
    double weight_at(const WeightSpec& w, double t) const;

    Embedding embedding_;
    std::vector<WeightSpec> weights_;
    std::vector<std::vector<std::pair<int, std::size_t>>> incident_;  // vertex -> (neighbour, weight index)
};

}  // namespace ultraheat
