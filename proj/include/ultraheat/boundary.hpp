#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ultraheat/l2space.hpp"
#include "ultraheat/timegraph.hpp"

namespace ultraheat {

enum class MeasureNormalization { unit_ball, haar };
enum class EdgeSet { boundary_only, omega_star };

std::string to_string(MeasureNormalization m);
std::string to_string(EdgeSet e);
MeasureNormalization parse_normalization(const std::string& name);
EdgeSet parse_edge_set(const std::string& name);

struct QuotientConfig {
    MeasureNormalization normalization = MeasureNormalization::unit_ball;
    EdgeSet edge_set = EdgeSet::boundary_only;
};

/// Compact open S in K_N as disjoint sub-balls of vertex balls.
class Region {
public:
    Region(const Embedding& embedding, std::vector<Ball> balls);

    const std::vector<Ball>& balls() const noexcept { return balls_; }
    /// Vertices whose ball meets S, ascending.
    const std::vector<int>& vertices() const noexcept { return vertices_; }
    /// Largest radius exponent among the balls (the coarsest resolution that resolves S).
    int finest_scale() const noexcept { return finest_; }
    /// Cell membership at resolution R (R >= finest_scale()).
    std::vector<bool> cell_mask(const Layout& layout) const;

    /// Union of the whole vertex balls of `vertices`.
    static Region whole_balls(const Embedding& embedding, const std::vector<int>& vertices);

private:
    std::vector<Ball> balls_;
    std::vector<int> vertices_;
    int finest_ = 0;
};

/// Parses "vertex[:digit]..." items; digits extend the vertex center at positions N, N+1, ...
Region parse_region(const Embedding& embedding, const std::vector<std::string>& items);

struct BoundaryData {
    double t = 0.0;
    int resolution = 0;
    std::vector<bool> in_region;                      // per cell
    std::vector<std::int64_t> vertex_boundary;        // cells of delta_N S
    std::vector<std::pair<int, int>> edge_boundary;   // vertex pairs (I, J): I meets S, B_J leaves S, A_IJ != 0
    std::vector<std::pair<int, int>> omega_star;      // internal pairs plus edge_boundary

    bool boundary_empty() const noexcept { return vertex_boundary.empty(); }
};

BoundaryData boundary_data(const TimeGraph& g, const Region& s, double t, int resolution);
BoundaryData boundary_data(const TimeGraph& g, const Region& s, double t);

/// min over I in V(S) of deg_{boundary of V(S)}(I) / int_S gamma; +inf when the
/// denominator vanishes.
double gamma_hat(const TimeGraph& g, const Region& s, double t,
                 MeasureNormalization normalization = MeasureNormalization::unit_ball);

/// Smallest eigenvalue of the normalized Laplacian submatrix on V(S).
double graph_dirichlet_eigenvalue(const TimeGraph& g, const Region& s, double t);
/// Both eigenvalues of that submatrix, ascending.
Eigen::VectorXd graph_dirichlet_spectrum(const TimeGraph& g, const Region& s, double t);

struct RayleighValue {
    double value = 0.0;
    bool zero_denominator = false;  // value is +inf
};

/// Quotient of f by exact cell summation at resolution max(R_f, finest scale of S).
RayleighValue rayleigh_quotient(const TimeGraph& g, const Region& s, double t, const L2Function& f,
                                const QuotientConfig& config = {});

/// Minimum of the quotient over cell functions at resolution R vanishing on delta_N S.
double dirichlet_eigenvalue(const TimeGraph& g, const Region& s, double t, int resolution,
                            const QuotientConfig& config = {});

/// Minimum of the quotient over cell functions on S and delta_N S with
/// int_S f gamma = 0 and zero flux at every cell of delta_N S; +inf when every
/// admissible f has zero denominator.
double vonneumann_eigenvalue(const TimeGraph& g, const Region& s, double t, int resolution,
                             const QuotientConfig& config = {});

/// The von Neumann quotient at resolution N on the whole balls of V(S).
double graph_vonneumann_eigenvalue(const TimeGraph& g, const Region& s, double t, const QuotientConfig& config = {});

struct BoundReport {
    double t = 0.0;
    int resolution = 0;
    QuotientConfig config;
    double dirichlet = 0.0;
    double vonneumann = 0.0;
    std::optional<double> graph_dirichlet;  // empty when V(S) = V or a degree vanishes
    double graph_vonneumann = 0.0;
    double gamma_hat = 0.0;

    std::optional<bool> dirichlet_le_graph;           // lambda_D <= lambda_G^D
    bool dirichlet_le_gamma_hat = false;              // lambda_D <= gamma_hat
    std::optional<bool> graph_min_le_one;             // min(lambda_G^D, gamma_hat) <= 1
    std::optional<bool> gamma_hat_lt_graph_dirichlet; // gamma_hat < lambda_G^D
    bool vonneumann_le_graph = false;                 // lambda_N <= lambda_G^N
    bool vonneumann_le_gamma_hat = false;             // lambda_N <= gamma_hat
    bool vonneumann_lt_graph = false;                 // lambda_N < lambda_G^N
};

inline constexpr double kBoundTolerance = 1e-9;

BoundReport bound_report(const TimeGraph& g, const Region& s, double t, int resolution,
                         const QuotientConfig& config = {});

}  // namespace ultraheat
