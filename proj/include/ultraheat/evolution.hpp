#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ultraheat/l2space.hpp"
#include "ultraheat/timegraph.hpp"

namespace ultraheat {

/// Composite Simpson rule on [s, t] with an even number of subintervals.
struct QuadratureConfig {
    int subintervals = 64;

    void validate() const;
    /// Nodes s + k (t - s) / K for k = 0..K.
    std::vector<double> nodes(double s, double t) const;
    /// Simpson weights matching nodes(s, t).
    std::vector<double> weights(double s, double t) const;
};

enum class Method { autonomous, closed_form, trotter, exact_commuting };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct EvolutionReport {
    explicit EvolutionReport(L2Function r) : result(std::move(r)) {}

    L2Function result;
    Method method = Method::closed_form;
    int steps = 0;              // Trotter factors; 0 otherwise
    int quadrature_k = 0;       // 0 when no quadrature was used
    std::optional<double> commutation_defect;
    std::vector<std::string> warnings;

    std::string tag() const;
};

/// e^{Delta L(t0)} u0: vertex part through the spectral frame of L(t0), each
/// wavelet coefficient damped by e^{-gamma_I(t0) Delta}.
L2Function autonomous_evolve(const TimeGraph& g, double t0, double duration, const L2Function& u0);

/// U(t, s) u0 with the eigenvalue integrals taken along frames tracked across the
/// Simpson nodes. Throws NumericalRefusal when any node has an eigenvalue gap
/// below 1e-9.
EvolutionReport closed_form_evolve(const TimeGraph& g, double s, double t, const L2Function& u0,
                                   const QuadratureConfig& q = {});

/// Product of n frozen-time factors e^{h L(s + k h)}, k = 1..n, rightmost (k = 1) first.
EvolutionReport trotter_evolve(const TimeGraph& g, double s, double t, int steps, const L2Function& u0);

/// exp(int_s^t L) u0 for commuting families. Throws NumericalRefusal when the
/// commutation defect over the Simpson nodes exceeds 1e-9.
EvolutionReport exact_commuting_evolve(const TimeGraph& g, double s, double t, const L2Function& u0,
                                       const QuadratureConfig& q = {});

/// Dispatches on `method`; autonomous freezes the graph at s.
EvolutionReport evolve(Method method, const TimeGraph& g, double s, double t, const L2Function& u0,
                       const QuadratureConfig& q = {}, int steps = 1);

/// || U(t,r) U(r,s) u0 - U(t,s) u0 || for the chosen method.
double evolution_defect(const TimeGraph& g, double s, double r, double t, const L2Function& u0, Method method,
                        const QuadratureConfig& q = {}, int steps = 1);

struct TrotterSweep {
    Method reference = Method::closed_form;
    std::vector<int> steps;
    std::vector<double> errors;
    /// Least-squares slope of log(error) against log(n) over errors above the
    /// noise floor; empty when fewer than two points qualify.
    std::optional<double> slope;
};

inline constexpr double kSweepNoiseFloor = 1e-13;

/// L2 error of trotter_evolve against exact_commuting_evolve (commuting families)
/// or closed_form_evolve (otherwise) for each step count.
TrotterSweep trotter_error_sweep(const TimeGraph& g, double s, double t, const L2Function& u0,
                                 const std::vector<int>& steps, const QuadratureConfig& q = {});

/// || closed_form(u0) - trotter_n(u0) ||; measured, never assumed to vanish.
double closed_vs_trotter_gap(const TimeGraph& g, double s, double t, const L2Function& u0, int steps,
                             const QuadratureConfig& q = {});

/// exp(-int_s^t gamma_I) per vertex by Simpson.
Eigen::VectorXd wavelet_decay(const TimeGraph& g, double s, double t, const QuadratureConfig& q = {});

}  // namespace ultraheat
