#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ultraheat/evolution.hpp"
#include "ultraheat/padic.hpp"
#include "ultraheat/rng.hpp"
#include "ultraheat/timegraph.hpp"

namespace ultraheat {

/// One realisation of the jump process on [s, t].
struct PathSample {
    PAdic start;
    std::vector<double> jump_times;  // strictly increasing, in (s, t]
    std::vector<PAdic> states;       // position after each jump

    const PAdic& position() const { return states.empty() ? start : states.back(); }
    /// Position at time tau (right-continuous).
    const PAdic& position_at(double tau) const;
};

/// 1.05 times the largest degree seen on a 256-point grid of [s, t].
double dominating_rate(const TimeGraph& g, double s, double t);

/// Thinning simulation: candidates at rate `rate_bound`, accepted with probability
/// gamma_I(tau) / rate_bound, target J drawn with probability A_IJ / gamma_I and the
/// landing point uniform in B_J resolved to `precision` digits. Throws
/// NumericalRefusal if a degree exceeds the bound.
PathSample simulate_path(const TimeGraph& g, double s, double t, const PAdic& x0, RngStream& rng,
                         double rate_bound, int precision);
PathSample simulate_path(const TimeGraph& g, double s, double t, const PAdic& x0, RngStream& rng);

/// exp(-int_s^t gamma_I) by Simpson.
double survival_probability(const TimeGraph& g, double s, double t, int vertex, const QuadratureConfig& q = {});

/// (U(t, s) Omega_J)(x) for every J. Uses the closed form and falls back to the
/// commuting solver when the spectrum is degenerate on a commuting family.
Eigen::VectorXd heat_kernel_ball_probs(const TimeGraph& g, double s, const PAdic& x, double t,
                                       const QuadratureConfig& q = {});

struct KernelEstimate {
    Eigen::VectorXd probabilities;
    Eigen::VectorXd standard_errors;
    double survival_atom = 0.0;
    double survival_standard_error = 0.0;
    std::size_t paths = 0;
};

struct MarkovValidation {
    KernelEstimate empirical;
    Eigen::VectorXd analytic;
    double tv_distance = 0.0;

    double survival_expected = 0.0;
    double survival_sigma = 0.0;  // binomial sd under the expected value
    bool survival_within_3sigma = false;

    double restart_time = 0.0;
    Eigen::VectorXd restarted;    // occupancy of paths restarted at restart_time
    double ck_tv_distance = 0.0;  // restarted vs direct
    double ck_tolerance = 0.0;
    bool ck_consistent = false;
};

/// Occupancy at t of `paths` paths started at x0, stream (seed, i, tag).
KernelEstimate estimate_kernel(const TimeGraph& g, double s, double t, const PAdic& x0, std::size_t paths,
                               std::uint64_t seed, std::uint64_t tag = 0);

MarkovValidation validate_markov(const TimeGraph& g, double s, double t, const PAdic& x0, std::size_t paths,
                                 std::uint64_t seed, const QuadratureConfig& q = {});

}  // namespace ultraheat
