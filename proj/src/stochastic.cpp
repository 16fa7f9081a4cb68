#include "ultraheat/stochastic.hpp"

#include <algorithm>
#include <cmath>

#include "ultraheat/errors.hpp"
#include "ultraheat/l2space.hpp"
#include "ultraheat/linalg.hpp"
#include "ultraheat/parallel.hpp"

namespace ultraheat {

namespace {

constexpr int kRateGrid = 256;
constexpr double kRateMargin = 1.05;
constexpr std::size_t kMinPaths = 1000;

int vertex_of(const TimeGraph& g, const PAdic& x) {
    const auto v = g.embedding().vertex_of(x);
    if (!v) throw ValidationError("starting point lies outside K_N");
    return *v;
}

}  // namespace

const PAdic& PathSample::position_at(double tau) const {
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), tau);
    const auto k = it - jump_times.begin();
    return k == 0 ? start : states[static_cast<std::size_t>(k - 1)];
}

double dominating_rate(const TimeGraph& g, double s, double t) {
    double best = 0.0;
    for (int k = 0; k <= kRateGrid; ++k) {
        const double tau = k == kRateGrid ? t : s + (t - s) * k / kRateGrid;
        best = std::max(best, g.snapshot(tau).degree.maxCoeff());
    }
    return kRateMargin * best;
}

PathSample simulate_path(const TimeGraph& g, double s, double t, const PAdic& x0, RngStream& rng,
                         double rate_bound, int precision) {
    if (!(t >= s)) throw ValidationError("simulation window must satisfy s <= t");
    PathSample path{x0, {}, {}};
    int current = vertex_of(g, x0);
    if (!(rate_bound > 0.0)) return path;

    std::vector<double> row(static_cast<std::size_t>(g.vertices()));
    double tau = s;
    for (;;) {
        tau += rng.exponential(rate_bound);
        if (tau > t) break;
        const double gamma = g.degree(current, tau);
        if (gamma > rate_bound) {
            throw NumericalRefusal("degree " + std::to_string(gamma) + " exceeds the dominating rate at t=" +
                                   std::to_string(tau));
        }
        if (rng.uniform() * rate_bound >= gamma) continue;
        g.row(current, tau, row);
        double target = rng.uniform() * gamma;
        int next = -1;
        for (int j = 0; j < g.vertices(); ++j) {
            if (row[static_cast<std::size_t>(j)] <= 0.0) continue;
            next = j;
            target -= row[static_cast<std::size_t>(j)];
            if (target < 0.0) break;
        }
        current = next;
        path.jump_times.push_back(tau);
        path.states.push_back(sample_uniform(g.embedding().ball(current), precision, rng));
    }
    return path;
}

PathSample simulate_path(const TimeGraph& g, double s, double t, const PAdic& x0, RngStream& rng) {
    return simulate_path(g, s, t, x0, rng, dominating_rate(g, s, t), g.embedding().precision);
}

double survival_probability(const TimeGraph& g, double s, double t, int vertex, const QuadratureConfig& q) {
    if (!(t >= s)) throw ValidationError("survival probability needs s <= t");
    if (vertex < 0 || vertex >= g.vertices()) throw ValidationError("vertex out of range");
    if (t == s) return 1.0;
    return wavelet_decay(g, s, t, q)(vertex);
}

Eigen::VectorXd heat_kernel_ball_probs(const TimeGraph& g, double s, const PAdic& x, double t,
                                       const QuadratureConfig& q) {
    const int from = vertex_of(g, x);
    const Layout layout = Layout::make(g.embedding(), g.level());
    Eigen::VectorXd out(g.vertices());
    for (int j = 0; j < g.vertices(); ++j) {
        const L2Function u0 = L2Function::indicator(layout, j);
        L2Function u = u0;
        try {
            u = closed_form_evolve(g, s, t, u0, q).result;
        } catch (const NumericalRefusal&) {
            u = exact_commuting_evolve(g, s, t, u0, q).result;
        }
        out(j) = u.vertex_values()(from).real();
    }
    return out;
}

KernelEstimate estimate_kernel(const TimeGraph& g, double s, double t, const PAdic& x0, std::size_t paths,
                               std::uint64_t seed, std::uint64_t tag) {
    if (paths == 0) throw ValidationError("need at least one path");
    vertex_of(g, x0);
    const double bound = dominating_rate(g, s, t);
    const int precision = g.embedding().precision;
    std::vector<int> final_vertex(paths);
    std::vector<char> survived(paths);
    parallel_for(paths, [&](std::size_t i) {
        RngStream rng(seed, i, tag);
        const PathSample p = simulate_path(g, s, t, x0, rng, bound, precision);
        final_vertex[i] = *g.embedding().vertex_of(p.position());
        survived[i] = p.jump_times.empty() ? 1 : 0;
    });

    KernelEstimate est;
    est.paths = paths;
    est.probabilities = Eigen::VectorXd::Zero(g.vertices());
    for (int v : final_vertex) est.probabilities(v) += 1.0;
    est.probabilities /= static_cast<double>(paths);
    est.standard_errors =
        (est.probabilities.array() * (1.0 - est.probabilities.array()) / static_cast<double>(paths)).sqrt().matrix();
    std::size_t alive = 0;
    for (char c : survived) alive += static_cast<std::size_t>(c);
    est.survival_atom = static_cast<double>(alive) / static_cast<double>(paths);
    est.survival_standard_error = std::sqrt(est.survival_atom * (1.0 - est.survival_atom) / static_cast<double>(paths));
    return est;
}

MarkovValidation validate_markov(const TimeGraph& g, double s, double t, const PAdic& x0, std::size_t paths,
                                 std::uint64_t seed, const QuadratureConfig& q) {
    if (paths < kMinPaths) throw ValidationError("Markov validation needs at least 1000 paths");
    const int start = vertex_of(g, x0);
    MarkovValidation out;
    out.empirical = estimate_kernel(g, s, t, x0, paths, seed, 0);
    out.analytic = heat_kernel_ball_probs(g, s, x0, t, q);
    out.tv_distance = 0.5 * (out.empirical.probabilities - out.analytic).cwiseAbs().sum();

    out.survival_expected = survival_probability(g, s, t, start, q);
    out.survival_sigma =
        std::sqrt(out.survival_expected * (1.0 - out.survival_expected) / static_cast<double>(paths));
    const double dev = std::abs(out.empirical.survival_atom - out.survival_expected);
    out.survival_within_3sigma = out.survival_sigma > 0.0 ? dev <= 3.0 * out.survival_sigma : dev <= 1e-12;

    // Chapman-Kolmogorov: run to r on tag 1, restart from the time-r state on tag 2.
    out.restart_time = 0.5 * (s + t);
    const double r = out.restart_time;
    const double bound_first = dominating_rate(g, s, r);
    const double bound_second = dominating_rate(g, r, t);
    const int precision = g.embedding().precision;
    std::vector<int> final_vertex(paths);
    parallel_for(paths, [&](std::size_t i) {
        RngStream first(seed, i, 1);
        const PathSample a = simulate_path(g, s, r, x0, first, bound_first, precision);
        RngStream second(seed, i, 2);
        const PathSample b = simulate_path(g, r, t, a.position(), second, bound_second, precision);
        final_vertex[i] = *g.embedding().vertex_of(b.position());
    });
    out.restarted = Eigen::VectorXd::Zero(g.vertices());
    for (int v : final_vertex) out.restarted(v) += 1.0;
    out.restarted /= static_cast<double>(paths);
    out.ck_tv_distance = 0.5 * (out.restarted - out.empirical.probabilities).cwiseAbs().sum();
    const Eigen::ArrayXd pooled = 0.5 * (out.restarted + out.empirical.probabilities).array();
    out.ck_tolerance = 1.5 * (2.0 * pooled * (1.0 - pooled) / static_cast<double>(paths)).sqrt().sum();
    out.ck_consistent = out.ck_tv_distance <= out.ck_tolerance;
    return out;
}

}  // namespace ultraheat
