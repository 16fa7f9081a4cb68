#include "ultraheat/timegraph.hpp"

#include <cmath>
#include <set>
#include <string>

#include "ultraheat/errors.hpp"

namespace ultraheat {

namespace {

std::string edge_name(const WeightSpec& w) {
    return "(" + std::to_string(w.i) + "," + std::to_string(w.j) + ")";
}

}  // namespace

TimeGraph::TimeGraph(Embedding embedding, std::vector<WeightSpec> weights)
    : embedding_(std::move(embedding)), weights_(std::move(weights)) {
    const int n = embedding_.vertices;
    incident_.resize(static_cast<std::size_t>(n));
    std::set<std::pair<int, int>> seen;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        const WeightSpec& w = weights_[k];
        if (w.i < 0 || w.j < 0 || w.i >= n || w.j >= n) {
            throw ValidationError("weight " + edge_name(w) + " references a vertex out of range");
        }
        if (w.i == w.j) throw ValidationError("weight " + edge_name(w) + " is on the diagonal");
        const auto key = std::minmax(w.i, w.j);
        if (!seen.insert(key).second) throw ValidationError("weight " + edge_name(w) + " listed twice");
        incident_[static_cast<std::size_t>(w.i)].emplace_back(w.j, k);
        incident_[static_cast<std::size_t>(w.j)].emplace_back(w.i, k);
    }
}

double TimeGraph::weight_at(const WeightSpec& w, double t) const {
    double v = 0.0;
    try {
        v = w.weight.eval(t);
    } catch (const EvalError& e) {
        throw ValidationError("weight " + edge_name(w) + " at t=" + std::to_string(t) + ": " + e.what());
    }
    if (!std::isfinite(v)) {
        throw ValidationError("weight " + edge_name(w) + " is not finite at t=" + std::to_string(t));
    }
    if (v < 0.0) throw ValidationError("weight " + edge_name(w) + " is negative at t=" + std::to_string(t));
    return v;
}

void TimeGraph::validate_window(double s, double t, int grid_points) const {
    if (!(s >= 0.0) || !(t >= s)) throw ValidationError("time window must satisfy 0 <= s <= t");
    for (const WeightSpec& w : weights_) {
        for (int k = 0; k <= grid_points; ++k) {
            const double tau = k == grid_points ? t : s + (t - s) * k / grid_points;
            weight_at(w, tau);
        }
    }
}

Snapshot TimeGraph::snapshot(double t) const {
    if (!(t >= 0.0)) throw ValidationError("snapshot time must be nonnegative");
    const Eigen::Index n = vertices();
    Snapshot snap;
    snap.t = t;
    snap.adjacency = Eigen::MatrixXd::Zero(n, n);
    for (const WeightSpec& w : weights_) {
        const double v = weight_at(w, t);
        snap.adjacency(w.i, w.j) = v;
        snap.adjacency(w.j, w.i) = v;
    }
    snap.degree = snap.adjacency.rowwise().sum();
    snap.laplacian = snap.adjacency;
    snap.laplacian.diagonal() -= snap.degree;
    return snap;
}

double TimeGraph::degree(int vertex, double t) const {
    double acc = 0.0;
    for (const auto& [other, k] : incident_.at(static_cast<std::size_t>(vertex))) acc += weight_at(weights_[k], t);
    return acc;
}

void TimeGraph::row(int vertex, double t, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& [other, k] : incident_.at(static_cast<std::size_t>(vertex))) {
        out[static_cast<std::size_t>(other)] = weight_at(weights_[k], t);
    }
}

double TimeGraph::kernel_value(const PAdic& x, const PAdic& y, double t) const {
    const auto i = embedding_.vertex_of(x);
    const auto j = embedding_.vertex_of(y);
    if (!i || !j || *i == *j) return 0.0;
    double a = 0.0;
    for (const auto& [other, k] : incident_[static_cast<std::size_t>(*i)]) {
        if (other == *j) a = weight_at(weights_[k], t);
    }
    return std::pow(static_cast<double>(prime()), level()) * a;
}

double TimeGraph::commutation_defect(std::span<const double> grid) const {
    if (grid.size() < 2) throw ValidationError("commutation defect needs at least two grid points");
    std::vector<Eigen::MatrixXd> ls;
    ls.reserve(grid.size());
    for (double t : grid) ls.push_back(snapshot(t).laplacian);
    double worst = 0.0;
    for (std::size_t a = 0; a < ls.size(); ++a) {
        for (std::size_t b = a + 1; b < ls.size(); ++b) {
            worst = std::max(worst, (ls[a] * ls[b] - ls[b] * ls[a]).norm());
        }
    }
    return worst;
}

double TimeGraph::continuity_modulus(double s, double t) const {
    double acc = 0.0;
    for (const WeightSpec& w : weights_) acc += 2.0 * std::abs(weight_at(w, t) - weight_at(w, s));
    return acc;
}

}  // namespace ultraheat
