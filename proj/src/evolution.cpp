#include "ultraheat/evolution.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "ultraheat/errors.hpp"
#include "ultraheat/linalg.hpp"
#include "ultraheat/operators.hpp"
#include "ultraheat/parallel.hpp"

namespace ultraheat {

namespace {

constexpr double kGapTolerance = 1e-9;
constexpr double kCommutationTolerance = 1e-9;

void check_interval(double s, double t) {
    if (!(s >= 0.0) || !(t >= s) || !std::isfinite(t)) throw ValidationError("evolution requires 0 <= s <= t");
}

void check_space(const TimeGraph& g, const L2Function& f) {
    const Layout& l = f.layout();
    if (l.prime != g.prime() || l.level != g.level() || l.vertices != g.vertices()) {
        throw ValidationError("initial condition does not live on the graph's K_N");
    }
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Eigen::VectorXcd apply_real(const Eigen::MatrixXd& m, const Eigen::VectorXcd& v) { return m.cast<Complex>() * v; }

void damp_wavelets(L2Function& f, const Eigen::VectorXd& factor) {
    const std::int64_t per = f.layout().wavelets_per_vertex();
    for (int v = 0; v < f.layout().vertices; ++v) f.wavelet_coeffs().segment(v * per, per) *= factor(v);
}

}  // namespace

void QuadratureConfig::validate() const {
    if (subintervals < 2 || subintervals % 2 != 0) {
        throw ValidationError("quadrature needs an even number of subintervals >= 2");
    }
}

std::vector<double> QuadratureConfig::nodes(double s, double t) const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(subintervals) + 1);
    for (int k = 0; k <= subintervals; ++k) out[static_cast<std::size_t>(k)] = k == subintervals ? t : s + (t - s) * k / subintervals;
    return out;
}

std::vector<double> QuadratureConfig::weights(double s, double t) const {
    validate();
    const double h = (t - s) / subintervals;
    std::vector<double> out(static_cast<std::size_t>(subintervals) + 1);
    for (int k = 0; k <= subintervals; ++k) {
        const double c = (k == 0 || k == subintervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        out[static_cast<std::size_t>(k)] = c * h / 3.0;
    }
    return out;
}

std::string to_string(Method m) {
    switch (m) {
        case Method::autonomous: return "autonomous";
        case Method::closed_form: return "closed_form";
        case Method::trotter: return "trotter";
        case Method::exact_commuting: return "exact_commuting";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "autonomous") return Method::autonomous;
    if (name == "closed" || name == "closed_form") return Method::closed_form;
    if (name == "trotter") return Method::trotter;
    if (name == "commuting" || name == "exact_commuting") return Method::exact_commuting;
    throw ValidationError("unknown evolution method '" + name + "'");
}

std::string EvolutionReport::tag() const {
    if (method == Method::trotter) return "trotter(" + std::to_string(steps) + ")";
    return to_string(method);
}

Eigen::VectorXd wavelet_decay(const TimeGraph& g, double s, double t, const QuadratureConfig& q) {
    const std::vector<double> nodes = q.nodes(s, t);
    const std::vector<double> w = q.weights(s, t);
    Eigen::VectorXd integral = Eigen::VectorXd::Zero(g.vertices());
    for (std::size_t k = 0; k < nodes.size(); ++k) integral += w[k] * g.snapshot(nodes[k]).degree;
    return (-integral.array()).exp().matrix();
}

L2Function autonomous_evolve(const TimeGraph& g, double t0, double duration, const L2Function& u0) {
    check_space(g, u0);
    if (!(duration >= 0.0) || !std::isfinite(duration)) throw ValidationError("duration must be finite and >= 0");
    const Snapshot snap = g.snapshot(t0);
    L2Function out = u0;
    if (duration == 0.0) return out;
    out.vertex_values() = apply_real(symmetric_exp(snap.laplacian, duration), u0.vertex_values());
    damp_wavelets(out, (-duration * snap.degree.array()).exp().matrix());
    return out;
}

EvolutionReport closed_form_evolve(const TimeGraph& g, double s, double t, const L2Function& u0,
                                   const QuadratureConfig& q) {
    check_space(g, u0);
    check_interval(s, t);
    q.validate();
    EvolutionReport report{u0};
    report.method = Method::closed_form;
    report.quadrature_k = q.subintervals;
    if (t == s) return report;

    const std::vector<double> nodes = q.nodes(s, t);
    const std::vector<double> w = q.weights(s, t);
    std::vector<Eigen::MatrixXd> laplacians;
    laplacians.reserve(nodes.size());
    for (double tau : nodes) laplacians.push_back(g.snapshot(tau).laplacian);

    std::vector<SpectralFrame> frames;
    frames.reserve(nodes.size());
    Eigen::VectorXd mu_integral = Eigen::VectorXd::Zero(g.vertices());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        frames.push_back(spectral_frame(laplacians[k], nodes[k], k == 0 ? nullptr : &frames[k - 1]));
        const SpectralFrame& f = frames.back();
        if (f.degenerate(kGapTolerance)) {
            throw NumericalRefusal("closed form refused: eigenvalue gap " + short_num(f.min_gap) + " < 1e-9 at t=" +
                                   short_num(nodes[k]) + "; use the trotter method");
        }
        for (const std::string& msg : f.warnings) report.warnings.push_back(msg);
        mu_integral += w[k] * f.eigenvalues;
    }

    double defect = 0.0;
    for (std::size_t a = 0; a < laplacians.size(); ++a) {
        for (std::size_t b = a + 1; b < laplacians.size(); ++b) {
            defect = std::max(defect, (laplacians[a] * laplacians[b] - laplacians[b] * laplacians[a]).norm());
        }
    }
    report.commutation_defect = defect;

    // Q = M(t)^{-1} M(s) diag(e^{int mu}) C(s) with C(s) = M(s)^T u0; result M(t) Q.
    const Eigen::MatrixXd& ms = frames.front().modal;
    const Eigen::MatrixXd& mt = frames.back().modal;
    const Eigen::VectorXcd c = apply_real(ms.transpose(), u0.vertex_values());
    const Eigen::VectorXcd scaled = mu_integral.array().exp().matrix().cast<Complex>().cwiseProduct(c);
    const Eigen::VectorXcd qvec = apply_real(mt.transpose(), apply_real(ms, scaled));
    report.result.vertex_values() = apply_real(mt, qvec);
    damp_wavelets(report.result, wavelet_decay(g, s, t, q));
    return report;
}

EvolutionReport trotter_evolve(const TimeGraph& g, double s, double t, int steps, const L2Function& u0) {
    check_space(g, u0);
    check_interval(s, t);
    if (steps < 1) throw ValidationError("trotter needs at least one step");
    EvolutionReport report{u0};
    report.method = Method::trotter;
    report.steps = steps;
    const double h = (t - s) / steps;
    for (int k = 1; k <= steps; ++k) {
        const double frozen = k == steps ? t : s + k * h;
        report.result = autonomous_evolve(g, frozen, h, report.result);
    }
    return report;
}

EvolutionReport exact_commuting_evolve(const TimeGraph& g, double s, double t, const L2Function& u0,
                                       const QuadratureConfig& q) {
    check_space(g, u0);
    check_interval(s, t);
    q.validate();
    EvolutionReport report{u0};
    report.method = Method::exact_commuting;
    report.quadrature_k = q.subintervals;
    if (t == s) return report;

    const std::vector<double> nodes = q.nodes(s, t);
    const std::vector<double> w = q.weights(s, t);
    const double defect = g.commutation_defect(nodes);
    report.commutation_defect = defect;
    if (defect > kCommutationTolerance) {
        throw NumericalRefusal("commuting solver refused: commutation defect " + short_num(defect) +
                               " exceeds 1e-9 on the quadrature grid");
    }
    Eigen::MatrixXd integral = Eigen::MatrixXd::Zero(g.vertices(), g.vertices());
    for (std::size_t k = 0; k < nodes.size(); ++k) integral += w[k] * g.snapshot(nodes[k]).laplacian;
    report.result.vertex_values() = apply_real(symmetric_exp(integral), u0.vertex_values());
    damp_wavelets(report.result, wavelet_decay(g, s, t, q));
    return report;
}

EvolutionReport evolve(Method method, const TimeGraph& g, double s, double t, const L2Function& u0,
                       const QuadratureConfig& q, int steps) {
    switch (method) {
        case Method::autonomous: {
            check_interval(s, t);
            EvolutionReport r{autonomous_evolve(g, s, t - s, u0)};
            r.method = Method::autonomous;
            return r;
        }
        case Method::closed_form: return closed_form_evolve(g, s, t, u0, q);
        case Method::trotter: return trotter_evolve(g, s, t, steps, u0);
        case Method::exact_commuting: return exact_commuting_evolve(g, s, t, u0, q);
    }
    throw ValidationError("unknown evolution method");
}

double evolution_defect(const TimeGraph& g, double s, double r, double t, const L2Function& u0, Method method,
                        const QuadratureConfig& q, int steps) {
    if (!(s <= r && r <= t)) throw ValidationError("evolution defect requires s <= r <= t");
    const L2Function first = evolve(method, g, s, r, u0, q, steps).result;
    const L2Function chained = evolve(method, g, r, t, first, q, steps).result;
    const L2Function direct = evolve(method, g, s, t, u0, q, steps).result;
    return norm(chained - direct);
}

TrotterSweep trotter_error_sweep(const TimeGraph& g, double s, double t, const L2Function& u0,
                                 const std::vector<int>& steps, const QuadratureConfig& q) {
    TrotterSweep sweep;
    sweep.steps = steps;
    const std::vector<double> nodes = q.nodes(s, t);
    const bool commuting = t == s || g.commutation_defect(nodes) <= kCommutationTolerance;
    sweep.reference = commuting ? Method::exact_commuting : Method::closed_form;
    const L2Function reference = evolve(sweep.reference, g, s, t, u0, q).result;

    sweep.errors.assign(steps.size(), 0.0);
    parallel_for(steps.size(), [&](std::size_t i) {
        sweep.errors[i] = norm(trotter_evolve(g, s, t, steps[i], u0).result - reference);
    });

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(sweep.errors[i] > kSweepNoiseFloor)) continue;
        const double x = std::log(static_cast<double>(steps[i]));
        const double y = std::log(sweep.errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    const double denom = m * sxx - sx * sx;
    if (m >= 2 && denom > 0.0) sweep.slope = (m * sxy - sx * sy) / denom;
    return sweep;
}

double closed_vs_trotter_gap(const TimeGraph& g, double s, double t, const L2Function& u0, int steps,
                             const QuadratureConfig& q) {
    return norm(closed_form_evolve(g, s, t, u0, q).result - trotter_evolve(g, s, t, steps, u0).result);
}

}  // namespace ultraheat
