// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "support.hpp"
#include "ultraheat/boundary.hpp"
#include "ultraheat/errors.hpp"
#include "ultraheat/evolution.hpp"
#include "ultraheat/l2space.hpp"
#include "ultraheat/operators.hpp"
#include "ultraheat/stochastic.hpp"

using namespace ultraheat;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

L2Function random_function(const Layout& l, RngStream& rng, bool unit_interval) {
    CellVector c{l, Eigen::VectorXcd(l.cell_count())};
    for (Eigen::Index i = 0; i < c.values.size(); ++i) {
        c.values(i) = unit_interval ? Complex(rng.uniform(), 0.0) : Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
    }
    return from_cells(c);
}

PAdic origin() { return PAdic::zero(2, kDefaultPadicPrecision); }

Outcome kozyrev_eigenfunctions() {
    const TimeGraph g = fixtures::k3();
    const Embedding& e = g.embedding();
    const Layout l = Layout::make(e, g.level() + 3);
    const Layout fine = Layout::make(e, l.resolution + 1);
    const double t = 0.3;
    const Eigen::VectorXd gamma = g.snapshot(t).degree;
    RngStream rng(101);
    bool exact = true;
    double worst = 0.0;
    for (std::int64_t k = 0; k < l.wavelet_count(); ++k) {
        const WaveletIndex w = l.wavelet_at(k);
        const L2Function psi = L2Function::wavelet(l, w);
        const L2Function out = apply_laplacian(g, t, psi);
        const L2Function expected = psi * Complex(-gamma(w.vertex));
        exact = exact && (out.vertex_values() == expected.vertex_values()) &&
                (out.wavelet_coeffs() == expected.wavelet_coeffs());
        // Literal kernel integral by cell quadrature at a sample point of the wavelet's ball.
        const CellVector cells = to_cells(psi.lifted(fine.resolution));
        for (int rep = 0; rep < 2; ++rep) {
            const PAdic x = sample_uniform(e.ball(w.vertex), 20, rng);
            const Complex fx = evaluate(psi, e, x);
            Complex integral_value = 0.0;
            for (std::int64_t c = 0; c < fine.cell_count(); ++c) {
                const PAdic y = PAdic::from_integer(static_cast<std::int64_t>(fine.cell_center(c)), 2, 20);
                integral_value += g.kernel_value(x, y, t) * (cells.values(c) - fx) * fine.cell_volume();
            }
            worst = std::max(worst, std::abs(integral_value + gamma(w.vertex) * fx));
        }
    }
    return {exact && worst <= 1e-10,
            std::to_string(l.wavelet_count()) + " wavelets, coefficient identity " + (exact ? "exact" : "inexact") +
                fmt(", max pointwise residual %.3g", worst)};
}

Outcome operator_mismatch() {
    const MismatchWitness w = mismatch_witness(fixtures::k2(), 0.0, 0, 2, origin(), PAdic::from_integer(2, 2, 32));
    const bool pass = w.matrix_operator == -0.5 && std::abs(w.zuniga_laplacian) <= 1e-15;
    return {pass, fmt("(%.17g, %.3g)", w.matrix_operator, w.zuniga_laplacian)};
}

Outcome autonomous_solution() {
    const TimeGraph g = fixtures::k2();
    const Layout l = Layout::make(g.embedding(), g.level() + 3);
    const Eigen::VectorXcd v = autonomous_evolve(g, 0.0, fixtures::kLn2, L2Function::indicator(l, 0)).vertex_values();
    const double err = std::max(std::abs(v(0) - 0.625), std::abs(v(1) - 0.375));
    return {err <= 1e-12, fmt("(%.17g, %.17g), error %.3g", v(0).real(), v(1).real(), err)};
}

Outcome k3_golden() {
    const TimeGraph g = fixtures::k3();
    const Region s = parse_region(g.embedding(), {"0", "1"});
    const Eigen::VectorXd ev = graph_dirichlet_spectrum(g, s, 0.0);
    const double gh = gamma_hat(g, s, 0.0);
    const BoundReport rep = bound_report(g, s, 0.0, g.level() + 1);
    const bool pass = ev.size() == 2 && std::abs(ev(0) - 0.5) <= 1e-12 && std::abs(ev(1) - 1.5) <= 1e-12 &&
                      gh == 0.25 && rep.gamma_hat_lt_graph_dirichlet.value_or(false);
    return {pass, fmt("eigenvalues {%.17g, %.17g}, gamma_hat %.17g", ev(0), ev(1), gh) +
                      ", gamma_hat < lambda_G^D flagged " + (rep.gamma_hat_lt_graph_dirichlet.value_or(false) ? "yes" : "no")};
}

Outcome example_two() {
    const TimeGraph g = fixtures::k2();
    const Region s = parse_region(g.embedding(), {"0"});
    const BoundReport rep = bound_report(g, s, 0.0, g.level() + 1);
    const bool pass = std::isinf(rep.graph_vonneumann) && std::isfinite(rep.vonneumann) && rep.vonneumann_lt_graph;
    return {pass, fmt("lambda_G^N = %g, lambda^N = %.17g", rep.graph_vonneumann, rep.vonneumann)};
}

Outcome commuting_agreement() {
    const TimeGraph g = fixtures::p2t();
    const Layout l = Layout::make(g.embedding(), g.level() + 3);
    RngStream rng(6);
    const L2Function u0 = random_function(l, rng, false) + L2Function::indicator(l, 0);
    const QuadratureConfig q{64};
    const L2Function closed = closed_form_evolve(g, 0.0, 1.0, u0, q).result;
    const L2Function commuting = exact_commuting_evolve(g, 0.0, 1.0, u0, q).result;
    const L2Function trotter = trotter_evolve(g, 0.0, 1.0, 1024, u0).result;
    const double cc = norm(closed - commuting);
    const double ct = norm(closed - trotter);
    const double mt = norm(commuting - trotter);
    const bool pass = cc <= 1e-8 && ct <= 5e-4 && mt <= 5e-4;
    return {pass, fmt("closed-commuting %.3g, closed-trotter %.3g, commuting-trotter %.3g", cc, ct, mt)};
}

Outcome trotter_rate() {
    const TimeGraph g = fixtures::p2t();
    const Layout l = Layout::make(g.embedding(), g.level() + 3);
    const TrotterSweep s = trotter_error_sweep(g, 0.0, 1.0, L2Function::indicator(l, 0),
                                               {8, 16, 32, 64, 128, 256, 512, 1024}, QuadratureConfig{64});
    if (!s.slope) return {false, "slope undefined"};
    return {std::abs(*s.slope + 1.0) <= 0.15, fmt("slope %.4f against ", *s.slope) + to_string(s.reference)};
}

Outcome evolution_law() {
    const TimeGraph g = fixtures::p2t();
    const Layout l = Layout::make(g.embedding(), g.level() + 3);
    RngStream rng(8);
    const L2Function u0 = random_function(l, rng, false);
    const double scalar = evolution_defect(g, 0.0, 0.5, 1.0, u0, Method::closed_form, QuadratureConfig{64});
    double constant = 0.0;
    const TimeGraph flat = fixtures::graph(4, 3, {{{0, 1}, "1"}, {{1, 2}, "0.5"}, {{0, 3}, "2"}});
    const Layout lf = Layout::make(flat.embedding(), flat.level() + 2);
    const L2Function f0 = random_function(lf, rng, false);
    constant = std::max(constant, evolution_defect(flat, 0.0, 0.4, 1.0, f0, Method::closed_form));
    const TimeGraph k2 = fixtures::k2();
    const Layout l2 = Layout::make(k2.embedding(), k2.level() + 2);
    constant = std::max(constant, evolution_defect(k2, 0.0, 0.4, 1.0, random_function(l2, rng, false), Method::closed_form));
    return {scalar <= 1e-8 && constant <= 1e-12, fmt("scalar family %.3g, constant graphs %.3g", scalar, constant)};
}

Outcome feller_suite() {
    RngStream rng(2718);
    int graphs = 0, runs = 0, refusals = 0;
    double low = 0.0, high = 1.0, mass = 0.0, growth = -1.0, gap = 0.0;
    while (graphs < 100) {
        const int n = 2 + static_cast<int>(rng.below(5));
        const int p = rng.uniform() < 0.5 ? 2 : 3;
        const TimeGraph g = fixtures::random_polynomial_graph(rng, n, p);
        ++graphs;
        const Layout l = Layout::make(g.embedding(), g.level() + 2);
        const L2Function u0 = random_function(l, rng, true);
        for (Method m : {Method::autonomous, Method::trotter, Method::closed_form, Method::exact_commuting}) {
            EvolutionReport r(u0);
            try {
                r = evolve(m, g, 0.0, 1.0, u0, QuadratureConfig{64}, 64);
            } catch (const NumericalRefusal&) {
                ++refusals;
                continue;
            }
            ++runs;
            const CellVector c = to_cells(r.result);
            low = std::min(low, c.values.real().minCoeff());
            high = std::max(high, c.values.real().maxCoeff());
            mass = std::max(mass, std::abs(integral(r.result) - integral(u0)));
            growth = std::max(growth, norm(r.result) - norm(u0));
            if (m == Method::closed_form) gap = std::max(gap, closed_vs_trotter_gap(g, 0.0, 1.0, u0, 256));
        }
    }
    const bool pass = low >= -1e-9 && high <= 1.0 + 1e-9 && mass <= 1e-11 && growth <= 1e-11;
    return {pass, std::to_string(graphs) + " graphs, " + std::to_string(runs) + " runs (" + std::to_string(refusals) +
                      " refused)" + fmt(", cell range [%.3g, %.17g]", low, high) +
                      fmt(", mass drift %.3g, norm growth %.3g", mass, growth) +
                      fmt(", max closed_vs_trotter_gap %.3g", gap)};
}

Outcome monte_carlo() {
    const MarkovValidation a = validate_markov(fixtures::k2(), 0.0, fixtures::kLn2, origin(), 100000, 7);
    const MarkovValidation b = validate_markov(fixtures::p2t(), 0.0, 1.0, origin(), 100000, 11);
    const double z = std::abs(b.empirical.survival_atom - b.survival_expected) / b.survival_sigma;
    const bool pass = a.tv_distance <= 0.02 && b.survival_within_3sigma;
    return {pass, fmt("TV %.4g, survival atom %.5f vs %.5f", a.tv_distance, b.empirical.survival_atom,
                      b.survival_expected) +
                      fmt(" (%.2f sigma)", z)};
}

Outcome transforms() {
    double parseval = 0.0, round_trip = 0.0, quad = 0.0;
    bool exact = true;
    for (int p : {2, 3}) {
        const Embedding e = vertex_embedding(3, p);
        const Layout l = Layout::make(e, e.level + 3);
        RngStream rng(static_cast<std::uint64_t>(p));
        for (int k = 0; k < 100; ++k) {
            CellVector c{l, Eigen::VectorXcd(l.cell_count())};
            for (Eigen::Index i = 0; i < c.values.size(); ++i) c.values(i) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
            const L2Function f = from_cells(c);
            const double cells = cell_inner_product(c, c).real();
            parseval = std::max(parseval, std::abs(norm(f) * norm(f) - cells));
            round_trip = std::max(round_trip, (to_cells(f).values - c.values).cwiseAbs().maxCoeff());
        }
        for (int v = 0; v < e.vertices; ++v) {
            const L2Function om = L2Function::indicator(l, v);
            for (std::int64_t k = 0; k < l.wavelet_count(); ++k) {
                const L2Function psi = L2Function::wavelet(l, l.wavelet_at(k));
                exact = exact && inner_product(om, psi) == Complex(0.0, 0.0);
                quad = std::max(quad, std::abs(cell_inner_product(to_cells(om), to_cells(psi))));
            }
        }
    }
    const bool pass = parseval <= 1e-12 && round_trip <= 1e-12 && exact && quad <= 1e-12;
    return {pass, fmt("Parseval %.3g, round trip %.3g, ", parseval, round_trip) +
                      "<Omega, Psi> coefficient " + (exact ? "exact" : "nonzero") + fmt(", quadrature %.3g", quad)};
}

Outcome strong_continuity() {
    const TimeGraph g = fixtures::p2t();
    const Layout l = Layout::make(g.embedding(), g.level() + 3);
    const double bound_factor = std::sqrt(g.embedding().volume()) + 1.0;
    RngStream rng(12);
    double worst = -1.0;
    bool pass = true;
    for (int k = 0; k < 50; ++k) {
        L2Function f = random_function(l, rng, false);
        f = f * Complex(1.0 / norm(f));
        const double s = rng.uniform();
        const double t = rng.uniform();
        const double lhs = norm(apply_laplacian(g, t, f) - apply_laplacian(g, s, f));
        const double rhs = g.continuity_modulus(s, t) * bound_factor;
        pass = pass && lhs <= rhs + 1e-14;
        worst = std::max(worst, rhs > 0.0 ? lhs / rhs : 0.0);
    }
    return {pass, fmt("max lhs/rhs %.4f over 50 samples", worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"Kozyrev eigenfunction identity", kozyrev_eigenfunctions},
        {"operator mismatch witness", operator_mismatch},
        {"autonomous two-vertex solution", autonomous_solution},
        {"three-vertex golden numbers", k3_golden},
        {"von Neumann strict inequality example", example_two},
        {"commuting-family agreement", commuting_agreement},
        {"Trotter first-order rate", trotter_rate},
        {"evolution-family law", evolution_law},
        {"Feller property suite", feller_suite},
        {"Monte-Carlo vs analytic kernel", monte_carlo},
        {"transform correctness", transforms},
        {"strong-continuity bound", strong_continuity},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %2zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
