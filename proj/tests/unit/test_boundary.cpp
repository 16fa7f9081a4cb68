#include <doctest.h>

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "support.hpp"
#include "ultraheat/boundary.hpp"
#include "ultraheat/errors.hpp"

using namespace ultraheat;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Region region(const TimeGraph& g, std::vector<std::string> items) { return parse_region(g.embedding(), items); }

// Brute-force assembly of the quotient forms over all cells at resolution R
// (unit-ball normalization), independent of the library's cell model.
struct Forms {
    Eigen::MatrixXd q, d;
    std::vector<bool> in_s, in_delta;
    double mass = 0.0;
};

Forms assemble(const TimeGraph& g, const Region& s, double t, int r, EdgeSet edges) {
    const Layout l = Layout::make(g.embedding(), r);
    const Snapshot snap = g.snapshot(t);
    const std::int64_t n = l.cell_count();
    const auto vertex = [&](std::int64_t c) { return static_cast<int>(c / l.cells_per_vertex()); };
    Forms f;
    f.mass = std::pow(static_cast<double>(g.embedding().prime), g.level() - r);
    f.in_s = s.cell_mask(l);
    f.in_delta.assign(static_cast<std::size_t>(n), false);
    f.q = Eigen::MatrixXd::Zero(n, n);
    f.d = Eigen::MatrixXd::Zero(n, n);
    for (std::int64_t x = 0; x < n; ++x) {
        if (!f.in_s[static_cast<std::size_t>(x)]) continue;
        f.d(x, x) = snap.degree(vertex(x)) * f.mass;
        for (std::int64_t y = 0; y < n; ++y) {
            const double a = snap.adjacency(vertex(x), vertex(y));
            if (a == 0.0) continue;
            const bool inside = f.in_s[static_cast<std::size_t>(y)];
            if (!inside) f.in_delta[static_cast<std::size_t>(y)] = true;
            if (inside && edges == EdgeSet::boundary_only) continue;
            const double w = a * f.mass * f.mass;
            f.q(x, x) += w;
            f.q(y, y) += w;
            f.q(x, y) -= w;
            f.q(y, x) -= w;
        }
    }
    return f;
}

// min of z'Qz / z'Dz over z in the kernel of C, with D regularized on its null
// directions so the pencil is definite.
double pencil_minimum(const Eigen::MatrixXd& q, const Eigen::MatrixXd& d, const Eigen::MatrixXd& c) {
    Eigen::MatrixXd z;
    if (c.rows() == 0) {
        z = Eigen::MatrixXd::Identity(q.rows(), q.rows());
    } else {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
        lu.setThreshold(1e-12);
        z = lu.kernel();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
        z = qr.householderQ() * Eigen::MatrixXd::Identity(z.rows(), lu.dimensionOfKernel());
    }
    const Eigen::MatrixXd qz = z.transpose() * q * z;
    Eigen::MatrixXd dz = z.transpose() * d * z;
    dz += 1e-11 * Eigen::MatrixXd::Identity(dz.rows(), dz.cols());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(qz, dz);
    return es.eigenvalues().minCoeff();
}

double oracle_dirichlet(const TimeGraph& g, const Region& s, double t, int r, EdgeSet edges) {
    const Forms f = assemble(g, s, t, r, edges);
    std::vector<Eigen::Index> keep;
    for (std::size_t x = 0; x < f.in_s.size(); ++x) {
        if (f.in_s[x]) keep.push_back(static_cast<Eigen::Index>(x));
    }
    const Eigen::MatrixXd q = f.q(keep, keep);
    const Eigen::MatrixXd d = f.d(keep, keep);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(q, d);
    return es.eigenvalues().minCoeff();
}

double oracle_vonneumann(const TimeGraph& g, const Region& s, double t, int r, EdgeSet edges) {
    const Forms f = assemble(g, s, t, r, edges);
    std::vector<Eigen::Index> keep, delta;
    for (std::size_t x = 0; x < f.in_s.size(); ++x) {
        if (f.in_s[x] || f.in_delta[x]) keep.push_back(static_cast<Eigen::Index>(x));
        if (f.in_delta[x]) delta.push_back(static_cast<Eigen::Index>(x));
    }
    const Layout l = Layout::make(g.embedding(), r);
    const Snapshot snap = g.snapshot(t);
    const auto vertex = [&](Eigen::Index c) { return static_cast<int>(c / l.cells_per_vertex()); };
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1 + static_cast<Eigen::Index>(delta.size()), l.cell_count());
    for (Eigen::Index x = 0; x < l.cell_count(); ++x) {
        if (f.in_s[static_cast<std::size_t>(x)]) c(0, x) = f.d(x, x);
    }
    for (std::size_t k = 0; k < delta.size(); ++k) {
        const Eigen::Index y = delta[k];
        for (Eigen::Index x = 0; x < l.cell_count(); ++x) {
            if (!f.in_s[static_cast<std::size_t>(x)]) continue;
            const double a = snap.adjacency(vertex(y), vertex(x));
            c(1 + static_cast<Eigen::Index>(k), y) += a;
            c(1 + static_cast<Eigen::Index>(k), x) -= a;
        }
    }
    return pencil_minimum(f.q(keep, keep), f.d(keep, keep), c(Eigen::all, keep));
}

L2Function random_function(const Layout& l, RngStream& rng) {
    CellVector c{l, Eigen::VectorXcd(l.cell_count())};
    for (Eigen::Index i = 0; i < c.values.size(); ++i) c.values(i) = Complex(rng.uniform() - 0.5, 0.0);
    return from_cells(c);
}

}  // namespace

TEST_CASE("option names") {
    CHECK(parse_normalization("unit-ball") == MeasureNormalization::unit_ball);
    CHECK(parse_normalization("haar") == MeasureNormalization::haar);
    CHECK(parse_edge_set("omega_star") == EdgeSet::omega_star);
    CHECK(to_string(EdgeSet::boundary_only) == "boundary_only");
    CHECK_THROWS_AS(parse_edge_set("all"), ValidationError);
    CHECK_THROWS_AS(parse_normalization("lebesgue"), ValidationError);
}

TEST_CASE("region parsing") {
    const TimeGraph g = fixtures::k3();
    const Region s = region(g, {"0", "2:1"});
    CHECK(s.vertices() == std::vector<int>{0, 2});
    CHECK(s.finest_scale() == g.level() + 1);
    const Layout l = Layout::make(g.embedding(), g.level() + 1);
    const auto mask = s.cell_mask(l);
    CHECK(mask == std::vector<bool>{true, true, false, false, false, true});
    CHECK_THROWS_AS(region(g, {"3"}), ValidationError);
    CHECK_THROWS_AS(region(g, {"0", "0:1"}), ValidationError);
    CHECK_THROWS_AS(region(g, {"0:2"}), ValidationError);
    CHECK_THROWS_AS(region(g, {"x"}), ValidationError);
    CHECK_THROWS_AS(region(g, {}), ValidationError);
}

TEST_CASE("boundary sets of the three-vertex complete graph") {
    const TimeGraph g = fixtures::k3();
    const BoundaryData b = boundary_data(g, region(g, {"0", "1"}), 0.0);
    CHECK(b.resolution == g.level());
    CHECK(b.vertex_boundary == std::vector<std::int64_t>{2});
    CHECK(b.edge_boundary == std::vector<std::pair<int, int>>{{0, 2}, {1, 2}});
    CHECK(b.omega_star.size() == 4);
    CHECK_FALSE(b.boundary_empty());

    const BoundaryData fine = boundary_data(g, region(g, {"0", "1"}), 0.0, g.level() + 2);
    CHECK(fine.vertex_boundary.size() == 4);
}

TEST_CASE("empty boundaries") {
    const TimeGraph iso = fixtures::graph(3, 2, {{{0, 1}, "1"}, {{1, 2}, "1 - t"}});
    const Region s = region(iso, {"2"});
    CHECK_FALSE(boundary_data(iso, s, 0.5).boundary_empty());
    CHECK(boundary_data(iso, s, 1.0).boundary_empty());
    CHECK_THROWS_AS(dirichlet_eigenvalue(iso, s, 1.0, iso.level()), ValidationError);
    CHECK(gamma_hat(iso, s, 1.0) == kInf);

    const TimeGraph g = fixtures::k3();
    const BoundaryData all = boundary_data(g, region(g, {"0", "1", "2"}), 0.0);
    CHECK(all.boundary_empty());
    CHECK(all.edge_boundary.empty());
    CHECK_THROWS_AS(graph_dirichlet_eigenvalue(g, region(g, {"0", "1", "2"}), 0.0), ValidationError);
}

TEST_CASE("gamma hat") {
    const TimeGraph k3 = fixtures::k3();
    CHECK(gamma_hat(k3, region(k3, {"0", "1"}), 0.0) == 0.25);
    const TimeGraph k2 = fixtures::k2();
    CHECK(gamma_hat(k2, region(k2, {"0"}), 0.0) == 1.0);
    // Vertex 0 has no edge leaving V(S) = {0, 1}.
    const TimeGraph path = fixtures::graph(3, 2, {{{0, 1}, "1"}, {{1, 2}, "1"}});
    CHECK(gamma_hat(path, region(path, {"0", "1"}), 0.0) == 0.0);
}

TEST_CASE("graph Dirichlet eigenvalues") {
    const TimeGraph k3 = fixtures::k3();
    const Eigen::VectorXd ev = graph_dirichlet_spectrum(k3, region(k3, {"0", "1"}), 0.0);
    REQUIRE(ev.size() == 2);
    CHECK(ev(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ev(1) == doctest::Approx(1.5).epsilon(1e-14));
    const TimeGraph k2 = fixtures::k2();
    CHECK(graph_dirichlet_eigenvalue(k2, region(k2, {"0"}), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Rayleigh quotients") {
    const TimeGraph g = fixtures::k3();
    const Region s = region(g, {"0", "1"});
    const Layout l = Layout::make(g.embedding(), g.level() + 1);

    // Indicator of S: numerator sums A over the edge boundary, denominator sums gamma.
    const L2Function one = L2Function::indicator(l, 0) + L2Function::indicator(l, 1);
    const RayleighValue r1 = rayleigh_quotient(g, s, 0.0, one);
    CHECK(r1.value * 4.0 == doctest::Approx(2.0).epsilon(1e-14));

    // Wavelet witness: deg_boundary(I) / gamma_I, not deg / int_S gamma.
    const L2Function psi = L2Function::wavelet(l, l.wavelet_at(0));
    CHECK(rayleigh_quotient(g, s, 0.0, psi).value == doctest::Approx(0.5).epsilon(1e-14));
    QuotientConfig star;
    star.edge_set = EdgeSet::omega_star;
    // Ordered internal pairs (a, b) and (b, a) each add the boundary amount once more.
    CHECK(rayleigh_quotient(g, s, 0.0, psi, star).value == doctest::Approx(1.5).epsilon(1e-14));

    const RayleighValue outside = rayleigh_quotient(g, s, 0.0, L2Function::indicator(l, 2));
    CHECK(outside.zero_denominator);
    CHECK(outside.value == kInf);
}

TEST_CASE("eigenvalues of the three-vertex example") {
    const TimeGraph g = fixtures::k3();
    const Region s = region(g, {"0", "1"});
    for (int r = g.level(); r <= g.level() + 3; ++r) {
        CHECK(dirichlet_eigenvalue(g, s, 0.0, r) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(vonneumann_eigenvalue(g, s, 0.0, r) == doctest::Approx(0.5).epsilon(1e-12));
    }
    const BoundReport rep = bound_report(g, s, 0.0, g.level() + 1);
    CHECK(rep.gamma_hat == 0.25);
    REQUIRE(rep.graph_dirichlet.has_value());
    CHECK(*rep.graph_dirichlet == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rep.gamma_hat_lt_graph_dirichlet == true);
    CHECK(rep.dirichlet_le_graph == true);
    CHECK(rep.graph_min_le_one == true);
    // The gamma-hat bounds fail: the minimum quotient is 1/2 > 1/4.
    CHECK_FALSE(rep.dirichlet_le_gamma_hat);
    CHECK_FALSE(rep.vonneumann_le_gamma_hat);
}

TEST_CASE("two-vertex example: von Neumann below the graph value") {
    const TimeGraph g = fixtures::k2();
    const Region s = region(g, {"0"});
    CHECK(graph_vonneumann_eigenvalue(g, s, 0.0) == kInf);
    const BoundReport rep = bound_report(g, s, 0.0, g.level() + 1);
    CHECK(std::isfinite(rep.vonneumann));
    CHECK(rep.vonneumann_lt_graph);
    CHECK(rep.graph_vonneumann == kInf);
}

TEST_CASE("solver matches a brute-force pencil") {
    RngStream rng(13);
    int compared = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const TimeGraph g = fixtures::random_polynomial_graph(rng, 4, 2);
        const double t = rng.uniform();
        const Region s = trial % 2 == 0 ? region(g, {"0", "1"}) : region(g, {"0:1", "2"});
        for (EdgeSet edges : {EdgeSet::boundary_only, EdgeSet::omega_star}) {
            for (int r = s.finest_scale(); r <= s.finest_scale() + 1; ++r) {
                if (boundary_data(g, s, t, r).boundary_empty()) continue;
                QuotientConfig cfg;
                cfg.edge_set = edges;
                double lib_d = 0.0;
                try {
                    lib_d = dirichlet_eigenvalue(g, s, t, r, cfg);
                } catch (const ValidationError&) {
                    continue;
                }
                CHECK(lib_d == doctest::Approx(oracle_dirichlet(g, s, t, r, edges)).epsilon(1e-8));
                const double lib_n = vonneumann_eigenvalue(g, s, t, r, cfg);
                if (std::isfinite(lib_n)) {
                    CHECK(lib_n == doctest::Approx(oracle_vonneumann(g, s, t, r, edges)).epsilon(1e-6));
                }
                ++compared;
            }
        }
    }
    CHECK(compared >= 20);
}

TEST_CASE("witness dominance") {
    RngStream rng(29);
    const TimeGraph g = fixtures::k3();
    const Region s = region(g, {"0", "1:0"});
    const int r = g.level() + 2;
    const Layout l = Layout::make(g.embedding(), r);
    const auto mask = s.cell_mask(l);
    const double lambda = dirichlet_eigenvalue(g, s, 0.0, r);
    CHECK(lambda >= 0.0);
    for (int k = 0; k < 10; ++k) {
        CellVector c = to_cells(random_function(l, rng));
        for (std::size_t x = 0; x < mask.size(); ++x) {
            if (!mask[x]) c.values(static_cast<Eigen::Index>(x)) = 0.0;
        }
        CHECK(lambda <= rayleigh_quotient(g, s, 0.0, from_cells(c)).value + 1e-12);
    }
    for (std::int64_t k = 0; k < l.wavelet_count(); ++k) {
        const WaveletIndex w = l.wavelet_at(k);
        if (w.vertex != 0) continue;
        CHECK(lambda <= rayleigh_quotient(g, s, 0.0, L2Function::wavelet(l, w)).value + 1e-12);
    }
}

TEST_CASE("resolution monotonicity and scale covariance") {
    const TimeGraph g = fixtures::graph(4, 2, {{{0, 1}, "1 + t"}, {{1, 2}, "2"}, {{0, 3}, "0.5"}, {{2, 3}, "1"}});
    const TimeGraph scaled = fixtures::graph(4, 2, {{{0, 1}, "3*(1 + t)"}, {{1, 2}, "6"}, {{0, 3}, "1.5"}, {{2, 3}, "3"}});
    const Region s = region(g, {"0", "1:1"});
    double prev_d = kInf, prev_n = kInf;
    for (int r = s.finest_scale(); r <= s.finest_scale() + 2; ++r) {
        const double d = dirichlet_eigenvalue(g, s, 0.4, r);
        const double n = vonneumann_eigenvalue(g, s, 0.4, r);
        CHECK(d <= prev_d + 1e-12);
        CHECK(n <= prev_n + 1e-12);
        CHECK(dirichlet_eigenvalue(scaled, s, 0.4, r) == doctest::Approx(d).epsilon(1e-12));
        CHECK(vonneumann_eigenvalue(scaled, s, 0.4, r) == doctest::Approx(n).epsilon(1e-10));
        prev_d = d;
        prev_n = n;
    }
    CHECK(gamma_hat(scaled, s, 0.4) == doctest::Approx(gamma_hat(g, s, 0.4)).epsilon(1e-14));
}

TEST_CASE("constant graphs give time-independent reports") {
    const TimeGraph g = fixtures::k3();
    const Region s = region(g, {"0", "1:1"});
    const BoundReport a = bound_report(g, s, 0.2, s.finest_scale() + 1);
    const BoundReport b = bound_report(g, s, 1.2, s.finest_scale() + 1);
    CHECK(a.dirichlet == b.dirichlet);
    CHECK(a.vonneumann == b.vonneumann);
    CHECK(a.gamma_hat == b.gamma_hat);
    CHECK(a.graph_vonneumann == b.graph_vonneumann);
}

TEST_CASE("Haar normalization changes gamma hat but not the quotients") {
    const TimeGraph g = fixtures::k3();
    const Region s = region(g, {"0", "1"});
    QuotientConfig haar;
    haar.normalization = MeasureNormalization::haar;
    CHECK(gamma_hat(g, s, 0.0, MeasureNormalization::haar) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dirichlet_eigenvalue(g, s, 0.0, g.level() + 1, haar) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(vonneumann_eigenvalue(g, s, 0.0, g.level() + 1, haar) == doctest::Approx(0.5).epsilon(1e-12));
    const BoundReport rep = bound_report(g, s, 0.0, g.level() + 1, haar);
    CHECK(rep.dirichlet_le_gamma_hat);
}
