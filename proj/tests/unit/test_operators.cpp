#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "ultraheat/errors.hpp"
#include "ultraheat/l2space.hpp"
#include "ultraheat/operators.hpp"

using namespace ultraheat;

namespace {

L2Function random_function(const Layout& l, RngStream& rng) {
    CellVector c{l, Eigen::VectorXcd(l.cell_count())};
    for (Eigen::Index i = 0; i < c.values.size(); ++i) c.values(i) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
    return from_cells(c);
}

}  // namespace

TEST_CASE("adjacency operator") {
    const TimeGraph g = fixtures::k2();
    const Layout l = Layout::make(g.embedding(), 3);
    const L2Function psi = L2Function::wavelet(l, l.wavelet_at(2));
    CHECK(norm(apply_adjacency(g, 0.0, psi)) == 0.0);
    const L2Function a = apply_adjacency(g, 0.0, L2Function::indicator(l, 0));
    CHECK(a.vertex_values() == Eigen::Vector2cd(0.0, 1.0));
    CHECK(norm(apply_adjacency(g, 0.0, L2Function::constant(l, 1.0)) - L2Function::constant(l, 1.0)) == 0.0);
}

TEST_CASE("matrix Laplacian operator") {
    const TimeGraph g = fixtures::k2();
    const Layout l = Layout::make(g.embedding(), 3);
    CHECK(norm(apply_matrix_laplacian(g, 0.0, L2Function::wavelet(l, l.wavelet_at(0)))) == 0.0);
    CHECK(apply_matrix_laplacian(g, 0.0, L2Function::indicator(l, 0)).vertex_values() == Eigen::Vector2cd(-1.0, 1.0));
    CHECK(norm(apply_matrix_laplacian(g, 0.0, L2Function::constant(l, 1.0))) == 0.0);
}

TEST_CASE("Zuniga Laplacian") {
    const TimeGraph g = fixtures::p2t();
    const Layout l = Layout::make(g.embedding(), 4);
    for (std::int64_t k = 0; k < l.wavelet_count(); ++k) {
        const WaveletIndex w = l.wavelet_at(k);
        const L2Function psi = L2Function::wavelet(l, w);
        const L2Function out = apply_laplacian(g, 2.0, psi);
        CHECK(norm(out - psi * Complex(-2.0)) == 0.0);
    }
    const TimeGraph k2 = fixtures::k2();
    CHECK(apply_laplacian(k2, 0.0, L2Function::indicator(l, 0)).vertex_values() == Eigen::Vector2cd(-1.0, 1.0));
    CHECK(norm(apply_laplacian(k2, 0.0, L2Function::constant(l, 1.0))) == 0.0);
}

TEST_CASE("mismatch witness") {
    const TimeGraph g = fixtures::k2();
    const PAdic zero = PAdic::zero(2, 32);
    const PAdic two = PAdic::from_integer(2, 2, 32);
    const MismatchWitness w = mismatch_witness(g, 0.0, 0, 2, zero, two);
    CHECK(w.matrix_operator == -0.5);
    CHECK(std::abs(w.zuniga_laplacian) <= 1e-15);

    const MismatchWitness same = mismatch_witness(g, 0.0, 0, 1, zero, two);
    CHECK(same.matrix_operator == same.zuniga_laplacian);
    CHECK(same.matrix_operator == -1.0);

    CHECK_THROWS_AS(mismatch_witness(g, 0.0, 0, 2, zero, zero), ValidationError);
    CHECK_THROWS_AS(mismatch_witness(g, 0.0, 0, 2, PAdic::from_integer(1, 2, 32), two), ValidationError);
    CHECK_THROWS_AS(mismatch_witness(g, 0.0, 0, 0, zero, two), ValidationError);
}

TEST_CASE("mismatch witness scales with the sub-ball") {
    const TimeGraph g = fixtures::graph(2, 3, {{{0, 1}, "2 + t"}});
    const PAdic center = PAdic::from_integer(1 + 3 * 2, 3, 32);
    const PAdic x0 = PAdic::from_integer(1, 3, 32);
    const MismatchWitness w = mismatch_witness(g, 1.0, 1, 3, center, x0);
    CHECK(w.matrix_operator == doctest::Approx(-3.0 / 9.0).epsilon(1e-14));
    CHECK(std::abs(w.zuniga_laplacian) <= 1e-15);
}

TEST_CASE("pure wavelets: matrix operator vanishes, Zuniga Laplacian scales") {
    const TimeGraph g = fixtures::k3();
    const Layout l = Layout::make(g.embedding(), g.level() + 2);
    RngStream rng(31);
    for (std::int64_t k = 0; k < l.wavelet_count(); ++k) {
        const WaveletIndex w = l.wavelet_at(k);
        const L2Function psi = L2Function::wavelet(l, w);
        const PAdic x0 = sample_uniform(g.embedding().ball(w.vertex), 20, rng);
        CHECK(evaluate(apply_matrix_laplacian(g, 0.0, psi), g.embedding(), x0) == Complex(0.0, 0.0));
        CHECK(std::abs(evaluate(apply_laplacian(g, 0.0, psi), g.embedding(), x0) +
                       2.0 * evaluate(psi, g.embedding(), x0)) <= 1e-13);
    }
}

TEST_CASE("self-adjointness and kernel containment") {
    RngStream rng(44);
    for (int trial = 0; trial < 10; ++trial) {
        const TimeGraph g = fixtures::random_polynomial_graph(rng, 4, 2);
        const Layout l = Layout::make(g.embedding(), g.level() + 2);
        const L2Function f = random_function(l, rng);
        const L2Function h = random_function(l, rng);
        const double t = rng.uniform();
        CHECK(std::abs(inner_product(apply_laplacian(g, t, f), h) - inner_product(f, apply_laplacian(g, t, h))) <= 1e-11);
        CHECK(apply_adjacency(g, t, f).wavelet_coeffs().cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("Zuniga Laplacian matches its integral definition") {
    RngStream rng(71);
    const TimeGraph g = fixtures::path3_noncommuting();
    const Embedding& e = g.embedding();
    const int r = g.level() + 2;
    const Layout l = Layout::make(e, r);
    const Layout fine = Layout::make(e, r + 1);
    for (int trial = 0; trial < 20; ++trial) {
        const L2Function f = random_function(l, rng);
        const CellVector cells = to_cells(f.lifted(fine.resolution));
        const double t = 2.0 * rng.uniform();
        const PAdic x = sample_uniform(e.ball(static_cast<int>(rng.below(3))), 20, rng);
        const Complex fx = evaluate(f, e, x);
        Complex integral_value = 0.0;
        for (std::int64_t c = 0; c < fine.cell_count(); ++c) {
            const PAdic y = PAdic::from_integer(static_cast<std::int64_t>(fine.cell_center(c)), 2, 20);
            integral_value += g.kernel_value(x, y, t) * (cells.values(c) - fx) * fine.cell_volume();
        }
        CHECK(std::abs(evaluate(apply_laplacian(g, t, f), e, x) - integral_value) <= 1e-10);
    }
}

TEST_CASE("spectral frame of the unit two-vertex graph") {
    const SpectralFrame f = spectral_frame(fixtures::k2(), 0.0);
    CHECK(f.eigenvalues(0) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(std::abs(f.eigenvalues(1)) <= 1e-14);
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(std::abs(f.modal(0, 0)) - h) <= 1e-14);
    CHECK(std::abs(f.modal(0, 0) + f.modal(1, 0)) <= 1e-14);
    CHECK(std::abs(f.modal(0, 1) - h) <= 1e-14);
    CHECK(std::abs(f.modal(1, 1) - h) <= 1e-14);
    CHECK_FALSE(f.tracked);
}

TEST_CASE("tracking a scalar family keeps the modal matrix") {
    const TimeGraph g = fixtures::graph(3, 2, {{{0, 1}, "1 + t/2"}, {{1, 2}, "2*(1 + t/2)"}});
    SpectralFrame prev = spectral_frame(g, 0.0);
    const Eigen::MatrixXd m0 = prev.modal;
    for (int k = 1; k < 10; ++k) {
        SpectralFrame next = spectral_frame(g, 0.2 * k, &prev);
        CHECK((next.modal - m0).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(next.warnings.empty());
        prev = next;
    }
}

TEST_CASE("reference equal to self gives the identity matching") {
    const TimeGraph g = fixtures::path3_noncommuting();
    const SpectralFrame a = spectral_frame(g, 0.7);
    const SpectralFrame b = spectral_frame(g, 0.7, &a);
    for (int k = 0; k < 3; ++k) {
        CHECK(b.permutation[static_cast<std::size_t>(k)] == k);
        CHECK_FALSE(b.flipped[static_cast<std::size_t>(k)]);
    }
    CHECK(b.modal == a.modal);
}

TEST_CASE("tracking follows a crossing eigenpair") {
    // Eigenvalues of diag-like Laplacians cross when the weights swap order.
    const TimeGraph g = fixtures::graph(4, 2, {{{0, 1}, "1 + t"}, {{2, 3}, "2"}});
    const SpectralFrame a = spectral_frame(g, 0.5);
    const SpectralFrame b = spectral_frame(g, 1.5, &a);
    // The (0,1) mode keeps its column even though its eigenvalue passed -4.
    Eigen::Index col = -1;
    for (Eigen::Index k = 0; k < 4; ++k) {
        if (std::abs(a.modal(0, k) + a.modal(1, k)) < 1e-12 && std::abs(a.modal(0, k)) > 0.5) col = k;
    }
    REQUIRE(col >= 0);
    CHECK(b.eigenvalues(col) == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK((b.modal.col(col) - a.modal.col(col)).norm() <= 1e-12);
}

TEST_CASE("eigen residuals and orthogonality") {
    RngStream rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const TimeGraph g = fixtures::random_polynomial_graph(rng, 6, 3);
        const double t = rng.uniform();
        const SpectralFrame f = spectral_frame(g, t);
        const Eigen::MatrixXd l = g.snapshot(t).laplacian;
        for (Eigen::Index k = 0; k < f.eigenvalues.size(); ++k) {
            CHECK((l * f.modal.col(k) - f.eigenvalues(k) * f.modal.col(k)).norm() <= 1e-10);
            CHECK(f.eigenvalues(k) <= 1e-12);
            if (k > 0) CHECK(f.eigenvalues(k - 1) <= f.eigenvalues(k));
        }
        CHECK((f.modal.transpose() * f.modal - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("degenerate spectra are flagged") {
    const SpectralFrame f = spectral_frame(fixtures::k3(), 0.0);
    CHECK(f.degenerate());
    CHECK_FALSE(f.warnings.empty());
    const SpectralFrame g = spectral_frame(fixtures::k3(), 1.0, &f);
    CHECK_FALSE(g.warnings.empty());
}
