#include "ultraheat/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "ultraheat/errors.hpp"
#include "ultraheat/linalg.hpp"

namespace ultraheat {

namespace {

constexpr double kMatchTieTolerance = 1e-9;

void check_space(const TimeGraph& g, const L2Function& f) {
    const Layout& l = f.layout();
    if (l.prime != g.prime() || l.level != g.level() || l.vertices != g.vertices()) {
        throw ValidationError("function does not live on the graph's K_N");
    }
}

}  // namespace

L2Function apply_adjacency(const TimeGraph& g, double t, const L2Function& f) {
    check_space(g, f);
    const Snapshot snap = g.snapshot(t);
    L2Function out(f.layout());
    out.vertex_values() = snap.adjacency.cast<Complex>() * f.vertex_values();
    return out;
}

L2Function apply_matrix_laplacian(const TimeGraph& g, double t, const L2Function& f) {
    check_space(g, f);
    const Snapshot snap = g.snapshot(t);
    L2Function out(f.layout());
    out.vertex_values() = snap.laplacian.cast<Complex>() * f.vertex_values();
    return out;
}

L2Function apply_laplacian(const Snapshot& snap, const L2Function& f) {
    const Layout& l = f.layout();
    L2Function out(l);
    out.vertex_values() = snap.laplacian.cast<Complex>() * f.vertex_values();
    const std::int64_t per = l.wavelets_per_vertex();
    for (int v = 0; v < l.vertices; ++v) {
        out.wavelet_coeffs().segment(v * per, per) = -snap.degree(v) * f.wavelet_coeffs().segment(v * per, per);
    }
    return out;
}

L2Function apply_laplacian(const TimeGraph& g, double t, const L2Function& f) {
    check_space(g, f);
    return apply_laplacian(g.snapshot(t), f);
}

MismatchWitness mismatch_witness(const TimeGraph& g, double t, int vertex, int r, const PAdic& center,
                                 const PAdic& x0) {
    const Embedding& e = g.embedding();
    if (vertex < 0 || vertex >= e.vertices) throw ValidationError("witness vertex out of range");
    if (r < e.level) throw ValidationError("witness ball must have radius exponent >= N");
    const Ball vertex_ball = e.ball(vertex);
    const Ball sub(center, r);
    if (!vertex_ball.contains(sub)) throw ValidationError("witness ball is not contained in the vertex ball");
    if (!vertex_ball.contains(x0)) throw ValidationError("x0 must lie in the vertex ball");
    if (r > e.level && sub.contains(x0)) throw ValidationError("x0 must lie outside the proper sub-ball");

    const Layout layout = Layout::make(e, r);
    CellVector cells{layout, Eigen::VectorXcd::Zero(layout.cell_count())};
    cells.values(layout.cell_of(sub.center().residue(r))) = 1.0;
    const L2Function f = from_cells(cells);

    MismatchWitness out;
    out.matrix_operator = evaluate(apply_matrix_laplacian(g, t, f), e, x0).real();
    out.zuniga_laplacian = evaluate(apply_laplacian(g, t, f), e, x0).real();
    return out;
}

SpectralFrame spectral_frame(const Eigen::MatrixXd& laplacian, double t, const SpectralFrame* reference) {
    const SymmetricEigen eig = jacobi_eigen(laplacian);
    const Eigen::Index n = eig.values.size();

    SpectralFrame frame;
    frame.t = t;
    frame.min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 1; k < n; ++k) frame.min_gap = std::min(frame.min_gap, eig.values(k) - eig.values(k - 1));
    if (frame.degenerate()) {
        frame.warnings.push_back("degenerate eigenvalues at t=" + std::to_string(t) +
                                 " (gap " + std::to_string(frame.min_gap) + ")");
    }

    frame.permutation.resize(static_cast<std::size_t>(n));
    frame.flipped.assign(static_cast<std::size_t>(n), false);
    if (reference == nullptr) {
        for (Eigen::Index k = 0; k < n; ++k) frame.permutation[static_cast<std::size_t>(k)] = static_cast<int>(k);
        frame.eigenvalues = eig.values;
        frame.modal = eig.vectors;
        return frame;
    }
    if (reference->modal.rows() != n) throw ValidationError("reference frame has a different dimension");

    // Greedy matching on |overlap|, largest first.
    const Eigen::MatrixXd overlap = reference->modal.transpose() * eig.vectors;
    std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> candidates;
    candidates.reserve(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) candidates.emplace_back(std::abs(overlap(i, j)), i, j);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });

    std::vector<bool> row_used(static_cast<std::size_t>(n), false);
    std::vector<bool> col_used(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> match(static_cast<std::size_t>(n), -1);
    bool ambiguous = false;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto [value, i, j] = candidates[c];
        if (row_used[static_cast<std::size_t>(i)] || col_used[static_cast<std::size_t>(j)]) continue;
        for (std::size_t d = c + 1; d < candidates.size(); ++d) {
            const auto [v2, i2, j2] = candidates[d];
            if (value - v2 > kMatchTieTolerance) break;
            if (row_used[static_cast<std::size_t>(i2)] || col_used[static_cast<std::size_t>(j2)]) continue;
            if (i2 == i || j2 == j) ambiguous = true;
        }
        row_used[static_cast<std::size_t>(i)] = true;
        col_used[static_cast<std::size_t>(j)] = true;
        match[static_cast<std::size_t>(i)] = j;
    }
    if (ambiguous) frame.warnings.push_back("degenerate matching at t=" + std::to_string(t));

    frame.tracked = true;
    frame.eigenvalues.resize(n);
    frame.modal.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index j = match[static_cast<std::size_t>(i)];
        const bool flip = overlap(i, j) < 0.0;
        frame.permutation[static_cast<std::size_t>(i)] = static_cast<int>(j);
        frame.flipped[static_cast<std::size_t>(i)] = flip;
        frame.eigenvalues(i) = eig.values(j);
        frame.modal.col(i) = flip ? Eigen::VectorXd(-eig.vectors.col(j)) : Eigen::VectorXd(eig.vectors.col(j));
    }
    return frame;
}

SpectralFrame spectral_frame(const TimeGraph& g, double t, const SpectralFrame* reference) {
    return spectral_frame(g.snapshot(t).laplacian, t, reference);
}

}  // namespace ultraheat
