#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "ultraheat/padic.hpp"

namespace ultraheat {

using Complex = std::complex<double>;

/// Index of the Kozyrev wavelet p^(r/2) chi_p(p^(-r-1) j x) 1_{B_{p^-r}(a)}(x).
/// `center` is the integer value of the canonical center a (a < p^r, a = vertex mod p^N).
struct WaveletIndex {
    int vertex = 0;
    int scale = 0;
    std::uint64_t center = 0;
    int frequency = 1;

    bool operator==(const WaveletIndex&) const = default;
};

/// Discretisation of K_N at resolution R: cells are the balls of radius p^(-R),
/// ordered by vertex, then lexicographically by center digits (a_N, ..., a_{R-1}).
/// Wavelets are ordered by vertex, scale, center (same order) and frequency.
struct Layout {
    int prime = 2;
    int level = 0;
    int vertices = 0;
    int resolution = 0;

    static Layout make(const Embedding& embedding, int resolution);

    std::int64_t cells_per_vertex() const { return power(resolution - level); }
    std::int64_t cell_count() const { return vertices * cells_per_vertex(); }
    std::int64_t wavelets_per_vertex() const { return cells_per_vertex() - 1; }
    std::int64_t wavelet_count() const { return vertices * wavelets_per_vertex(); }
    /// p^k.
    std::int64_t power(int k) const;
    /// Haar volume of one cell, p^(-R).
    double cell_volume() const;

    /// Integer center (< p^R) of a cell.
    std::uint64_t cell_center(std::int64_t cell) const;
    /// Cell containing the integer residue x mod p^R.
    std::int64_t cell_of(std::uint64_t residue) const;
    /// Integer center of the scale-r ancestor with lexicographic index `lex` in `vertex`.
    std::uint64_t center_value(int vertex, int r, std::int64_t lex) const;
    std::int64_t center_lex(std::uint64_t center, int r) const;

    std::int64_t wavelet_position(const WaveletIndex& w) const;
    WaveletIndex wavelet_at(std::int64_t position) const;
    /// Digits a_N, ..., a_{r-1} of a wavelet center.
    std::vector<int> center_digits(const WaveletIndex& w) const;

    bool operator==(const Layout&) const = default;
};

/// Element of the resolution-R subspace of L^2(K_N): a value per vertex ball
/// (the X_N component, stored as plain ball values) plus Kozyrev coefficients.
class L2Function {
public:
    explicit L2Function(const Layout& layout);

    static L2Function indicator(const Layout& layout, int vertex);
    static L2Function constant(const Layout& layout, Complex value);
    static L2Function from_vertex_values(const Layout& layout, const Eigen::VectorXcd& values);
    static L2Function wavelet(const Layout& layout, const WaveletIndex& w);

    const Layout& layout() const noexcept { return layout_; }
    Eigen::VectorXcd& vertex_values() noexcept { return vertex_; }
    const Eigen::VectorXcd& vertex_values() const noexcept { return vertex_; }
    Eigen::VectorXcd& wavelet_coeffs() noexcept { return coeffs_; }
    const Eigen::VectorXcd& wavelet_coeffs() const noexcept { return coeffs_; }

    Complex& coeff(const WaveletIndex& w) { return coeffs_(layout_.wavelet_position(w)); }
    Complex coeff(const WaveletIndex& w) const { return coeffs_(layout_.wavelet_position(w)); }

    /// Same function at a finer resolution (new scales carry zero coefficients).
    L2Function lifted(int resolution) const;

    L2Function operator+(const L2Function& other) const;
    L2Function operator-(const L2Function& other) const;
    L2Function operator*(Complex scale) const;

private:
    Layout layout_;
    Eigen::VectorXcd vertex_;
    Eigen::VectorXcd coeffs_;
};

/// Piecewise-constant view: one value per cell of radius p^(-R).
struct CellVector {
    Layout layout;
    Eigen::VectorXcd values;
};

Complex wavelet_eval(const Layout& layout, const WaveletIndex& w, const PAdic& x);
/// Value of the wavelet on a cell (constant there since scale < R).
Complex wavelet_on_cell(const Layout& layout, const WaveletIndex& w, std::int64_t cell);

/// Haar inner product <f, g> = int f conj(g) dx; inputs at different R are lifted.
Complex inner_product(const L2Function& f, const L2Function& g);
double norm(const L2Function& f);
Complex integral(const L2Function& f);

CellVector to_cells(const L2Function& f);
L2Function from_cells(const CellVector& c);

/// Cell-quadrature inner product p^(-R) sum f conj(g).
Complex cell_inner_product(const CellVector& f, const CellVector& g);

/// Point evaluation; throws ValidationError when x lies outside K_N.
Complex evaluate(const L2Function& f, const Embedding& embedding, const PAdic& x);

/// Orthogonal projection onto X_N (drops the wavelet part).
L2Function project_vertex(const L2Function& f);

/// CSV rows: kind,I,r,center_digits,j,re,im (center digits joined by ':').
void write_csv(std::ostream& out, const L2Function& f);
L2Function read_csv(std::istream& in, const Layout& layout);

}  // namespace ultraheat
