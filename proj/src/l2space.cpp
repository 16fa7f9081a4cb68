#include "ultraheat/l2space.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ultraheat/errors.hpp"

namespace ultraheat {

namespace {

constexpr std::int64_t kMaxCells = std::int64_t{1} << 22;

double half_power(int p, int r) { return std::pow(static_cast<double>(p), 0.5 * r); }

/// chi_p(j x / p^(r+1)) for an integer x; only x mod p^(r+1) matters.
Complex character_at(std::uint64_t x, int j, std::uint64_t modulus) {
    const std::uint64_t num = (static_cast<std::uint64_t>(j) * (x % modulus)) % modulus;
    return unit_circle(Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(modulus)));
}

void require_same_space(const Layout& a, const Layout& b) {
    if (a.prime != b.prime || a.level != b.level || a.vertices != b.vertices) {
        throw ValidationError("functions live on different spaces K_N");
    }
}

}  // namespace

Layout Layout::make(const Embedding& embedding, int resolution) {
    if (resolution < embedding.level) throw ValidationError("resolution must be >= level N");
    Layout l;
    l.prime = embedding.prime;
    l.level = embedding.level;
    l.vertices = embedding.vertices;
    l.resolution = resolution;
    // Phases use j * x < p^(R+1) in 64-bit arithmetic.
    double bits = (resolution + 1) * std::log2(static_cast<double>(l.prime));
    if (bits > 62.0) throw ValidationError("resolution too fine for 64-bit cell arithmetic");
    if (static_cast<double>(l.vertices) * std::pow(l.prime, resolution - l.level) > static_cast<double>(kMaxCells)) {
        throw ValidationError("resolution yields too many cells");
    }
    return l;
}

std::int64_t Layout::power(int k) const {
    std::int64_t out = 1;
    for (int i = 0; i < k; ++i) out *= prime;
    return out;
}

double Layout::cell_volume() const { return std::pow(static_cast<double>(prime), -resolution); }

std::uint64_t Layout::center_value(int vertex, int r, std::int64_t lex) const {
    std::uint64_t value = static_cast<std::uint64_t>(vertex);
    for (int k = r - 1; k >= level; --k) {
        value += static_cast<std::uint64_t>(lex % prime) * static_cast<std::uint64_t>(power(k));
        lex /= prime;
    }
    return value;
}

std::int64_t Layout::center_lex(std::uint64_t center, int r) const {
    // a_N is the most significant lexicographic digit, a_{r-1} the least.
    std::int64_t lex = 0;
    for (int k = level; k < r; ++k) {
        const std::uint64_t digit = (center / static_cast<std::uint64_t>(power(k))) % static_cast<std::uint64_t>(prime);
        lex = lex * prime + static_cast<std::int64_t>(digit);
    }
    return lex;
}

std::uint64_t Layout::cell_center(std::int64_t cell) const {
    const std::int64_t cpv = cells_per_vertex();
    return center_value(static_cast<int>(cell / cpv), resolution, cell % cpv);
}

std::int64_t Layout::cell_of(std::uint64_t residue) const {
    const auto vertex = static_cast<std::int64_t>(residue % static_cast<std::uint64_t>(power(level)));
    if (vertex >= vertices) throw ValidationError("point lies outside K_N");
    return vertex * cells_per_vertex() + center_lex(residue, resolution);
}

std::int64_t Layout::wavelet_position(const WaveletIndex& w) const {
    if (w.vertex < 0 || w.vertex >= vertices) throw ValidationError("wavelet vertex out of range");
    if (w.scale < level || w.scale >= resolution) throw ValidationError("wavelet scale outside [N, R)");
    if (w.frequency < 1 || w.frequency >= prime) throw ValidationError("wavelet frequency outside [1, p-1]");
    if (w.center % static_cast<std::uint64_t>(power(level)) != static_cast<std::uint64_t>(w.vertex) ||
        w.center >= static_cast<std::uint64_t>(power(w.scale))) {
        throw ValidationError("wavelet center is not a sub-ball center of its vertex");
    }
    const std::int64_t lex = center_lex(w.center, w.scale);
    return w.vertex * wavelets_per_vertex() + (power(w.scale - level) - 1) + lex * (prime - 1) + (w.frequency - 1);
}

WaveletIndex Layout::wavelet_at(std::int64_t position) const {
    if (position < 0 || position >= wavelet_count()) throw ValidationError("wavelet position out of range");
    WaveletIndex w;
    w.vertex = static_cast<int>(position / wavelets_per_vertex());
    std::int64_t rem = position % wavelets_per_vertex();
    int r = level;
    while (power(r + 1 - level) - 1 <= rem) ++r;
    rem -= power(r - level) - 1;
    w.scale = r;
    w.center = center_value(w.vertex, r, rem / (prime - 1));
    w.frequency = static_cast<int>(rem % (prime - 1)) + 1;
    return w;
}

std::vector<int> Layout::center_digits(const WaveletIndex& w) const {
    std::vector<int> digits;
    std::uint64_t rest = w.center / static_cast<std::uint64_t>(power(level));
    for (int k = level; k < w.scale; ++k) {
        digits.push_back(static_cast<int>(rest % static_cast<std::uint64_t>(prime)));
        rest /= static_cast<std::uint64_t>(prime);
    }
    return digits;
}

L2Function::L2Function(const Layout& layout)
    : layout_(layout),
      vertex_(Eigen::VectorXcd::Zero(layout.vertices)),
      coeffs_(Eigen::VectorXcd::Zero(layout.wavelet_count())) {}

L2Function L2Function::indicator(const Layout& layout, int vertex) {
    L2Function f(layout);
    f.vertex_(vertex) = 1.0;
    return f;
}

L2Function L2Function::constant(const Layout& layout, Complex value) {
    L2Function f(layout);
    f.vertex_.setConstant(value);
    return f;
}

L2Function L2Function::from_vertex_values(const Layout& layout, const Eigen::VectorXcd& values) {
    if (values.size() != layout.vertices) throw ValidationError("vertex value count must equal n");
    L2Function f(layout);
    f.vertex_ = values;
    return f;
}

L2Function L2Function::wavelet(const Layout& layout, const WaveletIndex& w) {
    L2Function f(layout);
    f.coeff(w) = 1.0;
    return f;
}

L2Function L2Function::lifted(int resolution) const {
    if (resolution < layout_.resolution) throw ValidationError("cannot lift to a coarser resolution");
    if (resolution == layout_.resolution) return *this;
    Layout finer = layout_;
    finer.resolution = resolution;
    L2Function out(finer);
    out.vertex_ = vertex_;
    for (std::int64_t k = 0; k < coeffs_.size(); ++k) {
        if (coeffs_(k) != Complex{}) out.coeff(layout_.wavelet_at(k)) = coeffs_(k);
    }
    return out;
}

L2Function L2Function::operator+(const L2Function& other) const {
    if (!(layout_ == other.layout_)) throw ValidationError("layout mismatch");
    L2Function out = *this;
    out.vertex_ += other.vertex_;
    out.coeffs_ += other.coeffs_;
    return out;
}

L2Function L2Function::operator-(const L2Function& other) const { return *this + other * Complex(-1.0); }

L2Function L2Function::operator*(Complex scale) const {
    L2Function out = *this;
    out.vertex_ *= scale;
    out.coeffs_ *= scale;
    return out;
}

Complex wavelet_eval(const Layout& layout, const WaveletIndex& w, const PAdic& x) {
    if (x.prime() != layout.prime) throw ValidationError("p-adic prime mismatch");
    const PAdic center = PAdic::from_integer(static_cast<std::int64_t>(w.center), layout.prime,
                                             std::max(x.precision(), w.scale + 1));
    if (!Ball(center, w.scale).contains(x)) return {0.0, 0.0};
    const PAdic arg = x.scaled(w.frequency).shifted(-(w.scale + 1));
    return half_power(layout.prime, w.scale) * additive_character(arg);
}

Complex wavelet_on_cell(const Layout& layout, const WaveletIndex& w, std::int64_t cell) {
    const std::uint64_t x = layout.cell_center(cell);
    const auto support = static_cast<std::uint64_t>(layout.power(w.scale));
    if (x % support != w.center) return {0.0, 0.0};
    const auto modulus = static_cast<std::uint64_t>(layout.power(w.scale + 1));
    return half_power(layout.prime, w.scale) * character_at(x, w.frequency, modulus);
}

Complex inner_product(const L2Function& f, const L2Function& g) {
    require_same_space(f.layout(), g.layout());
    if (f.layout().resolution != g.layout().resolution) {
        const int r = std::max(f.layout().resolution, g.layout().resolution);
        return inner_product(f.lifted(r), g.lifted(r));
    }
    const double ball = std::pow(static_cast<double>(f.layout().prime), -f.layout().level);
    return ball * (g.vertex_values().adjoint() * f.vertex_values())(0) +
           (g.wavelet_coeffs().adjoint() * f.wavelet_coeffs())(0);
}

double norm(const L2Function& f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }

Complex integral(const L2Function& f) {
    return std::pow(static_cast<double>(f.layout().prime), -f.layout().level) * f.vertex_values().sum();
}

CellVector to_cells(const L2Function& f) {
    const Layout& l = f.layout();
    CellVector out{l, Eigen::VectorXcd::Zero(l.cell_count())};
    const std::int64_t cpv = l.cells_per_vertex();
    for (std::int64_t cell = 0; cell < l.cell_count(); ++cell) {
        const int vertex = static_cast<int>(cell / cpv);
        const std::int64_t lex = cell % cpv;
        const std::uint64_t x = l.cell_center(cell);
        Complex value = f.vertex_values()(vertex);
        for (int r = l.level; r < l.resolution; ++r) {
            const std::int64_t ancestor = lex / l.power(l.resolution - r);
            const std::int64_t base = vertex * l.wavelets_per_vertex() + (l.power(r - l.level) - 1) +
                                      ancestor * (l.prime - 1);
            const auto modulus = static_cast<std::uint64_t>(l.power(r + 1));
            const double amp = half_power(l.prime, r);
            for (int j = 1; j < l.prime; ++j) {
                const Complex c = f.wavelet_coeffs()(base + j - 1);
                if (c != Complex{}) value += c * amp * character_at(x, j, modulus);
            }
        }
        out.values(cell) = value;
    }
    return out;
}

L2Function from_cells(const CellVector& c) {
    const Layout& l = c.layout;
    if (c.values.size() != l.cell_count()) throw ValidationError("cell vector length does not match layout");
    L2Function f(l);
    const std::int64_t cpv = l.cells_per_vertex();
    for (int vertex = 0; vertex < l.vertices; ++vertex) {
        // means[r - N] holds the ball averages at scale r, lexicographic order.
        std::vector<Eigen::VectorXcd> means(static_cast<std::size_t>(l.resolution - l.level + 1));
        means.back() = c.values.segment(vertex * cpv, cpv);
        for (int r = l.resolution - 1; r >= l.level; --r) {
            const Eigen::VectorXcd& child = means[static_cast<std::size_t>(r + 1 - l.level)];
            Eigen::VectorXcd& parent = means[static_cast<std::size_t>(r - l.level)];
            parent = Eigen::VectorXcd::Zero(l.power(r - l.level));
            for (std::int64_t lex = 0; lex < parent.size(); ++lex) {
                parent(lex) = child.segment(lex * l.prime, l.prime).mean();
            }
        }
        f.vertex_values()(vertex) = means.front()(0);
        // Size-p DFT of child averages at each scale.
        for (int r = l.level; r < l.resolution; ++r) {
            const Eigen::VectorXcd& child = means[static_cast<std::size_t>(r + 1 - l.level)];
            const auto modulus = static_cast<std::uint64_t>(l.power(r + 1));
            const double weight = half_power(l.prime, r) * std::pow(static_cast<double>(l.prime), -(r + 1));
            for (std::int64_t lex = 0; lex < l.power(r - l.level); ++lex) {
                const std::uint64_t a = l.center_value(vertex, r, lex);
                const std::int64_t base = vertex * l.wavelets_per_vertex() + (l.power(r - l.level) - 1) +
                                          lex * (l.prime - 1);
                for (int j = 1; j < l.prime; ++j) {
                    Complex acc{};
                    for (int d = 0; d < l.prime; ++d) {
                        const std::uint64_t x = a + static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(l.power(r));
                        acc += child(lex * l.prime + d) * std::conj(character_at(x, j, modulus));
                    }
                    f.wavelet_coeffs()(base + j - 1) = weight * acc;
                }
            }
        }
    }
    return f;
}

Complex cell_inner_product(const CellVector& f, const CellVector& g) {
    if (!(f.layout == g.layout)) throw ValidationError("layout mismatch");
    return f.layout.cell_volume() * (g.values.adjoint() * f.values)(0);
}

Complex evaluate(const L2Function& f, const Embedding& embedding, const PAdic& x) {
    const auto vertex = embedding.vertex_of(x);
    if (!vertex) throw ValidationError("evaluation point lies outside K_N");
    const Layout& l = f.layout();
    Complex value = f.vertex_values()(*vertex);
    for (int r = l.level; r < l.resolution; ++r) {
        WaveletIndex w{*vertex, r, x.residue(r), 1};
        for (int j = 1; j < l.prime; ++j) {
            w.frequency = j;
            const Complex c = f.coeff(w);
            if (c != Complex{}) value += c * wavelet_eval(l, w, x);
        }
    }
    return value;
}

L2Function project_vertex(const L2Function& f) {
    L2Function out(f.layout());
    out.vertex_values() = f.vertex_values();
    return out;
}

void write_csv(std::ostream& out, const L2Function& f) {
    const Layout& l = f.layout();
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "kind,I,r,center_digits,j,re,im\n";
    for (int v = 0; v < l.vertices; ++v) {
        const Complex c = f.vertex_values()(v);
        out << "vertex," << v << "," << l.level << ",,0," << num(c.real()) << "," << num(c.imag()) << "\n";
    }
    for (std::int64_t k = 0; k < l.wavelet_count(); ++k) {
        const WaveletIndex w = l.wavelet_at(k);
        const Complex c = f.wavelet_coeffs()(k);
        std::string digits;
        for (int d : l.center_digits(w)) {
            if (!digits.empty()) digits += ':';
            digits += std::to_string(d);
        }
        out << "wavelet," << w.vertex << "," << w.scale << "," << digits << "," << w.frequency << ","
            << num(c.real()) << "," << num(c.imag()) << "\n";
    }
}

L2Function read_csv(std::istream& in, const Layout& layout) {
    L2Function f(layout);
    std::string line;
    if (!std::getline(in, line) || line.rfind("kind,", 0) != 0) throw ValidationError("missing L2Function CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        if (cols.size() == 6) cols.emplace_back();
        if (cols.size() != 7) throw ValidationError("malformed L2Function CSV row: " + line);
        const Complex value(std::stod(cols[5]), std::stod(cols[6]));
        const int vertex = std::stoi(cols[1]);
        if (cols[0] == "vertex") {
            if (vertex < 0 || vertex >= layout.vertices) throw ValidationError("vertex out of range in CSV");
            f.vertex_values()(vertex) = value;
        } else if (cols[0] == "wavelet") {
            WaveletIndex w{vertex, std::stoi(cols[2]), static_cast<std::uint64_t>(vertex), std::stoi(cols[4])};
            std::stringstream ds(cols[3]);
            std::string d;
            int k = layout.level;
            while (std::getline(ds, d, ':')) {
                w.center += static_cast<std::uint64_t>(std::stoi(d)) * static_cast<std::uint64_t>(layout.power(k++));
            }
            f.coeff(w) = value;
        } else {
            throw ValidationError("unknown row kind in CSV: " + cols[0]);
        }
    }
    return f;
}

}  // namespace ultraheat
