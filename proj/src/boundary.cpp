#include "ultraheat/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "ultraheat/errors.hpp"
#include "ultraheat/linalg.hpp"

namespace ultraheat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Only gamma_hat depends on the normalization: with Haar cells of volume p^-R the
// displayed p^N prefactor turns the quotient into the unit-ball one.
double haar_factor(const TimeGraph& g, MeasureNormalization m) {
    return m == MeasureNormalization::haar ? std::pow(static_cast<double>(g.prime()), g.level()) : 1.0;
}

/// Cell-level view of S and its surroundings at one resolution; masses use the
/// unit-ball normalization (each vertex ball has mass 1).
struct CellModel {
    Layout layout;
    Snapshot snap;
    std::vector<bool> in_s;
    std::vector<bool> in_boundary;
    double mass = 1.0;

    int vertex(std::int64_t cell) const { return static_cast<int>(cell / layout.cells_per_vertex()); }
};

CellModel make_model(const TimeGraph& g, const Region& s, double t, int resolution) {
    if (resolution < s.finest_scale()) throw ValidationError("resolution is coarser than the region's balls");
    CellModel m{Layout::make(g.embedding(), resolution), g.snapshot(t), {}, {}, 1.0};
    m.in_s = s.cell_mask(m.layout);
    m.mass = 1.0 / static_cast<double>(m.layout.cells_per_vertex());
    const std::int64_t count = m.layout.cell_count();
    m.in_boundary.assign(static_cast<std::size_t>(count), false);
    for (std::int64_t y = 0; y < count; ++y) {
        if (m.in_s[static_cast<std::size_t>(y)]) continue;
        for (int i : s.vertices()) {
            if (m.snap.adjacency(i, m.vertex(y)) != 0.0) {
                m.in_boundary[static_cast<std::size_t>(y)] = true;
                break;
            }
        }
    }
    return m;
}

/// Calls visit(x, y, w) for every ordered cell pair of the numerator domain, with
/// w = A_IJ m^2 so the numerator is sum w |f_x - f_y|^2.
template <typename Visit>
void for_each_pair(const CellModel& m, EdgeSet edges, Visit&& visit) {
    const std::int64_t count = m.layout.cell_count();
    const double w2 = m.mass * m.mass;
    for (std::int64_t x = 0; x < count; ++x) {
        if (!m.in_s[static_cast<std::size_t>(x)]) continue;
        const int i = m.vertex(x);
        for (std::int64_t y = 0; y < count; ++y) {
            const double a = m.snap.adjacency(i, m.vertex(y));
            if (a == 0.0) continue;
            const bool y_in = m.in_s[static_cast<std::size_t>(y)];
            if (y_in && edges == EdgeSet::boundary_only) continue;
            visit(x, y, a * w2);
        }
    }
}

/// min z^T Q z / z^T D z over C z = 0 with z^T D z > 0; D is positive semidefinite.
/// The kernel directions of D are minimised out through a Schur complement.
double constrained_min_quotient(const Eigen::MatrixXd& q, const Eigen::MatrixXd& d, const Eigen::MatrixXd& c) {
    const Eigen::Index dim = q.rows();
    if (dim == 0) return kInf;
    const Eigen::MatrixXd z = c.rows() > 0 ? null_space(c, static_cast<int>(dim)) : Eigen::MatrixXd::Identity(dim, dim);
    if (z.cols() == 0) return kInf;
    const Eigen::MatrixXd qz = z.transpose() * q * z;
    const Eigen::MatrixXd dz = z.transpose() * d * z;

    const SymmetricEigen de = jacobi_eigen(0.5 * (dz + dz.transpose()));
    const double dmax = de.values.size() ? de.values.maxCoeff() : 0.0;
    if (!(dmax > 0.0)) return kInf;
    std::vector<Eigen::Index> range, kernel;
    for (Eigen::Index k = 0; k < de.values.size(); ++k) (de.values(k) > 1e-10 * dmax ? range : kernel).push_back(k);

    Eigen::MatrixXd ur(z.cols(), static_cast<Eigen::Index>(range.size()));
    Eigen::VectorXd dr(static_cast<Eigen::Index>(range.size()));
    for (std::size_t k = 0; k < range.size(); ++k) {
        ur.col(static_cast<Eigen::Index>(k)) = de.vectors.col(range[k]);
        dr(static_cast<Eigen::Index>(k)) = de.values(range[k]);
    }
    Eigen::MatrixXd schur = ur.transpose() * qz * ur;
    if (!kernel.empty()) {
        Eigen::MatrixXd uk(z.cols(), static_cast<Eigen::Index>(kernel.size()));
        for (std::size_t k = 0; k < kernel.size(); ++k) uk.col(static_cast<Eigen::Index>(k)) = de.vectors.col(kernel[k]);
        const Eigen::MatrixXd qkk = uk.transpose() * qz * uk;
        const Eigen::MatrixXd qrk = ur.transpose() * qz * uk;
        const SymmetricEigen ke = jacobi_eigen(0.5 * (qkk + qkk.transpose()));
        const double kmax = std::max(1.0, ke.values.cwiseAbs().maxCoeff());
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(ke.values.size());
        for (Eigen::Index k = 0; k < inv.size(); ++k) {
            if (ke.values(k) > 1e-12 * kmax) inv(k) = 1.0 / ke.values(k);
        }
        const Eigen::MatrixXd pinv = ke.vectors * inv.asDiagonal() * ke.vectors.transpose();
        schur -= qrk * pinv * qrk.transpose();
    }
    const Eigen::VectorXd scale = dr.array().rsqrt().matrix();
    Eigen::MatrixXd h = scale.asDiagonal() * schur * scale.asDiagonal();
    h = 0.5 * (h + h.transpose());
    const double lambda = jacobi_eigen(h).values(0);
    return lambda < 0.0 && lambda > -1e-12 ? 0.0 : lambda;
}

void add_pair(Eigen::MatrixXd& q, Eigen::Index x, Eigen::Index y, double w) {
    if (x >= 0) q(x, x) += w;
    if (y >= 0) q(y, y) += w;
    if (x >= 0 && y >= 0) {
        q(x, y) -= w;
        q(y, x) -= w;
    }
}

double vonneumann_impl(const TimeGraph& g, const Region& s, double t, int resolution, const QuotientConfig& config) {
    const CellModel m = make_model(g, s, t, resolution);
    const std::int64_t count = m.layout.cell_count();
    std::vector<Eigen::Index> var(static_cast<std::size_t>(count), -1);
    std::vector<std::int64_t> boundary_cells;
    Eigen::Index dim = 0;
    for (std::int64_t x = 0; x < count; ++x) {
        if (m.in_s[static_cast<std::size_t>(x)]) var[static_cast<std::size_t>(x)] = dim++;
    }
    for (std::int64_t y = 0; y < count; ++y) {
        if (m.in_boundary[static_cast<std::size_t>(y)]) {
            var[static_cast<std::size_t>(y)] = dim++;
            boundary_cells.push_back(y);
        }
    }

    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
    for_each_pair(m, config.edge_set, [&](std::int64_t x, std::int64_t y, double w) {
        add_pair(q, var[static_cast<std::size_t>(x)], var[static_cast<std::size_t>(y)], w);
    });
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1 + static_cast<Eigen::Index>(boundary_cells.size()), dim);
    for (std::int64_t x = 0; x < count; ++x) {
        if (!m.in_s[static_cast<std::size_t>(x)]) continue;
        const Eigen::Index v = var[static_cast<std::size_t>(x)];
        d(v, v) = m.snap.degree(m.vertex(x)) * m.mass;
        c(0, v) = m.snap.degree(m.vertex(x)) * m.mass;
    }
    // Flux at a boundary cell y: sum over y' in S of A(y, y') (f_y - f_y') m = 0.
    for (std::size_t k = 0; k < boundary_cells.size(); ++k) {
        const std::int64_t y = boundary_cells[k];
        const Eigen::Index row = 1 + static_cast<Eigen::Index>(k);
        for (std::int64_t x = 0; x < count; ++x) {
            if (!m.in_s[static_cast<std::size_t>(x)]) continue;
            const double a = m.snap.adjacency(m.vertex(y), m.vertex(x));
            if (a == 0.0) continue;
            c(row, var[static_cast<std::size_t>(y)]) += a * m.mass;
            c(row, var[static_cast<std::size_t>(x)]) -= a * m.mass;
        }
    }
    const double lambda = constrained_min_quotient(q, d, c);
    return lambda;
}

}  // namespace

std::string to_string(MeasureNormalization m) { return m == MeasureNormalization::haar ? "haar" : "unit-ball"; }

std::string to_string(EdgeSet e) { return e == EdgeSet::omega_star ? "omega_star" : "boundary_only"; }

MeasureNormalization parse_normalization(const std::string& name) {
    if (name == "unit-ball") return MeasureNormalization::unit_ball;
    if (name == "haar") return MeasureNormalization::haar;
    throw ValidationError("unknown measure normalization '" + name + "' (expected unit-ball or haar)");
}

EdgeSet parse_edge_set(const std::string& name) {
    if (name == "boundary_only") return EdgeSet::boundary_only;
    if (name == "omega_star") return EdgeSet::omega_star;
    throw ValidationError("unknown quotient edge set '" + name + "' (expected boundary_only or omega_star)");
}

Region::Region(const Embedding& embedding, std::vector<Ball> balls) : balls_(std::move(balls)) {
    if (balls_.empty()) throw ValidationError("region must contain at least one ball");
    std::set<int> verts;
    finest_ = embedding.level;
    for (std::size_t a = 0; a < balls_.size(); ++a) {
        const Ball& b = balls_[a];
        if (b.radius_exponent() < embedding.level) throw ValidationError("region ball is larger than a vertex ball");
        const auto v = embedding.vertex_of(b.center());
        if (!v) throw ValidationError("region ball lies outside K_N");
        verts.insert(*v);
        finest_ = std::max(finest_, b.radius_exponent());
        for (std::size_t c = 0; c < a; ++c) {
            if (!b.disjoint(balls_[c])) throw ValidationError("region balls overlap");
        }
    }
    vertices_.assign(verts.begin(), verts.end());
}

std::vector<bool> Region::cell_mask(const Layout& layout) const {
    if (layout.resolution < finest_) throw ValidationError("layout is coarser than the region's balls");
    std::vector<bool> mask(static_cast<std::size_t>(layout.cell_count()), false);
    for (std::int64_t cell = 0; cell < layout.cell_count(); ++cell) {
        const std::uint64_t center = layout.cell_center(cell);
        for (const Ball& b : balls_) {
            const std::uint64_t modulus = static_cast<std::uint64_t>(layout.power(b.radius_exponent()));
            if (center % modulus == b.center().residue(b.radius_exponent())) {
                mask[static_cast<std::size_t>(cell)] = true;
                break;
            }
        }
    }
    return mask;
}

Region Region::whole_balls(const Embedding& embedding, const std::vector<int>& vertices) {
    std::vector<Ball> balls;
    for (int v : vertices) balls.push_back(embedding.ball(v));
    return Region(embedding, std::move(balls));
}

Region parse_region(const Embedding& embedding, const std::vector<std::string>& items) {
    std::vector<Ball> balls;
    for (const std::string& item : items) {
        std::vector<int> parts;
        std::stringstream ss(item);
        std::string token;
        while (std::getline(ss, token, ':')) {
            std::size_t used = 0;
            int value = -1;
            try {
                value = std::stoi(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (token.empty() || used != token.size() || value < 0) {
                throw ValidationError("region item '" + item + "' is not of the form vertex[:digit]...");
            }
            parts.push_back(value);
        }
        if (parts.empty()) throw ValidationError("empty region item");
        const int vertex = parts.front();
        if (vertex >= embedding.vertices) throw ValidationError("region vertex " + std::to_string(vertex) + " out of range");
        std::vector<int> digits(embedding.level, 0);
        for (int k = 0; k < embedding.level; ++k) digits[static_cast<std::size_t>(k)] = embedding.centers[static_cast<std::size_t>(vertex)].digit(k);
        for (std::size_t k = 1; k < parts.size(); ++k) {
            if (parts[k] >= embedding.prime) throw ValidationError("region digit out of range in '" + item + "'");
            digits.push_back(parts[k]);
        }
        const int r = embedding.level + static_cast<int>(parts.size()) - 1;
        balls.emplace_back(PAdic::from_digits(embedding.prime, 0, digits, embedding.precision), r);
    }
    return Region(embedding, std::move(balls));
}

BoundaryData boundary_data(const TimeGraph& g, const Region& s, double t, int resolution) {
    const CellModel m = make_model(g, s, t, resolution);
    BoundaryData out;
    out.t = t;
    out.resolution = resolution;
    out.in_region = m.in_s;
    for (std::int64_t y = 0; y < m.layout.cell_count(); ++y) {
        if (m.in_boundary[static_cast<std::size_t>(y)]) out.vertex_boundary.push_back(y);
    }
    std::vector<bool> leaves(static_cast<std::size_t>(g.vertices()), false);
    std::vector<bool> meets(static_cast<std::size_t>(g.vertices()), false);
    for (std::int64_t x = 0; x < m.layout.cell_count(); ++x) {
        (m.in_s[static_cast<std::size_t>(x)] ? meets : leaves)[static_cast<std::size_t>(m.vertex(x))] = true;
    }
    for (int i : s.vertices()) {
        for (int j = 0; j < g.vertices(); ++j) {
            if (m.snap.adjacency(i, j) == 0.0) continue;
            if (leaves[static_cast<std::size_t>(j)]) out.edge_boundary.emplace_back(i, j);
        }
    }
    for (int i : s.vertices()) {
        for (int j : s.vertices()) {
            if (m.snap.adjacency(i, j) != 0.0) out.omega_star.emplace_back(i, j);
        }
    }
    out.omega_star.insert(out.omega_star.end(), out.edge_boundary.begin(), out.edge_boundary.end());
    std::sort(out.omega_star.begin(), out.omega_star.end());
    return out;
}

BoundaryData boundary_data(const TimeGraph& g, const Region& s, double t) {
    return boundary_data(g, s, t, s.finest_scale());
}

double gamma_hat(const TimeGraph& g, const Region& s, double t, MeasureNormalization normalization) {
    const Snapshot snap = g.snapshot(t);
    std::vector<bool> member(static_cast<std::size_t>(g.vertices()), false);
    for (int v : s.vertices()) member[static_cast<std::size_t>(v)] = true;
    double mass = 0.0;
    const double p = g.prime();
    for (const Ball& b : s.balls()) {
        const int v = *g.embedding().vertex_of(b.center());
        mass += snap.degree(v) * std::pow(p, g.level() - b.radius_exponent());
    }
    if (!(mass > 0.0)) return kInf;
    double best = kInf;
    for (int i : s.vertices()) {
        double deg = 0.0;
        for (int j = 0; j < g.vertices(); ++j) {
            if (!member[static_cast<std::size_t>(j)]) deg += snap.adjacency(i, j);
        }
        best = std::min(best, deg / mass);
    }
    return best * haar_factor(g, normalization);
}

Eigen::VectorXd graph_dirichlet_spectrum(const TimeGraph& g, const Region& s, double t) {
    const std::vector<int>& vs = s.vertices();
    if (static_cast<int>(vs.size()) == g.vertices()) {
        throw ValidationError("graph Dirichlet eigenvalue needs V(S) to be a proper subset of V");
    }
    const Snapshot snap = g.snapshot(t);
    const auto k = static_cast<Eigen::Index>(vs.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        const double ga = snap.degree(vs[static_cast<std::size_t>(a)]);
        if (!(ga > 0.0)) throw ValidationError("vertex " + std::to_string(vs[static_cast<std::size_t>(a)]) + " has zero degree");
        for (Eigen::Index b = 0; b < k; ++b) {
            const double gb = snap.degree(vs[static_cast<std::size_t>(b)]);
            const double a_ab = snap.adjacency(vs[static_cast<std::size_t>(a)], vs[static_cast<std::size_t>(b)]);
            sub(a, b) = (a == b ? 1.0 : 0.0) - a_ab / std::sqrt(ga * gb);
        }
    }
    return jacobi_eigen(sub).values;
}

double graph_dirichlet_eigenvalue(const TimeGraph& g, const Region& s, double t) {
    return graph_dirichlet_spectrum(g, s, t)(0);
}

RayleighValue rayleigh_quotient(const TimeGraph& g, const Region& s, double t, const L2Function& f,
                                const QuotientConfig& config) {
    const int resolution = std::max(f.layout().resolution, s.finest_scale());
    const CellModel m = make_model(g, s, t, resolution);
    const CellVector cells = to_cells(f.lifted(resolution));
    const Eigen::VectorXcd& v = cells.values;
    double numerator = 0.0;
    for_each_pair(m, config.edge_set, [&](std::int64_t x, std::int64_t y, double w) {
        numerator += w * std::norm(v(x) - v(y));
    });
    double denominator = 0.0;
    double total = 0.0;
    for (std::int64_t x = 0; x < m.layout.cell_count(); ++x) {
        const double gx = m.snap.degree(m.vertex(x));
        total += std::max(gx, 1.0) * m.mass * std::norm(v(x));
        if (m.in_s[static_cast<std::size_t>(x)]) denominator += gx * m.mass * std::norm(v(x));
    }
    RayleighValue out;
    if (!(denominator > 1e-12 * total)) {
        out.value = kInf;
        out.zero_denominator = true;
        return out;
    }
    out.value = numerator / denominator;
    return out;
}

double dirichlet_eigenvalue(const TimeGraph& g, const Region& s, double t, int resolution,
                            const QuotientConfig& config) {
    const CellModel m = make_model(g, s, t, resolution);
    if (std::none_of(m.in_boundary.begin(), m.in_boundary.end(), [](bool b) { return b; })) {
        throw ValidationError("Dirichlet eigenvalue needs a non-empty vertex boundary");
    }
    const std::int64_t count = m.layout.cell_count();
    std::vector<Eigen::Index> var(static_cast<std::size_t>(count), -1);
    Eigen::Index dim = 0;
    for (std::int64_t x = 0; x < count; ++x) {
        if (m.in_s[static_cast<std::size_t>(x)]) var[static_cast<std::size_t>(x)] = dim++;
    }
    // Boundary cells keep var = -1: they are pinned to zero.
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
    for_each_pair(m, config.edge_set, [&](std::int64_t x, std::int64_t y, double w) {
        add_pair(q, var[static_cast<std::size_t>(x)], var[static_cast<std::size_t>(y)], w);
    });
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim, dim);
    for (std::int64_t x = 0; x < count; ++x) {
        const Eigen::Index v = var[static_cast<std::size_t>(x)];
        if (v >= 0) d(v, v) = m.snap.degree(m.vertex(x)) * m.mass;
    }
    if (!(d.diagonal().maxCoeff() > 0.0)) throw ValidationError("Dirichlet quotient has a zero denominator on S");
    return constrained_min_quotient(q, d, Eigen::MatrixXd(0, dim));
}

double vonneumann_eigenvalue(const TimeGraph& g, const Region& s, double t, int resolution,
                             const QuotientConfig& config) {
    if (boundary_data(g, s, t, resolution).boundary_empty()) {
        throw ValidationError("von Neumann eigenvalue needs a non-empty vertex boundary");
    }
    return vonneumann_impl(g, s, t, resolution, config);
}

double graph_vonneumann_eigenvalue(const TimeGraph& g, const Region& s, double t, const QuotientConfig& config) {
    return vonneumann_impl(g, Region::whole_balls(g.embedding(), s.vertices()), t, g.level(), config);
}

BoundReport bound_report(const TimeGraph& g, const Region& s, double t, int resolution, const QuotientConfig& config) {
    BoundReport r;
    r.t = t;
    r.resolution = resolution;
    r.config = config;
    r.dirichlet = dirichlet_eigenvalue(g, s, t, resolution, config);
    r.vonneumann = vonneumann_eigenvalue(g, s, t, resolution, config);
    try {
        r.graph_dirichlet = graph_dirichlet_eigenvalue(g, s, t);
    } catch (const ValidationError&) {
        r.graph_dirichlet.reset();
    }
    r.graph_vonneumann = graph_vonneumann_eigenvalue(g, s, t, config);
    r.gamma_hat = gamma_hat(g, s, t, config.normalization);

    const auto le = [](double a, double b) { return a <= b + kBoundTolerance; };
    const auto lt = [](double a, double b) { return std::isinf(b) ? !std::isinf(a) : a < b - kBoundTolerance; };
    if (r.graph_dirichlet) {
        r.dirichlet_le_graph = le(r.dirichlet, *r.graph_dirichlet);
        r.graph_min_le_one = le(std::min(*r.graph_dirichlet, r.gamma_hat), 1.0);
        r.gamma_hat_lt_graph_dirichlet = lt(r.gamma_hat, *r.graph_dirichlet);
    }
    r.dirichlet_le_gamma_hat = le(r.dirichlet, r.gamma_hat);
    r.vonneumann_le_graph = le(r.vonneumann, r.graph_vonneumann);
    r.vonneumann_le_gamma_hat = le(r.vonneumann, r.gamma_hat);
    r.vonneumann_lt_graph = lt(r.vonneumann, r.graph_vonneumann);
    return r;
}

}  // namespace ultraheat
