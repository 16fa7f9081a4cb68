#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "ultraheat/padic.hpp"
#include "ultraheat/rng.hpp"
#include "ultraheat/timegraph.hpp"

namespace fixtures {

using ultraheat::Embedding;
using ultraheat::Expr;
using ultraheat::TimeGraph;
using ultraheat::WeightSpec;

inline TimeGraph graph(int n, int p, const std::vector<std::pair<std::pair<int, int>, std::string>>& edges,
                       int precision = ultraheat::kDefaultPadicPrecision) {
    std::vector<WeightSpec> ws;
    for (const auto& [ij, src] : edges) ws.push_back(WeightSpec{ij.first, ij.second, Expr::parse(src)});
    return TimeGraph(ultraheat::vertex_embedding(n, p, std::nullopt, precision), std::move(ws));
}

// Two vertices, p = 2, N = 1, unit weight.
inline TimeGraph k2() { return graph(2, 2, {{{0, 1}, "1"}}); }

// Two vertices with the shared time factor 1 + t/2.
inline TimeGraph p2t() { return graph(2, 2, {{{0, 1}, "1 + t/2"}}); }

// Complete graph on three vertices, p = 2, N = 2, unit weights.
inline TimeGraph k3() { return graph(3, 2, {{{0, 1}, "1"}, {{0, 2}, "1"}, {{1, 2}, "1"}}); }

// Three-vertex path whose second edge switches on linearly.
inline TimeGraph path3_noncommuting() { return graph(3, 2, {{{0, 1}, "1"}, {{1, 2}, "t"}}); }

// Random graph on n vertices with weights a + b t + c t^2, a, b, c >= 0.
inline TimeGraph random_polynomial_graph(ultraheat::RngStream& rng, int n, int p) {
    std::vector<std::pair<std::pair<int, int>, std::string>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.uniform() < 0.3) continue;
            char buf[160];
            std::snprintf(buf, sizeof buf, "%.6f + %.6f*t + %.6f*t^2", rng.uniform() * 2.0, rng.uniform() * 2.0,
                          rng.uniform() * 2.0);
            edges.push_back({{i, j}, buf});
        }
    }
    return graph(n, p, edges);
}

inline constexpr double kLn2 = 0.69314718055994530942;

}  // namespace fixtures
