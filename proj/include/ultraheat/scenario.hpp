#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ultraheat/boundary.hpp"
#include "ultraheat/evolution.hpp"
#include "ultraheat/l2space.hpp"
#include "ultraheat/timegraph.hpp"

namespace ultraheat {

struct InitialCondition {
    enum class Kind { ball_indicator, vertex_values, wavelet, cells };
    Kind kind = Kind::ball_indicator;
    int vertex = 0;
    std::vector<double> values;  // vertex_values or cells
    int scale = 0;               // wavelet r
    std::vector<int> center_digits;
    int frequency = 1;
};

struct StochasticSettings {
    std::size_t paths = 100000;
    std::uint64_t seed = 0;
    std::string start = "0";
};

/// Validated scenario document. Every expression is parsed and the embedding
/// built; construction throws ValidationError (or ParseError) naming the field.
struct Scenario {
    int prime = 2;
    int vertices = 1;
    std::optional<int> level;
    int padic_precision = kDefaultPadicPrecision;
    int resolution = 0;  // defaults to N + 3
    double window_s = 0.0;
    double window_t = 1.0;
    QuadratureConfig quadrature;
    QuotientConfig quotient;
    InitialCondition initial;
    StochasticSettings stochastic;
    std::vector<std::string> region;

    Embedding embedding;
    std::vector<WeightSpec> weights;

    TimeGraph graph() const { return TimeGraph(embedding, weights); }
    Layout layout() const { return Layout::make(embedding, resolution); }
    L2Function initial_function() const;
    Region region_set() const;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

/// Point named by "vertex[:digit]...": the center of that ball, digits above it zero.
PAdic parse_point(const Embedding& embedding, const std::string& text);

}  // namespace ultraheat
