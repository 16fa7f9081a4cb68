#include "ultraheat/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ultraheat/errors.hpp"

namespace ultraheat {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError(path + ": " + what);
}

void only_fields(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    std::set<std::string> names;
    for (const char* a : allowed) names.insert(a);
    for (const auto& item : obj.items()) {
        if (!names.count(item.key())) fail(path + "." + item.key(), "unknown field");
    }
}

const json* field(const json& obj, const char* name) {
    const auto it = obj.find(name);
    return it == obj.end() ? nullptr : &*it;
}

long long as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long long>();
}

int as_int(const json& v, const std::string& path, long long lo, long long hi) {
    const long long x = as_integer(v, path);
    if (x < lo || x > hi) fail(path, "value " + std::to_string(x) + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

std::vector<double> as_numbers(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(as_number(v[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

InitialCondition parse_initial(const json& v) {
    const std::string path = "initial";
    only_fields(v, path, {"ball_indicator", "vertex_values", "wavelet", "cells"});
    if (v.size() != 1) fail(path, "expected exactly one of ball_indicator, vertex_values, wavelet, cells");
    InitialCondition ic;
    if (const json* b = field(v, "ball_indicator")) {
        ic.kind = InitialCondition::Kind::ball_indicator;
        ic.vertex = as_int(*b, path + ".ball_indicator", 0, 1 << 30);
    } else if (const json* vv = field(v, "vertex_values")) {
        ic.kind = InitialCondition::Kind::vertex_values;
        ic.values = as_numbers(*vv, path + ".vertex_values");
    } else if (const json* c = field(v, "cells")) {
        ic.kind = InitialCondition::Kind::cells;
        ic.values = as_numbers(*c, path + ".cells");
    } else {
        const json& w = v.at("wavelet");
        const std::string wp = path + ".wavelet";
        only_fields(w, wp, {"I", "r", "center_digits", "j"});
        for (const char* name : {"I", "r", "j"}) {
            if (!field(w, name)) fail(wp + "." + name, "missing field");
        }
        ic.kind = InitialCondition::Kind::wavelet;
        ic.vertex = as_int(w.at("I"), wp + ".I", 0, 1 << 30);
        ic.scale = as_int(w.at("r"), wp + ".r", 0, 64);
        ic.frequency = as_int(w.at("j"), wp + ".j", 1, 1 << 30);
        if (const json* d = field(w, "center_digits")) {
            if (!d->is_array()) fail(wp + ".center_digits", "expected an array of digits");
            for (std::size_t k = 0; k < d->size(); ++k) {
                ic.center_digits.push_back(as_int((*d)[k], wp + ".center_digits[" + std::to_string(k) + "]", 0, 1 << 30));
            }
        }
    }
    return ic;
}

}  // namespace

L2Function Scenario::initial_function() const {
    const Layout l = layout();
    switch (initial.kind) {
        case InitialCondition::Kind::ball_indicator:
            if (initial.vertex >= vertices) fail("initial.ball_indicator", "vertex out of range");
            return L2Function::indicator(l, initial.vertex);
        case InitialCondition::Kind::vertex_values: {
            if (static_cast<int>(initial.values.size()) != vertices) {
                fail("initial.vertex_values", "expected " + std::to_string(vertices) + " values");
            }
            Eigen::VectorXcd v(vertices);
            for (int k = 0; k < vertices; ++k) v(k) = initial.values[static_cast<std::size_t>(k)];
            return L2Function::from_vertex_values(l, v);
        }
        case InitialCondition::Kind::cells: {
            if (static_cast<std::int64_t>(initial.values.size()) != l.cell_count()) {
                fail("initial.cells", "expected " + std::to_string(l.cell_count()) + " cell values at resolution " +
                                          std::to_string(resolution));
            }
            CellVector c{l, Eigen::VectorXcd(l.cell_count())};
            for (std::int64_t k = 0; k < l.cell_count(); ++k) c.values(k) = initial.values[static_cast<std::size_t>(k)];
            return from_cells(c);
        }
        case InitialCondition::Kind::wavelet: {
            const std::string wp = "initial.wavelet";
            if (initial.vertex >= vertices) fail(wp + ".I", "vertex out of range");
            if (initial.scale < l.level || initial.scale >= l.resolution) {
                fail(wp + ".r", "scale must lie in [N, R) = [" + std::to_string(l.level) + ", " + std::to_string(l.resolution) + ")");
            }
            if (initial.frequency >= prime) fail(wp + ".j", "frequency must lie in [1, p-1]");
            if (static_cast<int>(initial.center_digits.size()) != initial.scale - l.level) {
                fail(wp + ".center_digits", "expected " + std::to_string(initial.scale - l.level) + " digits");
            }
            WaveletIndex w{initial.vertex, initial.scale, static_cast<std::uint64_t>(initial.vertex), initial.frequency};
            for (std::size_t k = 0; k < initial.center_digits.size(); ++k) {
                const int d = initial.center_digits[k];
                if (d >= prime) fail(wp + ".center_digits", "digit out of range");
                w.center += static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(l.power(l.level + static_cast<int>(k)));
            }
            return L2Function::wavelet(l, w);
        }
    }
    fail("initial", "unsupported initial condition");
}

Region Scenario::region_set() const {
    if (region.empty()) fail("region", "scenario has no region");
    try {
        return parse_region(embedding, region);
    } catch (const ValidationError& e) {
        fail("region", e.what());
    }
}

PAdic parse_point(const Embedding& embedding, const std::string& text) {
    return parse_region(embedding, {text}).balls().front().center();
}

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
    }
    only_fields(doc, "scenario",
                {"prime", "vertices", "level", "padic_precision", "resolution", "weights", "window", "quad_k",
                 "measure_normalization", "quotient_edge_set", "initial", "stochastic", "region"});

    Scenario sc;
    if (!field(doc, "prime")) fail("prime", "missing field");
    if (!field(doc, "vertices")) fail("vertices", "missing field");
    sc.prime = as_int(doc.at("prime"), "prime", 2, 1 << 20);
    if (!is_prime(sc.prime)) fail("prime", std::to_string(sc.prime) + " is not prime");
    sc.vertices = as_int(doc.at("vertices"), "vertices", 1, 1 << 20);
    if (const json* v = field(doc, "level")) sc.level = as_int(*v, "level", 0, 62);
    if (const json* v = field(doc, "padic_precision")) sc.padic_precision = as_int(*v, "padic_precision", 1, 1024);
    try {
        sc.embedding = vertex_embedding(sc.vertices, sc.prime, sc.level, sc.padic_precision);
    } catch (const ValidationError& e) {
        fail(sc.level ? "level" : "vertices", e.what());
    }
    sc.resolution = sc.embedding.level + 3;
    if (const json* v = field(doc, "resolution")) sc.resolution = as_int(*v, "resolution", sc.embedding.level, 62);
    if (sc.padic_precision <= sc.resolution) fail("padic_precision", "must exceed the resolution");
    try {
        Layout::make(sc.embedding, sc.resolution);
    } catch (const ValidationError& e) {
        fail("resolution", e.what());
    }

    if (const json* w = field(doc, "window")) {
        only_fields(*w, "window", {"s", "t"});
        if (const json* s = field(*w, "s")) sc.window_s = as_number(*s, "window.s");
        if (const json* t = field(*w, "t")) sc.window_t = as_number(*t, "window.t");
    }
    if (!(sc.window_s >= 0.0) || !(sc.window_t >= sc.window_s)) fail("window", "must satisfy 0 <= s <= t");
    if (const json* q = field(doc, "quad_k")) sc.quadrature.subintervals = as_int(*q, "quad_k", 2, 1 << 20);
    if (sc.quadrature.subintervals % 2 != 0) fail("quad_k", "must be even");
    try {
        if (const json* m = field(doc, "measure_normalization")) {
            sc.quotient.normalization = parse_normalization(as_string(*m, "measure_normalization"));
        }
    } catch (const ValidationError& e) {
        fail("measure_normalization", e.what());
    }
    try {
        if (const json* e = field(doc, "quotient_edge_set")) sc.quotient.edge_set = parse_edge_set(as_string(*e, "quotient_edge_set"));
    } catch (const ValidationError& e) {
        fail("quotient_edge_set", e.what());
    }

    if (const json* ws = field(doc, "weights")) {
        if (!ws->is_array()) fail("weights", "expected an array");
        for (std::size_t k = 0; k < ws->size(); ++k) {
            const std::string path = "weights[" + std::to_string(k) + "]";
            const json& w = (*ws)[k];
            only_fields(w, path, {"i", "j", "expr"});
            for (const char* name : {"i", "j", "expr"}) {
                if (!field(w, name)) fail(path + "." + name, "missing field");
            }
            const int i = as_int(w.at("i"), path + ".i", 0, sc.vertices - 1);
            const int j = as_int(w.at("j"), path + ".j", 0, sc.vertices - 1);
            const std::string edge = "edge (" + std::to_string(i) + "," + std::to_string(j) + ")";
            if (i == j) fail(path, edge + " is on the diagonal");
            if (i > j) fail(path, edge + " must be listed with i < j");
            const std::string src = as_string(w.at("expr"), path + ".expr");
            try {
                sc.weights.push_back(WeightSpec{i, j, Expr::parse(src)});
            } catch (const ParseError& e) {
                throw ParseError(path + ".expr (" + edge + "): " + e.detail(), e.offset());
            }
        }
    }

    if (const json* ic = field(doc, "initial")) sc.initial = parse_initial(*ic);
    if (const json* st = field(doc, "stochastic")) {
        only_fields(*st, "stochastic", {"paths", "seed", "start"});
        if (const json* p = field(*st, "paths")) {
            const long long n = as_integer(*p, "stochastic.paths");
            if (n < 1) fail("stochastic.paths", "must be positive");
            sc.stochastic.paths = static_cast<std::size_t>(n);
        }
        if (const json* s = field(*st, "seed")) {
            const long long n = as_integer(*s, "stochastic.seed");
            if (n < 0) fail("stochastic.seed", "must be nonnegative");
            sc.stochastic.seed = static_cast<std::uint64_t>(n);
        }
        if (const json* s = field(*st, "start")) sc.stochastic.start = as_string(*s, "stochastic.start");
    }
    if (const json* r = field(doc, "region")) {
        if (!r->is_array()) fail("region", "expected an array of vertex[:digit]... strings");
        for (std::size_t k = 0; k < r->size(); ++k) sc.region.push_back(as_string((*r)[k], "region[" + std::to_string(k) + "]"));
    }

    // Semantic checks that need the assembled pieces.
    TimeGraph g(sc.embedding, sc.weights);
    g.validate_window(sc.window_s, sc.window_t);
    sc.initial_function();
    try {
        parse_point(sc.embedding, sc.stochastic.start);
    } catch (const ValidationError& e) {
        fail("stochastic.start", e.what());
    }
    if (!sc.region.empty()) sc.region_set();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace ultraheat
