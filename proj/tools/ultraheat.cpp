// ultraheat command-line driver: scenario in, CSV out.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ultraheat/boundary.hpp"
#include "ultraheat/errors.hpp"
#include "ultraheat/evolution.hpp"
#include "ultraheat/operators.hpp"
#include "ultraheat/scenario.hpp"
#include "ultraheat/stochastic.hpp"

namespace fs = std::filesystem;
using namespace ultraheat;

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string flag(const std::optional<bool>& b) { return b ? (*b ? "true" : "false") : "undefined"; }
std::string flag(bool b) { return b ? "true" : "false"; }

struct Output {
    fs::path dir;
    bool echoed = false;

    /// Writes `name` into the output directory; the first file is also echoed to stdout.
    void write(const std::string& name, const std::string& content) {
        fs::create_directories(dir);
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw ValidationError("cannot write " + (dir / name).string());
        out << content;
        if (!echoed) {
            std::cout << content;
            echoed = true;
        }
    }
};

struct Options {
    std::string scenario;
    std::string out_dir = ".";
    std::optional<double> from;
    std::optional<double> to;
    std::optional<int> quad_k;
    std::optional<int> resolution;
    std::string method = "closed";
    int steps = 1024;
    int points = 1;
    std::string steps_list = "8,16,32,64,128,256,512,1024";
    std::optional<std::size_t> paths;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> start;
};

QuadratureConfig quadrature(const Scenario& sc, const Options& o) {
    QuadratureConfig q = sc.quadrature;
    if (o.quad_k) q.subintervals = *o.quad_k;
    q.validate();
    return q;
}

double from_time(const Scenario& sc, const Options& o) { return o.from.value_or(sc.window_s); }
double to_time(const Scenario& sc, const Options& o) { return o.to.value_or(sc.window_t); }

void cmd_validate(const Scenario& sc, const Options&, Output& out) {
    const TimeGraph g = sc.graph();
    std::ostringstream csv;
    csv << "field,value\n";
    csv << "prime," << sc.prime << "\n";
    csv << "vertices," << sc.vertices << "\n";
    csv << "level," << sc.embedding.level << "\n";
    csv << "padic_precision," << sc.padic_precision << "\n";
    csv << "resolution," << sc.resolution << "\n";
    csv << "weights," << sc.weights.size() << "\n";
    csv << "window_s," << num(sc.window_s) << "\n";
    csv << "window_t," << num(sc.window_t) << "\n";
    csv << "quad_k," << sc.quadrature.subintervals << "\n";
    csv << "measure_normalization," << to_string(sc.quotient.normalization) << "\n";
    csv << "quotient_edge_set," << to_string(sc.quotient.edge_set) << "\n";
    const std::vector<double> nodes = sc.quadrature.nodes(sc.window_s, sc.window_t);
    csv << "commutation_defect," << num(sc.window_t > sc.window_s ? g.commutation_defect(nodes) : 0.0) << "\n";
    csv << "continuity_modulus," << num(g.continuity_modulus(sc.window_s, sc.window_t)) << "\n";
    out.write("validate.csv", csv.str());
}

void cmd_spectrum(const Scenario& sc, const Options& o, Output& out) {
    const TimeGraph g = sc.graph();
    const double s = from_time(sc, o);
    const double t = o.to.value_or(s);
    if (o.points < 1) throw ValidationError("--points must be >= 1");
    if (t < s) throw ValidationError("--to must not precede --from");
    std::ostringstream csv;
    csv << "t,k,mu";
    for (int v = 0; v < g.vertices(); ++v) csv << ",phi_" << v;
    csv << "\n";
    std::optional<SpectralFrame> prev;
    for (int i = 0; i < o.points; ++i) {
        const double tau = o.points == 1 ? s : (i == o.points - 1 ? t : s + (t - s) * i / (o.points - 1));
        SpectralFrame f = spectral_frame(g, tau, prev ? &*prev : nullptr);
        for (const std::string& w : f.warnings) std::cerr << "warning: " << w << "\n";
        for (Eigen::Index k = 0; k < f.eigenvalues.size(); ++k) {
            csv << num(tau) << "," << k << "," << num(f.eigenvalues(k));
            for (Eigen::Index v = 0; v < f.modal.rows(); ++v) csv << "," << num(f.modal(v, k));
            csv << "\n";
        }
        prev = std::move(f);
    }
    out.write("spectrum.csv", csv.str());
}

void cmd_evolve(const Scenario& sc, const Options& o, Output& out) {
    const TimeGraph g = sc.graph();
    const double s = from_time(sc, o);
    const double t = to_time(sc, o);
    g.validate_window(s, t);
    const Method method = parse_method(o.method);
    const QuadratureConfig q = quadrature(sc, o);
    const L2Function u0 = sc.initial_function();
    const EvolutionReport r = evolve(method, g, s, t, u0, q, o.steps);

    std::ostringstream result;
    write_csv(result, r.result);
    out.write("evolve.csv", result.str());

    std::ostringstream diag;
    diag << "quantity,value\n";
    diag << "method," << r.tag() << "\n";
    diag << "from," << num(s) << "\n";
    diag << "to," << num(t) << "\n";
    diag << "quadrature_k," << r.quadrature_k << "\n";
    diag << "commutation_defect," << (r.commutation_defect ? num(*r.commutation_defect) : "undefined") << "\n";
    diag << "integral_initial," << num(integral(u0).real()) << "\n";
    diag << "integral_result," << num(integral(r.result).real()) << "\n";
    diag << "norm_initial," << num(norm(u0)) << "\n";
    diag << "norm_result," << num(norm(r.result)) << "\n";
    std::string gap = "undefined";
    if (method != Method::trotter && method != Method::autonomous && t > s) {
        try {
            gap = num(closed_vs_trotter_gap(g, s, t, u0, o.steps, q));
        } catch (const NumericalRefusal&) {
            gap = "refused";
        }
    }
    diag << "closed_vs_trotter_gap," << gap << "\n";
    diag << "warnings," << r.warnings.size() << "\n";
    for (const std::string& w : r.warnings) std::cerr << "warning: " << w << "\n";
    out.write("evolve_diagnostics.csv", diag.str());
}

void cmd_sweep(const Scenario& sc, const Options& o, Output& out) {
    const TimeGraph g = sc.graph();
    const double s = from_time(sc, o);
    const double t = to_time(sc, o);
    g.validate_window(s, t);
    std::vector<int> ns;
    std::stringstream ss(o.steps_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            const int n = std::stoi(tok, &used);
            if (used != tok.size() || n < 1) throw std::invalid_argument(tok);
            ns.push_back(n);
        } catch (const std::exception&) {
            throw ValidationError("--steps-list entry '" + tok + "' is not a positive integer");
        }
    }
    if (ns.empty()) throw ValidationError("--steps-list is empty");
    const TrotterSweep sweep = trotter_error_sweep(g, s, t, sc.initial_function(), ns, quadrature(sc, o));
    std::ostringstream csv;
    csv << "n,error\n";
    for (std::size_t k = 0; k < ns.size(); ++k) csv << ns[k] << "," << num(sweep.errors[k]) << "\n";
    out.write("sweep.csv", csv.str());
    std::ostringstream summary;
    summary << "quantity,value\n";
    summary << "reference," << to_string(sweep.reference) << "\n";
    summary << "slope," << (sweep.slope ? num(*sweep.slope) : "undefined") << "\n";
    out.write("sweep_summary.csv", summary.str());
}

void cmd_boundary(const Scenario& sc, const Options& o, Output& out) {
    const TimeGraph g = sc.graph();
    const double t = from_time(sc, o);
    const int resolution = o.resolution.value_or(sc.resolution);
    const Region region = sc.region_set();
    const BoundaryData bd = boundary_data(g, region, t, resolution);
    const BoundReport r = bound_report(g, region, t, resolution, sc.quotient);
    std::ostringstream csv;
    csv << "quantity,value\n";
    csv << "t," << num(r.t) << "\n";
    csv << "resolution," << r.resolution << "\n";
    csv << "measure_normalization," << to_string(r.config.normalization) << "\n";
    csv << "quotient_edge_set," << to_string(r.config.edge_set) << "\n";
    csv << "vertex_boundary_cells," << bd.vertex_boundary.size() << "\n";
    csv << "edge_boundary_pairs," << bd.edge_boundary.size() << "\n";
    csv << "lambda_dirichlet," << num(r.dirichlet) << "\n";
    csv << "lambda_vonneumann," << num(r.vonneumann) << "\n";
    csv << "lambda_graph_dirichlet," << (r.graph_dirichlet ? num(*r.graph_dirichlet) : "undefined") << "\n";
    csv << "lambda_graph_vonneumann," << num(r.graph_vonneumann) << "\n";
    csv << "gamma_hat," << num(r.gamma_hat) << "\n";
    csv << "dirichlet_le_graph," << flag(r.dirichlet_le_graph) << "\n";
    csv << "dirichlet_le_gamma_hat," << flag(r.dirichlet_le_gamma_hat) << "\n";
    csv << "graph_min_le_one," << flag(r.graph_min_le_one) << "\n";
    csv << "gamma_hat_lt_graph_dirichlet," << flag(r.gamma_hat_lt_graph_dirichlet) << "\n";
    csv << "vonneumann_le_graph," << flag(r.vonneumann_le_graph) << "\n";
    csv << "vonneumann_le_gamma_hat," << flag(r.vonneumann_le_gamma_hat) << "\n";
    csv << "vonneumann_lt_graph," << flag(r.vonneumann_lt_graph) << "\n";
    out.write("boundary.csv", csv.str());
}

void cmd_simulate(const Scenario& sc, const Options& o, Output& out) {
    const TimeGraph g = sc.graph();
    const double s = from_time(sc, o);
    const double t = to_time(sc, o);
    g.validate_window(s, t);
    const PAdic x0 = parse_point(sc.embedding, o.start.value_or(sc.stochastic.start));
    const std::size_t paths = o.paths.value_or(sc.stochastic.paths);
    const std::uint64_t seed = o.seed.value_or(sc.stochastic.seed);
    const MarkovValidation v = validate_markov(g, s, t, x0, paths, seed, quadrature(sc, o));

    std::ostringstream occ;
    occ << "vertex,empirical,standard_error,analytic,restarted\n";
    for (int k = 0; k < g.vertices(); ++k) {
        occ << k << "," << num(v.empirical.probabilities(k)) << "," << num(v.empirical.standard_errors(k)) << ","
            << num(v.analytic(k)) << "," << num(v.restarted(k)) << "\n";
    }
    out.write("occupancy.csv", occ.str());

    std::ostringstream cmp;
    cmp << "quantity,value\n";
    cmp << "paths," << paths << "\n";
    cmp << "seed," << seed << "\n";
    cmp << "tv_distance," << num(v.tv_distance) << "\n";
    cmp << "survival_empirical," << num(v.empirical.survival_atom) << "\n";
    cmp << "survival_expected," << num(v.survival_expected) << "\n";
    cmp << "survival_sigma," << num(v.survival_sigma) << "\n";
    cmp << "survival_within_3sigma," << flag(v.survival_within_3sigma) << "\n";
    cmp << "restart_time," << num(v.restart_time) << "\n";
    cmp << "ck_tv_distance," << num(v.ck_tv_distance) << "\n";
    cmp << "ck_tolerance," << num(v.ck_tolerance) << "\n";
    cmp << "ck_consistent," << flag(v.ck_consistent) << "\n";
    out.write("comparison.csv", cmp.str());
}

void cmd_kernel(const Scenario& sc, const Options& o, Output& out) {
    const TimeGraph g = sc.graph();
    const double s = from_time(sc, o);
    const double t = to_time(sc, o);
    g.validate_window(s, t);
    const PAdic x = parse_point(sc.embedding, o.start.value_or(sc.stochastic.start));
    const Eigen::VectorXd probs = heat_kernel_ball_probs(g, s, x, t, quadrature(sc, o));
    std::ostringstream csv;
    csv << "vertex,probability\n";
    for (int k = 0; k < g.vertices(); ++k) csv << k << "," << num(probs(k)) << "\n";
    out.write("kernel.csv", csv.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-autonomous p-adic diffusion on graphs"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
        sub->add_option("--out-dir", o.out_dir, "Directory for CSV outputs");
    };
    auto window = [&](CLI::App* sub) {
        sub->add_option("--from", o.from, "Start time (default: window.s)");
        sub->add_option("--to", o.to, "End time (default: window.t)");
        sub->add_option("--quad-k", o.quad_k, "Simpson subintervals (even)");
    };

    CLI::App* validate = app.add_subcommand("validate", "Load and check a scenario");
    common(validate);
    CLI::App* spectrum = app.add_subcommand("spectrum", "Tracked eigenpairs of L(t)");
    common(spectrum);
    spectrum->add_option("--from", o.from, "First time (default: window.s)");
    spectrum->add_option("--to", o.to, "Last time (default: --from)");
    spectrum->add_option("--points", o.points, "Number of equally spaced times");
    CLI::App* evolve_cmd = app.add_subcommand("evolve", "Evolve the initial condition");
    common(evolve_cmd);
    window(evolve_cmd);
    evolve_cmd->add_option("--method", o.method, "autonomous | closed | trotter | commuting");
    evolve_cmd->add_option("--steps", o.steps, "Trotter factors");
    CLI::App* sweep = app.add_subcommand("sweep-trotter", "Trotter error against the exact reference");
    common(sweep);
    window(sweep);
    sweep->add_option("--steps-list", o.steps_list, "Comma-separated step counts");
    CLI::App* boundary = app.add_subcommand("boundary", "Boundary eigenvalues and bounds for the region");
    common(boundary);
    boundary->add_option("--at", o.from, "Time (default: window.s)");
    boundary->add_option("--resolution", o.resolution, "Cell resolution R");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo paths against the analytic kernel");
    common(simulate);
    window(simulate);
    simulate->add_option("--paths", o.paths, "Number of paths");
    simulate->add_option("--seed", o.seed, "Random seed");
    simulate->add_option("--start", o.start, "Start point vertex[:digit]...");
    CLI::App* kernel = app.add_subcommand("kernel", "Analytic ball probabilities of the heat kernel");
    common(kernel);
    window(kernel);
    kernel->add_option("--start", o.start, "Start point vertex[:digit]...");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const Scenario sc = load_scenario(o.scenario);
        Output out{o.out_dir};
        if (*validate) cmd_validate(sc, o, out);
        else if (*spectrum) cmd_spectrum(sc, o, out);
        else if (*evolve_cmd) cmd_evolve(sc, o, out);
        else if (*sweep) cmd_sweep(sc, o, out);
        else if (*boundary) cmd_boundary(sc, o, out);
        else if (*simulate) cmd_simulate(sc, o, out);
        else if (*kernel) cmd_kernel(sc, o, out);
    } catch (const NumericalRefusal& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
