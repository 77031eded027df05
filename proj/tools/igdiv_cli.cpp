// Batch front end: computes divergence tables and runs verification suites
// on the built-in manifold zoo or JSON manifold specs. Emits CSV/JSON that is
// byte-identical across runs for a fixed seed.

#include "igdiv/divergence.hpp"
#include "igdiv/manifold.hpp"
#include "igdiv/verify.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

namespace {

using namespace igdiv;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<double> parse_coords(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw SpecError("malformed coordinate: " + tok);
    }
    if (out.empty()) throw SpecError("empty coordinate list");
    return out;
}

Point point_of(const std::vector<double>& coords) {
    Vec v(static_cast<int>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) v[static_cast<int>(i)] = coords[i];
    return Point(v);
}

std::string join_coords(const Vec& v) {
    std::string s;
    for (int i = 0; i < v.size(); ++i) s += (i ? ";" : "") + fmt17(v[i]);
    return s;
}

int thread_cap() {
    if (const char* env = std::getenv("IGDIV_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

/// Index-ordered parallel map; results land in caller-indexed slots so the
/// output is deterministic regardless of thread count.
void parallel_for(int n, const std::function<void(int)>& body) {
    const int workers = std::min(thread_cap(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct CommonOptions {
    std::string manifold;
    std::string spec_path;
    std::string format = "csv";
    std::string out_path;
    std::uint64_t seed = 42;
    NumericsConfig cfg;
};

ManifoldHandle resolve_manifold(const CommonOptions& opt) {
    if (!opt.spec_path.empty()) {
        std::ifstream in(opt.spec_path);
        if (!in) throw SpecError("cannot open manifold spec file: " + opt.spec_path);
        std::stringstream ss;
        ss << in.rdbuf();
        return manifold_from_json(ss.str());
    }
    if (!opt.manifold.empty()) return manifold_from_shorthand(opt.manifold);
    throw SpecError("one of --manifold or --spec is required");
}

void emit(const CommonOptions& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw SpecError("cannot open output path: " + opt.out_path);
    out << text;
}

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--manifold", opt.manifold, "inline manifold shorthand, e.g. sphere2");
    cmd->add_option("--spec", opt.spec_path, "path to a JSON manifold spec");
    cmd->add_option("--format", opt.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", opt.out_path, "output path (default: stdout)");
    cmd->add_option("--seed", opt.seed, "RNG seed for sampled checks");
    cmd->add_option("--quad-order", opt.cfg.quad_order, "Gauss-Legendre order");
    cmd->add_option("--ode-steps", opt.cfg.ode_steps, "RK4 steps per unit parameter");
    cmd->add_option("--fd-step", opt.cfg.fd_step, "central finite-difference step");
    cmd->add_option("--shooting-tol", opt.cfg.shooting_tol, "BVP endpoint tolerance");
}

int cmd_compute(const CommonOptions& opt, const std::string& p_text, const std::string& q_text,
                const std::string& quantities_text) {
    const ManifoldHandle m = resolve_manifold(opt);
    const Point p = point_of(parse_coords(p_text));
    const Point q = point_of(parse_coords(q_text));
    if (p.dim() != m->dim() || q.dim() != m->dim())
        throw SpecError("point dimension does not match the manifold");

    std::vector<Quantity> quantities;
    std::stringstream ss(quantities_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) quantities.push_back(quantity_from_name(tok));
    if (quantities.empty()) throw SpecError("no quantities requested");

    NumericsConfig cfg = opt.cfg;
    cfg.seed = opt.seed;
    std::vector<DivergenceValue> values(quantities.size());
    for (std::size_t i = 0; i < quantities.size(); ++i) {
        try {
            values[i] = evaluate_quantity(m, quantities[i], p, q, cfg);
        } catch (const NotHessianManifold& e) {
            throw SpecError(std::string("quantity ") + quantity_name(quantities[i]) + ": " +
                            e.what());
        } catch (const Error& e) {
            std::cerr << "solver failure in quantity " << quantity_name(quantities[i]) << ": "
                      << e.what() << "\n";
            return kExitNumericalError;
        }
    }

    std::string text;
    if (opt.format == "csv") {
        text = "manifold,p,q,quantity,value,est_error,quad_order\n";
        for (std::size_t i = 0; i < quantities.size(); ++i) {
            text += m->name() + "," + join_coords(p.coords) + "," + join_coords(q.coords) + "," +
                    quantity_name(quantities[i]) + "," + fmt17(values[i].value) + "," +
                    fmt17(values[i].est_error) + "," + std::to_string(values[i].quadrature_order) +
                    "\n";
        }
    } else {
        text = "[\n";
        for (std::size_t i = 0; i < quantities.size(); ++i) {
            text += std::string("  {\"manifold\":\"") + m->name() + "\",\"quantity\":\"" +
                    quantity_name(quantities[i]) + "\",\"value\":" + fmt17(values[i].value) +
                    ",\"est_error\":" + fmt17(values[i].est_error) +
                    ",\"quad_order\":" + std::to_string(values[i].quadrature_order) + "}" +
                    (i + 1 < quantities.size() ? ",\n" : "\n");
        }
        text += "]\n";
    }
    emit(opt, text);
    return 0;
}

int cmd_verify(const CommonOptions& opt, const std::string& suite_text) {
    const ManifoldHandle m = resolve_manifold(opt);
    NumericsConfig cfg = opt.cfg;
    cfg.seed = opt.seed;
    SampleScheme scheme;
    scheme.seed = opt.seed;
    scheme.count = 50;
    scheme.manifold = m->name();

    std::vector<std::string> names;
    if (suite_text == "all") {
        names = suite_names_for(*m);
    } else {
        std::stringstream ss(suite_text);
        std::string tok;
        while (std::getline(ss, tok, ',')) names.push_back(tok);
    }
    if (names.empty()) throw SpecError("no verification suites requested");

    std::vector<CheckReport> reports;
    try {
        reports = run_suite(m, names, scheme, cfg);
    } catch (const std::invalid_argument& e) {
        throw SpecError(e.what());
    }

    bool all_pass = true;
    std::string summary;
    for (const auto& rep : reports) {
        summary += rep.summary_line() + "\n";
        all_pass = all_pass && rep.passed;
    }
    if (opt.format == "json") {
        std::string text = "[\n";
        for (std::size_t i = 0; i < reports.size(); ++i)
            text += reports[i].to_json() + (i + 1 < reports.size() ? ",\n" : "\n");
        text += "]\n";
        emit(opt, text);
        std::cerr << summary;
    } else {
        emit(opt, summary);
    }
    return all_pass ? 0 : kExitVerifyFailed;
}

struct GridAxis {
    double lo, hi;
    int n;
};

int cmd_table(const CommonOptions& opt, const std::string& p_text, const std::string& grid_text,
              const std::string& quantity_text) {
    const ManifoldHandle m = resolve_manifold(opt);
    const Point p = point_of(parse_coords(p_text));
    if (p.dim() != m->dim()) throw SpecError("point dimension does not match the manifold");
    const Quantity quantity = quantity_from_name(quantity_text);

    std::vector<GridAxis> axes;
    {
        std::stringstream ss(grid_text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            GridAxis ax{};
            if (std::sscanf(tok.c_str(), "%lf:%lf:%d", &ax.lo, &ax.hi, &ax.n) != 3 || ax.n < 1)
                throw SpecError("malformed grid axis (want lo:hi:n): " + tok);
            axes.push_back(ax);
        }
    }
    if (static_cast<int>(axes.size()) != m->dim())
        throw SpecError("grid must have one axis per coordinate");

    long total = 1;
    for (const auto& ax : axes) total *= ax.n;
    NumericsConfig cfg = opt.cfg;
    cfg.seed = opt.seed;

    std::vector<std::string> rows(total);
    std::atomic<int> warnings{0};
    parallel_for(static_cast<int>(total), [&](int idx) {
        // lexicographic decode, last axis fastest
        Vec qv(m->dim());
        long rem = idx;
        for (int d = m->dim() - 1; d >= 0; --d) {
            const int i = static_cast<int>(rem % axes[d].n);
            rem /= axes[d].n;
            qv[d] = axes[d].n == 1
                        ? axes[d].lo
                        : axes[d].lo + (axes[d].hi - axes[d].lo) * i / (axes[d].n - 1.0);
        }
        std::string row;
        for (int d = 0; d < m->dim(); ++d) row += fmt17(qv[d]) + ",";
        try {
            const DivergenceValue v = evaluate_quantity(m, quantity, p, Point(qv), cfg);
            row += fmt17(v.value) + "," + fmt17(v.est_error);
        } catch (const Error&) {
            row += "nan,nan";
            warnings.fetch_add(1);
        }
        rows[idx] = row;
    });

    std::string text;
    for (int d = 0; d < m->dim(); ++d) text += "q_" + std::to_string(d + 1) + ",";
    text += "value,est_error\n";
    for (const auto& r : rows) text += r + "\n";
    emit(opt, text);
    if (warnings.load() > 0)
        std::cerr << "warning: " << warnings.load() << " grid rows failed and were emitted as nan\n";
    return 0;
}

int cmd_describe(const CommonOptions& opt) {
    const ManifoldHandle m = resolve_manifold(opt);
    NumericsConfig cfg = opt.cfg;
    Vec center(m->dim());
    for (int i = 0; i < m->dim(); ++i)
        center[i] = 0.5 * (m->domain()[i][0] + m->domain()[i][1]);
    const double rho = probe_convex_radius(m, Point(center), cfg);

    std::string text;
    text += "manifold: " + m->name() + "\n";
    text += "dim: " + std::to_string(m->dim()) + "\n";
    text += "domain:";
    for (int i = 0; i < m->dim(); ++i)
        text += " [" + fmt17(m->domain()[i][0]) + ", " + fmt17(m->domain()[i][1]) + "]";
    text += "\n";
    text += "boundary_margin: " + fmt17(m->boundary_margin()) + "\n";
    text += std::string("self_dual: ") + (m->is_self_dual() ? "yes" : "no") + "\n";
    text += std::string("dually_flat: ") + (m->is_dually_flat() ? "yes" : "no") + "\n";
    text += std::string("symmetric_space: ") + (m->is_symmetric_space() ? "yes" : "no") + "\n";
    text += std::string("has_potential: ") + (m->has_potential() ? "yes" : "no") + "\n";
    text += "default_pair_radius: " + fmt17(m->default_pair_radius()) + "\n";
    text += "probed_convex_radius_at_center: " + fmt17(rho) + "\n";
    emit(opt, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"igdiv: divergences and theorem checks for dualistic statistical manifolds"};
    app.require_subcommand(1);

    CommonOptions copt, vopt, topt, dopt;
    std::string p_text, q_text, quantities_text = "D";
    std::string suite_text = "all";
    std::string tp_text, grid_text, tquantity = "D";

    CLI::App* compute = app.add_subcommand("compute", "evaluate divergences for a point pair");
    add_common(compute, copt);
    compute->add_option("--p", p_text, "first point, comma-separated chart coordinates")
        ->required();
    compute->add_option("--q", q_text, "second point")->required();
    compute->add_option("--quantities", quantities_text,
                        "comma list of D,Dstar,phi,phistar,r,ayamari,bregman,henmiW,henmiWstar,"
                        "standard,distance");

    CLI::App* verify = app.add_subcommand("verify", "run theorem-verification suites");
    add_common(verify, vopt);
    verify->add_option("--suite", suite_text,
                       "comma list of grad_r,level_sets,decompositions,eguchi,special_cases,"
                       "energy,symmetry,condition_s,duality,curvature_duality,holonomy or 'all'");

    CLI::App* table = app.add_subcommand("table", "CSV grid of one quantity around a fixed p");
    add_common(table, topt);
    table->add_option("--p", tp_text, "fixed first point")->required();
    table->add_option("--grid", grid_text, "per-coordinate q grid, lo:hi:n per axis")->required();
    table->add_option("--quantities", tquantity, "single quantity for the grid");

    CLI::App* describe = app.add_subcommand("describe", "print manifold metadata and probed convex radius");
    add_common(describe, dopt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        if (compute->parsed()) return cmd_compute(copt, p_text, q_text, quantities_text);
        if (verify->parsed()) return cmd_verify(vopt, suite_text);
        if (table->parsed()) return cmd_table(topt, tp_text, grid_text, tquantity);
        if (describe->parsed()) return cmd_describe(dopt);
    } catch (const SpecError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalError;
    }
    return kExitConfigError;
}
