#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mmt/builders.hpp"
#include "mmt/convex_order.hpp"
#include "mmt/coupling.hpp"
#include "mmt/json_io.hpp"
#include "mmt/oracle.hpp"
#include "mmt/peacock.hpp"
#include "mmt/shadow.hpp"
#include "mmt/svg.hpp"

namespace mmt::cli {

namespace {

namespace fs = std::filesystem;

int log_level() {
    const char* v = std::getenv("MMT_LOG");
    if (!v) return 1;
    std::string s(v);
    if (s == "debug") return 3;
    if (s == "info") return 2;
    return 1;
}

void log_info(std::ostream& err, const std::string& msg) {
    if (log_level() >= 2) err << "[info] " << msg << "\n";
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

struct ErrorReport {
    int code;
    std::string kind;
    std::string message;
};

int emit_error(std::ostream& err, const ErrorReport& r) {
    err << "{\"error\":\"" << json_escape(r.kind) << "\",\"message\":\""
        << json_escape(r.message) << "\",\"code\":" << r.code << "}\n";
    return r.code;
}

std::function<double(double, double)> cost_by_name(const std::string& name) {
    if (name == "abs") return [](double x, double y) { return std::abs(x - y); };
    if (name == "sq") return [](double x, double y) { return (x - y) * (x - y); };
    if (name == "negxy") return [](double x, double y) { return -x * y; };
    throw mmt::Error("unknown cost function: " + name);
}

std::function<double(double)> convex_by_name(const std::string& name) {
    if (name == "x2") return [](double v) { return v * v; };
    if (name == "x4") return [](double v) { return v * v * v * v; };
    throw mmt::Error("unknown convex function: " + name);
}

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"backward Monge martingale transports"};
    app.require_subcommand(1);

    std::string mu_path, nu_path, coupling_path, outdir = ".", format = "json";
    std::string cost_name = "abs", fg_name = "x2";
    int resolution = 2048;
    double eps = 0.25, stop_eps = 1e-10;
    std::vector<double> eps_list;
    std::vector<std::string> marginal_paths;
    int n_paths = 10000;
    std::uint64_t seed = 1;

    auto add_common = [&](CLI::App* sub, bool needs_nu = true) {
        sub->add_option("--mu", mu_path, "measure JSON path")->required();
        if (needs_nu) sub->add_option("--nu", nu_path, "measure JSON path")->required();
        sub->add_option("--resolution", resolution, "discretization atoms");
        sub->add_option("--out", outdir, "output directory");
        sub->add_option("--format", format, "json|csv|svg");
    };

    auto* c_shadow = app.add_subcommand("shadow", "shadow of mu in nu");
    add_common(c_shadow);

    auto* c_lc = app.add_subcommand("left-curtain", "left-curtain coupling");
    add_common(c_lc);

    auto* c_bar = app.add_subcommand("barcode", "barcode coupling with trace");
    add_common(c_bar);
    c_bar->add_option("--stop-eps", stop_eps, "residual mass stop threshold");

    auto* c_approx = app.add_subcommand("approx", "Monge approximation of a coupling");
    c_approx->add_option("--coupling", coupling_path, "coupling JSON path")->required();
    c_approx->add_option("--eps", eps, "cell width")->required();
    c_approx->add_option("--out", outdir, "output directory");
    c_approx->add_option("--format", format, "json|csv");

    auto* c_uniq = app.add_subcommand("uniqueness", "martingale-transport uniqueness verdict");
    add_common(c_uniq);

    auto* c_mimic = app.add_subcommand("mimic", "backward deterministic mimicking chain");
    c_mimic->add_option("--marginals", marginal_paths, "measure JSON paths in convex order")
        ->required()
        ->expected(-2);
    c_mimic->add_option("--resolution", resolution, "discretization atoms");
    c_mimic->add_option("--paths", n_paths, "number of sampled paths");
    c_mimic->add_option("--seed", seed, "sampling seed");
    c_mimic->add_option("--out", outdir, "output directory");

    auto* c_weak = app.add_subcommand("weak-cost", "generalized transport cost of a coupling");
    c_weak->add_option("--coupling", coupling_path, "coupling JSON path")->required();
    c_weak->add_option("--fg", fg_name, "x2|x4 (f = g)");
    c_weak->add_option("--out", outdir, "output directory");

    auto* c_gap = app.add_subcommand("value-gap", "LP value vs constructed MMT values");
    add_common(c_gap);
    c_gap->add_option("--cost", cost_name, "abs|sq|negxy");
    c_gap->add_option("--eps-list", eps_list, "approximation scales")->expected(-1);

    std::vector<std::string> argv = args;
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        return emit_error(err, {1, "usage", e.what()});
    }
    if (resolution < 2) return emit_error(err, {1, "usage", "resolution must be >= 2"});
    if (!(eps > 0.0)) return emit_error(err, {1, "usage", "eps must be positive"});
    for (double e : eps_list)
        if (!(e > 0.0)) return emit_error(err, {1, "usage", "eps values must be positive"});

    try {
        if (app.got_subcommand(c_shadow)) {
            Measure mu = load_measure_file(mu_path);
            Measure nu = load_measure_file(nu_path);
            ShadowResult res = shadow(mu, nu, resolution);
            write_file(out_path(outdir, "shadow.json"), measure_to_json(res.shadow));
            write_file(out_path(outdir, "residual.json"), measure_to_json(res.residual));
            std::vector<Coupling::Link> links;
            for (auto& l : res.links) links.push_back({l.source, std::move(l.target)});
            write_file(out_path(outdir, "links.json"), coupling_to_json(Coupling(links)));
            log_info(err, "shadow mass " + format_double(res.shadow.mass()));
            out << "shadow.json residual.json links.json\n";
        } else if (app.got_subcommand(c_lc) || app.got_subcommand(c_bar)) {
            Measure mu = load_measure_file(mu_path);
            Measure nu = load_measure_file(nu_path);
            Coupling plan;
            if (app.got_subcommand(c_lc)) {
                plan = left_curtain(mu, nu, resolution);
            } else {
                auto [coupling, trace] = barcode(mu, nu, resolution, stop_eps);
                plan = std::move(coupling);
                write_file(out_path(outdir, "trace.json"), trace_to_json(trace));
                if (format == "svg")
                    write_file(out_path(outdir, "barcode.svg"),
                               render_barcode_svg(trace, mu, nu));
            }
            write_file(out_path(outdir, "coupling.json"), coupling_to_json(plan));
            if (format == "csv")
                write_file(out_path(outdir, "coupling.csv"), coupling_to_csv(plan));
            out << "coupling.json\n";
        } else if (app.got_subcommand(c_approx)) {
            Coupling pi = load_coupling_file(coupling_path);
            Coupling res = monge_approximate(pi, eps);
            write_file(out_path(outdir, "coupling.json"), coupling_to_json(res));
            if (format == "csv")
                write_file(out_path(outdir, "coupling.csv"), coupling_to_csv(res));
            out << "coupling.json\n";
        } else if (app.got_subcommand(c_uniq)) {
            Measure mu = load_measure_file(mu_path);
            Measure nu = load_measure_file(nu_path);
            UniquenessReport rep = uniqueness_check(mu, nu);
            const char* verdict = rep.verdict == Uniqueness::Unique
                                      ? "Unique"
                                      : rep.verdict == Uniqueness::NotUnique ? "NotUnique"
                                                                             : "Inconclusive";
            std::ostringstream os;
            os << "{\"verdict\":\"" << verdict << "\",\"max_overlap\":"
               << format_double(rep.max_overlap)
               << ",\"residual_gap\":" << format_double(rep.residual_gap) << ",\"witness\":\""
               << json_escape(rep.witness) << "\"}";
            write_file(out_path(outdir, "report.json"), os.str());
            out << verdict << "\n";
        } else if (app.got_subcommand(c_mimic)) {
            std::vector<Measure> marginals;
            for (const auto& p : marginal_paths) marginals.push_back(load_measure_file(p));
            PeacockChain chain = build_chain(marginals, resolution);
            auto paths = sample_paths(chain, n_paths, seed);
            std::ostringstream csv;
            for (const auto& row : paths) {
                for (std::size_t i = 0; i < row.size(); ++i)
                    csv << (i ? "," : "") << format_double(row[i]);
                csv << "\n";
            }
            write_file(out_path(outdir, "paths.csv"), csv.str());
            std::ostringstream cj;
            cj << "{\"resolution\":" << chain.resolution << ",\"couplings\":[";
            for (std::size_t i = 0; i < chain.couplings.size(); ++i)
                cj << (i ? "," : "") << coupling_to_json(chain.couplings[i]);
            cj << "]}";
            write_file(out_path(outdir, "chain.json"), cj.str());
            double span = chain.marginals.back().max_support() -
                          chain.marginals.back().min_support();
            auto scores = backward_determinism_score(chain, paths, span / resolution);
            std::ostringstream sj;
            sj << "{\"backward_determinism\":[";
            for (std::size_t i = 0; i < scores.size(); ++i)
                sj << (i ? "," : "") << format_double(scores[i]);
            sj << "]}";
            write_file(out_path(outdir, "scores.json"), sj.str());
            out << "paths.csv chain.json scores.json\n";
        } else if (app.got_subcommand(c_weak)) {
            Coupling pi = load_coupling_file(coupling_path);
            auto fg = convex_by_name(fg_name);
            double v = weak_cost(pi, fg, fg);
            Measure mu = pi.first_marginal();
            double bound = fg(0.0);
            {
                double acc = 0.0;
                for (const auto& a : mu.atoms()) acc += a.mass * fg(a.pos);
                bound -= acc / mu.mass();
            }
            std::ostringstream os;
            os << "{\"weak_cost\":" << format_double(v)
               << ",\"monge_bound\":" << format_double(bound)
               << ",\"martingale\":" << (check_martingale(pi, 1e-9) ? "true" : "false") << "}";
            write_file(out_path(outdir, "report.json"), os.str());
            out << format_double(v) << "\n";
        } else if (app.got_subcommand(c_gap)) {
            Measure mu = load_measure_file(mu_path);
            Measure nu = load_measure_file(nu_path);
            if (eps_list.empty()) eps_list = {0.5, 0.25, 0.125};
            auto rows = value_gap(mu, nu, cost_by_name(cost_name), eps_list);
            std::ostringstream os;
            os << "{\"rows\":[";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (i) os << ",";
                os << "{\"eps\":" << format_double(rows[i].eps)
                   << ",\"mmt_value\":" << format_double(rows[i].mmt_value)
                   << ",\"lp_value\":" << format_double(rows[i].lp_value) << "}";
            }
            os << "]}";
            write_file(out_path(outdir, "report.json"), os.str());
            out << "report.json\n";
        }
    } catch (const ParseError& e) {
        return emit_error(err, {2, "parse", e.what()});
    } catch (const NotInConvexOrder& e) {
        return emit_error(err, {3, "order", e.what()});
    } catch (const NotDominatedE& e) {
        return emit_error(err, {3, "order", e.what()});
    } catch (const NotDominated& e) {
        return emit_error(err, {3, "order", e.what()});
    } catch (const NotMartingale& e) {
        return emit_error(err, {3, "order", e.what()});
    } catch (const MarginalMismatch& e) {
        return emit_error(err, {3, "order", e.what()});
    } catch (const AtomicSecondMarginal& e) {
        return emit_error(err, {3, "order", e.what()});
    } catch (const AtomicInput& e) {
        return emit_error(err, {3, "order", e.what()});
    } catch (const Infeasible& e) {
        return emit_error(err, {3, "order", e.what()});
    } catch (const NoConvergence& e) {
        return emit_error(err, {4, "convergence", e.what()});
    } catch (const SizeCap& e) {
        return emit_error(err, {5, "size", e.what()});
    } catch (const Error& e) {
        return emit_error(err, {1, "error", e.what()});
    }
    return 0;
}

}  // namespace mmt::cli
