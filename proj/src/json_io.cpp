#include "mmt/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mmt {

namespace {

using nlohmann::json;

double checked_number(const json& j, const char* what) {
    if (!j.is_number()) throw ParseError(std::string("expected a number for ") + what);
    double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(std::string("non-finite value for ") + what);
    return v;
}

Measure measure_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("measure: expected an object");
    std::vector<Measure::Atom> atoms;
    std::vector<Measure::Piece> pieces;
    if (j.contains("atoms")) {
        for (const auto& e : j.at("atoms")) {
            if (!e.is_array() || e.size() != 2) throw ParseError("measure: atom must be [x, m]");
            double x = checked_number(e[0], "atom position");
            double m = checked_number(e[1], "atom mass");
            if (m <= 0.0) throw ParseError("measure: atom mass must be positive");
            atoms.push_back({x, m});
        }
    }
    if (j.contains("pieces")) {
        for (const auto& e : j.at("pieces")) {
            if (!e.is_array() || e.size() != 3)
                throw ParseError("measure: piece must be [l, r, d]");
            double l = checked_number(e[0], "piece left");
            double r = checked_number(e[1], "piece right");
            double d = checked_number(e[2], "piece density");
            if (!(l < r)) throw ParseError("measure: piece requires l < r");
            if (d <= 0.0) throw ParseError("measure: density must be positive");
            pieces.push_back({l, r, d});
        }
    }
    return Measure(std::move(atoms), std::move(pieces));
}

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON");
    return j;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Measure parse_measure(const std::string& text) { return measure_from_json(parse_text(text)); }

Coupling parse_coupling(const std::string& text) {
    json j = parse_text(text);
    if (!j.is_object() || !j.contains("links"))
        throw ParseError("coupling: expected an object with links");
    std::vector<Coupling::Link> links;
    for (const auto& e : j.at("links")) {
        double x = checked_number(e.at("x"), "link source");
        Measure target = measure_from_json(e.at("target"));
        if (e.contains("m")) {
            double m = checked_number(e.at("m"), "link mass");
            if (std::abs(m - target.mass()) > 1e-6 * (1.0 + m))
                throw ParseError("coupling: link mass disagrees with its target");
        }
        links.push_back({x, std::move(target)});
    }
    return Coupling(std::move(links));
}

std::string measure_to_json(const Measure& m) {
    std::ostringstream os;
    os << "{\"atoms\":[";
    for (std::size_t i = 0; i < m.atoms().size(); ++i) {
        if (i) os << ",";
        os << "[" << format_double(m.atoms()[i].pos) << "," << format_double(m.atoms()[i].mass)
           << "]";
    }
    os << "],\"pieces\":[";
    for (std::size_t i = 0; i < m.pieces().size(); ++i) {
        const auto& p = m.pieces()[i];
        if (i) os << ",";
        os << "[" << format_double(p.left) << "," << format_double(p.right) << ","
           << format_double(p.density) << "]";
    }
    os << "]}";
    return os.str();
}

std::string coupling_to_json(const Coupling& c) {
    std::ostringstream os;
    os << "{\"links\":[";
    for (std::size_t i = 0; i < c.links().size(); ++i) {
        const auto& l = c.links()[i];
        if (i) os << ",";
        os << "{\"x\":" << format_double(l.source) << ",\"m\":" << format_double(l.mass())
           << ",\"target\":" << measure_to_json(l.target) << "}";
    }
    os << "]}";
    return os.str();
}

std::string trace_to_json(const BarcodeTrace& t) {
    std::ostringstream os;
    os << "{\"iterations\":[";
    for (std::size_t i = 0; i < t.iterations.size(); ++i) {
        const auto& it = t.iterations[i];
        if (i) os << ",";
        os << "{\"region\":[";
        for (std::size_t k = 0; k < it.region.size(); ++k) {
            if (k) os << ",";
            os << "[" << format_double(it.region[k].left) << ","
               << format_double(it.region[k].right) << "]";
        }
        os << "],\"mu_slice\":" << measure_to_json(it.mu_slice)
           << ",\"nu_slice\":" << measure_to_json(it.nu_slice)
           << ",\"residual_mass\":" << format_double(it.residual_mass) << "}";
    }
    os << "]}";
    return os.str();
}

std::string coupling_to_csv(const Coupling& c) {
    std::ostringstream os;
    os << "x,y_left,y_right,density,y_atom,mass\n";
    for (const auto& l : c.links()) {
        for (const auto& p : l.target.pieces())
            os << format_double(l.source) << "," << format_double(p.left) << ","
               << format_double(p.right) << "," << format_double(p.density) << ",,\n";
        for (const auto& a : l.target.atoms())
            os << format_double(l.source) << ",,,," << format_double(a.pos) << ","
               << format_double(a.mass) << "\n";
    }
    return os.str();
}

namespace {

template <typename T, typename Fmt>
void join(std::ostringstream& os, const std::vector<T>& xs, Fmt fmt) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ",";
        fmt(os, xs[i]);
    }
}

}  // namespace

std::string lp_instance_to_json(const LPInstance& inst) {
    std::ostringstream os;
    auto num = [](std::ostringstream& o, double v) { o << format_double(v); };
    os << "{\"x_grid\":[";
    join(os, inst.x_grid, num);
    os << "],\"y_grid\":[";
    join(os, inst.y_grid, num);
    os << "],\"mu_weights\":[";
    join(os, inst.mu_weights, num);
    os << "],\"nu_weights\":[";
    join(os, inst.nu_weights, num);
    os << "],\"objective\":[";
    join(os, inst.objective, [&](std::ostringstream& o, const std::vector<double>& row) {
        o << "[";
        join(o, row, num);
        o << "]";
    });
    os << "]}";
    return os.str();
}

std::string mot_solution_to_json(const MotSolution& sol) {
    std::ostringstream os;
    auto num = [](std::ostringstream& o, double v) { o << format_double(v); };
    os << "{\"value\":" << format_double(sol.value)
       << ",\"certified\":" << (sol.certified ? "true" : "false")
       << ",\"min_reduced_cost\":" << format_double(sol.min_reduced_cost) << ",\"plan\":[";
    join(os, sol.plan, [&](std::ostringstream& o, const std::vector<double>& row) {
        o << "[";
        join(o, row, num);
        o << "]";
    });
    os << "]}";
    return os.str();
}

Measure load_measure_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_measure(ss.str());
}

Coupling load_coupling_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_coupling(ss.str());
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

}  // namespace mmt
