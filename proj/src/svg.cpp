#include "mmt/svg.hpp"

#include <algorithm>
#include <sstream>

#include "mmt/json_io.hpp"

namespace mmt {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 420.0;
constexpr double kStripHeight = 150.0;
constexpr double kMuBase = 180.0;  // baseline y of the mu strip (drawn upward)
constexpr double kNuBase = 400.0;

int shade(std::size_t iteration) {
    static constexpr int ramp[8] = {225, 64, 160, 16, 200, 104, 176, 48};
    return ramp[iteration % 8];
}

struct Scale {
    double lo, hi;
    double map(double x) const { return 20.0 + (x - lo) / (hi - lo) * (kWidth - 40.0); }
};

void emit_rect(std::ostringstream& os, double x, double y, double w, double h, int gray) {
    os << "<rect x=\"" << format_double(x) << "\" y=\"" << format_double(y) << "\" width=\""
       << format_double(w) << "\" height=\"" << format_double(h) << "\" fill=\"rgb(" << gray
       << "," << gray << "," << gray << ")\"/>\n";
}

void emit_slice(std::ostringstream& os, const Measure& slice, const Scale& sc, double base,
                double dens_scale, int gray) {
    for (const auto& p : slice.pieces()) {
        double h = std::min(kStripHeight, p.density * dens_scale);
        emit_rect(os, sc.map(p.left), base - h, sc.map(p.right) - sc.map(p.left), h, gray);
    }
    double atom_w = (kWidth - 40.0) * 0.004;
    for (const auto& a : slice.atoms())
        emit_rect(os, sc.map(a.pos) - 0.5 * atom_w, base - kStripHeight, atom_w, kStripHeight,
                  gray);
}

}  // namespace

std::string render_barcode_svg(const BarcodeTrace& trace, const Measure& mu, const Measure& nu) {
    Scale sc{std::min(mu.min_support(), nu.min_support()),
             std::max(mu.max_support(), nu.max_support())};
    if (!(sc.hi > sc.lo)) {
        sc.lo -= 1.0;
        sc.hi += 1.0;
    }
    double max_density = 1e-300;
    for (const auto& p : mu.pieces()) max_density = std::max(max_density, p.density);
    for (const auto& p : nu.pieces()) max_density = std::max(max_density, p.density);
    double dens_scale = kStripHeight / max_density;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(kWidth)
       << "\" height=\"" << format_double(kHeight) << "\" viewBox=\"0 0 "
       << format_double(kWidth) << " " << format_double(kHeight) << "\">\n";
    emit_rect(os, 0.0, 0.0, kWidth, kHeight, 255);

    if (trace.iterations.empty()) {
        emit_slice(os, mu, sc, kMuBase, dens_scale, shade(0));
        emit_slice(os, nu, sc, kNuBase, dens_scale, shade(0));
    } else {
        for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
            emit_slice(os, trace.iterations[i].mu_slice, sc, kMuBase, dens_scale, shade(i));
            emit_slice(os, trace.iterations[i].nu_slice, sc, kNuBase, dens_scale, shade(i));
        }
    }
    // baselines
    emit_rect(os, 20.0, kMuBase, kWidth - 40.0, 1.0, 0);
    emit_rect(os, 20.0, kNuBase, kWidth - 40.0, 1.0, 0);
    os << "</svg>\n";
    return os.str();
}

}  // namespace mmt
