#pragma once

#include <string>

#include "mmt/builders.hpp"
#include "mmt/oracle.hpp"
#include "mmt/coupling.hpp"
#include "mmt/measure.hpp"

namespace mmt {

// Measure JSON: {"atoms": [[x, m], ...], "pieces": [[l, r, d], ...]}
// Coupling JSON: {"links": [{"x": ..., "m": ..., "target": <measure>}, ...]}
// Parsing normalizes to canonical form and rejects NaN/Inf and nonpositive
// masses or densities. All emitted floats carry 17 significant digits.

Measure parse_measure(const std::string& text);
Coupling parse_coupling(const std::string& text);

std::string measure_to_json(const Measure& m);
std::string coupling_to_json(const Coupling& c);
std::string trace_to_json(const BarcodeTrace& t);
std::string lp_instance_to_json(const LPInstance& inst);
std::string mot_solution_to_json(const MotSolution& sol);

// CSV rows: x,y_left,y_right,density,y_atom,mass (pieces fill the first
// group, atoms the second).
std::string coupling_to_csv(const Coupling& c);

std::string format_double(double v);  // %.17g

Measure load_measure_file(const std::string& path);
Coupling load_coupling_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mmt
