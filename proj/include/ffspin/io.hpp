#pragma once

#include "ffspin/groundspace.hpp"
#include "ffspin/model.hpp"
#include "ffspin/variational.hpp"

#include <iosfwd>
#include <string>

// vendored single-header nlohmann/json
#include "json.hpp"

namespace ffspin::io {

using json = nlohmann::json;

// Hamiltonian documents come in a model form
//   {"model": "xxz", "lattice": {"kind": "trigonal_torus", "dims": [3,3]}, "lambda": 0.2}
// or an explicit form
//   {"sites": N, "edges": [{"a":0,"b":1,"h":[[[re,im],...],...]}],
//    "single": [{"v":0,"h":[[[re,im],[re,im]],[[re,im],[re,im]]]}]}
HamiltonianSpec hamiltonian_from_json(const json& doc);
json hamiltonian_to_json(const HamiltonianSpec& spec);  // explicit form
HamiltonianSpec load_hamiltonian(const std::string& path);

// {"terms": [{"coeff": 1.0 or [re,im], "paulis": {"0": "Z", "4": "X"}}]}
Observable observable_from_json(const json& doc);
Observable load_observable(const std::string& path);

json groundspace_to_json(const GroundSpaceModel& model);

std::string format_g12(double v);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace ffspin::io
