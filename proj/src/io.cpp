#include "ffspin/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace ffspin::io {

namespace {

Complex parse_complex(const json& j, const std::string& where) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex(j[0].get<double>(), j[1].get<double>());
    throw ParseError(where + ": expected a number or [re, im] pair");
}

ComplexMatrix parse_matrix(const json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ParseError(where + ": expected a " + std::to_string(dim) + "x" +
                         std::to_string(dim) + " matrix");
    ComplexMatrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != dim)
            throw ParseError(where + ": row " + std::to_string(r) + " has wrong length");
        for (int c = 0; c < dim; ++c)
            m(r, c) = parse_complex(j[r][c], where);
    }
    return m;
}

json dump_complex(Complex z) { return json::array({z.real(), z.imag()}); }

json dump_matrix(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(dump_complex(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

HamiltonianSpec hamiltonian_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("hamiltonian: document must be an object");
    bool model_form = doc.contains("model");
    bool explicit_form = doc.contains("sites");
    if (model_form == explicit_form)
        throw ParseError("hamiltonian: exactly one of \"model\" or \"sites\" must be present");

    if (model_form) {
        ModelName name = model_from_string(doc.at("model").get<std::string>());
        if (!doc.contains("lattice"))
            throw ParseError("hamiltonian: model form needs a \"lattice\" object");
        const json& lat = doc.at("lattice");
        LatticeKind kind = lattice_from_string(lat.at("kind").get<std::string>());
        std::pair<int, int> dims{1, 1};
        const json& d = lat.at("dims");
        if (!d.is_array() || d.empty() || d.size() > 2)
            throw ParseError("hamiltonian: lattice dims must have 1 or 2 entries");
        dims.first = d[0].get<int>();
        dims.second = d.size() > 1 ? d[1].get<int>() : 1;
        double lambda = doc.value("lambda", 0.0);
        return named_model(name, build_lattice(kind, dims), lambda);
    }

    HamiltonianSpec spec;
    spec.system.n_sites = doc.at("sites").get<int>();
    if (spec.system.n_sites <= 0) throw ParseError("hamiltonian: sites must be positive");
    if (doc.contains("edges")) {
        for (const auto& ej : doc.at("edges")) {
            int a = ej.at("a").get<int>();
            int b = ej.at("b").get<int>();
            std::string where = "edge (" + std::to_string(a) + "," + std::to_string(b) + ")";
            if (a == b) throw ParseError(where + ": self-loop");
            if (a < 0 || b < 0 || a >= spec.system.n_sites || b >= spec.system.n_sites)
                throw ParseError(where + ": site index out of range");
            ComplexMatrix h = parse_matrix(ej.at("h"), 4, where);
            if (a > b) {
                // stored in |a b> order with a < b: conjugate by SWAP
                ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
                swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1;
                h = swap * h * swap;
            }
            if (!is_hermitian(h, 1e-9))
                throw ParseError(where + ": matrix is not Hermitian");
            Edge e(a, b);
            if (spec.two_spin_terms.count(e)) throw ParseError(where + ": duplicate edge");
            spec.system.edges.push_back(e);
            spec.two_spin_terms[e] = h;
        }
    }
    if (doc.contains("single")) {
        for (const auto& sj : doc.at("single")) {
            int v = sj.at("v").get<int>();
            std::string where = "single-spin term on site " + std::to_string(v);
            if (v < 0 || v >= spec.system.n_sites)
                throw ParseError(where + ": site index out of range");
            ComplexMatrix h = parse_matrix(sj.at("h"), 2, where);
            if (!is_hermitian(h, 1e-9))
                throw ParseError(where + ": matrix is not Hermitian");
            if (spec.single_spin_terms.count(v)) throw ParseError(where + ": duplicate site");
            spec.single_spin_terms[v] = h;
        }
    }
    spec.ground_shift = doc.value("ground_shift", 0.0);
    std::sort(spec.system.edges.begin(), spec.system.edges.end());
    spec.system.validate();
    return spec;
}

json hamiltonian_to_json(const HamiltonianSpec& spec) {
    json doc;
    doc["sites"] = spec.system.n_sites;
    json edges = json::array();
    for (const auto& [e, h] : spec.two_spin_terms) {
        json ej;
        ej["a"] = e.a;
        ej["b"] = e.b;
        ej["h"] = dump_matrix(h);
        edges.push_back(ej);
    }
    doc["edges"] = edges;
    if (!spec.single_spin_terms.empty()) {
        json singles = json::array();
        for (const auto& [v, h] : spec.single_spin_terms) {
            json sj;
            sj["v"] = v;
            sj["h"] = dump_matrix(h);
            singles.push_back(sj);
        }
        doc["single"] = singles;
    }
    if (spec.ground_shift != 0.0) doc["ground_shift"] = spec.ground_shift;
    return doc;
}

HamiltonianSpec load_hamiltonian(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        throw ParseError(path + ": " + ex.what());
    }
    return hamiltonian_from_json(doc);
}

Observable observable_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("terms"))
        throw ParseError("observable: expected {\"terms\": [...]}");
    Observable obs;
    for (const auto& tj : doc.at("terms")) {
        PauliTerm term;
        term.coefficient = parse_complex(tj.at("coeff"), "observable coeff");
        if (tj.contains("paulis")) {
            for (const auto& [key, val] : tj.at("paulis").items()) {
                int site = std::stoi(key);
                std::string axis = val.get<std::string>();
                if (axis.size() != 1 || (axis[0] != 'X' && axis[0] != 'Y' && axis[0] != 'Z'))
                    throw ParseError("observable: pauli axis must be X, Y or Z");
                term.paulis[site] = static_cast<PauliAxis>(axis[0]);
            }
        }
        obs.terms.push_back(std::move(term));
    }
    obs.validate_hermitian();
    return obs;
}

Observable load_observable(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        throw ParseError(path + ": " + ex.what());
    }
    return observable_from_json(doc);
}

json groundspace_to_json(const GroundSpaceModel& model) {
    json doc;
    doc["root_sites"] = model.root_sites;
    doc["dimension"] = model.dimension();
    json comps = json::array();
    for (const auto& cm : model.components) {
        json cj;
        cj["root"] = cm.root;
        cj["sites"] = cm.sites;
        json factors;
        for (const auto& [v, l] : cm.factors)
            factors[std::to_string(v)] = dump_matrix(l);
        cj["local_factors"] = factors;
        json alphas = json::array();
        for (size_t j = 0; j < cm.alphas.size(); ++j)
            alphas.push_back(j * 360.0 / cm.alphas.size());  // equatorial phase, degrees
        cj["alpha_phase_deg"] = alphas;
        comps.push_back(cj);
    }
    doc["components"] = comps;
    json steps = json::array();
    for (const auto& step : model.network.steps) {
        json sj;
        if (const auto* pc = std::get_if<PairContraction>(&step)) {
            sj["kind"] = "pair_contraction";
            sj["parent"] = pc->parent;
            sj["daughter"] = pc->daughter;
            sj["isometry"] = dump_matrix(pc->isometry);
        } else {
            const auto& sf = std::get<SpinFix>(step);
            sj["kind"] = "spin_fix";
            sj["site"] = sf.site;
            sj["state"] = json::array({dump_complex(sf.state(0)), dump_complex(sf.state(1))});
        }
        steps.push_back(sj);
    }
    doc["network"] = {{"leaves", model.network.n_leaves},
                      {"depth", model.network.depth()},
                      {"steps", steps}};
    return doc;
}

std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "lambda,method,energy,energy_per_site,bound_type,mz_per_site,ground_dim,"
           "runtime_ms,error\n";
    for (const auto& r : rows) {
        out << format_g12(r.lambda) << ',' << r.method << ',';
        if (r.energy) out << format_g12(*r.energy);
        out << ',';
        if (r.energy_per_site) out << format_g12(*r.energy_per_site);
        out << ',' << r.bound_type << ',';
        if (r.mz_per_site) out << format_g12(*r.mz_per_site);
        out << ',';
        if (r.ground_dim) out << *r.ground_dim;
        out << ',';
        if (r.runtime_ms) out << format_g12(*r.runtime_ms);
        out << ',';
        std::string err = r.error;
        for (char& c : err)
            if (c == ',' || c == '\n') c = ';';
        out << err << '\n';
    }
}

}  // namespace ffspin::io
