#include "ffspin/cli.hpp"

#include "ffspin/io.hpp"
#include "ffspin/oracle.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace ffspin::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitFrustrated = 2;
constexpr int kExitNotNatural = 3;

struct GlobalOptions {
    double tol = 1e-9;
    unsigned seed = 0x5eed;
    int oracle_limit = 20;
    int threads = 1;
};

ReduceConfig reduce_config(const GlobalOptions& g) {
    ReduceConfig cfg;
    cfg.tol = g.tol;
    return cfg;
}

std::vector<double> parse_lambda_grid(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    auto colon = std::count(text.begin(), text.end(), ':');
    if (colon == 2) {  // start:step:stop, inclusive
        double start, step, stop;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &step, &stop) != 3 ||
            step <= 0)
            throw ParseError("bad lambda range: " + text);
        for (double v = start; v <= stop + 1e-12; v += step) out.push_back(v);
        return out;
    }
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) out.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) out.push_back(tok);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int cmd_check(const std::string& path, const GlobalOptions& g) {
    HamiltonianSpec spec = io::load_hamiltonian(path);
    bool has_singles = !spec.single_spin_terms.empty();
    ReductionOutcome outcome;
    try {
        outcome = reduce(spec, reduce_config(g));
    } catch (const NotNatural& ex) {
        std::cout << "natural: no\n";
        std::cout << "reason: " << ex.what() << "\n";
        return kExitNotNatural;
    }
    if (is_frustrated(outcome)) {
        const auto& w = std::get<Frustrated>(outcome).witness;
        std::cout << "frustration-free: no\n";
        std::cout << "witness: " << w.kind;
        if (w.edge) std::cout << " on (" << w.edge->a << "," << w.edge->b << ")";
        if (w.site) std::cout << " on site " << *w.site;
        std::cout << "\n";
        return kExitFrustrated;
    }
    const auto& ch = std::get<CompleteHomogeneous>(outcome);
    std::cout << "frustration-free: yes\n";
    std::cout << "ground-dimension: " << ch.ground_dimension() << "\n";
    std::cout << "n-c: " << ch.network.root_sites.size() << "\n";
    std::cout << "components: " << ch.components.size() << "\n";
    std::cout << "network-depth: " << ch.network.depth() << "\n";
    std::cout << "single-spin-terms: " << (has_singles ? "present (accepted)" : "none")
              << "\n";
    return kExitOk;
}

int cmd_expect(const std::string& path, const std::vector<std::string>& obs_paths,
               const GlobalOptions& g) {
    HamiltonianSpec spec = io::load_hamiltonian(path);
    for (const auto& op : obs_paths) {
        Observable obs = io::load_observable(op);
        double value;
        try {
            value = ground_expectation(spec, obs, reduce_config(g));
        } catch (const FrustratedInput& ex) {
            std::cerr << ex.what() << "\n";
            return kExitFrustrated;
        }
        std::cout << io::format_g12(value) << "\n";
    }
    return kExitOk;
}

int cmd_groundspace(const std::string& path, const std::string& out_path,
                    const GlobalOptions& g) {
    HamiltonianSpec spec = io::load_hamiltonian(path);
    ReductionOutcome outcome = reduce(spec, reduce_config(g));
    if (is_frustrated(outcome)) {
        std::cerr << "input is frustrated; no ground-space model\n";
        return kExitFrustrated;
    }
    GroundSpaceModel model = local_factors(std::get<CompleteHomogeneous>(outcome));
    io::json doc = io::groundspace_to_json(model);
    if (out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream out(out_path, std::ios::binary);
        out << doc.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_estimate(const std::string& path, const std::string& method, bool want_mz,
                 int restarts, int budget, const GlobalOptions& g) {
    HamiltonianSpec spec = io::load_hamiltonian(path);
    EstimateOptions opts;
    opts.compute_mz = want_mz;
    opts.restarts = restarts;
    opts.budget_sweeps = budget;
    opts.seed = g.seed;

    EstimateResult er;
    if (method == "symmetric") {
        er = symmetric_estimate(spec, opts);
    } else if (method == "product") {
        er = product_mean_field(spec, opts);
    } else if (method == "anderson") {
        er = anderson_bound(spec);
    } else if (method == "rotated") {
        er = rotated_symmetric_estimate(spec, opts);
    } else if (method == "qsym") {
        auto [layer, reduced] = build_q_layer(spec, greedy_matching(spec.system));
        er = symmetric_estimate(reduced, opts);
        er.method = "qsym";
    } else if (method == "ed") {
        oracle::OracleOptions oopts;
        oopts.size_limit = g.oracle_limit;
        oopts.seed = g.seed;
        auto ed = oracle::exact_ground(spec, 6, oopts);
        er.method = "ed";
        er.energy = ed.energy;
        er.bound = BoundType::Exact;
        er.subspace_dim = ed.degeneracy;
    } else {
        throw ParseError("unknown method: " + method);
    }
    int n = spec.system.n_sites;
    std::cout << "method: " << er.method << "\n";
    std::cout << "energy: " << io::format_g12(er.energy) << "\n";
    std::cout << "energy-per-site: " << io::format_g12(er.energy / n) << "\n";
    std::cout << "bound: " << to_string(er.bound) << "\n";
    std::cout << "subspace-dim: " << er.subspace_dim << "\n";
    if (auto it = er.observables.find("mz_per_site"); it != er.observables.end())
        std::cout << "mz-per-site: " << io::format_g12(it->second) << "\n";
    return kExitOk;
}

int cmd_sweep(const SweepRequest& req, const std::string& out_path) {
    auto rows = lambda_sweep(req);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ParseError("cannot open output file " + out_path);
    io::write_sweep_csv(out, rows);
    std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
    return kExitOk;
}

int cmd_ed(const std::string& path, int k, const GlobalOptions& g) {
    HamiltonianSpec spec = io::load_hamiltonian(path);
    oracle::OracleOptions oopts;
    oopts.size_limit = g.oracle_limit;
    oopts.seed = g.seed;
    auto ed = oracle::exact_ground(spec, k, oopts);
    std::cout << "energy: " << io::format_g12(ed.energy) << "\n";
    std::cout << "degeneracy: " << ed.degeneracy << "\n";
    std::cout << "path: " << (ed.dense_path ? "dense" : "lanczos") << "\n";
    std::cout << "eigenvalues:";
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i)
        std::cout << " " << io::format_g12(ed.eigenvalues(i));
    std::cout << "\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"ffspin: exact ground spaces of frustration-free spin-1/2 models"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand

    GlobalOptions g;
    app.add_option("--tol", g.tol, "relative rank/kernel tolerance")->capture_default_str();
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--oracle-limit", g.oracle_limit, "max sites for exact diagonalization")
        ->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for sweeps")
        ->capture_default_str();

    std::string input, out_path, method = "symmetric";
    std::vector<std::string> obs_paths;
    bool want_mz = false;
    int restarts = 8, budget = 3, ed_k = 6;

    auto* check = app.add_subcommand("check", "decide frustration-freeness");
    check->add_option("input", input, "Hamiltonian JSON file")->required();

    auto* expect = app.add_subcommand("expect", "ground-manifold expectation values");
    expect->add_option("input", input, "Hamiltonian JSON file")->required();
    expect->add_option("--observable", obs_paths, "observable JSON file")->required();

    auto* gspace = app.add_subcommand("groundspace", "dump the ground-space model");
    gspace->add_option("input", input, "Hamiltonian JSON file")->required();
    gspace->add_option("-o,--output", out_path, "output JSON path (default stdout)");

    auto* estimate = app.add_subcommand("estimate", "variational energy estimates");
    estimate->add_option("input", input, "Hamiltonian JSON file")->required();
    estimate->add_option("--method", method,
                         "symmetric|product|anderson|rotated|qsym|ed")
        ->capture_default_str();
    estimate->add_flag("--mz", want_mz, "report z magnetization per site");
    estimate->add_option("--restarts", restarts, "product-state restarts")
        ->capture_default_str();
    estimate->add_option("--budget", budget, "rotation optimizer sweeps")
        ->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "lambda sweep to CSV");
    std::string model_name = "xxz", lattice_name = "trigonal_torus", lambdas_text = "0";
    std::string methods_text = "symmetric,product,ed,anderson", observables_text;
    std::vector<int> dims = {3, 3};
    bool timings = false;
    sweep->add_option("--model", model_name, "xxz|tfi|heisenberg_ferro|singlet_sum")
        ->capture_default_str();
    sweep->add_option("--lattice", lattice_name, "chain|square_torus|trigonal_torus")
        ->capture_default_str();
    sweep->add_option("--dims", dims, "lattice dimensions")->expected(1, 2);
    sweep->add_option("--lambdas", lambdas_text, "comma list or start:step:stop")
        ->capture_default_str();
    sweep->add_option("--methods", methods_text, "comma-separated method list")
        ->capture_default_str();
    sweep->add_option("--observables", observables_text, "comma list, e.g. mz");
    sweep->add_flag("--timings", timings, "fill the runtime_ms column");
    sweep->add_option("-o,--output", out_path, "output CSV path")->required();

    auto* ed = app.add_subcommand("ed", "brute-force exact diagonalization");
    ed->add_option("input", input, "Hamiltonian JSON file")->required();
    ed->add_option("-k", ed_k, "number of lowest eigenvalues")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (check->parsed()) return cmd_check(input, g);
        if (expect->parsed()) return cmd_expect(input, obs_paths, g);
        if (gspace->parsed()) return cmd_groundspace(input, out_path, g);
        if (estimate->parsed()) return cmd_estimate(input, method, want_mz, restarts, budget, g);
        if (sweep->parsed()) {
            SweepRequest req;
            req.model = model_from_string(model_name);
            req.lattice = lattice_from_string(lattice_name);
            req.dims = {dims.at(0), dims.size() > 1 ? dims.at(1) : 1};
            req.lambdas = parse_lambda_grid(lambdas_text);
            req.methods = split_csv(methods_text);
            req.observables = split_csv(observables_text);
            req.seed = g.seed;
            req.threads = g.threads;
            req.timings = timings;
            req.oracle_size_limit = g.oracle_limit;
            return cmd_sweep(req, out_path);
        }
        if (ed->parsed()) return cmd_ed(input, ed_k, g);
    } catch (const NotNatural& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitNotNatural;
    } catch (const FrustratedInput& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitFrustrated;
    } catch (const ParseError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitParse;
    } catch (const Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitParse;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitParse;
    }
    return kExitOk;
}

}  // namespace ffspin::cli
