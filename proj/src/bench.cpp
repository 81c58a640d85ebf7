#include "structmg/bench.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "structmg/krylov.hpp"
#include "structmg/mg.hpp"
#include "structmg/problems.hpp"

namespace structmg {

namespace {

std::array<int, 3> parse_triple(const std::string& text, const char* key) {
    std::array<int, 3> out{0, 0, 0};
    std::istringstream is(text);
    std::string tok;
    int i = 0;
    while (std::getline(is, tok, ',')) {
        if (i >= 3) throw std::invalid_argument(std::string(key) + ": expected at most 3 values");
        out[i++] = std::stoi(tok);
    }
    if (i == 1) out[1] = out[2] = out[0];
    else if (i != 3)
        throw std::invalid_argument(std::string(key) + ": expected 1 or 3 comma-separated values");
    return out;
}

int parse_axis(const std::string& v) {
    if (v == "x" || v == "0") return 0;
    if (v == "y" || v == "1") return 1;
    if (v == "z" || v == "2") return 2;
    throw std::invalid_argument("axis: expected x, y or z, got '" + v + "'");
}

bool parse_bool(const std::string& v, const char* key) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw std::invalid_argument(std::string(key) + ": expected a boolean, got '" + v + "'");
}

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <class T>
Problem<T> build_problem(const BenchConfig& cfg) {
    Problem<T> p = [&] {
        if (cfg.problem == "laplace") return laplace_3d7<T>(cfg.n);
        if (cfg.problem == "aniso") return aniso_3d7<T>(cfg.n, cfg.eps, cfg.axis);
        if (cfg.problem == "skew") return skewed_aniso_3d19<T>(cfg.n, cfg.eps, cfg.angle);
        throw std::invalid_argument("problem: unknown kind '" + cfg.problem +
                                    "' (supported: laplace, aniso, skew)");
    }();
    if (cfg.rhs == "random")
        randomize_rhs(p.b, cfg.seed);
    else if (cfg.rhs != "ones")
        throw std::invalid_argument("rhs: expected ones or random, got '" + cfg.rhs + "'");
    return p;
}

template <class T>
MgOptions mg_options(const BenchConfig& cfg) {
    MgOptions o;
    o.strides = cfg.strides;
    o.transfer = parse_transfer(cfg.transfer);
    o.scale_restriction = cfg.scale_restriction;
    o.smoother = parse_smoother(cfg.smoother);
    o.weight = cfg.weight;
    o.jacobi_weight = cfg.jacobi_weight;
    if (!cfg.ilu_mask.empty()) o.ilu_mask = parse_pattern(cfg.ilu_mask);
    o.pre_sweeps = cfg.pre_sweeps;
    o.post_sweeps = cfg.post_sweeps;
    o.max_levels = cfg.max_levels;
    o.coarsest_threshold = cfg.coarsest_threshold;
    o.min_coarsen_dim = cfg.min_coarsen_dim;
    o.workers = cfg.threads;
    return o;
}

template <class T>
Report run_typed(const BenchConfig& cfg) {
    Report rep;
    rep.config = cfg;
    par::set_team_size(cfg.threads);

    Problem<T> prob = build_problem<T>(cfg);
    GridVector<T> x(prob.A.grid);

    const double t0 = now_seconds();
    MgHierarchy<T> mg = MgHierarchy<T>::setup(prob.A, mg_options<T>(cfg));
    const double t1 = now_seconds();

    Preconditioner<T> M;
    if (!cfg.no_precond)
        M = [&mg](const GridVector<T>& r, GridVector<T>& z) { mg.apply_preconditioner(r, z); };

    const TolMode mode = parse_tol_mode(cfg.tol_mode);
    SolveStats st;
    const double t2 = now_seconds();
    if (cfg.solver == "cg")
        st = pcg(prob.A, prob.b, x, M, cfg.tol, mode, cfg.maxiter);
    else if (cfg.solver == "gmres")
        st = gmres(prob.A, prob.b, x, M, cfg.restart, cfg.tol, mode, cfg.maxiter);
    else
        throw std::invalid_argument("solver: unknown kind '" + cfg.solver +
                                    "' (supported: cg, gmres)");
    const double t3 = now_seconds();

    rep.levels = mg.num_levels();
    rep.iterations = st.iterations;
    rep.converged = st.converged;
    rep.t_setup = t1 - t0;
    rep.t_solve = t3 - t2;
    rep.t_single = st.iterations > 0 ? rep.t_solve / st.iterations : 0.0;
    rep.t_total = t3 - t0;
    rep.grid_complexity = mg.grid_complexity();
    rep.operator_complexity = mg.operator_complexity();
    rep.residual_history = std::move(st.residual_history);
    {
        std::ostringstream os;
        mg.print_summary(os);
        rep.summary = os.str();
    }

    const StructuredGrid& g = x.grid;
    std::vector<T> interior;
    interior.reserve(static_cast<std::size_t>(g.interior_count()));
    for (int ix = 0; ix < g.dims[0]; ++ix)
        for (int iy = 0; iy < g.dims[1]; ++iy)
            for (int iz = 0; iz < g.dims[2]; ++iz) interior.push_back(x.at_i(ix, iy, iz));
    rep.determinism_hash = fnv1a_hex(interior.data(), interior.size() * sizeof(T));
    return rep;
}

} // namespace

std::string fnv1a_hex(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void apply_kv(BenchConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "problem") cfg.problem = value;
    else if (key == "n") cfg.n = parse_triple(value, "n");
    else if (key == "eps") cfg.eps = std::stod(value);
    else if (key == "axis") cfg.axis = parse_axis(value);
    else if (key == "angle") cfg.angle = std::stod(value);
    else if (key == "rhs") cfg.rhs = value;
    else if (key == "seed") cfg.seed = std::stoul(value);
    else if (key == "prec") cfg.precision = value;
    else if (key == "smoother") cfg.smoother = value;
    else if (key == "ilu-mask") cfg.ilu_mask = value;
    else if (key == "transfer") cfg.transfer = value;
    else if (key == "strides") cfg.strides = parse_triple(value, "strides");
    else if (key == "weight") cfg.weight = std::stod(value);
    else if (key == "jacobi-weight") cfg.jacobi_weight = std::stod(value);
    else if (key == "pre-sweeps") cfg.pre_sweeps = std::stoi(value);
    else if (key == "post-sweeps") cfg.post_sweeps = std::stoi(value);
    else if (key == "max-levels") cfg.max_levels = std::stoi(value);
    else if (key == "coarsest-threshold") cfg.coarsest_threshold = std::stol(value);
    else if (key == "min-coarsen-dim") cfg.min_coarsen_dim = std::stoi(value);
    else if (key == "rscale") cfg.scale_restriction = parse_bool(value, "rscale");
    else if (key == "no-precond") cfg.no_precond = parse_bool(value, "no-precond");
    else if (key == "solver") cfg.solver = value;
    else if (key == "tol") cfg.tol = std::stod(value);
    else if (key == "tol-mode") cfg.tol_mode = value;
    else if (key == "maxiter") cfg.maxiter = std::stoi(value);
    else if (key == "restart") cfg.restart = std::stoi(value);
    else if (key == "threads") cfg.threads = std::stoi(value);
    else
        throw std::invalid_argument("config: unknown key '" + key +
                                    "' (see README for the full list)");
}

std::vector<std::pair<std::string, std::string>> load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open '" + path + "'");
    std::vector<std::pair<std::string, std::string>> kvs;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: '" + path + "' line " + std::to_string(lineno) +
                                     ": expected key = value");
        kvs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kvs;
}

void validate_config(const BenchConfig& cfg) {
    if (cfg.precision != "fp64" && cfg.precision != "fp32")
        throw std::invalid_argument("prec: expected fp64 or fp32, got '" + cfg.precision + "'");
    if (cfg.maxiter < 1) throw std::invalid_argument("maxiter: must be >= 1");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("tol: must be positive");
    if (cfg.pre_sweeps < 0 || cfg.post_sweeps < 0)
        throw std::invalid_argument("sweep counts must be >= 0");
    for (int ax = 0; ax < 3; ++ax)
        if (cfg.strides[ax] != 1 && cfg.strides[ax] != 2)
            throw std::invalid_argument("strides: entries must be 1 or 2");
    parse_smoother(cfg.smoother);
    parse_transfer(cfg.transfer);
    parse_tol_mode(cfg.tol_mode);
    if (!cfg.ilu_mask.empty()) parse_pattern(cfg.ilu_mask);
}

Report run_experiment(const BenchConfig& cfg) {
    validate_config(cfg);
    if (cfg.precision == "fp32") return run_typed<float>(cfg);
    return run_typed<double>(cfg);
}

std::vector<Report> sweep(const BenchConfig& base,
                          const std::vector<std::pair<std::string, std::vector<std::string>>>& vary,
                          bool parallel) {
    long total = 1;
    for (const auto& [key, values] : vary) {
        if (values.empty()) throw std::invalid_argument("sweep: empty value list for " + key);
        total *= static_cast<long>(values.size());
    }
    std::vector<Report> out(static_cast<std::size_t>(total));

    auto config_at = [&](long index) {
        BenchConfig cfg = base;
        long rest = index;
        for (auto it = vary.rbegin(); it != vary.rend(); ++it) {
            const long k = static_cast<long>(it->second.size());
            apply_kv(cfg, it->first, it->second[static_cast<std::size_t>(rest % k)]);
            rest /= k;
        }
        if (parallel) cfg.threads = 1; // runs already execute side by side
        return cfg;
    };
    auto run_one = [&](long i) {
        BenchConfig cfg;
        try {
            cfg = config_at(i);
            out[static_cast<std::size_t>(i)] = run_experiment(cfg);
        } catch (const std::exception& e) {
            out[static_cast<std::size_t>(i)].config = cfg;
            out[static_cast<std::size_t>(i)].error = e.what();
        }
    };

    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (long i = 0; i < total; ++i) run_one(i);
    } else {
        for (long i = 0; i < total; ++i) run_one(i);
    }
    return out;
}

namespace {

nlohmann::json config_json(const BenchConfig& c) {
    return nlohmann::json{{"problem", c.problem},
                          {"n", {c.n[0], c.n[1], c.n[2]}},
                          {"eps", c.eps},
                          {"axis", c.axis},
                          {"angle", c.angle},
                          {"rhs", c.rhs},
                          {"seed", c.seed},
                          {"prec", c.precision},
                          {"smoother", c.smoother},
                          {"ilu_mask", c.ilu_mask},
                          {"transfer", c.transfer},
                          {"strides", {c.strides[0], c.strides[1], c.strides[2]}},
                          {"weight", c.weight},
                          {"jacobi_weight", c.jacobi_weight},
                          {"pre_sweeps", c.pre_sweeps},
                          {"post_sweeps", c.post_sweeps},
                          {"max_levels", c.max_levels},
                          {"coarsest_threshold", c.coarsest_threshold},
                          {"min_coarsen_dim", c.min_coarsen_dim},
                          {"rscale", c.scale_restriction},
                          {"no_precond", c.no_precond},
                          {"solver", c.solver},
                          {"tol", c.tol},
                          {"tol_mode", c.tol_mode},
                          {"maxiter", c.maxiter},
                          {"restart", c.restart},
                          {"threads", c.threads}};
}

nlohmann::json report_to_json(const Report& r) {
    return nlohmann::json{{"config", config_json(r.config)},
                          {"levels", r.levels},
                          {"iterations", r.iterations},
                          {"converged", r.converged},
                          {"exit", r.error.empty() ? (r.converged ? "converged" : "maxiter")
                                                   : "error"},
                          {"t_setup_s", r.t_setup},
                          {"t_solve_s", r.t_solve},
                          {"t_single_s", r.t_single},
                          {"t_total_s", r.t_total},
                          {"grid_complexity", r.grid_complexity},
                          {"operator_complexity", r.operator_complexity},
                          {"residual_history", r.residual_history},
                          {"determinism_hash", r.determinism_hash},
                          {"error", r.error}};
}

} // namespace

std::string report_json(const Report& r) { return report_to_json(r).dump(2); }

std::string reports_json(const std::vector<Report>& rs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Report& r : rs) arr.push_back(report_to_json(r));
    return arr.dump(2);
}

std::string csv_header() {
    return "problem,nx,ny,nz,eps,axis,angle,rhs,seed,prec,smoother,ilu_mask,transfer,"
           "sx,sy,sz,weight,solver,tol,tol_mode,maxiter,restart,threads,levels,iterations,"
           "converged,t_setup_s,t_single_s,t_solve_s,t_total_s,grid_complexity,"
           "operator_complexity,determinism_hash,error";
}

std::string csv_row(const Report& r) {
    const BenchConfig& c = r.config;
    std::ostringstream os;
    os.precision(12);
    os << c.problem << ',' << c.n[0] << ',' << c.n[1] << ',' << c.n[2] << ',' << c.eps << ','
       << c.axis << ',' << c.angle << ',' << c.rhs << ',' << c.seed << ',' << c.precision << ','
       << c.smoother << ',' << c.ilu_mask << ',' << c.transfer << ',' << c.strides[0] << ','
       << c.strides[1] << ',' << c.strides[2] << ',' << c.weight << ',' << c.solver << ','
       << c.tol << ',' << c.tol_mode << ',' << c.maxiter << ',' << c.restart << ',' << c.threads
       << ',' << r.levels << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
       << r.t_setup << ',' << r.t_single << ',' << r.t_solve << ',' << r.t_total << ','
       << r.grid_complexity << ',' << r.operator_complexity << ',' << r.determinism_hash << ','
       << r.error;
    return os.str();
}

void write_reports(const std::string& path, const std::vector<Report>& rs) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_reports: cannot open '" + path + "'");
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
        f << csv_header() << '\n';
        for (const Report& r : rs) f << csv_row(r) << '\n';
    } else {
        f << (rs.size() == 1 ? report_json(rs.front()) : reports_json(rs)) << '\n';
    }
}

} // namespace structmg
