#ifndef STRUCTMG_BENCH_HPP
#define STRUCTMG_BENCH_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace structmg {

/// One experiment: problem, multigrid configuration, Krylov solver.
/// Precedence when assembling: defaults, then config file, then CLI flags.
struct BenchConfig {
    std::string problem = "laplace"; // laplace | aniso | skew
    std::array<int, 3> n{32, 32, 32};
    double eps = 1e-3;
    int axis = 2; // strong axis for aniso (0=x, 1=y, 2=z)
    double angle = 45.0;
    std::string rhs = "ones"; // ones | random
    unsigned long seed = 0;
    std::string precision = "fp64"; // fp64 | fp32

    std::string smoother = "pgs"; // jacobi | pgs | sgs | lgs | ilu
    std::string ilu_mask;         // pattern name/text; empty: level's own pattern
    std::string transfer = "vertex"; // vertex | cell
    std::array<int, 3> strides{2, 2, 2};
    double weight = 1.0;
    double jacobi_weight = 0.8;
    int pre_sweeps = 1;
    int post_sweeps = 1;
    int max_levels = 20;
    long coarsest_threshold = 1000;
    int min_coarsen_dim = 8;
    bool scale_restriction = true;
    bool no_precond = false;

    std::string solver = "cg"; // cg | gmres
    double tol = 1e-9;
    std::string tol_mode = "rel"; // rel | abs
    int maxiter = 500;
    int restart = 10;
    int threads = 0; // 0: library default
};

struct Report {
    BenchConfig config;
    int levels = 0;
    int iterations = 0;
    bool converged = false;
    double t_setup = 0.0;
    double t_solve = 0.0;
    double t_single = 0.0;
    double t_total = 0.0;
    double grid_complexity = 0.0;
    double operator_complexity = 0.0;
    std::vector<double> residual_history;
    std::string determinism_hash;
    std::string summary; // per-level hierarchy table (not serialized)
    std::string error;   // nonempty when the run failed
};

/// Applies one "key = value" setting; throws with an actionable message on
/// unknown keys or malformed values.
void apply_kv(BenchConfig& cfg, const std::string& key, const std::string& value);

/// Reads a flat key=value file ('#' starts a comment).
std::vector<std::pair<std::string, std::string>> load_config_file(const std::string& path);

void validate_config(const BenchConfig& cfg);

/// Builds the problem, times setup and solve, and gathers the report.
Report run_experiment(const BenchConfig& cfg);

/// Cartesian sweep over the listed parameter values; per-run failures are
/// recorded in the row and the sweep continues. Row order is the row-major
/// order of the value lists regardless of execution order.
std::vector<Report> sweep(const BenchConfig& base,
                          const std::vector<std::pair<std::string, std::vector<std::string>>>& vary,
                          bool parallel = false);

std::string report_json(const Report& r);
std::string reports_json(const std::vector<Report>& rs);
std::string csv_header();
std::string csv_row(const Report& r);

/// Writes reports to `path`; format chosen by extension (.json or .csv).
void write_reports(const std::string& path, const std::vector<Report>& rs);

std::string fnv1a_hex(const void* data, std::size_t bytes);

} // namespace structmg

#endif
