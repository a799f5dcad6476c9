#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "resim/bench.hpp"
#include "resim/local_grid.hpp"
#include "resim/matrix_market.hpp"

using namespace resim;

namespace {

struct SolveArgs {
    std::string problem = "poisson3d";
    Index nx = 10, ny = 10, nz = 10;
    int np = 1;
    std::vector<int> np_list;
    std::string solver = "gmres";
    std::string pc = "ras";
    std::string partition = "hsfc";
    double rtol = 1e-6, atol = 1e-50, btol = 0.0;
    int maxit = 1000, restart = 30;
    std::uint64_t seed = 1;
    double contrast = 1.0, coupling = 0.1;
    int threads = 0;
    // preconditioner parameters
    int overlap = 1;
    std::string ilu = "iluk";
    int iluk_level = 0, ilut_p = -1;
    double ilut_tol = 1e-3, filter_tol = 1e-4;
    int amg_levels = 6, amg_sweeps = 2;
    double amg_strength = 0.5, amg_max_row_sum = 0.9;
    bool decouple = false;
    std::string matrix, rhs;
    std::string out, json, history;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) fail(Errc::io_error, "cannot write " + path);
    f << text;
}

template <class Writer, class Rows>
std::string render(Writer w, const Rows& rows) {
    std::ostringstream s;
    w(s, rows);
    return s.str();
}

void add_problem_options(CLI::App* cmd, SolveArgs& a) {
    cmd->add_option("--problem", a.problem, "poisson3d | hetero | coupled2");
    cmd->add_option("--nx", a.nx)->check(CLI::PositiveNumber);
    cmd->add_option("--ny", a.ny)->check(CLI::PositiveNumber);
    cmd->add_option("--nz", a.nz)->check(CLI::PositiveNumber);
    cmd->add_option("--seed", a.seed, "permeability seed");
    cmd->add_option("--contrast", a.contrast, "permeability contrast (>= 1)");
    cmd->add_option("--coupling", a.coupling, "coupled2 cross-unknown scale in [0, 0.1]");
    cmd->add_option("--partition", a.partition, "hsfc | hsfc-nd | morton | block");
}

void add_solve_options(CLI::App* cmd, SolveArgs& a) {
    cmd->add_option("--np", a.np, "rank count")->check(CLI::PositiveNumber);
    cmd->add_option("--np-list", a.np_list, "several rank counts, run in order")->delimiter(',');
    cmd->add_option("--threads", a.threads, "ranks executing at once (0 = all)");
    cmd->add_option("--solver", a.solver, "gmres | bicgstab");
    cmd->add_option("--pc", a.pc, "ras | amg | cpr-fp | cpr-pf | cpr-fpf | cpr-ffpf | none");
    cmd->add_option("--rtol", a.rtol);
    cmd->add_option("--atol", a.atol);
    cmd->add_option("--btol", a.btol);
    cmd->add_option("--maxit", a.maxit);
    cmd->add_option("--restart", a.restart);
    cmd->add_option("--overlap", a.overlap);
    cmd->add_option("--ilu", a.ilu, "ilu0 | iluk | ilut");
    cmd->add_option("--iluk-level", a.iluk_level);
    cmd->add_option("--ilut-p", a.ilut_p);
    cmd->add_option("--ilut-tol", a.ilut_tol);
    cmd->add_option("--filter-tol", a.filter_tol);
    cmd->add_option("--amg-levels", a.amg_levels);
    cmd->add_option("--amg-strength", a.amg_strength);
    cmd->add_option("--amg-max-row-sum", a.amg_max_row_sum);
    cmd->add_option("--amg-sweeps", a.amg_sweeps);
    cmd->add_flag("--decouple", a.decouple, "scale by the inverse block diagonal before CPR");
    cmd->add_option("--matrix", a.matrix, "Matrix Market system instead of a generated problem");
    cmd->add_option("--rhs", a.rhs, "Matrix Market right-hand side (default A*1)");
    cmd->add_option("--out", a.out, "results CSV ('-' for stdout)");
    cmd->add_option("--json", a.json, "results JSON");
    cmd->add_option("--history", a.history, "residual history CSV");
}

ProblemSpec problem_of(const SolveArgs& a) {
    ProblemSpec p;
    p.kind = problem_kind_from_string(a.problem);
    p.nx = a.nx;
    p.ny = a.ny;
    p.nz = a.nz;
    p.seed = a.seed;
    p.contrast = a.contrast;
    p.coupling = a.coupling;
    p.validate();
    return p;
}

SolverConfig solver_of(const SolveArgs& a) {
    SolverConfig c;
    c.method = solver_method_from_string(a.solver);
    c.rtol = a.rtol;
    c.atol = a.atol;
    c.btol = a.btol;
    c.maxit = a.maxit;
    c.restart = a.restart;
    c.validate();
    return c;
}

PcConfig pc_of(const SolveArgs& a) {
    PcConfig c;
    c.kind = pc_kind_from_string(a.pc);
    c.ras.overlap = a.overlap;
    c.ras.ilu.variant = ilu_variant_from_string(a.ilu);
    c.ras.ilu.level = a.iluk_level;
    c.ras.ilu.ilut_p = a.ilut_p;
    c.ras.ilu.ilut_tol = a.ilut_tol;
    c.ras.filter_tol = a.filter_tol;
    c.amg.max_levels = a.amg_levels;
    c.amg.strength = a.amg_strength;
    c.amg.max_row_sum = a.amg_max_row_sum;
    c.amg.sweeps = a.amg_sweeps;
    c.decouple = a.decouple;
    c.ras.validate();
    c.amg.validate();
    return c;
}

void emit(const SolveArgs& a, const ExperimentReport& rep) {
    if (!a.out.empty()) write_text(a.out, render(write_solver_csv, rep.solves));
    if (!a.json.empty()) write_text(a.json, to_json(rep));
    if (!a.history.empty()) write_text(a.history, render(write_history_csv, rep.solves));
    if (a.out != "-") {
        for (const auto& r : rep.solves) {
            std::printf("%s np=%d %s+%s: %d iterations, %s, residual %.3e -> %.3e, %.3fs\n", r.problem.c_str(), r.np,
                        r.solver.c_str(), r.pc.c_str(), r.iterations, r.stop_reason.c_str(), r.initial_residual,
                        r.final_residual, r.times.overall);
        }
    }
}

int run_solve(const SolveArgs& a) {
    std::vector<int> nps = a.np_list.empty() ? std::vector<int>{a.np} : a.np_list;
    GroupOptions group;
    group.max_active = a.threads;
    ExperimentReport rep;
    rep.kind = "solve";
    if (!a.matrix.empty()) {
        auto m = mm_read(a.matrix);
        std::vector<double> b;
        if (a.rhs.empty()) b = m.multiply(std::vector<double>(m.ncols, 1.0));
        else b = mm_read_vector(a.rhs);
        auto pc = pc_of(a);
        const auto solver = solver_of(a);
        for (int np : nps) rep.solves.push_back(run_matrix_case(m, b, solver, pc, np, group));
    } else {
        SolverExperiment ex;
        ex.problem = problem_of(a);
        ex.solver = solver_of(a);
        ex.pc = pc_of(a);
        ex.partition = partition_method_from_string(a.partition);
        ex.np_list = nps;
        ex.group = group;
        rep = run_solver_experiment(ex);
    }
    emit(a, rep);
    for (const auto& r : rep.solves) {
        if (!r.converged) return 2;
    }
    return 0;
}

int run_export(const SolveArgs& a, const std::string& dir) {
    const auto spec = problem_of(a);
    StructuredGrid grid(spec.grid());
    auto part = partition_block(grid, 1);
    spawn_ranks(1, [&](Comm& c) {
        auto sys = generate(c, spec, grid, part);
        mm_write(dir + "/A.mtx", sys.A.gather_global(c));
        mm_write(dir + "/b.mtx", gather_all(c, sys.b));
    });
    std::printf("wrote %s/A.mtx and %s/b.mtx\n", dir.c_str(), dir.c_str());
    return 0;
}

// Owner rank of every cell, one CSV row per cell.
int run_grid(const SolveArgs& a, const std::string& path) {
    const auto spec = problem_of(a);
    auto grid = std::make_shared<const StructuredGrid>(spec.grid());
    auto part = make_partition(*grid, a.np, partition_method_from_string(a.partition));
    spawn_ranks(a.np, [&](Comm& c) {
        auto local = std::make_shared<LocalGrid>(grid, part, c.rank());
        auto owner = dof_create(local, "owner", DofKind::cell, 1);
        std::fill(owner.values().begin(), owner.values().end(), static_cast<double>(c.rank()));
        write_field_csv(c, owner, path);
    });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partitioning and linear-solver benchmarks on simulated ranks"};
    app.set_config("--config", "", "read options from a TOML/INI file");
    app.require_subcommand(1);

    Index nx = 8, ny = 8, nz = 8;
    std::vector<int> np_list{2, 4, 8};
    std::string methods = "hsfc,morton,block", part_out = "-", part_json, grid_json;
    auto* part = app.add_subcommand("partition", "partition quality metrics");
    part->add_option("--nx", nx)->check(CLI::PositiveNumber);
    part->add_option("--ny", ny)->check(CLI::PositiveNumber);
    part->add_option("--nz", nz)->check(CLI::PositiveNumber);
    part->add_option("--np-list", np_list)->delimiter(',');
    part->add_option("--methods", methods, "comma list of hsfc, hsfc-nd, morton, block");
    part->add_option("--grid", grid_json, "grid description JSON (overrides --nx/--ny/--nz)");
    part->add_option("--out", part_out, "CSV path ('-' for stdout)");
    part->add_option("--json", part_json, "JSON path");

    SolveArgs sargs;
    auto* solve_cmd = app.add_subcommand("solve", "generate or load a system and solve it");
    add_problem_options(solve_cmd, sargs);
    add_solve_options(solve_cmd, sargs);

    SolveArgs eargs;
    std::string export_dir = ".";
    auto* export_cmd = app.add_subcommand("export", "write a generated system as Matrix Market");
    add_problem_options(export_cmd, eargs);
    export_cmd->add_option("--dir", export_dir);

    SolveArgs gargs;
    std::string grid_out = "owners.csv";
    auto* grid_cmd = app.add_subcommand("grid", "write the owner rank of every cell");
    add_problem_options(grid_cmd, gargs);
    grid_cmd->add_option("--np", gargs.np)->check(CLI::PositiveNumber);
    grid_cmd->add_option("--out", grid_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*part) {
            GridSpec g;
            if (!grid_json.empty()) {
                std::ifstream f(grid_json);
                if (!f) fail(Errc::io_error, "cannot read " + grid_json);
                std::stringstream text;
                text << f.rdbuf();
                g = grid_spec_from_json(text.str());
            } else {
                ProblemSpec p;
                p.nx = nx;
                p.ny = ny;
                p.nz = nz;
                g = p.grid();
            }
            std::vector<PartitionMethod> ms;
            for (const auto& m : split_list(methods)) ms.push_back(partition_method_from_string(m));
            auto rep = run_partition_experiment(g, ms, np_list);
            write_text(part_out, render(write_partition_csv, rep.partitions));
            if (!part_json.empty()) write_text(part_json, to_json(rep));
            return 0;
        }
        if (*solve_cmd) return run_solve(sargs);
        if (*export_cmd) return run_export(eargs, export_dir);
        if (*grid_cmd) return run_grid(gargs, grid_out);
    } catch (const Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(e.code())).c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
