#include "resim/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "json.hpp"

namespace resim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1) from (seed, stream, index).
double hashed_unit(std::uint64_t seed, std::uint64_t stream, Index g) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(stream * 0x100000001b3ULL + static_cast<std::uint64_t>(g)));
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

struct RowNumbering {
    std::vector<Index> cell_offset;
    const Partition* part;
    int dofs;

    RowNumbering(const Partition& p, int d) : cell_offset(p.np + 1, 0), part(&p), dofs(d) {
        for (int r = 0; r < p.np; ++r) cell_offset[r + 1] = cell_offset[r] + p.size(r);
    }
    Index row(Index g, int u = 0) const {
        return (cell_offset[part->owner[g]] + part->local_index[g]) * dofs + u;
    }
    std::shared_ptr<const IndexMap> map(int rank) const {
        std::vector<Index> off(cell_offset.size());
        for (std::size_t i = 0; i < off.size(); ++i) off[i] = cell_offset[i] * dofs;
        return std::make_shared<const IndexMap>(rank, std::move(off));
    }
};

void check_partition(const StructuredGrid& grid, const Partition& part, const Comm& comm) {
    if (part.ncells() != grid.ncells()) fail(Errc::invalid_argument, "partition does not match grid");
    if (part.np != comm.size()) fail(Errc::invalid_argument, "partition rank count differs from the group size");
}

// b = A * 1 after assembly.
LinearSystem finish(Comm& comm, DistMatrix a, BlockLayout layout, GenTimings* t, Clock::time_point t0) {
    if (t) t->building = seconds_since(t0);
    const auto t1 = Clock::now();
    a.assemble(comm);
    if (t) t->assemble = seconds_since(t1);
    DistVector ones(a.row_map(), 1.0), b(a.row_map());
    a.spmv(comm, 1.0, ones, 0.0, b);
    return {std::move(a), std::move(b), layout};
}

template <class Perm>
void add_diffusion_row(DistMatrix& a, const StructuredGrid& grid, const RowNumbering& rows, Index g, int u, Perm&& k,
                       double& diag_out) {
    const Index r = rows.row(g, u);
    const double kg = k(g);
    double diag = 0.0;
    for (int f = 0; f < kFaces; ++f) {
        auto nb = grid.neighbor(g, f);
        if (!nb) {
            diag += kg;
            continue;
        }
        const double kn = k(*nb);
        const double t = 2.0 * kg * kn / (kg + kn);
        diag += t;
        a.add_entry(r, rows.row(*nb, u), -t);
    }
    a.add_entry(r, r, diag);
    diag_out = diag;
}

}  // namespace

std::string_view to_string(ProblemKind k) noexcept {
    switch (k) {
        case ProblemKind::poisson3d: return "poisson3d";
        case ProblemKind::hetero: return "hetero";
        case ProblemKind::coupled2: return "coupled2";
    }
    return "?";
}

ProblemKind problem_kind_from_string(std::string_view name) {
    if (name == "poisson3d" || name == "poisson") return ProblemKind::poisson3d;
    if (name == "hetero" || name == "hetero_pressure" || name == "hetero-pressure") return ProblemKind::hetero;
    if (name == "coupled2") return ProblemKind::coupled2;
    fail(Errc::invalid_kind, "unknown problem '" + std::string(name) + "'");
}

void ProblemSpec::validate() const {
    if (nx < 1 || ny < 1 || nz < 1) fail(Errc::invalid_argument, "problem dimensions must be >= 1");
    if (!(contrast >= 1.0)) fail(Errc::invalid_argument, "contrast must be >= 1");
    if (!(coupling >= 0.0 && coupling <= 0.1)) fail(Errc::invalid_argument, "coupling must lie in [0, 0.1]");
}

GridSpec ProblemSpec::grid() const {
    GridSpec g;
    g.ncx = nx;
    g.ncy = ny;
    g.ncz = nz;
    g.bbox = {{0.0, 0.0, 0.0}, {static_cast<double>(nx), static_cast<double>(ny), static_cast<double>(nz)}};
    return g;
}

double permeability(Index g, double contrast, std::uint64_t seed) {
    if (contrast == 1.0) return 1.0;
    const double u1 = hashed_unit(seed, 1, g);
    const double u2 = hashed_unit(seed, 2, g);
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return std::exp(0.5 * std::log(contrast) * z);
}

LinearSystem gen_hetero_pressure(Comm& comm, const StructuredGrid& grid, const Partition& part, double contrast,
                                 std::uint64_t seed, GenTimings* t) {
    check_partition(grid, part, comm);
    if (!(contrast >= 1.0)) fail(Errc::invalid_argument, "contrast must be >= 1");
    const auto t0 = Clock::now();
    RowNumbering rows(part, 1);
    DistMatrix a(rows.map(comm.rank()));
    auto k = [&](Index g) { return permeability(g, contrast, seed); };
    double d;
    for (Index g : part.members[comm.rank()]) add_diffusion_row(a, grid, rows, g, 0, k, d);
    return finish(comm, std::move(a), BlockLayout{1, 0}, t, t0);
}

LinearSystem gen_poisson3d(Comm& comm, const StructuredGrid& grid, const Partition& part, GenTimings* t) {
    check_partition(grid, part, comm);
    const auto t0 = Clock::now();
    RowNumbering rows(part, 1);
    DistMatrix a(rows.map(comm.rank()));
    for (Index g : part.members[comm.rank()]) {
        const Index r = rows.row(g);
        for (int f = 0; f < kFaces; ++f) {
            if (auto nb = grid.neighbor(g, f)) a.add_entry(r, rows.row(*nb), -1.0);
        }
        a.add_entry(r, r, 6.0);
    }
    return finish(comm, std::move(a), BlockLayout{1, 0}, t, t0);
}

LinearSystem gen_coupled2(Comm& comm, const StructuredGrid& grid, const Partition& part, double contrast,
                          std::uint64_t seed, double coupling, GenTimings* t) {
    check_partition(grid, part, comm);
    if (!(contrast >= 1.0)) fail(Errc::invalid_argument, "contrast must be >= 1");
    if (!(coupling >= 0.0 && coupling <= 0.1)) fail(Errc::invalid_argument, "coupling must lie in [0, 0.1]");
    const auto t0 = Clock::now();
    RowNumbering rows(part, 2);
    DistMatrix a(rows.map(comm.rank()));
    auto k = [&](Index g) { return permeability(g, contrast, seed); };
    auto mass = [&](Index g) { return 1.0 + hashed_unit(seed, 3, g); };
    for (Index g : part.members[comm.rank()]) {
        const Index rp = rows.row(g, 0);
        const Index rs = rows.row(g, 1);
        double dpp;
        add_diffusion_row(a, grid, rows, g, 0, k, dpp);
        if (coupling > 0.0) a.add_entry(rp, rs, coupling * (2.0 * hashed_unit(seed, 4, g) - 1.0) * dpp);

        const double m = mass(g);
        a.add_entry(rs, rs, m);
        double tsum = 0.0;
        std::array<double, kFaces> tf{};
        for (int f = 0; f < kFaces; ++f) {
            auto nb = grid.neighbor(g, f);
            if (!nb) continue;
            a.add_entry(rs, rows.row(*nb, 1), -0.05 * std::sqrt(m * mass(*nb)));
            const double kg = k(g), kn = k(*nb);
            tf[f] = 2.0 * kg * kn / (kg + kn);
            tsum += tf[f];
        }
        if (coupling > 0.0) {
            // flux-like: own pressure against a transmissibility-weighted neighbor average
            a.add_entry(rs, rp, 0.5 * coupling * m);
            for (int f = 0; f < kFaces; ++f) {
                auto nb = grid.neighbor(g, f);
                if (nb && tsum > 0.0) a.add_entry(rs, rows.row(*nb, 0), -0.5 * coupling * m * tf[f] / tsum);
            }
        }
    }
    return finish(comm, std::move(a), BlockLayout{2, 0}, t, t0);
}

LinearSystem generate(Comm& comm, const ProblemSpec& spec, const StructuredGrid& grid, const Partition& part,
                      GenTimings* t) {
    spec.validate();
    switch (spec.kind) {
        case ProblemKind::poisson3d: return gen_poisson3d(comm, grid, part, t);
        case ProblemKind::hetero: return gen_hetero_pressure(comm, grid, part, spec.contrast, spec.seed, t);
        case ProblemKind::coupled2:
            return gen_coupled2(comm, grid, part, spec.contrast, spec.seed, spec.coupling, t);
    }
    fail(Errc::invalid_kind, "unknown problem kind");
}

ExperimentReport run_partition_experiment(const GridSpec& spec, const std::vector<PartitionMethod>& methods,
                                          const std::vector<int>& np_list) {
    StructuredGrid grid(spec);
    ExperimentReport rep;
    rep.kind = "partition";
    for (int np : np_list) {
        for (auto m : methods) {
            const auto part = make_partition(grid, np, m);
            const auto q = partition_quality(grid, part);
            rep.partitions.push_back({std::string(to_string(m)), np, q.load_imbalance, q.surface.max, q.surface.global,
                                      q.surface.average, q.connectivity.max});
        }
    }
    return rep;
}

namespace {

struct RankResult {
    SolveReport report;
    double error_inf = 0.0;
    Index nrows = 0;
    PhaseTimes times;
};

}  // namespace

SolverRow run_solver_case(const SolverExperiment& ex, int np) {
    ex.problem.validate();
    ex.solver.validate();
    const auto start = Clock::now();
    auto grid = std::make_shared<const StructuredGrid>(ex.problem.grid());
    auto results = spawn_ranks(np, [&](Comm& comm) {
        RankResult out;
        comm.barrier();
        auto t0 = Clock::now();
        Partition part = ex.partition == PartitionMethod::block
                             ? partition_block(*grid, np)
                             : partition_sfc(comm, *grid,
                                             ex.partition == PartitionMethod::hsfc      ? sfc::Encoder::hilbert_3d_table
                                             : ex.partition == PartitionMethod::hsfc_nd ? sfc::Encoder::hilbert_nd
                                                                                        : sfc::Encoder::morton);
        comm.barrier();
        out.times.gridding = seconds_since(t0);

        GenTimings gt;
        auto sys = generate(comm, ex.problem, *grid, part, &gt);
        comm.barrier();
        out.times.building = gt.building;
        out.times.assemble = gt.assemble;

        t0 = Clock::now();
        PcConfig pcc = ex.pc;
        pcc.layout = sys.layout;
        auto pc = make_preconditioner(comm, sys.A, pcc);
        comm.barrier();
        out.times.setup = seconds_since(t0);

        t0 = Clock::now();
        DistVector x(sys.A.row_map());
        out.report = solve(comm, sys.A, sys.b, x, ex.solver, pc.get());
        comm.barrier();
        out.times.solve = seconds_since(t0);

        double e = 0.0;
        for (double v : x.owned()) e = std::max(e, std::abs(v - 1.0));
        out.error_inf = comm.allreduce_max(e);
        out.nrows = sys.A.nglobal_rows();
        return out;
    }, ex.group);
    auto& r0 = results[0];
    r0.times.overall = seconds_since(start);

    SolverRow row;
    row.problem = std::string(to_string(ex.problem.kind));
    row.nx = ex.problem.nx;
    row.ny = ex.problem.ny;
    row.nz = ex.problem.nz;
    row.nrows = r0.nrows;
    row.np = np;
    row.solver = std::string(to_string(ex.solver.method));
    row.pc = std::string(to_string(ex.pc.kind));
    row.iterations = r0.report.iterations;
    row.converged = r0.report.converged;
    row.stop_reason = std::string(to_string(r0.report.stop_reason));
    row.initial_residual = r0.report.initial_residual;
    row.final_residual = r0.report.final_residual;
    row.error_inf = r0.error_inf;
    row.times = r0.times;
    row.history = std::move(r0.report.history);
    return row;
}

ExperimentReport run_solver_experiment(const SolverExperiment& ex) {
    ExperimentReport rep;
    rep.kind = "solve";
    for (int np : ex.np_list) rep.solves.push_back(run_solver_case(ex, np));
    return rep;
}

SolverRow run_matrix_case(const CsrMatrix& a, const std::vector<double>& b, const SolverConfig& solver,
                          const PcConfig& pc, int np, GroupOptions group) {
    solver.validate();
    if (a.nrows != a.ncols || static_cast<Index>(b.size()) != a.nrows) {
        fail(Errc::invalid_argument, "system must be square with a matching right-hand side");
    }
    if (np < 1 || np > a.nrows) fail(Errc::too_many_ranks, "rank count must lie in [1, rows]");
    const auto start = Clock::now();
    auto results = spawn_ranks(np, [&](Comm& comm) {
        RankResult out;
        const auto t0 = Clock::now();
        auto map = IndexMap::block(comm.rank(), np, a.nrows);
        auto m = DistMatrix::from_global_csr(comm, a, map);
        auto bv = scatter(map, b);
        comm.barrier();
        out.times.assemble = seconds_since(t0);
        auto t1 = Clock::now();
        auto p = make_preconditioner(comm, m, pc);
        comm.barrier();
        out.times.setup = seconds_since(t1);
        t1 = Clock::now();
        DistVector x(map);
        out.report = solve(comm, m, bv, x, solver, p.get());
        comm.barrier();
        out.times.solve = seconds_since(t1);
        out.nrows = a.nrows;
        return out;
    }, group);
    auto& r0 = results[0];
    r0.times.overall = seconds_since(start);
    SolverRow row;
    row.problem = "file";
    row.nrows = a.nrows;
    row.np = np;
    row.solver = std::string(to_string(solver.method));
    row.pc = std::string(to_string(pc.kind));
    row.iterations = r0.report.iterations;
    row.converged = r0.report.converged;
    row.stop_reason = std::string(to_string(r0.report.stop_reason));
    row.initial_residual = r0.report.initial_residual;
    row.final_residual = r0.report.final_residual;
    row.error_inf = std::numeric_limits<double>::quiet_NaN();
    row.times = r0.times;
    row.history = std::move(r0.report.history);
    return row;
}

// ------------------------------------------------------------------ reports

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_of(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string to_json(const ExperimentReport& rep) {
    json j;
    j["schema"] = "resim-report";
    j["version"] = rep.version;
    j["kind"] = rep.kind;
    j["partitions"] = json::array();
    for (const auto& r : rep.partitions) {
        j["partitions"].push_back({{"method", r.method}, {"np", r.np}, {"f_p", r.f_p}, {"r_max", r.r_max},
                                   {"r_global", r.r_global}, {"r_avg", r.r_avg}, {"c", r.c}});
    }
    j["solves"] = json::array();
    for (const auto& r : rep.solves) {
        json h = json::array();
        for (double v : r.history) h.push_back(number(v));
        j["solves"].push_back({{"problem", r.problem},
                               {"nx", r.nx},
                               {"ny", r.ny},
                               {"nz", r.nz},
                               {"nrows", r.nrows},
                               {"np", r.np},
                               {"solver", r.solver},
                               {"pc", r.pc},
                               {"iterations", r.iterations},
                               {"converged", r.converged},
                               {"stop_reason", r.stop_reason},
                               {"initial_residual", number(r.initial_residual)},
                               {"final_residual", number(r.final_residual)},
                               {"error_inf", number(r.error_inf)},
                               {"times",
                                {{"gridding", r.times.gridding},
                                 {"building", r.times.building},
                                 {"assemble", r.times.assemble},
                                 {"setup", r.times.setup},
                                 {"solve", r.times.solve},
                                 {"overall", r.times.overall}}},
                               {"history", h}});
    }
    return j.dump(2);
}

ExperimentReport report_from_json(std::string_view text) {
    json j = json::parse(text.begin(), text.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(Errc::parse_error, "report is not a JSON object");
    try {
        if (j.value("schema", "") != "resim-report") fail(Errc::parse_error, "not a report document");
        ExperimentReport rep;
        rep.version = j.at("version").get<int>();
        if (rep.version != ExperimentReport::kVersion) {
            fail(Errc::parse_error, "unsupported report version " + std::to_string(rep.version));
        }
        rep.kind = j.at("kind").get<std::string>();
        for (const auto& r : j.at("partitions")) {
            rep.partitions.push_back({r.at("method").get<std::string>(), r.at("np").get<int>(),
                                      r.at("f_p").get<double>(), r.at("r_max").get<double>(),
                                      r.at("r_global").get<double>(), r.at("r_avg").get<double>(),
                                      r.at("c").get<int>()});
        }
        for (const auto& r : j.at("solves")) {
            SolverRow s;
            s.problem = r.at("problem").get<std::string>();
            s.nx = r.at("nx").get<Index>();
            s.ny = r.at("ny").get<Index>();
            s.nz = r.at("nz").get<Index>();
            s.nrows = r.at("nrows").get<Index>();
            s.np = r.at("np").get<int>();
            s.solver = r.at("solver").get<std::string>();
            s.pc = r.at("pc").get<std::string>();
            s.iterations = r.at("iterations").get<int>();
            s.converged = r.at("converged").get<bool>();
            s.stop_reason = r.at("stop_reason").get<std::string>();
            s.initial_residual = number_of(r.at("initial_residual"));
            s.final_residual = number_of(r.at("final_residual"));
            s.error_inf = number_of(r.at("error_inf"));
            const auto& t = r.at("times");
            s.times = {t.at("gridding").get<double>(), t.at("building").get<double>(), t.at("assemble").get<double>(),
                       t.at("setup").get<double>(),    t.at("solve").get<double>(),    t.at("overall").get<double>()};
            for (const auto& h : r.at("history")) s.history.push_back(number_of(h));
            rep.solves.push_back(std::move(s));
        }
        return rep;
    } catch (const json::exception& e) {
        fail(Errc::parse_error, std::string("malformed report: ") + e.what());
    }
}

void write_partition_csv(std::ostream& out, const std::vector<PartitionRow>& rows) {
    out << "method,np,f_p,r_max,r_global,r_avg,c\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.np << ',' << fmt(r.f_p) << ',' << fmt(r.r_max) << ',' << fmt(r.r_global) << ','
            << fmt(r.r_avg) << ',' << r.c << '\n';
    }
}

void write_solver_csv(std::ostream& out, const std::vector<SolverRow>& rows) {
    out << "problem,nx,ny,nz,nrows,np,solver,pc,iterations,converged,stop_reason,initial_residual,final_residual,"
           "error_inf,t_gridding,t_building,t_assemble,t_setup,t_solve,t_overall\n";
    for (const auto& r : rows) {
        out << r.problem << ',' << r.nx << ',' << r.ny << ',' << r.nz << ',' << r.nrows << ',' << r.np << ','
            << r.solver << ',' << r.pc << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << r.stop_reason
            << ',' << fmt(r.initial_residual) << ',' << fmt(r.final_residual) << ',' << fmt(r.error_inf) << ','
            << fmt(r.times.gridding) << ',' << fmt(r.times.building) << ',' << fmt(r.times.assemble) << ','
            << fmt(r.times.setup) << ',' << fmt(r.times.solve) << ',' << fmt(r.times.overall) << '\n';
    }
}

void write_history_csv(std::ostream& out, const std::vector<SolverRow>& rows) {
    out << "np,iteration,residual\n";
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.history.size(); ++k) out << r.np << ',' << k << ',' << fmt(r.history[k]) << '\n';
    }
}

}  // namespace resim
