#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "resim/bench.hpp"
#include "resim/matrix_market.hpp"

namespace py = pybind11;
using namespace resim;

namespace {

using IndexArray = py::array_t<Index, py::array::c_style | py::array::forcecast>;
using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <class T>
std::vector<T> to_vector(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
    return std::vector<T>(a.data(), a.data() + a.size());
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

CsrMatrix csr_from(Index nrows, Index ncols, const IndexArray& indptr, const IndexArray& indices,
                   const RealArray& data) {
    CsrMatrix a(nrows, ncols);
    a.row_ptr = to_vector(indptr);
    a.col_idx = to_vector(indices);
    a.values = to_vector(data);
    a.validate();
    a.sort_rows();
    return a;
}

py::dict csr_dict(const CsrMatrix& a) {
    py::dict d;
    d["shape"] = py::make_tuple(a.nrows, a.ncols);
    d["indptr"] = to_array(a.row_ptr);
    d["indices"] = to_array(a.col_idx);
    d["data"] = to_array(a.values);
    return d;
}

py::dict report_dict(const SolveReport& r, const std::vector<double>& x) {
    py::dict d;
    d["x"] = to_array(x);
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["stop_reason"] = std::string(to_string(r.stop_reason));
    d["initial_residual"] = r.initial_residual;
    d["final_residual"] = r.final_residual;
    d["history"] = r.history;
    return d;
}

PcConfig pc_config(const std::string& pc, int overlap, const std::string& ilu, int level, int amg_levels,
                   int unknowns) {
    PcConfig c;
    c.kind = pc_kind_from_string(pc);
    c.ras.overlap = overlap;
    c.ras.ilu.variant = ilu_variant_from_string(ilu);
    c.ras.ilu.level = level;
    c.amg.max_levels = amg_levels;
    c.layout.unknowns = unknowns;
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Rank-simulated grid partitioning, distributed sparse algebra and preconditioned Krylov solvers";

    // Raised as Error("<code>: <message>"); the module object keeps the type alive.
    static PyObject* error_type = py::exception<Error>(m, "Error", PyExc_RuntimeError).ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string msg = std::string(to_string(e.code())) + ": " + e.what();
            PyErr_SetString(error_type, msg.c_str());
        }
    });

    m.def(
        "sfc_encode",
        [](const std::string& encoder, const std::vector<std::uint32_t>& coord, unsigned level) {
            const auto key = sfc::encode(sfc::encoder_from_string(encoder), coord, level);
            return std::vector<std::uint32_t>(key.digits().begin(), key.digits().end());
        },
        py::arg("encoder"), py::arg("coord"), py::arg("level"),
        "Curve key digits (base 2^dim, most significant first) of a lattice point.");

    m.def(
        "sfc_index",
        [](const std::string& encoder, const std::vector<std::uint32_t>& coord, unsigned level) {
            return sfc::encode(sfc::encoder_from_string(encoder), coord, level).packed();
        },
        py::arg("encoder"), py::arg("coord"), py::arg("level"));

    m.def(
        "partition",
        [](Index nx, Index ny, Index nz, int np, const std::string& method) {
            ProblemSpec p;
            p.nx = nx;
            p.ny = ny;
            p.nz = nz;
            StructuredGrid grid(p.grid());
            return to_array(make_partition(grid, np, partition_method_from_string(method)).owner);
        },
        py::arg("nx"), py::arg("ny"), py::arg("nz"), py::arg("np"), py::arg("method") = "hsfc",
        "Owner rank of every cell of an nx x ny x nz unit grid.");

    m.def(
        "partition_quality",
        [](Index nx, Index ny, Index nz, const py::array_t<int, py::array::c_style | py::array::forcecast>& owner) {
            ProblemSpec p;
            p.nx = nx;
            p.ny = ny;
            p.nz = nz;
            StructuredGrid grid(p.grid());
            std::vector<int> own = to_vector(owner);
            const int np = own.empty() ? 1 : *std::max_element(own.begin(), own.end()) + 1;
            if (static_cast<Index>(own.size()) != grid.ncells()) fail(Errc::invalid_argument, "owner size differs from the grid");
            const auto q = partition_quality(grid, Partition::from_owner(np, std::move(own)));
            py::dict d;
            d["f_p"] = q.load_imbalance;
            d["r_max"] = q.surface.max;
            d["r_global"] = q.surface.global;
            d["r_avg"] = q.surface.average;
            d["c"] = q.connectivity.max;
            return d;
        },
        py::arg("nx"), py::arg("ny"), py::arg("nz"), py::arg("owner"));

    m.def(
        "generate",
        [](const std::string& problem, Index nx, Index ny, Index nz, double contrast, std::uint64_t seed,
           double coupling) {
            ProblemSpec p;
            p.kind = problem_kind_from_string(problem);
            p.nx = nx;
            p.ny = ny;
            p.nz = nz;
            p.contrast = contrast;
            p.seed = seed;
            p.coupling = coupling;
            p.validate();
            StructuredGrid grid(p.grid());
            auto part = partition_block(grid, 1);
            CsrMatrix a;
            std::vector<double> b;
            {
                py::gil_scoped_release nogil;
                spawn_ranks(1, [&](Comm& c) {
                    auto sys = generate(c, p, grid, part);
                    a = sys.A.gather_global(c);
                    b = gather_all(c, sys.b);
                });
            }
            auto d = csr_dict(a);
            d["b"] = to_array(b);
            d["unknowns"] = p.unknowns();
            return d;
        },
        py::arg("problem"), py::arg("nx"), py::arg("ny"), py::arg("nz"), py::arg("contrast") = 1.0,
        py::arg("seed") = 1, py::arg("coupling") = 0.1,
        "Generated system in CSR arrays plus b = A*1, cell-ordered rows, unknowns interleaved.");

    m.def(
        "spmv",
        [](Index nrows, Index ncols, const IndexArray& indptr, const IndexArray& indices, const RealArray& data,
           const RealArray& x, int np) {
            auto a = csr_from(nrows, ncols, indptr, indices, data);
            if (nrows != ncols) fail(Errc::invalid_argument, "distributed spmv needs a square matrix");
            auto xv = to_vector(x);
            if (static_cast<Index>(xv.size()) != ncols) fail(Errc::invalid_argument, "x has the wrong length");
            std::vector<double> y;
            {
                py::gil_scoped_release nogil;
                auto out = spawn_ranks(np, [&](Comm& c) {
                    auto map = IndexMap::block(c.rank(), np, nrows);
                    auto m = DistMatrix::from_global_csr(c, a, map);
                    auto xd = scatter(map, xv);
                    DistVector yd(map);
                    m.spmv(c, 1.0, xd, 0.0, yd);
                    return gather_all(c, yd);
                });
                y = std::move(out[0]);
            }
            return to_array(y);
        },
        py::arg("nrows"), py::arg("ncols"), py::arg("indptr"), py::arg("indices"), py::arg("data"), py::arg("x"),
        py::arg("np") = 1);

    m.def(
        "solve",
        [](Index n, const IndexArray& indptr, const IndexArray& indices, const RealArray& data, const RealArray& b,
           int np, const std::string& solver, const std::string& pc, double rtol, double atol, int maxit,
           int restart, int overlap, const std::string& ilu, int ilu_level, int amg_levels, int unknowns,
           int threads) {
            auto a = csr_from(n, n, indptr, indices, data);
            auto bv = to_vector(b);
            if (static_cast<Index>(bv.size()) != n) fail(Errc::invalid_argument, "b has the wrong length");
            SolverConfig cfg;
            cfg.method = solver_method_from_string(solver);
            cfg.rtol = rtol;
            cfg.atol = atol;
            cfg.maxit = maxit;
            cfg.restart = restart;
            cfg.validate();
            const auto pcc = pc_config(pc, overlap, ilu, ilu_level, amg_levels, unknowns);
            if (n % unknowns != 0) fail(Errc::invalid_layout, "row count is not a multiple of unknowns");
            GroupOptions group;
            group.max_active = threads;
            std::pair<SolveReport, std::vector<double>> res;
            {
                py::gil_scoped_release nogil;
                auto out = spawn_ranks(np, [&](Comm& c) {
                    auto cells = IndexMap::block(c.rank(), np, n / unknowns);
                    std::vector<Index> off;
                    for (Index o : cells->offsets()) off.push_back(o * unknowns);
                    auto map = std::make_shared<const IndexMap>(c.rank(), off);
                    auto m = DistMatrix::from_global_csr(c, a, map);
                    auto bd = scatter(map, bv);
                    auto p = make_preconditioner(c, m, pcc);
                    DistVector x(map);
                    auto rep = resim::solve(c, m, bd, x, cfg, p.get());
                    return std::pair{rep, gather_all(c, x)};
                }, group);
                res = std::move(out[0]);
            }
            return report_dict(res.first, res.second);
        },
        py::arg("n"), py::arg("indptr"), py::arg("indices"), py::arg("data"), py::arg("b"), py::arg("np") = 1,
        py::arg("solver") = "gmres", py::arg("pc") = "none", py::arg("rtol") = 1e-6, py::arg("atol") = 1e-50,
        py::arg("maxit") = 1000, py::arg("restart") = 30, py::arg("overlap") = 1, py::arg("ilu") = "iluk",
        py::arg("ilu_level") = 0, py::arg("amg_levels") = 6, py::arg("unknowns") = 1, py::arg("threads") = 0,
        "Distributes the system over np simulated ranks (cell-aligned blocks) and solves it.");

    m.def(
        "run_solver_experiment",
        [](const std::string& problem, Index nx, Index ny, Index nz, const std::vector<int>& np_list,
           const std::string& solver, const std::string& pc, double rtol, int restart, int maxit, double contrast,
           std::uint64_t seed, double coupling, const std::string& partition) {
            SolverExperiment ex;
            ex.problem.kind = problem_kind_from_string(problem);
            ex.problem.nx = nx;
            ex.problem.ny = ny;
            ex.problem.nz = nz;
            ex.problem.contrast = contrast;
            ex.problem.seed = seed;
            ex.problem.coupling = coupling;
            ex.solver.method = solver_method_from_string(solver);
            ex.solver.rtol = rtol;
            ex.solver.restart = restart;
            ex.solver.maxit = maxit;
            ex.pc.kind = pc_kind_from_string(pc);
            ex.partition = partition_method_from_string(partition);
            ex.np_list = np_list;
            py::gil_scoped_release nogil;
            return to_json(run_solver_experiment(ex));
        },
        py::arg("problem"), py::arg("nx"), py::arg("ny"), py::arg("nz"), py::arg("np_list") = std::vector<int>{1},
        py::arg("solver") = "gmres", py::arg("pc") = "ras", py::arg("rtol") = 1e-6, py::arg("restart") = 30,
        py::arg("maxit") = 1000, py::arg("contrast") = 1.0, py::arg("seed") = 1, py::arg("coupling") = 0.1,
        py::arg("partition") = "hsfc", "Report JSON text.");

    m.def(
        "run_partition_experiment",
        [](Index nx, Index ny, Index nz, const std::vector<std::string>& methods, const std::vector<int>& np_list) {
            ProblemSpec p;
            p.nx = nx;
            p.ny = ny;
            p.nz = nz;
            std::vector<PartitionMethod> ms;
            for (const auto& s : methods) ms.push_back(partition_method_from_string(s));
            return to_json(run_partition_experiment(p.grid(), ms, np_list));
        },
        py::arg("nx"), py::arg("ny"), py::arg("nz"), py::arg("methods") = std::vector<std::string>{"hsfc", "morton", "block"},
        py::arg("np_list") = std::vector<int>{2, 4, 8}, "Report JSON text.");

    m.def("mm_read", [](const std::string& path) { return csr_dict(mm_read(path)); }, py::arg("path"));
    m.def(
        "mm_write",
        [](const std::string& path, Index nrows, Index ncols, const IndexArray& indptr, const IndexArray& indices,
           const RealArray& data) { mm_write(path, csr_from(nrows, ncols, indptr, indices, data)); },
        py::arg("path"), py::arg("nrows"), py::arg("ncols"), py::arg("indptr"), py::arg("indices"), py::arg("data"));
}
