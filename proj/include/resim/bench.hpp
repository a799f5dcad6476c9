#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "resim/block_layout.hpp"
#include "resim/dist_matrix.hpp"
#include "resim/krylov.hpp"
#include "resim/partition.hpp"
#include "resim/pc.hpp"

namespace resim {

enum class ProblemKind { poisson3d, hetero, coupled2 };

std::string_view to_string(ProblemKind k) noexcept;
ProblemKind problem_kind_from_string(std::string_view name);

struct ProblemSpec {
    ProblemKind kind = ProblemKind::poisson3d;
    Index nx = 10, ny = 10, nz = 10;
    double contrast = 1.0;  // permeability contrast, hetero and coupled2
    std::uint64_t seed = 1;
    double coupling = 0.1;  // pressure/second-unknown coupling, coupled2

    void validate() const;
    int unknowns() const noexcept { return kind == ProblemKind::coupled2 ? 2 : 1; }
    /// Unit cells over [0,nx] x [0,ny] x [0,nz].
    GridSpec grid() const;
};

/// Log-normal cell permeability exp(s z) with s = ln(contrast)/2 and z a
/// standard normal drawn from (seed, global cell index) alone.
double permeability(Index global_cell, double contrast, std::uint64_t seed);

struct LinearSystem {
    DistMatrix A;
    DistVector b;
    BlockLayout layout;
};

struct GenTimings {
    double building = 0.0;
    double assemble = 0.0;
};

/// All generators are collective, order rows per cell_row of the partition
/// (unknowns of a cell interleaved) and set b = A * 1, so x* = 1.
///
/// 7-point unit-spacing Laplacian: diagonal 6, -1 per interior face.
LinearSystem gen_poisson3d(Comm& comm, const StructuredGrid& grid, const Partition& part, GenTimings* t = nullptr);
/// 7-point diffusion with harmonic face averages of the permeability; a
/// boundary face adds the cell permeability to the diagonal.
LinearSystem gen_hetero_pressure(Comm& comm, const StructuredGrid& grid, const Partition& part, double contrast,
                                 std::uint64_t seed, GenTimings* t = nullptr);
/// Two unknowns per cell: hetero diffusion on pressure, a mass-dominated
/// block on the second unknown, couplings scaled by `coupling` (<= 0.1).
LinearSystem gen_coupled2(Comm& comm, const StructuredGrid& grid, const Partition& part, double contrast,
                          std::uint64_t seed, double coupling, GenTimings* t = nullptr);
LinearSystem generate(Comm& comm, const ProblemSpec& spec, const StructuredGrid& grid, const Partition& part,
                      GenTimings* t = nullptr);

struct PartitionRow {
    std::string method;
    int np = 0;
    double f_p = 0.0;
    double r_max = 0.0;
    double r_global = 0.0;
    double r_avg = 0.0;
    int c = 0;
};

struct PhaseTimes {
    double gridding = 0.0;
    double building = 0.0;
    double assemble = 0.0;
    double setup = 0.0;
    double solve = 0.0;
    double overall = 0.0;
};

struct SolverRow {
    std::string problem;
    Index nx = 0, ny = 0, nz = 0;
    Index nrows = 0;
    int np = 0;
    std::string solver;
    std::string pc;
    int iterations = 0;
    bool converged = false;
    std::string stop_reason;
    double initial_residual = 0.0;
    double final_residual = 0.0;
    double error_inf = 0.0;  // ||x - x*||_inf, NaN when x* is unknown
    PhaseTimes times;
    std::vector<double> history;
};

struct ExperimentReport {
    static constexpr int kVersion = 1;
    int version = kVersion;
    std::string kind;  // "partition" or "solve"
    std::vector<PartitionRow> partitions;
    std::vector<SolverRow> solves;
};

ExperimentReport run_partition_experiment(const GridSpec& grid, const std::vector<PartitionMethod>& methods,
                                          const std::vector<int>& np_list);

struct SolverExperiment {
    ProblemSpec problem;
    SolverConfig solver;
    PcConfig pc;  // the block layout is taken from the problem
    PartitionMethod partition = PartitionMethod::hsfc;
    std::vector<int> np_list{1};
    GroupOptions group;
};

SolverRow run_solver_case(const SolverExperiment& ex, int np);
ExperimentReport run_solver_experiment(const SolverExperiment& ex);

/// Solves a replicated system, rows split in contiguous blocks.
SolverRow run_matrix_case(const CsrMatrix& a, const std::vector<double>& b, const SolverConfig& solver,
                          const PcConfig& pc, int np, GroupOptions group = {});

std::string to_json(const ExperimentReport& report);
/// Throws parse-error on malformed input or an unknown version.
ExperimentReport report_from_json(std::string_view text);

/// partition: method,np,f_p,r_max,r_global,r_avg,c
void write_partition_csv(std::ostream& out, const std::vector<PartitionRow>& rows);
/// One row per solve; the trailing t_* columns are wall-clock seconds.
void write_solver_csv(std::ostream& out, const std::vector<SolverRow>& rows);
/// Residual histories, long format: np,iteration,residual.
void write_history_csv(std::ostream& out, const std::vector<SolverRow>& rows);

}  // namespace resim
