// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <string>

#include "random_systems.hpp"
#include "resim/amg.hpp"
#include "resim/bench.hpp"
#include "resim/cpr.hpp"
#include "resim/dense_lu.hpp"
#include "resim/ilu.hpp"
#include "stencils.hpp"

using namespace resim;
using namespace resim::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<double> fingerprint;  // bit patterns compared by criterion 10

    void check(bool ok, const std::string& why) {
        if (!ok && pass) detail = why;
        pass = pass && ok;
    }
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::shared_ptr<const IndexMap> cell_aligned(int rank, int np, Index rows, int unknowns) {
    auto cells = IndexMap::block(rank, np, rows / unknowns);
    std::vector<Index> off;
    for (Index o : cells->offsets()) off.push_back(o * unknowns);
    return std::make_shared<const IndexMap>(rank, std::move(off));
}

ProblemSpec cube(ProblemKind kind, Index n) {
    ProblemSpec s;
    s.kind = kind;
    s.nx = s.ny = s.nz = n;
    return s;
}

// ---------------------------------------------------------------- 1

Outcome curves() {
    Outcome out;
    const auto t0 = Clock::now();
    using Encode = std::function<sfc::CurveKey(std::span<const std::uint32_t>, unsigned)>;
    auto table = [](std::span<const std::uint32_t> c, unsigned m) {
        return sfc::hilbert_encode_3d_table({c[0], c[1], c[2]}, m);
    };
    auto nd = [](std::span<const std::uint32_t> c, unsigned m) { return sfc::hilbert_encode_nd(c, m); };
    struct Case {
        const char* name;
        unsigned n;
        Encode enc;
    };
    std::vector<Case> cases{{"hilbert-nd", 2, nd}, {"hilbert-nd", 3, nd}, {"hilbert-3d-table", 3, table}};
    int checked = 0;
    for (const auto& cs : cases) {
        for (unsigned m = 1; m <= 5; ++m) {
            const std::uint64_t side = 1ull << m, total = 1ull << (cs.n * m);
            std::vector<std::array<std::uint32_t, 3>> at(total, {~0u, ~0u, ~0u});
            bool bijective = true;
            for (std::uint64_t c = 0; c < total; ++c) {
                std::array<std::uint32_t, 3> p{static_cast<std::uint32_t>(c % side),
                                               static_cast<std::uint32_t>((c / side) % side),
                                               static_cast<std::uint32_t>(c / side / side)};
                const std::uint64_t k = cs.enc(std::span<const std::uint32_t>(p.data(), cs.n), m).packed();
                if (k >= total || at[k][0] != ~0u) bijective = false;
                else at[k] = p;
            }
            out.check(bijective, fmt("%s n=%u m=%u not bijective", cs.name, cs.n, m));
            for (std::uint64_t k = 0; bijective && k + 1 < total; ++k) {
                unsigned dist = 0;
                for (unsigned d = 0; d < cs.n; ++d) dist += at[k][d] > at[k + 1][d] ? at[k][d] - at[k + 1][d] : at[k + 1][d] - at[k][d];
                out.check(dist == 1, fmt("%s n=%u m=%u keys %llu,%llu not adjacent", cs.name, cs.n, m,
                                         static_cast<unsigned long long>(k), static_cast<unsigned long long>(k + 1)));
            }
            ++checked;
        }
    }
    // Morton at n=2, m=2
    std::vector<std::array<std::uint32_t, 2>> z(16);
    for (std::uint32_t x = 0; x < 4; ++x) {
        for (std::uint32_t y = 0; y < 4; ++y) {
            const std::array<std::uint32_t, 2> p{x, y};
            z[sfc::morton_encode(p, 2).packed()] = p;
        }
    }
    int jumps = 0;
    for (int k = 0; k + 1 < 16; ++k) {
        const auto dx = std::abs(static_cast<int>(z[k][0]) - static_cast<int>(z[k + 1][0]));
        const auto dy = std::abs(static_cast<int>(z[k][1]) - static_cast<int>(z[k + 1][1]));
        if (dx + dy != 1) ++jumps;
    }
    out.check(jumps >= 1, "Morton n=2 m=2 has no jump");
    const double t = since(t0);
    out.check(t < 5.0, fmt("took %.2fs", t));
    if (out.pass) out.detail = fmt("%d encoder/level cases, Morton jumps %d, %.2fs", checked, jumps, t);
    return out;
}

// ---------------------------------------------------------------- 2

Outcome partitions() {
    Outcome out;
    std::vector<std::array<Index, 3>> grids{{2, 2, 2},  {3, 3, 3},   {4, 4, 4},  {5, 7, 3},   {8, 8, 8},
                                            {11, 6, 9}, {16, 16, 16}, {32, 1, 1}, {32, 16, 8}, {32, 32, 32}};
    int cases = 0;
    double fp_32 = 0.0;
    for (const auto& g : grids) {
        ProblemSpec s;
        s.nx = g[0];
        s.ny = g[1];
        s.nz = g[2];
        StructuredGrid grid(s.grid());
        for (int np : {2, 4, 8, 16, 32}) {
            if (np > grid.ncells()) continue;
            for (auto m : {PartitionMethod::hsfc, PartitionMethod::hsfc_nd, PartitionMethod::morton}) {
                const auto p = make_partition(grid, np, m);
                Index lo = grid.ncells(), hi = 0;
                for (int r = 0; r < np; ++r) {
                    lo = std::min(lo, p.size(r));
                    hi = std::max(hi, p.size(r));
                }
                const auto tag = fmt("%lldx%lldx%lld np=%d %s", static_cast<long long>(g[0]), static_cast<long long>(g[1]),
                                     static_cast<long long>(g[2]), np, std::string(to_string(m)).c_str());
                out.check(p.satisfies_subgrid_conditions(), tag + " violates sub-grid conditions");
                out.check(hi - lo <= 1, tag + fmt(" sizes %lld..%lld", static_cast<long long>(lo), static_cast<long long>(hi)));
                if (g[0] == 32 && g[1] == 32 && g[2] == 32 && np == 32) {
                    fp_32 = std::max(fp_32, load_imbalance(p));
                    out.check(load_imbalance(p) <= 1.04, tag + " f_p above 1.04");
                }
                ++cases;
            }
        }
    }
    // the collective path on the largest case
    ProblemSpec s = cube(ProblemKind::poisson3d, 32);
    StructuredGrid grid(s.grid());
    const auto serial = make_partition(grid, 32, PartitionMethod::hsfc);
    auto owners = spawn_ranks(32, [&](Comm& c) { return partition_sfc(c, grid, sfc::Encoder::hilbert_3d_table).owner; });
    out.check(owners[0] == serial.owner && owners[31] == serial.owner, "collective partition differs from serial");
    if (out.pass) out.detail = fmt("%d grid/np/curve cases, f_p(32^3, np=32) = %.4f", cases, fp_32);
    return out;
}

// ---------------------------------------------------------------- 3

Outcome locality() {
    Outcome out;
    int wins = 0, total = 0;
    std::string losses;
    for (Index n : {8, 16, 32}) {
        ProblemSpec s;
        s.nx = s.ny = n;
        s.nz = 1;
        StructuredGrid grid(s.grid());
        for (int np : {2, 4, 8, 16}) {
            const double h = surface_indices(grid, make_partition(grid, np, PartitionMethod::hsfc)).average;
            const double z = surface_indices(grid, make_partition(grid, np, PartitionMethod::morton)).average;
            ++total;
            if (h <= z) ++wins;
            else losses += fmt(" %lldx%lld/np=%d(%.4f>%.4f)", static_cast<long long>(n), static_cast<long long>(n), np, h, z);
        }
    }
    out.check(wins * 10 >= total * 9, fmt("Hilbert <= Morton in %d/%d;%s", wins, total, losses.c_str()));
    if (out.pass) out.detail = fmt("Hilbert <= Morton in %d/%d (n,np) combinations%s", wins, total, losses.c_str());
    return out;
}

// ---------------------------------------------------------------- 4

Outcome distributed_equivalence(GroupOptions group) {
    Outcome out;
    std::mt19937_64 rng(404);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 8 + static_cast<Index>(rng() % 193);
        auto a = random_sparse(rng, n, 0.05, trial % 2 == 0);
        auto x = random_vector(rng, n);
        auto y = random_vector(rng, n);
        // serial oracle from the triplet definition
        std::vector<double> ref(n, 0.0);
        for (Index i = 0; i < n; ++i) {
            for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) ref[i] += a.values[k] * x[a.col_idx[k]];
        }
        double scale = 0.0;
        for (double v : ref) scale = std::max(scale, std::abs(v));
        std::vector<double> base;
        for (int np : {1, 2, 4, 8}) {
            if (np > n) continue;
            auto res = spawn_ranks(np, [&](Comm& c) {
                auto map = IndexMap::block(c.rank(), np, n);
                auto m = DistMatrix::from_global_csr(c, a, map);
                auto xv = scatter(map, x), yv = scatter(map, y);
                DistVector ax(map);
                m.spmv(c, 1.0, xv, 0.0, ax);
                auto g = gather_all(c, ax);
                g.push_back(dot(c, xv, yv));
                g.push_back(norm2(c, xv));
                return g;
            }, group);
            const auto& got = res[0];
            double err = 0.0;
            for (Index i = 0; i < n; ++i) err = std::max(err, std::abs(got[i] - ref[i]));
            worst = std::max(worst, err / scale);
            out.check(err <= 1e-13 * scale, fmt("trial %d np=%d spmv error %.3e", trial, np, err / scale));
            const std::vector<double> reductions(got.end() - 2, got.end());
            if (np == 1) base = reductions;
            out.check(bitwise_equal(reductions, base), fmt("trial %d np=%d dot/norm differ from np=1", trial, np));
            out.fingerprint.insert(out.fingerprint.end(), got.begin(), got.end());
        }
    }
    if (out.pass) out.detail = fmt("50 systems, np 1/2/4/8, max SpMV rel. error %.2e, dot/norm bitwise", worst);
    return out;
}

// ---------------------------------------------------------------- 5

Outcome solvers() {
    Outcome out;
    std::mt19937_64 rng(505);
    double worst = 0.0;
    int maxits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 5 + static_cast<Index>(rng() % 96);
        auto a = random_sparse(rng, n, 0.1, true);
        auto b = random_vector(rng, n);
        double bnorm = 0.0;
        for (double v : b) bnorm += v * v;
        bnorm = std::sqrt(bnorm);
        const int np = 1 + trial % 4;
        for (auto method : {SolverMethod::gmres, SolverMethod::bicgstab}) {
            SolverConfig cfg;
            cfg.method = method;
            cfg.restart = 30;
            cfg.rtol = 1e-10;
            auto res = spawn_ranks(np, [&](Comm& c) {
                auto map = IndexMap::block(c.rank(), np, n);
                auto m = DistMatrix::from_global_csr(c, a, map);
                auto bv = scatter(map, b);
                DistVector x(map);
                auto rep = solve(c, m, bv, x, cfg);
                return std::pair{rep, gather_all(c, x)};
            });
            const auto& [rep, x] = res[0];
            auto ax = a.multiply(x);
            double r = 0.0;
            for (Index i = 0; i < n; ++i) r += (b[i] - ax[i]) * (b[i] - ax[i]);
            r = std::sqrt(r);
            const auto tag = fmt("trial %d n=%lld %s", trial, static_cast<long long>(n), std::string(to_string(method)).c_str());
            out.check(rep.converged && rep.final_residual <= 1e-10 * rep.initial_residual, tag + " did not converge");
            const double gap = std::abs(r - rep.final_residual) / bnorm;
            worst = std::max(worst, gap);
            out.check(gap <= 1e-12, tag + fmt(" residual gap %.3e", gap));
            maxits = std::max(maxits, rep.iterations);
        }
    }
    auto d = CsrMatrix::from_dense(3, 3, std::vector<double>{1, 0, 0, 0, 2, 0, 0, 0, 3});
    const int its = spawn_ranks(1, [&](Comm& c) {
        auto map = IndexMap::block(0, 1, 3);
        auto m = DistMatrix::from_global_csr(c, d, map);
        auto bv = scatter(map, std::vector<double>{1, 1, 1});
        DistVector x(map);
        SolverConfig cfg;
        cfg.rtol = 1e-10;
        auto rep = gmres(c, m, bv, x, cfg);
        return rep.converged ? rep.iterations : -1;
    })[0];
    out.check(its >= 0 && its <= 3, fmt("diag(1,2,3) took %d iterations", its));
    if (out.pass) {
        out.detail = fmt("200 solves, max |true - reported| / |b| = %.2e, max iterations %d, diag(1,2,3) in %d", worst,
                         maxits, its);
    }
    return out;
}

// ---------------------------------------------------------------- 6

Outcome poisson_budget(GroupOptions group) {
    Outcome out;
    const auto t0 = Clock::now();
    SolverExperiment ex;
    ex.problem = cube(ProblemKind::poisson3d, 10);
    ex.solver.rtol = 1e-8;
    ex.solver.restart = 30;
    ex.pc.kind = PcKind::ras;
    ex.pc.ras.overlap = 1;
    ex.pc.ras.ilu.variant = IluVariant::ilu0;
    ex.group = group;
    std::string its;
    for (int np : {1, 4, 8}) {
        auto r = run_solver_case(ex, np);
        out.check(r.converged && r.iterations <= 90, fmt("np=%d: %d iterations, %s", np, r.iterations, r.stop_reason.c_str()));
        its += fmt(" np=%d:%d", np, r.iterations);
        out.fingerprint.insert(out.fingerprint.end(), r.history.begin(), r.history.end());
    }
    const double t = since(t0);
    out.check(t < 30.0, fmt("took %.1fs", t));
    if (out.pass) out.detail = fmt("iterations%s (budget 90), %.2fs", its.c_str(), t);
    return out;
}

// ---------------------------------------------------------------- 7

void dense_factors(const IluFactors& f, Index n, std::vector<double>& lu) {
    lu.assign(n * n, 0.0);
    for (Index i = 0; i < n; ++i) {
        for (Index k = f.L.row_ptr[i]; k < f.L.row_ptr[i + 1]; ++k) lu[i * n + f.L.col_idx[k]] = f.L.values[k];
        for (Index k = f.U.row_ptr[i]; k < f.U.row_ptr[i + 1]; ++k) lu[i * n + f.U.col_idx[k]] = f.U.values[k];
    }
}

double factor_gap(const IluFactors& f, const CsrMatrix& a) {
    const Index n = a.nrows;
    auto ref = a.to_dense();
    if (!dense_lu(ref, n)) return INFINITY;
    std::vector<double> got;
    dense_factors(f, n, got);
    double gap = 0.0, scale = 1.0;
    for (Index q = 0; q < n * n; ++q) {
        gap = std::max(gap, std::abs(got[q] - ref[q]));
        scale = std::max(scale, std::abs(ref[q]));
    }
    return gap / scale;
}

Outcome ilu_oracles() {
    Outcome out;
    std::mt19937_64 rng(707);
    double worst = 0.0;
    int max_its = 0;
    for (int trial = 0; trial < 5; ++trial) {
        const Index n = 20 + 20 * trial;
        std::vector<Triplet> t;
        for (Index i = 0; i < n; ++i) {
            t.push_back({i, i, uniform(rng, 2.5, 4.0)});
            if (i > 0) t.push_back({i, i - 1, uniform(rng, -1, 1)});
            if (i + 1 < n) t.push_back({i, i + 1, uniform(rng, -1, 1)});
        }
        auto a = trial == 0 ? laplacian_1d(n) : CsrMatrix::from_triplets(n, n, std::move(t));
        const double gap = factor_gap(ilu0_factor(a), a);
        worst = std::max(worst, gap);
        out.check(gap <= 1e-12, fmt("tridiagonal n=%lld ILU(0) differs from LU by %.3e", static_cast<long long>(n), gap));
        auto b = random_vector(rng, n);
        const int its = spawn_ranks(1, [&](Comm& c) {
            auto map = IndexMap::block(0, 1, n);
            auto m = DistMatrix::from_global_csr(c, a, map);
            PcConfig pc;
            pc.kind = PcKind::ras;
            pc.ras.overlap = 0;
            pc.ras.ilu.variant = IluVariant::ilu0;
            auto p = make_preconditioner(c, m, pc);
            auto bv = scatter(map, b);
            DistVector x(map);
            SolverConfig cfg;
            cfg.rtol = 1e-10;
            auto rep = gmres(c, m, bv, x, cfg, p.get());
            return rep.converged ? rep.iterations : -1;
        })[0];
        max_its = std::max(max_its, its);
        out.check(its == 1, fmt("tridiagonal n=%lld GMRES+ILU(0) took %d iterations", static_cast<long long>(n), its));
    }
    double worst_n = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_sparse(rng, 10, 0.4, true);
        const double gap = factor_gap(iluk_factor(a, 10), a);
        worst_n = std::max(worst_n, gap);
        out.check(gap <= 1e-12, fmt("random 10x10 #%d ILU(n) differs from LU by %.3e", trial, gap));
    }
    if (out.pass) {
        out.detail = fmt("tridiagonal ILU(0) gap %.1e, GMRES iterations %d; ILU(n) on 20 random 10x10 gap %.1e", worst,
                         max_its, worst_n);
    }
    return out;
}

// ---------------------------------------------------------------- 8

Outcome amg_properties() {
    Outcome out;
    std::vector<CsrMatrix> cases{laplacian_2d(10, 10), laplacian_1d(100), laplacian_2d(7, 9)};
    std::mt19937_64 rng(808);
    for (int k = 0; k < 4; ++k) {
        const Index n = 40 + 20 * k;
        std::vector<Triplet> t;
        std::vector<double> d(n, uniform(rng, 0.0, 0.2));
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                if (j == i + 1 || uniform(rng, 0, 1) < 0.06) {
                    const double w = uniform(rng, 0.1, 1.0);
                    t.push_back({i, j, -w});
                    t.push_back({j, i, -w});
                    d[i] += w;
                    d[j] += w;
                }
            }
        }
        for (Index i = 0; i < n; ++i) t.push_back({i, i, d[i]});
        cases.push_back(CsrMatrix::from_triplets(n, n, std::move(t)));
    }
    int products = 0;
    double worst = 0.0;
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const auto& a = cases[ci];
        for (int np : {1, 2, 3}) {
            auto gaps = spawn_ranks(np, [&](Comm& c) {
                auto m = DistMatrix::from_global_csr(c, a, IndexMap::block(c.rank(), np, a.nrows));
                AmgParams p;
                p.coarse_size = 4;
                AmgPreconditioner amg(c, m, p);
                std::vector<double> g;
                for (int l = 0; l + 1 < amg.nlevels(); ++l) {
                    auto al = amg.level(l).A.gather_global(c);
                    auto pl = amg.level(l).P.gather_global(c);
                    auto ac = amg.level(l + 1).A.gather_global(c);
                    const Index nf = al.nrows, nc = pl.ncols;
                    if (ac.nrows != nc) {
                        g.push_back(INFINITY);
                        continue;
                    }
                    auto pd = pl.to_dense();
                    auto ref = dense_mul(dense_transpose(pd, nf, nc), dense_mul(al.to_dense(), pd, nf, nf, nc), nc, nf, nc);
                    auto got = ac.to_dense();
                    double e = 0.0;
                    for (Index q = 0; q < nc * nc; ++q) e = std::max(e, std::abs(got[q] - ref[q]));
                    g.push_back(e);
                }
                return g;
            })[0];
            for (double e : gaps) {
                ++products;
                worst = std::max(worst, e);
                out.check(e <= 1e-12, fmt("case %zu np=%d Galerkin gap %.3e", ci, np, e));
            }
        }
    }
    auto a = laplacian_2d(32, 32);
    auto b = random_vector(rng, a.nrows);
    std::string cycles;
    for (int np : {1, 4}) {
        auto h = spawn_ranks(np, [&](Comm& c) {
            auto m = DistMatrix::from_global_csr(c, a, IndexMap::block(c.rank(), np, a.nrows));
            AmgParams p;
            p.max_levels = 6;
            p.strength = 0.5;
            AmgPreconditioner amg(c, m, p);
            auto bv = scatter(m.row_map(), b);
            DistVector x(m.row_map());
            std::vector<double> hist{residual_norm(c, m, bv, x)};
            for (int k = 0; k < 50 && hist.back() > 1e-8 * hist.front(); ++k) {
                amg.vcycle(c, bv, x);
                hist.push_back(residual_norm(c, m, bv, x));
            }
            return hist;
        })[0];
        const int nc = static_cast<int>(h.size()) - 1;
        out.check(h.back() <= 1e-8 * h.front(), fmt("V-cycle np=%d reached %.2e after %d cycles", np, h.back() / h.front(), nc));
        for (std::size_t k = 1; k < h.size(); ++k) out.check(h[k] < h[k - 1], fmt("V-cycle np=%d not monotone at %zu", np, k));
        cycles += fmt(" np=%d:%d", np, nc);
    }
    if (out.pass) out.detail = fmt("%d Galerkin products, max gap %.1e; 32x32 V-cycles to 1e-8%s", products, worst, cycles.c_str());
    return out;
}

// ---------------------------------------------------------------- 9

Outcome cpr_algebra(GroupOptions group) {
    Outcome out;
    // exact stages on a 6x6 cell grid, two unknowns per cell
    ProblemSpec small;
    small.kind = ProblemKind::coupled2;
    small.nx = small.ny = 6;
    small.nz = 1;
    small.contrast = 100;
    StructuredGrid sgrid(small.grid());
    const auto spart = partition_block(sgrid, 1);
    CsrMatrix a;
    spawn_ranks(1, [&](Comm& c) { a = generate(c, small, sgrid, spart).A.gather_global(c); });
    std::mt19937_64 rng(909);
    std::vector<std::vector<double>> rhs;
    for (int k = 0; k < 3; ++k) rhs.push_back(random_vector(rng, a.nrows));
    StageFactory direct = [](Comm& c, const DistMatrix& m) -> std::unique_ptr<Preconditioner> {
        return std::make_unique<DirectSolvePreconditioner>(c, m);
    };
    double worst = 0.0;
    for (auto v : {CprVariant::fp, CprVariant::fpf}) {
        for (const auto& f : rhs) {
            auto ref = dense_solve(a.to_dense(), f);
            auto x = spawn_ranks(2, [&](Comm& c) {
                auto m = DistMatrix::from_global_csr(c, a, cell_aligned(c.rank(), 2, a.nrows, 2));
                CprPreconditioner cpr(c, m, BlockLayout{2, 0}, v, {}, {direct, direct});
                auto fv = scatter(m.row_map(), f);
                DistVector z(m.row_map());
                cpr.apply(c, fv, z);
                return gather_all(c, z);
            }, group)[0];
            double num = 0.0, den = 0.0;
            for (Index i = 0; i < a.nrows; ++i) {
                num += (x[i] - ref[i]) * (x[i] - ref[i]);
                den += ref[i] * ref[i];
            }
            const double e = std::sqrt(num / den);
            worst = std::max(worst, e);
            out.check(e <= 1e-10, fmt("exact-stage %s error %.3e", std::string(to_string(v)).c_str(), e));
            out.fingerprint.insert(out.fingerprint.end(), x.begin(), x.end());
        }
    }

    SolverExperiment ex;
    ex.problem = cube(ProblemKind::coupled2, 16);
    ex.problem.contrast = 1e4;
    ex.solver.rtol = 1e-8;
    ex.group = group;
    const int np = 4;
    std::string its;
    auto run = [&](PcKind k) {
        ex.pc.kind = k;
        auto r = run_solver_case(ex, np);
        its += fmt(" %s:%d", std::string(to_string(k)).c_str(), r.iterations);
        out.fingerprint.insert(out.fingerprint.end(), r.history.begin(), r.history.end());
        return r;
    };
    const auto ras = run(PcKind::ras);
    int fpf_its = -1;
    for (auto k : {PcKind::cpr_fp, PcKind::cpr_pf, PcKind::cpr_fpf, PcKind::cpr_ffpf}) {
        const auto r = run(k);
        out.check(r.converged && r.iterations <= 100,
                  fmt("%s: %d iterations, %s", std::string(to_string(k)).c_str(), r.iterations, r.stop_reason.c_str()));
        if (k == PcKind::cpr_fpf) fpf_its = r.iterations;
    }
    out.check(ras.converged, "RAS did not converge");
    out.check(fpf_its <= ras.iterations, fmt("CPR-FPF %d > RAS %d iterations", fpf_its, ras.iterations));
    if (out.pass) out.detail = fmt("exact-stage error %.1e; coupled2 16^3 np=%d iterations%s", worst, np, its.c_str());
    return out;
}

// ---------------------------------------------------------------- 10

Outcome determinism(const Outcome& c4, const Outcome& c6, const Outcome& c9) {
    Outcome out;
    int runs = 0;
    for (int active : {0, 1, 3}) {
        GroupOptions g;
        g.max_active = active;
        const auto r4 = distributed_equivalence(g);
        const auto r6 = poisson_budget(g);
        const auto r9 = cpr_algebra(g);
        out.check(bitwise_equal(r4.fingerprint, c4.fingerprint), fmt("criterion 4 differs at max_active=%d", active));
        out.check(bitwise_equal(r6.fingerprint, c6.fingerprint), fmt("criterion 6 differs at max_active=%d", active));
        out.check(bitwise_equal(r9.fingerprint, c9.fingerprint), fmt("criterion 9 differs at max_active=%d", active));
        runs += 3;
    }
    const std::size_t values = c4.fingerprint.size() + c6.fingerprint.size() + c9.fingerprint.size();
    out.check(values > 0, "nothing recorded");
    if (out.pass) out.detail = fmt("%d repeated runs (max_active 0/1/3), %zu recorded values bitwise equal", runs, values);
    return out;
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int id, const char* name, const Outcome& o, double seconds) {
        std::printf("%s %2d %-26s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    };
    auto timed = [&](int id, const char* name, auto&& fn) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        report(id, name, o, since(t0));
        return o;
    };
    timed(1, "curve-correctness", curves);
    timed(2, "partition-balance", partitions);
    timed(3, "locality-trend", locality);
    const auto c4 = timed(4, "distributed-equivalence", [] { return distributed_equivalence({}); });
    timed(5, "solver-correctness", solvers);
    const auto c6 = timed(6, "poisson-budget", [] { return poisson_budget({}); });
    timed(7, "ilu-oracles", ilu_oracles);
    timed(8, "amg-properties", amg_properties);
    const auto c9 = timed(9, "cpr-stage-algebra", [] { return cpr_algebra({}); });
    timed(10, "determinism", [&] { return determinism(c4, c6, c9); });
    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
