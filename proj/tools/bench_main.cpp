// Times the OpenMP kernels against the serial reference implementation and
// verifies that both produce bit-identical results.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "attractorlab/limit_sets.hpp"
#include "attractorlab/manifolds.hpp"
#include "attractorlab/skew.hpp"

namespace {

using namespace attractorlab;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

SkewProduct make_preset() {
    ToralAutomorphism base(2, 1, 1, 1);
    CircleMap tmpl(0.0, {FourierCoeff{1, 0.08, 0.0}});
    std::vector<Modulation> mods;
    Modulation m1;
    m1.target.kind = ModulationTarget::Kind::c0;
    m1.m1 = 1;
    m1.amp = 0.01;
    mods.push_back(m1);
    Modulation m2 = m1;
    m2.m1 = 0;
    m2.m2 = 1;
    mods.push_back(m2);
    return SkewProduct(std::move(base), FiberFamily(tmpl, mods));
}

bool same_cells(const CellSet& a, const CellSet& b) { return a.members == b.members; }

}  // namespace

int main(int argc, char** argv) {
    std::int64_t n_steps = 1000000;
    int n_samples = 16;
    if (argc > 1) n_steps = std::atoll(argv[1]);
    if (argc > 2) n_samples = std::atoi(argv[2]);

    SkewProduct sys = make_preset();
    SystemView view(sys);
    sys.ensure_certified();
    Grid3 grid{32, 32};

    AttractorParams params;
    params.n_samples = n_samples;
    params.n_steps = n_steps;
    params.seed = 1;

    std::printf("attractor estimate: %d samples x %lld steps on 32^3\n", n_samples,
                static_cast<long long>(n_steps));

    params.exec = ExecMode::serial;
    auto t0 = std::chrono::steady_clock::now();
    AttractorEstimate serial = attractor_estimate(view, AttractorKind::statistical, grid,
                                                  params);
    double t_serial = seconds_since(t0);

    params.exec = ExecMode::openmp;
    t0 = std::chrono::steady_clock::now();
    AttractorEstimate openmp = attractor_estimate(view, AttractorKind::statistical, grid,
                                                  params);
    double t_openmp = seconds_since(t0);

    bool match = same_cells(serial.union_set, openmp.union_set);
    std::printf("  serial  %8.3f s\n", t_serial);
    std::printf("  openmp  %8.3f s  speedup %.2fx  identical %s\n", t_openmp,
                t_openmp > 0 ? t_serial / t_openmp : 0.0, match ? "yes" : "NO");

    NonwanderingParams nw;
    nw.steps_per_cell = 20000;
    nw.horizon = 10000;
    nw.seed = 1;
    Grid3 nw_grid{16, 16};

    std::printf("nonwandering estimate: 16^3, %lld steps per cell\n",
                static_cast<long long>(nw.steps_per_cell));

    nw.exec = ExecMode::serial;
    t0 = std::chrono::steady_clock::now();
    CellSet nw_serial = nonwandering_estimate(view, nw_grid, nw);
    double tn_serial = seconds_since(t0);

    nw.exec = ExecMode::openmp;
    t0 = std::chrono::steady_clock::now();
    CellSet nw_openmp = nonwandering_estimate(view, nw_grid, nw);
    double tn_openmp = seconds_since(t0);

    bool nw_match = same_cells(nw_serial, nw_openmp);
    std::printf("  serial  %8.3f s\n", tn_serial);
    std::printf("  openmp  %8.3f s  speedup %.2fx  identical %s\n", tn_openmp,
                tn_openmp > 0 ? tn_serial / tn_openmp : 0.0, nw_match ? "yes" : "NO");

    return (match && nw_match) ? 0 : 1;
}
