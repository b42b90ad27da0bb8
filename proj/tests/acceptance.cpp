// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "rbb/rbb.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

using namespace rbb;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        o.passed = false;
        o.detail += " [over time budget]";
    }
    if (!o.passed)
        ++failures;
    std::printf("%s %d %s: %s (%.2fs, budget %.0fs)\n", o.passed ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
                budget_s);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

unsigned workers()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string csv(const std::vector<ReportRow>& rows)
{
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

} // namespace

int main()
{
    const std::uint64_t seed = master_seed_from_env();
    std::printf("master seed %llu\n", static_cast<unsigned long long>(seed));

    criterion(1, "stepsize identities", 1.0, [&] {
        const auto rs = check_stepsize_properties(100, seed);
        Outcome o{true, {}};
        for (std::size_t i = 0; i < 3; ++i) {
            o.passed = o.passed && rs[i].passed;
            o.detail += rs[i].name + " worst=" + fmt("%.2e", rs[i].worst) + (i < 2 ? "; " : "");
        }
        return o;
    });

    criterion(2, "spectrum bound of RBBQuadratic stepsizes", 10.0, [&] {
        const auto r = check_trace_alpha_bound(50, 50, 1e3, seed);
        return Outcome{r.passed, r.note + ", worst relative excursion " + fmt("%.2e", r.worst)};
    });

    criterion(3, "theorem suite (50 seeds, n in {10, 100})", 60.0, [&] {
        TheoremSweep sw;
        sw.seed = seed;
        Outcome o{true, {}};
        for (const auto& r : check_theorem_suite(sw)) {
            o.passed = o.passed && r.passed;
            o.detail += (r.passed ? "" : "FAILED ") + r.name + " worst=" + fmt("%.2e", r.worst) + "; ";
        }
        return o;
    });

    criterion(4, "monotone regime kappa(A) < 2", 5.0, [&] {
        const auto r = check_monotone_regime(20, 30, seed);
        return Outcome{r.passed, r.note + ", worst " + fmt("%.2e", r.worst)};
    });

    criterion(5, "stability trend P1-P7, n=100, kappa=1e4", 300.0, [&] {
        BenchmarkPlan p;
        p.families = {SpectrumFamily::P1, SpectrumFamily::P2, SpectrumFamily::P3, SpectrumFamily::P4,
                      SpectrumFamily::P5, SpectrumFamily::P6, SpectrumFamily::P7};
        p.dims = {100};
        p.kappas = {1e4};
        p.eps = {1e-8};
        p.seeds = 10;
        p.max_iter = 20000;
        p.methods = {parse_method("bb1"), parse_method("rbb:two-step")};
        p.master_seed = seed;
        p.workers = workers();
        const auto rows = cmd_quad(p);
        double conv = 0.0, mu = 0.0;
        int wins = 0;
        std::string per;
        for (std::size_t f = 0; f < 7; ++f) {
            const auto& bb = rows[2 * f];
            const auto& rb = rows[2 * f + 1];
            conv += rb.converged;
            mu += rb.mu;
            if (rb.iters < bb.iters)
                ++wins;
            per += rb.family + fmt(" %.0f/%.0f mu=%.4f; ", rb.iters, bb.iters, rb.mu);
        }
        conv /= 7.0;
        mu /= 7.0;
        const bool ok = conv >= 0.95 && mu < 0.2 && wins >= 5;
        return Outcome{ok, fmt("RBB converged %.0f%%, mean mu %.4f, ", 100.0 * conv, mu) + std::to_string(wins) +
                               "/7 families fewer iterations (RBB/BB1 It: " + per + ")"};
    });

    criterion(6, "nonquadratic spot checks", 120.0, [&] {
        BenchmarkPlan p;
        p.suite = Suite::NonQuad;
        p.objectives = {"ExtWhiteHolst"};
        p.dims = {200};
        p.max_iter = 10000;
        p.methods = {parse_method("bb1"), parse_method("rbb:two-step")};
        p.workers = 2;
        const auto ewh = cmd_nonquad(p);
        p.objectives = {"CUBE"};
        p.dims = {1000};
        const auto cube = cmd_nonquad(p);
        const bool ewh_ok = ewh[1].converged == 1.0 && ewh[1].iters < 500 && ewh[0].iters > 4 * ewh[1].iters;
        const bool cube_ok = cube[1].converged == 1.0 && cube[1].iters < 10000 && cube[0].iters >= 10000;
        return Outcome{ewh_ok && cube_ok, fmt("ExtWhiteHolst(200) RBB %.0f vs BB1 %.0f; ", ewh[1].iters, ewh[0].iters) +
                                              fmt("CUBE(1000) RBB %.0f vs BB1 %.0f", cube[1].iters, cube[0].iters)};
    });

    criterion(7, "gradient oracles", 30.0, [&] {
        Outcome o{true, {}};
        double worst = 0.0;
        for (const auto& r : check_gradients(12, seed)) {
            worst = std::max(worst, r.worst);
            if (!r.passed) {
                o.passed = false;
                o.detail += r.name + " failed; ";
            }
        }
        o.detail += fmt("worst relative error %.2e", worst);
        return o;
    });

    criterion(8, "spherical designs", 120.0, [&] {
        const double s = 1.0 / std::sqrt(3.0);
        const double anti = a_nt(PointSet(std::vector<Point3>{{0.36, 0.48, 0.8}, {-0.36, -0.48, -0.8}}), 1);
        const double tet = a_nt(PointSet(std::vector<Point3>{{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}}), 2);
        DesignPlan d;
        d.t = 4;
        d.N = 25;
        d.max_iter = 5000;
        d.methods = {parse_method("rbb:two-step")};
        d.no_time = true;
        const auto row = cmd_sphdesign(d).front();
        const bool ok = std::abs(anti) < 1e-12 && std::abs(tet) < 1e-12 && row.final_a < 1e-8 && row.iters <= 5000;
        return Outcome{ok, fmt("antipodal %.1e, tetrahedron %.1e, ", anti, tet) +
                               fmt("t=4 N=25 A=%.2e after %.0f iterations", row.final_a, static_cast<double>(row.iters))};
    });

    criterion(9, "determinism of cmd_quad under no-time", 60.0, [&] {
        BenchmarkPlan p;
        p.families = {SpectrumFamily::P1, SpectrumFamily::P4, SpectrumFamily::HardLog};
        p.dims = {100};
        p.kappas = {1e4};
        p.seeds = 5;
        p.methods = {parse_method("bb1"), parse_method("bb2"), parse_method("rbb:two-step")};
        p.master_seed = seed;
        p.per_run_rows = true;
        p.no_time = true;
        p.workers = 1;
        const std::string a = csv(cmd_quad(p));
        p.workers = workers();
        const std::string b = csv(cmd_quad(p));
        const std::string c = csv(cmd_quad(p));
        return Outcome{a == b && b == c, std::to_string(a.size()) + " bytes, three runs " +
                                             (a == b && b == c ? "identical" : "differ")};
    });

    std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
