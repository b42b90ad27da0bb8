// Minimal library usage: one quadratic problem, BB1 against RBB with the
// two-step regularization schedule, from the same start point.

#include "rbb/rbb.hpp"

#include <cstdio>

int main()
{
    const rbb::QuadraticProblem prob = rbb::build_problem({rbb::SpectrumFamily::P2, 200, 1e4, 7});
    const rbb::Vector x0 = rbb::random_start(prob.n(), 1);

    for (const char* id : {"bb1", "rbbq:two-step", "rbb:two-step"}) {
        const auto m = rbb::parse_method(id);
        rbb::SolverConfig cfg;
        cfg.rule = m.rule;
        cfg.tau = m.tau;
        const auto trace = rbb::run_quadratic(prob, cfg, x0);
        std::printf("%-14s iterations %5zu  delta_f %.3e  stop %s\n", id, trace.iterations(),
                    rbb::fluctuation(trace.f_history()), rbb::to_string(trace.stop_reason).c_str());
    }
}
