#pragma once

// Benchmark plans and the report writers behind the command-line tool.
//
// Seeding: each (family, n, kappa) cell gets its own problem seed derived
// from the master seed, and start point j of that cell is derived from the
// problem seed and j. Every method in a cell therefore sees the same
// problem and the same starts, which is what makes mu a paired ratio.
//
// Runs are independent and may be spread over a worker pool; results land
// in slots indexed by (cell, start, method) and are written in that order,
// so output does not depend on scheduling.

#include "rbb/analysis.hpp"
#include "rbb/checks.hpp"
#include "rbb/objectives.hpp"
#include "rbb/quadgen.hpp"
#include "rbb/random.hpp"
#include "rbb/solver.hpp"
#include "rbb/sphdesign.hpp"
#include "rbb/stepsize.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rbb {

inline constexpr std::uint64_t default_master_seed = 20240517;

/// RBB_SEED (decimal) overrides the built-in master seed.
inline std::uint64_t master_seed_from_env()
{
    if (const char* s = std::getenv("RBB_SEED"); s && *s) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(s, &end, 10);
        if (end && *end == '\0')
            return v;
        throw std::invalid_argument(std::string("RBB_SEED is not a decimal integer: '") + s + "'");
    }
    return default_master_seed;
}

struct MethodSpec {
    std::string id;
    StepsizeRule rule;
    TauSchedule tau;
};

/// Accepted forms: bb1, bb2, dai:<gamma>, rbb, rbb:two-step, rbb:fixed=<tau>,
/// and the same three for rbbq. "rbb" is the Hessian-free variant used for
/// general objectives; "rbbq" is the quadratic one that applies A to y.
inline MethodSpec parse_method(const std::string& text)
{
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size())
            throw std::invalid_argument("bad number '" + s + "' in method '" + text + "'");
        return v;
    };
    if (text == "bb1")
        return {"bb1", StepsizeRule::bb1(), TauSchedule::fixed(0.0)};
    if (text == "bb2")
        return {"bb2", StepsizeRule::bb2(), TauSchedule::fixed(0.0)};
    if (text.rfind("dai:", 0) == 0) {
        const auto rule = StepsizeRule::dai(num(text.substr(4)));
        return {to_string(rule), rule, TauSchedule::fixed(0.0)};
    }
    for (const auto& [prefix, rule] : {std::pair{std::string("rbbq"), StepsizeRule::rbb_quadratic()},
                                       std::pair{std::string("rbb"), StepsizeRule::rbb_extended()}}) {
        if (text == prefix || text == prefix + ":two-step")
            return {prefix + ":two-step", rule, TauSchedule::two_step()};
        const std::string fixed = prefix + ":fixed=";
        if (text.rfind(fixed, 0) == 0) {
            const double tau = num(text.substr(fixed.size()));
            char buf[64];
            std::snprintf(buf, sizeof buf, "%g", tau);
            return {fixed + buf, rule, TauSchedule::fixed(tau)};
        }
    }
    throw std::invalid_argument("unknown method '" + text +
                                "' (expected bb1, bb2, dai:<g>, rbb[:two-step|:fixed=<tau>], rbbq[...])");
}

enum class Suite { QuadSpectra, QuadHard, NonQuad, SphDesign, Verify };

inline Suite parse_suite(const std::string& s)
{
    if (s == "quad" || s == "quad-spectra") return Suite::QuadSpectra;
    if (s == "quad-hard") return Suite::QuadHard;
    if (s == "nonquad") return Suite::NonQuad;
    if (s == "sphdesign") return Suite::SphDesign;
    if (s == "verify") return Suite::Verify;
    throw std::invalid_argument("unknown suite '" + s + "' (quad-spectra, quad-hard, nonquad, sphdesign, verify)");
}

struct BenchmarkPlan {
    Suite suite = Suite::QuadSpectra;
    std::vector<std::size_t> dims = {100};
    std::vector<double> kappas = {1e4};
    std::vector<double> eps = {1e-8};
    std::vector<SpectrumFamily> families = {SpectrumFamily::P1};
    std::vector<std::string> objectives; // NonQuad
    int seeds = 10;
    std::vector<MethodSpec> methods;
    std::size_t max_iter = 20000;
    MinimizerMode min_mode = MinimizerMode::Zeros;
    std::uint64_t master_seed = default_master_seed;
    bool per_run_rows = false;
    bool no_time = false;
    unsigned workers = 1;

    void validate() const
    {
        if (methods.empty())
            throw std::invalid_argument("plan: at least one method is required");
        if (seeds < 1)
            throw std::invalid_argument("plan: seeds must be >= 1");
        if (eps.empty())
            throw std::invalid_argument("plan: eps list is empty");
        for (double e : eps)
            if (!(e > 0.0))
                throw std::invalid_argument("plan: eps must be > 0");
        if (max_iter < 1)
            throw std::invalid_argument("plan: max_iter must be >= 1");
        if (suite == Suite::NonQuad) {
            if (objectives.empty())
                throw std::invalid_argument("plan: objective list is empty; supported: " + supported_objective_names());
            if (dims.empty())
                throw std::invalid_argument("plan: dimension list is empty");
        } else {
            if (families.empty())
                throw std::invalid_argument("plan: family list is empty");
            if (dims.empty() || kappas.empty())
                throw std::invalid_argument("plan: dimension and kappa lists must be non-empty");
        }
    }
};

/// One CSV/JSON row. Aggregate rows carry seed = "mean" and a converged
/// fraction; per-run rows carry the start index and 0/1.
struct ReportRow {
    std::string method, problem, family;
    std::size_t n = 0;
    std::optional<double> kappa;
    double eps = 0.0;
    std::string seed;
    double iters = 0.0;
    std::optional<double> time_s;
    double delta_f = 0.0;
    double mu = 1.0;
    double converged = 0.0;
};

inline const char* csv_header() { return "method,problem,family,n,kappa,eps,seed,iters,time_s,delta_f,mu,converged"; }

namespace detail {

inline std::string fmt(double v, int digits)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s)
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

/// JSON has no infinity; the +inf mu sentinel is written as the string "inf".
inline nlohmann::ordered_json json_number(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

} // namespace detail

inline void write_csv(std::ostream& os, const std::vector<ReportRow>& rows)
{
    using detail::fmt;
    os << csv_header() << '\n';
    for (const auto& r : rows) {
        os << detail::csv_field(r.method) << ',' << detail::csv_field(r.problem) << ',' << detail::csv_field(r.family)
           << ',' << r.n << ',' << (r.kappa ? fmt(*r.kappa, 6) : "") << ',' << fmt(r.eps, 6) << ',' << r.seed << ','
           << fmt(r.iters, 8) << ',' << (r.time_s ? fmt(*r.time_s, 6) : "") << ',' << fmt(r.delta_f, 10) << ','
           << fmt(r.mu, 8) << ',' << fmt(r.converged, 6) << '\n';
    }
}

inline nlohmann::ordered_json rows_to_json(const std::vector<ReportRow>& rows)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["method"] = r.method;
        j["problem"] = r.problem;
        j["family"] = r.family;
        j["n"] = r.n;
        j["kappa"] = r.kappa ? nlohmann::ordered_json(*r.kappa) : nlohmann::ordered_json(nullptr);
        j["eps"] = r.eps;
        j["seed"] = r.seed;
        j["iters"] = r.iters;
        j["time_s"] = r.time_s ? nlohmann::ordered_json(*r.time_s) : nlohmann::ordered_json(nullptr);
        j["delta_f"] = r.delta_f;
        j["mu"] = detail::json_number(r.mu);
        j["converged"] = r.converged;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline void write_json(std::ostream& os, const std::vector<ReportRow>& rows)
{
    os << rows_to_json(rows).dump(2) << '\n';
}

/// Runs fn(0..count-1) on `workers` threads (1 means inline).
inline void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn)
{
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, count); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

/// Outcome of one solver run; a divergence is kept as a non-converged run.
struct RunOutcome {
    std::size_t iterations = 0;
    double time_s = 0.0;
    double delta_f = 0.0;
    bool converged = false;
    double final_value = 0.0;
};

namespace detail {

template <class Run>
RunOutcome timed_run(Run&& run)
{
    RunOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&](const IterationTrace& tr, bool ok) {
        out.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.iterations = tr.iterations();
        std::vector<double> f;
        for (const auto& r : tr.records)
            if (std::isfinite(r.f))
                f.push_back(r.f);
        out.delta_f = f.empty() ? 0.0 : fluctuation(f);
        out.converged = ok && tr.converged();
        out.final_value = tr.records.empty() ? 0.0 : tr.records.back().f;
    };
    try {
        const IterationTrace tr = run();
        finish(tr, true);
    } catch (const divergence_error& e) {
        finish(e.partial_trace(), false);
    }
    return out;
}

inline std::uint64_t cell_seed(std::uint64_t master, SpectrumFamily fam, std::size_t n, double kappa)
{
    std::uint64_t s = derive_seed(master, static_cast<std::uint64_t>(fam) + 1);
    s = derive_seed(s, static_cast<std::uint64_t>(n));
    return derive_seed(s, std::bit_cast<std::uint64_t>(kappa));
}

inline std::string kappa_label(double kappa)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", kappa);
    return buf;
}

} // namespace detail

/// Quadratic sweep over families x dims x kappas x eps, `seeds` paired starts
/// each. The first method is the baseline for mu.
inline std::vector<ReportRow> cmd_quad(const BenchmarkPlan& plan)
{
    plan.validate();
    struct Cell {
        SpectrumFamily family;
        std::size_t n;
        double kappa;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (auto fam : plan.families)
        for (auto n : plan.dims)
            for (double kappa : plan.kappas)
                cells.push_back({fam, n, kappa, detail::cell_seed(plan.master_seed, fam, n, kappa)});

    // Build every problem up front so argument errors surface before any run.
    std::vector<QuadraticProblem> problems;
    problems.reserve(cells.size());
    for (const auto& c : cells)
        problems.push_back(build_problem({c.family, c.n, c.kappa, c.seed}, plan.min_mode));

    const std::size_t S = static_cast<std::size_t>(plan.seeds), M = plan.methods.size(), E = plan.eps.size();
    std::vector<RunOutcome> results(cells.size() * E * S * M);
    auto slot = [&](std::size_t c, std::size_t e, std::size_t s, std::size_t m) { return ((c * E + e) * S + s) * M + m; };

    parallel_for(results.size(), plan.workers, [&](std::size_t idx) {
        const std::size_t m = idx % M, s = (idx / M) % S, e = (idx / (M * S)) % E, c = idx / (M * S * E);
        const Vector x0 = random_start(cells[c].n, derive_seed(cells[c].seed, 0x57a7 + s));
        SolverConfig cfg;
        cfg.eps = plan.eps[e];
        cfg.max_iter = plan.max_iter;
        cfg.rule = plan.methods[m].rule;
        cfg.tau = plan.methods[m].tau;
        results[slot(c, e, s, m)] = detail::timed_run([&] { return run_quadratic(problems[c], cfg, x0); });
    });

    std::vector<ReportRow> rows;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const std::string problem = to_string(cells[c].family) + "-n" + std::to_string(cells[c].n) + "-k" +
                                    detail::kappa_label(cells[c].kappa);
        for (std::size_t e = 0; e < E; ++e) {
            auto base_row = [&](std::size_t m) {
                ReportRow r;
                r.method = plan.methods[m].id;
                r.problem = problem;
                r.family = to_string(cells[c].family);
                r.n = cells[c].n;
                r.kappa = cells[c].kappa;
                r.eps = plan.eps[e];
                return r;
            };
            double base_df = 0.0;
            for (std::size_t s = 0; s < S; ++s)
                base_df += results[slot(c, e, s, 0)].delta_f;
            base_df /= static_cast<double>(S);
            for (std::size_t m = 0; m < M; ++m) {
                ReportRow r = base_row(m);
                r.seed = "mean";
                double it = 0.0, t = 0.0, df = 0.0, conv = 0.0;
                for (std::size_t s = 0; s < S; ++s) {
                    const auto& o = results[slot(c, e, s, m)];
                    it += static_cast<double>(o.iterations);
                    t += o.time_s;
                    df += o.delta_f;
                    conv += o.converged ? 1.0 : 0.0;
                }
                const double inv = 1.0 / static_cast<double>(S);
                r.iters = it * inv;
                if (!plan.no_time)
                    r.time_s = t * inv;
                r.delta_f = df * inv;
                r.mu = m == 0 ? 1.0 : mu_ratio(r.delta_f, base_df);
                r.converged = conv * inv;
                rows.push_back(r);
            }
            if (plan.per_run_rows) {
                for (std::size_t s = 0; s < S; ++s) {
                    for (std::size_t m = 0; m < M; ++m) {
                        const auto& o = results[slot(c, e, s, m)];
                        ReportRow r = base_row(m);
                        r.seed = std::to_string(s);
                        r.iters = static_cast<double>(o.iterations);
                        if (!plan.no_time)
                            r.time_s = o.time_s;
                        r.delta_f = o.delta_f;
                        r.mu = m == 0 ? 1.0 : mu_ratio(o.delta_f, results[slot(c, e, s, 0)].delta_f);
                        r.converged = o.converged ? 1.0 : 0.0;
                        rows.push_back(r);
                    }
                }
            }
        }
    }
    return rows;
}

/// Named test functions from their standard starts; one row per
/// (objective, n, eps, method). seeds is not used: there is one start.
inline std::vector<ReportRow> cmd_nonquad(const BenchmarkPlan& plan)
{
    plan.validate();
    struct Cell {
        std::string name;
        std::size_t n;
    };
    std::vector<Cell> cells;
    std::vector<Objective> objs;
    for (const auto& name : plan.objectives)
        for (auto n : plan.dims) {
            objs.push_back(make_objective(name, n));
            cells.push_back({name, n});
        }
    const std::size_t M = plan.methods.size(), E = plan.eps.size();
    for (const auto& m : plan.methods)
        if (m.rule.kind == RuleKind::RBBQuadratic)
            throw std::invalid_argument("method " + m.id + " needs a Hessian; use rbb for general objectives");
    std::vector<RunOutcome> results(cells.size() * E * M);
    parallel_for(results.size(), plan.workers, [&](std::size_t idx) {
        const std::size_t m = idx % M, e = (idx / M) % E, c = idx / (M * E);
        SolverConfig cfg;
        cfg.eps = plan.eps[e];
        cfg.max_iter = plan.max_iter;
        cfg.rule = plan.methods[m].rule;
        cfg.tau = plan.methods[m].tau;
        results[idx] = detail::timed_run([&] { return run_general(objs[c], cfg, objs[c].standard_start); });
    });
    std::vector<ReportRow> rows;
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::size_t e = 0; e < E; ++e) {
            const double base_df = results[(c * E + e) * M].delta_f;
            for (std::size_t m = 0; m < M; ++m) {
                const auto& o = results[(c * E + e) * M + m];
                ReportRow r;
                r.method = plan.methods[m].id;
                r.problem = cells[c].name + "(" + std::to_string(cells[c].n) + ")";
                r.family = cells[c].name;
                r.n = cells[c].n;
                r.eps = plan.eps[e];
                r.seed = "std";
                r.iters = static_cast<double>(o.iterations);
                if (!plan.no_time)
                    r.time_s = o.time_s;
                r.delta_f = o.delta_f;
                r.mu = m == 0 ? 1.0 : mu_ratio(o.delta_f, base_df);
                r.converged = o.converged ? 1.0 : 0.0;
                rows.push_back(r);
            }
        }
    return rows;
}

struct DesignPlan {
    int t = 4;
    std::size_t N = 0; // 0 means (t+1)^2
    std::uint64_t seed = 1;
    double eps = 1e-12;
    std::size_t max_iter = 5000;
    std::vector<MethodSpec> methods;
    bool no_time = false;
    std::string points_prefix; // write <prefix>-<method>.txt when non-empty
};

struct DesignRow {
    std::string method;
    int t = 0;
    std::size_t N = 0;
    std::uint64_t seed = 0;
    std::size_t iters = 0;
    std::optional<double> time_s;
    double delta_f = 0.0;
    double final_a = 0.0;
    bool converged = false;
    std::string points_file;
};

inline std::vector<DesignRow> cmd_sphdesign(const DesignPlan& plan)
{
    if (plan.methods.empty())
        throw std::invalid_argument("sphdesign: at least one method is required");
    if (plan.t < 1)
        throw std::invalid_argument("sphdesign: t must be >= 1");
    const DesignSpec spec{plan.t, plan.N};
    std::vector<DesignRow> rows;
    for (const auto& m : plan.methods) {
        if (m.rule.kind == RuleKind::RBBQuadratic)
            throw std::invalid_argument("method " + m.id + " needs a Hessian; use rbb for the design objective");
        SolverConfig cfg;
        cfg.eps = plan.eps;
        cfg.max_iter = plan.max_iter;
        cfg.rule = m.rule;
        cfg.tau = m.tau;
        cfg.stop_mode = StopMode::GradOrStep;
        const auto t0 = std::chrono::steady_clock::now();
        const DesignResult res = run_design(spec, cfg, plan.seed);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        DesignRow r;
        r.method = m.id;
        r.t = plan.t;
        r.N = spec.points();
        r.seed = plan.seed;
        r.iters = res.trace.iterations();
        if (!plan.no_time)
            r.time_s = secs;
        r.delta_f = fluctuation(res.trace.f_history());
        r.final_a = res.value;
        r.converged = res.trace.converged();
        if (!plan.points_prefix.empty()) {
            std::string id = m.id;
            std::replace(id.begin(), id.end(), ':', '_');
            r.points_file = plan.points_prefix + "-" + id + ".txt";
            std::ofstream f(r.points_file);
            if (!f)
                throw std::runtime_error("cannot write " + r.points_file);
            write_points(f, res.points);
        }
        rows.push_back(r);
    }
    return rows;
}

inline void write_design_csv(std::ostream& os, const std::vector<DesignRow>& rows)
{
    using detail::fmt;
    os << "method,t,N,seed,iters,time_s,delta_f,final_A,converged,points_file\n";
    for (const auto& r : rows)
        os << r.method << ',' << r.t << ',' << r.N << ',' << r.seed << ',' << r.iters << ','
           << (r.time_s ? fmt(*r.time_s, 6) : "") << ',' << fmt(r.delta_f, 10) << ',' << fmt(r.final_a, 6) << ','
           << (r.converged ? 1 : 0) << ',' << detail::csv_field(r.points_file) << '\n';
}

inline void write_design_json(std::ostream& os, const std::vector<DesignRow>& rows)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows)
        arr.push_back({{"method", r.method},
                       {"t", r.t},
                       {"N", r.N},
                       {"seed", r.seed},
                       {"iters", r.iters},
                       {"time_s", r.time_s ? nlohmann::ordered_json(*r.time_s) : nlohmann::ordered_json(nullptr)},
                       {"delta_f", r.delta_f},
                       {"final_A", r.final_a},
                       {"converged", r.converged},
                       {"points_file", r.points_file}});
    os << arr.dump(2) << '\n';
}

struct VerifyOptions {
    std::uint64_t seed = default_master_seed;
    int instances = 100;   // random SPD instances for stepsize properties
    int theorem_seeds = 20; // per dimension
    std::vector<std::size_t> dims = {10, 100};
    bool inject_fault = false;
};

inline std::vector<PropertyResult> cmd_verify(const VerifyOptions& opt)
{
    std::vector<PropertyResult> out = check_stepsize_properties(opt.instances, opt.seed);
    out.push_back(check_trace_alpha_bound(opt.theorem_seeds, 50, 1e3, derive_seed(opt.seed, 2)));
    TheoremSweep sw;
    sw.seeds = opt.theorem_seeds;
    sw.dims = opt.dims;
    sw.seed = derive_seed(opt.seed, 3);
    sw.inject_fault = opt.inject_fault;
    for (auto& r : check_theorem_suite(sw))
        out.push_back(std::move(r));
    out.push_back(check_monotone_regime(opt.theorem_seeds, 50, derive_seed(opt.seed, 4)));
    for (auto& r : check_gradients(12, derive_seed(opt.seed, 5)))
        out.push_back(std::move(r));
    return out;
}

inline bool all_passed(const std::vector<PropertyResult>& rs)
{
    return std::all_of(rs.begin(), rs.end(), [](const PropertyResult& r) { return r.passed; });
}

inline void write_verify_text(std::ostream& os, const std::vector<PropertyResult>& rs)
{
    for (const auto& r : rs) {
        os << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  worst=" << detail::fmt(r.worst, 3)
           << " tol=" << detail::fmt(r.tol, 2);
        if (!r.note.empty())
            os << "  (" << r.note << ")";
        os << '\n';
    }
}

inline void write_verify_json(std::ostream& os, const std::vector<PropertyResult>& rs)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rs)
        arr.push_back({{"property", r.name}, {"passed", r.passed}, {"worst", r.worst}, {"tol", r.tol}, {"note", r.note}});
    nlohmann::ordered_json doc{{"passed", all_passed(rs)}, {"properties", arr}};
    os << doc.dump(2) << '\n';
}

} // namespace rbb
