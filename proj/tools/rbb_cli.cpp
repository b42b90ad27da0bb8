// rbb: benchmark and verification front end.
//
//   rbb quad --family P1 --family P2 --n 100 --kappa 1e4 --method bb1 --method rbb:two-step
//   rbb nonquad --objective ExtWhiteHolst --n 200 --max-iter 10000
//   rbb sphdesign --t 4 --points design
//   rbb verify [--json] [--inject-fault]
//   rbb bench --suite quad-hard --n 1000 --kappa 1e6

#include "rbb/rbb.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

namespace {

struct CommonOpts {
    std::vector<std::string> families;
    std::vector<std::string> objectives;
    std::vector<std::size_t> dims;
    std::vector<double> kappas;
    std::vector<double> eps;
    std::vector<std::string> methods;
    int seeds = 10;
    std::size_t max_iter = 0;
    std::string min_mode = "zeros";
    std::string out;
    bool json = false;
    bool per_run = false;
    bool no_time = false;
    unsigned workers = 1;
};

void add_sweep_flags(CLI::App* cmd, CommonOpts& o)
{
    cmd->add_option("--family", o.families, "spectrum family P1..P7 or HardLog (repeatable)");
    cmd->add_option("--objective", o.objectives, "named test function (repeatable; see list-objectives)");
    cmd->add_option("--n", o.dims, "dimension (repeatable)");
    cmd->add_option("--kappa", o.kappas, "largest eigenvalue / condition parameter (repeatable)");
    cmd->add_option("--eps", o.eps, "relative gradient tolerance (repeatable)");
    cmd->add_option("--method", o.methods, "bb1, bb2, dai:<g>, rbb[:two-step|:fixed=<tau>], rbbq[...]");
    cmd->add_option("--seeds", o.seeds, "start points per cell")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", o.max_iter, "iteration cap");
    cmd->add_option("--min-mode", o.min_mode, "minimizer: zeros|ones");
    cmd->add_option("--out", o.out, "output file (default stdout)");
    cmd->add_flag("--json", o.json, "write JSON instead of CSV");
    cmd->add_flag("--record-iterates,--per-run", o.per_run, "also write one row per start point");
    cmd->add_flag("--no-time", o.no_time, "leave the time column empty (byte-stable output)");
    cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
}

rbb::BenchmarkPlan make_plan(rbb::Suite suite, const CommonOpts& o, std::vector<std::string> default_methods)
{
    rbb::BenchmarkPlan p;
    p.suite = suite;
    p.master_seed = rbb::master_seed_from_env();
    if (!o.dims.empty())
        p.dims = o.dims;
    if (!o.kappas.empty())
        p.kappas = o.kappas;
    if (!o.eps.empty())
        p.eps = o.eps;
    if (suite == rbb::Suite::QuadHard)
        p.families = {rbb::SpectrumFamily::HardLog};
    if (!o.families.empty()) {
        p.families.clear();
        for (const auto& f : o.families)
            p.families.push_back(rbb::parse_family(f));
    }
    p.objectives = o.objectives;
    p.seeds = o.seeds;
    for (const auto& m : o.methods.empty() ? default_methods : o.methods)
        p.methods.push_back(rbb::parse_method(m));
    if (o.max_iter)
        p.max_iter = o.max_iter;
    else if (suite == rbb::Suite::NonQuad)
        p.max_iter = 10000;
    p.min_mode = rbb::parse_minimizer_mode(o.min_mode);
    p.per_run_rows = o.per_run;
    p.no_time = o.no_time;
    p.workers = o.workers;
    return p;
}

/// Writes to --out when given, otherwise stdout.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_)
                throw std::runtime_error("cannot open output file '" + path + "'");
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void emit_rows(const CommonOpts& o, const std::vector<rbb::ReportRow>& rows)
{
    Sink sink(o.out);
    if (o.json)
        rbb::write_json(sink.os(), rows);
    else
        rbb::write_csv(sink.os(), rows);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"RBB stepsize benchmarks and checks"};
    app.require_subcommand(1);

    CommonOpts quad_o, nonquad_o, bench_o;
    auto* quad = app.add_subcommand("quad", "quadratic spectra sweep (paired starts, mu vs the first method)");
    add_sweep_flags(quad, quad_o);

    auto* nonquad = app.add_subcommand("nonquad", "named test functions from standard starts");
    add_sweep_flags(nonquad, nonquad_o);

    std::string suite_name;
    auto* bench = app.add_subcommand("bench", "run a plan by suite name");
    bench->add_option("--suite", suite_name, "quad-spectra | quad-hard | nonquad | sphdesign | verify")->required();
    add_sweep_flags(bench, bench_o);

    rbb::DesignPlan design;
    std::vector<std::string> design_methods;
    std::string design_out, points_prefix;
    bool design_json = false;
    auto* sph = app.add_subcommand("sphdesign", "construct a spherical t-design");
    sph->add_option("--t", design.t, "design strength")->check(CLI::PositiveNumber);
    sph->add_option("--N", design.N, "point count (default (t+1)^2)");
    sph->add_option("--seed", design.seed, "layout seed");
    sph->add_option("--eps", design.eps, "stopping tolerance");
    sph->add_option("--max-iter", design.max_iter, "iteration cap");
    sph->add_option("--method", design_methods, "bb1, bb2, rbb[...] (repeatable)");
    sph->add_option("--points", points_prefix, "write point sets to <prefix>-<method>.txt");
    sph->add_option("--out", design_out, "report file (default stdout)");
    sph->add_flag("--json", design_json, "write JSON instead of CSV");
    sph->add_flag("--no-time", design.no_time, "leave the time column empty");

    rbb::VerifyOptions vopt;
    bool verify_json = false;
    auto* verify = app.add_subcommand("verify", "run the invariant suite; exit 0 iff every property holds");
    verify->add_option("--seed", vopt.seed, "master seed");
    verify->add_option("--instances", vopt.instances, "random SPD instances for stepsize properties");
    verify->add_option("--sweep", vopt.theorem_seeds, "seeds per dimension for trace properties");
    verify->add_flag("--json", verify_json, "machine-readable output");
    verify->add_flag("--inject-fault", vopt.inject_fault, "corrupt one alpha per trace (the run must fail)");

    auto* list = app.add_subcommand("list-objectives", "print supported test functions");

    rbb::SpectrumSpec export_spec;
    std::string export_family = "P1", export_mode = "zeros", export_out;
    auto* exportp = app.add_subcommand("export-problem", "write a quadratic problem replay file");
    exportp->add_option("--family", export_family, "P1..P7 or HardLog");
    exportp->add_option("--n", export_spec.n, "dimension");
    exportp->add_option("--kappa", export_spec.kappa, "condition parameter");
    exportp->add_option("--seed", export_spec.seed, "problem seed");
    exportp->add_option("--min-mode", export_mode, "zeros|ones");
    exportp->add_option("--out", export_out, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    const std::vector<std::string> quad_default = {"bb1", "rbb:two-step"};
    const std::vector<std::string> nonquad_default = {"bb1", "bb2", "rbb:two-step"};
    try {
        if (!verify->count("--seed"))
            vopt.seed = rbb::master_seed_from_env();

        if (*quad) {
            emit_rows(quad_o, rbb::cmd_quad(make_plan(rbb::Suite::QuadSpectra, quad_o, quad_default)));
        } else if (*nonquad) {
            emit_rows(nonquad_o, rbb::cmd_nonquad(make_plan(rbb::Suite::NonQuad, nonquad_o, nonquad_default)));
        } else if (*bench) {
            const auto suite = rbb::parse_suite(suite_name);
            switch (suite) {
            case rbb::Suite::QuadSpectra:
            case rbb::Suite::QuadHard:
                emit_rows(bench_o, rbb::cmd_quad(make_plan(suite, bench_o, quad_default)));
                break;
            case rbb::Suite::NonQuad:
                emit_rows(bench_o, rbb::cmd_nonquad(make_plan(suite, bench_o, nonquad_default)));
                break;
            case rbb::Suite::SphDesign:
            case rbb::Suite::Verify:
                std::cerr << "use the sphdesign or verify subcommand for this suite\n";
                return 2;
            }
        } else if (*sph) {
            for (const auto& m : design_methods.empty() ? nonquad_default : design_methods)
                design.methods.push_back(rbb::parse_method(m));
            design.points_prefix = points_prefix;
            const auto rows = rbb::cmd_sphdesign(design);
            Sink sink(design_out);
            if (design_json)
                rbb::write_design_json(sink.os(), rows);
            else
                rbb::write_design_csv(sink.os(), rows);
        } else if (*verify) {
            const auto results = rbb::cmd_verify(vopt);
            if (verify_json)
                rbb::write_verify_json(std::cout, results);
            else
                rbb::write_verify_text(std::cout, results);
            return rbb::all_passed(results) ? 0 : 1;
        } else if (*list) {
            for (const auto& r : rbb::objective_registry())
                std::cout << r.name << "  n: " << r.valid_dims << "  start: " << r.start << '\n';
        } else if (*exportp) {
            export_spec.family = rbb::parse_family(export_family);
            const auto prob = rbb::build_problem(export_spec, rbb::parse_minimizer_mode(export_mode));
            Sink sink(export_out);
            rbb::write_problem(sink.os(), prob);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
