#pragma once

// Randomized SPD quadratic test problems f(x) = 1/2 x'Ax - b'x with
// A = Q diag(v) Q', where Q is a product of three Householder reflections.
// A is never formed; applying it costs O(n) per reflection.

#include "rbb/linalg.hpp"
#include "rbb/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbb {

enum class SpectrumFamily { P1, P2, P3, P4, P5, P6, P7, HardLog };

enum class MinimizerMode { Zeros, Ones };

inline std::string to_string(SpectrumFamily f)
{
    static const char* names[] = {"P1", "P2", "P3", "P4", "P5", "P6", "P7", "HardLog"};
    return names[static_cast<int>(f)];
}

inline SpectrumFamily parse_family(const std::string& s)
{
    for (int i = 0; i <= static_cast<int>(SpectrumFamily::HardLog); ++i) {
        auto f = static_cast<SpectrumFamily>(i);
        if (to_string(f) == s)
            return f;
    }
    if (s == "hardlog" || s == "hard")
        return SpectrumFamily::HardLog;
    throw std::invalid_argument("unknown spectrum family '" + s + "' (expected P1..P7 or HardLog)");
}

inline std::string to_string(MinimizerMode m) { return m == MinimizerMode::Zeros ? "zeros" : "ones"; }

inline MinimizerMode parse_minimizer_mode(const std::string& s)
{
    if (s == "zeros")
        return MinimizerMode::Zeros;
    if (s == "ones")
        return MinimizerMode::Ones;
    throw std::invalid_argument("unknown minimizer mode '" + s + "' (expected zeros|ones)");
}

struct SpectrumSpec {
    SpectrumFamily family = SpectrumFamily::P1;
    std::size_t n = 100;
    double kappa = 1e4;
    std::uint64_t seed = 0;
};

/// Smallest and largest diagonal entries are pinned to these values.
inline constexpr double spectrum_low_end = 0.1;

namespace detail {

struct Band {
    long first; // 1-based, inclusive
    long last;
    double lo;
    double hi;
};

inline std::vector<Band> table_bands(SpectrumFamily family, long n, double kappa)
{
    const long n5 = n / 5, n2 = n / 2, n45 = (4 * n) / 5;
    const double half = kappa / 2.0;
    switch (family) {
    case SpectrumFamily::P1: return {{2, n - 1, 1.0, kappa}};
    case SpectrumFamily::P2: return {{2, n5, 1.0, 100.0}, {n5 + 1, n - 1, half, kappa}};
    case SpectrumFamily::P3: return {{2, n2, 1.0, 100.0}, {n2 + 1, n - 1, half, kappa}};
    case SpectrumFamily::P4: return {{2, n45, 1.0, 100.0}, {n45 + 1, n - 1, half, kappa}};
    case SpectrumFamily::P5:
        return {{2, n5, 1.0, 100.0}, {n5 + 1, n45, 100.0, half}, {n45 + 1, n - 1, half, kappa}};
    case SpectrumFamily::P6: return {{2, 10, 1.0, 100.0}, {11, n - 1, half, kappa}};
    case SpectrumFamily::P7: return {{2, n - 10, 1.0, 100.0}, {n - 9, n - 1, half, kappa}};
    case SpectrumFamily::HardLog: break;
    }
    return {};
}

} // namespace detail

/// Diagonal of V in index order (entry i-1 is v_i).
///
/// P1..P7: v_1 = 0.1, v_n = kappa, interior entries uniform inside the
/// family's open bands; band boundaries n/5, n/2, 4n/5 are floored.
/// HardLog: v_i = 10^(log10(kappa) (n - i) / (n - 1)) for 1 < i < n.
inline Vector spectrum(const SpectrumSpec& spec)
{
    if (!(spec.kappa > 1.0) || !std::isfinite(spec.kappa))
        throw std::invalid_argument("spectrum: kappa must be finite and > 1");
    const long n = static_cast<long>(spec.n);
    Vector v(spec.n);

    if (spec.family == SpectrumFamily::HardLog) {
        if (n < 2)
            throw std::invalid_argument("spectrum: HardLog needs n >= 2");
        const double ncond = std::log10(spec.kappa);
        v.front() = spectrum_low_end;
        for (long i = 2; i <= n - 1; ++i)
            v[i - 1] = std::pow(10.0, ncond * static_cast<double>(n - i) / static_cast<double>(n - 1));
        v.back() = spec.kappa;
        return v;
    }

    if (n < 3)
        throw std::invalid_argument("spectrum: P-families need n >= 3");
    const auto bands = detail::table_bands(spec.family, n, spec.kappa);
    long expect = 2;
    for (const auto& b : bands) {
        if (b.first != expect || b.last < b.first - 1)
            throw std::invalid_argument("spectrum: " + to_string(spec.family) +
                                        " bands do not partition [2, n-1] for n = " + std::to_string(n));
        if (b.last >= b.first && !(b.lo < b.hi))
            throw std::invalid_argument("spectrum: empty value interval for " + to_string(spec.family) +
                                        " at kappa = " + std::to_string(spec.kappa));
        expect = b.last + 1;
    }
    if (expect != n)
        throw std::invalid_argument("spectrum: " + to_string(spec.family) +
                                    " bands do not partition [2, n-1] for n = " + std::to_string(n));

    Rng rng(derive_seed(spec.seed, 0x5bec));
    v.front() = spectrum_low_end;
    v.back() = spec.kappa;
    for (const auto& b : bands) {
        const double delta = (b.hi - b.lo) * 0x1.0p-32;
        for (long i = b.first; i <= b.last; ++i)
            v[i - 1] = rng.uniform(b.lo + delta, b.hi - delta);
    }
    return v;
}

/// Q = (I - 2 w_m w_m')...(I - 2 w_1 w_1') with unit w_j. No reflectors means Q = I.
class HouseholderQ {
public:
    HouseholderQ() = default;
    explicit HouseholderQ(std::vector<Vector> reflectors) : w_(std::move(reflectors)) {}

    const std::vector<Vector>& reflectors() const { return w_; }
    bool is_identity() const { return w_.empty(); }

    void apply(std::span<double> x) const
    {
        for (const auto& w : w_)
            reflect(w, x);
    }

    void apply_transpose(std::span<double> x) const
    {
        for (auto it = w_.rbegin(); it != w_.rend(); ++it)
            reflect(*it, x);
    }

private:
    static void reflect(const Vector& w, std::span<double> x)
    {
        const double c = 2.0 * dot(w, x);
        axpy(-c, w, x);
    }

    std::vector<Vector> w_;
};

inline HouseholderQ householder_orthogonal(std::size_t n, std::uint64_t seed, int count = 3)
{
    if (n < 1)
        throw std::invalid_argument("householder_orthogonal: n must be >= 1");
    Rng rng(derive_seed(seed, 0x40b5e));
    std::vector<Vector> ws;
    for (int j = 0; j < count; ++j) {
        Vector w(n);
        double nrm = 0.0;
        while (!(nrm > 1e-3)) {
            for (auto& c : w)
                c = rng.uniform(-1.0, 1.0);
            nrm = norm2(w);
        }
        for (auto& c : w)
            c /= nrm;
        ws.push_back(std::move(w));
    }
    return HouseholderQ(std::move(ws));
}

/// Eigenvalues in ascending order; eigenvector j is Q e_{order[j]}.
struct EigenData {
    Vector values;
    std::vector<std::size_t> order;

    double lambda_min() const { return values.front(); }
    double lambda_max() const { return values.back(); }
    double condition() const { return values.back() / values.front(); }
};

struct ProblemInfo {
    std::string family = "custom";
    double kappa = 0.0;
    std::uint64_t seed = 0;
    MinimizerMode mode = MinimizerMode::Zeros;
};

/// Immutable once built; safe to share across concurrent solver runs.
class QuadraticProblem {
public:
    QuadraticProblem(Vector diag, HouseholderQ q, MinimizerMode mode, ProblemInfo info = {})
        : diag_(std::move(diag)), q_(std::move(q)), info_(std::move(info))
    {
        if (diag_.empty())
            throw std::invalid_argument("QuadraticProblem: empty spectrum");
        for (double v : diag_)
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("QuadraticProblem: eigenvalues must be positive and finite");
        for (const auto& w : q_.reflectors())
            if (w.size() != diag_.size())
                throw std::invalid_argument("QuadraticProblem: reflector length mismatch");
        info_.mode = mode;
        x_star_.assign(diag_.size(), mode == MinimizerMode::Ones ? 1.0 : 0.0);
        b_ = apply(x_star_);

        EigenData ed;
        ed.order.resize(diag_.size());
        std::iota(ed.order.begin(), ed.order.end(), std::size_t{0});
        std::stable_sort(ed.order.begin(), ed.order.end(),
                         [this](std::size_t a, std::size_t b) { return diag_[a] < diag_[b]; });
        for (auto i : ed.order)
            ed.values.push_back(diag_[i]);
        eigen_ = std::move(ed);
    }

    std::size_t n() const { return diag_.size(); }
    const Vector& diag() const { return diag_; }
    const HouseholderQ& q() const { return q_; }
    const Vector& b() const { return b_; }
    const Vector& x_star() const { return x_star_; }
    const ProblemInfo& info() const { return info_; }
    const std::optional<EigenData>& eigen() const { return eigen_; }

    /// Removes the eigen-structure view (for code paths that must not rely on it).
    void drop_eigen_data() { eigen_.reset(); }

    void apply(std::span<const double> x, std::span<double> out) const
    {
        std::copy(x.begin(), x.end(), out.begin());
        q_.apply_transpose(out);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] *= diag_[i];
        q_.apply(out);
    }

    Vector apply(std::span<const double> x) const
    {
        Vector out(x.size());
        apply(x, out);
        return out;
    }

    double value(std::span<const double> x) const
    {
        const Vector ax = apply(x);
        return 0.5 * dot(x, ax) - dot(b_, x);
    }

    Vector gradient(std::span<const double> x) const
    {
        Vector g = apply(x);
        for (std::size_t i = 0; i < g.size(); ++i)
            g[i] -= b_[i];
        return g;
    }

    /// Unit eigenvector for the j-th smallest eigenvalue.
    Vector eigenvector(std::size_t j) const
    {
        if (!eigen_)
            throw std::logic_error("QuadraticProblem: eigen data unavailable");
        Vector e(n(), 0.0);
        e[eigen_->order.at(j)] = 1.0;
        q_.apply(e);
        return e;
    }

private:
    Vector diag_;
    HouseholderQ q_;
    Vector b_;
    Vector x_star_;
    ProblemInfo info_;
    std::optional<EigenData> eigen_;
};

inline QuadraticProblem build_problem(const SpectrumSpec& spec, MinimizerMode mode = MinimizerMode::Zeros)
{
    Vector v = spectrum(spec);
    HouseholderQ q;
    if (spec.family != SpectrumFamily::HardLog)
        q = householder_orthogonal(spec.n, spec.seed);
    return QuadraticProblem(std::move(v), std::move(q), mode,
                            ProblemInfo{to_string(spec.family), spec.kappa, spec.seed, mode});
}

/// Entries uniform in [-5, 5].
inline Vector random_start(std::size_t n, std::uint64_t seed)
{
    if (n < 1)
        throw std::invalid_argument("random_start: n must be >= 1");
    Rng rng(derive_seed(seed, 0x57a27));
    Vector x(n);
    for (auto& c : x)
        c = rng.uniform(-5.0, 5.0);
    return x;
}

// --- replay files ----------------------------------------------------------
//
//   rbb-problem 1
//   n <n>
//   family <name>
//   kappa <k>
//   seed <s>
//   minimizer_mode zeros|ones
//   eigenvalues
//   <n lines, diagonal of V in index order>
//   reflectors <m>
//   <m lines, n space-separated entries each>
//
// Reals are written with 17 significant digits so a reload is bit-exact.

inline void write_problem(std::ostream& os, const QuadraticProblem& p)
{
    const auto& info = p.info();
    os << "rbb-problem 1\n";
    os << "n " << p.n() << '\n';
    os << "family " << info.family << '\n';
    os << std::setprecision(17);
    os << "kappa " << info.kappa << '\n';
    os << "seed " << info.seed << '\n';
    os << "minimizer_mode " << to_string(info.mode) << '\n';
    os << "eigenvalues\n";
    for (double v : p.diag())
        os << v << '\n';
    const auto& ws = p.q().reflectors();
    os << "reflectors " << ws.size() << '\n';
    for (const auto& w : ws) {
        for (std::size_t i = 0; i < w.size(); ++i)
            os << (i ? " " : "") << w[i];
        os << '\n';
    }
}

inline QuadraticProblem read_problem(std::istream& is)
{
    auto expect = [&](const std::string& key) {
        std::string k;
        if (!(is >> k) || k != key)
            throw std::runtime_error("read_problem: expected '" + key + "', got '" + k + "'");
    };
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != "rbb-problem" || version != 1)
        throw std::runtime_error("read_problem: not an rbb-problem v1 file");
    std::size_t n = 0;
    ProblemInfo info;
    std::string mode;
    expect("n");
    is >> n;
    expect("family");
    is >> info.family;
    expect("kappa");
    is >> info.kappa;
    expect("seed");
    is >> info.seed;
    expect("minimizer_mode");
    is >> mode;
    expect("eigenvalues");
    if (!is || n == 0)
        throw std::runtime_error("read_problem: malformed header");
    Vector diag(n);
    for (auto& v : diag)
        if (!(is >> v))
            throw std::runtime_error("read_problem: truncated eigenvalue list");
    expect("reflectors");
    std::size_t m = 0;
    is >> m;
    std::vector<Vector> ws(m, Vector(n));
    for (auto& w : ws)
        for (auto& c : w)
            if (!(is >> c))
                throw std::runtime_error("read_problem: truncated reflector data");
    return QuadraticProblem(std::move(diag), HouseholderQ(std::move(ws)), parse_minimizer_mode(mode),
                            std::move(info));
}

} // namespace rbb
