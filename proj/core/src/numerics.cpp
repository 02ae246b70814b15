#include "citekinetics/numerics.hpp"

#include "citekinetics/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace citek {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kLnSqrt2Pi = 0.918938533204672741780329736405618;

}  // namespace

double ln_gamma(double x) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError("ln_gamma: x must be positive and finite");
    }
    // Shift into the region where the Stirling series converges fast,
    // using ln Gamma(x) = ln Gamma(x + 1) - ln x.
    double shift = 0.0;
    while (x < 13.0) {
        shift += std::log(x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli series; remainder < 1.1e-15 at x = 13.
    const double series =
        inv * (8.3333333333333333e-02 +
               inv2 * (-2.7777777777777778e-03 +
                       inv2 * (7.9365079365079365e-04 +
                               inv2 * (-5.9523809523809524e-04 +
                                       inv2 * 8.4175084175084175e-04))));
    return (x - 0.5) * std::log(x) - x + kLnSqrt2Pi + series - shift;
}

double regularized_gamma_q(double a, double x) {
    if (!std::isfinite(a) || a <= 0.0) {
        throw DomainError("regularized_gamma_q: a must be positive and finite");
    }
    if (!std::isfinite(x) || x < 0.0) {
        throw DomainError("regularized_gamma_q: x must be nonnegative and finite");
    }
    if (x == 0.0) {
        return 1.0;
    }
    const double log_prefactor = a * std::log(x) - x - ln_gamma(a);
    if (x < a + 1.0) {
        // Lower series for P(a, x); every term is positive.
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < 10000; ++n) {
            term *= x / (a + n);
            sum += term;
            if (term < sum * 1e-17) {
                break;
            }
        }
        return 1.0 - std::exp(log_prefactor) * sum;
    }
    // Modified Lentz continued fraction for Q(a, x).
    constexpr double kFpMin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) {
            break;
        }
    }
    return std::exp(log_prefactor) * h;
}

double bessel_i0(double x) {
    if (!std::isfinite(x) || x < 0.0) {
        throw DomainError("bessel_i0: x must be nonnegative and finite");
    }
    if (x < 30.0) {
        // Ascending series sum_m (x^2/4)^m / (m!)^2. Below the crossover the
        // asymptotic expansion still truncates above 1e-15; here the series
        // terms are all positive, so no cancellation.
        const double q = 0.25 * x * x;
        double term = 1.0;
        double sum = 1.0;
        for (int m = 1; m < 500; ++m) {
            term *= q / (static_cast<double>(m) * static_cast<double>(m));
            sum += term;
            if (term < sum * 1e-17) {
                break;
            }
        }
        return sum;
    }
    return std::exp(ln_bessel_i0(x));
}

double ln_bessel_i0(double x) {
    if (!std::isfinite(x) || x < 0.0) {
        throw DomainError("ln_bessel_i0: x must be nonnegative and finite");
    }
    if (x < 30.0) {
        return std::log(bessel_i0(x));
    }
    // Asymptotic expansion I0(x) ~ e^x / sqrt(2 pi x) * sum_k a_k with
    // a_k = ((2k-1)!!)^2 / (k! (8x)^k); truncate at the smallest term.
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 20; ++k) {
        const double m = static_cast<double>(2 * k - 1);
        const double next = term * m * m / (8.0 * static_cast<double>(k) * x);
        if (next >= term) {
            break;
        }
        term = next;
        sum += term;
        if (term < sum * 1e-17) {
            break;
        }
    }
    return x - 0.5 * std::log(2.0 * kPi * x) + std::log(sum);
}

double std_normal_cdf(double z) {
    if (!std::isfinite(z)) {
        throw DomainError("std_normal_cdf: z must be finite");
    }
    if (z == 0.0) {
        return 0.5;
    }
    // Phi(-|z|) = erfc(|z|/sqrt(2)) / 2 = Q(1/2, z^2/2) / 2.
    const double tail = 0.5 * regularized_gamma_q(0.5, 0.5 * z * z);
    return z > 0.0 ? 1.0 - tail : tail;
}

double log_std_normal_cdf(double z) {
    if (!std::isfinite(z)) {
        throw DomainError("log_std_normal_cdf: z must be finite");
    }
    if (z >= -1.0) {
        return std::log(std_normal_cdf(z));
    }
    const double t = -z;
    if (t < 37.0) {
        // Phi(-t) is still representable as a double here.
        return std::log(0.5 * regularized_gamma_q(0.5, 0.5 * t * t));
    }
    // Mills-ratio continued fraction:
    // Phi(-t) = phi(t) * R(t), R(t) = 1/(t + 1/(t + 2/(t + 3/(t + ...)))).
    constexpr double kFpMin = 1e-300;
    double f = kFpMin;
    double c = f;
    double d = 0.0;
    for (int j = 1; j < 500; ++j) {
        const double aj = (j == 1) ? 1.0 : static_cast<double>(j - 1);
        d = t + aj * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = t + aj / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) {
            break;
        }
    }
    return -0.5 * t * t - kLnSqrt2Pi + std::log(f);
}

double log_sum_exp(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) {
        throw DomainError("log_sum_exp: NaN argument");
    }
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

double log_diff_exp(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) {
        throw DomainError("log_diff_exp: NaN argument");
    }
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (a == b) return -std::numeric_limits<double>::infinity();
    if (!(a > b)) {
        throw DomainError("log_diff_exp: requires a >= b");
    }
    return a + std::log1p(-std::exp(b - a));
}

namespace {

// 15-point Kronrod nodes (positive half, descending) with the embedded
// 7-point Gauss rule at the odd indices.
constexpr std::array<double, 7> kK15Nodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
};

constexpr std::array<double, 8> kK15Weights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,  // center
};

constexpr std::array<double, 4> kG7Weights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,  // center
};

struct Panel {
    double lo;
    double hi;
    double estimate;
    double error;
};

struct PanelOrder {
    bool operator()(const Panel& a, const Panel& b) const {
        return a.error < b.error;
    }
};

Panel evaluate_panel(const std::function<double(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    if (!std::isfinite(fc)) {
        throw DomainError("integrate: integrand not finite at x = " + std::to_string(center));
    }
    double resk = kK15Weights[7] * fc;
    double resg = kG7Weights[3] * fc;
    double resabs = kK15Weights[7] * std::fabs(fc);
    std::array<double, 7> f_below;
    std::array<double, 7> f_above;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kK15Nodes[static_cast<std::size_t>(j)];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        if (!std::isfinite(f1) || !std::isfinite(f2)) {
            throw DomainError("integrate: integrand not finite inside panel");
        }
        f_below[static_cast<std::size_t>(j)] = f1;
        f_above[static_cast<std::size_t>(j)] = f2;
        const double w = kK15Weights[static_cast<std::size_t>(j)];
        resk += w * (f1 + f2);
        resabs += w * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) {
            resg += kG7Weights[static_cast<std::size_t>(j / 2)] * (f1 + f2);
        }
    }
    // QUADPACK-style error estimate sharpened by the mean deviation.
    const double reskh = 0.5 * resk;
    double resasc = kK15Weights[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kK15Weights[static_cast<std::size_t>(j)] *
                  (std::fabs(f_below[static_cast<std::size_t>(j)] - reskh) +
                   std::fabs(f_above[static_cast<std::size_t>(j)] - reskh));
    }
    resabs *= half;
    resasc *= half;
    double err = std::fabs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(err, 50.0 * eps * resabs);
    }
    return Panel{lo, hi, resk * half, err};
}

double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          double rel_tol, std::vector<double> cuts) {
    std::vector<double> bounds;
    bounds.push_back(lo);
    std::sort(cuts.begin(), cuts.end());
    for (double c : cuts) {
        if (c > bounds.back() && c < hi) {
            bounds.push_back(c);
        }
    }
    bounds.push_back(hi);
    // A minimum panel count guards against narrow features the first
    // coarse estimates would miss entirely.
    while (bounds.size() < 9) {
        std::size_t widest = 0;
        for (std::size_t i = 1; i + 1 < bounds.size(); ++i) {
            if (bounds[i + 1] - bounds[i] > bounds[widest + 1] - bounds[widest]) {
                widest = i;
            }
        }
        bounds.insert(bounds.begin() + static_cast<std::ptrdiff_t>(widest) + 1,
                      0.5 * (bounds[widest] + bounds[widest + 1]));
    }

    std::priority_queue<Panel, std::vector<Panel>, PanelOrder> queue;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        Panel p = evaluate_panel(f, bounds[i], bounds[i + 1]);
        total += p.estimate;
        total_err += p.error;
        queue.push(p);
    }

    constexpr std::size_t kMaxPanels = 4096;
    while (total_err > rel_tol * std::fabs(total) && total_err > 1e-305) {
        if (queue.size() >= kMaxPanels) {
            throw ConvergenceError("integrate: panel budget exhausted before reaching tolerance",
                                   total);
        }
        const Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {
            // Panel is at floating-point resolution; nothing more to gain.
            queue.push(Panel{worst.lo, worst.hi, worst.estimate, 0.0});
            total_err -= worst.error;
            continue;
        }
        Panel left = evaluate_panel(f, worst.lo, mid);
        Panel right = evaluate_panel(f, mid, worst.hi);
        total += left.estimate + right.estimate - worst.estimate;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, Interval domain, double rel_tol) {
    return integrate(f, domain, rel_tol, std::span<const double>{});
}

double integrate(const std::function<double(double)>& f, Interval domain, double rel_tol,
                 std::span<const double> breakpoints) {
    if (!std::isfinite(domain.lo)) {
        throw DomainError("integrate: lower limit must be finite");
    }
    if (std::isnan(domain.hi) || !(domain.hi > domain.lo)) {
        throw DomainError("integrate: domain must satisfy lo < hi");
    }
    if (!(rel_tol >= 1e-13 && rel_tol <= 0.1)) {
        throw DomainError("integrate: rel_tol must lie in [1e-13, 0.1]");
    }
    std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
    for (double c : cuts) {
        if (!std::isfinite(c)) {
            throw DomainError("integrate: breakpoints must be finite");
        }
    }
    if (std::isinf(domain.hi)) {
        // Map [lo, inf) onto [0, 1) via x = lo + t / (1 - t).
        const double lo = domain.lo;
        auto g = [&f, lo](double t) {
            const double u = 1.0 - t;
            return f(lo + t / u) / (u * u);
        };
        std::vector<double> tcuts;
        tcuts.reserve(cuts.size());
        for (double c : cuts) {
            if (c > lo) {
                tcuts.push_back((c - lo) / (1.0 + (c - lo)));
            }
        }
        return integrate_adaptive(g, 0.0, 1.0, rel_tol, std::move(tcuts));
    }
    return integrate_adaptive(f, domain.lo, domain.hi, rel_tol, std::move(cuts));
}

namespace {

std::uint64_t splitmix_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Uniform in (-1, 1), never hitting the endpoints.
double uniform_pm1(std::uint64_t& state) {
    const double u = (static_cast<double>(splitmix_next(state) >> 11) + 0.5) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

struct NmRun {
    std::vector<double> x;
    double fx;
    bool converged;
    int iterations;
};

NmRun nelder_mead(const std::function<double(std::span<const double>)>& f,
                  const std::vector<double>& start, int max_iter, double tol) {
    const std::size_t n = start.size();
    auto safe_f = [&f](const std::vector<double>& x) {
        const double v = f(std::span<const double>(x));
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<std::vector<double>> xs(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i + 1][i] += 0.05 + 0.1 * std::fabs(start[i]);
    }
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        fs[i] = safe_f(xs[i]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n);
    std::vector<double> candidate(n);
    bool converged = false;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&fs](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t best = order[0];
        const std::size_t worst = order[n];
        const std::size_t second_worst = order[n - 1];
        if (std::isfinite(fs[worst]) &&
            fs[worst] - fs[best] <= tol * (1.0 + std::fabs(fs[best]))) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += xs[i][d];
        }
        for (std::size_t d = 0; d < n; ++d) centroid[d] /= static_cast<double>(n);

        auto blend = [&](double coef) {
            for (std::size_t d = 0; d < n; ++d) {
                candidate[d] = centroid[d] + coef * (xs[worst][d] - centroid[d]);
            }
        };

        blend(-1.0);  // reflection
        const std::vector<double> xr = candidate;
        const double fr = safe_f(xr);
        if (fr < fs[best]) {
            blend(-2.0);  // expansion
            const double fe = safe_f(candidate);
            if (fe < fr) {
                xs[worst] = candidate;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
            continue;
        }
        if (fr < fs[second_worst]) {
            xs[worst] = xr;
            fs[worst] = fr;
            continue;
        }
        if (fr < fs[worst]) {
            blend(-0.5);  // outside contraction
            const double fc = safe_f(candidate);
            if (fc <= fr) {
                xs[worst] = candidate;
                fs[worst] = fc;
                continue;
            }
        } else {
            blend(0.5);  // inside contraction
            const double fc = safe_f(candidate);
            if (fc < fs[worst]) {
                xs[worst] = candidate;
                fs[worst] = fc;
                continue;
            }
        }
        // Shrink toward the best vertex.
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t d = 0; d < n; ++d) {
                xs[i][d] = xs[best][d] + 0.5 * (xs[i][d] - xs[best][d]);
            }
            fs[i] = safe_f(xs[i]);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (fs[i] < fs[best]) best = i;
    }
    return NmRun{xs[best], fs[best], converged, iter};
}

}  // namespace

MinimizeResult minimize(const std::function<double(std::span<const double>)>& f,
                        std::span<const double> start, const OptimizerConfig& config) {
    if (start.empty()) {
        throw DomainError("minimize: start point must be non-empty");
    }
    for (double v : start) {
        if (!std::isfinite(v)) {
            throw DomainError("minimize: start point must be finite");
        }
    }
    if (!(config.tolerance > 0.0) || config.restarts < 0 || config.max_iterations < 0) {
        throw DomainError("minimize: invalid optimizer configuration");
    }
    const double f0 = f(start);
    if (!std::isfinite(f0)) {
        throw DomainError("minimize: objective not finite at the start point");
    }
    const std::size_t n = start.size();
    const int max_iter =
        config.max_iterations > 0 ? config.max_iterations : 400 * static_cast<int>(n);

    std::vector<double> x0(start.begin(), start.end());
    NmRun best = nelder_mead(f, x0, max_iter, config.tolerance);
    int total_iter = best.iterations;
    bool best_converged = best.converged;

    std::uint64_t rng = config.seed ^ 0xD1B54A32D192ED03ull;
    for (int r = 0; r < config.restarts; ++r) {
        std::vector<double> perturbed = best.x;
        for (double& v : perturbed) {
            v += (0.5 + 0.5 * std::fabs(v)) * uniform_pm1(rng);
        }
        NmRun run = nelder_mead(f, perturbed, max_iter, config.tolerance);
        total_iter += run.iterations;
        if (run.fx < best.fx) {
            best = run;
            best_converged = run.converged;
        }
    }
    return MinimizeResult{best.x, best.fx, best_converged, total_iter, config.restarts};
}

}  // namespace citek
