#include "tlr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tlr/common.hpp"

namespace tlr {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();

    // Acklam's rational approximation with one Halley refinement step
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log(1.0 - x);

    // continued fraction (modified Lentz)
    auto fraction = [](double a_, double b_, double x_) {
        constexpr double eps = 1e-15;
        constexpr double tiny = 1e-300;
        double c = 1.0, d = 1.0 - (a_ + b_) * x_ / (a_ + 1.0);
        if (std::fabs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= 400; ++m) {
            const double m2 = 2.0 * m;
            double num = m * (b_ - m) * x_ / ((a_ + m2 - 1.0) * (a_ + m2));
            d = 1.0 + num * d;
            if (std::fabs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::fabs(c) < tiny) c = tiny;
            d = 1.0 / d;
            h *= d * c;
            num = -(a_ + m) * (a_ + b_ + m) * x_ / ((a_ + m2) * (a_ + m2 + 1.0));
            d = 1.0 + num * d;
            if (std::fabs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::fabs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double delta = d * c;
            h *= delta;
            if (std::fabs(delta - 1.0) < eps) break;
        }
        return h;
    };

    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front) * fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(b) - std::lgamma(a) +
                          b * std::log(1.0 - x) + a * std::log(x)) *
                     fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double dof) {
    if (dof <= 0.0) return 1.0;
    const double x = dof / (dof + t * t);
    return incomplete_beta(dof / 2.0, 0.5, x);
}

namespace {

/// Midranks of the pooled sample; also returns the tie-group sizes.
std::vector<double> midranks(const std::vector<double>& pooled,
                             std::vector<std::size_t>* tie_sizes) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
    std::vector<double> ranks(n);
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t end = pos;
        while (end < n && pooled[order[end]] == pooled[order[pos]]) ++end;
        const double rank = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
        for (std::size_t i = pos; i < end; ++i) ranks[order[i]] = rank;
        if (tie_sizes) tie_sizes->push_back(end - pos);
        pos = end;
    }
    return ranks;
}

double u_statistic(const std::vector<double>& a, const std::vector<double>& b) {
    // pair counting keeps the exact enumeration independent of rank bookkeeping
    double u = 0.0;
    for (const double x : a) {
        for (const double y : b) {
            if (x > y) u += 1.0;
            else if (x == y) u += 0.5;
        }
    }
    return u;
}

}  // namespace

MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b) {
    if (a.empty() || b.empty()) {
        throw ConfigError("mann_whitney_u requires non-empty samples");
    }
    MannWhitneyResult result;
    result.u = u_statistic(a, b);
    const std::size_t n1 = a.size(), n2 = b.size();

    if (n1 <= 8 && n2 <= 8) {
        // exact two-sided p over all C(n1+n2, n1) labelings of the pooled values
        result.exact = true;
        std::vector<double> pooled(a);
        pooled.insert(pooled.end(), b.begin(), b.end());
        const std::size_t n = pooled.size();
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + n1, true);
        std::sort(pick.begin(), pick.end());  // lexicographically smallest start

        std::size_t total = 0, le = 0, ge = 0;
        std::vector<double> ga, gb;
        do {
            ga.clear();
            gb.clear();
            for (std::size_t i = 0; i < n; ++i) (pick[i] ? ga : gb).push_back(pooled[i]);
            const double u = u_statistic(ga, gb);
            ++total;
            if (u <= result.u + 1e-12) ++le;
            if (u >= result.u - 1e-12) ++ge;
        } while (std::next_permutation(pick.begin(), pick.end()));
        const double tail = static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
        result.p = std::min(1.0, 2.0 * tail);
        return result;
    }

    // normal approximation with tie correction
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<std::size_t> ties;
    midranks(pooled, &ties);
    const double n = static_cast<double>(n1 + n2);
    double tie_term = 0.0;
    for (const std::size_t t : ties) {
        tie_term += static_cast<double>(t) * t * t - static_cast<double>(t);
    }
    const double mean_u = static_cast<double>(n1) * n2 / 2.0;
    const double var_u = static_cast<double>(n1) * n2 / 12.0 *
                         ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var_u <= 0.0) {
        result.p = 1.0;
        return result;
    }
    const double z = (result.u - mean_u) / std::sqrt(var_u);
    result.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::fabs(z))));
    return result;
}

double wilcoxon_signed_rank(const std::vector<double>& sample, double mu0) {
    std::vector<double> diffs;
    for (const double x : sample) {
        if (x != mu0) diffs.push_back(x - mu0);
    }
    const std::size_t n = diffs.size();
    if (n == 0) return 1.0;

    std::vector<double> abs_diffs(n);
    for (std::size_t i = 0; i < n; ++i) abs_diffs[i] = std::fabs(diffs[i]);
    std::vector<std::size_t> ties;
    const std::vector<double> ranks = midranks(abs_diffs, &ties);
    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (diffs[i] > 0) w_plus += ranks[i];
    }

    if (n <= 20) {
        // exact: enumerate all 2^n sign assignments over the observed ranks
        const std::size_t total = std::size_t{1} << n;
        std::size_t le = 0, ge = 0;
        for (std::size_t mask = 0; mask < total; ++mask) {
            double w = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (std::size_t{1} << i)) w += ranks[i];
            }
            if (w <= w_plus + 1e-12) ++le;
            if (w >= w_plus - 1e-12) ++ge;
        }
        const double tail = static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
        return std::min(1.0, 2.0 * tail);
    }

    double tie_term = 0.0;
    for (const std::size_t t : ties) {
        tie_term += static_cast<double>(t) * t * t - static_cast<double>(t);
    }
    const double nn = static_cast<double>(n);
    const double mean_w = nn * (nn + 1.0) / 4.0;
    const double var_w = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    if (var_w <= 0.0) return 1.0;
    const double z = (w_plus - mean_w) / std::sqrt(var_w);
    return std::min(1.0, 2.0 * (1.0 - normal_cdf(std::fabs(z))));
}

double cliffs_delta(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) {
        throw ConfigError("cliffs_delta requires non-empty samples");
    }
    long long greater = 0, less = 0;
    for (const double x : a) {
        for (const double y : b) {
            if (x > y) ++greater;
            else if (x < y) ++less;
        }
    }
    return static_cast<double>(greater - less) /
           (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

EffectMagnitude cliffs_magnitude(double delta) {
    const double d = std::fabs(delta);
    if (d < 0.147) return EffectMagnitude::negligible;
    if (d < 0.33) return EffectMagnitude::small;
    if (d < 0.474) return EffectMagnitude::medium;
    return EffectMagnitude::large;
}

std::string effect_magnitude_name(EffectMagnitude m) {
    switch (m) {
        case EffectMagnitude::negligible: return "negligible";
        case EffectMagnitude::small: return "small";
        case EffectMagnitude::medium: return "medium";
        case EffectMagnitude::large: return "large";
    }
    throw InternalError("unhandled EffectMagnitude");
}

ShapiroWilkResult shapiro_wilk(std::vector<double> sample) {
    const std::size_t n = sample.size();
    if (n < 3 || n > 2000) {
        throw ConfigError("shapiro_wilk requires 3 <= n <= 2000");
    }
    std::sort(sample.begin(), sample.end());

    ShapiroWilkResult result;
    if (sample.front() == sample.back()) {  // sorted: zero variance
        result.degenerate = true;
        result.p = 0.0;
        return result;
    }
    const double mean = sample_mean(sample);
    double ssq = 0.0;
    for (const double x : sample) ssq += (x - mean) * (x - mean);

    // Royston's AS R94 coefficients
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) /
                               (static_cast<double>(n) + 0.25));
    }
    double m_ssq = 0.0;
    for (const double v : m) m_ssq += v * v;
    const double rsn = 1.0 / std::sqrt(static_cast<double>(n));

    std::vector<double> a(n);
    const double c_n = m[n - 1] / std::sqrt(m_ssq);
    if (n <= 5) {
        const double an =
            c_n + rsn * (-2.706056 * std::pow(rsn, 4.0) + 4.434685 * std::pow(rsn, 3.0) -
                         2.071190 * rsn * rsn - 0.147981 * rsn + 0.221157);
        const double phi = (m_ssq - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * an * an);
        a[n - 1] = an;
        a[0] = -an;
        for (std::size_t i = 1; i + 1 < n; ++i) a[i] = m[i] / std::sqrt(phi);
    } else {
        const double c_n1 = m[n - 2] / std::sqrt(m_ssq);
        const double an =
            c_n + rsn * (-2.706056 * std::pow(rsn, 4.0) + 4.434685 * std::pow(rsn, 3.0) -
                         2.071190 * rsn * rsn - 0.147981 * rsn + 0.221157);
        const double an1 =
            c_n1 + rsn * (-3.582633 * std::pow(rsn, 4.0) + 5.682633 * std::pow(rsn, 3.0) -
                          1.752461 * rsn * rsn - 0.293762 * rsn + 0.042981);
        const double phi =
            (m_ssq - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
            (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
        a[n - 1] = an;
        a[n - 2] = an1;
        a[0] = -an;
        a[1] = -an1;
        for (std::size_t i = 2; i + 2 < n; ++i) a[i] = m[i] / std::sqrt(phi);
    }

    double numerator = 0.0;
    for (std::size_t i = 0; i < n; ++i) numerator += a[i] * sample[i];
    result.w = std::clamp(numerator * numerator / ssq, 0.0, 1.0);

    // p-value transform
    const double nn = static_cast<double>(n);
    if (n == 3) {
        constexpr double pi6 = 1.90985931710274;   // 6/pi
        constexpr double stqr = 1.04719755119660;  // asin(sqrt(3/4))
        result.p = std::clamp(pi6 * (std::asin(std::sqrt(result.w)) - stqr), 0.0, 1.0);
        return result;
    }
    double mu, sigma, z;
    if (n <= 11) {
        const double gamma = -2.273 + 0.459 * nn;
        const double w1 = -std::log(gamma - std::log1p(-result.w));
        mu = 0.5440 - 0.39978 * nn + 0.025054 * nn * nn - 0.0006714 * nn * nn * nn;
        sigma = std::exp(1.3822 - 0.77857 * nn + 0.062767 * nn * nn -
                         0.0020322 * nn * nn * nn);
        z = (w1 - mu) / sigma;
    } else {
        const double ln_n = std::log(nn);
        const double w1 = std::log1p(-result.w);
        mu = -1.5861 - 0.31082 * ln_n - 0.083751 * ln_n * ln_n +
             0.0038915 * ln_n * ln_n * ln_n;
        sigma = std::exp(-0.4803 - 0.082676 * ln_n + 0.0030302 * ln_n * ln_n);
        z = (w1 - mu) / sigma;
    }
    result.p = 1.0 - normal_cdf(z);
    return result;
}

double one_sample_t(const std::vector<double>& sample, double mu0) {
    const std::size_t n = sample.size();
    if (n < 2) throw ConfigError("one_sample_t requires n >= 2");
    const double mean = sample_mean(sample);
    const double sd = sample_stdev(sample);
    if (sd == 0.0) return mean != mu0 ? 0.0 : 1.0;
    const double t = (mean - mu0) / (sd / std::sqrt(static_cast<double>(n)));
    return student_t_two_sided(t, static_cast<double>(n - 1));
}

std::vector<double> holm_bonferroni(const std::vector<double>& pvals) {
    const std::size_t m = pvals.size();
    for (const double p : pvals) {
        if (p < 0.0 || p > 1.0) throw ConfigError("p-value outside [0,1]");
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return pvals[i] < pvals[j]; });
    std::vector<double> adjusted(m);
    double running = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double scaled =
            std::min(1.0, static_cast<double>(m - i) * pvals[order[i]]);
        running = std::max(running, scaled);
        adjusted[order[i]] = running;
    }
    return adjusted;
}

double effect_size_vs_point(const std::vector<double>& sample, double value) {
    if (sample.size() < 2) throw ConfigError("effect_size_vs_point requires n >= 2");
    const double mean = sample_mean(sample);
    const double sd = sample_stdev(sample);
    if (sd == 0.0) {
        return mean == value ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return (mean - value) / sd;
}

double sample_mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_stdev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = sample_mean(v);
    double s = 0.0;
    for (const double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace tlr
