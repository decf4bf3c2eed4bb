#pragma once

#include <string>
#include <vector>

namespace tlr {

/// Standard normal CDF and its inverse (Acklam's approximation, refined).
double normal_cdf(double z);
double normal_quantile(double p);

/// Regularized incomplete beta function I_x(a, b), continued-fraction form.
double incomplete_beta(double a, double b, double x);

/// Two-sided p from a Student-t statistic with `dof` degrees of freedom.
double student_t_two_sided(double t, double dof);

struct MannWhitneyResult {
    double u = 0.0;  // U statistic of the first sample
    double p = 1.0;  // two-sided
    bool exact = false;
};

/// Rank-sum test with midrank ties. Exact enumeration when both samples have
/// at most 8 observations, normal approximation with tie correction otherwise.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b);

/// One-sample Wilcoxon signed-rank test against a point value; exact
/// enumeration up to n = 20 after zero removal, else normal approximation.
double wilcoxon_signed_rank(const std::vector<double>& sample, double mu0);

/// Cliff's delta in [-1, 1].
double cliffs_delta(const std::vector<double>& a, const std::vector<double>& b);

enum class EffectMagnitude { negligible, small, medium, large };
EffectMagnitude cliffs_magnitude(double delta);
std::string effect_magnitude_name(EffectMagnitude m);

struct ShapiroWilkResult {
    double w = 0.0;
    double p = 0.0;
    bool degenerate = false;  // zero variance
};

/// Shapiro-Wilk normality test (Royston's coefficient approximation),
/// 3 <= n <= 2000.
ShapiroWilkResult shapiro_wilk(std::vector<double> sample);

/// Two-sided one-sample t test. Zero-variance samples: p = 0 when the mean
/// differs from mu0, else 1.
double one_sample_t(const std::vector<double>& sample, double mu0);

/// Holm-Bonferroni step-down adjustment, returned in input order.
std::vector<double> holm_bonferroni(const std::vector<double>& pvals);

/// (mean - value) / sd; +inf sentinel when sd = 0 and the mean differs.
double effect_size_vs_point(const std::vector<double>& sample, double value);

double sample_mean(const std::vector<double>& v);
double sample_stdev(const std::vector<double>& v);  // n-1 denominator

}  // namespace tlr
