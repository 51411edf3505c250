#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace expstable {

// Streaming mean/variance accumulator; mergeable so sharded replica runs
// can be combined pairwise without changing the result.
struct RunningStat {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const RunningStat& other);
    double variance() const;       // sample variance (n-1)
    double std_error() const;      // of the mean
};

double normal_cdf(double z);
double two_sided_p_from_z(double z);

// Survival function of the Kolmogorov distribution, Q(lambda).
double kolmogorov_sf(double lambda);

// Asymptotic one-sample KS critical value at the given significance.
double ks_critical_value(std::size_t n, double alpha);

struct KsResult {
    double stat = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;  // zero for one-sample tests
};

// One-sample KS against a continuous CDF. Sorts a copy of the sample.
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

double chi2_sf(double stat, int df);

struct Chi2Result {
    double stat = 0.0;
    double p_value = 1.0;
    int df = 0;
};

// Homogeneity test of two samples of category counts. Rows are categories;
// rows with total expected count below 5 are pooled from the tail.
Chi2Result chi2_homogeneity(const std::vector<std::array<long long, 2>>& table);

// Goodness of fit of observed category counts against given probabilities.
Chi2Result chi2_goodness_of_fit(const std::vector<long long>& observed,
                                const std::vector<double>& probabilities);

}  // namespace expstable
