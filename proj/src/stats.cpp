#include "expstable/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace expstable {

void RunningStat::add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
}

void RunningStat::merge(const RunningStat& other) {
    if (other.n == 0) return;
    if (n == 0) {
        *this = other;
        return;
    }
    const double delta = other.mean - mean;
    const double total = static_cast<double>(n + other.n);
    m2 += other.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(other.n) / total;
    mean += delta * static_cast<double>(other.n) / total;
    n += other.n;
}

double RunningStat::variance() const {
    return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
}

double RunningStat::std_error() const {
    return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double two_sided_p_from_z(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double kolmogorov_sf(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.18) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 128; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical_value(std::size_t n, double alpha) {
    return std::sqrt(0.5 * std::log(2.0 / alpha)) / std::sqrt(static_cast<double>(n));
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) return {};
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double F = cdf(sample[i]);
        stat = std::max(stat, std::max(static_cast<double>(i + 1) / n - F,
                                       F - static_cast<double>(i) / n));
    }
    const double sqn = std::sqrt(n);
    // Stephens' small-sample correction for the asymptotic p-value.
    const double p = kolmogorov_sf((sqn + 0.12 + 0.11 / sqn) * stat);
    return {stat, p, sample.size(), 0};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) return {};
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double stat = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        stat = std::max(stat, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double p = kolmogorov_sf((ne + 0.12 + 0.11 / ne) * stat);
    return {stat, p, a.size(), b.size()};
}

namespace {

// Regularized lower incomplete gamma via series (x < a+1).
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int k = 0; k < 1000; ++k) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma via Lentz continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int k = 1; k <= 1000; ++k) {
        const double an = -static_cast<double>(k) * (static_cast<double>(k) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double stat, int df) {
    if (df <= 0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * stat);
}

Chi2Result chi2_homogeneity(const std::vector<std::array<long long, 2>>& table) {
    // Pool sparse categories from the tail so every retained row has a
    // combined count of at least 5.
    std::vector<std::array<long long, 2>> rows;
    std::array<long long, 2> pooled{0, 0};
    long long pooled_total = 0;
    for (auto it = table.rbegin(); it != table.rend(); ++it) {
        if (pooled_total < 5) {
            pooled[0] += (*it)[0];
            pooled[1] += (*it)[1];
            pooled_total = pooled[0] + pooled[1];
        } else {
            rows.push_back(*it);
        }
    }
    if (pooled_total > 0) rows.push_back(pooled);
    std::reverse(rows.begin(), rows.end());

    // Merge any remaining sparse rows forward.
    std::vector<std::array<long long, 2>> kept;
    for (const auto& row : rows) {
        if (!kept.empty() && kept.back()[0] + kept.back()[1] < 5) {
            kept.back()[0] += row[0];
            kept.back()[1] += row[1];
        } else {
            kept.push_back(row);
        }
    }
    if (kept.size() >= 2 && kept.back()[0] + kept.back()[1] < 5) {
        kept[kept.size() - 2][0] += kept.back()[0];
        kept[kept.size() - 2][1] += kept.back()[1];
        kept.pop_back();
    }
    if (kept.size() < 2) return {0.0, 1.0, 0};

    double col_tot[2] = {0.0, 0.0};
    double grand = 0.0;
    for (const auto& row : kept) {
        col_tot[0] += static_cast<double>(row[0]);
        col_tot[1] += static_cast<double>(row[1]);
    }
    grand = col_tot[0] + col_tot[1];
    if (grand <= 0.0) return {0.0, 1.0, 0};

    double stat = 0.0;
    for (const auto& row : kept) {
        const double row_tot = static_cast<double>(row[0] + row[1]);
        for (int c = 0; c < 2; ++c) {
            const double expected = row_tot * col_tot[c] / grand;
            if (expected > 0.0) {
                const double diff = static_cast<double>(row[c]) - expected;
                stat += diff * diff / expected;
            }
        }
    }
    const int df = static_cast<int>(kept.size()) - 1;
    return {stat, chi2_sf(stat, df), df};
}

Chi2Result chi2_goodness_of_fit(const std::vector<long long>& observed,
                                const std::vector<double>& probabilities) {
    if (observed.size() != probabilities.size()) {
        throw std::invalid_argument("chi2_goodness_of_fit size mismatch");
    }
    long long n = 0;
    for (long long o : observed) n += o;
    if (n == 0) return {0.0, 1.0, 0};
    double stat = 0.0;
    int df = -1;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected = probabilities[i] * static_cast<double>(n);
        if (expected <= 0.0) continue;
        const double diff = static_cast<double>(observed[i]) - expected;
        stat += diff * diff / expected;
        ++df;
    }
    if (df <= 0) return {stat, 1.0, 0};
    return {stat, chi2_sf(stat, df), df};
}

}  // namespace expstable
