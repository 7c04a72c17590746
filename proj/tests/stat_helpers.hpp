// Test-only statistical oracles: KS tests, quadrature, brute-force
// combinatorics. Kept independent of the implementation paths they check.
#ifndef QSFF_TESTS_STAT_HELPERS_HPP
#define QSFF_TESTS_STAT_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

// Kolmogorov-Smirnov statistic of samples against a CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Asymptotic Kolmogorov distribution p-value.
inline double ks_pvalue(double d, size_t n) {
    const double x = (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(static_cast<double>(n))) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * x * x);
    return std::clamp(p, 0.0, 1.0);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Composite 16-node Gauss-Legendre quadrature on [a, b] with `segments`
// equal subdivisions.
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                             int segments) {
    static const double xs[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                 0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double ws[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                 0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    double total = 0.0;
    const double h = (b - a) / segments;
    for (int s = 0; s < segments; ++s) {
        const double mid = a + (s + 0.5) * h;
        const double half = 0.5 * h;
        double acc = 0.0;
        for (int i = 0; i < 8; ++i)
            acc += ws[i] * (f(mid + half * xs[i]) + f(mid - half * xs[i]));
        total += acc * half;
    }
    return total;
}

// All set partitions of {1..n} via restricted-growth strings (brute-force
// oracle for the non-crossing enumeration).
inline std::vector<std::vector<std::vector<int>>> all_set_partitions(int n) {
    std::vector<std::vector<std::vector<int>>> out;
    std::vector<int> rgs(static_cast<size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int i, int max_label) {
        if (i == n) {
            std::vector<std::vector<int>> blocks(static_cast<size_t>(max_label) + 1);
            for (int j = 0; j < n; ++j) blocks[static_cast<size_t>(rgs[static_cast<size_t>(j)])].push_back(j + 1);
            out.push_back(std::move(blocks));
            return;
        }
        for (int l = 0; l <= max_label + 1; ++l) {
            rgs[static_cast<size_t>(i)] = l;
            rec(i + 1, std::max(max_label, l));
        }
    };
    rec(0, -1);
    return out;
}

}  // namespace testutil

#endif
