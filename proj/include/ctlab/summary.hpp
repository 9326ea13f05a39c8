#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace ctlab {

inline double kahan_sum(const std::vector<double>& xs) {
    double sum = 0.0, carry = 0.0;
    for (double x : xs) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0; // sample std / sqrt(count)
};

// Two-pass compensated mean and standard error; reduction order is the
// element order, so results are reproducible bit for bit.
inline MeanSe mean_and_se(const std::vector<double>& xs) {
    MeanSe out;
    std::size_t n = xs.size();
    if (n == 0) return out;
    out.mean = kahan_sum(xs) / (double)n;
    if (n < 2) return out;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = xs[i] - out.mean;
        sq[i] = d * d;
    }
    double var = kahan_sum(sq) / (double)(n - 1);
    out.se = std::sqrt(var / (double)n);
    return out;
}

inline double median_of(std::vector<double> xs) {
    std::size_t n = xs.size();
    if (n == 0) return 0.0;
    std::sort(xs.begin(), xs.end());
    if (n % 2 == 1) return xs[n / 2];
    return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

} // namespace ctlab
