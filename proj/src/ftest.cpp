#include "cgann/ftest.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace cgann {

FTestResult f_test_5x2(std::span<const double> err_a, std::span<const double> err_b) {
    if (err_a.size() != 10 || err_b.size() != 10)
        throw std::invalid_argument("f_test_5x2: expected 10 values per method, got " +
                                    std::to_string(err_a.size()) + " and " +
                                    std::to_string(err_b.size()));
    FTestResult res;
    double numerator = 0.0;
    double variance_sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double p1 = err_a[2 * i] - err_b[2 * i];
        const double p2 = err_a[2 * i + 1] - err_b[2 * i + 1];
        res.differences[2 * i] = p1;
        res.differences[2 * i + 1] = p2;
        const double mean = (p1 + p2) / 2.0;
        const double s2 = (p1 - mean) * (p1 - mean) + (p2 - mean) * (p2 - mean);
        res.replication_variances[i] = s2;
        numerator += p1 * p1 + p2 * p2;
        variance_sum += s2;
    }
    const double denominator = 2.0 * variance_sum;
    if (denominator == 0.0) {
        res.degenerate = true;
        res.reject = numerator > 0.0;
        res.statistic = res.reject ? std::numeric_limits<double>::infinity() : 0.0;
        return res;
    }
    res.statistic = numerator / denominator;
    res.reject = res.statistic > kFTestRejectThreshold;
    return res;
}

}  // namespace cgann
