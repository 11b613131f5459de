#pragma once

#include <array>
#include <span>

namespace cgann {

// Rejection threshold of the combined 5x2cv f test at significance 0.05.
inline constexpr double kFTestRejectThreshold = 4.74;

struct FTestResult {
    std::array<double, 10> differences{};          // p_ij = errA_ij - errB_ij
    std::array<double, 5> replication_variances{};  // s_i^2
    double statistic = 0.0;
    bool degenerate = false;  // zero denominator
    bool reject = false;
};

// Combined 5x2cv f test over two 10-entry error vectors ordered as
// (replication 1 fold 1, replication 1 fold 2, ..., replication 5 fold 2):
//   F = (sum_ij p_ij^2) / (2 sum_i s_i^2),  reject iff F > 4.74.
// A zero denominator sets the degenerate flag; the test then rejects iff
// the numerator is nonzero.
FTestResult f_test_5x2(std::span<const double> err_a, std::span<const double> err_b);

}  // namespace cgann
