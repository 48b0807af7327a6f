#pragma once

// Observable consequences of writing I(t) = int_0^t sigma dW as B(T(t)) with
// T(t) = int_0^t sigma^2 ds: the realized quadratic variation of I tracks T,
// and increments of I standardized by increments of T look standard normal.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sddelab {

struct TimeChangeDiagnostics {
    std::vector<double> t;
    /// Running sum of squared increments of I.
    std::vector<double> qv;
    /// Trapezoidal int_0^t sigma^2 ds.
    std::vector<double> T;
    /// One-sample Kolmogorov-Smirnov statistic of dI / sqrt(dT) against N(0, 1).
    double ks_statistic = 0.0;
    /// 5% critical value for `increments` samples.
    double ks_critical = 0.0;
    std::size_t increments = 0;

    bool ks_accepts() const noexcept { return ks_statistic < ks_critical; }
};

/// `t` and `sigma` hold n+1 grid values, `dW` the n increments between them.
/// Throws std::domain_error if some sigma^2 <= 0 and std::invalid_argument
/// on mismatched lengths or a nonincreasing grid.
TimeChangeDiagnostics diagnose_time_change(std::span<const double> t, std::span<const double> sigma,
                                           std::span<const double> dW);

/// Uniform grid t_j = j * dt.
TimeChangeDiagnostics diagnose_time_change(std::span<const double> sigma,
                                           std::span<const double> dW, double dt);

double standard_normal_cdf(double z) noexcept;

/// sup |F_n - Phi| of the sample; the input need not be sorted.
double ks_statistic_normal(std::vector<double> sample);

/// Asymptotic critical value c(alpha) / (sqrt(n) + 0.12 + 0.11/sqrt(n)),
/// c(alpha) = sqrt(-ln(alpha/2) / 2).
double ks_critical_value(std::size_t n, double alpha = 0.05);

/// `t,qv,T` rows, then `# ks_statistic=...,ks_critical=...,n=...`.
std::string time_change_csv(const TimeChangeDiagnostics& diagnostics);

} // namespace sddelab
