#include "sddelab/timechange.hpp"

#include "sddelab/kernels.hpp"
#include "sddelab/output.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sddelab {

TimeChangeDiagnostics diagnose_time_change(std::span<const double> t, std::span<const double> sigma,
                                           std::span<const double> dW)
{
    const std::size_t n = dW.size();
    if (t.size() != n + 1 || sigma.size() != n + 1)
        throw std::invalid_argument("diagnose_time_change: need n+1 times and sigmas for n increments");
    for (std::size_t j = 0; j <= n; ++j) {
        if (!(sigma[j] * sigma[j] > 0.0))
            throw std::domain_error("diagnose_time_change: sigma^2 must be positive along the path");
        if (j > 0 && !(t[j] > t[j - 1]))
            throw std::invalid_argument("diagnose_time_change: time grid must be increasing");
    }

    const auto& k = kernels::active();
    std::vector<double> dI(n), dI2(n), dT(n), dt(n), z(n);
    k.multiply(sigma.data(), dW.data(), dI.data(), n);
    k.square(dI.data(), dI2.data(), n);
    for (std::size_t j = 0; j < n; ++j)
        dt[j] = t[j + 1] - t[j];
    k.trapezoid_pieces(sigma.data(), 0.5, dT.data(), n);
    k.multiply(dT.data(), dt.data(), dT.data(), n);
    k.standardize(dI.data(), dT.data(), z.data(), n);

    TimeChangeDiagnostics d;
    d.t.assign(t.begin(), t.end());
    d.qv.resize(n + 1);
    d.T.resize(n + 1);
    d.qv[0] = 0.0;
    d.T[0] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        d.qv[j + 1] = d.qv[j] + dI2[j];
        d.T[j + 1] = d.T[j] + dT[j];
    }
    d.increments = n;
    if (n > 0) {
        d.ks_statistic = ks_statistic_normal(std::move(z));
        d.ks_critical = ks_critical_value(n);
    }
    return d;
}

TimeChangeDiagnostics diagnose_time_change(std::span<const double> sigma,
                                           std::span<const double> dW, double dt)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("diagnose_time_change: dt must be positive");
    std::vector<double> t(dW.size() + 1);
    for (std::size_t j = 0; j < t.size(); ++j)
        t[j] = static_cast<double>(j) * dt;
    return diagnose_time_change(t, sigma, dW);
}

double standard_normal_cdf(double z) noexcept
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double ks_statistic_normal(std::vector<double> sample)
{
    if (sample.empty())
        throw std::invalid_argument("ks_statistic_normal: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double F = standard_normal_cdf(sample[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
    }
    return d;
}

double ks_critical_value(std::size_t n, double alpha)
{
    if (n == 0 || !(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("ks_critical_value: need n >= 1 and alpha in (0, 1)");
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double rn = std::sqrt(static_cast<double>(n));
    return c / (rn + 0.12 + 0.11 / rn);
}

std::string time_change_csv(const TimeChangeDiagnostics& d)
{
    std::string out = "t,qv,T\n";
    for (std::size_t j = 0; j < d.t.size(); ++j)
        out += format_double(d.t[j]) + ',' + format_double(d.qv[j]) + ',' + format_double(d.T[j]) + '\n';
    out += "# ks_statistic=" + format_double(d.ks_statistic) +
           ",ks_critical=" + format_double(d.ks_critical) + ",n=" + std::to_string(d.increments) + '\n';
    return out;
}

} // namespace sddelab
