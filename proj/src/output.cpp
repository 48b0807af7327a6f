#include "sddelab/output.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace sddelab {

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string event_comment(const Outcome& outcome)
{
    std::string line = "# event=" + outcome_label(outcome) + ",t=" + format_double(outcome_time(outcome));
    if (const auto* fault = std::get_if<IntegrationFault>(&outcome))
        line += ",reason=" + std::string(to_string(fault->reason));
    return line;
}

std::string trajectory_csv(const PathResult& path)
{
    std::string out = "t,x\n";
    out.reserve(out.size() + path.t.size() * 40);
    for (std::size_t i = 0; i < path.t.size(); ++i) {
        out += format_double(path.t[i]);
        out += ',';
        out += format_double(path.x[i]);
        out += '\n';
    }
    out += event_comment(path.outcome);
    out += '\n';
    return out;
}

} // namespace sddelab
