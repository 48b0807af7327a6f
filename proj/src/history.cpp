#include "sddelab/sdde.hpp"

#include <algorithm>
#include <stdexcept>

namespace sddelab {

HistoryBuffer::HistoryBuffer(const Segment& phi, double retain) : retain_(retain)
{
    const auto ts = phi.times();
    const auto vs = phi.values();
    for (std::size_t i = 0; i < ts.size(); ++i)
        knots_.push_back({ts[i], vs[i]});
}

void HistoryBuffer::push(double t, double x)
{
    if (!(t > knots_.back().t))
        throw std::invalid_argument("HistoryBuffer: times must increase");
    knots_.push_back({t, x});
    const double keep_from = t - retain_;
    while (knots_.size() >= 2 && knots_[1].t <= keep_from) {
        knots_.pop_front();
        if (cursor_ > 0)
            --cursor_;
    }
}

double HistoryBuffer::lookup(double s) const
{
    if (s < knots_.front().t || s > knots_.back().t)
        throw std::out_of_range("HistoryBuffer: lookup outside the stored window");
    if (cursor_ >= knots_.size() || knots_[cursor_].t > s) {
        auto it = std::upper_bound(knots_.begin(), knots_.end(), s,
                                   [](double v, const Knot& k) { return v < k.t; });
        cursor_ = static_cast<std::size_t>(it - knots_.begin()) - 1;
    }
    while (cursor_ + 1 < knots_.size() && knots_[cursor_ + 1].t <= s)
        ++cursor_;
    const Knot& lo = knots_[cursor_];
    if (lo.t == s || cursor_ + 1 == knots_.size())
        return lo.x;
    const Knot& hi = knots_[cursor_ + 1];
    return lerp_knots(lo.t, lo.x, hi.t, hi.x, s);
}

} // namespace sddelab
