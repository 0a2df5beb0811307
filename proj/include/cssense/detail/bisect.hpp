#ifndef CSSENSE_DETAIL_BISECT_HPP
#define CSSENSE_DETAIL_BISECT_HPP

#include <cmath>
#include <limits>
#include <numeric>

namespace cssense::detail {

struct Bracket {
    double lo;
    double hi;
};

// Shrinks [lo, hi] around the boundary of a monotone predicate with
// pred(lo) == true and pred(hi) == false, down to a few ulps. Returns the
// final bracket so callers can choose which side to report.
template <typename Pred>
Bracket bisect(Pred pred, double lo, double hi) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int it = 0; it < 2000; ++it) {
        if (hi - lo <= 4.0 * eps * std::fabs(hi) || hi - lo <= std::numeric_limits<double>::min()) {
            break;
        }
        const double mid = std::midpoint(lo, hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (pred(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

} // namespace cssense::detail

#endif // CSSENSE_DETAIL_BISECT_HPP
