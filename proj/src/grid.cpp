#include "hbl/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace hbl {

TimeGrid::TimeGrid(double T, std::int64_t N) : T_(T), N_(N), dt_(T / static_cast<double>(N)) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("grid horizon must be > 0");
    if (N < 1) throw std::invalid_argument("grid step count must be >= 1");
}

std::int64_t TimeGrid::left_index(double t) const noexcept {
    if (t <= 0.0) return 0;
    if (t >= T_) return N_;
    auto k = static_cast<std::int64_t>(t / dt_);
    if (k > N_) k = N_;
    // FP division can land one knot off; fix up against the exact knots.
    while (k > 0 && knot(k) > t) --k;
    while (k < N_ && knot(k + 1) <= t) ++k;
    return k;
}

} // namespace hbl
