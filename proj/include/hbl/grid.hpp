#pragma once

#include <cstdint>

namespace hbl {

// Equidistant grid t_k = k T/N, k = 0..N. Knots are computed as T*(k/N) so
// that knot(0) == 0 and knot(N) == T exactly.
class TimeGrid {
  public:
    // Throws std::invalid_argument on T <= 0 or N < 1.
    TimeGrid(double T, std::int64_t N);

    double horizon() const noexcept { return T_; }
    std::int64_t steps() const noexcept { return N_; }
    double dt() const noexcept { return dt_; }

    double knot(std::int64_t k) const noexcept {
        return T_ * (static_cast<double>(k) / static_cast<double>(N_));
    }

    // n(t) = max{k : t_k <= t}, clamped to [0, N].
    std::int64_t left_index(double t) const noexcept;

    // eta(t) = t_{n(t)}.
    double eta(double t) const noexcept { return knot(left_index(t)); }

    bool operator==(const TimeGrid&) const noexcept = default;

  private:
    double T_;
    std::int64_t N_;
    double dt_;
};

inline TimeGrid make_grid(double T, std::int64_t N) { return TimeGrid(T, N); }

} // namespace hbl
