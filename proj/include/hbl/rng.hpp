#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace hbl::rng {

// Philox 4x32-10 counter-based block cipher (Salmon et al., SC 2011).
// A block is addressed by a 128-bit counter and a 64-bit key; the k-th
// output of a stream is computable without generating its predecessors,
// which is what makes thread-count-independent path generation possible.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }
};

// Quantile function of the standard normal distribution (Wichura's
// algorithm AS 241, double-precision branch). Monotone in p.
double inverse_normal_cdf(double p) noexcept;

// One variate stream addressed by (seed, stream id, variate index).
// Variate k lives in lane (k & 1) of Philox block (k >> 1); the block
// counter encodes (block index, stream id) and the key encodes the seed.
class CounterStream {
  public:
    CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    // k-th uniform on (0,1), endpoints excluded.
    double uniform_at(std::uint64_t k) const noexcept {
        return to_unit(raw64_at(k));
    }

    double normal_at(std::uint64_t k) const noexcept {
        return inverse_normal_cdf(uniform_at(k));
    }

    double next_uniform() noexcept { return uniform_at(cursor_++); }
    double next_normal() noexcept { return normal_at(cursor_++); }

    void seek(std::uint64_t k) noexcept { cursor_ = k; }
    std::uint64_t cursor() const noexcept { return cursor_; }

    std::uint64_t stream_id() const noexcept { return stream_; }

    static double to_unit(std::uint64_t x) noexcept {
        return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t raw64_at(std::uint64_t k) const noexcept {
        const std::uint64_t b = k >> 1;
        if (b != cached_index_) {
            const auto out = Philox4x32::block(
                {static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                 static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                key_);
            cached_[0] = out[0] | (std::uint64_t{out[1]} << 32);
            cached_[1] = out[2] | (std::uint64_t{out[3]} << 32);
            cached_index_ = b;
        }
        return cached_[k & 1];
    }

  private:
    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t cursor_ = 0;
    mutable std::uint64_t cached_index_ = ~std::uint64_t{0};
    mutable std::array<std::uint64_t, 2> cached_{};
};

// Fills a[i] = normal variate 2(first_block+i), b[i] = the one after, of
// the given stream: one Philox block per index, both lanes used. Equivalent
// to CounterStream::normal_at but without per-call block recomputation.
void fill_normal_pairs(std::uint64_t seed, std::uint64_t stream,
                       std::span<double> a, std::span<double> b,
                       std::uint64_t first_block = 0);

// Fills out[i] = normal variate i of the stream (both lanes of each block).
void fill_normals(std::uint64_t seed, std::uint64_t stream, std::span<double> out);

// Decorrelates experiment seeds (splitmix64 of seed ^ tag), so sub-runs of
// one invocation do not consume the same variates.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

// Poisson sampler, valid for any mean >= 0: inversion for small means,
// transformed rejection (Hormann's PTRS) for large ones. Consumes a
// variable number of uniforms from the stream.
std::int64_t sample_poisson(CounterStream& s, double mean);

// Gamma(shape, 1) sampler, shape > 0: Marsaglia-Tsang squeeze method,
// with the power boost for shape < 1.
double sample_gamma(CounterStream& s, double shape);

} // namespace hbl::rng
