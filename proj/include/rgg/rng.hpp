#pragma once

#include <cmath>
#include <cstdint>

namespace rgg {

namespace detail {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

// Seeded xoshiro256++ stream. The state is derived from (master_seed, stream_id)
// by a splitmix64 chain, so shard s of a run is reproducible regardless of
// which worker executes it and distinct ids give independent streams.
class RngStream {
 public:
  RngStream(uint64_t master_seed, uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id) {
    uint64_t sm = master_seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
    for (auto& w : s_) w = detail::splitmix64(sm);
  }

  uint64_t master_seed() const { return master_seed_; }
  uint64_t stream_id() const { return stream_id_; }

  uint64_t next_u64() {
    const uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  // uniform on the open interval (0, 1)
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // standard normal, Box-Muller with one cached value
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  uint64_t master_seed_;
  uint64_t stream_id_;
  uint64_t s_[4];
  double spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace rgg
