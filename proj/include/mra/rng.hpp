#ifndef MRA_RNG_HPP
#define MRA_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace mra {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based generator. Every value is a pure function of
/// (seed, stream, index), so parallel work can derive independent streams
/// and any run is reproducible from the root seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(splitmix64(seed) ^ (0xD2B74407B1CE6E93ULL * (stream + 1)))) {}

  /// Independent stream keyed by (this stream, substream).
  Rng derive(std::uint64_t substream) const {
    Rng r(0);
    r.key_ = splitmix64(key_ ^ (0xA0761D6478BD642FULL * (substream + 1)));
    r.counter_ = 0;
    r.have_spare_ = false;
    return r;
  }

  std::uint64_t next_u64() { return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Standard complex normal CN(0,1): variance 1/2 per real part.
  std::complex<double> gaussian_complex() {
    return {gaussian() * M_SQRT1_2, gaussian() * M_SQRT1_2};
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mra

#endif
