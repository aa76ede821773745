#ifndef DRE_RNG_HPP
#define DRE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace dre {

class Rng;

/// Identifies one reproducible random stream. Streams with different ids are
/// seeded through std::seed_seq from (base_seed, stream_id), so replica k gets
/// the same draws regardless of which worker runs it.
struct RngStream {
  std::uint64_t base_seed = 0;
  std::uint64_t stream_id = 0;

  /// Deterministic sub-stream, e.g. one per replica or per path component.
  RngStream child(std::uint64_t k) const;

  Rng engine() const;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Engine plus the handful of variates the samplers need. All conversions are
/// done here (not through std:: distributions) so draws are bit-identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(const RngStream& s);

  std::uint64_t bits() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

  /// Exponential with the given mean, by inverse CDF.
  double exponential(double mean) { return -mean * std::log(uniform()); }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  std::mt19937_64& raw() { return engine_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

inline Rng RngStream::engine() const { return Rng(*this); }

}  // namespace dre

#endif  // DRE_RNG_HPP
