#include "dre/rng.hpp"

namespace dre {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream RngStream::child(std::uint64_t k) const {
  return RngStream{base_seed, splitmix64(stream_id ^ splitmix64(k + 1))};
}

Rng::Rng(const RngStream& s) {
  std::seed_seq seq{static_cast<std::uint32_t>(s.base_seed),
                    static_cast<std::uint32_t>(s.base_seed >> 32),
                    static_cast<std::uint32_t>(s.stream_id),
                    static_cast<std::uint32_t>(s.stream_id >> 32)};
  engine_.seed(seq);
}

}  // namespace dre
