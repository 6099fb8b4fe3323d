#include "wavecs/rng.hpp"

#include <cmath>
#include <numbers>

namespace wavecs {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix_seed({seed, stream})) {}

CounterRng::result_type CounterRng::operator()() {
  const std::uint64_t c = counter_++;
  return splitmix64(key_ ^ splitmix64(c));
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::uniform_index(std::uint64_t n) {
  if (n <= 1) return 0;
  // rejection on the top of the range keeps every residue equally likely
  const std::uint64_t limit = max() - (max() % n + 1) % n;
  for (;;) {
    const std::uint64_t v = (*this)();
    if (v <= limit) return v % n;
  }
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace wavecs
