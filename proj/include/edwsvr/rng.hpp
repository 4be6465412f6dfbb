#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace edwsvr {

// Seeded draws built directly on the mt19937_64 output stream, so the exact
// sequence is pinned by the seed alone (the std distribution adapters are
// implementation-defined and would not reproduce across standard libraries).
//
//   index(n):   next() % n
//   unit():     (next() >> 11) * 2^-53, uniform on [0,1)
//   gaussian(): Box-Muller on two unit() draws
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - unit();  // (0,1], keeps log finite
    double u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace edwsvr
