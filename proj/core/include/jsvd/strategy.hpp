#pragma once
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace jsvd {

enum class StrategyKind {
  rr,  // round-robin tournament (circle method), any even n
  me,  // recursive butterfly over xor partners, n a power of two
};

StrategyKind parse_strategy(const std::string& name);
const char* strategy_name(StrategyKind k);

// pairs[k * (n/2) + l] = (p, q) with p < q: step k, slot l.
struct StrategyTable {
  std::size_t n = 0;
  std::size_t K = 0;
  StrategyKind kind = StrategyKind::rr;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;

  std::pair<std::uint32_t, std::uint32_t> at(std::size_t step, std::size_t slot) const {
    return pairs[step * (n / 2) + slot];
  }
};

// Throws std::invalid_argument for odd n, n < 2, or ME with n not a power of two.
StrategyTable build_strategy(std::size_t n, StrategyKind kind);

// Every step a perfect matching and every pair covered exactly once per sweep.
bool strategy_is_valid(const StrategyTable& t);

}  // namespace jsvd
