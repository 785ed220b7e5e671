#include "jsvd/strategy.hpp"

#include <algorithm>
#include <stdexcept>

namespace jsvd {

StrategyKind parse_strategy(const std::string& name) {
  if (name == "rr") return StrategyKind::rr;
  if (name == "me") return StrategyKind::me;
  throw std::invalid_argument("unknown strategy '" + name + "' (expected rr or me)");
}

const char* strategy_name(StrategyKind k) { return k == StrategyKind::rr ? "rr" : "me"; }

namespace {

using Pair = std::pair<std::uint32_t, std::uint32_t>;

Pair ordered(std::size_t a, std::size_t b) {
  return a < b ? Pair(std::uint32_t(a), std::uint32_t(b)) : Pair(std::uint32_t(b), std::uint32_t(a));
}

// Circle method in modulus form: round r pairs i + j = r (mod n-1), and the
// one i with 2i = r (mod n-1) plays n-1. Rounds in order r = 0, 1, ...; with
// the norm-ordering swaps this order sorts the columns within a few sweeps,
// where visiting the rounds as 2r (one seat per round) needs about twice the
// sweeps.
void round_robin(StrategyTable& t) {
  const std::size_t n = t.n, h = n - 1;
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t lone = (r % 2 == 0) ? r / 2 : (r + h) / 2;
    t.pairs.push_back(ordered(lone, n - 1));
    for (std::size_t i = 0; i < h; ++i) {
      const std::size_t j = (r + h - i) % h;
      if (i < j) t.pairs.push_back(ordered(i, j));
    }
  }
}

// Xor distances: T(2) = [1], T(n) = T(n/2) followed by n/2 ^ gray(j).
std::vector<std::size_t> xor_sequence(std::size_t n) {
  if (n == 2) return {1};
  std::vector<std::size_t> t = xor_sequence(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) t.push_back((n / 2) ^ (j ^ (j >> 1)));
  return t;
}

void butterfly(StrategyTable& t) {
  for (std::size_t d : xor_sequence(t.n))
    for (std::size_t i = 0; i < t.n; ++i)
      if (i < (i ^ d)) t.pairs.push_back(ordered(i, i ^ d));
}

}  // namespace

StrategyTable build_strategy(std::size_t n, StrategyKind kind) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("strategy order must be even and at least 2");
  if (kind == StrategyKind::me && (n & (n - 1)) != 0)
    throw std::invalid_argument("the ME strategy needs n to be a power of two");
  StrategyTable t;
  t.n = n;
  t.K = n - 1;
  t.kind = kind;
  t.pairs.reserve(t.K * n / 2);
  if (kind == StrategyKind::rr)
    round_robin(t);
  else
    butterfly(t);
  return t;
}

bool strategy_is_valid(const StrategyTable& t) {
  const std::size_t n = t.n, h = n / 2;
  if (t.pairs.size() != t.K * h) return false;
  std::vector<std::uint8_t> seen(n * n, 0);
  std::vector<std::size_t> used(n, ~std::size_t(0));
  for (std::size_t k = 0; k < t.K; ++k) {
    for (std::size_t l = 0; l < h; ++l) {
      const auto [p, q] = t.at(k, l);
      if (!(p < q) || q >= n) return false;
      if (used[p] == k || used[q] == k) return false;
      used[p] = used[q] = k;
      if (seen[p * n + q]++) return false;
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q)
      if (seen[p * n + q] != 1) return false;
  return true;
}

}  // namespace jsvd
