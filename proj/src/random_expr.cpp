#include <algorithm>
#include <array>

#include "critnode/dsl.hpp"
#include "critnode/rng.hpp"

namespace critnode::dsl {

namespace {

constexpr double kLeafProbability = 0.3;
constexpr double kConstLeafProbability = 0.2;
constexpr std::array<double, 6> kExponents = {-1.0, 0.5, 2.0, 3.0, -0.5, 1.5};

Expr random_leaf(Rng& rng) {
  if (rng.bernoulli(kConstLeafProbability)) {
    // Two-decimal constants in [-2, 2] keep generated text readable.
    const double v = static_cast<double>(static_cast<int>(rng.uniform_index(401)) - 200) / 100.0;
    return Expr::constant(v);
  }
  const auto m = static_cast<Metric>(rng.uniform_index(kMetricCount));
  const int k = m == Metric::khop ? 1 + static_cast<int>(rng.uniform_index(kMaxKhop)) : 0;
  return Expr::metric(m, k);
}

Expr grow(Rng& rng, std::size_t depth_left) {
  if (depth_left <= 1 || rng.bernoulli(kLeafProbability)) return random_leaf(rng);
  const double r = rng.uniform01();
  if (r < 0.3) {
    return Expr::unary(static_cast<UnaryOp>(rng.uniform_index(kUnaryCount)),
                       grow(rng, depth_left - 1));
  }
  if (r < 0.45) {
    return Expr::aggregate(static_cast<AggOp>(rng.uniform_index(kAggCount)),
                           grow(rng, depth_left - 1));
  }
  const auto op = static_cast<BinaryOp>(rng.uniform_index(kBinaryCount));
  Expr lhs = grow(rng, depth_left - 1);
  if (op == BinaryOp::pow) {
    return Expr::binary(op, lhs, Expr::constant(kExponents[rng.uniform_index(kExponents.size())]));
  }
  return Expr::binary(op, lhs, grow(rng, depth_left - 1));
}

}  // namespace

Expr random_expr(std::uint64_t seed, std::size_t max_depth) {
  max_depth = std::clamp<std::size_t>(max_depth, 1, kMaxDepth);
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, {attempt}));
    Expr e = grow(rng, max_depth);
    if (e.size() <= kMaxSize) return e;
  }
}

}  // namespace critnode::dsl
