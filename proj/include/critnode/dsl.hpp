#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace critnode::dsl {

enum class Metric { degree, coreness, betweenness, closeness, pagerank, eigenvector, clustering, khop };
enum class UnaryOp { neg, abs, sqrt, log1p, normalize, rank };
enum class AggOp { nsum, nmean, nmax };
enum class BinaryOp { add, sub, mul, div, min, max, pow };

inline constexpr int kMetricCount = 8;
inline constexpr int kUnaryCount = 6;
inline constexpr int kAggCount = 3;
inline constexpr int kBinaryCount = 7;

inline constexpr std::size_t kMaxSize = 200;
inline constexpr std::size_t kMaxDepth = 12;
inline constexpr int kMinKhop = 1;
inline constexpr int kMaxKhop = 4;
inline constexpr double kMaxExponent = 4.0;

std::string_view name(Metric m);
std::string_view name(UnaryOp op);
std::string_view name(AggOp op);
std::string_view name(BinaryOp op);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Const {
  double value;
};
struct MetricRef {
  Metric metric;
  int k = 0;  // hop radius, only for Metric::khop
};
struct Unary {
  UnaryOp op;
  NodePtr child;
};
struct NeighborAgg {
  AggOp op;
  NodePtr child;
};
struct Binary {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};

struct Node {
  std::variant<Const, MetricRef, Unary, NeighborAgg, Binary> data;
};

/// An immutable scoring expression. Copies share structure; every edit
/// produces a new tree.
class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  static Expr constant(double value);
  static Expr metric(Metric m, int k = 0);
  static Expr unary(UnaryOp op, const Expr& child);
  static Expr aggregate(AggOp op, const Expr& child);
  static Expr binary(BinaryOp op, const Expr& lhs, const Expr& rhs);

  const Node& root() const { return *root_; }
  const NodePtr& ptr() const { return root_; }
  bool empty() const { return root_ == nullptr; }

  std::size_t size() const;
  std::size_t depth() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  NodePtr root_;
};

bool structurally_equal(const Node& a, const Node& b);

enum class ErrorKind {
  syntax,
  unknown_identifier,
  arity_mismatch,
  size_bound,
  depth_bound,
  non_constant_exponent,
  exponent_range,
  khop_range,
};

std::string_view name(ErrorKind kind);

class DslError : public std::runtime_error {
 public:
  DslError(ErrorKind kind, std::size_t position, const std::string& message);
  ErrorKind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  ErrorKind kind_;
  std::size_t position_;
};

/// Parses the expression grammar
///
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := number | metric | func '(' args ')' | '(' expr ')' | '-' factor
///
/// A '-' directly in front of a numeric literal folds into a negative
/// constant; in front of anything else it becomes neg(...). The result
/// satisfies check_bounds(). Throws DslError.
Expr parse(std::string_view text);

/// Throws DslError if the tree violates the size, depth, khop-radius or
/// exponent rules.
void check_bounds(const Expr& e);

/// Deterministic, fully parenthesized text; parse(print_canonical(e)) == e.
std::string print_canonical(const Expr& e);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/// Child indices from the root down: 0 is the only or left child, 1 the
/// right child.
using Path = std::vector<std::uint8_t>;

/// Paths of every subtree, in pre-order.
std::vector<Path> subtree_paths(const Expr& e);
Expr subtree_at(const Expr& e, const Path& path);
/// Copy of e with the subtree at path swapped for replacement. Nodes off the
/// path are shared, not copied.
Expr replace_subtree(const Expr& e, const Path& path, const Expr& replacement);

/// Grow-method random tree, deterministic in the seed. max_depth counts
/// levels (1 = a single leaf) and is capped at kMaxDepth.
Expr random_expr(std::uint64_t seed, std::size_t max_depth);

}  // namespace critnode::dsl
