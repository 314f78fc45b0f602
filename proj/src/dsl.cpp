#include "critnode/dsl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

namespace critnode::dsl {

namespace {

constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "degree", "coreness", "betweenness", "closeness", "pagerank", "eigenvector", "clustering", "khop"};
constexpr std::array<std::string_view, kUnaryCount> kUnaryNames = {"neg", "abs", "sqrt",
                                                                   "log1p", "normalize", "rank"};
constexpr std::array<std::string_view, kAggCount> kAggNames = {"nsum", "nmean", "nmax"};
constexpr std::array<std::string_view, kBinaryCount> kBinaryNames = {"add", "sub", "mul", "div",
                                                                     "min", "max", "pow"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view id) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == id) return static_cast<E>(i);
  }
  return std::nullopt;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

}  // namespace

std::string_view name(Metric m) { return kMetricNames[static_cast<int>(m)]; }
std::string_view name(UnaryOp op) { return kUnaryNames[static_cast<int>(op)]; }
std::string_view name(AggOp op) { return kAggNames[static_cast<int>(op)]; }
std::string_view name(BinaryOp op) { return kBinaryNames[static_cast<int>(op)]; }

std::string_view name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::unknown_identifier: return "unknown_identifier";
    case ErrorKind::arity_mismatch: return "arity_mismatch";
    case ErrorKind::size_bound: return "size_bound";
    case ErrorKind::depth_bound: return "depth_bound";
    case ErrorKind::non_constant_exponent: return "non_constant_exponent";
    case ErrorKind::exponent_range: return "exponent_range";
    case ErrorKind::khop_range: return "khop_range";
  }
  return "unknown";
}

DslError::DslError(ErrorKind kind, std::size_t position, const std::string& message)
    : std::runtime_error(std::string(name(kind)) + " at " + std::to_string(position) + ": " +
                         message),
      kind_(kind),
      position_(position) {}

Expr Expr::constant(double value) { return Expr(make({Const{value}})); }
Expr Expr::metric(Metric m, int k) { return Expr(make({MetricRef{m, m == Metric::khop ? k : 0}})); }
Expr Expr::unary(UnaryOp op, const Expr& child) { return Expr(make({Unary{op, child.ptr()}})); }
Expr Expr::aggregate(AggOp op, const Expr& child) {
  return Expr(make({NeighborAgg{op, child.ptr()}}));
}
Expr Expr::binary(BinaryOp op, const Expr& lhs, const Expr& rhs) {
  return Expr(make({Binary{op, lhs.ptr(), rhs.ptr()}}));
}

namespace {

std::size_t node_size(const Node& n) {
  return std::visit(overloaded{
                        [](const Const&) -> std::size_t { return 1; },
                        [](const MetricRef&) -> std::size_t { return 1; },
                        [](const Unary& u) { return 1 + node_size(*u.child); },
                        [](const NeighborAgg& a) { return 1 + node_size(*a.child); },
                        [](const Binary& b) { return 1 + node_size(*b.lhs) + node_size(*b.rhs); },
                    },
                    n.data);
}

std::size_t node_depth(const Node& n) {
  return std::visit(
      overloaded{
          [](const Const&) -> std::size_t { return 1; },
          [](const MetricRef&) -> std::size_t { return 1; },
          [](const Unary& u) { return 1 + node_depth(*u.child); },
          [](const NeighborAgg& a) { return 1 + node_depth(*a.child); },
          [](const Binary& b) { return 1 + std::max(node_depth(*b.lhs), node_depth(*b.rhs)); },
      },
      n.data);
}

}  // namespace

std::size_t Expr::size() const { return root_ ? node_size(*root_) : 0; }
std::size_t Expr::depth() const { return root_ ? node_depth(*root_) : 0; }

bool structurally_equal(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.data.index() != b.data.index()) return false;
  return std::visit(
      overloaded{
          [&](const Const& x) { return x.value == std::get<Const>(b.data).value; },
          [&](const MetricRef& x) {
            const auto& y = std::get<MetricRef>(b.data);
            return x.metric == y.metric && x.k == y.k;
          },
          [&](const Unary& x) {
            const auto& y = std::get<Unary>(b.data);
            return x.op == y.op && structurally_equal(*x.child, *y.child);
          },
          [&](const NeighborAgg& x) {
            const auto& y = std::get<NeighborAgg>(b.data);
            return x.op == y.op && structurally_equal(*x.child, *y.child);
          },
          [&](const Binary& x) {
            const auto& y = std::get<Binary>(b.data);
            return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                   structurally_equal(*x.rhs, *y.rhs);
          },
      },
      a.data);
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  return structurally_equal(a.root(), b.root());
}

// ---------------------------------------------------------------------------
// Bounds

namespace {

void check_node(const Node& n) {
  std::visit(overloaded{
                 [](const Const&) {},
                 [](const MetricRef& m) {
                   if (m.metric == Metric::khop && (m.k < kMinKhop || m.k > kMaxKhop)) {
                     throw DslError(ErrorKind::khop_range, 0,
                                    "khop radius " + std::to_string(m.k) + " outside 1..4");
                   }
                 },
                 [](const Unary& u) { check_node(*u.child); },
                 [](const NeighborAgg& a) { check_node(*a.child); },
                 [](const Binary& b) {
                   check_node(*b.lhs);
                   check_node(*b.rhs);
                   if (b.op != BinaryOp::pow) return;
                   const auto* c = std::get_if<Const>(&b.rhs->data);
                   if (c == nullptr) {
                     throw DslError(ErrorKind::non_constant_exponent, 0,
                                    "pow exponent must be a constant");
                   }
                   if (!(std::fabs(c->value) <= kMaxExponent)) {
                     throw DslError(ErrorKind::exponent_range, 0,
                                    "pow exponent outside [-4, 4]");
                   }
                 },
             },
             n.data);
}

}  // namespace

void check_bounds(const Expr& e) {
  if (e.empty()) throw DslError(ErrorKind::syntax, 0, "empty expression");
  const std::size_t size = e.size();
  if (size > kMaxSize) {
    throw DslError(ErrorKind::size_bound, 0,
                   "tree has " + std::to_string(size) + " nodes, limit is 200");
  }
  const std::size_t depth = e.depth();
  if (depth > kMaxDepth) {
    throw DslError(ErrorKind::depth_bound, 0,
                   "tree depth " + std::to_string(depth) + " exceeds 12");
  }
  check_node(e.root());
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { number, ident, plus, minus, star, slash, lparen, rparen, comma, end };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }
  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ >= src_.size()) {
      current_ = {Tok::end, pos_, {}};
      return;
    }
    const std::size_t start = pos_;
    const char c = src_[pos_];
    auto single = [&](Tok kind) {
      ++pos_;
      current_ = {kind, start, src_.substr(start, 1)};
    };
    switch (c) {
      case '+': return single(Tok::plus);
      case '-': return single(Tok::minus);
      case '*': return single(Tok::star);
      case '/': return single(Tok::slash);
      case '(': return single(Tok::lparen);
      case ')': return single(Tok::rparen);
      case ',': return single(Tok::comma);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      double value = 0.0;
      const char* first = src_.data() + pos_;
      const char* last = src_.data() + src_.size();
      auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
      if (ec != std::errc() || !std::isfinite(value)) {
        throw DslError(ErrorKind::syntax, start, "malformed number");
      }
      pos_ += static_cast<std::size_t>(ptr - first);
      current_ = {Tok::number, start, src_.substr(start, pos_ - start), value};
      return;
    }
    if (std::islower(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::islower(static_cast<unsigned char>(src_[pos_])) ||
              std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      current_ = {Tok::ident, start, src_.substr(start, pos_ - start)};
      return;
    }
    throw DslError(ErrorKind::syntax, start, std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token current_{Tok::end, 0, {}};
};

// Recursion guard: deeper nesting than this cannot produce a valid tree.
constexpr std::size_t kMaxNesting = 8 * kMaxDepth;

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  Expr parse_all() {
    Expr e = expr();
    if (lex_.peek().kind != Tok::end) {
      throw DslError(ErrorKind::syntax, lex_.peek().pos,
                     "unexpected '" + std::string(lex_.peek().text) + "'");
    }
    return e;
  }

 private:
  struct NestingGuard {
    explicit NestingGuard(Parser& p, std::size_t pos) : p(p) {
      if (++p.nesting_ > kMaxNesting) {
        throw DslError(ErrorKind::depth_bound, pos, "expression nested too deeply");
      }
    }
    ~NestingGuard() { --p.nesting_; }
    Parser& p;
  };

  Expr expr() {
    NestingGuard guard(*this, lex_.peek().pos);
    Expr lhs = term();
    while (lex_.peek().kind == Tok::plus || lex_.peek().kind == Tok::minus) {
      const BinaryOp op = lex_.take().kind == Tok::plus ? BinaryOp::add : BinaryOp::sub;
      lhs = Expr::binary(op, lhs, term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = factor();
    while (lex_.peek().kind == Tok::star || lex_.peek().kind == Tok::slash) {
      const BinaryOp op = lex_.take().kind == Tok::star ? BinaryOp::mul : BinaryOp::div;
      lhs = Expr::binary(op, lhs, factor());
    }
    return lhs;
  }

  Expr factor() {
    NestingGuard guard(*this, lex_.peek().pos);
    const Token t = lex_.take();
    switch (t.kind) {
      case Tok::number: return Expr::constant(t.number);
      case Tok::minus:
        if (lex_.peek().kind == Tok::number) return Expr::constant(-lex_.take().number);
        return Expr::unary(UnaryOp::neg, factor());
      case Tok::lparen: {
        Expr inner = expr();
        expect(Tok::rparen, "')'");
        return inner;
      }
      case Tok::ident: return identifier(t);
      case Tok::end: throw DslError(ErrorKind::syntax, t.pos, "unexpected end of input");
      default:
        throw DslError(ErrorKind::syntax, t.pos, "unexpected '" + std::string(t.text) + "'");
    }
  }

  Expr identifier(const Token& t) {
    if (t.text == "khop") return khop(t);
    if (auto m = lookup<Metric>(kMetricNames, t.text)) {
      if (lex_.peek().kind == Tok::lparen) {
        throw DslError(ErrorKind::arity_mismatch, t.pos,
                       std::string(t.text) + " takes no arguments");
      }
      return Expr::metric(*m);
    }
    if (auto op = lookup<UnaryOp>(kUnaryNames, t.text)) {
      auto args = call_args(t, 1);
      return Expr::unary(*op, args[0]);
    }
    if (auto op = lookup<AggOp>(kAggNames, t.text)) {
      auto args = call_args(t, 1);
      return Expr::aggregate(*op, args[0]);
    }
    if (t.text == "min" || t.text == "max" || t.text == "pow") {
      const BinaryOp op = *lookup<BinaryOp>(kBinaryNames, t.text);
      const std::size_t exponent_pos = t.pos;
      auto args = call_args(t, 2);
      if (op == BinaryOp::pow) {
        const auto* c = std::get_if<Const>(&args[1].root().data);
        if (c == nullptr) {
          throw DslError(ErrorKind::non_constant_exponent, exponent_pos,
                         "pow exponent must be a constant");
        }
        if (!(std::fabs(c->value) <= kMaxExponent)) {
          throw DslError(ErrorKind::exponent_range, exponent_pos, "pow exponent outside [-4, 4]");
        }
      }
      return Expr::binary(op, args[0], args[1]);
    }
    throw DslError(ErrorKind::unknown_identifier, t.pos,
                   "unknown identifier '" + std::string(t.text) + "'");
  }

  Expr khop(const Token& t) {
    expect(Tok::lparen, "'(' after khop");
    const Token arg = lex_.take();
    if (arg.kind != Tok::number) {
      throw DslError(ErrorKind::syntax, arg.pos, "khop expects an integer literal");
    }
    if (lex_.peek().kind == Tok::comma) {
      throw DslError(ErrorKind::arity_mismatch, t.pos, "khop takes one argument");
    }
    expect(Tok::rparen, "')'");
    if (arg.number != std::floor(arg.number) || arg.number < kMinKhop || arg.number > kMaxKhop) {
      throw DslError(ErrorKind::khop_range, arg.pos,
                     "khop radius must be an integer in 1..4, got " + std::string(arg.text));
    }
    return Expr::metric(Metric::khop, static_cast<int>(arg.number));
  }

  std::vector<Expr> call_args(const Token& fn, std::size_t arity) {
    expect(Tok::lparen, "'(' after " + std::string(fn.text));
    std::vector<Expr> args;
    if (lex_.peek().kind != Tok::rparen) {
      args.push_back(expr());
      while (lex_.peek().kind == Tok::comma) {
        lex_.take();
        args.push_back(expr());
      }
    }
    expect(Tok::rparen, "')'");
    if (args.size() != arity) {
      throw DslError(ErrorKind::arity_mismatch, fn.pos,
                     std::string(fn.text) + " expects " + std::to_string(arity) +
                         " argument(s), got " + std::to_string(args.size()));
    }
    return args;
  }

  void expect(Tok kind, const std::string& what) {
    const Token t = lex_.take();
    if (t.kind != kind) throw DslError(ErrorKind::syntax, t.pos, "expected " + what);
  }

  Lexer lex_;
  std::size_t nesting_ = 0;
};

}  // namespace

Expr parse(std::string_view text) {
  Parser parser(text);
  Expr e = parser.parse_all();
  check_bounds(e);
  return e;
}

// ---------------------------------------------------------------------------
// Printer

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

namespace {

void print(const Node& n, std::string& out) {
  std::visit(overloaded{
                 [&](const Const& c) { out += format_number(c.value); },
                 [&](const MetricRef& m) {
                   out += name(m.metric);
                   if (m.metric == Metric::khop) out += "(" + std::to_string(m.k) + ")";
                 },
                 [&](const Unary& u) {
                   out += name(u.op);
                   out += '(';
                   print(*u.child, out);
                   out += ')';
                 },
                 [&](const NeighborAgg& a) {
                   out += name(a.op);
                   out += '(';
                   print(*a.child, out);
                   out += ')';
                 },
                 [&](const Binary& b) {
                   const char* infix = nullptr;
                   switch (b.op) {
                     case BinaryOp::add: infix = " + "; break;
                     case BinaryOp::sub: infix = " - "; break;
                     case BinaryOp::mul: infix = " * "; break;
                     case BinaryOp::div: infix = " / "; break;
                     default: break;
                   }
                   if (infix != nullptr) {
                     out += '(';
                     print(*b.lhs, out);
                     out += infix;
                     print(*b.rhs, out);
                     out += ')';
                   } else {
                     out += name(b.op);
                     out += '(';
                     print(*b.lhs, out);
                     out += ", ";
                     print(*b.rhs, out);
                     out += ')';
                   }
                 },
             },
             n.data);
}

}  // namespace

std::string print_canonical(const Expr& e) {
  std::string out;
  if (!e.empty()) print(e.root(), out);
  return out;
}

}  // namespace critnode::dsl
