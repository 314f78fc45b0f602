#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "critnode/evaluate.hpp"
#include "critnode/rng.hpp"
#include "critnode/variation.hpp"

namespace critnode {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  return {read_file(dir / "crossover.txt"), read_file(dir / "mutation.txt")};
}

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    const auto it = values.find(key);
    if (it == values.end()) throw std::invalid_argument("no value for placeholder {{" + key + "}}");
    out.append(tmpl.substr(pos, open - pos));
    out += it->second;
    pos = close + 2;
  }
  out.append(tmpl.substr(pos));
  return out;
}

std::string instruction_text(std::string_view tmpl) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find("{{", pos);
    const auto close = open == std::string_view::npos ? open : tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    pos = close + 2;
  }
  out.append(tmpl.substr(pos));
  return out;
}

std::vector<std::string> extract_code_blocks(std::string_view text) {
  std::vector<std::string> blocks;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    auto body = open + 3;
    const auto eol = text.find('\n', body);
    const auto close_inline = text.find("```", body);
    if (close_inline == std::string_view::npos) break;
    if (eol == std::string_view::npos || close_inline < eol) {
      // ```expr``` on one line
      blocks.emplace_back(trim(text.substr(body, close_inline - body)));
      pos = close_inline + 3;
      continue;
    }
    body = eol + 1;  // drop the language tag
    const auto close = text.find("```", body);
    if (close == std::string_view::npos) break;
    blocks.emplace_back(trim(text.substr(body, close - body)));
    pos = close + 3;
  }
  return blocks;
}

const Graph& probe_graph() {
  // Triangle 0-1-2 with a tail to a 4-cycle, a hub and two pendants.
  static const Graph g = [] {
    const std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5},
                                  {5, 6}, {6, 3}, {5, 7}, {7, 8}, {7, 9}};
    return Graph::from_edges(10, edges);
  }();
  return g;
}

std::variant<dsl::Expr, Rejection> validate_offspring(std::string_view raw) {
  dsl::Expr e;
  try {
    e = dsl::parse(trim(raw));
    dsl::check_bounds(e);
  } catch (const dsl::DslError& err) {
    return Rejection{std::string(raw), std::string(dsl::name(err.kind())), err.what()};
  }
  try {
    const auto scores = evaluate(e, probe_graph());
    if (!std::all_of(scores.begin(), scores.end(), [](double x) { return std::isfinite(x); }))
      return Rejection{std::string(raw), "probe_failure", "non-finite score on the probe graph"};
  } catch (const std::exception& err) {
    return Rejection{std::string(raw), "probe_failure", err.what()};
  }
  return e;
}

void VariationReport::merge(VariationReport other) {
  requested += other.requested;
  fallbacks += other.fallbacks;
  for (auto& r : other.discarded) discarded.push_back(std::move(r));
  for (auto& e : other.accepted) accepted.push_back(std::move(e));
  parsed_ok = accepted.size();
}

// ---------------------------------------------------------------------------
// Mock operator

namespace {

using dsl::Expr;
using dsl::Path;

int arity(const dsl::Node& n) {
  if (std::holds_alternative<dsl::Binary>(n.data)) return 2;
  if (std::holds_alternative<dsl::Unary>(n.data) || std::holds_alternative<dsl::NeighborAgg>(n.data))
    return 1;
  return 0;
}

const dsl::Node& child_node(const dsl::Node& n, int i) {
  if (const auto* b = std::get_if<dsl::Binary>(&n.data)) return i == 0 ? *b->lhs : *b->rhs;
  if (const auto* u = std::get_if<dsl::Unary>(&n.data)) return *u->child;
  return *std::get<dsl::NeighborAgg>(n.data).child;
}

/// Positions present in both trees with matching arity all the way down.
void common_region(const dsl::Node& a, const dsl::Node& b, Path& path, std::vector<Path>& out) {
  out.push_back(path);
  const int k = arity(a);
  if (k != arity(b)) return;
  for (int i = 0; i < k; ++i) {
    path.push_back(static_cast<std::uint8_t>(i));
    common_region(child_node(a, i), child_node(b, i), path, out);
    path.pop_back();
  }
}

bool within_bounds(const Expr& e, Rejection* why) {
  try {
    dsl::check_bounds(e);
    return true;
  } catch (const dsl::DslError& err) {
    if (why) *why = Rejection{dsl::print_canonical(e), std::string(dsl::name(err.kind())), err.what()};
    return false;
  }
}

std::optional<Expr> subtree_exchange(const Expr& p1, const Expr& p2, std::uint64_t seed,
                                     Rejection& why) {
  for (int attempt = 0; attempt < MockOperator::kMaxAttempts; ++attempt) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(attempt)}));
    const bool flip = rng.bernoulli(0.5);
    const Expr& into = flip ? p2 : p1;
    const Expr& from = flip ? p1 : p2;
    std::vector<Path> region;
    Path path;
    common_region(into.root(), from.root(), path, region);
    // Swapping the whole tree just copies a parent; prefer inner positions.
    const std::size_t first = region.size() > 1 ? 1 : 0;
    const Path& at = region[first + rng.uniform_index(region.size() - first)];
    Expr child = dsl::replace_subtree(into, at, dsl::subtree_at(from, at));
    if (within_bounds(child, &why)) return child;
  }
  return std::nullopt;
}

double round_significant(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

template <typename T>
std::vector<Path> paths_of(const Expr& e) {
  std::vector<Path> out;
  for (auto& p : dsl::subtree_paths(e))
    if (std::holds_alternative<T>(dsl::subtree_at(e, p).root().data)) out.push_back(std::move(p));
  return out;
}

std::optional<Expr> point_edit(const Expr& e, Rng& rng) {
  auto pick = [&](const std::vector<Path>& v) -> const Path& { return v[rng.uniform_index(v.size())]; };
  auto leaves = paths_of<dsl::MetricRef>(e);
  auto consts = paths_of<dsl::Const>(e);
  auto wrappers = paths_of<dsl::Unary>(e);
  auto bins = paths_of<dsl::Binary>(e);
  // Draw among the edits that apply to this tree; wrapping always does.
  std::vector<int> kinds{2};
  if (!leaves.empty()) kinds.push_back(0);
  if (!consts.empty()) kinds.push_back(1);
  if (!wrappers.empty()) kinds.push_back(3);
  if (!bins.empty()) kinds.push_back(4);
  std::sort(kinds.begin(), kinds.end());

  switch (kinds[rng.uniform_index(kinds.size())]) {
    case 0: {  // metric swap
      const Path& at = pick(leaves);
      const auto old = std::get<dsl::MetricRef>(dsl::subtree_at(e, at).root().data).metric;
      auto m = static_cast<dsl::Metric>(rng.uniform_index(dsl::kMetricCount - 1));
      if (m >= old) m = static_cast<dsl::Metric>(static_cast<int>(m) + 1);
      const int k = m == dsl::Metric::khop
                        ? dsl::kMinKhop + static_cast<int>(rng.uniform_index(dsl::kMaxKhop))
                        : 0;
      return dsl::replace_subtree(e, at, Expr::metric(m, k));
    }
    case 1: {  // constant scale
      const Path& at = pick(consts);
      const double v = std::get<dsl::Const>(dsl::subtree_at(e, at).root().data).value;
      const double scaled = round_significant(v * rng.uniform(0.5, 2.0), 4);
      if (scaled == v) return std::nullopt;
      return dsl::replace_subtree(e, at, Expr::constant(scaled));
    }
    case 2: {  // wrap
      auto all = dsl::subtree_paths(e);
      const Path& at = pick(all);
      const auto op = static_cast<dsl::UnaryOp>(rng.uniform_index(dsl::kUnaryCount));
      return dsl::replace_subtree(e, at, Expr::unary(op, dsl::subtree_at(e, at)));
    }
    case 3: {  // unwrap
      const Path& at = pick(wrappers);
      const auto& u = std::get<dsl::Unary>(dsl::subtree_at(e, at).root().data);
      return dsl::replace_subtree(e, at, Expr(u.child));
    }
    default: {  // binary op swap
      const Path& at = pick(bins);
      const auto& b = std::get<dsl::Binary>(dsl::subtree_at(e, at).root().data);
      auto op = static_cast<dsl::BinaryOp>(rng.uniform_index(dsl::kBinaryCount - 1));
      if (op >= b.op) op = static_cast<dsl::BinaryOp>(static_cast<int>(op) + 1);
      return dsl::replace_subtree(e, at, Expr::binary(op, Expr(b.lhs), Expr(b.rhs)));
    }
  }
}

}  // namespace

VariationReport MockOperator::crossover(std::span<const Parent> parents, std::uint64_t seed) {
  if (parents.size() < 2) throw std::invalid_argument("crossover needs at least two parents");
  VariationReport report;
  for (std::size_t i = 0; i + 1 < parents.size(); ++i) {
    const Expr& p1 = parents[i].expr;
    const Expr& p2 = parents[i + 1].expr;
    const std::uint64_t pair_seed = derive_seed(seed, {i});
    report.requested += max_offspring_;
    std::size_t made = 0;

    if (made < max_offspring_) {
      Rejection why;
      if (auto child = subtree_exchange(p1, p2, pair_seed, why)) {
        report.accept(std::move(*child));
        ++made;
      } else {
        report.discarded.push_back(std::move(why));
      }
    }
    if (made < max_offspring_) {
      Expr blend = Expr::binary(dsl::BinaryOp::add, Expr::unary(dsl::UnaryOp::normalize, p1),
                                Expr::unary(dsl::UnaryOp::normalize, p2));
      Rejection why;
      if (within_bounds(blend, &why)) {
        report.accept(std::move(blend));
      } else {
        report.discarded.push_back(std::move(why));
      }
    }
  }
  return report;
}

VariationReport MockOperator::mutate(const dsl::Expr& e, std::uint64_t seed) {
  VariationReport report;
  report.requested = 1;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(attempt)}));
    auto edited = point_edit(e, rng);
    if (!edited || *edited == e || !within_bounds(*edited, nullptr)) continue;
    report.accept(std::move(*edited));
    break;
  }
  return report;
}

}  // namespace critnode
