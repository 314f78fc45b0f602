#include <stdexcept>

#include "critnode/dsl.hpp"

namespace critnode::dsl {

namespace {

void collect(const Node& n, Path& path, std::vector<Path>& out) {
  out.push_back(path);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Unary> || std::is_same_v<T, NeighborAgg>) {
          path.push_back(0);
          collect(*x.child, path, out);
          path.pop_back();
        } else if constexpr (std::is_same_v<T, Binary>) {
          path.push_back(0);
          collect(*x.lhs, path, out);
          path.back() = 1;
          collect(*x.rhs, path, out);
          path.pop_back();
        }
      },
      n.data);
}

const NodePtr& child(const NodePtr& n, std::uint8_t index) {
  if (const auto* u = std::get_if<Unary>(&n->data); u && index == 0) return u->child;
  if (const auto* a = std::get_if<NeighborAgg>(&n->data); a && index == 0) return a->child;
  if (const auto* b = std::get_if<Binary>(&n->data); b && index <= 1)
    return index == 0 ? b->lhs : b->rhs;
  throw std::out_of_range("subtree path leaves the tree");
}

NodePtr rebuild(const NodePtr& n, const Path& path, std::size_t at, const NodePtr& repl) {
  if (at == path.size()) return repl;
  NodePtr sub = rebuild(child(n, path[at]), path, at + 1, repl);
  Node copy = *n;
  std::visit(
      [&](auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Unary> || std::is_same_v<T, NeighborAgg>) {
          x.child = sub;
        } else if constexpr (std::is_same_v<T, Binary>) {
          (path[at] == 0 ? x.lhs : x.rhs) = sub;
        }
      },
      copy.data);
  return std::make_shared<const Node>(std::move(copy));
}

}  // namespace

std::vector<Path> subtree_paths(const Expr& e) {
  std::vector<Path> out;
  Path path;
  collect(e.root(), path, out);
  return out;
}

Expr subtree_at(const Expr& e, const Path& path) {
  const NodePtr* n = &e.ptr();
  for (std::uint8_t i : path) n = &child(*n, i);
  return Expr(*n);
}

Expr replace_subtree(const Expr& e, const Path& path, const Expr& replacement) {
  return Expr(rebuild(e.ptr(), path, 0, replacement.ptr()));
}

}  // namespace critnode::dsl
