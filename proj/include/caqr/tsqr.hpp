#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "caqr/counters.hpp"
#include "caqr/householder.hpp"
#include "caqr/matrix.hpp"

namespace caqr {

enum class TreeShape { flat, binary, general };

struct TreeSpec {
  TreeShape shape = TreeShape::binary;
  std::size_t branching = 2;
};

/// "flat", "binary" or "general:Q".
inline TreeSpec parse_tree_spec(const std::string& s) {
  if (s == "flat") return {TreeShape::flat, 2};
  if (s == "binary") return {TreeShape::binary, 2};
  if (s.rfind("general:", 0) == 0) {
    std::size_t q = 0;
    try {
      q = std::stoul(s.substr(8));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad tree spec: " + s);
    }
    if (q < 2) throw std::invalid_argument("general tree needs branching >= 2");
    return {TreeShape::general, q};
  }
  throw std::invalid_argument("bad tree spec: " + s);
}

inline std::string to_string(const TreeSpec& t) {
  switch (t.shape) {
    case TreeShape::flat: return "flat";
    case TreeShape::binary: return "binary";
    case TreeShape::general: return "general:" + std::to_string(t.branching);
  }
  return "?";
}

struct TreeNode {
  std::size_t level = 0;
  std::vector<std::size_t> children;  // empty for leaves
};

/// Nodes 0..leaves-1 are the leaves; interior nodes follow in creation order, which is
/// bottom-up, so a forward sweep visits children before parents.
struct ReductionTree {
  std::vector<TreeNode> nodes;
  std::size_t leaves = 0;
  std::size_t root = 0;
  TreeSpec spec;

  bool is_leaf(std::size_t id) const noexcept { return id < leaves; }
  std::size_t height() const { return nodes.at(root).level; }

  std::size_t owner(std::size_t id) const {
    while (!is_leaf(id)) id = nodes[id].children.front();
    return id;
  }
};

inline ReductionTree build_tree(std::size_t leaves, TreeSpec spec) {
  if (leaves == 0) throw std::invalid_argument("build_tree: need at least one leaf");
  if (spec.shape == TreeShape::binary) spec.branching = 2;
  if (spec.branching < 2) throw std::invalid_argument("build_tree: branching must be >= 2");
  ReductionTree t;
  t.leaves = leaves;
  t.spec = spec;
  t.nodes.resize(leaves);
  if (spec.shape == TreeShape::flat) {
    std::size_t cur = 0;
    for (std::size_t k = 1; k < leaves; ++k) {
      t.nodes.push_back({k, {cur, k}});
      cur = t.nodes.size() - 1;
    }
    t.root = cur;
    return t;
  }
  std::vector<std::size_t> frontier(leaves);
  for (std::size_t i = 0; i < leaves; ++i) frontier[i] = i;
  std::size_t level = 0;
  while (frontier.size() > 1) {
    ++level;
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); i += spec.branching) {
      std::size_t end = std::min(frontier.size(), i + spec.branching);
      if (end - i == 1) {
        next.push_back(frontier[i]);
        continue;
      }
      t.nodes.push_back({level, std::vector<std::size_t>(frontier.begin() + i, frontier.begin() + end)});
      next.push_back(t.nodes.size() - 1);
    }
    frontier = std::move(next);
  }
  t.root = frontier.front();
  return t;
}

inline ReductionTree build_tree(std::size_t leaves, TreeShape shape, std::size_t branching = 2) {
  return build_tree(leaves, TreeSpec{shape, branching});
}

struct TreeNodeFactor {
  std::vector<std::size_t> rows;  // rows of the factored row space, in stacking order
  bool factored = false;          // raw leaves are absorbed as dense blocks by their parent
  HouseholderFactor factor;
  std::size_t owner = 0;
};

/// Implicit Q as a tree of local Householder factors.
struct TreeQRFactor {
  ReductionTree tree;
  std::vector<TreeNodeFactor> nodes;
  DenseMatrix r;
  std::size_t m = 0;
  std::size_t n = 0;

  /// Rows a node hands to its parent.
  std::vector<std::size_t> contribution(std::size_t id) const {
    const TreeNodeFactor& nd = nodes[id];
    if (!nd.factored) return nd.rows;
    return {nd.rows.begin(), nd.rows.begin() + static_cast<std::ptrdiff_t>(n)};
  }

  /// Rows where Q^T A holds R.
  std::vector<std::size_t> r_rows() const { return contribution(tree.root); }
};

/// Cost hooks used while walking a tree.
struct TreeCostHooks {
  std::function<void(std::size_t owner, const OpCount&)> compute;
  std::function<void(std::size_t from, std::size_t to, std::uint64_t words)> edge;
};

namespace detail {

inline std::uint64_t triangle_words(std::size_t n) { return static_cast<std::uint64_t>(n) * (n + 1) / 2; }

/// Factor `panel` over a tree whose leaves own the given row lists.
inline TreeQRFactor factor_over_tree(const DenseMatrix& panel, ReductionTree tree,
                                     const std::vector<std::vector<std::size_t>>& leaf_rows,
                                     const std::vector<bool>& leaf_factored,
                                     const std::vector<std::size_t>& leaf_owner, const TreeCostHooks& hooks) {
  const std::size_t n = panel.cols();
  TreeQRFactor f;
  f.m = panel.rows();
  f.n = n;
  f.nodes.resize(tree.nodes.size());
  std::vector<DenseMatrix> node_r(tree.nodes.size());
  for (std::size_t i = 0; i < tree.leaves; ++i) {
    TreeNodeFactor& nd = f.nodes[i];
    nd.rows = leaf_rows[i];
    nd.owner = leaf_owner[i];
    nd.factored = leaf_factored[i];
    if (!nd.factored) continue;
    if (nd.rows.size() < n) throw std::invalid_argument("tree leaf has fewer rows than columns");
    OpCount ops;
    nd.factor = qr_unblocked(panel.gather_rows(nd.rows), ops);
    node_r[i] = nd.factor.r;
    if (hooks.compute) hooks.compute(nd.owner, ops);
  }
  for (std::size_t id = tree.leaves; id < tree.nodes.size(); ++id) {
    const TreeNode& tn = tree.nodes[id];
    TreeNodeFactor& nd = f.nodes[id];
    nd.owner = f.nodes[tn.children.front()].owner;
    std::vector<StackedBlock> s;
    std::size_t total = 0;
    for (std::size_t c : tn.children) {
      std::vector<std::size_t> rows = f.contribution(c);
      s.push_back({total, rows.size(), f.nodes[c].factored ? BlockKind::triangular : BlockKind::dense});
      total += rows.size();
      nd.rows.insert(nd.rows.end(), rows.begin(), rows.end());
    }
    DenseMatrix stacked(total, n);
    for (std::size_t k = 0; k < tn.children.size(); ++k) {
      std::size_t c = tn.children[k];
      if (f.nodes[c].factored)
        stacked.set_block(s[k].offset, 0, node_r[c]);
      else
        stacked.set_block(s[k].offset, 0, panel.gather_rows(f.nodes[c].rows));
      if (k > 0 && hooks.edge)
        hooks.edge(f.nodes[c].owner, nd.owner,
                   f.nodes[c].factored ? triangle_words(n) : static_cast<std::uint64_t>(s[k].rows) * n);
    }
    OpCount ops;
    nd.factor = qr_stacked(stacked, std::move(s), ops);
    nd.factored = true;
    node_r[id] = nd.factor.r;
    if (hooks.compute) hooks.compute(nd.owner, ops);
    for (std::size_t c : tn.children) node_r[c] = DenseMatrix();
  }
  f.tree = std::move(tree);
  f.r = node_r[f.tree.root];
  return f;
}

inline void apply_node(const TreeNodeFactor& nd, DenseMatrix& c, bool transpose, OpCount& ops) {
  DenseMatrix local = c.gather_rows(nd.rows);
  local = transpose ? apply_qt(nd.factor, std::move(local), ops) : apply_q(nd.factor, std::move(local), ops);
  c.scatter_rows(nd.rows, local);
}

inline void check_apply(const TreeQRFactor& f, const DenseMatrix& c) {
  if (c.rows() != f.m) throw std::invalid_argument("tsqr apply: row dimension mismatch");
}

}  // namespace detail

/// Parallel TSQR over P virtual processors: processor i owns the i-th contiguous row block.
inline TreeQRFactor tsqr_factor(const DenseMatrix& a, std::size_t procs, const ReductionTree& tree,
                                CommCounters& counters) {
  const std::size_t m = a.rows(), n = a.cols();
  if (procs == 0) throw std::invalid_argument("tsqr: need at least one processor");
  if (n == 0 || m < n) throw std::invalid_argument("tsqr: need m >= n >= 1");
  if (m / procs < n) throw std::invalid_argument("tsqr: m/P < n");
  if (tree.leaves != procs) throw std::invalid_argument("tsqr: tree leaf count differs from P");
  if (counters.procs() < procs) throw std::invalid_argument("tsqr: counters have too few processors");
  std::vector<std::vector<std::size_t>> rows(procs);
  std::vector<std::size_t> owner(procs);
  std::size_t base = m / procs, extra = m % procs, at = 0;
  for (std::size_t p = 0; p < procs; ++p) {
    std::size_t len = base + (p < extra ? 1 : 0);
    for (std::size_t k = 0; k < len; ++k) rows[p].push_back(at + k);
    at += len;
    owner[p] = p;
  }
  TreeCostHooks hooks{[&](std::size_t p, const OpCount& ops) { counters.record_flops(p, ops); },
                      [&](std::size_t from, std::size_t to, std::uint64_t w) { counters.send(from, to, w); }};
  return detail::factor_over_tree(a, tree, rows, std::vector<bool>(procs, true), owner, hooks);
}

inline TreeQRFactor tsqr_factor(const DenseMatrix& a, std::size_t procs, const ReductionTree& tree) {
  CommCounters c(procs);
  return tsqr_factor(a, procs, tree, c);
}

/// Block row count used by sequential TSQR: floor((W - n(n+1)/2) / n).
inline std::size_t tsqr_seq_block_rows(std::size_t n, std::size_t fast_memory) {
  const std::uint64_t tri = detail::triangle_words(n);
  if (n == 0 || fast_memory <= tri) return 0;
  return static_cast<std::size_t>((fast_memory - tri) / n);
}

namespace detail {

/// Flat-tree TSQR that streams the given row blocks through fast memory. The running R
/// stays resident; each block is read once and its Householder vectors and tau are
/// written back, then the final R is written.
inline TreeQRFactor streamed_flat_tsqr(const DenseMatrix& panel, const std::vector<std::vector<std::size_t>>& rows,
                                       std::uint64_t fast_memory, CommCounters& counters) {
  const std::size_t n = panel.cols();
  const std::uint64_t tri = triangle_words(n);
  const std::size_t nb = rows.size();
  std::vector<bool> factored(nb, false);
  factored[0] = true;
  auto move = [&](std::uint64_t words, Direction d) {
    if (words > fast_memory) throw CapacityError("transfer exceeds fast memory");
    counters.record_transfer(words, d);
  };
  auto block_words = [&](std::size_t k) { return static_cast<std::uint64_t>(rows[k].size()) * n; };
  std::size_t seen = 0;
  TreeCostHooks hooks;
  hooks.compute = [&](std::size_t, const OpCount& ops) {
    counters.record_flops(0, ops);
    move(seen == 0 ? block_words(0) - tri + n : block_words(seen) + n, Direction::write);
    counters.release(block_words(seen));
    if (seen == 0) counters.hold(tri);
    if (++seen < nb) {
      move(block_words(seen), Direction::read);
      counters.hold(block_words(seen));
    }
  };
  move(block_words(0), Direction::read);
  counters.hold(block_words(0));
  TreeQRFactor f = factor_over_tree(panel, build_tree(nb, TreeShape::flat), rows, factored,
                                    std::vector<std::size_t>(nb, 0), hooks);
  move(tri, Direction::write);
  counters.release(tri);
  return f;
}

}  // namespace detail

/// Sequential flat-tree TSQR with a fast memory of W words and blocks of
/// floor((W - n(n+1)/2) / n) rows.
inline TreeQRFactor tsqr_seq_factor(const DenseMatrix& a, std::size_t fast_memory, CommCounters& counters) {
  const std::size_t m = a.rows(), n = a.cols();
  if (n == 0 || m < n) throw std::invalid_argument("tsqr_seq: need m >= n >= 1");
  const std::size_t block = tsqr_seq_block_rows(n, fast_memory);
  if (block < n)
    throw CapacityError("fast memory of " + std::to_string(fast_memory) + " words cannot hold an " +
                        std::to_string(n) + "-row block plus R");
  std::vector<std::vector<std::size_t>> rows;
  for (std::size_t at = 0; at < m; at += block) {
    std::size_t len = std::min(block, m - at);
    rows.emplace_back(len);
    for (std::size_t k = 0; k < len; ++k) rows.back()[k] = at + k;
  }
  return detail::streamed_flat_tsqr(a, rows, fast_memory, counters);
}

inline TreeQRFactor tsqr_seq_factor(const DenseMatrix& a, std::size_t fast_memory) {
  CommCounters c(1, fast_memory);
  return tsqr_seq_factor(a, fast_memory, c);
}

/// Q^T C. With counters, every non-first child ships its contribution rows of C to the
/// parent's owner and receives the updated rows back.
inline DenseMatrix tsqr_apply_qt(const TreeQRFactor& f, DenseMatrix c, CommCounters* counters = nullptr) {
  detail::check_apply(f, c);
  for (std::size_t id = 0; id < f.nodes.size(); ++id) {
    const TreeNodeFactor& nd = f.nodes[id];
    if (!nd.factored) continue;
    if (!f.tree.is_leaf(id) && counters)
      for (std::size_t k = 1; k < f.tree.nodes[id].children.size(); ++k) {
        std::size_t ch = f.tree.nodes[id].children[k];
        std::uint64_t w = static_cast<std::uint64_t>(f.contribution(ch).size()) * c.cols();
        counters->send(f.nodes[ch].owner, nd.owner, w);
      }
    OpCount ops;
    detail::apply_node(nd, c, true, ops);
    if (counters) counters->record_flops(nd.owner, ops);
    if (!f.tree.is_leaf(id) && counters)
      for (std::size_t k = 1; k < f.tree.nodes[id].children.size(); ++k) {
        std::size_t ch = f.tree.nodes[id].children[k];
        std::uint64_t w = static_cast<std::uint64_t>(f.contribution(ch).size()) * c.cols();
        counters->send(nd.owner, f.nodes[ch].owner, w);
      }
  }
  return c;
}

inline DenseMatrix tsqr_apply_q(const TreeQRFactor& f, DenseMatrix c, CommCounters* counters = nullptr) {
  detail::check_apply(f, c);
  for (std::size_t id = f.nodes.size(); id-- > 0;) {
    const TreeNodeFactor& nd = f.nodes[id];
    if (!nd.factored) continue;
    if (!f.tree.is_leaf(id) && counters)
      for (std::size_t k = 1; k < f.tree.nodes[id].children.size(); ++k) {
        std::size_t ch = f.tree.nodes[id].children[k];
        std::uint64_t w = static_cast<std::uint64_t>(f.contribution(ch).size()) * c.cols();
        counters->send(f.nodes[ch].owner, nd.owner, w);
      }
    OpCount ops;
    detail::apply_node(nd, c, false, ops);
    if (counters) counters->record_flops(nd.owner, ops);
    if (!f.tree.is_leaf(id) && counters)
      for (std::size_t k = 1; k < f.tree.nodes[id].children.size(); ++k) {
        std::size_t ch = f.tree.nodes[id].children[k];
        std::uint64_t w = static_cast<std::uint64_t>(f.contribution(ch).size()) * c.cols();
        counters->send(nd.owner, f.nodes[ch].owner, w);
      }
  }
  return c;
}

/// Thin m x n Q.
inline DenseMatrix tsqr_explicit_q(const TreeQRFactor& f) {
  DenseMatrix e(f.m, f.n);
  std::vector<std::size_t> rr = f.r_rows();
  for (std::size_t i = 0; i < f.n; ++i) e(rr[i], i) = 1.0;
  return tsqr_apply_q(f, std::move(e));
}

}  // namespace caqr
