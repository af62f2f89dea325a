#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "caqr/counters.hpp"
#include "caqr/householder.hpp"
#include "caqr/layout.hpp"
#include "caqr/matrix.hpp"
#include "caqr/tsqr.hpp"

namespace caqr {

struct CaqrPanel {
  TreeQRFactor tree;  // row space: all (padded) rows of A
  std::size_t col0 = 0;
  std::size_t width = 0;
};

/// Right-looking QR as a sequence of TSQR panel factors over the padded matrix.
struct CaqrFactor {
  std::vector<CaqrPanel> panels;
  DenseMatrix r;  // n x n
  std::size_t m = 0, n = 0;
  std::size_t padded_m = 0, padded_n = 0;
  BlockCyclicLayout layout;
};

/// Q^T C for C with m or padded_m rows; the result lives in the padded row space.
inline DenseMatrix caqr_apply_qt(const CaqrFactor& f, const DenseMatrix& c) {
  if (c.rows() != f.m && c.rows() != f.padded_m) throw std::invalid_argument("caqr apply: row mismatch");
  DenseMatrix x(f.padded_m, c.cols());
  x.set_block(0, 0, c);
  for (const auto& p : f.panels) x = tsqr_apply_qt(p.tree, std::move(x));
  return x;
}

inline DenseMatrix caqr_apply_q(const CaqrFactor& f, const DenseMatrix& c) {
  if (c.rows() != f.m && c.rows() != f.padded_m) throw std::invalid_argument("caqr apply: row mismatch");
  DenseMatrix x(f.padded_m, c.cols());
  x.set_block(0, 0, c);
  for (auto it = f.panels.rbegin(); it != f.panels.rend(); ++it) x = tsqr_apply_q(it->tree, std::move(x));
  return x;
}

/// Thin m x n Q with A = Q R.
inline DenseMatrix caqr_explicit_q(const CaqrFactor& f) {
  return caqr_apply_q(f, DenseMatrix::identity(f.padded_m, f.n)).block(0, 0, f.m, f.n);
}

namespace detail {

inline std::size_t round_up(std::size_t x, std::size_t k) { return (x + k - 1) / k * k; }

inline std::size_t count_below(const std::vector<std::size_t>& idx, std::size_t limit) {
  return static_cast<std::size_t>(std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return i < limit; }));
}

inline DenseMatrix gather(const DenseMatrix& a, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols) {
  DenseMatrix s(rows.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i) s(i, j) = a(rows[i], cols[j]);
  return s;
}

inline void scatter(DenseMatrix& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                    const DenseMatrix& s) {
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i) a(rows[i], cols[j]) = s(i, j);
}

inline std::vector<std::size_t> iota_range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> v;
  for (std::size_t i = first; i < last; ++i) v.push_back(i);
  return v;
}

/// Householder parameters of a tree node that lie in the unpadded matrix.
inline std::uint64_t y_words(const TreeQRFactor& t, std::size_t id, std::size_t real_m, std::size_t real_w) {
  const TreeNodeFactor& nd = t.nodes[id];
  const std::uint64_t tri = triangle_words(real_w);
  if (t.tree.is_leaf(id)) {
    std::uint64_t all = static_cast<std::uint64_t>(count_below(nd.rows, real_m)) * real_w;
    return all > tri ? all - tri : 0;
  }
  return static_cast<std::uint64_t>(t.tree.nodes[id].children.size() - 1) * tri;
}

}  // namespace detail

/**
 * Apply the panel's Q^T to columns [col_begin, col_end) of `a`, which is laid out
 * block-cyclically on `layout`; the panel lives in processor column `panel_pcol`.
 * Leaf and node Householder data go out along processor rows in two broadcasts (Y, then
 * tau); T is rebuilt by each consumer. Each tree node then exchanges the contribution rows
 * of every processor column with its first child's owner, once in each direction.
 * Words count only entries inside the leading real_m x real_n corner.
 */
inline void trailing_update(const TreeQRFactor& panel, const BlockCyclicLayout& layout, std::size_t panel_pcol,
                            DenseMatrix& a, std::size_t col_begin, std::size_t col_end, CommCounters& counters,
                            std::size_t real_m, std::size_t real_n) {
  if (a.rows() != panel.m) throw std::invalid_argument("trailing_update: row mismatch");
  if (col_end > a.cols() || col_begin > col_end) throw std::invalid_argument("trailing_update: bad columns");
  if (col_begin == col_end) return;
  const std::size_t pr = layout.pr, pc = layout.pc, b = layout.b;
  std::vector<std::vector<std::size_t>> cols(pc);
  for (std::size_t j = col_begin; j < col_end; ++j) cols[(j / b) % pc].push_back(j);
  const std::size_t panel_col0 = panel.r_rows().front();
  const std::size_t real_w = panel_col0 < real_n ? std::min(panel.n, real_n - panel_col0) : 0;
  auto grid_row = [&](std::size_t id) { return panel.nodes[id].owner % pr; };

  // broadcasts along each participating processor row
  std::vector<std::uint64_t> row_y(pr, 0), row_tau(pr, 0);
  std::vector<bool> row_used(pr, false);
  for (std::size_t id = 0; id < panel.nodes.size(); ++id) {
    if (!panel.nodes[id].factored) continue;
    std::size_t r = grid_row(id);
    row_used[r] = true;
    row_y[r] += detail::y_words(panel, id, real_m, real_w);
    row_tau[r] += real_w;
  }
  for (std::size_t r = 0; r < pr; ++r) {
    if (!row_used[r]) continue;
    std::vector<std::size_t> group{layout.proc_id(r, panel_pcol)};
    for (std::size_t k = 1; k < pc; ++k) {
      std::size_t c = (panel_pcol + k) % pc;
      if (!cols[c].empty()) group.push_back(layout.proc_id(r, c));
    }
    broadcast(counters, group, row_y[r]);
    broadcast(counters, group, row_tau[r]);
  }

  auto update = [&](std::size_t id, std::size_t c) {
    const TreeNodeFactor& nd = panel.nodes[id];
    DenseMatrix s = detail::gather(a, nd.rows, cols[c]);
    OpCount ops;
    s = apply_qt_wy(nd.factor, std::move(s), ops);
    detail::scatter(a, nd.rows, cols[c], s);
    counters.record_flops(layout.proc_id(grid_row(id), c), ops);
  };

  for (std::size_t id = 0; id < panel.tree.leaves; ++id)
    for (std::size_t c = 0; c < pc; ++c)
      if (!cols[c].empty() && panel.nodes[id].factored) update(id, c);

  for (std::size_t id = panel.tree.leaves; id < panel.nodes.size(); ++id) {
    const auto& children = panel.tree.nodes[id].children;
    const std::size_t r0 = grid_row(id);
    for (std::size_t c = 0; c < pc; ++c) {
      if (cols[c].empty()) continue;
      const std::uint64_t real_cols = detail::count_below(cols[c], real_n);
      for (std::size_t k = 1; k < children.size(); ++k) {
        std::uint64_t w = detail::count_below(panel.contribution(children[k]), real_m) * real_cols;
        counters.send(layout.proc_id(grid_row(children[k]), c), layout.proc_id(r0, c), w);
      }
      update(id, c);
      for (std::size_t k = 1; k < children.size(); ++k) {
        std::uint64_t w = detail::count_below(panel.contribution(children[k]), real_m) * real_cols;
        counters.send(layout.proc_id(r0, c), layout.proc_id(grid_row(children[k]), c), w);
      }
    }
  }
}

/// Parallel CAQR on a Pr x Pc block-cyclic grid with b x b blocks. The matrix is padded
/// with zeros to multiples of b*Pr rows and b*Pc columns.
inline CaqrFactor caqr_parallel_factor(const DenseMatrix& a, const BlockCyclicLayout& layout, CommCounters& counters) {
  const std::size_t m = a.rows(), n = a.cols();
  if (n == 0 || m < n) throw std::invalid_argument("caqr: need m >= n >= 1");
  layout.validate(m, n);
  if (counters.procs() < layout.procs()) throw std::invalid_argument("caqr: counters have too few processors");
  const std::size_t b = layout.b, pr = layout.pr, pc = layout.pc;
  const std::size_t mp = detail::round_up(m, b * pr);
  const std::size_t np = detail::round_up(n, b * pc);
  DenseMatrix work(mp, np);
  work.set_block(0, 0, a);

  CaqrFactor f;
  f.m = m;
  f.n = n;
  f.padded_m = mp;
  f.padded_n = np;
  f.layout = layout;
  // block columns made only of padding stay zero and are skipped
  const std::size_t row_blocks = mp / b, col_blocks = (n + b - 1) / b;
  for (std::size_t jb = 0; jb < col_blocks; ++jb) {
    const std::size_t c0 = jb * b, c1 = c0 + b, pcol = jb % pc;
    const std::size_t real_w = std::min(b, n - c0);
    std::vector<std::vector<std::size_t>> leaf_rows;
    std::vector<std::size_t> owners;
    for (std::size_t k = 0; k < std::min(pr, row_blocks - jb); ++k) {
      const std::size_t prow = (jb + k) % pr;
      std::vector<std::size_t> rows;
      for (std::size_t ib = jb; ib < row_blocks; ++ib)
        if (ib % pr == prow)
          for (std::size_t i = ib * b; i < ib * b + b; ++i) rows.push_back(i);
      leaf_rows.push_back(std::move(rows));
      owners.push_back(layout.proc_id(prow, pcol));
    }
    TreeCostHooks hooks{[&](std::size_t p, const OpCount& ops) { counters.record_flops(p, ops); },
                        [&](std::size_t from, std::size_t to, std::uint64_t) {
                          counters.send(from, to, detail::triangle_words(real_w));
                        }};
    const std::size_t leaves = leaf_rows.size();
    TreeQRFactor t = detail::factor_over_tree(work.block(0, c0, mp, b), build_tree(leaves, TreeShape::binary),
                                              leaf_rows, std::vector<bool>(leaves, true), owners, hooks);
    for (std::size_t j = 0; j < b; ++j)
      for (std::size_t i = c0; i < mp; ++i) work(i, c0 + j) = (i - c0 <= j) ? t.r(i - c0, j) : 0.0;
    trailing_update(t, layout, pcol, work, c1, std::max(c1, n), counters, m, n);
    f.panels.push_back({std::move(t), c0, b});
  }
  f.r = work.block(0, 0, n, n);
  return f;
}

inline CaqrFactor caqr_parallel_factor(const DenseMatrix& a, const BlockCyclicLayout& layout) {
  CommCounters c(layout.procs());
  return caqr_parallel_factor(a, layout, c);
}

struct SeqCaqrParams {
  std::size_t pr = 1;
  std::size_t pc = 1;
  std::size_t b = 1;
};

/// Pr = ceil(2m/sqrt(W)), Pc = ceil(2n/sqrt(W)), b = min(floor(m/Pr), floor(n/Pc)).
inline SeqCaqrParams seq_caqr_params(std::size_t m, std::size_t n, std::size_t fast_memory) {
  const double s = std::sqrt(static_cast<double>(fast_memory));
  SeqCaqrParams p;
  p.pr = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * static_cast<double>(m) / s - 1e-9)));
  p.pc = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * static_cast<double>(n) / s - 1e-9)));
  p.b = std::max<std::size_t>(1, std::min(m / p.pr, n / p.pc));
  return p;
}

/// Sequential CAQR with b x b blocks (ragged at the edges) streamed through a fast memory
/// of W words. Panels are flat-tree TSQRs down a block column; the trailing update keeps
/// at most the top block, one Householder block and one target block resident.
inline CaqrFactor caqr_sequential_factor(const DenseMatrix& a, std::size_t fast_memory, CommCounters& counters) {
  const std::size_t m = a.rows(), n = a.cols();
  if (n == 0 || m < n) throw std::invalid_argument("caqr_seq: need m >= n >= 1");
  const SeqCaqrParams prm = seq_caqr_params(m, n, fast_memory);
  const std::size_t b = prm.b;
  const std::uint64_t tri_b = detail::triangle_words(b);
  if (3 * static_cast<std::uint64_t>(b) * b + tri_b > fast_memory)
    throw CapacityError("fast memory of " + std::to_string(fast_memory) + " words is below the CAQR working set");
  auto move = [&](std::uint64_t words, Direction d) {
    if (words > fast_memory) throw CapacityError("transfer exceeds fast memory");
    counters.record_transfer(words, d);
  };

  DenseMatrix work = a;
  CaqrFactor f;
  f.m = f.padded_m = m;
  f.n = f.padded_n = n;
  f.layout = {prm.pr, prm.pc, b};
  const std::size_t row_blocks = (m + b - 1) / b, col_blocks = (n + b - 1) / b;
  auto rows_of = [&](std::size_t ib) { return detail::iota_range(ib * b, std::min(m, ib * b + b)); };
  auto cols_of = [&](std::size_t jb) { return detail::iota_range(jb * b, std::min(n, jb * b + b)); };

  for (std::size_t jb = 0; jb < col_blocks; ++jb) {
    const std::vector<std::size_t> pcols = cols_of(jb);
    const std::size_t c0 = pcols.front(), w = pcols.size();
    const std::uint64_t tri = detail::triangle_words(w);
    std::vector<std::vector<std::size_t>> blocks;
    for (std::size_t ib = jb; ib < row_blocks; ++ib) blocks.push_back(rows_of(ib));
    TreeQRFactor t = detail::streamed_flat_tsqr(work.block(0, c0, m, w), blocks, fast_memory, counters);
    for (std::size_t j = 0; j < w; ++j)
      for (std::size_t i = c0; i < m; ++i) work(i, c0 + j) = (i - c0 <= j) ? t.r(i - c0, j) : 0.0;

    for (std::size_t kb = jb + 1; kb < col_blocks; ++kb) {
      const std::vector<std::size_t> kcols = cols_of(kb);
      const std::uint64_t top_words = static_cast<std::uint64_t>(blocks[0].size()) * kcols.size();
      move(top_words, Direction::read);
      counters.hold(top_words);
      for (std::size_t leaf = 0; leaf < blocks.size(); ++leaf) {
        // leaf 0 is the diagonal block's own factor; leaf k > 0 is absorbed by node leaves+k-1
        const std::size_t id = leaf == 0 ? 0 : t.tree.leaves + leaf - 1;
        const TreeNodeFactor& nd = t.nodes[id];
        const std::uint64_t yw = leaf == 0 ? blocks[0].size() * w - tri : blocks[leaf].size() * w;
        move(yw + w, Direction::read);
        counters.hold(yw + tri);
        std::uint64_t target = 0;
        if (leaf > 0) {
          target = static_cast<std::uint64_t>(blocks[leaf].size()) * kcols.size();
          move(target, Direction::read);
          counters.hold(target);
        }
        DenseMatrix s = detail::gather(work, nd.rows, kcols);
        OpCount ops;
        s = apply_qt_wy(nd.factor, std::move(s), ops);
        detail::scatter(work, nd.rows, kcols, s);
        counters.record_flops(0, ops);
        if (leaf > 0) {
          move(target, Direction::write);
          counters.release(target);
        }
        counters.release(yw + tri);
      }
      move(top_words, Direction::write);
      counters.release(top_words);
    }
    f.panels.push_back({std::move(t), c0, w});
  }
  f.r = work.block(0, 0, n, n);
  return f;
}

inline CaqrFactor caqr_sequential_factor(const DenseMatrix& a, std::size_t fast_memory) {
  CommCounters c(1, fast_memory);
  return caqr_sequential_factor(a, fast_memory, c);
}

}  // namespace caqr
