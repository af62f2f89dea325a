// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "caqr/baselines.hpp"
#include "caqr/bounds.hpp"
#include "caqr/caqr.hpp"
#include "caqr/generate.hpp"
#include "caqr/householder.hpp"
#include "caqr/models.hpp"
#include "caqr/tsqr.hpp"

using namespace caqr;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& what) {
    if (!pass) detail << "; ";
    else detail.str("");
    pass = false;
    detail << what;
  }
};

const std::vector<std::pair<std::size_t, std::size_t>> kGrid{{8, 3}, {64, 6}, {128, 32}, {256, 256}, {512, 64}};

struct PathResult {
  std::string name;
  DenseMatrix q, r;
};

/// Row signs flipped so that diag(R) >= 0.
DenseMatrix positive_diag(DenseMatrix r) {
  for (std::size_t i = 0; i < std::min(r.rows(), r.cols()); ++i)
    if (r(i, i) < 0)
      for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) = -r(i, j);
  return r;
}

double max_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double d = 0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

std::string shape(std::size_t m, std::size_t n) { return std::to_string(m) + "x" + std::to_string(n); }

std::vector<PathResult> all_paths(const DenseMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<PathResult> out;
  {
    HouseholderFactor f = qr_unblocked(a);
    out.push_back({"unblocked", explicit_q(f), f.r});
  }
  for (std::size_t b : {std::size_t{1}, std::min<std::size_t>(4, n), n}) {
    BlockedQr f = qr_blocked(a, b);
    out.push_back({"blocked b=" + std::to_string(b), explicit_q(f.factor), f.factor.r});
  }
  for (const char* tree : {"flat", "binary", "general:3"})
    for (std::size_t p : {1, 2, 4, 8}) {
      if (m / p < n) continue;
      TreeQRFactor f = tsqr_factor(a, p, build_tree(p, parse_tree_spec(tree)));
      out.push_back({std::string("tsqr ") + tree + " P=" + std::to_string(p), tsqr_explicit_q(f), f.r});
    }
  for (std::size_t g : {2, 4}) {
    const std::size_t b = std::max<std::size_t>(1, std::min((m + g - 1) / g, (n + g - 1) / g) / 2);
    CaqrFactor f = caqr_parallel_factor(a, {g, g, b});
    out.push_back({"caqr " + std::to_string(g) + "x" + std::to_string(g), caqr_explicit_q(f), f.r});
  }
  {
    CaqrFactor f = caqr_sequential_factor(a, 4096);
    out.push_back({"caqr-seq", caqr_explicit_q(f), f.r});
  }
  return out;
}

std::vector<std::vector<PathResult>> g_paths;

Outcome criterion1() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::size_t checked = 0;
  for (auto [m, n] : kGrid) {
    DenseMatrix a = generate(MatrixKind::uniform, m, n, 1000 + m + n);
    const double tol = 10.0 * static_cast<double>(m * n) * machine_epsilon;
    g_paths.push_back(all_paths(a));
    for (const PathResult& p : g_paths.back()) {
      ++checked;
      const double res = residual(a, p.q, p.r) / fro_norm(a), orth = orthogonality_error(p.q);
      if (res > tol || orth > tol) o.fail(p.name + " at " + shape(m, n));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 60) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) o.detail << checked << " factorizations in " << std::fixed << std::setprecision(2) << secs << " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  std::size_t checked = 0;
  for (std::size_t k = 0; k < kGrid.size(); ++k) {
    auto [m, n] = kGrid[k];
    DenseMatrix a = generate(MatrixKind::uniform, m, n, 1000 + m + n);
    const double tol = 1e-10 * fro_norm(a);
    const DenseMatrix ref = positive_diag(householder_reference(a).r);
    std::vector<PathResult> paths = g_paths.at(k);
    paths.push_back({"chol", {}, cholesky_qr(a).r});
    paths.push_back({"cgs", {}, cgs(a).r});
    paths.push_back({"mgs", {}, mgs_right_looking(a).r});
    for (const PathResult& p : paths) {
      ++checked;
      const double d = max_diff(positive_diag(p.r), ref);
      if (!(d <= tol)) {
        std::ostringstream s;
        s << p.name << " at " << shape(m, n) << " differs by " << d;
        o.fail(s.str());
      }
    }
  }
  if (o.pass) o.detail << checked << " R factors match";
  return o;
}

struct TsqrRun {
  std::size_t m, n, p;
  CommCounters counters;
};

std::vector<TsqrRun> g_tsqr_runs;

Outcome criterion3() {
  Outcome o;
  for (std::size_t p : {2, 4, 8, 16})
    for (std::size_t n : {4, 8}) {
      const std::size_t m = 16 * p;
      const std::uint64_t lg = static_cast<std::uint64_t>(std::log2(p)), tri = n * (n + 1) / 2;
      CommCounters c(p);
      tsqr_factor(generate(MatrixKind::uniform, m, n, p + n), p, build_tree(p, TreeShape::binary), c);
      const CostLedger cp = c.critical_path();
      const std::string at = "P=" + std::to_string(p) + " n=" + std::to_string(n);
      if (cp.messages != lg) o.fail(at + ": messages " + std::to_string(cp.messages));
      if (cp.words != tri * lg) o.fail(at + ": words " + std::to_string(cp.words));
      for (const MessageRecord& msg : c.message_log())
        if (msg.words != tri) o.fail(at + ": edge payload " + std::to_string(msg.words));
      g_tsqr_runs.push_back({m, n, p, std::move(c)});
    }
  if (o.pass) o.detail << "messages = log2 P, payload n(n+1)/2, words n(n+1)/2 log2 P on 8 runs";
  return o;
}

struct SeqRun {
  std::string name;
  std::size_t m, n, w;
  CommCounters counters;
};

std::vector<SeqRun> g_seq_runs;

Outcome criterion4() {
  Outcome o;
  const std::size_t m = 4096, n = 32, w = 4096;
  CommCounters c(1, w);
  tsqr_seq_factor(generate(MatrixKind::uniform, m, n, 4), w, c);
  const double measured = static_cast<double>(c.words_read() + c.words_written());
  const double model = model_seq_tsqr(m, n, w).words;
  if (std::abs(measured / model - 1) > 0.10) o.fail("words ratio " + std::to_string(measured / model));
  if (c.words_read() != m * n) o.fail("read " + std::to_string(c.words_read()) + " words");
  if (c.max_transfer() > w) o.fail("transfer of " + std::to_string(c.max_transfer()) + " words");
  if (o.pass)
    o.detail << "words " << measured << " vs model " << std::setprecision(7) << model << " (ratio "
             << std::setprecision(4) << measured / model << "), read mn, largest transfer " << c.max_transfer();
  g_seq_runs.push_back({"seq tsqr", m, n, w, std::move(c)});
  return o;
}

Outcome criterion5() {
  Outcome o;
  const std::size_t m = 256, n = 256, w = 4096;
  CommCounters c(1, w);
  DenseMatrix a = generate(MatrixKind::uniform, m, n, 5);
  CaqrFactor f = caqr_sequential_factor(a, w, c);
  const double words = static_cast<double>(c.words_read() + c.words_written());
  const double messages = static_cast<double>(c.totals().messages);
  const CommBound lb = lb_seq_qr(m, n, w);
  const double wd = static_cast<double>(w), word_cap = 1.25 * 3 * m * n * n / std::sqrt(wd),
               msg_cap = 1.5 * 12 * m * n * n / std::pow(wd, 1.5);
  if (words < lb.words || words > word_cap) o.fail("words " + std::to_string(words));
  if (messages < lb.messages || messages > msg_cap) o.fail("messages " + std::to_string(messages));
  const double tol = 10.0 * m * n * machine_epsilon;
  DenseMatrix q = caqr_explicit_q(f);
  if (residual(a, q, f.r) / fro_norm(a) > tol || orthogonality_error(q) > tol) o.fail("reconstruction");
  if (o.pass)
    o.detail << "words " << words << " in [" << std::setprecision(6) << lb.words << ", " << word_cap
             << "], messages " << messages << " in [" << lb.messages << ", " << msg_cap << "]";
  g_seq_runs.push_back({"seq caqr", m, n, w, std::move(c)});
  return o;
}

struct ParRun {
  std::size_t b;
  CommCounters counters;
};

std::vector<ParRun> g_par_runs;

Outcome criterion6() {
  Outcome o;
  const std::size_t m = 64, n = 64;
  DenseMatrix a = generate(MatrixKind::uniform, m, n, 6);
  for (std::size_t b : {1, 8}) {
    CommCounters c(16);
    caqr_parallel_factor(a, {4, 4, b}, c);
    g_par_runs.push_back({b, std::move(c)});
  }
  const double b1 = static_cast<double>(g_par_runs[0].counters.critical_path().messages);
  const double b8 = static_cast<double>(g_par_runs[1].counters.critical_path().messages);
  const double model = model_par_caqr(m, n, 16, 8, 4, 4).messages;
  if (b8 > 0.5 * b1) o.fail("b=8 sends " + std::to_string(b8) + " against " + std::to_string(b1) + " at b=1");
  if (std::abs(b8 / model - 1) > 0.25) o.fail("model ratio " + std::to_string(b8 / model));
  if (o.pass) o.detail << "b=8 " << b8 << " messages, b=1 " << b1 << ", model " << model;
  return o;
}

Outcome criterion7() {
  struct Row {
    std::string label;
    std::function<ModelReport()> eval;
    double flops, words, messages;
  };
  const std::vector<Row> rows{
      // 2mn^2/P + (2n^3/3) log P; words (n^2/2) log P; messages log P
      {"par-tsqr a", [] { return model_par_tsqr(1024, 8, 4); }, 33450.0 + 2.0 / 3, 64, 2},
      {"par-tsqr b", [] { return model_par_tsqr(4096, 16, 16); }, 141994.0 + 2.0 / 3, 512, 4},
      // 32768 - 2*512/12; 2*8*2 messages
      {"pdgeqrf-1d a", [] { return model_pdgeqrf_1d(1024, 8, 4); }, 32768 - 1024.0 / 12, 64, 32},
      {"pdgeqrf-1d b", [] { return model_pdgeqrf_1d(4096, 16, 16); }, 131072 - 8192.0 / 48, 512, 128},
      // 2*2048*1024/8; words 512*3; messages 2*32*3
      {"par-mgs a", [] { return model_mgs_par(1024, 8, 4); }, 32768, 64, 32},
      {"par-mgs b", [] { return model_mgs_par(2048, 32, 8); }, 524288, 1536, 192},
      {"par-cgs a", [] { return model_cgs_par(1024, 8, 4); }, 32768, 64, 32},
      {"par-cgs b", [] { return model_cgs_par(2048, 32, 8); }, 524288, 1536, 192},
      // 625000 + 125000/3; words 1250*2
      {"par-cholqr a", [] { return model_choleskyqr_par(500, 50, 4); }, 666666.0 + 2.0 / 3, 2500, 2},
      {"par-cholqr b", [] { return model_choleskyqr_par(1024, 8, 1); }, 131072 + 512.0 / 3, 0, 0},
      // W~ = W - n(n+1)/2
      {"seq-tsqr a", [] { return model_seq_tsqr(1000, 10, 3000); }, 200000 - 2000.0 / 3, 19945 + 100000.0 / 2945,
       20000.0 / 2945},
      {"seq-tsqr b", [] { return model_seq_tsqr(4096, 32, 4096); }, 8388608 - 65536.0 / 3,
       261616 + 4194304.0 / 3568, 262144.0 / 3568},
      {"seq-householder a", [] { return model_householder_seq(1000, 10, 3000); }, 200000, 1e8 / 6000, 1e5 / 6000},
      {"seq-householder b", [] { return model_householder_seq(4096, 32, 16384); }, 8388608, 524288, 128},
      {"pfdgeqrf a", [] { return model_pfdgeqrf(1000, 10, 3000); }, 200000 - 2000.0 / 3, 31536.111111111113,
       23.0 + 1.0 / 3},
      {"pfdgeqrf b", [] { return model_pfdgeqrf(4096, 32, 16384); }, 8388608 - 65536.0 / 3, 718762.0 + 2.0 / 3,
       144},
      {"seq-mgs a", [] { return model_mgs_seq(1000, 10, 3000); }, 200000, 31977.92869269949, 67.91171477079796},
      {"seq-mgs b", [] { return model_mgs_seq(2048, 16, 4096); }, 1048576, 184725.46262626263, 264.7919191919192},
      {"seq-cholqr a", [] { return model_choleskyqr_seq(1000, 10, 3000); }, 200000 + 1000.0 / 3, 30000, 20},
      {"seq-cholqr b", [] { return model_choleskyqr_seq(500, 50, 10000); }, 2500000 + 125000.0 / 3, 75000, 15},
      // m=n=64, P=16, b=4, Pr=Pc=4: (3n/b) log Pr + (2n/b) log Pc messages
      {"par-caqr a", [] { return model_par_caqr(64, 64, 16, 4, 4, 4); }, 49152, 3584, 160},
      {"par-caqr b", [] { return model_par_caqr(1024, 256, 16, 8, 8, 2); }, 9983317.0 + 1.0 / 3, 130560, 352},
      {"pdgeqrf-2d a", [] { return model_pdgeqrf_2d(64, 64, 16, 4, 4, 4); }, 29952, 3840, 448},
      {"pdgeqrf-2d b", [] { return model_pdgeqrf_2d(1024, 256, 16, 8, 8, 2); }, 8508074.0 + 2.0 / 3, 134144, 2368},
      {"par-caqr-optimal a", [] { return model_par_caqr_optimal(64, 64, 16); }, 21845.0 + 1.0 / 3, 3072, 96},
      {"par-caqr-optimal b", [] { return model_par_caqr_optimal(4096, 256, 64); }, 8388608 - 33554432.0 / 192,
       195584, 550},
      {"pdgeqrf-optimal a", [] { return model_pdgeqrf_optimal(64, 64, 16); }, 21845.0 + 1.0 / 3, 3072, 1664},
      {"pdgeqrf-optimal b", [] { return model_pdgeqrf_optimal(4096, 256, 64); }, 8388608 - 33554432.0 / 192,
       195584, 25600},
      {"par-caqr-general a", [] { return model_par_caqr_general(64, 64, 16); }, 32768 + 524288.0 / 3, 3072, 96},
      {"par-caqr-general b", [] { return model_par_caqr_general(4096, 256, 64); }, 8388608 + 33554432.0 / 3,
       195584, 550},
      {"pdgeqrf-general a", [] { return model_pdgeqrf_general(64, 64, 16); }, 32768 + 524288.0 / 3, 3072, 1280},
      {"pdgeqrf-general b", [] { return model_pdgeqrf_general(4096, 256, 64); }, 8388608 + 33554432.0 / 3, 195584,
       21760},
      {"par-caqr-square a", [] { return model_par_caqr_square(64, 16); }, 21845.0 + 1.0 / 3, 3072, 96},
      {"par-caqr-square b", [] { return model_par_caqr_square(1024, 64); }, 22369621.333333332, 589824, 648},
      {"pdgeqrf-square a", [] { return model_pdgeqrf_square(64, 16); }, 21845.0 + 1.0 / 3, 3072, 1280},
      {"pdgeqrf-square b", [] { return model_pdgeqrf_square(1024, 64); }, 22369621.333333332, 589824, 46080},
      // 3mn^2/sqrt W; 12mn^2/W^1.5
      {"seq-caqr a", [] { return model_seq_caqr(256, 256, 4096); }, 22369621.333333332, 786432, 768},
      {"seq-caqr b", [] { return model_seq_caqr(512, 128, 16384); }, 16777216 - 4194304.0 / 3, 196608, 48},
      {"seq-householder-square a", [] { return model_householder_seq_square(256, 4096); }, 22369621.333333332,
       398677.3333333333, 2048},
      {"seq-householder-square b", [] { return model_householder_seq_square(100, 1000); }, 4e6 / 3,
       1e8 / 3000 + 7500, 500},
  };
  Outcome o;
  for (const Row& r : rows) {
    ModelReport got = r.eval();
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y)); };
    if (!close(got.flops, r.flops) || !close(got.words, r.words) || !close(got.messages, r.messages))
      o.fail(r.label);
  }
  if (o.pass) o.detail << rows.size() << " row evaluations match hand substitutions";
  return o;
}

Outcome criterion8() {
  Outcome o;
  for (std::size_t n : {64, 1024, 4096}) {
    ParCaqrGrid g = optimal_params_par_caqr_rounded(n, n, 16);
    if (g.pr != 4 || g.pc != 4) o.fail("m=n=" + std::to_string(n) + " gives " + std::to_string(g.pr) + "x" +
                                       std::to_string(g.pc));
  }
  SeqCaqrGrid s = optimal_params_seq_caqr_rounded(256, 256, 4096);
  if (s.p != 64 || s.pr != 8 || s.pc != 8)
    o.fail("sequential gives P=" + std::to_string(s.p) + " " + std::to_string(s.pr) + "x" + std::to_string(s.pc));
  if (o.pass) o.detail << "P=16 -> 4x4; W=4096 -> P=64, 8x8";
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::size_t runs = 0;
  auto check = [&](const std::string& name, double words, double bound_words, std::uint64_t mults, double m,
                   double n) {
    ++runs;
    if (words < bound_words) o.fail(name + ": words " + std::to_string(words) + " < " + std::to_string(bound_words));
    if (static_cast<double>(mults) < lb_qr_flops(m, n)) o.fail(name + ": multiplies below bound");
  };
  for (const TsqrRun& r : g_tsqr_runs) {
    const double depth = std::log2(static_cast<double>(r.p));
    check("tsqr P=" + std::to_string(r.p), static_cast<double>(r.counters.critical_path().words),
          lb_reduction_edge(r.n) * depth, r.counters.totals().multiplies, r.m, r.n);
  }
  for (const SeqRun& r : g_seq_runs)
    check(r.name, static_cast<double>(r.counters.words_read() + r.counters.words_written()),
          lb_seq_qr(r.m, r.n, r.w).words, r.counters.totals().multiplies, r.m, r.n);
  for (const ParRun& r : g_par_runs)
    check("caqr b=" + std::to_string(r.b), static_cast<double>(r.counters.critical_path().words),
          lb_par_qr(64, 64, 16, 64.0 * 64 / 16).words, r.counters.totals().multiplies, 64, 64);
  if (o.pass) o.detail << runs << " runs, no violations";
  return o;
}

Outcome criterion10() {
  Outcome o;
  const std::size_t m = 500, n = 50;
  auto ortho = [](const ThinQR& t) {
    return t.status == QrStatus::ok ? orthogonality_error(t.q) : std::numeric_limits<double>::infinity();
  };
  for (double kappa : {1.0, 1e8}) {
    DenseMatrix a = generate_with_condition(m, n, kappa, 10);
    const double tsqr = orthogonality_error(tsqr_explicit_q(tsqr_factor(a, 4, build_tree(4, TreeShape::binary))));
    const ThinQR mgs = mgs_right_looking(a), chol = cholesky_qr(a), cg = cgs(a), hh = householder_reference(a);
    std::ostringstream s;
    s << std::setprecision(3) << "kappa " << kappa << ": tsqr " << tsqr << " mgs " << ortho(mgs) << " chol "
      << ortho(chol) << (chol.status == QrStatus::ok ? "" : " (breakdown)");
    if (kappa == 1.0) {
      for (double e : {tsqr, ortho(mgs), ortho(chol), ortho(cg), ortho(hh)})
        if (!(e <= 1e-12)) o.fail(s.str());
    } else {
      if (!(tsqr <= 1e-12)) o.fail("tsqr " + s.str());
      if (!(ortho(mgs) <= ortho(chol))) o.fail("mgs above chol " + s.str());
      if (chol.status == QrStatus::ok && ortho(chol) < 1e-2) o.fail("chol too accurate " + s.str());
    }
    if (o.pass) o.detail << (kappa == 1.0 ? "" : "; ") << s.str();
  }
  return o;
}

Outcome criterion11() {
  Outcome o;
  for (std::size_t n : {4, 8}) {
    DenseMatrix a = generate(MatrixKind::uniform, n, n, 10 + n), b = generate(MatrixKind::uniform, n, n, 20 + n);
    GemmViaLu r = gemm_via_lu_check(a, b);
    const double tol = 1e-13 * fro_norm(a) * fro_norm(b);
    if (!(r.residual <= tol)) o.fail(std::to_string(n) + "x" + std::to_string(n) + " residual");
    if (o.pass) o.detail << (n == 4 ? "" : ", ") << n << "x" << n << " residual " << std::setprecision(3) << r.residual;
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"numerical correctness suite", criterion1},
      {"R agrees with the Householder reference", criterion2},
      {"exact binary-tree TSQR communication", criterion3},
      {"sequential TSQR word traffic", criterion4},
      {"sequential CAQR within model and bound", criterion5},
      {"parallel CAQR message reduction", criterion6},
      {"model rows match hand substitutions", criterion7},
      {"optimal grid parameters", criterion8},
      {"measured cost dominates lower bounds", criterion9},
      {"stability separation", criterion10},
      {"GEMM through LU", criterion11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.str().c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
