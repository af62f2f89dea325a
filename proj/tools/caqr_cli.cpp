// Command-line driver: instrumented factorizations, model rows, lower bounds and the
// stability comparison.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "caqr/baselines.hpp"
#include "caqr/bounds.hpp"
#include "caqr/caqr.hpp"
#include "caqr/counters.hpp"
#include "caqr/generate.hpp"
#include "caqr/matrix.hpp"
#include "caqr/matrix_io.hpp"
#include "caqr/models.hpp"
#include "caqr/report.hpp"
#include "caqr/tsqr.hpp"

namespace {

using namespace caqr;

constexpr int kUsageError = 1;
constexpr int kVerifyFailed = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FactorArgs {
  std::string alg;
  std::size_t m = 0, n = 0;
  std::optional<std::size_t> p, fast_mem, pr, pc, b;
  std::string tree = "binary";
  std::uint64_t seed = 1;
  std::string kind = "uniform";
  std::optional<double> kappa;
  std::string input;
  std::string json;
};

std::uint64_t ceil_log2(std::uint64_t p) {
  std::uint64_t k = 0;
  while ((std::uint64_t{1} << k) < p) ++k;
  return k;
}

template <class T>
T need(const std::optional<T>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing ") + flag);
  return *v;
}

DenseMatrix load_input(FactorArgs& a) {
  if (!a.input.empty()) {
    DenseMatrix x = read_matrix_file(a.input);
    if ((a.m && a.m != x.rows()) || (a.n && a.n != x.cols()))
      throw UsageError("--m/--n disagree with the dimensions in " + a.input);
    a.m = x.rows();
    a.n = x.cols();
    return x;
  }
  if (a.m == 0 || a.n == 0) throw UsageError("--m and --n are required without --input");
  if (a.kappa) return generate_with_condition(a.m, a.n, *a.kappa, a.seed);
  return generate(parse_matrix_kind(a.kind), a.m, a.n, a.seed);
}

void fill_counts(RunReport& r, const CommCounters& c, bool parallel) {
  const CostLedger tot = c.totals();
  const CostLedger cp = c.critical_path();
  r.total_words = tot.words;
  r.total_messages = tot.messages;
  r.multiplies = tot.multiplies;
  r.divisions = tot.divisions;
  if (parallel) {
    r.flops = cp.flops;
    r.words = cp.words;
    r.messages = cp.messages;
  } else {
    r.flops = tot.flops;
    r.words = c.words_read() + c.words_written();
    r.messages = tot.messages;
    r.total_words = r.words;
  }
}

std::optional<ModelReport> try_model(auto&& f) {
  try {
    return f();
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

void print_row(std::ostream& os, const std::string& name, double measured, const std::optional<double>& model,
               const std::optional<double>& bound) {
  auto cell = [&](const std::optional<double>& v) {
    if (v)
      os << std::setw(16) << std::setprecision(6) << *v;
    else
      os << std::setw(16) << "-";
  };
  auto ratio = [&](const std::optional<double>& v) {
    if (v && *v > 0)
      os << std::setw(10) << std::setprecision(4) << measured / *v;
    else
      os << std::setw(10) << "-";
  };
  os << std::left << std::setw(12) << name << std::right << std::setw(16) << std::setprecision(10) << measured;
  cell(model);
  ratio(model);
  cell(bound);
  ratio(bound);
  os << '\n';
}

void print_report(std::ostream& os, const RunReport& r) {
  os << r.algorithm << "  m=" << r.m << " n=" << r.n;
  if (r.procs) os << " P=" << *r.procs;
  if (r.pr) os << " Pr=" << *r.pr << " Pc=" << *r.pc << " b=" << *r.b;
  if (r.fast_memory) os << " W=" << *r.fast_memory;
  if (r.tree) os << " tree=" << *r.tree;
  os << "\n";
  os << std::left << std::setw(12) << "" << std::right << std::setw(16) << "measured" << std::setw(16)
     << (r.model ? *r.model : "model") << std::setw(10) << "ratio" << std::setw(16) << (r.bound ? *r.bound : "bound")
     << std::setw(10) << "ratio" << '\n';
  print_row(os, "flops", static_cast<double>(r.flops), r.model_flops, std::nullopt);
  print_row(os, "multiplies", static_cast<double>(r.multiplies), std::nullopt, r.bound_multiplies);
  print_row(os, "words", static_cast<double>(r.words), r.model_words, r.bound_words);
  print_row(os, "messages", static_cast<double>(r.messages), r.model_messages, r.bound_messages);
  os << std::scientific << std::setprecision(3) << "residual " << r.residual << "  orthogonality "
     << r.orthogonality << std::defaultfloat << "  status " << r.status << '\n';
  if (r.bound_note) os << "note: " << *r.bound_note << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!text.ends_with('\n')) out << '\n';
}

/// Run one factorization; fills q, r and the counters part of the report.
void run_algorithm(const FactorArgs& a, const DenseMatrix& mat, RunReport& rep, DenseMatrix& q, DenseMatrix& r) {
  const double m = static_cast<double>(a.m), n = static_cast<double>(a.n);
  rep.bound_multiplies = lb_qr_flops(m, n);
  if (a.alg == "tsqr") {
    const std::size_t p = a.p.value_or(1);
    TreeSpec spec = parse_tree_spec(a.tree);
    CommCounters c(p);
    TreeQRFactor f = tsqr_factor(mat, p, build_tree(p, spec), c);
    q = tsqr_explicit_q(f);
    r = f.r;
    rep.procs = p;
    rep.tree = to_string(spec);
    fill_counts(rep, c, true);
    if (auto mr = try_model([&] { return model_par_tsqr(m, n, static_cast<double>(p)); })) rep.set_model(*mr);
    const double depth = static_cast<double>(ceil_log2(p));
    rep.set_bound("reduction-path", {lb_reduction_edge(n) * depth, depth});
  } else if (a.alg == "tsqr-seq") {
    const std::size_t w = need(a.fast_mem, "--fast-mem");
    CommCounters c(1, w);
    TreeQRFactor f = tsqr_seq_factor(mat, w, c);
    q = tsqr_explicit_q(f);
    r = f.r;
    rep.fast_memory = w;
    fill_counts(rep, c, false);
    rep.words_read = c.words_read();
    rep.words_written = c.words_written();
    rep.high_water = c.high_water();
    if (auto mr = try_model([&] { return model_seq_tsqr(m, n, static_cast<double>(w)); })) rep.set_model(*mr);
    rep.set_bound("seq-qr", lb_seq_qr(m, n, static_cast<double>(w)));
  } else if (a.alg == "caqr") {
    BlockCyclicLayout layout;
    if (a.pr || a.pc || a.b) {
      layout = {need(a.pr, "--pr"), need(a.pc, "--pc"), need(a.b, "--b")};
    } else {
      ParCaqrGrid g = optimal_params_par_caqr_rounded(a.m, a.n, need(a.p, "--p or --pr/--pc/--b"));
      layout = {g.pr, g.pc, g.b};
    }
    const std::size_t p = layout.procs();
    CommCounters c(p);
    CaqrFactor f = caqr_parallel_factor(mat, layout, c);
    q = caqr_explicit_q(f);
    r = f.r;
    rep.procs = p;
    rep.pr = layout.pr;
    rep.pc = layout.pc;
    rep.b = layout.b;
    fill_counts(rep, c, true);
    if (auto mr = try_model([&] {
          return model_par_caqr(m, n, static_cast<double>(p), static_cast<double>(layout.b),
                                static_cast<double>(layout.pr), static_cast<double>(layout.pc));
        }))
      rep.set_model(*mr);
    rep.set_bound("par-qr", lb_par_qr(m, n, static_cast<double>(p), m * n / static_cast<double>(p)));
    rep.bound_note = "parallel bound evaluated with W = mn/P words per processor";
  } else if (a.alg == "caqr-seq") {
    const std::size_t w = need(a.fast_mem, "--fast-mem");
    CommCounters c(1, w);
    CaqrFactor f = caqr_sequential_factor(mat, w, c);
    q = caqr_explicit_q(f);
    r = f.r;
    rep.fast_memory = w;
    rep.pr = f.layout.pr;
    rep.pc = f.layout.pc;
    rep.b = f.layout.b;
    fill_counts(rep, c, false);
    rep.words_read = c.words_read();
    rep.words_written = c.words_written();
    rep.high_water = c.high_water();
    rep.set_model(model_seq_caqr(m, n, static_cast<double>(w)));
    rep.set_bound("seq-qr", lb_seq_qr(m, n, static_cast<double>(w)));
  } else {
    static const std::map<std::string, ThinQR (*)(const DenseMatrix&, CommCounters&)> kBaselines{
        {"chol", cholesky_qr}, {"cgs", cgs}, {"mgs", mgs_right_looking}, {"hh", householder_reference}};
    auto it = kBaselines.find(a.alg);
    if (it == kBaselines.end()) throw UsageError("unknown --alg " + a.alg);
    CommCounters c;
    ThinQR t = it->second(mat, c);
    q = std::move(t.q);
    r = std::move(t.r);
    rep.status = to_string(t.status);
    fill_counts(rep, c, true);
    if (a.alg == "chol") rep.set_model(model_choleskyqr_par(m, n, 1));
    if (a.alg == "cgs") rep.set_model(model_cgs_par(m, n, 1));
    if (a.alg == "mgs") rep.set_model(model_mgs_par(m, n, 1));
    if (a.alg == "hh") rep.set_model(model_pdgeqrf_1d(m, n, 1));
  }
}

int cmd_factor(FactorArgs a) {
  DenseMatrix mat = load_input(a);
  RunReport rep;
  rep.algorithm = a.alg;
  rep.m = a.m;
  rep.n = a.n;
  if (a.input.empty()) rep.seed = a.seed;
  DenseMatrix q, r;
  run_algorithm(a, mat, rep, q, r);
  const double norm_a = fro_norm(mat);
  rep.residual = norm_a > 0 ? residual(mat, q, r) / norm_a : residual(mat, q, r);
  rep.orthogonality = orthogonality_error(q);
  rep.compute_ratios();
  const double tol = 10.0 * static_cast<double>(a.m) * static_cast<double>(a.n) * machine_epsilon;
  const bool ok = rep.status == "ok" && std::isfinite(rep.residual) && rep.residual <= tol &&
                  rep.orthogonality <= tol;
  print_report(std::cout, rep);
  if (!ok) {
    std::cerr << "verification failed: residual " << rep.residual << ", orthogonality " << rep.orthogonality
              << ", tolerance " << tol << '\n';
    return kVerifyFailed;
  }
  if (!a.json.empty()) write_text(a.json, dump_report(rep));
  return 0;
}

struct ModelArgs {
  std::string row;
  double m = 0, n = 0, p = 1, w = 0, b = 1, pr = 1, pc = 1;
  std::string json;
};

nlohmann::json model_json(const ModelReport& r) {
  nlohmann::json j{{"schema_version", 1}, {"row", r.label}, {"flops", r.flops}, {"words", r.words},
                   {"messages", r.messages}};
  if (r.divisions) j["divisions"] = *r.divisions;
  return j;
}

int cmd_model(const ModelArgs& a) {
  using Fn = std::function<ModelReport()>;
  const std::map<std::string, Fn> rows{
      {"par-tsqr", [&] { return model_par_tsqr(a.m, a.n, a.p); }},
      {"pdgeqrf-1d", [&] { return model_pdgeqrf_1d(a.m, a.n, a.p); }},
      {"par-mgs", [&] { return model_mgs_par(a.m, a.n, a.p); }},
      {"par-cgs", [&] { return model_cgs_par(a.m, a.n, a.p); }},
      {"par-cholqr", [&] { return model_choleskyqr_par(a.m, a.n, a.p); }},
      {"seq-tsqr", [&] { return model_seq_tsqr(a.m, a.n, a.w); }},
      {"seq-tsqr-leading", [&] { return model_seq_tsqr_leading(a.m, a.n, a.w); }},
      {"seq-householder", [&] { return model_householder_seq(a.m, a.n, a.w); }},
      {"pfdgeqrf", [&] { return model_pfdgeqrf(a.m, a.n, a.w); }},
      {"seq-mgs", [&] { return model_mgs_seq(a.m, a.n, a.w); }},
      {"seq-cgs", [&] { return model_cgs_seq(a.m, a.n, a.w); }},
      {"seq-cholqr", [&] { return model_choleskyqr_seq(a.m, a.n, a.w); }},
      {"par-caqr", [&] { return model_par_caqr(a.m, a.n, a.p, a.b, a.pr, a.pc); }},
      {"pdgeqrf-2d", [&] { return model_pdgeqrf_2d(a.m, a.n, a.p, a.b, a.pr, a.pc); }},
      {"par-caqr-optimal", [&] { return model_par_caqr_optimal(a.m, a.n, a.p); }},
      {"pdgeqrf-optimal", [&] { return model_pdgeqrf_optimal(a.m, a.n, a.p); }},
      {"par-caqr-general", [&] { return model_par_caqr_general(a.m, a.n, a.p); }},
      {"pdgeqrf-general", [&] { return model_pdgeqrf_general(a.m, a.n, a.p); }},
      {"par-caqr-square", [&] { return model_par_caqr_square(a.n, a.p); }},
      {"pdgeqrf-square", [&] { return model_pdgeqrf_square(a.n, a.p); }},
      {"seq-caqr", [&] { return model_seq_caqr(a.m, a.n, a.w); }},
      {"seq-caqr-square", [&] { return model_seq_caqr_square(a.n, a.w); }},
      {"seq-householder-square", [&] { return model_householder_seq_square(a.n, a.w); }},
      {"seq-caqr-layout", [&] { return model_seq_caqr_layout(a.m, a.n, a.pr, a.pc); }},
  };
  nlohmann::json out;
  if (auto it = rows.find(a.row); it != rows.end()) {
    ModelReport r = it->second();
    out = model_json(r);
    std::cout << std::left << std::setw(10) << "row" << r.label << '\n'
              << std::setw(10) << "flops" << std::setprecision(10) << r.flops << '\n'
              << std::setw(10) << "words" << r.words << '\n'
              << std::setw(10) << "messages" << r.messages << '\n';
    if (r.divisions) std::cout << std::setw(10) << "divisions" << *r.divisions << '\n';
  } else if (a.row == "opt-par-caqr") {
    ParCaqrParams o = optimal_params_par_caqr(a.m, a.n, a.p);
    ParCaqrGrid g = optimal_params_par_caqr_rounded(static_cast<std::size_t>(a.m), static_cast<std::size_t>(a.n),
                                                    static_cast<std::size_t>(a.p));
    out = {{"schema_version", 1}, {"row", a.row}, {"b", o.b}, {"pr", o.pr}, {"pc", o.pc}, {"ansatz_k", o.ansatz.k},
           {"ansatz_b", o.ansatz.b}, {"rounded_b", g.b}, {"rounded_pr", g.pr}, {"rounded_pc", g.pc}};
    std::cout << "b " << o.b << "  Pr " << o.pr << "  Pc " << o.pc << "  (rounded b " << g.b << ", Pr " << g.pr
              << ", Pc " << g.pc << ")\n";
  } else if (a.row == "opt-seq-caqr") {
    SeqCaqrOptimum o = optimal_params_seq_caqr(a.m, a.n, a.w);
    SeqCaqrGrid g = optimal_params_seq_caqr_rounded(static_cast<std::size_t>(a.m), static_cast<std::size_t>(a.n),
                                                    static_cast<std::size_t>(a.w));
    out = {{"schema_version", 1}, {"row", a.row}, {"p", o.p}, {"pr", o.pr}, {"pc", o.pc},
           {"rounded_p", g.p}, {"rounded_pr", g.pr}, {"rounded_pc", g.pc}};
    std::cout << "P " << o.p << "  Pr " << o.pr << "  Pc " << o.pc << "  (rounded P " << g.p << ", Pr " << g.pr
              << ", Pc " << g.pc << ")\n";
  } else if (a.row == "rgeqr3") {
    double v = model_rgeqr3(a.m, a.n, a.w);
    out = {{"schema_version", 1}, {"row", a.row}, {"words", v}};
    std::cout << "words " << std::setprecision(10) << v << '\n';
  } else if (a.row == "rgeqr3-latency") {
    double v = model_rgeqr3_latency_panel(a.m, a.w);
    out = {{"schema_version", 1}, {"row", a.row}, {"messages", v}};
    std::cout << "messages " << std::setprecision(10) << v << '\n';
  } else {
    throw UsageError("unknown --row " + a.row);
  }
  if (!a.json.empty()) write_text(a.json, out.dump(2));
  return 0;
}

struct BoundArgs {
  std::string kind;
  double m = 0, n = 0, r = 0, p = 1, mu = 1, j = 1;
  std::optional<double> w;
  std::string json;
};

int cmd_bounds(const BoundArgs& a) {
  nlohmann::json out{{"schema_version", 1}, {"kind", a.kind}};
  auto emit = [&](const CommBound& b) {
    out["words"] = b.words;
    out["messages"] = b.messages;
    std::cout << "words " << std::setprecision(10) << b.words << "\nmessages " << b.messages << '\n';
  };
  if (a.kind == "seq-matmul") {
    emit(lb_seq_matmul(a.n, need(a.w, "--fast-mem")));
  } else if (a.kind == "par-matmul-2d") {
    emit(lb_par_matmul_2d(a.n, a.p, a.mu));
  } else if (a.kind == "rect-matmul") {
    emit(lb_rect_matmul(a.m, a.n, a.r, a.p));
  } else if (a.kind == "seq-qr") {
    emit(lb_seq_qr(a.m, a.n, need(a.w, "--fast-mem")));
  } else if (a.kind == "par-qr") {
    const double w = a.w.value_or(a.m * a.n / a.p);
    if (!a.w) {
      out["note"] = "W = mn/P";
      std::cout << "note: W = mn/P = " << w << '\n';
    }
    emit(lb_par_qr(a.m, a.n, a.p, w));
  } else if (a.kind == "par-qr-special") {
    emit(lb_par_qr_special(a.m, a.n, a.p));
  } else if (a.kind == "qr-flops") {
    const double agg = lb_qr_flops(a.m, a.n), col = lb_qr_flops_column(a.m, a.j);
    out["multiplies"] = agg;
    out["column_multiplies"] = col;
    std::cout << "multiplies " << std::setprecision(10) << agg << "\ncolumn " << a.j + 1 << " multiplies " << col
              << '\n';
  } else if (a.kind == "reduction-edge") {
    const double v = lb_reduction_edge(a.n);
    out["words"] = v;
    std::cout << "words " << v << '\n';
  } else {
    throw UsageError("unknown --kind " + a.kind);
  }
  if (!a.json.empty()) write_text(a.json, out.dump(2));
  return 0;
}

struct CompareArgs {
  std::size_t m = 500, n = 50, p = 4;
  std::string kappas = "1,1e4,1e8";
  std::uint64_t seed = 1;
  std::string csv;
  std::string json;
};

int cmd_compare(const CompareArgs& a) {
  std::vector<double> kappas;
  std::stringstream ks(a.kappas);
  for (std::string tok; std::getline(ks, tok, ',');) {
    try {
      kappas.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw UsageError("bad --kappa entry: " + tok);
    }
  }
  if (kappas.empty()) throw UsageError("--kappa list is empty");
  const double m = static_cast<double>(a.m), n = static_cast<double>(a.n), p = static_cast<double>(a.p);
  std::ostringstream csv;
  csv << "alg,kappa,ortho_err,resid,flops,words,messages,status\n";
  csv << std::setprecision(6);
  nlohmann::json rows = nlohmann::json::array();
  auto emit = [&](const std::string& alg, double kappa, double ortho, double resid, std::uint64_t flops,
                  double words, double messages, const std::string& status) {
    csv << alg << ',' << kappa << ',' << ortho << ',' << resid << ',' << flops << ',' << words << ',' << messages
        << ',' << status << '\n';
    rows.push_back({{"alg", alg}, {"kappa", kappa}, {"ortho_err", ortho}, {"resid", resid}, {"flops", flops},
                    {"words", words}, {"messages", messages}, {"status", status}});
  };
  for (double kappa : kappas) {
    DenseMatrix mat = generate_with_condition(a.m, a.n, kappa, a.seed);
    const double norm_a = fro_norm(mat);
    {
      CommCounters c(a.p);
      TreeQRFactor f = tsqr_factor(mat, a.p, build_tree(a.p, TreeShape::binary), c);
      DenseMatrix q = tsqr_explicit_q(f);
      CostLedger cp = c.critical_path();
      emit("tsqr", kappa, orthogonality_error(q), residual(mat, q, f.r) / norm_a, c.totals().flops,
           static_cast<double>(cp.words), static_cast<double>(cp.messages), "ok");
    }
    struct Base {
      const char* name;
      ThinQR (*fn)(const DenseMatrix&, CommCounters&);
      ModelReport model;
    };
    const Base bases[] = {{"hh", householder_reference, model_pdgeqrf_1d(m, n, p)},
                          {"mgs", mgs_right_looking, model_mgs_par(m, n, p)},
                          {"cgs", cgs, model_cgs_par(m, n, p)},
                          {"chol", cholesky_qr, model_choleskyqr_par(m, n, p)}};
    for (const Base& bs : bases) {
      CommCounters c;
      ThinQR t = bs.fn(mat, c);
      const bool ok = t.status == QrStatus::ok;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      emit(bs.name, kappa, ok ? orthogonality_error(t.q) : nan, ok ? residual(mat, t.q, t.r) / norm_a : nan,
           c.totals().flops, bs.model.words, bs.model.messages, to_string(t.status));
    }
  }
  if (a.csv.empty())
    std::cout << csv.str();
  else
    write_text(a.csv, csv.str());
  if (!a.json.empty())
    write_text(a.json, nlohmann::json{{"schema_version", 1}, {"m", a.m}, {"n", a.n}, {"procs", a.p}, {"rows", rows}}
                           .dump(2));
  return 0;
}

struct VerifyArgs {
  std::size_t m = 64, n = 6;
  std::uint64_t seed = 1;
  std::string json;
};

/// Every factorization path on one seeded matrix, checked against the residual and
/// orthogonality tolerance 10 m n eps.
int cmd_verify(const VerifyArgs& a) {
  DenseMatrix mat = generate(MatrixKind::uniform, a.m, a.n, a.seed);
  const double norm_a = fro_norm(mat);
  const double tol = 10.0 * static_cast<double>(a.m) * static_cast<double>(a.n) * machine_epsilon;
  nlohmann::json rows = nlohmann::json::array();
  bool all_ok = true;
  auto check = [&](const std::string& name, const DenseMatrix& q, const DenseMatrix& r) {
    const double res = residual(mat, q, r) / norm_a, orth = orthogonality_error(q);
    const bool ok = res <= tol && orth <= tol;
    all_ok = all_ok && ok;
    std::cout << std::left << std::setw(24) << name << std::right << std::scientific << std::setprecision(3)
              << std::setw(12) << res << std::setw(12) << orth << "  " << (ok ? "pass" : "FAIL") << '\n'
              << std::defaultfloat;
    rows.push_back({{"path", name}, {"residual", res}, {"orthogonality", orth}, {"pass", ok}});
  };
  auto skip = [&](const std::string& name, const std::string& why) {
    std::cout << std::left << std::setw(24) << name << "skipped: " << why << '\n';
  };
  std::cout << "tolerance " << tol << '\n';
  {
    HouseholderFactor f = qr_unblocked(mat);
    check("unblocked", explicit_q(f), f.r);
  }
  for (std::size_t b : {std::size_t{1}, std::min<std::size_t>(4, a.n), a.n}) {
    BlockedQr f = qr_blocked(mat, b);
    check("blocked b=" + std::to_string(b), explicit_q(f.factor), f.factor.r);
  }
  for (const char* tree : {"flat", "binary", "general:3"})
    for (std::size_t p : {1, 2, 4, 8}) {
      const std::string name = std::string("tsqr ") + tree + " P=" + std::to_string(p);
      if (a.m / p < a.n) {
        skip(name, "m/P < n");
        continue;
      }
      TreeQRFactor f = tsqr_factor(mat, p, build_tree(p, parse_tree_spec(tree)));
      check(name, tsqr_explicit_q(f), f.r);
    }
  for (std::size_t g : {2, 4}) {
    const std::string name = "caqr " + std::to_string(g) + "x" + std::to_string(g);
    const std::size_t b = std::max<std::size_t>(1, std::min((a.m + g - 1) / g, (a.n + g - 1) / g) / 2);
    CaqrFactor f = caqr_parallel_factor(mat, {g, g, b});
    check(name + " b=" + std::to_string(b), caqr_explicit_q(f), f.r);
  }
  {
    const std::size_t w = std::max<std::size_t>(64, a.m * a.n / 4);
    CaqrFactor f = caqr_sequential_factor(mat, w);
    check("caqr-seq W=" + std::to_string(w), caqr_explicit_q(f), f.r);
  }
  if (!a.json.empty())
    write_text(a.json, nlohmann::json{{"schema_version", 1}, {"m", a.m}, {"n", a.n}, {"tolerance", tol},
                                      {"pass", all_ok}, {"paths", rows}}
                           .dump(2));
  return all_ok ? 0 : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Communication-avoiding QR: instrumented runs, cost models and lower bounds"};
  app.require_subcommand(1);

  FactorArgs fa;
  auto* factor = app.add_subcommand("factor", "run one factorization under instrumentation");
  factor->add_option("--alg", fa.alg, "algorithm")
      ->required()
      ->check(CLI::IsMember({"tsqr", "tsqr-seq", "caqr", "caqr-seq", "chol", "cgs", "mgs", "hh"}));
  factor->add_option("--m", fa.m, "rows");
  factor->add_option("--n", fa.n, "columns");
  factor->add_option("--p", fa.p, "processors");
  factor->add_option("--fast-mem", fa.fast_mem, "fast memory words W");
  factor->add_option("--tree", fa.tree, "flat | binary | general:Q");
  factor->add_option("--pr", fa.pr, "processor grid rows");
  factor->add_option("--pc", fa.pc, "processor grid columns");
  factor->add_option("--b", fa.b, "block size");
  factor->add_option("--seed", fa.seed, "RNG seed");
  factor->add_option("--kind", fa.kind, "uniform | laplace | identity | zero");
  factor->add_option("--kappa", fa.kappa, "generate with this 2-norm condition number");
  factor->add_option("--input", fa.input, "matrix text file");
  factor->add_option("--json", fa.json, "write the report here");

  ModelArgs ma;
  auto* model = app.add_subcommand("model", "evaluate a cost-model row");
  model->add_option("--row", ma.row, "model row")->required();
  model->add_option("--m", ma.m);
  model->add_option("--n", ma.n);
  model->add_option("--p", ma.p);
  model->add_option("--fast-mem", ma.w);
  model->add_option("--b", ma.b);
  model->add_option("--pr", ma.pr);
  model->add_option("--pc", ma.pc);
  model->add_option("--json", ma.json);

  BoundArgs ba;
  auto* bounds = app.add_subcommand("bounds", "evaluate a communication or arithmetic lower bound");
  bounds->add_option("--kind", ba.kind, "bound")->required();
  bounds->add_option("--m", ba.m);
  bounds->add_option("--n", ba.n);
  bounds->add_option("--r", ba.r, "inner dimension for rect-matmul");
  bounds->add_option("--p", ba.p);
  bounds->add_option("--fast-mem", ba.w);
  bounds->add_option("--mu", ba.mu, "memory factor for par-matmul-2d");
  bounds->add_option("--j", ba.j, "column index for qr-flops");
  bounds->add_option("--json", ba.json);

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "stability and cost comparison over condition numbers");
  compare->add_option("--m", ca.m);
  compare->add_option("--n", ca.n);
  compare->add_option("--p", ca.p, "TSQR processors");
  compare->add_option("--kappa", ca.kappas, "comma-separated condition numbers");
  compare->add_option("--seed", ca.seed);
  compare->add_option("--csv", ca.csv, "write CSV here instead of stdout");
  compare->add_option("--json", ca.json);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "check every factorization path on one seeded matrix");
  verify->add_option("--m", va.m);
  verify->add_option("--n", va.n);
  verify->add_option("--seed", va.seed);
  verify->add_option("--json", va.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  try {
    if (*factor) return cmd_factor(fa);
    if (*model) return cmd_model(ma);
    if (*bounds) return cmd_bounds(ba);
    if (*compare) return cmd_compare(ca);
    if (*verify) return cmd_verify(va);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
