#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "caqr/counters.hpp"

namespace caqr {

/// Closed-form cost of one algorithm. Logarithms are base 2 throughout.
struct ModelReport {
  std::string label;
  double flops = 0;
  double words = 0;
  double messages = 0;
  std::optional<double> divisions;
};

inline double predicted_time(const ModelReport& r, const MachineParams& p) {
  return p.gamma * r.flops + p.gamma_d * r.divisions.value_or(0.0) + p.beta * r.words + p.alpha * r.messages;
}

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

inline void check_mn(double m, double n) {
  require(n >= 1 && m >= n, "model: need m >= n >= 1");
}

inline double w_tilde(double n, double w) { return w - n * (n + 1) / 2; }

}  // namespace detail

// ---- tall-skinny, parallel ----------------------------------------------------------

inline ModelReport model_par_tsqr(double m, double n, double p) {
  detail::check_mn(m, n);
  detail::require(p >= 1 && m / p >= n, "par-tsqr: need m/P >= n");
  const double lg = std::log2(p);
  return {"par-tsqr", 2 * m * n * n / p + 2 * n * n * n / 3 * lg, n * n / 2 * lg, lg, std::nullopt};
}

inline ModelReport model_pdgeqrf_1d(double m, double n, double p) {
  detail::check_mn(m, n);
  detail::require(p >= 1 && m / p >= n, "pdgeqrf-1d: need m/P >= n");
  const double lg = std::log2(p);
  return {"pdgeqrf-1d", 2 * m * n * n / p - 2 * n * n * n / (3 * p), n * n / 2 * lg, 2 * n * lg, std::nullopt};
}

inline ModelReport model_mgs_par(double m, double n, double p) {
  detail::check_mn(m, n);
  detail::require(p >= 1 && m / p >= n, "par-mgs: need m/P >= n");
  const double lg = std::log2(p);
  return {"par-mgs", 2 * m * n * n / p, n * n / 2 * lg, 2 * n * lg, std::nullopt};
}

inline ModelReport model_cgs_par(double m, double n, double p) {
  ModelReport r = model_mgs_par(m, n, p);
  r.label = "par-cgs";
  return r;
}

inline ModelReport model_choleskyqr_par(double m, double n, double p) {
  detail::check_mn(m, n);
  detail::require(p >= 1 && m / p >= n, "par-cholqr: need m/P >= n");
  const double lg = std::log2(p);
  return {"par-cholqr", 2 * m * n * n / p + n * n * n / 3, n * n / 2 * lg, lg, std::nullopt};
}

// ---- tall-skinny, sequential --------------------------------------------------------

/// Detailed row: words 2mn - n(n+1)/2 + mn^2/W~, W~ = W - n(n+1)/2.
inline ModelReport model_seq_tsqr(double m, double n, double w) {
  detail::check_mn(m, n);
  detail::require(w >= 1.5 * n * n, "seq-tsqr: need W >= 3n^2/2");
  const double wt = detail::w_tilde(n, w);
  return {"seq-tsqr", 2 * m * n * n - 2 * n * n * n / 3, 2 * m * n - n * (n + 1) / 2 + m * n * n / wt,
          2 * m * n / wt, std::nullopt};
}

/// Leading-order row: flops 2mn^2, words 2mn, messages 2mn/W~.
inline ModelReport model_seq_tsqr_leading(double m, double n, double w) {
  detail::check_mn(m, n);
  detail::require(w >= 1.5 * n * n, "seq-tsqr: need W >= 3n^2/2");
  return {"seq-tsqr-leading", 2 * m * n * n, 2 * m * n, 2 * m * n / detail::w_tilde(n, w), std::nullopt};
}

/// Blocked in-memory Householder (DGEQRF), leading order.
inline ModelReport model_householder_seq(double m, double n, double w) {
  detail::check_mn(m, n);
  detail::require(w >= 2 * m, "seq-householder: need W >= 2m");
  return {"seq-householder", 2 * m * n * n, m * m * n * n / (2 * w), m * n * n / (2 * w), std::nullopt};
}

inline ModelReport model_pfdgeqrf(double m, double n, double w) {
  detail::check_mn(m, n);
  detail::require(w >= 2 * m, "pfdgeqrf: need W >= 2m");
  return {"pfdgeqrf", 2 * m * n * n - 2 * n * n * n / 3,
          m * m * n * n / (2 * w) - m * n * n * n / (6 * w) + 1.5 * m * n - 0.75 * n * n,
          2 * m * n / w + m * n * n / (2 * w), std::nullopt};
}

inline ModelReport model_mgs_seq(double m, double n, double w) {
  detail::check_mn(m, n);
  const double wt = detail::w_tilde(n, w);
  detail::require(wt > 0, "seq-mgs: need W > n(n+1)/2");
  return {"seq-mgs", 2 * m * n * n, 1.5 * m * n + m * m * n * n / (2 * wt), 2 * m * n * n / wt, std::nullopt};
}

inline ModelReport model_cgs_seq(double m, double n, double w) {
  ModelReport r = model_mgs_seq(m, n, w);
  r.label = "seq-cgs";
  return r;
}

inline ModelReport model_choleskyqr_seq(double m, double n, double w) {
  detail::check_mn(m, n);
  detail::require(w >= 1, "seq-cholqr: need W >= 1");
  return {"seq-cholqr", 2 * m * n * n + n * n * n / 3, 3 * m * n, 6 * m * n / w, std::nullopt};
}

// ---- parallel CAQR ------------------------------------------------------------------

namespace detail {

inline void check_grid(double m, double n, double p, double b, double pr, double pc) {
  check_mn(m, n);
  require(pr >= 1 && pc >= 1 && pr <= p && pc <= p, "caqr model: need 1 <= Pr, Pc <= P");
  require(std::abs(pr * pc - p) <= 1e-9 * p, "caqr model: need Pr * Pc = P");
  require(b >= 1 && b <= m / pr && b <= n / pc, "caqr model: need 1 <= b <= min(m/Pr, n/Pc)");
}

}  // namespace detail

/// Full critical-path model on a Pr x Pc grid with b x b blocks; flops exclude divisions.
inline ModelReport model_par_caqr(double m, double n, double p, double b, double pr, double pc) {
  detail::check_grid(m, n, p, b, pr, pc);
  const double lr = std::log2(pr), lc = std::log2(pc);
  ModelReport r;
  r.label = "par-caqr";
  r.messages = 3 * n / b * lr + 2 * n / b * lc;
  r.words = (n * n / pc + b * n / 2) * lr + ((m * n - n * n / 2) / pr + 2 * n) * lc;
  r.flops = 2 * n * n * (3 * m - n) / (3 * p) + b * n * n / (2 * pc) + 3 * b * n * (2 * m - n) / (2 * pr) +
            (4 * b * b * n / 3 + n * n * (3 * b + 5) / (2 * pc)) * lr - b * b * n;
  r.divisions = (m * n - n * n / 2) / pr + b * n / 2 * (lr - 1);
  return r;
}

inline ModelReport model_pdgeqrf_2d(double m, double n, double p, double b, double pr, double pc) {
  detail::check_grid(m, n, p, b, pr, pc);
  const double lr = std::log2(pr), lc = std::log2(pc);
  ModelReport r;
  r.label = "pdgeqrf-2d";
  r.messages = 3 * n * lr + 2 * n / b * lc;
  r.words = (n * n / pc + b * n) * lr + ((m * n - n * n / 2) / pr + b * n / 2) * lc;
  r.flops = 2 * n * n * (3 * m - n) / (3 * p) + b * n * n / (2 * pc) + 3 * b * n * (2 * m - n) / (2 * pr) -
            b * b * n / (3 * pr);
  r.divisions = (m * n - n * n / 2) / pr;
  return r;
}

namespace detail {

inline double caqr_opt_words(double m, double n, double p) {
  return std::sqrt(m * n * n * n / p) * std::log2(p) -
         0.25 * std::sqrt(n * n * n * n * n / (m * p)) * std::log2(n * p / m);
}

inline void check_opt(double m, double n, double p) {
  check_mn(m, n);
  require(p >= 1, "caqr model: need P >= 1");
}

}  // namespace detail

/// Highest-order terms with b, Pr, Pc chosen optimally.
inline ModelReport model_par_caqr_optimal(double m, double n, double p) {
  detail::check_opt(m, n, p);
  const double q = m * p / n;
  return {"par-caqr-optimal", 2 * m * n * n / p - 2 * n * n * n / (3 * p), detail::caqr_opt_words(m, n, p),
          0.25 * std::sqrt(n * p / m) * std::pow(std::log2(q), 2) * std::log2(p * std::sqrt(q)), std::nullopt};
}

inline ModelReport model_pdgeqrf_optimal(double m, double n, double p) {
  detail::check_opt(m, n, p);
  const double q = m * p / n;
  return {"pdgeqrf-optimal", 2 * m * n * n / p - 2 * n * n * n / (3 * p), detail::caqr_opt_words(m, n, p),
          n / 4 * std::log2(m * std::pow(p, 5) / n) * std::log2(q) + 1.5 * n * std::log2(q), std::nullopt};
}

/// Summary rows for a general m x n matrix (flops as printed in the overview comparison).
inline ModelReport model_par_caqr_general(double m, double n, double p) {
  ModelReport r = model_par_caqr_optimal(m, n, p);
  r.label = "par-caqr-general";
  r.flops = 2 * m * n * n / p + 2 * n * n * n / 3;
  return r;
}

inline ModelReport model_pdgeqrf_general(double m, double n, double p) {
  detail::check_opt(m, n, p);
  const double q = m * p / n;
  return {"pdgeqrf-general", 2 * m * n * n / p + 2 * n * n * n / 3, detail::caqr_opt_words(m, n, p),
          n / 4 * std::log2(m * std::pow(p, 5) / n) * std::log2(q), std::nullopt};
}

inline ModelReport model_par_caqr_square(double n, double p) {
  detail::check_opt(n, n, p);
  const double lg = std::log2(p);
  return {"par-caqr-square", 4 * n * n * n / (3 * p), 3 * n * n / (4 * std::sqrt(p)) * lg,
          0.375 * std::sqrt(p) * lg * lg * lg, std::nullopt};
}

inline ModelReport model_pdgeqrf_square(double n, double p) {
  detail::check_opt(n, n, p);
  const double lg = std::log2(p);
  return {"pdgeqrf-square", 4 * n * n * n / (3 * p), 3 * n * n / (4 * std::sqrt(p)) * lg, 1.25 * n * lg * lg,
          std::nullopt};
}

// ---- sequential CAQR ----------------------------------------------------------------

inline ModelReport model_seq_caqr(double m, double n, double w) {
  detail::check_mn(m, n);
  detail::require(w >= 1, "seq-caqr: need W >= 1");
  return {"seq-caqr", 2 * m * n * n - 2 * n * n * n / 3, 3 * m * n * n / std::sqrt(w),
          12 * m * n * n / std::pow(w, 1.5), std::nullopt};
}

inline ModelReport model_seq_caqr_square(double n, double w) {
  detail::require(n >= 1 && w >= 1, "seq-caqr-square: need n, W >= 1");
  return {"seq-caqr-square", 4 * n * n * n / 3, 3 * n * n * n / std::sqrt(w), 12 * n * n * n / std::pow(w, 1.5),
          std::nullopt};
}

inline ModelReport model_householder_seq_square(double n, double w) {
  detail::require(n >= 1 && w >= 2 * n, "seq-householder-square: need W >= 2n");
  return {"seq-householder-square", 4 * n * n * n / 3, n * n * n * n / (3 * w) + 0.75 * n * n,
          n * n * n / (2 * w), std::nullopt};
}

/// Upper-bound form on an explicit Pr x Pc blocked layout.
inline ModelReport model_seq_caqr_layout(double m, double n, double pr, double pc) {
  detail::check_mn(m, n);
  detail::require(pr >= 1 && pc >= 1, "seq-caqr-layout: need Pr, Pc >= 1");
  const double p = pr * pc;
  return {"seq-caqr-layout", 2 * n * n * m - 2 * n * n * n / 3, 1.5 * m * n * (pc + 4.0 / 3) - 0.5 * n * n * pc,
          1.5 * p * (pc - 1), std::nullopt};
}

// ---- parameter choices --------------------------------------------------------------

/// Pr = K sqrt(mP/n), Pc = sqrt(nP/m)/K, b = B sqrt(mn/P).
struct TuningAnsatz {
  double k = 1;
  double b = 1;

  void validate() const {
    if (!(k > 0) || !(b > 0) || b > std::min(k, 1 / k) * (1 + 1e-12))
      throw std::invalid_argument("tuning ansatz: need K > 0 and 0 < B <= min(K, 1/K)");
  }
};

struct ParCaqrParams {
  double b = 1;
  double pr = 1;
  double pc = 1;
  TuningAnsatz ansatz;
};

/// K = 1 and B = log^-2(sqrt(mP/n)), with B capped at 1 where the logarithm is below 1.
inline ParCaqrParams optimal_params_par_caqr(double m, double n, double p) {
  detail::check_mn(m, n);
  detail::require(p >= 1, "optimal params: need P >= 1");
  ParCaqrParams r;
  const double q = m * p / n;
  const double lg = std::log2(std::sqrt(q));
  r.ansatz = {1.0, lg > 1 ? 1 / (lg * lg) : 1.0};
  r.pr = std::sqrt(q);
  r.pc = std::sqrt(n * p / m);
  r.b = r.ansatz.b * std::sqrt(m * n / p);
  return r;
}

struct ParCaqrGrid {
  std::size_t b = 1;
  std::size_t pr = 1;
  std::size_t pc = 1;
};

/// Integer grid Pr * Pc = P with Pr the divisor of P closest to the real optimum (in ratio),
/// and b rounded then clamped to [1, min(m/Pr, n/Pc)].
inline ParCaqrGrid optimal_params_par_caqr_rounded(std::size_t m, std::size_t n, std::size_t p) {
  ParCaqrParams raw = optimal_params_par_caqr(static_cast<double>(m), static_cast<double>(n),
                                              static_cast<double>(p));
  ParCaqrGrid g;
  double best = -1;
  for (std::size_t d = 1; d <= p; ++d) {
    if (p % d) continue;
    double err = std::abs(std::log(static_cast<double>(d) / raw.pr));
    if (best < 0 || err < best - 1e-12) {
      best = err;
      g.pr = d;
    }
  }
  g.pc = p / g.pr;
  const std::size_t cap = std::max<std::size_t>(1, std::min(m / g.pr, n / g.pc));
  g.b = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(raw.b)), 1, cap);
  return g;
}

struct SeqCaqrOptimum {
  double p = 1;
  double pr = 1;
  double pc = 1;
};

/// P = 4mn/W, Pr = 2m/sqrt(W), Pc = 2n/sqrt(W).
inline SeqCaqrOptimum optimal_params_seq_caqr(double m, double n, double w) {
  detail::require(w >= 1, "optimal params: need W >= 1");
  const double s = std::sqrt(w);
  return {4 * m * n / w, 2 * m / s, 2 * n / s};
}

struct SeqCaqrGrid {
  std::size_t p = 1;
  std::size_t pr = 1;
  std::size_t pc = 1;
};

/// Pr and Pc rounded up; P = Pr * Pc.
inline SeqCaqrGrid optimal_params_seq_caqr_rounded(std::size_t m, std::size_t n, std::size_t w) {
  SeqCaqrOptimum o = optimal_params_seq_caqr(static_cast<double>(m), static_cast<double>(n), static_cast<double>(w));
  SeqCaqrGrid g;
  g.pr = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(o.pr - 1e-9)));
  g.pc = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(o.pc - 1e-9)));
  g.p = g.pr * g.pc;
  return g;
}

// ---- recursive Householder ----------------------------------------------------------

/// Memory references of fully recursive QR; the mn^2/sqrt(W) forcing term has constant 1.
inline double model_rgeqr3(double m, double n, double w) {
  detail::require(n >= 1 && m >= n && w >= 1, "rgeqr3: need m >= n >= 1 and W >= 1");
  if (m * n <= w) return m * n;
  if (n <= 1) return m;
  const double n1 = std::floor(n / 2);
  return model_rgeqr3(m, n1, w) + model_rgeqr3(m - n1, n - n1, w) + m * n * n / std::sqrt(w);
}

namespace detail {

inline double rgeqr3_latency(double m, double n, double s) {
  if (n <= 1) return m / s;
  const double n1 = std::floor(n / 2);
  return rgeqr3_latency(m, n1, s) + rgeqr3_latency(m - n1, n - n1, s) + m / s;
}

}  // namespace detail

/// Messages of recursive QR on one sqrt(W)-wide panel of m rows.
inline double model_rgeqr3_latency_panel(double m, double w) {
  detail::require(w >= 1, "rgeqr3 latency: need W >= 1");
  const double s = std::sqrt(w);
  const double n = std::max(1.0, std::floor(s));
  detail::require(m >= n, "rgeqr3 latency: need m >= sqrt(W)");
  return detail::rgeqr3_latency(m, n, s);
}

}  // namespace caqr
