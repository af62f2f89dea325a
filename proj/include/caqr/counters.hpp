#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace caqr {

/// Arithmetic done by one kernel call. `flops` counts additions and multiplications;
/// `multiplies` is the multiplication share of it; divisions are kept apart.
struct OpCount {
  std::uint64_t flops = 0;
  std::uint64_t multiplies = 0;
  std::uint64_t divisions = 0;

  OpCount& operator+=(const OpCount& o) {
    flops += o.flops;
    multiplies += o.multiplies;
    divisions += o.divisions;
    return *this;
  }
  friend bool operator==(const OpCount&, const OpCount&) = default;
};

struct CostLedger {
  std::uint64_t flops = 0;
  std::uint64_t multiplies = 0;
  std::uint64_t divisions = 0;
  std::uint64_t words = 0;
  std::uint64_t messages = 0;

  CostLedger& operator+=(const CostLedger& o) {
    flops += o.flops;
    multiplies += o.multiplies;
    divisions += o.divisions;
    words += o.words;
    messages += o.messages;
    return *this;
  }
  friend bool operator==(const CostLedger&, const CostLedger&) = default;
};

inline CostLedger componentwise_max(const CostLedger& a, const CostLedger& b) {
  return {std::max(a.flops, b.flops), std::max(a.multiplies, b.multiplies),
          std::max(a.divisions, b.divisions), std::max(a.words, b.words),
          std::max(a.messages, b.messages)};
}

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MessageRecord {
  std::size_t from = 0;
  std::size_t to = 0;
  std::uint64_t words = 0;
};

enum class Direction { read, write };

/**
 * Cost ledger for one run.
 *
 * Parallel runs use send(): per-processor ledgers count each message at both ends,
 * the edge totals count it once, and the critical path is tracked with one clock per
 * processor. A message is a rendezvous: both endpoints leave with the componentwise
 * max of their clocks plus the message.
 *
 * Sequential runs construct the ledger with a fast-memory capacity and use
 * record_transfer() together with the hold()/release() residency gauge.
 */
class CommCounters {
 public:
  explicit CommCounters(std::size_t procs = 1, std::optional<std::uint64_t> fast_memory = {})
      : per_proc_(procs), clock_(procs), capacity_(fast_memory) {
    if (procs == 0) throw std::invalid_argument("counters need at least one processor");
    if (capacity_ && *capacity_ == 0) throw std::invalid_argument("fast memory must be >= 1 word");
  }

  std::size_t procs() const noexcept { return per_proc_.size(); }
  std::optional<std::uint64_t> fast_memory() const noexcept { return capacity_; }

  void record_flops(std::size_t proc, const OpCount& ops) {
    check_proc(proc);
    for (CostLedger* l : {&per_proc_[proc], &clock_[proc]}) {
      l->flops += ops.flops;
      l->multiplies += ops.multiplies;
      l->divisions += ops.divisions;
    }
    totals_.flops += ops.flops;
    totals_.multiplies += ops.multiplies;
    totals_.divisions += ops.divisions;
  }

  void record_flops(std::size_t proc, std::uint64_t flops) { record_flops(proc, OpCount{flops, 0, 0}); }

  /// Point-to-point message between two processors.
  void send(std::size_t from, std::size_t to, std::uint64_t words) {
    check_proc(from);
    check_proc(to);
    if (from == to) return;
    for (std::size_t p : {from, to}) {
      per_proc_[p].words += words;
      per_proc_[p].messages += 1;
    }
    CostLedger t = componentwise_max(clock_[from], clock_[to]);
    t.words += words;
    t.messages += 1;
    clock_[from] = t;
    clock_[to] = t;
    totals_.words += words;
    totals_.messages += 1;
    log_.push_back({from, to, words});
  }

  /// One-sided message charged to a single processor.
  void record_message(std::size_t proc, std::uint64_t words) {
    check_proc(proc);
    for (CostLedger* l : {&per_proc_[proc], &clock_[proc], &totals_}) {
      l->words += words;
      l->messages += 1;
    }
    log_.push_back({proc, proc, words});
  }

  /// Slow <-> fast memory transfer on a sequential machine; one transfer is one message.
  void record_transfer(std::uint64_t words, Direction dir = Direction::read) {
    if (capacity_ && words > *capacity_)
      throw CapacityError("transfer of " + std::to_string(words) + " words exceeds fast memory of " +
                          std::to_string(*capacity_));
    record_message(0, words);
    (dir == Direction::read ? words_read_ : words_written_) += words;
    max_transfer_ = std::max(max_transfer_, words);
  }

  /// Residency gauge for fast memory.
  void hold(std::uint64_t words) {
    resident_ += words;
    high_water_ = std::max(high_water_, resident_);
    if (capacity_ && resident_ > *capacity_)
      throw CapacityError("fast memory residency " + std::to_string(resident_) + " exceeds " +
                          std::to_string(*capacity_));
  }
  void release(std::uint64_t words) {
    if (words > resident_) throw std::logic_error("releasing more words than resident");
    resident_ -= words;
  }

  /// Edge traffic: each message counted once; flops summed over processors.
  const CostLedger& totals() const noexcept { return totals_; }
  const CostLedger& processor(std::size_t p) const { return per_proc_.at(p); }

  CostLedger critical_path() const {
    CostLedger c;
    for (const auto& l : clock_) c = componentwise_max(c, l);
    return c;
  }

  /// Sum over processors of the per-processor ledgers (sends and receives both counted).
  CostLedger processor_sum() const {
    CostLedger s;
    for (const auto& l : per_proc_) s += l;
    return s;
  }

  const std::vector<MessageRecord>& message_log() const noexcept { return log_; }
  std::uint64_t words_read() const noexcept { return words_read_; }
  std::uint64_t words_written() const noexcept { return words_written_; }
  std::uint64_t max_transfer() const noexcept { return max_transfer_; }
  std::uint64_t resident() const noexcept { return resident_; }
  std::uint64_t high_water() const noexcept { return high_water_; }

 private:
  void check_proc(std::size_t p) const {
    if (p >= per_proc_.size()) throw std::out_of_range("processor id out of range");
  }

  std::vector<CostLedger> per_proc_;
  std::vector<CostLedger> clock_;
  CostLedger totals_;
  std::vector<MessageRecord> log_;
  std::optional<std::uint64_t> capacity_;
  std::uint64_t words_read_ = 0;
  std::uint64_t words_written_ = 0;
  std::uint64_t max_transfer_ = 0;
  std::uint64_t resident_ = 0;
  std::uint64_t high_water_ = 0;
};

/// Binomial-tree broadcast from group[0] to the rest of the group.
inline void broadcast(CommCounters& c, const std::vector<std::size_t>& group, std::uint64_t words) {
  for (std::size_t span = 1; span < group.size(); span *= 2)
    for (std::size_t i = 0; i < span && i + span < group.size(); ++i)
      c.send(group[i], group[i + span], words);
}

struct MachineParams {
  double alpha = 1.0;    // seconds per message
  double beta = 1.0;     // seconds per word
  double gamma = 1.0;    // seconds per flop
  double gamma_d = 1.0;  // seconds per division
  double fast_memory_words = 1.0;
  double procs = 1.0;

  void validate() const {
    if (!(alpha > 0 && beta > 0 && gamma > 0 && gamma_d > 0 && procs > 0 && fast_memory_words >= 1))
      throw std::invalid_argument("machine parameters must be positive, W >= 1");
  }
};

inline double predicted_time(const CostLedger& l, const MachineParams& p) {
  return p.gamma * static_cast<double>(l.flops) + p.gamma_d * static_cast<double>(l.divisions) +
         p.beta * static_cast<double>(l.words) + p.alpha * static_cast<double>(l.messages);
}

}  // namespace caqr
