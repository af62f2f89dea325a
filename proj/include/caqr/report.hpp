#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "caqr/bounds.hpp"
#include "caqr/counters.hpp"
#include "caqr/models.hpp"

namespace caqr {

/// One instrumented run: problem, measured counts, numerics, matched model and bound.
/// Serialized as a flat JSON object; optional members are omitted when unset.
struct RunReport {
  static constexpr int kSchemaVersion = 1;

  std::string algorithm;
  std::uint64_t m = 0;
  std::uint64_t n = 0;
  std::optional<std::uint64_t> procs;
  std::optional<std::uint64_t> fast_memory;
  std::optional<std::uint64_t> pr;
  std::optional<std::uint64_t> pc;
  std::optional<std::uint64_t> b;
  std::optional<std::string> tree;
  std::optional<std::uint64_t> seed;

  // critical path for parallel runs, slow/fast traffic for sequential ones
  std::uint64_t flops = 0;
  std::uint64_t multiplies = 0;
  std::uint64_t divisions = 0;
  std::uint64_t words = 0;
  std::uint64_t messages = 0;
  std::uint64_t total_words = 0;
  std::uint64_t total_messages = 0;
  std::optional<std::uint64_t> words_read;
  std::optional<std::uint64_t> words_written;
  std::optional<std::uint64_t> high_water;

  double residual = 0;
  double orthogonality = 0;
  std::string status = "ok";

  std::optional<std::string> model;
  std::optional<double> model_flops;
  std::optional<double> model_words;
  std::optional<double> model_messages;
  std::optional<std::string> bound;
  std::optional<double> bound_words;
  std::optional<double> bound_messages;
  std::optional<double> bound_multiplies;
  std::optional<std::string> bound_note;

  std::optional<double> ratio_words_model;
  std::optional<double> ratio_messages_model;
  std::optional<double> ratio_words_bound;
  std::optional<double> ratio_messages_bound;

  bool operator==(const RunReport&) const = default;

  void set_model(const ModelReport& r) {
    model = r.label;
    model_flops = r.flops;
    model_words = r.words;
    model_messages = r.messages;
  }

  void set_bound(const std::string& name, const CommBound& c) {
    bound = name;
    bound_words = c.words;
    bound_messages = c.messages;
  }

  /// Fill the measured/model and measured/bound ratios whose denominators are positive.
  void compute_ratios() {
    auto ratio = [](double num, const std::optional<double>& den) -> std::optional<double> {
      if (den && *den > 0) return num / *den;
      return std::nullopt;
    };
    ratio_words_model = ratio(static_cast<double>(words), model_words);
    ratio_messages_model = ratio(static_cast<double>(messages), model_messages);
    ratio_words_bound = ratio(static_cast<double>(words), bound_words);
    ratio_messages_bound = ratio(static_cast<double>(messages), bound_messages);
  }
};

namespace detail {

template <class T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (auto it = j.find(key); it != j.end() && !it->is_null())
    v = it->get<T>();
  else
    v.reset();
}

}  // namespace detail

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["schema_version"] = RunReport::kSchemaVersion;
  j["algorithm"] = r.algorithm;
  j["m"] = r.m;
  j["n"] = r.n;
  detail::put(j, "procs", r.procs);
  detail::put(j, "fast_memory", r.fast_memory);
  detail::put(j, "pr", r.pr);
  detail::put(j, "pc", r.pc);
  detail::put(j, "b", r.b);
  detail::put(j, "tree", r.tree);
  detail::put(j, "seed", r.seed);
  j["flops"] = r.flops;
  j["multiplies"] = r.multiplies;
  j["divisions"] = r.divisions;
  j["words"] = r.words;
  j["messages"] = r.messages;
  j["total_words"] = r.total_words;
  j["total_messages"] = r.total_messages;
  detail::put(j, "words_read", r.words_read);
  detail::put(j, "words_written", r.words_written);
  detail::put(j, "high_water", r.high_water);
  j["residual"] = r.residual;
  j["orthogonality"] = r.orthogonality;
  j["status"] = r.status;
  detail::put(j, "model", r.model);
  detail::put(j, "model_flops", r.model_flops);
  detail::put(j, "model_words", r.model_words);
  detail::put(j, "model_messages", r.model_messages);
  detail::put(j, "bound", r.bound);
  detail::put(j, "bound_words", r.bound_words);
  detail::put(j, "bound_messages", r.bound_messages);
  detail::put(j, "bound_multiplies", r.bound_multiplies);
  detail::put(j, "bound_note", r.bound_note);
  detail::put(j, "ratio_words_model", r.ratio_words_model);
  detail::put(j, "ratio_messages_model", r.ratio_messages_model);
  detail::put(j, "ratio_words_bound", r.ratio_words_bound);
  detail::put(j, "ratio_messages_bound", r.ratio_messages_bound);
  return j;
}

inline RunReport report_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::runtime_error("report: expected a JSON object");
  if (j.value("schema_version", 0) != RunReport::kSchemaVersion)
    throw std::runtime_error("report: unsupported schema_version");
  RunReport r;
  r.algorithm = j.at("algorithm").get<std::string>();
  r.m = j.at("m").get<std::uint64_t>();
  r.n = j.at("n").get<std::uint64_t>();
  detail::get(j, "procs", r.procs);
  detail::get(j, "fast_memory", r.fast_memory);
  detail::get(j, "pr", r.pr);
  detail::get(j, "pc", r.pc);
  detail::get(j, "b", r.b);
  detail::get(j, "tree", r.tree);
  detail::get(j, "seed", r.seed);
  r.flops = j.at("flops").get<std::uint64_t>();
  r.multiplies = j.at("multiplies").get<std::uint64_t>();
  r.divisions = j.at("divisions").get<std::uint64_t>();
  r.words = j.at("words").get<std::uint64_t>();
  r.messages = j.at("messages").get<std::uint64_t>();
  r.total_words = j.at("total_words").get<std::uint64_t>();
  r.total_messages = j.at("total_messages").get<std::uint64_t>();
  detail::get(j, "words_read", r.words_read);
  detail::get(j, "words_written", r.words_written);
  detail::get(j, "high_water", r.high_water);
  r.residual = j.at("residual").get<double>();
  r.orthogonality = j.at("orthogonality").get<double>();
  r.status = j.at("status").get<std::string>();
  detail::get(j, "model", r.model);
  detail::get(j, "model_flops", r.model_flops);
  detail::get(j, "model_words", r.model_words);
  detail::get(j, "model_messages", r.model_messages);
  detail::get(j, "bound", r.bound);
  detail::get(j, "bound_words", r.bound_words);
  detail::get(j, "bound_messages", r.bound_messages);
  detail::get(j, "bound_multiplies", r.bound_multiplies);
  detail::get(j, "bound_note", r.bound_note);
  detail::get(j, "ratio_words_model", r.ratio_words_model);
  detail::get(j, "ratio_messages_model", r.ratio_messages_model);
  detail::get(j, "ratio_words_bound", r.ratio_words_bound);
  detail::get(j, "ratio_messages_bound", r.ratio_messages_bound);
  return r;
}

inline std::string dump_report(const RunReport& r) { return to_json(r).dump(2); }

inline RunReport parse_report(const std::string& text) { return report_from_json(nlohmann::json::parse(text)); }

}  // namespace caqr
