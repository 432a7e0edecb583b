#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "triplan/planner.hpp"

namespace triplan {

// Three-part prompt: a fixed role/contract section, the agent's own account
// of task and plan, and the latest environmental feedback.
struct PromptBundle {
  std::string system;
  std::string agent;
  std::string feedback;

  std::string render() const;     // canonical concatenation, stable across runs
  std::uint64_t prompt_hash() const;  // FNV-1a of render(); replay key
};

struct LLMConfig {
  std::string endpoint;  // http://host:port/path; empty disables live calls
  std::string api_key;
  std::string model = "local-planner";
  std::string transcript_path;  // replay (and live recording) store
  int timeout_ms = 10000;

  // TRIPLAN_LLM_ENDPOINT / TRIPLAN_LLM_API_KEY / TRIPLAN_LLM_MODEL /
  // TRIPLAN_LLM_TRANSCRIPT
  static LLMConfig from_env();

  bool live() const { return !endpoint.empty(); }
  bool replay_only() const { return endpoint.empty() && !transcript_path.empty(); }
  bool enabled() const { return live() || replay_only(); }
};

struct BackendUnavailable : std::runtime_error {
  explicit BackendUnavailable(const std::string& what) : std::runtime_error(what) {}
};
struct HashMiss : std::runtime_error {
  explicit HashMiss(const std::string& what) : std::runtime_error(what) {}
};
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Prompt-hash -> response store for deterministic replay.
class Transcript {
 public:
  static Transcript load(const std::string& path);  // missing file -> empty
  void save(const std::string& path) const;

  const std::string& lookup(std::uint64_t hash) const;  // throws HashMiss
  void record(std::uint64_t hash, const std::string& response);
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::string> entries_;  // hex hash -> response text
};

// One round trip. Live mode posts an OpenAI-style chat request; replay mode
// looks the prompt up in the transcript. Live failures throw
// BackendUnavailable; replay misses throw HashMiss. With both endpoint and
// transcript configured, live responses are recorded write-through.
std::string call_llm(const LLMConfig& config, const PromptBundle& prompt);

// ---- plan auditing ----

PromptBundle render_audit_prompt(const AuditContext& ctx);

// Strict response grammar, one directive per line:
//   NO_CHANGE
//   INSERT <index> <Kind>(<Object>)          e.g. INSERT 2 Open(Fridge)
//   INSERT <index> Put(<Object>, <Receptacle>)
//   REPLACE <index> <Kind>(...)
//   DELETE <index>
// Anything else throws ParseError.
AuditResponse parse_audit_response(const std::string& text);

// Auditor that consults the configured backend and falls back to the rule
// auditor on any backend or parse failure.
class LLMAuditor : public Auditor {
 public:
  LLMAuditor(LLMConfig config, AuditorConfig rule_config = {});
  AuditResponse audit(const AuditContext& ctx) override;

  int fallback_count() const { return fallback_count_; }

 private:
  LLMConfig config_;
  RuleAuditor fallback_;
  int fallback_count_ = 0;
};

// ---- host prediction for search ----

PromptBundle render_host_prompt(const std::string& item_category,
                                const std::vector<std::string>& mapped_categories);

// "HOSTS: A, B, C" -> ranked category names (unknown names dropped; an empty
// result after filtering throws ParseError).
std::vector<std::string> parse_host_response(const std::string& text);

// Ranked hosts for the search queue; cooccurrence table on any failure.
std::vector<std::string> llm_predict_hosts(const LLMConfig& config,
                                           const std::string& item_category,
                                           const std::vector<std::string>& mapped_categories,
                                           const std::vector<std::string>& excluded);

}  // namespace triplan
