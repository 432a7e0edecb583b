#include "triplan/llm.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "triplan/rng.hpp"
#include "triplan/tables.hpp"

namespace triplan {

using nlohmann::json;

std::string PromptBundle::render() const {
  std::string out;
  out += "### System Message\n";
  out += system;
  out += "\n### Agent Message\n";
  out += agent;
  out += "\n### Environmental Feedback\n";
  out += feedback;
  out += "\n";
  return out;
}

std::uint64_t PromptBundle::prompt_hash() const { return fnv1a64(render()); }

LLMConfig LLMConfig::from_env() {
  LLMConfig c;
  if (const char* v = std::getenv("TRIPLAN_LLM_ENDPOINT")) c.endpoint = v;
  if (const char* v = std::getenv("TRIPLAN_LLM_API_KEY")) c.api_key = v;
  if (const char* v = std::getenv("TRIPLAN_LLM_MODEL")) c.model = v;
  if (const char* v = std::getenv("TRIPLAN_LLM_TRANSCRIPT")) c.transcript_path = v;
  return c;
}

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

Transcript Transcript::load(const std::string& path) {
  Transcript t;
  std::ifstream in(path);
  if (!in) return t;
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str());
  for (const auto& [k, v] : j.at("entries").items()) {
    t.entries_[k] = v.get<std::string>();
  }
  return t;
}

void Transcript::save(const std::string& path) const {
  json j;
  j["schema_version"] = 1;
  j["entries"] = entries_;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

const std::string& Transcript::lookup(std::uint64_t hash) const {
  auto it = entries_.find(hash_hex(hash));
  if (it == entries_.end()) throw HashMiss("no transcript entry for prompt " + hash_hex(hash));
  return it->second;
}

void Transcript::record(std::uint64_t hash, const std::string& response) {
  entries_[hash_hex(hash)] = response;
}

namespace {

// Splits http://host:port/path. Only plain http; this talks to local or
// gateway endpoints, not the open internet.
bool split_endpoint(const std::string& url, std::string& host_port, std::string& path) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) return false;
  std::string rest = url.substr(scheme.size());
  std::size_t slash = rest.find('/');
  host_port = slash == std::string::npos ? rest : rest.substr(0, slash);
  path = slash == std::string::npos ? "/" : rest.substr(slash);
  return !host_port.empty();
}

std::string live_call(const LLMConfig& config, const PromptBundle& prompt) {
  std::string host_port, path;
  if (!split_endpoint(config.endpoint, host_port, path)) {
    throw BackendUnavailable("unsupported endpoint: " + config.endpoint);
  }
  httplib::Client client(host_port);
  client.set_connection_timeout(0, config.timeout_ms * 1000);
  client.set_read_timeout(config.timeout_ms / 1000, (config.timeout_ms % 1000) * 1000);

  json body;
  body["model"] = config.model;
  body["messages"] = json::array({
      json{{"role", "system"}, {"content", prompt.system}},
      json{{"role", "user"},
           {"content", prompt.agent + "\n\n### Environmental Feedback\n" + prompt.feedback}},
  });
  body["temperature"] = 0.0;

  httplib::Headers headers;
  if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw BackendUnavailable("no response from " + config.endpoint);
  if (res->status != 200) {
    throw BackendUnavailable("endpoint returned status " + std::to_string(res->status));
  }
  try {
    json j = json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendUnavailable(std::string("malformed completion payload: ") + e.what());
  }
}

}  // namespace

std::string call_llm(const LLMConfig& config, const PromptBundle& prompt) {
  if (config.replay_only()) {
    Transcript t = Transcript::load(config.transcript_path);
    return t.lookup(prompt.prompt_hash());
  }
  if (!config.live()) throw BackendUnavailable("no endpoint configured");
  std::string response = live_call(config, prompt);
  if (!config.transcript_path.empty()) {
    Transcript t = Transcript::load(config.transcript_path);
    t.record(prompt.prompt_hash(), response);
    t.save(config.transcript_path);
  }
  return response;
}

PromptBundle render_audit_prompt(const AuditContext& ctx) {
  PromptBundle p;
  p.system =
      "You audit the plan of a household robot and repair it when it cannot "
      "proceed. Respond with one directive per line, nothing else. Directives:\n"
      "NO_CHANGE\n"
      "INSERT <index> <Kind>(<Object>)\n"
      "INSERT <index> Put(<Object>, <Receptacle>)\n"
      "REPLACE <index> <Kind>(<Object>)\n"
      "DELETE <index>\n"
      "Kinds: GoTo PickUp Put Open Close ToggleOn ToggleOff Slice Clean Heat "
      "Cool. Indices refer to the numbered plan; steps already done are "
      "immutable.";

  std::string agent = "Task: " + (ctx.task ? ctx.task->instruction_text : "") + "\nPlan:\n";
  if (ctx.plan) {
    const auto& goals = ctx.plan->goals;
    for (std::size_t i = 0; i < goals.size(); ++i) {
      const char* st = goals[i].status == SubGoalStatus::Done        ? "done"
                       : goals[i].status == SubGoalStatus::Abandoned ? "dropped"
                       : goals[i].status == SubGoalStatus::Active    ? "active"
                                                                     : "pending";
      agent += "  " + std::to_string(i) + ". [" + st + "] " + to_string(goals[i]) + "\n";
    }
  }
  p.agent = agent;

  std::string fb = "Step: " + std::to_string(ctx.step_index) + "\n";
  fb += "Trigger: " + ctx.trigger + "\n";
  fb += "Observed:";
  bool any = false;
  for (const auto& [name, count] : ctx.observed) {
    if (count <= 0) continue;
    fb += (any ? ", " : " ") + name + " x" + std::to_string(count);
    any = true;
  }
  if (!any) fb += " nothing";
  p.feedback = fb;
  return p;
}

AuditResponse parse_audit_response(const std::string& text) {
  static const std::regex edit_re(
      R"(^(INSERT|REPLACE) (\d+) ([A-Za-z]+)\(([A-Za-z]*)(?:,\s*([A-Za-z]+))?\)$)");
  static const std::regex delete_re(R"(^DELETE (\d+)$)");

  AuditResponse out;
  std::istringstream in(text);
  std::string line;
  bool saw_no_change = false;
  bool saw_any = false;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t start = line.find_first_not_of(' ');
    if (start == std::string::npos) continue;
    line = line.substr(start);
    saw_any = true;
    if (line == "NO_CHANGE") {
      saw_no_change = true;
      continue;
    }
    std::smatch m;
    if (std::regex_match(line, m, delete_re)) {
      PlanEdit e;
      e.op = PlanEdit::Op::Delete;
      e.index = std::stoi(m[1]);
      out.edits.push_back(e);
      continue;
    }
    if (std::regex_match(line, m, edit_re)) {
      auto kind = subgoal_kind_from_string(m[3]);
      if (!kind) throw ParseError("unknown sub-goal kind: " + m[3].str());
      PlanEdit e;
      e.op = m[1] == "INSERT" ? PlanEdit::Op::Insert : PlanEdit::Op::Replace;
      e.index = std::stoi(m[2]);
      e.subgoal.kind = *kind;
      e.subgoal.object = m[4];
      e.subgoal.receptacle = m[5].matched ? m[5].str() : "";
      if (*kind == SubGoalKind::Put && e.subgoal.receptacle.empty()) {
        throw ParseError("Put directive missing receptacle: " + line);
      }
      out.edits.push_back(e);
      continue;
    }
    throw ParseError("unparseable directive: " + line);
  }
  if (!saw_any) throw ParseError("empty response");
  if (saw_no_change && !out.edits.empty()) {
    throw ParseError("NO_CHANGE mixed with edits");
  }
  out.revised = !out.edits.empty();
  return out;
}

LLMAuditor::LLMAuditor(LLMConfig config, AuditorConfig rule_config)
    : config_(std::move(config)), fallback_(rule_config) {}

AuditResponse LLMAuditor::audit(const AuditContext& ctx) {
  if (config_.enabled()) {
    try {
      PromptBundle prompt = render_audit_prompt(ctx);
      std::string response = call_llm(config_, prompt);
      AuditResponse parsed = parse_audit_response(response);
      parsed.rationale = "backend";
      return parsed;
    } catch (const BackendUnavailable&) {
      ++fallback_count_;
    } catch (const HashMiss&) {
      ++fallback_count_;
    } catch (const ParseError&) {
      ++fallback_count_;
    }
  } else {
    ++fallback_count_;
  }
  return fallback_.audit(ctx);
}

PromptBundle render_host_prompt(const std::string& item_category,
                                const std::vector<std::string>& mapped_categories) {
  PromptBundle p;
  p.system =
      "You suggest where a household item is likely stored. Respond with one "
      "line: HOSTS: <Category>, <Category>, ... naming furniture categories "
      "in order of likelihood. No other text.";
  p.agent = "I am looking for: " + item_category;
  std::string fb = "Furniture mapped so far:";
  bool any = false;
  for (const std::string& c : mapped_categories) {
    fb += (any ? ", " : " ") + c;
    any = true;
  }
  if (!any) fb += " nothing";
  p.feedback = fb;
  return p;
}

std::vector<std::string> parse_host_response(const std::string& text) {
  static const std::regex host_re(R"(^\s*HOSTS:\s*([A-Za-z]+(?:\s*,\s*[A-Za-z]+)*)\s*$)");
  std::string first_line = text;
  std::size_t nl = first_line.find('\n');
  if (nl != std::string::npos) first_line = first_line.substr(0, nl);
  std::smatch m;
  if (!std::regex_match(first_line, m, host_re)) {
    throw ParseError("host response must be 'HOSTS: A, B, ...'");
  }
  std::vector<std::string> out;
  const Catalog& cat = Catalog::standard();
  std::string list = m[1];
  std::size_t pos = 0;
  while (pos < list.size()) {
    std::size_t comma = list.find(',', pos);
    std::string name = list.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
    std::size_t b = name.find_first_not_of(' ');
    std::size_t e = name.find_last_not_of(' ');
    if (b != std::string::npos) name = name.substr(b, e - b + 1);
    if (cat.contains(name)) out.push_back(name);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ParseError("no usable host categories in response");
  return out;
}

std::vector<std::string> llm_predict_hosts(const LLMConfig& config,
                                           const std::string& item_category,
                                           const std::vector<std::string>& mapped_categories,
                                           const std::vector<std::string>& excluded) {
  if (config.enabled()) {
    try {
      PromptBundle prompt = render_host_prompt(item_category, mapped_categories);
      std::vector<std::string> hosts = parse_host_response(call_llm(config, prompt));
      std::vector<std::string> out;
      for (const std::string& h : hosts) {
        bool skip = false;
        for (const std::string& x : excluded) skip = skip || x == h;
        if (!skip) out.push_back(h);
      }
      if (!out.empty()) return out;
    } catch (const BackendUnavailable&) {
    } catch (const HashMiss&) {
    } catch (const ParseError&) {
    }
  }
  std::vector<std::string> out;
  const CooccurrenceTable& table = CooccurrenceTable::builtin();
  if (!table.has(item_category)) return out;
  for (const HostEntry& h : table.hosts_for(item_category)) {
    bool skip = false;
    for (const std::string& x : excluded) skip = skip || x == h.host;
    if (!skip) out.push_back(h.host);
  }
  return out;
}

}  // namespace triplan
