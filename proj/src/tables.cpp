#include "triplan/tables.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace triplan {

using nlohmann::json;

namespace {

std::vector<std::string> camel_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isupper(static_cast<unsigned char>(c)) && !cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
    cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void sort_hosts(std::vector<HostEntry>& hosts) {
  std::sort(hosts.begin(), hosts.end(), [](const HostEntry& a, const HostEntry& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.host < b.host;
  });
}

}  // namespace

bool SynonymTable::related(const std::string& a, const std::string& b) const {
  for (const auto& [x, y] : pairs) {
    if ((x == a && y == b) || (x == b && y == a)) return true;
  }
  return false;
}

const SynonymTable& SynonymTable::builtin() {
  static const SynonymTable t = [] {
    SynonymTable s;
    s.pairs = {
        {"Cup", "Mug"},
        {"TrashBin", "GarbageCan"},
        {"TrashCan", "GarbageCan"},
        {"Couch", "Sofa"},
        {"TVRemote", "RemoteControl"},
        {"Remote", "RemoteControl"},
        {"Phone", "CellPhone"},
        {"MobilePhone", "CellPhone"},
        {"Lamp", "FloorLamp"},
        {"Table", "DiningTable"},
        {"Sponge", "DishSponge"},
        {"Notebook", "Book"},
    };
    return s;
  }();
  return t;
}

SynonymTable SynonymTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open synonym table: " + path);
  json j = json::parse(in);
  SynonymTable t;
  t.version = j.at("version").get<int>();
  for (const auto& row : j.at("pairs")) {
    t.pairs.emplace_back(row.at(0).get<std::string>(), row.at(1).get<std::string>());
  }
  return t;
}

std::string SynonymTable::to_json() const {
  json j;
  j["version"] = version;
  json rows = json::array();
  for (const auto& [a, b] : pairs) rows.push_back(json::array({a, b}));
  j["pairs"] = rows;
  return j.dump(2) + "\n";
}

const std::vector<HostEntry>& CooccurrenceTable::hosts_for(const std::string& category) const {
  auto it = entries.find(category);
  if (it == entries.end()) throw NoHostKnown(category);
  return it->second;
}

const CooccurrenceTable& CooccurrenceTable::builtin() {
  static const CooccurrenceTable t = [] {
    CooccurrenceTable c;
    auto add = [&](const std::string& item, std::vector<HostEntry> hosts) {
      sort_hosts(hosts);
      c.entries[item] = std::move(hosts);
    };
    add("Mug", {{"Cabinet", 0.5}, {"CounterTop", 0.3}, {"Shelf", 0.2}});
    add("Cup", {{"Cabinet", 0.5}, {"CounterTop", 0.3}, {"Shelf", 0.2}});
    add("Plate", {{"Cabinet", 0.55}, {"CounterTop", 0.3}, {"DiningTable", 0.15}});
    add("Bowl", {{"Cabinet", 0.5}, {"CounterTop", 0.3}, {"Shelf", 0.2}});
    add("Pan", {{"Cabinet", 0.45}, {"CounterTop", 0.35}, {"Sink", 0.2}});
    add("Pot", {{"Cabinet", 0.45}, {"CounterTop", 0.35}, {"Sink", 0.2}});
    add("Knife", {{"Drawer", 0.6}, {"CounterTop", 0.3}, {"Sink", 0.1}});
    add("Fork", {{"Drawer", 0.65}, {"CounterTop", 0.25}, {"Sink", 0.1}});
    add("Spoon", {{"Drawer", 0.65}, {"CounterTop", 0.25}, {"Sink", 0.1}});
    add("DishSponge", {{"Cabinet", 0.6}, {"Sink", 0.25}, {"CounterTop", 0.15}});
    add("SoapBar", {{"Cabinet", 0.5}, {"Sink", 0.3}, {"CounterTop", 0.2}});
    add("Apple", {{"Fridge", 0.5}, {"CounterTop", 0.3}, {"GarbageCan", 0.2}});
    add("Tomato", {{"Fridge", 0.55}, {"CounterTop", 0.3}, {"GarbageCan", 0.15}});
    add("Potato", {{"Fridge", 0.45}, {"CounterTop", 0.35}, {"Cabinet", 0.2}});
    add("Lettuce", {{"Fridge", 0.6}, {"CounterTop", 0.3}, {"Sink", 0.1}});
    add("Bread", {{"CounterTop", 0.5}, {"Cabinet", 0.3}, {"Fridge", 0.2}});
    add("Egg", {{"Fridge", 0.7}, {"CounterTop", 0.2}, {"GarbageCan", 0.1}});
    add("SaltShaker", {{"Cabinet", 0.5}, {"CounterTop", 0.3}, {"DiningTable", 0.2}});
    add("PepperShaker", {{"Cabinet", 0.5}, {"CounterTop", 0.3}, {"DiningTable", 0.2}});
    add("CreditCard", {{"Sofa", 0.5}, {"Desk", 0.3}, {"SideTable", 0.2}});
    add("KeyChain", {{"Drawer", 0.4}, {"Desk", 0.3}, {"SideTable", 0.3}});
    add("CellPhone", {{"Desk", 0.4}, {"Sofa", 0.3}, {"SideTable", 0.3}});
    add("Watch", {{"Drawer", 0.45}, {"Desk", 0.3}, {"SideTable", 0.25}});
    add("RemoteControl", {{"Sofa", 0.5}, {"ArmChair", 0.3}, {"SideTable", 0.2}});
    add("Book", {{"Desk", 0.4}, {"Shelf", 0.35}, {"SideTable", 0.25}});
    add("Pen", {{"Desk", 0.5}, {"Drawer", 0.3}, {"SideTable", 0.2}});
    add("Pencil", {{"Desk", 0.5}, {"Drawer", 0.3}, {"SideTable", 0.2}});
    return c;
  }();
  return t;
}

CooccurrenceTable CooccurrenceTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open co-occurrence table: " + path);
  json j = json::parse(in);
  CooccurrenceTable t;
  t.version = j.at("version").get<int>();
  for (const auto& [item, hosts] : j.at("entries").items()) {
    std::vector<HostEntry> list;
    for (const auto& row : hosts) {
      list.push_back({row.at(0).get<std::string>(), row.at(1).get<double>()});
    }
    sort_hosts(list);
    t.entries[item] = std::move(list);
  }
  return t;
}

std::string CooccurrenceTable::to_json() const {
  json j;
  j["version"] = version;
  json ents = json::object();
  for (const auto& [item, hosts] : entries) {
    json list = json::array();
    for (const auto& h : hosts) list.push_back(json::array({h.host, h.weight}));
    ents[item] = list;
  }
  j["entries"] = ents;
  return j.dump(2) + "\n";
}

double token_overlap(const std::string& a, const std::string& b) {
  std::vector<std::string> ta = camel_tokens(a), tb = camel_tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  if (sa.empty() || sb.empty()) return 0.0;
  int inter = 0;
  for (const auto& t : sa) inter += sb.count(t) > 0;
  int uni = static_cast<int>(sa.size() + sb.size()) - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double category_similarity(const std::string& a, const std::string& b, const SynonymTable& syn) {
  if (a == b) return 1.0;
  if (syn.related(a, b)) return 1.0;
  return token_overlap(a, b);
}

std::string best_substitute(const std::string& target, const std::vector<std::string>& candidates,
                            const SynonymTable& syn) {
  std::string best;
  double best_score = 0.0;
  std::vector<std::string> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& c : sorted) {
    if (c == target) continue;
    double s = category_similarity(target, c, syn);
    if (s > best_score) {
      best_score = s;
      best = c;
    }
  }
  return best;
}

}  // namespace triplan
