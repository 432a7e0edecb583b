#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace triplan {

// Static synonym pairs. Symmetric; keys may name categories outside the
// catalog (instruction vocabulary), values are used for plan substitution.
struct SynonymTable {
  int version = 1;
  std::vector<std::pair<std::string, std::string>> pairs;

  bool related(const std::string& a, const std::string& b) const;
  static const SynonymTable& builtin();
  static SynonymTable load(const std::string& path);
  std::string to_json() const;
};

struct HostEntry {
  std::string host;
  double weight = 0.0;
};

struct NoHostKnown : std::runtime_error {
  explicit NoHostKnown(const std::string& cat)
      : std::runtime_error("no host entry for category: " + cat) {}
};

// Item -> ranked plausible hosts. Entries are kept sorted by descending
// weight (ties by name) so rank 0 is the prediction.
struct CooccurrenceTable {
  int version = 1;
  std::map<std::string, std::vector<HostEntry>> entries;

  const std::vector<HostEntry>& hosts_for(const std::string& category) const;
  bool has(const std::string& category) const { return entries.count(category) > 0; }
  static const CooccurrenceTable& builtin();
  static CooccurrenceTable load(const std::string& path);
  std::string to_json() const;
};

// Jaccard overlap of lowercased CamelCase tokens; "SaltShaker" vs
// "PepperShaker" -> 1/3.
double token_overlap(const std::string& a, const std::string& b);

// Synonym pairs score 1.0, otherwise token overlap. Equal names score 1.0.
double category_similarity(const std::string& a, const std::string& b, const SynonymTable& syn);

// Highest-similarity candidate with score > 0; ties broken by lexicographic
// order. Empty string when nothing scores.
std::string best_substitute(const std::string& target, const std::vector<std::string>& candidates,
                            const SynonymTable& syn);

}  // namespace triplan
