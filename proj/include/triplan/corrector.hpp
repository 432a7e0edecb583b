#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "triplan/instance_map.hpp"
#include "triplan/world.hpp"

namespace triplan {

// The correction space: keep the planned action, or replace it with one of
// five recovery motions.
enum class CorrectionLabel : std::uint8_t {
  KeepPlanned,
  MoveAhead,
  RotateLeft,
  RotateRight,
  LookDown,
  LookUp,
};

constexpr int kCorrectionLabelCount = 6;

const char* to_string(CorrectionLabel label);
std::optional<CorrectionLabel> correction_label_from_string(const std::string& s);

// What the agent can tell about the planned action's feasibility from one
// frame plus its map. Kept low-dimensional and normalized so a small model
// trains fast.
struct FeasibilityFeatures {
  double target_visible = 0.0;  // any pixel of the relevant category
  double target_area = 0.0;     // pixel count, saturated at 32, /32
  double target_depth = 1.0;    // nearest relevant pixel, /16; 1 when unseen
  double pitch_offset = 0.0;    // (target slice - centered slice) / 2
  double ahead_free = 0.0;      // map says the cell ahead is not blocked
  double holding = 0.0;
  ActionKind planned = ActionKind::MoveAhead;

  // [6 scalars] + one-hot planned kind; kFeatureCount entries.
  std::vector<double> to_vector() const;
};

constexpr int kFeatureCount = 6 + kActionKindCount;

// Category whose pixels ground the features for a planned action: the stated
// target for object interactions, the required appliance for Clean/Heat/Cool,
// none for pure motion. Empty string when no category applies.
std::string relevant_category(const Action& planned);

FeasibilityFeatures extract_features(const Observation& obs, const InstanceMap& map,
                                     const AgentState& pose, const Action& planned);

// Hand-written recovery policy, also the dataset labeler. Precedence:
// blocked movement, then an unseen target, then one too far away, then one at
// the wrong height. Clean/Heat/Cool have their pitch offset forced to zero
// (adjacency is enough), so only the distance rule can fire for them.
CorrectionLabel rule_corrector(const FeasibilityFeatures& f);

// The action actually sent to the simulator for a label.
Action resolve_correction(const Action& planned, CorrectionLabel label);

struct CorrectionRecord {
  std::uint64_t episode_seed = 0;
  int step = 0;
  FeasibilityFeatures features;
  CorrectionLabel label = CorrectionLabel::KeepPlanned;
  std::string failure;  // simulator reason when the planned action failed

  std::string to_json_line() const;
  static CorrectionRecord from_json_line(const std::string& line);
};

struct DegenerateDataset : std::runtime_error {
  explicit DegenerateDataset(const std::string& what) : std::runtime_error(what) {}
};

struct TrainConfig {
  int hidden = 24;
  double learning_rate = 0.5;
  int epochs = 400;
  std::uint64_t init_seed = 7;
};

// One hidden layer (tanh) + softmax, trained full-batch. Deterministic for a
// fixed dataset order and init seed.
class CorrectorModel {
 public:
  static CorrectorModel train(const std::vector<CorrectionRecord>& data, TrainConfig config);

  CorrectionLabel predict(const FeasibilityFeatures& f) const;
  std::vector<double> scores(const FeasibilityFeatures& f) const;  // softmax probs

  std::string to_json() const;
  static CorrectorModel from_json(const std::string& text);

  int hidden_units() const { return hidden_; }

 private:
  int hidden_ = 0;
  std::vector<double> w1_, b1_;  // hidden x in, hidden
  std::vector<double> w2_, b2_;  // out x hidden, out
};

// Fraction of records where the model's resolved action equals the label's
// resolved action (labels that differ but resolve identically count as
// agreement; the simulator cannot tell them apart).
double action_agreement(const CorrectorModel& model, const std::vector<CorrectionRecord>& data);

// Same measure for the rule policy against recorded labels; sanity ceiling.
double rule_agreement(const std::vector<CorrectionRecord>& data);

// Deterministic train/eval split on the episode seed (not on records, so all
// records of one episode land on the same side). `eval_fraction` in [0,1].
void split_dataset(const std::vector<CorrectionRecord>& data, double eval_fraction,
                   std::vector<CorrectionRecord>& train_out,
                   std::vector<CorrectionRecord>& eval_out);

}  // namespace triplan
