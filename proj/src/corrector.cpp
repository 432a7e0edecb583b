#include "triplan/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "triplan/rng.hpp"

namespace triplan {

using nlohmann::json;

const char* to_string(CorrectionLabel label) {
  switch (label) {
    case CorrectionLabel::KeepPlanned: return "KeepPlanned";
    case CorrectionLabel::MoveAhead: return "MoveAhead";
    case CorrectionLabel::RotateLeft: return "RotateLeft";
    case CorrectionLabel::RotateRight: return "RotateRight";
    case CorrectionLabel::LookDown: return "LookDown";
    case CorrectionLabel::LookUp: return "LookUp";
  }
  return "?";
}

std::optional<CorrectionLabel> correction_label_from_string(const std::string& s) {
  for (int i = 0; i < kCorrectionLabelCount; ++i) {
    CorrectionLabel l = static_cast<CorrectionLabel>(i);
    if (s == to_string(l)) return l;
  }
  return std::nullopt;
}

std::vector<double> FeasibilityFeatures::to_vector() const {
  std::vector<double> v(static_cast<std::size_t>(kFeatureCount), 0.0);
  v[0] = target_visible;
  v[1] = target_area;
  v[2] = target_depth;
  v[3] = pitch_offset;
  v[4] = ahead_free;
  v[5] = holding;
  v[6 + static_cast<std::size_t>(planned)] = 1.0;
  return v;
}

std::string relevant_category(const Action& planned) {
  switch (planned.kind) {
    case ActionKind::Clean: return "Sink";
    case ActionKind::Heat: return "Microwave";
    case ActionKind::Cool: return "Fridge";
    case ActionKind::PickUp:
    case ActionKind::Put:
    case ActionKind::Open:
    case ActionKind::Close:
    case ActionKind::ToggleOn:
    case ActionKind::ToggleOff:
    case ActionKind::Slice:
      return planned.target_category;
    default:
      return "";
  }
}

FeasibilityFeatures extract_features(const Observation& obs, const InstanceMap& map,
                                     const AgentState& pose, const Action& planned) {
  const Catalog& cat = Catalog::standard();
  FeasibilityFeatures f;
  f.planned = planned.kind;
  f.holding = pose.holding != kNoObject ? 1.0 : 0.0;
  f.ahead_free =
      map.occupancy(step_from(pose.cell, pose.dir)) != OccupancyState::Blocked ? 1.0 : 0.0;

  std::string relevant = relevant_category(planned);
  if (!relevant.empty() && cat.contains(relevant)) {
    CategoryId want = cat.id(relevant);
    int count = 0;
    double best_depth = 1e9;
    double best_height = 0.0;
    for (const Pixel& p : obs.pixels) {
      if (p.category != want) continue;
      ++count;
      if (p.depth < best_depth) {
        best_depth = p.depth;
        best_height = p.height;
      }
    }
    if (count > 0) {
      f.target_visible = 1.0;
      f.target_area = std::min(count, 32) / 32.0;
      f.target_depth = std::min(best_depth, 16.0) / 16.0;
      bool adjacency_verb = planned.kind == ActionKind::Clean ||
                            planned.kind == ActionKind::Heat ||
                            planned.kind == ActionKind::Cool;
      if (!adjacency_verb) {
        int slice = static_cast<int>(std::floor(best_height));
        int centered = pose.pitch + map.z_levels() / 2;
        f.pitch_offset = (slice - centered) / 2.0;
      }
    }
  }
  return f;
}

CorrectionLabel rule_corrector(const FeasibilityFeatures& f) {
  if (f.planned == ActionKind::MoveAhead && f.ahead_free < 0.5) {
    return CorrectionLabel::RotateRight;
  }
  if (!is_interaction(f.planned)) return CorrectionLabel::KeepPlanned;
  if (f.target_visible < 0.5) return CorrectionLabel::RotateRight;
  if (f.target_depth * 16.0 > 2.0 + 1e-9) return CorrectionLabel::MoveAhead;
  if (f.pitch_offset > 0.25) return CorrectionLabel::LookUp;
  if (f.pitch_offset < -0.25) return CorrectionLabel::LookDown;
  return CorrectionLabel::KeepPlanned;
}

Action resolve_correction(const Action& planned, CorrectionLabel label) {
  switch (label) {
    case CorrectionLabel::KeepPlanned: return planned;
    case CorrectionLabel::MoveAhead: return Action{ActionKind::MoveAhead};
    case CorrectionLabel::RotateLeft: return Action{ActionKind::RotateLeft};
    case CorrectionLabel::RotateRight: return Action{ActionKind::RotateRight};
    case CorrectionLabel::LookDown: return Action{ActionKind::LookDown};
    case CorrectionLabel::LookUp: return Action{ActionKind::LookUp};
  }
  return planned;
}

std::string CorrectionRecord::to_json_line() const {
  json j;
  j["episode_seed"] = episode_seed;
  j["step"] = step;
  j["features"] = {{"target_visible", features.target_visible},
                   {"target_area", features.target_area},
                   {"target_depth", features.target_depth},
                   {"pitch_offset", features.pitch_offset},
                   {"ahead_free", features.ahead_free},
                   {"holding", features.holding},
                   {"planned", to_string(features.planned)}};
  j["label"] = to_string(label);
  j["failure"] = failure;
  return j.dump();
}

CorrectionRecord CorrectionRecord::from_json_line(const std::string& line) {
  json j = json::parse(line);
  CorrectionRecord r;
  r.episode_seed = j.at("episode_seed").get<std::uint64_t>();
  r.step = j.at("step").get<int>();
  const json& f = j.at("features");
  r.features.target_visible = f.at("target_visible").get<double>();
  r.features.target_area = f.at("target_area").get<double>();
  r.features.target_depth = f.at("target_depth").get<double>();
  r.features.pitch_offset = f.at("pitch_offset").get<double>();
  r.features.ahead_free = f.at("ahead_free").get<double>();
  r.features.holding = f.at("holding").get<double>();
  auto kind = action_kind_from_string(f.at("planned").get<std::string>());
  if (!kind) throw std::runtime_error("bad planned action in record");
  r.features.planned = *kind;
  auto label = correction_label_from_string(j.at("label").get<std::string>());
  if (!label) throw std::runtime_error("bad label in record");
  r.label = *label;
  r.failure = j.at("failure").get<std::string>();
  return r;
}

CorrectorModel CorrectorModel::train(const std::vector<CorrectionRecord>& data,
                                     TrainConfig config) {
  if (data.empty()) throw DegenerateDataset("empty dataset");
  std::set<CorrectionLabel> labels;
  for (const auto& r : data) labels.insert(r.label);
  if (labels.size() < 2) throw DegenerateDataset("fewer than two distinct labels");

  const int in = kFeatureCount;
  const int hid = config.hidden;
  const int out = kCorrectionLabelCount;
  const std::size_t n = data.size();

  CorrectorModel m;
  m.hidden_ = hid;
  m.w1_.assign(static_cast<std::size_t>(hid * in), 0.0);
  m.b1_.assign(static_cast<std::size_t>(hid), 0.0);
  m.w2_.assign(static_cast<std::size_t>(out * hid), 0.0);
  m.b2_.assign(static_cast<std::size_t>(out), 0.0);
  Rng rng(derive_seed(config.init_seed, 0x11u));
  for (double& w : m.w1_) w = rng.uniform(-0.5, 0.5) / std::sqrt(static_cast<double>(in));
  for (double& w : m.w2_) w = rng.uniform(-0.5, 0.5) / std::sqrt(static_cast<double>(hid));

  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  xs.reserve(n);
  for (const auto& r : data) {
    xs.push_back(r.features.to_vector());
    ys.push_back(static_cast<int>(r.label));
  }

  std::vector<double> h(static_cast<std::size_t>(hid)), z(static_cast<std::size_t>(out));
  std::vector<double> gw1(m.w1_.size()), gb1(m.b1_.size()), gw2(m.w2_.size()), gb2(m.b2_.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::fill(gw1.begin(), gw1.end(), 0.0);
    std::fill(gb1.begin(), gb1.end(), 0.0);
    std::fill(gw2.begin(), gw2.end(), 0.0);
    std::fill(gb2.begin(), gb2.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const std::vector<double>& x = xs[k];
      for (int i = 0; i < hid; ++i) {
        double s = m.b1_[static_cast<std::size_t>(i)];
        for (int j = 0; j < in; ++j) {
          s += m.w1_[static_cast<std::size_t>(i * in + j)] * x[static_cast<std::size_t>(j)];
        }
        h[static_cast<std::size_t>(i)] = std::tanh(s);
      }
      double zmax = -1e30;
      for (int o = 0; o < out; ++o) {
        double s = m.b2_[static_cast<std::size_t>(o)];
        for (int i = 0; i < hid; ++i) {
          s += m.w2_[static_cast<std::size_t>(o * hid + i)] * h[static_cast<std::size_t>(i)];
        }
        z[static_cast<std::size_t>(o)] = s;
        zmax = std::max(zmax, s);
      }
      double sum = 0.0;
      for (int o = 0; o < out; ++o) {
        z[static_cast<std::size_t>(o)] = std::exp(z[static_cast<std::size_t>(o)] - zmax);
        sum += z[static_cast<std::size_t>(o)];
      }
      for (int o = 0; o < out; ++o) z[static_cast<std::size_t>(o)] /= sum;

      // dL/dz with cross-entropy: softmax - onehot
      for (int o = 0; o < out; ++o) {
        double d = z[static_cast<std::size_t>(o)] - (o == ys[k] ? 1.0 : 0.0);
        gb2[static_cast<std::size_t>(o)] += d;
        for (int i = 0; i < hid; ++i) {
          gw2[static_cast<std::size_t>(o * hid + i)] += d * h[static_cast<std::size_t>(i)];
        }
      }
      for (int i = 0; i < hid; ++i) {
        double back = 0.0;
        for (int o = 0; o < out; ++o) {
          back += (z[static_cast<std::size_t>(o)] - (o == ys[k] ? 1.0 : 0.0)) *
                  m.w2_[static_cast<std::size_t>(o * hid + i)];
        }
        double dh = back * (1.0 - h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)]);
        gb1[static_cast<std::size_t>(i)] += dh;
        for (int j = 0; j < in; ++j) {
          gw1[static_cast<std::size_t>(i * in + j)] += dh * x[static_cast<std::size_t>(j)];
        }
      }
    }
    double scale = config.learning_rate / static_cast<double>(n);
    for (std::size_t i = 0; i < m.w1_.size(); ++i) m.w1_[i] -= scale * gw1[i];
    for (std::size_t i = 0; i < m.b1_.size(); ++i) m.b1_[i] -= scale * gb1[i];
    for (std::size_t i = 0; i < m.w2_.size(); ++i) m.w2_[i] -= scale * gw2[i];
    for (std::size_t i = 0; i < m.b2_.size(); ++i) m.b2_[i] -= scale * gb2[i];
  }
  return m;
}

std::vector<double> CorrectorModel::scores(const FeasibilityFeatures& f) const {
  const int in = kFeatureCount;
  const int out = kCorrectionLabelCount;
  std::vector<double> x = f.to_vector();
  std::vector<double> h(static_cast<std::size_t>(hidden_));
  for (int i = 0; i < hidden_; ++i) {
    double s = b1_[static_cast<std::size_t>(i)];
    for (int j = 0; j < in; ++j) {
      s += w1_[static_cast<std::size_t>(i * in + j)] * x[static_cast<std::size_t>(j)];
    }
    h[static_cast<std::size_t>(i)] = std::tanh(s);
  }
  std::vector<double> z(static_cast<std::size_t>(out));
  double zmax = -1e30;
  for (int o = 0; o < out; ++o) {
    double s = b2_[static_cast<std::size_t>(o)];
    for (int i = 0; i < hidden_; ++i) {
      s += w2_[static_cast<std::size_t>(o * hidden_ + i)] * h[static_cast<std::size_t>(i)];
    }
    z[static_cast<std::size_t>(o)] = s;
    zmax = std::max(zmax, s);
  }
  double sum = 0.0;
  for (int o = 0; o < out; ++o) {
    z[static_cast<std::size_t>(o)] = std::exp(z[static_cast<std::size_t>(o)] - zmax);
    sum += z[static_cast<std::size_t>(o)];
  }
  for (int o = 0; o < out; ++o) z[static_cast<std::size_t>(o)] /= sum;
  return z;
}

CorrectionLabel CorrectorModel::predict(const FeasibilityFeatures& f) const {
  std::vector<double> z = scores(f);
  int best = 0;
  for (int o = 1; o < kCorrectionLabelCount; ++o) {
    if (z[static_cast<std::size_t>(o)] > z[static_cast<std::size_t>(best)]) best = o;
  }
  return static_cast<CorrectionLabel>(best);
}

std::string CorrectorModel::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["inputs"] = kFeatureCount;
  j["hidden"] = hidden_;
  j["outputs"] = kCorrectionLabelCount;
  j["w1"] = w1_;
  j["b1"] = b1_;
  j["w2"] = w2_;
  j["b2"] = b2_;
  return j.dump();
}

CorrectorModel CorrectorModel::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("inputs").get<int>() != kFeatureCount ||
      j.at("outputs").get<int>() != kCorrectionLabelCount) {
    throw std::runtime_error("model shape does not match this build");
  }
  CorrectorModel m;
  m.hidden_ = j.at("hidden").get<int>();
  m.w1_ = j.at("w1").get<std::vector<double>>();
  m.b1_ = j.at("b1").get<std::vector<double>>();
  m.w2_ = j.at("w2").get<std::vector<double>>();
  m.b2_ = j.at("b2").get<std::vector<double>>();
  return m;
}

namespace {

bool same_resolved(ActionKind planned, CorrectionLabel a, CorrectionLabel b) {
  Action p;
  p.kind = planned;
  Action ra = resolve_correction(p, a);
  Action rb = resolve_correction(p, b);
  return ra.kind == rb.kind;
}

}  // namespace

double action_agreement(const CorrectorModel& model, const std::vector<CorrectionRecord>& data) {
  if (data.empty()) return 0.0;
  int agree = 0;
  for (const auto& r : data) {
    if (same_resolved(r.features.planned, model.predict(r.features), r.label)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(data.size());
}

double rule_agreement(const std::vector<CorrectionRecord>& data) {
  if (data.empty()) return 0.0;
  int agree = 0;
  for (const auto& r : data) {
    if (same_resolved(r.features.planned, rule_corrector(r.features), r.label)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(data.size());
}

void split_dataset(const std::vector<CorrectionRecord>& data, double eval_fraction,
                   std::vector<CorrectionRecord>& train_out,
                   std::vector<CorrectionRecord>& eval_out) {
  train_out.clear();
  eval_out.clear();
  for (const auto& r : data) {
    std::string key = std::to_string(r.episode_seed);
    double u = static_cast<double>(fnv1a64(key) >> 11) * 0x1.0p-53;
    (u < eval_fraction ? eval_out : train_out).push_back(r);
  }
}

}  // namespace triplan
