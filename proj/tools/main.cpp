// Command-line driver: scene/dataset generation, corrector training, map
// dumps, benchmark runs and ablation sweeps.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "triplan/agent.hpp"
#include "triplan/corrector.hpp"
#include "triplan/eval.hpp"
#include "triplan/json_io.hpp"
#include "triplan/llm.hpp"
#include "triplan/rng.hpp"

namespace fs = std::filesystem;
using namespace triplan;

namespace {

constexpr int kExitEmptySuite = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::vector<CorrectionRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<CorrectionRecord> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(CorrectionRecord::from_json_line(line));
  }
  return rows;
}

double majority_share(const std::vector<CorrectionRecord>& rows) {
  std::map<CorrectionLabel, int> counts;
  for (const CorrectionRecord& r : rows) counts[r.label]++;
  int best = 0;
  for (const auto& [label, n] : counts) best = std::max(best, n);
  return rows.empty() ? 0.0 : static_cast<double>(best) / static_cast<double>(rows.size());
}

EpisodeConfig load_config(const std::string& path) {
  if (path.empty()) return EpisodeConfig{};
  return episode_config_from_json(read_file(path));
}

std::vector<std::string> furniture_names() {
  const Catalog& cat = Catalog::standard();
  std::vector<std::string> names;
  for (CategoryId id : cat.furniture()) names.push_back(cat.name(id));
  return names;
}

// Shared by `run` and `ablation`. Returns the per-arm reports in arm order.
std::vector<VariantReport> run_arms(const SuiteSpec& suite, const EpisodeConfig& base,
                                    const std::vector<std::string>& arms, const std::string& out,
                                    int workers, const std::string& corrector_path,
                                    bool log_events) {
  fs::create_directories(out);

  const LLMConfig llm = LLMConfig::from_env();
  const bool llm_audit = base.audit_backend == "llm" && llm.enabled();
  const bool llm_hosts = base.host_backend == "llm" && llm.enabled();
  std::unique_ptr<LLMAuditor> auditor;
  if (llm_audit) auditor = std::make_unique<LLMAuditor>(llm);
  if (llm_audit || llm_hosts) {
    // call_llm rewrites the transcript file per call; keep it single-threaded
    workers = 1;
    std::cerr << "llm backend active; forcing --workers 1\n";
  }

  std::unique_ptr<CorrectorModel> model;
  if (!corrector_path.empty()) {
    model = std::make_unique<CorrectorModel>(CorrectorModel::from_json(read_file(corrector_path)));
  }

  SuiteRunOptions options;
  options.workers = workers;
  options.progress = &std::cerr;
  if (log_events) {
    options.log_dir = out + "/logs";
    fs::create_directories(options.log_dir);
  }
  const std::vector<std::string> hosts = furniture_names();
  options.customize = [&](EpisodeRunner& r) {
    if (auditor) r.set_auditor(auditor.get());
    if (llm_hosts) {
      r.set_host_predictor(
          [&llm, &hosts](const std::string& item, const std::vector<std::string>& excluded) {
            return llm_predict_hosts(llm, item, hosts, excluded);
          });
    }
    if (model) r.set_corrector(model.get());
  };

  std::vector<VariantReport> reports;
  for (const std::string& arm : arms) {
    reports.push_back(run_suite(suite, base, arm, options));
    write_file(out + "/episodes_" + arm + ".csv", episodes_csv(reports.back()));
  }
  write_file(out + "/summary.csv", summary_csv(reports));
  const std::string table = format_table(reports);
  write_file(out + "/summary.txt", table);
  std::cout << table;
  return reports;
}

int suite_size(const SuiteSpec& suite) {
  int n = 0;
  for (const SuiteStratum& s : suite.strata) n += s.count;
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale embodied replanning stack"};
  app.require_subcommand(1);

  // ---- gen-scenes ----
  auto* gen_scenes = app.add_subcommand("gen-scenes", "generate scene JSON files");
  std::uint64_t gs_seed = 1;
  std::string gs_profile = "default";
  int gs_count = 10;
  std::string gs_out = "scenes";
  gen_scenes->add_option("--seed", gs_seed, "first candidate seed");
  gen_scenes->add_option("--profile", gs_profile, "scene profile name");
  gen_scenes->add_option("--count", gs_count, "scenes to emit");
  gen_scenes->add_option("--out", gs_out, "output directory");

  // ---- dump-map ----
  auto* dump_map = app.add_subcommand(
      "dump-map", "replay one configured episode and dump its instance map snapshot");
  std::string dm_config, dm_out;
  std::uint64_t dm_scene_seed = 0, dm_task_seed = 0;
  int dm_step = -1;
  dump_map->add_option("--config", dm_config, "episode config JSON");
  dump_map->add_option("--scene-seed", dm_scene_seed, "override scene seed");
  dump_map->add_option("--task-seed", dm_task_seed, "override task seed");
  dump_map->add_option("--step", dm_step, "snapshot after this step (default: episode end)");
  dump_map->add_option("--out", dm_out, "output file (default: stdout)");

  // ---- gen-dataset ----
  auto* gen_dataset = app.add_subcommand("gen-dataset", "roll episodes and record corrector data");
  std::uint64_t gd_start = 1;
  int gd_count = 40;
  std::string gd_out = "corrections.jsonl";
  std::string gd_config;
  gen_dataset->add_option("--seed-start", gd_start, "first episode seed");
  gen_dataset->add_option("--count", gd_count, "episode count");
  gen_dataset->add_option("--config", gd_config, "episode config JSON");
  gen_dataset->add_option("--out", gd_out, "output JSONL file");

  // ---- train-corrector ----
  auto* train = app.add_subcommand("train-corrector", "train the feasibility corrector");
  std::string tc_data = "corrections.jsonl", tc_out = "corrector.json";
  double tc_eval_fraction = 0.2;
  TrainConfig tc_config;
  train->add_option("--data", tc_data, "dataset JSONL");
  train->add_option("--out", tc_out, "model output file");
  train->add_option("--eval-fraction", tc_eval_fraction, "held-out fraction (by episode)");
  train->add_option("--hidden", tc_config.hidden, "hidden units");
  train->add_option("--lr", tc_config.learning_rate, "learning rate");
  train->add_option("--epochs", tc_config.epochs, "training epochs");
  train->add_option("--init-seed", tc_config.init_seed, "weight init seed");

  // ---- eval-corrector ----
  auto* evalc = app.add_subcommand("eval-corrector", "score a trained corrector on a dataset");
  std::string ec_data = "corrections.jsonl", ec_model = "corrector.json";
  double ec_eval_fraction = 0.0;
  evalc->add_option("--data", ec_data, "dataset JSONL");
  evalc->add_option("--model", ec_model, "model file");
  evalc->add_option("--eval-fraction", ec_eval_fraction,
                    "score only this held-out fraction (0 = whole file)");

  // ---- run ----
  auto* run = app.add_subcommand("run", "run a benchmark suite");
  std::string run_suite_path, run_config_path, run_out = "results";
  std::string run_arm = "full", run_corrector;
  int run_workers = 1;
  std::uint64_t run_seed = 0;
  bool run_log_events = false;
  run->add_option("--suite", run_suite_path, "suite JSON (omit for the builtin default)");
  run->add_option("--config", run_config_path, "episode config JSON");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--workers", run_workers, "worker threads");
  run->add_option("--seed", run_seed, "offset added to every stratum base seed");
  run->add_option("--arm", run_arm, "ablation arm to run");
  run->add_option("--corrector", run_corrector, "trained corrector model file");
  run->add_flag("--log-events", run_log_events, "write per-episode JSONL event logs");

  // ---- ablation ----
  auto* ablation = app.add_subcommand("ablation", "run the ablation sweep");
  std::string ab_suite_path, ab_config_path, ab_out = "ablation";
  std::string ab_levels = "high,mid,low", ab_corrector;
  int ab_workers = 1;
  std::uint64_t ab_seed = 0;
  ablation->add_option("--suite", ab_suite_path, "suite JSON (omit for the builtin default)");
  ablation->add_option("--config", ab_config_path, "episode config JSON");
  ablation->add_option("--out", ab_out, "output directory");
  ablation->add_option("--levels", ab_levels, "comma list of levels to knock out");
  ablation->add_option("--workers", ab_workers, "worker threads");
  ablation->add_option("--seed", ab_seed, "offset added to every stratum base seed");
  ablation->add_option("--corrector", ab_corrector, "trained corrector model file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_scenes->parsed()) {
      fs::create_directories(gs_out);
      const SceneProfile profile = named_profile(gs_profile);
      int written = 0;
      std::uint64_t candidate = gs_seed;
      for (int attempts = 0; written < gs_count && attempts < gs_count * 200; ++attempts) {
        try {
          const Scene scene = generate_scene(candidate, profile);
          write_file(gs_out + "/scene_" + std::to_string(candidate) + ".json",
                     scene_to_json(scene));
          ++written;
        } catch (const ProfileInfeasible&) {
        }
        ++candidate;
      }
      if (written < gs_count) throw std::runtime_error("profile kept rejecting seeds");
      std::cout << "wrote " << written << " scenes to " << gs_out << "\n";
      return 0;
    }

    if (dump_map->parsed()) {
      EpisodeConfig cfg = load_config(dm_config);
      if (dm_scene_seed != 0) {
        cfg.scene_seed = dm_scene_seed;
        cfg.task_seed = derive_seed(dm_scene_seed, 0x7a51);
      }
      if (dm_task_seed != 0) cfg.task_seed = dm_task_seed;
      EpisodeRunner runner(cfg);
      std::string snapshot;
      if (dm_step >= 0) {
        runner.set_step_hook([&](const Observation&, const InstanceMap& map, const AgentState&,
                                 const Action&, const ActionOutcome&, int step) {
          if (step == dm_step) snapshot = map.to_json();
        });
      }
      runner.run();
      if (snapshot.empty()) snapshot = runner.map().to_json();
      if (dm_out.empty()) {
        std::cout << snapshot << "\n";
      } else {
        write_file(dm_out, snapshot);
        std::cout << "wrote map snapshot to " << dm_out << "\n";
      }
      return 0;
    }

    if (gen_dataset->parsed()) {
      EpisodeConfig base = load_config(gd_config);
      std::vector<std::uint64_t> seeds;
      for (int i = 0; i < gd_count; ++i) seeds.push_back(gd_start + static_cast<std::uint64_t>(i));
      const std::vector<CorrectionRecord> rows = generate_dataset(base, seeds);
      std::ofstream out(gd_out);
      if (!out) throw std::runtime_error("cannot write " + gd_out);
      std::map<std::string, int> histogram;
      for (const CorrectionRecord& r : rows) {
        out << r.to_json_line() << "\n";
        histogram[to_string(r.label)]++;
      }
      std::cout << rows.size() << " records -> " << gd_out << "\n";
      for (const auto& [label, n] : histogram) std::cout << "  " << label << ": " << n << "\n";
      return 0;
    }

    if (train->parsed()) {
      const std::vector<CorrectionRecord> all = load_dataset(tc_data);
      std::vector<CorrectionRecord> train_rows, eval_rows;
      split_dataset(all, tc_eval_fraction, train_rows, eval_rows);
      const CorrectorModel model = CorrectorModel::train(train_rows, tc_config);
      write_file(tc_out, model.to_json());
      std::cout << "trained on " << train_rows.size() << " records -> " << tc_out << "\n";
      if (!eval_rows.empty()) {
        std::cout << "held-out agreement: " << 100.0 * action_agreement(model, eval_rows)
                  << "%\n";
        std::cout << "held-out majority baseline: " << 100.0 * majority_share(eval_rows)
                  << "%\n";
        std::cout << "rule-policy ceiling: " << 100.0 * rule_agreement(eval_rows) << "%\n";
      }
      return 0;
    }

    if (evalc->parsed()) {
      const std::vector<CorrectionRecord> all = load_dataset(ec_data);
      std::vector<CorrectionRecord> rest, eval_rows;
      if (ec_eval_fraction > 0.0) {
        split_dataset(all, ec_eval_fraction, rest, eval_rows);
      } else {
        eval_rows = all;
      }
      const CorrectorModel model = CorrectorModel::from_json(read_file(ec_model));
      std::cout << "records scored: " << eval_rows.size() << "\n";
      std::cout << "agreement: " << 100.0 * action_agreement(model, eval_rows) << "%\n";
      std::cout << "majority baseline: " << 100.0 * majority_share(eval_rows) << "%\n";
      std::cout << "rule-policy ceiling: " << 100.0 * rule_agreement(eval_rows) << "%\n";
      return 0;
    }

    if (run->parsed() || ablation->parsed()) {
      const bool sweep = ablation->parsed();
      const std::string suite_path = sweep ? ab_suite_path : run_suite_path;
      SuiteSpec suite =
          suite_path.empty() ? SuiteSpec::builtin_default() : SuiteSpec::load(suite_path);
      const std::uint64_t offset = sweep ? ab_seed : run_seed;
      for (SuiteStratum& s : suite.strata) s.base_seed += offset;

      const EpisodeConfig base = load_config(sweep ? ab_config_path : run_config_path);
      const std::string out = sweep ? ab_out : run_out;
      if (suite_size(suite) == 0) {
        fs::create_directories(out);
        write_file(out + "/summary.csv", summary_csv({}));
        write_file(out + "/summary.txt", format_table({}));
        std::cerr << "suite is empty\n";
        return kExitEmptySuite;
      }

      std::vector<std::string> arms;
      if (sweep) {
        arms.push_back("full");
        std::stringstream ss(ab_levels);
        std::string level;
        while (std::getline(ss, level, ',')) {
          if (level == "high" || level == "mid" || level == "low") {
            arms.push_back("no_" + level);
          } else if (!level.empty()) {
            throw std::runtime_error("unknown level: " + level);
          }
        }
        arms.push_back("none");
      } else {
        arms.push_back(run_arm);
      }

      run_arms(suite, base, arms, out, sweep ? ab_workers : run_workers,
               sweep ? ab_corrector : run_corrector, sweep ? false : run_log_events);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
