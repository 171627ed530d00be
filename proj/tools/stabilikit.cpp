// stabilikit command-line front end.
//
// Every subcommand writes CSV + JSON into --out; the JSON embeds the run
// configuration. Exit codes: 0 success, 1 data error (JSON on stderr),
// 2 usage error.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "stabilikit/comnet.hpp"
#include "stabilikit/error.hpp"
#include "stabilikit/evaluation.hpp"
#include "stabilikit/io.hpp"
#include "stabilikit/stability.hpp"
#include "stabilikit/statistics.hpp"
#include "stabilikit/synth.hpp"

namespace sk = stabilikit;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunConfig {
  std::string command;
  double threshold_kpa = 10.0;
  std::vector<double> sweep_grid = sk::default_threshold_grid();
  double cutoff_hz = sk::kDefaultTrendCutoffHz;
  std::string channels = "GT-GT-GT";
  bool loso = true;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  json to_json() const {
    return {{"command", command},     {"threshold_kpa", threshold_kpa},
            {"sweep_grid", sweep_grid}, {"cutoff_hz", cutoff_hz},
            {"channels", channels},   {"loso", loso},
            {"seed", seed},           {"output_dir", output_dir}};
  }
};

struct Inputs {
  std::vector<std::string> datasets;
  std::vector<std::string> manifests;
};

std::uint64_t effective_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("STABILIKIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw sk::Error(sk::ErrorCode::InvalidArgument, "STABILIKIT_SEED is not an integer");
    }
  }
  return seed;
}

std::vector<sk::TakeData> load_inputs(const Inputs& in, json& excluded) {
  std::vector<sk::TakeData> takes;
  excluded = json::array();
  for (const auto& d : in.datasets) {
    sk::io::Dataset ds = sk::io::load_dataset(d);
    for (auto& t : ds.takes) takes.push_back(std::move(t));
    for (const auto& [id, reason] : ds.excluded) excluded.push_back({{"take", id}, {"reason", reason}});
  }
  for (const auto& m : in.manifests) takes.push_back(sk::io::load_take(m));
  if (takes.empty()) throw sk::Error(sk::ErrorCode::EmptyDataset, "no takes to process");
  return takes;
}

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--dataset", in.datasets, "Dataset JSON listing take manifests");
  cmd->add_option("--manifest", in.manifests, "Single take manifest (repeatable)");
}

std::string f(double v) { return sk::io::format_double(v); }

void write_json(const RunConfig& cfg, const std::string& name, json body) {
  body["config"] = cfg.to_json();
  sk::io::write_text(fs::path(cfg.output_dir) / name, body.dump(2) + "\n");
}

json stats_json(const std::vector<double>& v) {
  if (v.empty()) return {{"n", 0}};
  const sk::ErrorStats s = sk::error_stats(v);
  return {{"mean", s.mean}, {"std", s.std}, {"median", s.median}, {"rstd", s.rstd}, {"n", s.n}};
}

std::string stats_csv(const std::vector<double>& v) {
  if (v.empty()) return "nan,nan,nan,nan,0";
  const sk::ErrorStats s = sk::error_stats(v);
  return f(s.mean) + "," + f(s.std) + "," + f(s.median) + "," + f(s.rstd) + "," + std::to_string(s.n);
}

fs::path model_path(const fs::path& dir, const std::string& subject) {
  return dir / ("comnet_" + subject + ".bin");
}

// CoM estimator for a subject's fold: a per-subject CoMNet when one exists in
// models_dir, the segmental model otherwise.
sk::ComEstimator estimator_for(const std::string& models_dir, const std::string& subject) {
  if (!models_dir.empty()) {
    const fs::path p = model_path(models_dir, subject);
    if (fs::exists(p)) {
      return sk::ComEstimator::network(
          std::make_shared<const sk::ComNetParams>(sk::io::read_comnet(p)));
    }
  }
  return sk::ComEstimator::dempster();
}

sk::ChannelSelection parse_channels(const std::string& s) {
  const auto c = sk::ChannelSelection::parse(s);
  if (!c) throw CLI::ValidationError("--channels", "expected e.g. GT-IM-GT, got " + s);
  return *c;
}

// --- subcommands ----------------------------------------------------------

struct SynthArgs {
  int subjects = 2;
  std::vector<std::string> programs;
  double duration_s = 60.0;
  sk::NoiseSpec noise;
};

void run_synth(RunConfig& cfg, const SynthArgs& a) {
  sk::SynthRig rig;
  rig.seed = cfg.seed;
  std::vector<sk::MotionProgram> programs;
  if (a.programs.empty()) {
    for (auto p : sk::all_programs()) programs.push_back(p);
  } else {
    for (const auto& p : a.programs) programs.push_back(sk::program_from_name(p));
  }
  sk::NoiseSpec noise = a.noise;
  noise.seed = cfg.seed;
  const auto takes = sk::generate_cohort(rig, a.subjects, programs, a.duration_s, noise);
  std::vector<fs::path> manifests;
  json list = json::array();
  std::string csv = "take,subject,program,frames,height_mm\n";
  for (const auto& t : takes) {
    manifests.push_back(sk::io::write_synth_take(fs::path(cfg.output_dir) / "takes", t));
    list.push_back({{"take", t.data.take_id},
                    {"subject", t.data.subject_id},
                    {"program", sk::program_name(t.program)},
                    {"frames", t.data.frame_count()}});
    csv += t.data.take_id + "," + t.data.subject_id + "," + std::string(sk::program_name(t.program)) +
           "," + std::to_string(t.data.frame_count()) + "\n";
  }
  sk::io::write_dataset(fs::path(cfg.output_dir) / "dataset.json", manifests);
  sk::io::write_text(fs::path(cfg.output_dir) / "synth.csv", csv);
  write_json(cfg, "synth.json",
             {{"takes", list},
              {"duration_s", a.duration_s},
              {"noise",
               {{"pixel_px", noise.pixel_px},
                {"joint_mm", noise.joint_mm},
                {"pressure_kpa", noise.pressure_kpa},
                {"com_mm", noise.com_mm},
                {"dropout", noise.dropout}}}});
}

void run_triangulate(RunConfig& cfg, const std::string& manifest) {
  const sk::TakeData t = sk::io::load_take(manifest);
  const fs::path out(cfg.output_dir);
  sk::io::write_pose3d(out / "op_pose.csv", t.op_pose, sk::LayoutKind::OP);
  sk::io::write_pose3d(out / "hp_pose.csv", t.hp_pose, sk::LayoutKind::HP);
  std::size_t valid = 0;
  std::size_t total = 0;
  for (const auto& p : t.hp_pose) {
    for (const auto& j : p.joints) {
      valid += j.valid ? 1 : 0;
      ++total;
    }
  }
  write_json(cfg, "triangulate.json",
             {{"take", t.take_id},
              {"frames", t.hp_pose.size()},
              {"hp_valid_joint_fraction",
               total ? static_cast<double>(valid) / static_cast<double>(total) : 0.0}});
}

void run_train_com(RunConfig& cfg, const Inputs& in, sk::TrainConfig tc) {
  json excluded;
  const auto takes = load_inputs(in, excluded);
  tc.seed = cfg.seed;
  const fs::path out(cfg.output_dir);
  std::string log = "fold,epoch,learning_rate,mean_batch_loss_mm,eval_rmse_mm\n";
  const auto on_epoch = [&](const std::string& fold, const sk::EpochLog& e) {
    log += fold + "," + std::to_string(e.epoch) + "," + f(e.learning_rate) + "," +
           f(e.mean_batch_loss_mm) + "," + f(e.eval_rmse_mm) + "\n";
    std::cerr << "[" << fold << "] epoch " << e.epoch << " loss " << e.mean_batch_loss_mm
              << " mm\n";
  };
  json folds = json::array();
  std::string csv = "fold,method,mean,std,median,rstd,n\n";
  if (cfg.loso) {
    const auto reports = sk::loso_comnet(takes, tc, on_epoch);
    for (const auto& r : reports) {
      sk::io::write_comnet(model_path(out / "models", r.test_subject), *r.params);
      folds.push_back({{"test_subject", r.test_subject},
                       {"comnet", stats_json(r.comnet_errors)},
                       {"dempster_hp", stats_json(r.dempster_errors)},
                       {"hip_center", stats_json(r.hip_errors)}});
      csv += r.test_subject + ",comnet," + stats_csv(r.comnet_errors) + "\n";
      csv += r.test_subject + ",dempster_hp," + stats_csv(r.dempster_errors) + "\n";
      csv += r.test_subject + ",hip_center," + stats_csv(r.hip_errors) + "\n";
    }
  } else {
    std::vector<std::size_t> all(takes.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto train = sk::com_training_set(takes, all);
    auto result = sk::comnet_train<float>(
        train, tc, [&](const sk::EpochLog& e) { on_epoch("all", e); });
    sk::io::write_comnet(out / "models" / "comnet_all.bin", result.params);
    folds.push_back({{"test_subject", "all"},
                     {"train_rmse_mm", result.log.empty() ? 0.0 : result.log.back().eval_rmse_mm}});
  }
  sk::io::write_text(out / "train_log.csv", log);
  sk::io::write_text(out / "train_com.csv", csv);
  write_json(cfg, "train_com.json",
             {{"folds", folds},
              {"excluded", excluded},
              {"train",
               {{"epochs", tc.epochs},
                {"initial_lr", tc.initial_lr},
                {"batch_size", tc.batch_size},
                {"width", tc.width},
                {"dropout", tc.dropout}}}});
}

void run_com_eval(RunConfig& cfg, const Inputs& in, const std::string& models_dir) {
  json excluded;
  const auto takes = load_inputs(in, excluded);
  std::vector<double> comnet;
  std::vector<double> dempster;
  std::vector<double> hip;
  bool have_net = false;
  std::string frames = "take,subject,method,error_mm\n";
  const sk::ComEstimator seg = sk::ComEstimator::dempster();
  for (const auto& t : takes) {
    const auto add = [&](const char* name, const std::vector<double>& e, std::vector<double>& pool) {
      for (double v : e) frames += t.take_id + "," + t.subject_id + "," + name + "," + f(v) + "\n";
      pool.insert(pool.end(), e.begin(), e.end());
    };
    add("dempster_hp", sk::com_errors(t, seg), dempster);
    add("hip_center", sk::hip_baseline_errors(t), hip);
    const sk::ComEstimator est = estimator_for(models_dir, t.subject_id);
    if (est.kind == sk::ComEstimator::Kind::comnet) {
      have_net = true;
      add("comnet", sk::com_errors(t, est), comnet);
    }
  }
  std::string csv = "method,mean,std,median,rstd,n\n";
  csv += "dempster_hp," + stats_csv(dempster) + "\n";
  csv += "hip_center," + stats_csv(hip) + "\n";
  json methods = {{"dempster_hp", stats_json(dempster)}, {"hip_center", stats_json(hip)}};
  if (have_net) {
    csv += "comnet," + stats_csv(comnet) + "\n";
    methods["comnet"] = stats_json(comnet);
  }
  sk::io::write_text(fs::path(cfg.output_dir) / "com_eval.csv", csv);
  sk::io::write_text(fs::path(cfg.output_dir) / "com_errors.csv", frames);
  write_json(cfg, "com_eval.json", {{"methods", methods}, {"excluded", excluded}});
}

json series_summary(const sk::StabilitySeries& s) {
  std::vector<double> cop;
  std::vector<double> bos;
  for (const auto& fr : s.frames) {
    if (fr.cop_metric_valid()) cop.push_back(fr.com_to_cop);
    if (fr.bos_metric_valid()) bos.push_back(fr.com_to_bos);
  }
  return {{"take", s.take_id},
          {"subject", s.subject_id},
          {"channels", s.channels.label()},
          {"frames", s.frames.size()},
          {"com_to_cop", stats_json(cop)},
          {"com_to_bos", stats_json(bos)}};
}

void run_stability(RunConfig& cfg, const Inputs& in, const std::string& models_dir) {
  json excluded;
  const auto takes = load_inputs(in, excluded);
  const sk::ChannelSelection ch = parse_channels(cfg.channels);
  json list = json::array();
  std::string csv = "take,channels,frames,valid_cop,valid_bos,series_file\n";
  for (const auto& t : takes) {
    sk::SeriesOptions opts;
    opts.threshold_kpa = cfg.threshold_kpa;
    opts.im_com = estimator_for(models_dir, t.subject_id);
    const auto s = sk::compute_series(t, ch, opts);
    const std::string file = "series/" + t.take_id + "_" + ch.label() + ".csv";
    sk::io::write_series(fs::path(cfg.output_dir) / file, s);
    list.push_back(series_summary(s));
    csv += t.take_id + "," + ch.label() + "," + std::to_string(s.frames.size()) + "," +
           std::to_string(s.valid_cop_frames()) + "," + std::to_string(s.valid_bos_frames()) + "," +
           file + "\n";
  }
  sk::io::write_text(fs::path(cfg.output_dir) / "stability.csv", csv);
  write_json(cfg, "stability.json", {{"series", list}, {"excluded", excluded}});
}

void run_sweep(RunConfig& cfg, const Inputs& in, const std::string& loc_name,
               const std::string& metric_name) {
  json excluded;
  const auto takes = load_inputs(in, excluded);
  const auto loc = sk::pose_source_from_name(loc_name);
  if (!loc) throw CLI::ValidationError("--localization", "expected GT, HP or OP");
  const auto metric = sk::sweep_metric_from_name(metric_name);
  if (!metric) throw CLI::ValidationError("--metric", "expected cop_error or bos_iou");
  const sk::SweepResult r = sk::threshold_sweep(takes, *loc, *metric, cfg.sweep_grid);

  std::string csv = "threshold_kpa,mean,median,frames,gaps";
  for (const auto& s : r.subjects) csv += "," + s;
  csv += "\n";
  json rows = json::array();
  for (std::size_t k = 0; k < r.thresholds.size(); ++k) {
    csv += f(r.thresholds[k]) + "," + f(r.mean[k]) + "," + f(r.median[k]) + "," +
           std::to_string(r.frames[k]) + "," + std::to_string(r.gaps[k]);
    json per = json::object();
    for (std::size_t s = 0; s < r.subjects.size(); ++s) {
      csv += "," + f(r.subject_mean[k][s]);
      per[r.subjects[s]] = r.subject_mean[k][s];
    }
    csv += "\n";
    rows.push_back({{"threshold_kpa", r.thresholds[k]},
                    {"mean", r.mean[k]},
                    {"median", r.median[k]},
                    {"frames", r.frames[k]},
                    {"gaps", r.gaps[k]},
                    {"subjects", per}});
  }
  sk::io::write_text(fs::path(cfg.output_dir) / "sweep.csv", csv);
  write_json(cfg, "sweep.json",
             {{"localization", sk::pose_source_name(*loc)},
              {"metric", sk::sweep_metric_name(*metric)},
              {"rows", rows},
              {"excluded", excluded}});
}

json cell_json(const sk::StudyCell& c) {
  return {{"r_mean", c.r_mean}, {"r_std", c.r_std}, {"p_mean", c.p_mean},
          {"mae", c.mae},       {"mae_std", c.mae_std}, {"folds", c.folds},
          {"skipped_folds", c.skipped_folds}, {"frames", c.frames}, {"dropped", c.dropped}};
}

std::string cell_csv(const sk::StudyCell& c) {
  return f(c.r_mean) + "," + f(c.r_std) + "," + f(c.p_mean) + "," + f(c.mae) + "," +
         f(c.mae_std) + "," + std::to_string(c.folds) + "," + std::to_string(c.frames);
}

void run_study(RunConfig& cfg, const Inputs& in, const std::string& models_dir,
               double min_valid_fraction) {
  json excluded;
  const auto takes = load_inputs(in, excluded);
  sk::StudyOptions opts;
  opts.series.threshold_kpa = cfg.threshold_kpa;
  opts.min_valid_fraction = min_valid_fraction;
  if (!models_dir.empty()) {
    opts.im_com_for_subject = [&](const std::string& s) { return estimator_for(models_dir, s); };
  }
  const sk::StudyReport rep = sk::combinatorial_study(takes, opts);
  std::string csv = "channels,metric,r_mean,r_std,p_mean,mae,mae_std,folds,frames\n";
  json rows = json::array();
  for (const auto& row : rep.rows) {
    csv += row.channels.label() + ",com_to_cop," + cell_csv(row.com_to_cop) + "\n";
    csv += row.channels.label() + ",com_to_bos," + cell_csv(row.com_to_bos) + "\n";
    rows.push_back({{"channels", row.channels.label()},
                    {"com_to_cop", cell_json(row.com_to_cop)},
                    {"com_to_bos", cell_json(row.com_to_bos)}});
  }
  sk::io::write_text(fs::path(cfg.output_dir) / "study.csv", csv);
  write_json(cfg, "study.json",
             {{"rows", rows},
              {"subjects", rep.subjects},
              {"excluded_takes", rep.excluded_takes},
              {"excluded", excluded},
              {"min_valid_fraction", min_valid_fraction}});
}

void run_trend(RunConfig& cfg, const std::vector<std::string>& series_files, const Inputs& in,
               int order) {
  std::vector<sk::StabilitySeries> series;
  for (const auto& p : series_files) series.push_back(sk::io::read_series(p));
  if (!in.datasets.empty() || !in.manifests.empty()) {
    json excluded;
    const auto ch = parse_channels(cfg.channels);
    sk::SeriesOptions opts;
    opts.threshold_kpa = cfg.threshold_kpa;
    for (const auto& t : load_inputs(in, excluded)) series.push_back(sk::compute_series(t, ch, opts));
  }
  if (series.empty()) throw CLI::ValidationError("trend", "give --series or --dataset/--manifest");
  json list = json::array();
  std::string csv = "take,channels,frames,cop_passthrough,bos_passthrough,trend_file\n";
  for (const auto& s : series) {
    const auto t = sk::lowpass_trend(s, cfg.cutoff_hz, order);
    const std::string file = "trend/" + s.take_id + "_" + s.channels.label() + ".csv";
    sk::io::write_series(fs::path(cfg.output_dir) / file, t);
    std::size_t pc = 0;
    std::size_t pb = 0;
    for (const auto& fr : t.frames) {
      pc += fr.cop_passthrough ? 1 : 0;
      pb += fr.bos_passthrough ? 1 : 0;
    }
    csv += s.take_id + "," + s.channels.label() + "," + std::to_string(t.frames.size()) + "," +
           std::to_string(pc) + "," + std::to_string(pb) + "," + file + "\n";
    list.push_back({{"take", s.take_id}, {"file", file}, {"cop_passthrough", pc}, {"bos_passthrough", pb}});
  }
  sk::io::write_text(fs::path(cfg.output_dir) / "trend.csv", csv);
  write_json(cfg, "trend.json", {{"trends", list}, {"order", order}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stabilikit: CoM / CoP / BoS stability toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  Inputs in;
  std::string models_dir;

  const auto common = [&](CLI::App* c) {
    c->add_option("--out", cfg.output_dir, "Output directory")->capture_default_str();
    c->add_option("--seed", cfg.seed, "Seed (STABILIKIT_SEED overrides)")->capture_default_str();
  };

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate synthetic takes");
  common(c_synth);
  c_synth->add_option("--subjects", synth.subjects)->check(CLI::Range(1, 1000))->capture_default_str();
  c_synth->add_option("--programs", synth.programs,
                      "static_stance, sway, weight_shift, single_support_lift, lunge");
  c_synth->add_option("--duration", synth.duration_s, "Seconds per take")
      ->check(CLI::PositiveNumber)->capture_default_str();
  c_synth->add_option("--pixel-noise", synth.noise.pixel_px)->check(CLI::NonNegativeNumber);
  c_synth->add_option("--joint-noise", synth.noise.joint_mm)->check(CLI::NonNegativeNumber);
  c_synth->add_option("--pressure-noise", synth.noise.pressure_kpa)->check(CLI::NonNegativeNumber);
  c_synth->add_option("--com-noise", synth.noise.com_mm)->check(CLI::NonNegativeNumber);
  c_synth->add_option("--dropout", synth.noise.dropout)->check(CLI::Range(0.0, 1.0));

  std::string tri_manifest;
  auto* c_tri = app.add_subcommand("triangulate", "Triangulate a take's 2D detections");
  common(c_tri);
  c_tri->add_option("--manifest", tri_manifest)->required();

  sk::TrainConfig tc;
  bool no_loso = false;
  auto* c_train = app.add_subcommand("train-com", "Train CoMNet (leave-one-subject-out)");
  common(c_train);
  add_inputs(c_train, in);
  c_train->add_option("--epochs", tc.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  c_train->add_option("--lr", tc.initial_lr)->check(CLI::PositiveNumber)->capture_default_str();
  c_train->add_option("--batch", tc.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  c_train->add_option("--width", tc.width)->check(CLI::PositiveNumber)->capture_default_str();
  c_train->add_option("--dropout", tc.dropout)->check(CLI::Range(0.0, 0.99))->capture_default_str();
  c_train->add_flag("--no-loso", no_loso, "Train a single model on every take");

  auto* c_eval = app.add_subcommand("com-eval", "CoM error statistics");
  common(c_eval);
  add_inputs(c_eval, in);
  c_eval->add_option("--models", models_dir, "Directory with comnet_<subject>.bin");

  auto* c_stab = app.add_subcommand("stability", "Per-take CoMtoCoP / CoMtoBoS series");
  common(c_stab);
  add_inputs(c_stab, in);
  c_stab->add_option("--channels", cfg.channels, "pressure-localization-CoM, e.g. GT-IM-GT")
      ->capture_default_str();
  c_stab->add_option("--threshold", cfg.threshold_kpa)->check(CLI::NonNegativeNumber)->capture_default_str();
  c_stab->add_option("--models", models_dir, "Directory with comnet_<subject>.bin");

  std::string loc = "GT";
  std::string metric = "cop_error";
  auto* c_sweep = app.add_subcommand("sweep", "CoP error / BoS IoU over pressure thresholds");
  common(c_sweep);
  add_inputs(c_sweep, in);
  c_sweep->add_option("--localization", loc, "GT, HP or OP")->capture_default_str();
  c_sweep->add_option("--metric", metric, "cop_error or bos_iou")->capture_default_str();
  c_sweep->add_option("--thresholds", cfg.sweep_grid, "kPa, strictly increasing")->delimiter(',');

  double min_valid = 0.9;
  auto* c_study = app.add_subcommand("study", "Correlation of every GT/IM combination");
  common(c_study);
  add_inputs(c_study, in);
  c_study->add_option("--threshold", cfg.threshold_kpa)->check(CLI::NonNegativeNumber)->capture_default_str();
  c_study->add_option("--min-valid-fraction", min_valid)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  c_study->add_option("--models", models_dir, "Directory with comnet_<subject>.bin");

  std::vector<std::string> series_files;
  int order = sk::kDefaultTrendOrder;
  auto* c_trend = app.add_subcommand("trend", "Zero-phase low-pass trend of metric series");
  common(c_trend);
  add_inputs(c_trend, in);
  c_trend->add_option("--series", series_files, "Series CSV from `stability`");
  c_trend->add_option("--cutoff", cfg.cutoff_hz)->check(CLI::PositiveNumber)->capture_default_str();
  c_trend->add_option("--order", order)->check(CLI::Range(1, 12))->capture_default_str();
  c_trend->add_option("--channels", cfg.channels)->capture_default_str();
  c_trend->add_option("--threshold", cfg.threshold_kpa)->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cfg.seed = effective_seed(cfg.seed);
    cfg.loso = !no_loso;
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    if (*c_synth) run_synth(cfg, synth);
    if (*c_tri) run_triangulate(cfg, tri_manifest);
    if (*c_train) run_train_com(cfg, in, tc);
    if (*c_eval) run_com_eval(cfg, in, models_dir);
    if (*c_stab) run_stability(cfg, in, models_dir);
    if (*c_sweep) run_sweep(cfg, in, loc, metric);
    if (*c_study) run_study(cfg, in, models_dir, min_valid);
    if (*c_trend) run_trend(cfg, series_files, in, order);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  } catch (const sk::Error& e) {
    std::cerr << json{{"error", sk::to_string(e.code())}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
