#include "gaitae/experiment.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <sstream>
#include <thread>

#include "gaitae/error.hpp"
#include "gaitae/model_io.hpp"

namespace gaitae {

namespace {

using nlohmann::json;

constexpr const char* kModelFiles[] = {"model_x.json", "model_y.json", "model_z.json"};

json synth_plan_to_json(const SynthPlan& p) {
  json variants = json::array();
  for (const auto& v : p.variants) variants.push_back(v.to_string());
  return {{"seed", p.seed},
          {"subjects", p.subjects},
          {"n_frames", p.n_frames},
          {"noise_sigma", p.noise_sigma},
          {"subject_variation", p.subject_variation},
          {"variants", variants}};
}

SynthPlan synth_plan_from_json(const json& j) {
  SynthPlan p;
  p.seed = j.value("seed", p.seed);
  p.subjects = j.value("subjects", p.subjects);
  p.n_frames = j.value("n_frames", p.n_frames);
  p.noise_sigma = j.value("noise_sigma", p.noise_sigma);
  p.subject_variation = j.value("subject_variation", p.subject_variation);
  if (j.contains("variants")) {
    p.variants.clear();
    for (const auto& v : j.at("variants")) p.variants.push_back(GaitKind::parse(v.get<std::string>()));
  }
  return p;
}

json series_json(const IndexSeries& s, bool with_frames) {
  json j = {{"per_segment", s.per_segment}, {"per_sequence", s.per_sequence}};
  if (with_frames) j["per_frame"] = s.per_frame;
  return j;
}

std::vector<LabeledScore> labeled(const std::vector<SequenceScores>& scored,
                                  const std::function<void(const SequenceScores&, std::vector<double>&)>& pick) {
  std::vector<LabeledScore> out;
  std::vector<double> values;
  for (const auto& s : scored) {
    values.clear();
    pick(s, values);
    for (double v : values) out.push_back({v, s.label()});
  }
  return out;
}

std::string row_slug(const std::string& name) {
  std::string slug;
  for (char c : name) slug += (c == ' ') ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return slug;
}

}  // namespace

void ExperimentSplit::validate() const {
  if (train_subjects.empty()) throw Error(ErrorKind::argument, "split has no training subjects");
  if (test_subjects.empty()) throw Error(ErrorKind::argument, "split has no test subjects");
  for (const auto& s : train_subjects) {
    if (test_subjects.count(s)) throw Error(ErrorKind::argument, "subject " + s + " is in both train and test sets");
  }
}

Manifest Manifest::defaults() {
  Manifest m;
  m.synth = SynthPlan{};
  m.split.train_subjects = {"s1", "s2", "s3", "s4", "s5"};
  m.split.test_subjects = {"s6", "s7", "s8", "s9"};
  m.train.seed = 7;
  m.train.learning_rate = 0.01;
  m.train.momentum = true;
  return m;
}

void Manifest::validate() const {
  if (synth.has_value() == !data_dir.empty()) {
    throw Error(ErrorKind::argument, "manifest needs exactly one data source (synth or dir)");
  }
  if (synth) synth->validate();
  split.validate();
  train.validate();
  if (segment_length == 0) throw Error(ErrorKind::argument, "segment_length must be >= 1");
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  c.rho = j.value("rho", c.rho);
  c.sparsity_weight = j.value("sparsity_weight", c.sparsity_weight);
  c.l2_weight = j.value("l2_weight", c.l2_weight);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.momentum = j.value("momentum", c.momentum);
  return c;
}

json train_config_to_json(const TrainConfig& c) {
  return {{"rho", c.rho},
          {"sparsity_weight", c.sparsity_weight},
          {"l2_weight", c.l2_weight},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"momentum", c.momentum}};
}

Manifest manifest_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    if (j.value("format_version", 1) != 1) throw Error(ErrorKind::parse, "unsupported manifest format_version");
    Manifest m = Manifest::defaults();
    if (j.contains("output_dir")) {
      std::filesystem::path out = j.at("output_dir").get<std::string>();
      m.output_dir = out.is_relative() && !base_dir.empty() ? base_dir / out : out;
    }
    if (j.contains("data")) {
      const json& d = j.at("data");
      if (d.contains("dir")) {
        std::filesystem::path dir = d.at("dir").get<std::string>();
        m.data_dir = dir.is_relative() && !base_dir.empty() ? base_dir / dir : dir;
        m.synth.reset();
      }
      if (d.contains("synth")) m.synth = synth_plan_from_json(d.at("synth"));
    }
    if (j.contains("split")) {
      const json& s = j.at("split");
      if (s.contains("train_subjects")) m.split.train_subjects = s.at("train_subjects").get<std::set<std::string>>();
      if (s.contains("test_subjects")) m.split.test_subjects = s.at("test_subjects").get<std::set<std::string>>();
    }
    if (j.contains("train")) m.train = train_config_from_json(j.at("train"), m.train);
    m.segment_length = j.value("segment_length", m.segment_length);
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("manifest: ") + e.what());
  }
}

json manifest_to_json(const Manifest& m) {
  json j = {{"format_version", 1},
            {"output_dir", m.output_dir.string()},
            {"split", {{"train_subjects", m.split.train_subjects}, {"test_subjects", m.split.test_subjects}}},
            {"train", train_config_to_json(m.train)},
            {"segment_length", m.segment_length}};
  if (m.synth) {
    j["data"] = {{"synth", synth_plan_to_json(*m.synth)}};
  } else {
    j["data"] = {{"dir", m.data_dir.string()}};
  }
  return j;
}

Manifest load_manifest(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  return manifest_from_json(j, path.parent_path());
}

TrainConfig axis_train_config(const TrainConfig& cfg, Axis axis) {
  TrainConfig c = cfg;
  c.seed = cfg.seed + static_cast<std::uint64_t>(axis);
  return c;
}

TrainedBundle train_bundle(const std::vector<const GaitSequence*>& normal_sequences, const TrainConfig& cfg) {
  cfg.validate();
  std::vector<PostureTriplet> postures;
  for (const GaitSequence* seq : normal_sequences) {
    if (seq->label() != Label::normal) {
      throw Error(ErrorKind::argument, "training data must be normal gaits only; got " + seq->name());
    }
    for (const auto& f : seq->frames) postures.push_back(preprocess(f));
  }
  if (postures.empty()) throw Error(ErrorKind::training, "no training frames");

  // Independent models, one worker each.
  std::array<std::future<TrainResult>, 3> jobs;
  for (Axis a : kAxes) {
    jobs[static_cast<int>(a)] = std::async(std::launch::async, [&postures, &cfg, a] {
      return train(stack_axis(postures, a), a, axis_train_config(cfg, a));
    });
  }
  std::array<TrainResult, 3> results;
  for (int k = 0; k < 3; ++k) results[k] = jobs[k].get();

  TrainedBundle out{ScorerBundle(std::move(results[0].model), std::move(results[1].model),
                                 std::move(results[2].model)),
                    {std::move(results[0].stats), std::move(results[1].stats), std::move(results[2].stats)},
                    postures.size()};
  return out;
}

void save_bundle(const std::filesystem::path& dir, const ScorerBundle& bundle) {
  for (Axis a : kAxes) save_model(dir / kModelFiles[static_cast<int>(a)], bundle.model(a));
  const FusionWeights& w = bundle.weights();
  json j = {{"fusion_weights", {{"x", w.x}, {"y", w.y}, {"z", w.z}}},
            {"train_mse",
             {{"x", *bundle.model(Axis::X).train_mse},
              {"y", *bundle.model(Axis::Y).train_mse},
              {"z", *bundle.model(Axis::Z).train_mse}}}};
  write_text_file(dir / "weights.json", j.dump(2) + "\n");
}

void write_training_stats(const std::filesystem::path& dir, const std::array<std::vector<BatchStats>, 3>& stats) {
  for (Axis a : kAxes) {
    std::string csv = "epoch,batch,recon_loss,kl_penalty,l2_term,total_loss\n";
    for (const auto& s : stats[static_cast<int>(a)]) {
      csv += std::to_string(s.epoch) + ',' + std::to_string(s.batch) + ',' + format_double(s.recon_loss) + ',' +
             format_double(s.kl_penalty) + ',' + format_double(s.l2_term) + ',' + format_double(s.total_loss) + '\n';
    }
    std::string axis(axis_name(a));
    std::transform(axis.begin(), axis.end(), axis.begin(), [](char c) { return static_cast<char>(std::tolower(c)); });
    write_text_file(dir / ("batch_stats_" + axis + ".csv"), csv);
  }
}

ScorerBundle load_bundle(const std::filesystem::path& dir) {
  return ScorerBundle(load_model(dir / kModelFiles[0]), load_model(dir / kModelFiles[1]),
                      load_model(dir / kModelFiles[2]));
}

SequenceScores score_sequence(const ScorerBundle& bundle, const GaitSequence& seq, std::size_t segment_length) {
  seq.validate();
  std::vector<PostureTriplet> postures;
  postures.reserve(seq.frames.size());
  SequenceScores s;
  for (const auto& f : seq.frames) {
    postures.push_back(preprocess(f));
    if (postures.back().any_degenerate()) ++s.degenerate_frames;
  }
  s.name = seq.name();
  s.subject_id = seq.subject_id;
  s.gait = seq.gait;
  s.weights = bundle.weights();
  s.axis_errors = bundle.axis_errors(postures);

  std::vector<double> weighted;
  std::vector<double> unweighted;
  for (const auto& e : s.axis_errors) {
    weighted.push_back(fuse(e, s.weights, FusionMode::weighted));
    unweighted.push_back(fuse(e, s.weights, FusionMode::unweighted));
  }
  s.weighted = aggregate(std::move(weighted), segment_length);
  s.unweighted = aggregate(std::move(unweighted), segment_length);
  return s;
}

void write_sequence_scores(const std::filesystem::path& prefix, const SequenceScores& s, std::uint64_t first_frame) {
  std::string csv = "frame,index\n";
  for (std::size_t i = 0; i < s.weighted.per_frame.size(); ++i) {
    csv += std::to_string(first_frame + i) + ',' + format_double(s.weighted.per_frame[i]) + '\n';
  }
  std::filesystem::path csv_path = prefix;
  csv_path += ".csv";
  write_text_file(csv_path, csv);

  json axes = {{"x", json::array()}, {"y", json::array()}, {"z", json::array()}};
  for (const auto& e : s.axis_errors) {
    axes["x"].push_back(e.x);
    axes["y"].push_back(e.y);
    axes["z"].push_back(e.z);
  }
  json j = {{"sequence", s.name},
            {"subject", s.subject_id},
            {"gait", s.gait.to_string()},
            {"label", label_name(s.label())},
            {"frames", s.weighted.per_frame.size()},
            {"first_frame", first_frame},
            {"index_csv", csv_path.filename().string()},
            {"segment_length", s.weighted.segment_length},
            {"degenerate_frames", s.degenerate_frames},
            {"fusion_weights", {{"x", s.weights.x}, {"y", s.weights.y}, {"z", s.weights.z}}},
            {"weighted", series_json(s.weighted, false)},
            {"unweighted", series_json(s.unweighted, true)},
            {"axis_errors", axes}};
  std::filesystem::path json_path = prefix;
  json_path += ".json";
  write_text_file(json_path, j.dump(2) + "\n");
}

SequenceScores read_sequence_scores(const std::filesystem::path& json_path) {
  try {
    const json j = json::parse(read_text_file(json_path));
    SequenceScores s;
    s.name = j.at("sequence").get<std::string>();
    s.subject_id = j.at("subject").get<std::string>();
    s.gait = GaitKind::parse(j.at("gait").get<std::string>());
    const auto& w = j.at("fusion_weights");
    s.weights = {w.at("x").get<double>(), w.at("y").get<double>(), w.at("z").get<double>()};
    s.degenerate_frames = j.value("degenerate_frames", std::size_t{0});
    const std::size_t segment_length = j.at("segment_length").get<std::size_t>();

    const auto ax = j.at("axis_errors").at("x").get<std::vector<double>>();
    const auto ay = j.at("axis_errors").at("y").get<std::vector<double>>();
    const auto az = j.at("axis_errors").at("z").get<std::vector<double>>();
    if (ax.size() != ay.size() || ax.size() != az.size()) {
      throw Error(ErrorKind::parse, json_path.string() + ": axis error series differ in length");
    }
    for (std::size_t i = 0; i < ax.size(); ++i) s.axis_errors.push_back({ax[i], ay[i], az[i]});

    std::vector<double> weighted;
    std::istringstream csv(read_text_file(json_path.parent_path() / j.at("index_csv").get<std::string>()));
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw Error(ErrorKind::parse, json_path.string() + ": bad index CSV row");
      weighted.push_back(std::stod(line.substr(comma + 1)));
    }
    if (weighted.size() != s.axis_errors.size()) {
      throw Error(ErrorKind::parse, json_path.string() + ": index CSV length does not match");
    }
    s.weighted = aggregate(std::move(weighted), segment_length);
    s.unweighted = aggregate(j.at("unweighted").at("per_frame").get<std::vector<double>>(), segment_length);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, json_path.string() + ": " + e.what());
  }
}

EvaluationResult evaluate_sequences(const std::vector<SequenceScores>& scored) {
  using Pick = std::function<void(const SequenceScores&, std::vector<double>&)>;
  auto axis_pick = [](Axis a) -> Pick {
    return [a](const SequenceScores& s, std::vector<double>& v) {
      for (const auto& e : s.axis_errors) v.push_back(e[a]);
    };
  };
  auto frames = [](IndexSeries SequenceScores::*m) -> Pick {
    return [m](const SequenceScores& s, std::vector<double>& v) {
      const auto& f = (s.*m).per_frame;
      v.insert(v.end(), f.begin(), f.end());
    };
  };
  auto segments = [](IndexSeries SequenceScores::*m) -> Pick {
    return [m](const SequenceScores& s, std::vector<double>& v) {
      const auto& f = (s.*m).per_segment;
      v.insert(v.end(), f.begin(), f.end());
    };
  };
  auto sequence = [](IndexSeries SequenceScores::*m) -> Pick {
    return [m](const SequenceScores& s, std::vector<double>& v) { v.push_back((s.*m).per_sequence); };
  };

  const std::pair<std::string, Pick> rows[] = {
      {"X-axis model", axis_pick(Axis::X)},
      {"Y-axis model", axis_pick(Axis::Y)},
      {"Z-axis model", axis_pick(Axis::Z)},
      {"per-frame sum", frames(&SequenceScores::unweighted)},
      {"per-segment sum", segments(&SequenceScores::unweighted)},
      {"per-sequence sum", sequence(&SequenceScores::unweighted)},
      {"per-frame weighted sum", frames(&SequenceScores::weighted)},
      {"per-segment weighted sum", segments(&SequenceScores::weighted)},
      {"per-sequence weighted sum", sequence(&SequenceScores::weighted)},
  };

  EvaluationResult r;
  for (const auto& [name, pick] : rows) {
    const auto scores = labeled(scored, pick);
    RocCurve curve = roc(scores);
    r.rows.push_back({name, report_at_eer(curve, scores)});
    r.curves.push_back(std::move(curve));
  }
  return r;
}

json ExperimentReport::to_json() const {
  const json rows = evaluation_to_json(evaluation);
  json seqs = json::array();
  for (const auto& s : sequences) {
    seqs.push_back({{"sequence", s.name},
                    {"subject", s.subject_id},
                    {"gait", s.gait.to_string()},
                    {"label", label_name(s.label())},
                    {"weighted_per_sequence", s.weighted.per_sequence},
                    {"unweighted_per_sequence", s.unweighted.per_sequence}});
  }
  return {{"rows", rows},
          {"sequences", seqs},
          {"train_mse", {{"x", train_mse[0]}, {"y", train_mse[1]}, {"z", train_mse[2]}}},
          {"fusion_weights", {{"x", weights.x}, {"y", weights.y}, {"z", weights.z}}},
          {"first_epoch_loss", {{"x", first_epoch_loss[0]}, {"y", first_epoch_loss[1]}, {"z", first_epoch_loss[2]}}},
          {"final_epoch_loss", {{"x", final_epoch_loss[0]}, {"y", final_epoch_loss[1]}, {"z", final_epoch_loss[2]}}},
          {"training_frames", training_frames},
          {"manifest", resolved_manifest}};
}

json evaluation_to_json(const EvaluationResult& ev) {
  json rows = json::array();
  for (const auto& row : ev.rows) {
    json r = to_json(row.report);
    r["name"] = row.name;
    rows.push_back(r);
  }
  return rows;
}

void write_evaluation(const std::filesystem::path& dir, const EvaluationResult& ev) {
  for (std::size_t r = 0; r < ev.rows.size(); ++r) {
    write_text_file(dir / "roc" / (row_slug(ev.rows[r].name) + ".csv"), roc_to_csv(ev.curves[r]));
  }
  write_text_file(dir / "report.txt", format_report_table(ev.rows));
}

ExperimentReport run_experiment(const Manifest& manifest) {
  manifest.validate();
  const std::vector<GaitSequence> data =
      manifest.synth ? synth_dataset(*manifest.synth) : load_dataset(manifest.data_dir);
  return run_experiment(manifest, data);
}

ExperimentReport run_experiment(const Manifest& manifest, const std::vector<GaitSequence>& data) {
  manifest.validate();
  const ExperimentSplit& split = manifest.split;

  std::vector<const GaitSequence*> train_set;
  std::vector<const GaitSequence*> test_set;
  json hashes = json::object();
  for (const auto& seq : data) {
    hashes[seq.name()] = hash_hex(sequence_hash(seq));
    if (split.train_subjects.count(seq.subject_id)) {
      if (seq.label() == Label::normal) train_set.push_back(&seq);
    } else if (split.test_subjects.count(seq.subject_id)) {
      test_set.push_back(&seq);
    }
  }
  if (train_set.empty()) throw Error(ErrorKind::argument, "no normal sequences for the training subjects");
  if (test_set.empty()) throw Error(ErrorKind::argument, "no sequences for the test subjects");
  for (const GaitSequence* seq : train_set) {
    if (split.test_subjects.count(seq->subject_id)) {
      throw Error(ErrorKind::argument, "test subject " + seq->subject_id + " reached the training set");
    }
  }
  const bool has_normal = std::any_of(test_set.begin(), test_set.end(),
                                      [](const GaitSequence* s) { return s->label() == Label::normal; });
  const bool has_abnormal = std::any_of(test_set.begin(), test_set.end(),
                                        [](const GaitSequence* s) { return s->label() == Label::abnormal; });
  if (!has_normal || !has_abnormal) {
    throw Error(ErrorKind::argument, "test set must contain both normal and abnormal sequences");
  }

  TrainedBundle trained = train_bundle(train_set, manifest.train);
  const ScorerBundle& bundle = trained.bundle;

  ExperimentReport report;
  report.training_frames = trained.training_frames;
  report.weights = bundle.weights();
  for (Axis a : kAxes) {
    const int k = static_cast<int>(a);
    report.train_mse[k] = *bundle.model(a).train_mse;
    if (manifest.train.epochs > 0) {
      report.first_epoch_loss[k] = epoch_mean_loss(trained.stats[k], 0);
      report.final_epoch_loss[k] = epoch_mean_loss(trained.stats[k], manifest.train.epochs - 1);
    }
  }

  // Scoring is independent per sequence; each worker fills its own slots.
  report.sequences.resize(test_set.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), test_set.size()));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < test_set.size(); i += workers) {
        report.sequences[i] = score_sequence(bundle, *test_set[i], manifest.segment_length);
      }
    }));
  }
  for (auto& j : jobs) j.get();

  report.evaluation = evaluate_sequences(report.sequences);

  json resolved = manifest_to_json(manifest);
  json seeds = json::object();
  for (Axis a : kAxes) seeds[std::string(axis_name(a))] = axis_train_config(manifest.train, a).seed;
  resolved["axis_seeds"] = seeds;
  resolved["data_hashes"] = hashes;
  resolved["train_sequences"] = json::array();
  for (const auto* s : train_set) resolved["train_sequences"].push_back(s->name());
  resolved["test_sequences"] = json::array();
  for (const auto* s : test_set) resolved["test_sequences"].push_back(s->name());
  report.resolved_manifest = resolved;

  if (!manifest.output_dir.empty()) {
    const auto& out = manifest.output_dir;
    save_bundle(out / "models", bundle);
    write_training_stats(out / "training", trained.stats);
    for (std::size_t i = 0; i < test_set.size(); ++i) {
      write_sequence_scores(out / "indices" / report.sequences[i].name, report.sequences[i],
                            test_set[i]->frames.front().frame_index);
    }
    write_evaluation(out, report.evaluation);
    write_text_file(out / "report.json", report.to_json().dump(2) + "\n");
    write_text_file(out / "manifest.resolved.json", resolved.dump(2) + "\n");
  }
  return report;
}

}  // namespace gaitae
