// gaitae command-line interface.
//
//   gaitae synth            generate a synthetic dataset directory
//   gaitae train            train the three axis models on normal gaits
//   gaitae score            write abnormality indices for sequences
//   gaitae eval             evaluate scored sequences (AUC, EER, ...)
//   gaitae inspect-filters  render first-layer weights as images
//   gaitae run              full experiment from a manifest
//
// On failure the exit code is nonzero and stderr carries
//   {"error": {"kind": "<kind>", "message": "<text>"}}

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "gaitae/dataset.hpp"
#include "gaitae/error.hpp"
#include "gaitae/experiment.hpp"
#include "gaitae/filters.hpp"
#include "gaitae/model_io.hpp"
#include "gaitae/synth.hpp"

using namespace gaitae;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int fail(std::string_view kind, const std::string& message, int code) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << std::endl;
  return code;
}

std::set<std::string> split_list(const std::string& text) {
  std::set<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

// Training flags shared by train and run; unset flags keep the manifest value.
struct TrainFlags {
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> learning_rate;
  std::optional<double> rho;
  std::optional<double> sparsity_weight;
  std::optional<double> l2_weight;
  std::optional<std::uint64_t> seed;
  std::optional<bool> momentum;

  void add(CLI::App* app) {
    app->add_option("--epochs", epochs, "Training epochs");
    app->add_option("--batch-size", batch_size, "Mini-batch size");
    app->add_option("--learning-rate", learning_rate, "SGD step size");
    app->add_option("--rho", rho, "Target mean activation of the sparsity layer");
    app->add_option("--sparsity-weight", sparsity_weight, "Weight of the sparsity penalty");
    app->add_option("--l2-weight", l2_weight, "Weight of the L2 penalty");
    app->add_option("--seed", seed, "Base training seed (axis k uses seed + k)");
    app->add_option("--momentum", momentum, "Use momentum 0.9 (true/false)");
  }

  void apply(TrainConfig& c) const {
    if (epochs) c.epochs = *epochs;
    if (batch_size) c.batch_size = *batch_size;
    if (learning_rate) c.learning_rate = *learning_rate;
    if (rho) c.rho = *rho;
    if (sparsity_weight) c.sparsity_weight = *sparsity_weight;
    if (l2_weight) c.l2_weight = *l2_weight;
    if (seed) c.seed = *seed;
    if (momentum) c.momentum = *momentum;
    c.validate();
  }
};

Manifest base_manifest(const std::string& path) {
  return path.empty() ? Manifest::defaults() : load_manifest(path);
}

std::vector<GaitSequence> manifest_data(const Manifest& m, const std::string& data_dir) {
  if (!data_dir.empty()) return load_dataset(data_dir);
  return m.synth ? synth_dataset(*m.synth) : load_dataset(m.data_dir);
}

// synth ---------------------------------------------------------------------

struct SynthArgs {
  std::string manifest;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> subjects;
  std::optional<std::size_t> frames;
  std::optional<double> noise;
  std::optional<bool> subject_variation;
  std::vector<std::string> variants;
};

void run_synth(const SynthArgs& a) {
  const Manifest m = base_manifest(a.manifest);
  SynthPlan plan = m.synth.value_or(SynthPlan{});
  if (a.seed) plan.seed = *a.seed;
  if (a.subjects) plan.subjects = *a.subjects;
  if (a.frames) plan.n_frames = *a.frames;
  if (a.noise) plan.noise_sigma = *a.noise;
  if (a.subject_variation) plan.subject_variation = *a.subject_variation;
  if (!a.variants.empty()) {
    plan.variants.clear();
    for (const auto& v : a.variants) plan.variants.push_back(GaitKind::parse(v));
  }
  plan.validate();
  const auto data = synth_dataset(plan);
  write_dataset(a.out, data);
  std::cout << json{{"dataset", a.out}, {"sequences", data.size()}, {"frames_per_sequence", plan.n_frames}}.dump()
            << std::endl;
}

// train ---------------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string data;
  std::string out;
  std::string subjects;
  TrainFlags flags;
};

void run_train(const TrainArgs& a) {
  Manifest m = base_manifest(a.manifest);
  a.flags.apply(m.train);
  const std::set<std::string> subjects = a.subjects.empty() ? m.split.train_subjects : split_list(a.subjects);
  const auto data = manifest_data(m, a.data);
  std::vector<const GaitSequence*> normals;
  for (const auto& s : data) {
    if (subjects.count(s.subject_id) && s.label() == Label::normal) normals.push_back(&s);
  }
  if (normals.empty()) throw Error(ErrorKind::argument, "no normal sequences for the selected training subjects");
  const TrainedBundle t = train_bundle(normals, m.train);
  save_bundle(a.out, t.bundle);
  write_training_stats(fs::path(a.out) / "training", t.stats);
  const FusionWeights& w = t.bundle.weights();
  std::cout << json{{"models", a.out},
                    {"training_frames", t.training_frames},
                    {"train_mse",
                     {{"x", *t.bundle.model(Axis::X).train_mse},
                      {"y", *t.bundle.model(Axis::Y).train_mse},
                      {"z", *t.bundle.model(Axis::Z).train_mse}}},
                    {"fusion_weights", {{"x", w.x}, {"y", w.y}, {"z", w.z}}}}
                   .dump()
            << std::endl;
}

// score ---------------------------------------------------------------------

struct ScoreArgs {
  std::string models;
  std::string out;
  std::string data;
  std::string input;
  std::string subjects;
  std::string subject = "unknown";
  std::string gait = "normal";
  std::size_t segment_length = kDefaultSegmentLength;
};

void run_score(const ScoreArgs& a) {
  if (a.data.empty() == a.input.empty()) throw Error(ErrorKind::argument, "give exactly one of --data or --input");
  const ScorerBundle bundle = load_bundle(a.models);
  std::vector<GaitSequence> seqs;
  if (!a.input.empty()) {
    seqs.push_back(load_sequence(a.input, a.subject, GaitKind::parse(a.gait)));
  } else {
    const std::set<std::string> keep = split_list(a.subjects);
    for (auto& s : load_dataset(a.data)) {
      if (keep.empty() || keep.count(s.subject_id)) seqs.push_back(std::move(s));
    }
  }
  if (seqs.empty()) throw Error(ErrorKind::argument, "no sequences to score");
  json summary = json::array();
  for (const auto& seq : seqs) {
    const SequenceScores s = score_sequence(bundle, seq, a.segment_length);
    write_sequence_scores(fs::path(a.out) / s.name, s, seq.frames.front().frame_index);
    summary.push_back({{"sequence", s.name},
                       {"label", label_name(s.label())},
                       {"per_sequence", s.weighted.per_sequence},
                       {"degenerate_frames", s.degenerate_frames}});
  }
  std::cout << json{{"scores", a.out}, {"sequences", summary}}.dump() << std::endl;
}

// eval ----------------------------------------------------------------------

struct EvalArgs {
  std::string scores;
  std::string out;
};

void run_eval(const EvalArgs& a) {
  if (!fs::is_directory(a.scores)) throw Error(ErrorKind::io, "not a directory: " + a.scores);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.scores)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorKind::argument, "no score files in " + a.scores);
  std::vector<SequenceScores> scored;
  for (const auto& f : files) scored.push_back(read_sequence_scores(f));
  const EvaluationResult ev = evaluate_sequences(scored);
  if (!a.out.empty()) {
    write_evaluation(a.out, ev);
    write_text_file(fs::path(a.out) / "evaluation.json", evaluation_to_json(ev).dump(2) + "\n");
  }
  std::cout << format_report_table(ev.rows);
}

// inspect-filters -----------------------------------------------------------

struct FilterArgs {
  std::string model;
  std::string out;
};

void run_filters(const FilterArgs& a) {
  const AxisModel m = load_model(a.model);
  const auto images = export_second_layer_filters(m);
  const fs::path out(a.out);
  for (std::size_t u = 0; u < images.size(); ++u) {
    char name[32];
    std::snprintf(name, sizeof name, "unit_%03zu.pgm", u);
    write_pgm(out / name, images[u]);
  }
  write_filter_csv(out / "filters.csv", m);
  std::cout << json{{"filters", a.out}, {"units", images.size()}, {"axis", axis_name(m.axis)}}.dump() << std::endl;
}

// run -----------------------------------------------------------------------

struct RunArgs {
  std::string manifest;
  std::string out;
  std::string data;
  std::optional<std::size_t> segment_length;
  TrainFlags flags;
};

void run_run(const RunArgs& a) {
  Manifest m = base_manifest(a.manifest);
  if (!a.out.empty()) m.output_dir = a.out;
  if (!a.data.empty()) {
    m.data_dir = a.data;
    m.synth.reset();
  }
  if (a.segment_length) m.segment_length = *a.segment_length;
  a.flags.apply(m.train);
  m.validate();
  const ExperimentReport r = run_experiment(m);
  std::cout << format_report_table(r.evaluation.rows);
  if (!m.output_dir.empty()) std::cout << "outputs written to " << m.output_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeleton gait abnormality scoring with per-axis sparse auto-encoders"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic gait dataset directory");
  c_synth->add_option("--manifest", synth.manifest, "Take the synth plan from this manifest");
  c_synth->add_option("--out", synth.out, "Dataset directory")->required();
  c_synth->add_option("--seed", synth.seed, "Generator seed");
  c_synth->add_option("--subjects", synth.subjects, "Number of subjects");
  c_synth->add_option("--frames", synth.frames, "Frames per sequence");
  c_synth->add_option("--noise", synth.noise, "Coordinate noise sigma (m)");
  c_synth->add_option("--subject-variation", synth.subject_variation, "Vary bodies across subjects (true/false)");
  c_synth->add_option("--variant", synth.variants, "Gait variant, e.g. normal, sole_pad:10, ankle_weight:4");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train the X/Y/Z models on normal gaits");
  c_train->add_option("--manifest", train.manifest, "Manifest supplying data, split and training config");
  c_train->add_option("--data", train.data, "Dataset directory (overrides the manifest data)");
  c_train->add_option("--out", train.out, "Model directory")->required();
  c_train->add_option("--subjects", train.subjects, "Comma-separated training subjects");
  train.flags.add(c_train);

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Compute abnormality indices");
  c_score->add_option("--models", score.models, "Model directory")->required();
  c_score->add_option("--out", score.out, "Output directory for index files")->required();
  c_score->add_option("--data", score.data, "Dataset directory");
  c_score->add_option("--subjects", score.subjects, "Comma-separated subjects to score (default all)");
  c_score->add_option("--input", score.input, "Single skeleton CSV");
  c_score->add_option("--subject", score.subject, "Subject id for --input");
  c_score->add_option("--gait", score.gait, "Gait label for --input");
  c_score->add_option("--segment-length", score.segment_length, "Frames per segment");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Evaluate scored sequences");
  c_eval->add_option("--scores", eval.scores, "Directory of index files written by score")->required();
  c_eval->add_option("--out", eval.out, "Directory for report.txt, evaluation.json and ROC curves");

  FilterArgs filters;
  auto* c_filters = app.add_subcommand("inspect-filters", "Export first-layer filters as images and CSV");
  c_filters->add_option("--model", filters.model, "Model file")->required();
  c_filters->add_option("--out", filters.out, "Output directory")->required();

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "Run a full experiment");
  c_run->add_option("--manifest", run.manifest, "Manifest file (defaults when omitted)");
  c_run->add_option("--out", run.out, "Output directory (overrides the manifest)");
  c_run->add_option("--data", run.data, "Dataset directory (overrides the manifest data)");
  c_run->add_option("--segment-length", run.segment_length, "Frames per segment");
  run.flags.add(c_run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("argument", e.what(), 2);
  }

  try {
    if (*c_synth) run_synth(synth);
    else if (*c_train) run_train(train);
    else if (*c_score) run_score(score);
    else if (*c_eval) run_eval(eval);
    else if (*c_filters) run_filters(filters);
    else if (*c_run) run_run(run);
  } catch (const Error& e) {
    return fail(error_kind_name(e.kind()), e.what(), e.kind() == ErrorKind::argument ? 2 : 1);
  } catch (const fs::filesystem_error& e) {
    return fail("io", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
