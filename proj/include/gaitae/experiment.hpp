#pragma once

// Experiment orchestration: train the three axis models on normal gaits of
// the training subjects, score every test sequence, and evaluate the nine
// per-axis / sum / weighted-sum rows at frame, segment and sequence
// granularity.

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitae/autoencoder.hpp"
#include "gaitae/dataset.hpp"
#include "gaitae/evalmetrics.hpp"
#include "gaitae/index.hpp"
#include "gaitae/synth.hpp"

namespace gaitae {

struct ExperimentSplit {
  std::set<std::string> train_subjects;
  std::set<std::string> test_subjects;

  void validate() const;  // nonempty, disjoint
};

// Manifest file (JSON):
// {
//   "format_version": 1,
//   "output_dir": "runs/default",
//   "data": {"synth": {"seed": 2019, "subjects": 9, "n_frames": 1200, "noise_sigma": 0.005,
//                      "subject_variation": true,
//                      "variants": ["normal", "sole_pad:5", "sole_pad:10", "sole_pad:15", "ankle_weight:4"]}}
//        or {"dir": "path/to/dataset"},
//   "split": {"train_subjects": ["s1", ...], "test_subjects": ["s6", ...]},
//   "train": {"rho": 0.05, "sparsity_weight": 0.1, "l2_weight": 1e-4, "learning_rate": 0.01,
//             "batch_size": 64, "epochs": 200, "seed": 7, "momentum": true},
//   "segment_length": 20
// }
// Every field is optional; missing fields take the defaults above. The
// manifest's optimizer defaults (learning_rate 0.01 with momentum) differ
// from a bare TrainConfig.
struct Manifest {
  std::filesystem::path output_dir;
  std::optional<SynthPlan> synth;  // exactly one of synth / data_dir
  std::filesystem::path data_dir;
  ExperimentSplit split;
  TrainConfig train;
  std::size_t segment_length = kDefaultSegmentLength;

  static Manifest defaults();
  void validate() const;
};

Manifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json manifest_to_json(const Manifest& m);
Manifest load_manifest(const std::filesystem::path& path);

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});
nlohmann::json train_config_to_json(const TrainConfig& c);

// Axis k is trained with seed cfg.seed + k.
TrainConfig axis_train_config(const TrainConfig& cfg, Axis axis);

struct TrainedBundle {
  ScorerBundle bundle;
  std::array<std::vector<BatchStats>, 3> stats;
  std::size_t training_frames = 0;
};

// Trains on every frame of the given sequences; all must be normal gaits.
// The three axis models are trained concurrently.
TrainedBundle train_bundle(const std::vector<const GaitSequence*>& normal_sequences, const TrainConfig& cfg);

void save_bundle(const std::filesystem::path& dir, const ScorerBundle& bundle);
ScorerBundle load_bundle(const std::filesystem::path& dir);

// `<dir>/batch_stats_{x,y,z}.csv`, one row per mini-batch.
void write_training_stats(const std::filesystem::path& dir, const std::array<std::vector<BatchStats>, 3>& stats);

struct SequenceScores {
  std::string name;
  std::string subject_id;
  GaitKind gait;
  std::vector<AxisErrors> axis_errors;  // per frame
  IndexSeries weighted;
  IndexSeries unweighted;
  FusionWeights weights;
  std::size_t degenerate_frames = 0;

  Label label() const { return gait.label(); }
};

SequenceScores score_sequence(const ScorerBundle& bundle, const GaitSequence& seq,
                              std::size_t segment_length = kDefaultSegmentLength);

// `<prefix>.csv` (frame,index with the weighted per-frame index) and
// `<prefix>.json` (aggregates, fusion weights, unweighted and per-axis series).
void write_sequence_scores(const std::filesystem::path& prefix, const SequenceScores& s,
                           std::uint64_t first_frame = 0);
// Reads the JSON and its sibling CSV.
SequenceScores read_sequence_scores(const std::filesystem::path& json_path);

inline constexpr std::size_t kReportRows = 9;

struct EvaluationResult {
  std::vector<NamedReport> rows;  // kReportRows entries, coarse-to-fine order per fusion
  std::vector<RocCurve> curves;   // parallel to rows
};

// Rows: X/Y/Z-axis model (per frame), per-frame/segment/sequence sum,
// per-frame/segment/sequence weighted sum.
EvaluationResult evaluate_sequences(const std::vector<SequenceScores>& scored);

// One JSON object per row: the MetricReport fields plus "name".
nlohmann::json evaluation_to_json(const EvaluationResult& ev);

// `<dir>/roc/<row>.csv` for every row and the `<dir>/report.txt` table.
void write_evaluation(const std::filesystem::path& dir, const EvaluationResult& ev);

struct ExperimentReport {
  EvaluationResult evaluation;
  std::vector<SequenceScores> sequences;
  std::array<double, 3> train_mse{};
  FusionWeights weights;
  std::array<double, 3> first_epoch_loss{};
  std::array<double, 3> final_epoch_loss{};
  std::size_t training_frames = 0;
  nlohmann::json resolved_manifest;  // manifest plus seeds and data hashes

  nlohmann::json to_json() const;
};

// Trains, scores and evaluates. When manifest.output_dir is set, writes
// models/, indices/, roc/, training/, report.json, report.txt and
// manifest.resolved.json there.
ExperimentReport run_experiment(const Manifest& manifest);

// Same, on sequences already in memory.
ExperimentReport run_experiment(const Manifest& manifest, const std::vector<GaitSequence>& data);

}  // namespace gaitae
