#pragma once

// Gait sequences on disk.
//
// Skeleton CSV, one file per sequence:
//   frame,j0x,j0y,j0z,j1x,...,j24z
//   0,0.01,0.95,2.5,...
// Frame numbers are consecutive and ascending. Joint j follows the Kinect-2
// enumeration (see joint_name()).
//
// A dataset directory holds those CSVs plus dataset.json:
//   {"format_version": 1,
//    "sequences": [{"file": "s01_normal.csv", "subject": "s01", "gait": "normal"}, ...]}
// where "gait" is "normal", "sole_pad:<cm>" or "ankle_weight:<kg>".

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gaitae/evalmetrics.hpp"
#include "gaitae/skeleton.hpp"

namespace gaitae {

struct GaitKind {
  enum class Type { normal, sole_pad, ankle_weight };
  Type type = Type::normal;
  double magnitude = 0.0;  // centimeters of sole pad or kilograms of ankle weight

  static GaitKind normal() { return {}; }
  static GaitKind sole_pad(double cm) { return {Type::sole_pad, cm}; }
  static GaitKind ankle_weight(double kg) { return {Type::ankle_weight, kg}; }

  Label label() const { return type == Type::normal ? Label::normal : Label::abnormal; }
  std::string to_string() const;
  static GaitKind parse(const std::string& text);

  friend bool operator==(const GaitKind&, const GaitKind&) = default;
};

struct GaitSequence {
  std::string subject_id;
  GaitKind gait;
  std::vector<RawSkeleton> frames;

  Label label() const { return gait.label(); }
  // Nonempty, consecutive ascending frame indices, every frame valid.
  void validate() const;
  // Stable name used for output files, e.g. "s03_sole_pad-10".
  std::string name() const;
};

std::string sequence_to_csv(const GaitSequence& seq);
// Parses frames only; subject and gait come from the dataset index.
std::vector<RawSkeleton> frames_from_csv(const std::string& text, const std::string& source = "<csv>");

void write_sequence(const std::filesystem::path& path, const GaitSequence& seq);
GaitSequence load_sequence(const std::filesystem::path& path, std::string subject_id = "",
                           GaitKind gait = GaitKind::normal());

struct DatasetEntry {
  std::filesystem::path file;  // relative to the dataset directory
  std::string subject_id;
  GaitKind gait;
};

void write_dataset(const std::filesystem::path& dir, const std::vector<GaitSequence>& sequences);
std::vector<DatasetEntry> read_dataset_index(const std::filesystem::path& dir);
std::vector<GaitSequence> load_dataset(const std::filesystem::path& dir);

// FNV-1a over the frame indices and coordinate bit patterns.
std::uint64_t sequence_hash(const GaitSequence& seq);
std::string hash_hex(std::uint64_t h);

}  // namespace gaitae
