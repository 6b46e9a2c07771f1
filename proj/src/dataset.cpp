#include "gaitae/dataset.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "gaitae/error.hpp"
#include "gaitae/model_io.hpp"

namespace gaitae {

namespace {

constexpr std::size_t kCsvColumns = 1 + 3 * kJointCount;

std::string format_magnitude(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Error parse_error(const std::string& source, std::size_t line, const std::string& what) {
  return Error(ErrorKind::parse, source + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
bool parse_number(std::string_view cell, T& out) {
  while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r')) cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end && !cell.empty();
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::string GaitKind::to_string() const {
  switch (type) {
    case Type::normal: return "normal";
    case Type::sole_pad: return "sole_pad:" + format_magnitude(magnitude);
    case Type::ankle_weight: return "ankle_weight:" + format_magnitude(magnitude);
  }
  return "normal";
}

GaitKind GaitKind::parse(const std::string& text) {
  if (text == "normal") return normal();
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::parse, "bad gait kind: " + text);
  double mag = 0.0;
  if (!parse_number(std::string_view(text).substr(colon + 1), mag) || !(mag >= 0.0)) {
    throw Error(ErrorKind::parse, "bad gait magnitude: " + text);
  }
  const std::string head = text.substr(0, colon);
  if (head == "sole_pad") return sole_pad(mag);
  if (head == "ankle_weight") return ankle_weight(mag);
  throw Error(ErrorKind::parse, "bad gait kind: " + text);
}

void GaitSequence::validate() const {
  if (frames.empty()) throw Error(ErrorKind::validation, "sequence " + name() + " has no frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    frames[i].validate();
    if (i > 0 && frames[i].frame_index != frames[i - 1].frame_index + 1) {
      throw Error(ErrorKind::validation, "sequence " + name() + ": frame " +
                                             std::to_string(frames[i].frame_index) + " does not follow frame " +
                                             std::to_string(frames[i - 1].frame_index));
    }
  }
}

std::string GaitSequence::name() const {
  std::string kind = gait.to_string();
  for (char& c : kind) {
    if (c == ':') c = '-';
  }
  return (subject_id.empty() ? std::string("seq") : subject_id) + "_" + kind;
}

std::string sequence_to_csv(const GaitSequence& seq) {
  std::string out = "frame";
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const std::string p = ",j" + std::to_string(j);
    out += p + "x" + p + "y" + p + "z";
  }
  out += '\n';
  for (const auto& f : seq.frames) {
    out += std::to_string(f.frame_index);
    for (const auto& p : f.joints) {
      out += ',' + format_double(p.x) + ',' + format_double(p.y) + ',' + format_double(p.z);
    }
    out += '\n';
  }
  return out;
}

std::vector<RawSkeleton> frames_from_csv(const std::string& text, const std::string& source) {
  std::vector<RawSkeleton> frames;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::array<double, 3 * kJointCount> coords{};

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != kCsvColumns) {
      throw parse_error(source, line_no, "expected " + std::to_string(kCsvColumns) + " columns, got " +
                                             std::to_string(cells.size()));
    }
    if (line_no == 1) {
      if (cells[0] != "frame") throw parse_error(source, line_no, "missing header row");
      continue;
    }
    std::uint64_t frame = 0;
    if (!parse_number(cells[0], frame)) throw parse_error(source, line_no, "bad frame number");
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (!parse_number(cells[i + 1], coords[i])) {
        throw parse_error(source, line_no, "bad number in column " + std::to_string(i + 2));
      }
    }
    try {
      frames.push_back(RawSkeleton::from_coordinates(frame, coords));
    } catch (const Error& e) {
      throw parse_error(source, line_no, e.what());
    }
    if (frames.size() > 1 && frame != frames[frames.size() - 2].frame_index + 1) {
      throw parse_error(source, line_no, "frame " + std::to_string(frame) + " is not consecutive");
    }
  }
  if (frames.empty()) throw Error(ErrorKind::parse, source + ": no frames");
  return frames;
}

void write_sequence(const std::filesystem::path& path, const GaitSequence& seq) {
  seq.validate();
  write_text_file(path, sequence_to_csv(seq));
}

GaitSequence load_sequence(const std::filesystem::path& path, std::string subject_id, GaitKind gait) {
  GaitSequence seq;
  seq.subject_id = std::move(subject_id);
  seq.gait = gait;
  seq.frames = frames_from_csv(read_text_file(path), path.string());
  seq.validate();
  return seq;
}

void write_dataset(const std::filesystem::path& dir, const std::vector<GaitSequence>& sequences) {
  std::filesystem::create_directories(dir);
  nlohmann::json index = {{"format_version", 1}, {"sequences", nlohmann::json::array()}};
  for (const auto& seq : sequences) {
    const std::string file = seq.name() + ".csv";
    write_sequence(dir / file, seq);
    index["sequences"].push_back({{"file", file}, {"subject", seq.subject_id}, {"gait", seq.gait.to_string()}});
  }
  write_text_file(dir / "dataset.json", index.dump(2) + "\n");
}

std::vector<DatasetEntry> read_dataset_index(const std::filesystem::path& dir) {
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(read_text_file(dir / "dataset.json"));
    if (index.at("format_version").get<int>() != 1) {
      throw Error(ErrorKind::parse, "unsupported dataset format_version");
    }
    std::vector<DatasetEntry> entries;
    for (const auto& e : index.at("sequences")) {
      entries.push_back({e.at("file").get<std::string>(), e.at("subject").get<std::string>(),
                         GaitKind::parse(e.at("gait").get<std::string>())});
    }
    return entries;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, (dir / "dataset.json").string() + ": " + e.what());
  }
}

std::vector<GaitSequence> load_dataset(const std::filesystem::path& dir) {
  std::vector<GaitSequence> out;
  for (const auto& e : read_dataset_index(dir)) {
    out.push_back(load_sequence(dir / e.file, e.subject_id, e.gait));
  }
  return out;
}

std::uint64_t sequence_hash(const GaitSequence& seq) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& f : seq.frames) {
    h = fnv1a(h, f.frame_index);
    for (const auto& p : f.joints) {
      h = fnv1a(h, std::bit_cast<std::uint64_t>(p.x));
      h = fnv1a(h, std::bit_cast<std::uint64_t>(p.y));
      h = fnv1a(h, std::bit_cast<std::uint64_t>(p.z));
    }
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gaitae
