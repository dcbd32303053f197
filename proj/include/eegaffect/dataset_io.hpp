#pragma once

// Canonical on-disk dataset: <root>/manifest.json plus one headerless
// row-major float32 little-endian file per trial (channels x n_samples).
// Also the per-trial CSV importer behind `eegaffect convert`.

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eegaffect/error.hpp"
#include "eegaffect/signal_model.hpp"

namespace eegaffect {

namespace fs = std::filesystem;

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kCanonicalFormat = "canonical-v1";

namespace detail {

inline std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big)
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  return v;
}

inline std::string trial_file_name(const TrialKey& k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "s%02d_t%02d.f32", k.subject_id, k.trial_id);
  return buf;
}

inline double parse_real(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end)
    fail(ErrorCode::ParseError, where + ": cannot parse '" + std::string(text) + "' as a real");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace detail

/// Writes `ds` in the canonical format. All trials must share the channel
/// list, sample count and sample rate. Samples are stored as float32.
inline void write_dataset(const Dataset& ds, const fs::path& root) {
  if (ds.size() == 0) fail(ErrorCode::InvalidSpec, "cannot write an empty dataset");
  const auto& first = ds.trials().front().recording;
  std::vector<std::string> names;
  for (const auto& ch : first.channels()) names.push_back(ch.id.name());

  fs::create_directories(root);
  nlohmann::ordered_json manifest;
  manifest["format_version"] = kFormatVersion;
  manifest["source"] = ds.manifest().source;
  manifest["sample_rate_hz"] = first.sample_rate_hz();
  manifest["n_samples"] = first.n_samples();
  manifest["channels"] = names;
  auto table = nlohmann::ordered_json::array();

  for (const auto& t : ds.trials()) {
    const auto& rec = t.recording;
    if (rec.n_samples() != first.n_samples() || rec.sample_rate_hz() != first.sample_rate_hz() ||
        rec.n_channels() != first.n_channels())
      fail(ErrorCode::DimensionMismatch, "trials disagree on shape or sample rate");
    for (std::size_t c = 0; c < rec.n_channels(); ++c)
      if (rec.channels()[c].id.name() != names[c]) fail(ErrorCode::DimensionMismatch, "trials disagree on channels");

    const std::string file = detail::trial_file_name(t.key());
    std::vector<std::uint32_t> raw;
    raw.reserve(rec.n_channels() * rec.n_samples());
    for (const auto& ch : rec.channels())
      for (double v : ch.samples) raw.push_back(detail::to_little_endian(std::bit_cast<std::uint32_t>(static_cast<float>(v))));
    std::ofstream out(root / file, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + (root / file).string());
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(std::uint32_t)));

    nlohmann::ordered_json row;
    row["subject_id"] = rec.subject_id();
    row["trial_id"] = rec.trial_id();
    row["file"] = file;
    row["valence"] = t.ratings.valence;
    row["arousal"] = t.ratings.arousal;
    if (t.ratings.dominance) row["dominance"] = *t.ratings.dominance;
    if (t.ratings.liking) row["liking"] = *t.ratings.liking;
    table.push_back(row);
  }
  manifest["trials"] = table;
  std::ofstream mout(root / "manifest.json", std::ios::trunc);
  if (!mout) fail(ErrorCode::IoError, "cannot write manifest in " + root.string());
  mout << manifest.dump(2) << '\n';
}

inline Dataset load_dataset(const fs::path& root, std::string_view expected_format = kCanonicalFormat) {
  if (expected_format != kCanonicalFormat)
    fail(ErrorCode::ConfigError, "unsupported dataset format '" + std::string(expected_format) + "'");
  const fs::path manifest_path = root / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) fail(ErrorCode::MissingManifest, manifest_path.string());

  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, manifest_path.string() + ": " + e.what());
  }
  try {
    if (m.at("format_version").get<int>() != kFormatVersion)
      fail(ErrorCode::ParseError, "unsupported format_version in " + manifest_path.string());
    const double fs_hz = m.at("sample_rate_hz").get<double>();
    const auto n = m.at("n_samples").get<std::size_t>();
    const auto names = m.at("channels").get<std::vector<std::string>>();
    const auto ids = parse_channels(names);

    std::vector<LabeledTrial> trials;
    for (const auto& row : m.at("trials")) {
      Ratings r;
      r.valence = row.at("valence").get<double>();
      r.arousal = row.at("arousal").get<double>();
      if (row.contains("dominance")) r.dominance = row["dominance"].get<double>();
      if (row.contains("liking")) r.liking = row["liking"].get<double>();
      r.validate();

      const fs::path file = root / row.at("file").get<std::string>();
      std::ifstream data(file, std::ios::binary | std::ios::ate);
      if (!data) fail(ErrorCode::IoError, "cannot open " + file.string());
      const auto bytes = static_cast<std::size_t>(data.tellg());
      if (bytes % (sizeof(float) * ids.size()) != 0 || bytes / (sizeof(float) * ids.size()) != n)
        fail(ErrorCode::DimensionMismatch, file.string() + " holds " + std::to_string(bytes / sizeof(float)) +
                                               " values, expected " + std::to_string(n * ids.size()));
      data.seekg(0);
      std::vector<std::uint32_t> raw(bytes / sizeof(std::uint32_t));
      data.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));

      std::vector<ChannelData> channels;
      for (std::size_t c = 0; c < ids.size(); ++c) {
        Signal s(n);
        for (std::size_t t = 0; t < n; ++t)
          s[t] = static_cast<double>(std::bit_cast<float>(detail::to_little_endian(raw[c * n + t])));
        channels.push_back({ids[c], std::move(s)});
      }
      trials.push_back({TrialRecording(row.at("subject_id").get<int>(), row.at("trial_id").get<int>(), fs_hz,
                                       std::move(channels)),
                        r});
    }
    return Dataset(std::move(trials), Manifest{m.value("source", std::string()), kFormatVersion});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, manifest_path.string() + ": " + e.what());
  }
}

/// Reads a per-trial CSV directory: `ratings.csv` with header
/// subject_id,trial_id,valence,arousal[,dominance,liking] and one
/// `s<subject>_t<trial>.csv` per trial whose rows are `<channel>,v1,v2,...`.
inline Dataset read_csv_trials(const fs::path& dir, double sample_rate_hz, const std::string& source = "csv import") {
  if (!fs::is_directory(dir)) fail(ErrorCode::IoError, dir.string() + " is not a directory");
  const std::regex name_re(R"(s(\d+)_t(\d+)\.csv)");
  std::map<TrialKey, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch mm;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, mm, name_re)) files[{std::stoi(mm[1]), std::stoi(mm[2])}] = entry.path();
  }
  if (files.empty()) fail(ErrorCode::ParseError, "no trials found in " + dir.string());

  std::map<TrialKey, Ratings> ratings;
  const fs::path rpath = dir / "ratings.csv";
  std::ifstream rin(rpath);
  if (!rin) fail(ErrorCode::ParseError, rpath.string() + ": missing ratings file");
  std::string line;
  std::getline(rin, line);
  auto header = detail::split_csv_line(line);
  for (auto& h : header) h = detail::trim(h);
  std::size_t lineno = 1;
  while (std::getline(rin, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line);
    const std::string where = rpath.string() + ":" + std::to_string(lineno);
    if (cells.size() != header.size()) fail(ErrorCode::ParseError, where + ": expected " + std::to_string(header.size()) + " columns");
    TrialKey key;
    Ratings r;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double v = detail::parse_real(cells[i], where);
      if (header[i] == "subject_id") key.subject_id = static_cast<int>(v);
      else if (header[i] == "trial_id") key.trial_id = static_cast<int>(v);
      else if (header[i] == "valence") r.valence = v;
      else if (header[i] == "arousal") r.arousal = v;
      else if (header[i] == "dominance") r.dominance = v;
      else if (header[i] == "liking") r.liking = v;
    }
    ratings[key] = r;
  }

  std::vector<LabeledTrial> trials;
  for (const auto& [key, path] : files) {
    std::ifstream in(path);
    std::vector<ChannelData> channels;
    std::size_t row = 0;
    while (std::getline(in, line)) {
      ++row;
      if (detail::trim(line).empty()) continue;
      const std::string where = path.string() + ":" + std::to_string(row);
      const auto cells = detail::split_csv_line(line);
      if (cells.size() < 2) fail(ErrorCode::ParseError, where + ": row has no samples");
      Signal s;
      s.reserve(cells.size() - 1);
      for (std::size_t i = 1; i < cells.size(); ++i) s.push_back(detail::parse_real(cells[i], where));
      if (!channels.empty() && s.size() != channels.front().samples.size())
        fail(ErrorCode::ParseError, where + ": ragged row (" + std::to_string(s.size()) + " samples, expected " +
                                        std::to_string(channels.front().samples.size()) + ")");
      channels.push_back({ChannelId(detail::trim(cells[0])), std::move(s)});
    }
    const auto it = ratings.find(key);
    if (it == ratings.end()) fail(ErrorCode::MissingRating, path.string() + ": no row in ratings.csv");
    trials.push_back({TrialRecording(key.subject_id, key.trial_id, sample_rate_hz, std::move(channels)), it->second});
  }
  return Dataset(std::move(trials), Manifest{source, kFormatVersion});
}

}  // namespace eegaffect
