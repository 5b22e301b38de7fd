#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpflex/bundled.hpp"
#include "hpflex/dataset.hpp"
#include "hpflex/hash.hpp"
#include "hpflex/static_data.hpp"

namespace hpflex {

// A validated dataset in canonical form: every file is re-emitted by this
// library, so unchanged inputs give an unchanged cache hash.
inline constexpr std::array kCacheFiles{"series.csv", "ntc.csv", "bio_caps.csv", "static_data.json"};

struct DatasetBundle {
  Dataset data;
  StaticData tech;
};

struct CacheInfo {
  std::string hash;
  std::vector<std::pair<std::string, std::string>> files;  // name, sha256
};

namespace detail {

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + p.string());
  out << text;
  if (!out) fail(ErrorKind::io, "write failed: " + p.string());
}

inline std::string canonical_file(const DatasetBundle& b, std::string_view name) {
  std::ostringstream os;
  if (name == "series.csv") write_series_csv(os, b.data.all_series());
  else if (name == "ntc.csv") write_ntc_csv(os, b.data.ntc());
  else if (name == "bio_caps.csv") write_bio_caps_csv(os, b.data.bioenergy_cap_gwh());
  else os << emit_static_data(b.tech);
  return os.str();
}

inline CacheInfo cache_info(const std::vector<std::pair<std::string, std::string>>& texts) {
  CacheInfo info;
  Sha256 all;
  for (const auto& [name, text] : texts) {
    info.files.emplace_back(name, sha256_hex(text));
    all.update(name + ':' + info.files.back().second + '\n');
  }
  info.hash = all.hex();
  return info;
}

}  // namespace detail

// Reads an input bundle directory: series.csv is required; ntc.csv,
// bio_caps.csv and static_data.json are optional (static data defaults to the
// bundled tables).
inline DatasetBundle read_bundle(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) fail(ErrorKind::io, dir.string() + " is not a directory");
  DatasetBundle b{Dataset::from_series(read_series_csv(dir / "series.csv")), bundled_static_data()};
  if (fs::exists(dir / "ntc.csv")) {
    std::ifstream in(dir / "ntc.csv");
    read_ntc_csv(in, b.data.ntc(), (dir / "ntc.csv").string());
  }
  if (fs::exists(dir / "bio_caps.csv")) {
    std::ifstream in(dir / "bio_caps.csv");
    read_bio_caps_csv(in, b.data.bioenergy_cap_gwh(), (dir / "bio_caps.csv").string());
  }
  if (fs::exists(dir / "static_data.json")) b.tech = load_static_data(dir / "static_data.json");
  return b;
}

// Checks that hold across files: transfer limits and caps name known
// countries and every country has capacity bounds.
inline std::vector<std::string> validate_bundle(const DatasetBundle& b) {
  std::vector<std::string> warnings;
  const auto cs = b.data.countries();
  auto known = [&](const CountryCode& c) { return std::find(cs.begin(), cs.end(), c) != cs.end(); };
  for (const auto& [pair, gw] : b.data.ntc().entries())
    if (!known(pair.first) || !known(pair.second))
      warnings.push_back("NTC " + pair.first + "->" + pair.second + " names a country without series; ignored");
  for (const auto& [c, v] : b.data.bioenergy_cap_gwh())
    if (!known(c)) warnings.push_back("bioenergy cap for " + c + " has no series; ignored");
  for (const auto& c : cs) {
    const auto& bc = b.tech.bound_countries;
    if (std::find(bc.begin(), bc.end(), c) == bc.end())
      fail(ErrorKind::coverage, c + " has series but no capacity-bounds column");
    for (const auto& w : b.data.country(c).cops.warnings()) warnings.push_back(w);
  }
  return warnings;
}

// Writes the canonical cache via a temporary directory and returns its hash.
inline CacheInfo save_cache(const std::filesystem::path& dir, const DatasetBundle& b) {
  namespace fs = std::filesystem;
  std::vector<std::pair<std::string, std::string>> texts;
  for (const char* name : kCacheFiles) texts.emplace_back(name, detail::canonical_file(b, name));
  const CacheInfo info = detail::cache_info(texts);

  nlohmann::json m;
  m["schema"] = "hpflex.cache/1";
  m["hash"] = info.hash;
  m["countries"] = b.data.countries();
  m["hours"] = b.data.hours();
  m["start"] = b.data.start() ? format_iso_hour(*b.data.start()) : "";
  for (const auto& [name, h] : info.files) m["files_sha256"][name] = h;

  std::error_code ec;
  const fs::path tmp = dir.parent_path() / (dir.filename().string() + ".tmp");
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + tmp.string() + ": " + ec.message());
  for (const auto& [name, text] : texts) detail::write_text(tmp / name, text);
  detail::write_text(tmp / "cache.json", m.dump(2) + "\n");
  fs::remove_all(dir, ec);
  fs::rename(tmp, dir, ec);
  if (ec) fail(ErrorKind::io, "cannot move cache into " + dir.string() + ": " + ec.message());
  return info;
}

// Loads a cache, refusing files whose content no longer matches cache.json.
inline DatasetBundle load_cache(const std::filesystem::path& dir, CacheInfo* info = nullptr) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(detail::read_text(dir / "cache.json"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, (dir / "cache.json").string() + ": " + e.what());
  }
  std::vector<std::pair<std::string, std::string>> texts;
  for (const char* name : kCacheFiles) texts.emplace_back(name, detail::read_text(dir / name));
  const CacheInfo found = detail::cache_info(texts);
  if (m.value("hash", "") != found.hash)
    fail(ErrorKind::io, dir.string() + ": cache content does not match cache.json (re-run ingest)");
  DatasetBundle b = read_bundle(dir);
  if (info) *info = found;
  return b;
}

inline bool is_cache(const std::filesystem::path& dir) { return std::filesystem::exists(dir / "cache.json"); }

}  // namespace hpflex
