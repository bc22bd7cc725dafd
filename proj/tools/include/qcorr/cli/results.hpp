#pragma once

// JSON documents for analyzer results and run manifests. Result documents
// never hold timestamps, so identical runs give identical bytes.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcorr/jordan.hpp"
#include "qcorr/portrait.hpp"

namespace qcorr::cli {

using nlohmann::json;

json portrait_json(const portrait::PortraitResult& r, const portrait::PortraitConfig& config);
json jordan_json(const jordan::JordanResult& r, const jordan::JordanConfig& config);
json config_json(const portrait::PortraitConfig& c);
json config_json(const jordan::JordanConfig& c);

/// Everything needed to rerun a command, plus wall-clock stamps kept out of
/// the result document.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string input;
  std::string input_sha256;
  json config;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string started_utc;
  std::string finished_utc;
};

json manifest_json(const RunManifest& m);

/// Two-space indented dump with a trailing newline.
std::string dump(const json& j);

std::string utc_now();

/// Lowercase hex SHA-256 of a file's bytes.
std::string file_sha256(const std::string& path);

}  // namespace qcorr::cli
