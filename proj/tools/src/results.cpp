#include "qcorr/cli/results.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "qcorr/error.hpp"

namespace qcorr::cli {

namespace {

json point(double x, double y) { return json::array({x, y}); }

json bounds_json(const portrait::Bounds& b) {
  return json::array({b.re_min, b.re_max, b.im_min, b.im_max});
}

json model_json(const jordan::RotationModel& m) {
  return {{"x", m.x}, {"y", m.y}, {"theta", m.theta}, {"phi", m.phi},
          {"d", m.d}, {"r", m.r}, {"support", m.support}};
}

}  // namespace

json config_json(const portrait::PortraitConfig& c) {
  json j{{"levels", c.levels},
         {"margin", c.margin},
         {"theta_max", c.theta_max},
         {"match_min", c.match_min},
         {"max_refinements", c.max_refinements}};
  j["resolution"] = c.initial_resolution ? json(*c.initial_resolution) : json(nullptr);
  return j;
}

json config_json(const jordan::JordanConfig& c) {
  return {{"delta_exponents", c.delta_exponents},
          {"region", json::array({c.region.re_min, c.region.re_max, c.region.im_min,
                                  c.region.im_max})},
          {"round_size", c.round_size},
          {"tolerance", c.tolerance},
          {"rho_max", c.rho_max},
          {"policy", jordan::to_string(c.policy)},
          {"max_rounds", c.max_rounds},
          {"pair_cap", c.pair_cap},
          {"seed", c.seed},
          {"stop_when_confident", c.stop_when_confident}};
}

json portrait_json(const portrait::PortraitResult& r, const portrait::PortraitConfig& config) {
  json eig = json::array();
  for (const auto& z : r.eigenvalues) eig.push_back(point(z.real(), z.imag()));

  json merges = json::array();
  for (const auto& m : r.report.merges) {
    merges.push_back({{"i", m.i},
                      {"j", m.j},
                      {"level", m.level},
                      {"level_index", m.level_index},
                      {"confidence", m.confidence}});
  }
  json unresolved = json::array();
  for (const auto& [i, j] : r.report.unresolved) unresolved.push_back(json::array({i, j}));

  json nodes = json::array();
  for (const auto& n : r.report.tree.nodes) {
    json node{{"members", n.members}, {"children", n.children}, {"confidence", n.confidence}};
    node["level"] = n.level_index ? json(n.level) : json(nullptr);
    node["level_index"] = n.level_index ? json(*n.level_index) : json(nullptr);
    nodes.push_back(std::move(node));
  }

  json audit = json::array();
  for (const auto& a : r.audit) {
    audit.push_back({{"action", portrait::to_string(a.action)},
                     {"reason", a.reason},
                     {"region", bounds_json(a.region)},
                     {"spacing", a.spacing},
                     {"samples", a.samples}});
  }

  std::size_t closed = 0;
  for (const auto& c : r.curves.curves) closed += c.closed ? 1 : 0;

  return {{"kind", "portrait"},
          {"eigenvalues", std::move(eig)},
          {"two_norm", r.two_norm},
          {"levels", config.levels},
          {"merges", std::move(merges)},
          {"unresolved", std::move(unresolved)},
          {"tree", {{"nodes", std::move(nodes)}, {"roots", r.report.tree.roots}}},
          {"refinements",
           {{"expansions", r.expansions}, {"subsamples", r.subsamples}, {"audit", std::move(audit)}}},
          {"samples_used", r.samples_used},
          {"initial_samples", r.initial_samples},
          {"grid",
           {{"bounds", bounds_json(r.bounds)},
            {"base_spacing", r.base_spacing},
            {"finest_spacing", r.finest_spacing}}},
          {"curves",
           {{"count", r.curves.curves.size()},
            {"closed", closed},
            {"dropped_degenerate", r.curves.dropped_degenerate},
            {"dropped_empty", r.curves.dropped_empty}}},
          {"confident", r.confident},
          {"config", config_json(config)}};
}

json jordan_json(const jordan::JordanResult& r, const jordan::JordanConfig& config) {
  const auto& e = r.estimate;
  json levels = json::array();
  for (const auto& l : r.levels) {
    json level{{"delta_exp", l.delta_exp},
               {"cloud_size", l.cloud_size},
               {"models", l.models},
               {"best_confidence", l.best_confidence}};
    level["best"] = l.best ? model_json(*l.best) : json(nullptr);
    levels.push_back(std::move(level));
  }
  json audit = json::array();
  for (const auto& a : r.audit) {
    audit.push_back({{"round", a.round},
                     {"delta_exp", a.delta_exp},
                     {"trials", a.trials},
                     {"failed_trials", a.failed_trials},
                     {"points_added", a.points_added},
                     {"cloud_size", a.cloud_size},
                     {"models", a.models},
                     {"clusters", a.clusters},
                     {"winner_support", a.winner_support},
                     {"entropy", a.entropy},
                     {"next", a.next}});
  }
  json j{{"kind", "jordan"}, {"found", r.found}};
  j["lambda"] = r.found ? point(e.lambda.x, e.lambda.y) : json(nullptr);
  j["rho"] = r.found ? json(e.rho) : json(nullptr);
  j["confidence"] = e.confidence;
  j["joint"] = e.joint;
  j["weight"] = e.weight;
  j["support"] = e.support;
  j["rounds_used"] = e.rounds_used;
  j["entropy"] = e.entropy;
  j["high_entropy"] = e.high_entropy;
  j["confident"] = e.confident;
  j["per_level_models"] = std::move(levels);
  j["audit"] = std::move(audit);
  j["config"] = config_json(config);
  return j;
}

json manifest_json(const RunManifest& m) {
  return {{"command", m.command},
          {"argv", m.argv},
          {"input", m.input},
          {"input_sha256", m.input_sha256},
          {"config", m.config},
          {"seed", m.seed},
          {"tool_version", m.tool_version},
          {"started_utc", m.started_utc},
          {"finished_utc", m.finished_utc}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 65536> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

}  // namespace qcorr::cli
