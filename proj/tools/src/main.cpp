#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qcorr/cli/args.hpp"
#include "qcorr/cli/matrix_io.hpp"
#include "qcorr/cli/results.hpp"
#include "qcorr/cli/svg.hpp"
#include "qcorr/error.hpp"
#include "qcorr/jordan.hpp"
#include "qcorr/portrait.hpp"

#ifndef QCORR_VERSION
#define QCORR_VERSION "unknown"
#endif

namespace {

using namespace qcorr;
using namespace qcorr::cli;

constexpr int kPartial = 2;

struct Common {
  std::string input;
  std::string format = "auto";
  std::string json_path;
  std::string svg_path;
  std::string manifest_path;
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--input", c.input, "Matrix file (Matrix Market or CSV)")->required();
  cmd.add_option("--format", c.format, "auto, mm or csv")->capture_default_str();
  cmd.add_option("--json", c.json_path, "Result JSON path (stdout when absent)");
  cmd.add_option("--svg", c.svg_path, "SVG plot path");
  cmd.add_option("--manifest", c.manifest_path, "Run manifest JSON path");
}

DenseMatrix load(const Common& c) {
  try {
    return parse_matrix(c.input, parse_format(c.format));
  } catch (const ParseError& e) {
    throw ParseError(c.input + ": " + e.what(), 0);
  }
}

void emit(const Common& c, const json& result, const std::string& command, json config,
          std::uint64_t seed, const std::vector<std::string>& argv, const std::string& started) {
  if (c.json_path.empty()) {
    std::cout << dump(result);
  } else {
    write_text(c.json_path, dump(result));
  }
  if (!c.manifest_path.empty()) {
    RunManifest m{command, argv,  c.input,       file_sha256(c.input), std::move(config),
                  seed,    QCORR_VERSION, started, utc_now()};
    write_text(c.manifest_path, dump(manifest_json(m)));
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  const std::string started = utc_now();

  CLI::App app{"Spectral portraits and Jordan structure of dense matrices"};
  app.set_version_flag("--version", QCORR_VERSION);
  app.require_subcommand(1);

  // portrait
  Common pc;
  std::string levels_text = "1e-1..1e-8";
  std::optional<double> resolution;
  portrait::PortraitConfig pconf;
  auto* portrait_cmd = app.add_subcommand("portrait", "Merge tree of eigenvalue level curves");
  add_common(*portrait_cmd, pc);
  portrait_cmd->add_option("--levels", levels_text, "Decade range 1e-a..1e-b or a comma list")
      ->capture_default_str();
  portrait_cmd->add_option("--resolution", resolution, "Base grid spacing");
  portrait_cmd->add_option("--margin", pconf.margin, "Grid margin around the spectrum")
      ->capture_default_str();
  portrait_cmd->add_option("--theta-max", pconf.theta_max, "Largest angular sample gap between nested curves (radians)")->capture_default_str();
  portrait_cmd->add_option("--match-min", pconf.match_min, "Smallest fraction of each curve's points matched to the other")->capture_default_str();
  portrait_cmd->add_option("--max-refinements", pconf.max_refinements, "Subsample and expansion budget")->capture_default_str();

  // jordan
  Common jc;
  std::string region_text, deltas_text = "40:50", policy_text = "same";
  jordan::JordanConfig jconf;
  int repeat = 1;
  auto* jordan_cmd = app.add_subcommand("jordan", "Jordan block size from perturbed eigenvalues");
  add_common(*jordan_cmd, jc);
  jordan_cmd->add_option("--region", region_text, "re_min,re_max,im_min,im_max")->required();
  jordan_cmd->add_option("--deltas", deltas_text, "Exponent range a:b or a comma list")
      ->capture_default_str();
  jordan_cmd->add_option("--policy", policy_text, "same, higher or adaptive")->capture_default_str();
  jordan_cmd->add_option("--tolerance", jconf.tolerance, "Triangle congruence tolerance")
      ->capture_default_str();
  jordan_cmd->add_option("--seed", jconf.seed, "Random seed")->required();
  jordan_cmd->add_option("--round-size", jconf.round_size, "Perturbed samples per level per round")->capture_default_str();
  jordan_cmd->add_option("--rho-max", jconf.rho_max, "Largest block size considered")->capture_default_str();
  jordan_cmd->add_option("--max-rounds", jconf.max_rounds, "Sampling round budget")->capture_default_str();
  jordan_cmd->add_option("--pair-cap", jconf.pair_cap, "New congruent pairs kept per level and round")->capture_default_str();
  jordan_cmd->add_flag_function(
      "--keep-sampling", [&](std::int64_t) { jconf.stop_when_confident = false; },
      "Run all rounds even after a confident estimate");
  jordan_cmd->add_option("--repeat", repeat, "Run seeds seed .. seed+N-1")
      ->check(CLI::PositiveNumber);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a test matrix");
  synth_cmd->require_subcommand(1);
  std::string roots_text, blocks_text, synth_out;
  std::uint64_t synth_seed = 0;
  double cap = 10.0;
  auto* companion_cmd = synth_cmd->add_subcommand("companion", "Companion matrix of given roots");
  companion_cmd->add_option("--roots", roots_text, "value:multiplicity list")->required();
  companion_cmd->add_option("--output", synth_out, ".csv for CSV, Matrix Market otherwise")
      ->required();
  auto* sj_cmd = synth_cmd->add_subcommand("jordan", "Similarity transform of Jordan blocks");
  sj_cmd->add_option("--blocks", blocks_text, "lambda:rho list")->required();
  sj_cmd->add_option("--seed", synth_seed, "Basis seed")->required();
  sj_cmd->add_option("--cap", cap, "Basis condition number cap")->capture_default_str();
  sj_cmd->add_option("--output", synth_out, ".csv for CSV, Matrix Market otherwise")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*portrait_cmd) {
      pconf.levels = parse_levels(levels_text);
      pconf.initial_resolution = resolution;
      const DenseMatrix a = load(pc);
      const auto r = portrait::analyze_portrait(a, pconf);
      if (!pc.svg_path.empty()) write_text(pc.svg_path, portrait_svg(r, pconf));
      emit(pc, portrait_json(r, pconf), "portrait", config_json(pconf), 0, args, started);
      return r.confident ? 0 : kPartial;
    }
    if (*jordan_cmd) {
      jconf.region = parse_region(region_text);
      jconf.delta_exponents = parse_deltas(deltas_text);
      jconf.policy = parse_policy(policy_text);
      jconf.validate();
      const DenseMatrix a = load(jc);
      const std::uint64_t first_seed = jconf.seed;
      if (repeat == 1) {
        const auto r = jordan::analyze_jordan(a, jconf);
        if (!jc.svg_path.empty()) write_text(jc.svg_path, jordan_svg(r));
        emit(jc, jordan_json(r, jconf), "jordan", config_json(jconf), first_seed, args, started);
        return r.found && r.estimate.confident ? 0 : kPartial;
      }
      json runs = json::array();
      double rounds = 0.0;
      bool all_confident = true;
      for (int k = 0; k < repeat; ++k) {
        jconf.seed = first_seed + static_cast<std::uint64_t>(k);
        const auto r = jordan::analyze_jordan(a, jconf);
        if (!jc.svg_path.empty() && k == 0) write_text(jc.svg_path, jordan_svg(r));
        rounds += r.estimate.rounds_used;
        all_confident = all_confident && r.found && r.estimate.confident;
        runs.push_back(jordan_json(r, jconf));
      }
      jconf.seed = first_seed;
      const json result{{"kind", "jordan_repeat"},
                        {"runs", std::move(runs)},
                        {"mean_rounds", rounds / repeat}};
      emit(jc, result, "jordan", config_json(jconf), first_seed, args, started);
      return all_confident ? 0 : kPartial;
    }
    if (*companion_cmd) {
      const auto roots = parse_roots(roots_text);
      write_matrix(synth_out, numkernel::companion_matrix(roots));
      return 0;
    }
    if (*sj_cmd) {
      const auto blocks = parse_blocks(blocks_text);
      write_matrix(synth_out, numkernel::synth_jordan(blocks, synth_seed, cap));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "qcorr: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
