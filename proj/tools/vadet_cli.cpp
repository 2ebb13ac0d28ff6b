// Copyright 2026 The vadet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// vadet command-line tool. Talks to the library through the C interface only.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vadet/vadet.h"

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  sub->add_flag("--quiet", c.quiet, "Suppress progress output");
}

int exit_code(vadet_status s) {
  switch (s) {
    case VADET_OK: return 0;
    case VADET_ERR_SCHEMA:
    case VADET_ERR_FORMAT: return 2;
    case VADET_ERR_INSUFFICIENT_HISTORY: return 3;
    default: return 1;
  }
}

int report(vadet_status s) {
  if (s != VADET_OK) {
    std::fprintf(stderr, "vadet: %s: %s\n", vadet_status_string(s), vadet_last_error());
  }
  return exit_code(s);
}

// "N" or "A..B".
bool parse_frames(const std::string& text, std::size_t& lo, std::size_t& hi) {
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      lo = hi = std::stoul(text, &used);
      return used == text.size();
    }
    const std::string a = text.substr(0, dots);
    const std::string b = text.substr(dots + 2);
    lo = std::stoul(a, &used);
    if (used != a.size()) return false;
    hi = std::stoul(b, &used);
    return used == b.size() && lo <= hi;
  } catch (const std::exception&) {
    return false;
  }
}

unsigned parse_breakdown(const std::string& text, bool& ok) {
  unsigned mask = 0;
  ok = true;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "speed") {
      mask |= VADET_BREAKDOWN_SPEED;
    } else if (item == "density") {
      mask |= VADET_BREAKDOWN_DENSITY;
    } else if (item == "cross") {
      mask |= VADET_BREAKDOWN_CROSS;
    } else if (!item.empty()) {
      ok = false;
    }
  }
  return mask;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable frame aggregation for LiDAR detection inputs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", vadet_version());
  Common common;

  std::string spec, out, seq, detections, eta, gt, noise, edges, sweep_path, csv, breakdown,
      label = "default";
  std::vector<std::string> seqs, gts;
  std::string frames_text;
  std::size_t frames = 0;
  double sigma = 1.1;
  std::size_t bg_frames = 3;

  auto* simulate = app.add_subcommand("simulate", "Simulate a LiDAR sequence with ground truth");
  simulate->add_option("--spec", spec, "Scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out, "Output sequence directory")->required();
  add_common(simulate, common);

  auto* aggregate = app.add_subcommand("aggregate", "Fixed multi-frame aggregation");
  aggregate->add_option("--seq", seq, "Sequence directory")->required()->check(CLI::ExistingDirectory);
  aggregate->add_option("--frames", frames, "Frames per aggregate")->required()->check(CLI::PositiveNumber);
  aggregate->add_option("--out", out, "Output directory")->required();
  add_common(aggregate, common);

  auto* vadet = app.add_subcommand("vadet", "Variable per-object aggregation");
  vadet->add_option("--seq", seq, "Sequence directory")->required()->check(CLI::ExistingDirectory);
  vadet->add_option("--detections", detections, "Detections JSON")->required()->check(CLI::ExistingFile);
  vadet->add_option("--eta", eta, "Eta table JSON")->required()->check(CLI::ExistingFile);
  vadet->add_option("--sigma", sigma, "Region margin")->capture_default_str();
  vadet->add_option("--bg-frames", bg_frames, "Background frames")->capture_default_str();
  vadet->add_option("--out", out, "Output directory")->required();
  add_common(vadet, common);

  auto* detect = app.add_subcommand("detect", "Mock detector over a sequence or aggregate");
  detect->add_option("--seq", seq, "Sequence directory")->required()->check(CLI::ExistingDirectory);
  detect->add_option("--gt", gt, "Ground-truth JSON")->required()->check(CLI::ExistingFile);
  detect->add_option("--noise", noise, "Noise model JSON")->required()->check(CLI::ExistingFile);
  detect->add_option("--out", out, "Detections JSON")->required();
  add_common(detect, common);

  auto* sweep = app.add_subcommand("sweep", "AP per speed/density bin against frame count");
  sweep->add_option("--seq", seqs, "Sequence directories")->required()->check(CLI::ExistingDirectory);
  sweep->add_option("--gt", gts, "Ground-truth JSON, one per sequence")->required()->check(CLI::ExistingFile);
  sweep->add_option("--noise", noise, "Noise model JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--frames", frames_text, "Frame range, e.g. 3..16")->default_val("3..16");
  sweep->add_option("--edges", edges, "Bin edges JSON (defaults built in)")->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "Sweep JSON")->required();
  sweep->add_option("--csv", csv, "Optional long-format CSV");
  add_common(sweep, common);

  auto* build_eta = app.add_subcommand("build-eta", "Eta table from a sweep");
  build_eta->add_option("--sweep", sweep_path, "Sweep JSON")->required()->check(CLI::ExistingFile);
  build_eta->add_option("--bg-frames", bg_frames, "Fallback for empty bins")->capture_default_str();
  build_eta->add_option("--out", out, "Eta table JSON")->required();
  add_common(build_eta, common);

  auto* eval = app.add_subcommand("eval", "AP and subset metrics");
  eval->add_option("--detections", detections, "Detections JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", gt, "Ground-truth JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--breakdown", breakdown, "speed,density,cross")->default_val("speed,density,cross");
  eval->add_option("--label", label, "Frame configuration label")->capture_default_str();
  eval->add_option("--out", out, "Report CSV")->required();
  add_common(eval, common);

  auto* write_edges = app.add_subcommand("edges", "Write the default bin edges");
  write_edges->add_option("--out", out, "Bin edges JSON")->required();
  add_common(write_edges, common);

  CLI11_PARSE(app, argc, argv);

  const auto say = [&](const std::string& msg) {
    if (!common.quiet) std::printf("%s\n", msg.c_str());
  };

  if (simulate->parsed()) {
    const std::uint64_t* seed = common.seed ? &*common.seed : nullptr;
    const int rc = report(vadet_simulate(spec.c_str(), out.c_str(), seed, common.threads));
    if (rc == 0) say("wrote sequence to " + out);
    return rc;
  }
  if (aggregate->parsed()) {
    std::size_t written = 0;
    const int rc = report(vadet_aggregate(seq.c_str(), frames, out.c_str(), common.threads, &written));
    if (rc == 0) say("wrote " + std::to_string(written) + " aggregates to " + out);
    return rc;
  }
  if (vadet->parsed()) {
    vadet_config cfg;
    vadet_config_init(&cfg);
    cfg.sigma = sigma;
    cfg.background_frames = bg_frames;
    cfg.threads = common.threads;
    std::size_t written = 0;
    const int rc = report(vadet_run_vadet(seq.c_str(), detections.c_str(), eta.c_str(), &cfg,
                                          out.c_str(), &written));
    if (rc == 0) say("wrote " + std::to_string(written) + " aggregates to " + out);
    return rc;
  }
  if (detect->parsed()) {
    const int rc = report(vadet_detect(seq.c_str(), gt.c_str(), noise.c_str(),
                                       common.seed.value_or(0), out.c_str()));
    if (rc == 0) say("wrote detections to " + out);
    return rc;
  }
  if (sweep->parsed()) {
    std::size_t lo = 0, hi = 0;
    if (!parse_frames(frames_text, lo, hi) || lo == 0) {
      std::fprintf(stderr, "vadet: invalid --frames '%s', expected N or A..B\n", frames_text.c_str());
      return 1;
    }
    if (seqs.size() != gts.size()) {
      std::fprintf(stderr, "vadet: --seq and --gt must be given the same number of times\n");
      return 1;
    }
    std::vector<const char*> seq_ptrs, gt_ptrs;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      seq_ptrs.push_back(seqs[i].c_str());
      gt_ptrs.push_back(gts[i].c_str());
    }
    const int rc = report(vadet_sweep(seq_ptrs.data(), gt_ptrs.data(), seqs.size(), noise.c_str(),
                                      edges.empty() ? nullptr : edges.c_str(), lo, hi,
                                      common.seed.value_or(0), common.threads, out.c_str(),
                                      csv.empty() ? nullptr : csv.c_str()));
    if (rc == 0) say("wrote sweep to " + out);
    return rc;
  }
  if (build_eta->parsed()) {
    const int rc = report(vadet_build_eta(sweep_path.c_str(), bg_frames, out.c_str()));
    if (rc == 0) say("wrote eta table to " + out);
    return rc;
  }
  if (eval->parsed()) {
    bool ok = true;
    const unsigned mask = parse_breakdown(breakdown, ok);
    if (!ok) {
      std::fprintf(stderr, "vadet: invalid --breakdown '%s'\n", breakdown.c_str());
      return 1;
    }
    const int rc = report(vadet_eval(detections.c_str(), gt.c_str(), mask, label.c_str(),
                                     common.threads, out.c_str()));
    if (rc == 0) say("wrote report to " + out);
    return rc;
  }
  if (write_edges->parsed()) {
    const int rc = report(vadet_write_default_edges(out.c_str()));
    if (rc == 0) say("wrote bin edges to " + out);
    return rc;
  }
  return 1;
}
