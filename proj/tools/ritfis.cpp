/* Copyright 2026 The RITFIS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Command-line front end: run, report, validate.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ritfis/campaign.hpp"

namespace {

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> workers, bool perturb_prompt,
            std::optional<std::string> out) {
  auto cfg = ritfis::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (workers) {
    if (*workers == 0) throw ritfis::ConfigError("workers: out of range (must be >= 1)");
    cfg.workers = *workers;
  }
  if (perturb_prompt) cfg.perturb_prompt = true;
  if (out) cfg.output_dir = *out;
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";

  auto report = ritfis::run_campaign(cfg);
  std::cout << ritfis::emit_report(report, ritfis::ReportFormat::kMarkdown);
  std::cerr << "outcomes: " << ritfis::CampaignPaths(cfg.output_dir).log.string() << "\n";
  return EXIT_SUCCESS;
}

int cmd_report(const std::string& log_path, const std::string& format,
               std::optional<std::string> meta_path, std::optional<std::string> corpus) {
  std::filesystem::path log(log_path);
  std::filesystem::path meta_file =
      meta_path ? std::filesystem::path(*meta_path) : log.parent_path() / "campaign.json";
  nlohmann::json meta = nlohmann::json::object();
  if (std::filesystem::exists(meta_file)) {
    std::ifstream in(meta_file);
    meta = nlohmann::json::parse(in);
  } else {
    std::cerr << "warning: no campaign metadata at " << meta_file.string() << "\n";
  }
  if (corpus) meta["ppl_corpus"] = *corpus;
  auto report = ritfis::report_from_log(log, meta);
  std::cout << ritfis::emit_report(report, format == "json" ? ritfis::ReportFormat::kJson
                                                            : ritfis::ReportFormat::kMarkdown);
  return EXIT_SUCCESS;
}

int cmd_validate(const std::string& config_path) {
  auto cfg = ritfis::load_config(config_path);
  auto res = ritfis::load_resources(cfg);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "ok: " << res.dataset.size() << " samples (" << res.selection.size()
            << " selected), preset " << cfg.preset << ", fingerprint "
            << ritfis::config_fingerprint(cfg) << "\n";
  return EXIT_SUCCESS;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ritfis: robustness testing of LLM text classifiers"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool perturb_prompt = false;
  std::optional<std::string> out;
  auto* run = app.add_subcommand("run", "run a test campaign");
  run->add_option("--config", config_path, "campaign TOML file")->required();
  run->add_option("--seed", seed, "override the campaign seed");
  run->add_option("--workers", workers, "number of worker threads");
  run->add_flag("--perturb-prompt", perturb_prompt, "allow edits inside the prompt");
  run->add_option("--out", out, "output directory");

  std::string log_path;
  std::string format = "markdown";
  std::optional<std::string> meta_path;
  std::optional<std::string> corpus;
  auto* report = app.add_subcommand("report", "recompute a report from an outcome log");
  report->add_option("--log", log_path, "outcomes.jsonl")->required();
  report->add_option("--format", format)->check(CLI::IsMember({"json", "markdown"}));
  report->add_option("--meta", meta_path, "campaign.json (defaults to the log's sibling)");
  report->add_option("--corpus", corpus, "PPL training corpus, one text per line");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a campaign config");
  validate->add_option("--config", validate_path, "campaign TOML file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, seed, workers, perturb_prompt, out);
    if (*report) return cmd_report(log_path, format, meta_path, corpus);
    if (*validate) return cmd_validate(validate_path);
  } catch (const ritfis::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ritfis::DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return EXIT_FAILURE;
}
