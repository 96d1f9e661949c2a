// Copyright 2026 The agent_driver Authors
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

#include "agent_driver/config.hpp"
#include "agent_driver/errors.hpp"
#include "agent_driver/evaluation.hpp"
#include "agent_driver/http_backend.hpp"
#include "agent_driver/plot.hpp"
#include "agent_driver/reasoning_engine.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <glob.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace agent_driver::cli
{

enum ExitCode : int { kOk = 0, kSceneFailures = 1, kUsage = 2, kIo = 3 };

std::mutex g_print_mutex;

template <typename... Args>
void note(fmt::format_string<Args...> format, Args &&... args)
{
  std::lock_guard lock(g_print_mutex);
  fmt::print(stderr, format, std::forward<Args>(args)...);
  fmt::print(stderr, "\n");
}

/// Expands shell-style patterns; a directory stands for its *.json files.
std::vector<fs::path> expand_inputs(const std::vector<std::string> & patterns)
{
  std::set<fs::path> found;
  for (const auto & pattern : patterns) {
    if (fs::is_directory(pattern)) {
      for (const auto & entry : fs::directory_iterator(pattern)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
          found.insert(entry.path());
        }
      }
      continue;
    }
    glob_t matches{};
    if (::glob(pattern.c_str(), 0, nullptr, &matches) == 0) {
      for (std::size_t i = 0; i < matches.gl_pathc; ++i) {
        found.insert(matches.gl_pathv[i]);
      }
    }
    ::globfree(&matches);
  }
  return {found.begin(), found.end()};
}

std::string file_stem_for(std::string_view scene_id)
{
  std::string out;
  for (const char c : scene_id) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out.empty() ? std::string("scene") : out;
}

void write_text(const fs::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ParseError(fmt::format("cannot write '{}'", path.string()));
  }
  out << text;
  if (!out) {
    throw ParseError(fmt::format("failed writing '{}'", path.string()));
  }
}

json read_json(const fs::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ParseError(fmt::format("cannot open '{}'", path.string()));
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error & e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

struct ConfigFlags
{
  std::string config_file;
  std::vector<std::string> overrides;
  std::string endpoint;
  std::string model;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_in_flight;
};

void add_config_flags(CLI::App & app, ConfigFlags & flags)
{
  app.add_option("--config", flags.config_file, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--set", flags.overrides, "Override a config key, e.g. --set reflection.lambda=150");
  app.add_option("--endpoint", flags.endpoint, "Chat-completions URL (llm.endpoint)");
  app.add_option("--model", flags.model, "Model name (llm.model)");
  app.add_option("--seed", flags.seed, "Exemplar selection seed (reasoning.seed)");
  app.add_option("--max-in-flight", flags.max_in_flight, "Concurrent LLM requests (llm.max_in_flight)");
}

config::PipelineConfig resolve_config(const ConfigFlags & flags)
{
  config::Sources sources;
  if (!flags.config_file.empty()) {
    sources.file = config::load_file(flags.config_file);
  }
  sources.env = config::read_environment();
  for (const auto & text : flags.overrides) {
    sources.flags.push_back(config::parse_override(text));
  }
  if (!flags.endpoint.empty()) {
    sources.flags.emplace_back("llm.endpoint", flags.endpoint);
  }
  if (!flags.model.empty()) {
    sources.flags.emplace_back("llm.model", flags.model);
  }
  if (flags.seed) {
    sources.flags.emplace_back("reasoning.seed", *flags.seed);
  }
  if (flags.max_in_flight) {
    sources.flags.emplace_back("llm.max_in_flight", *flags.max_in_flight);
  }
  return config::resolve(sources);
}

struct RunOptions
{
  std::vector<std::string> scenes;
  std::string backend = "scripted";
  std::string script;
  std::string replay_dir;
  std::string out_dir = "agent_driver_out";
  int workers = 1;
  bool no_record = false;
};

int run_command(const RunOptions & opts, const ConfigFlags & flags)
{
  const auto cfg = resolve_config(flags);
  const auto scenes = expand_inputs(opts.scenes);
  if (scenes.empty()) {
    note("0 scenes matched; nothing to do");
    return kOk;
  }
  const auto resources = reasoning::load_resources(cfg);
  fs::create_directories(opts.out_dir);

  std::vector<llm::ScriptedBackend::Rule> rules;
  std::shared_ptr<llm::HttpBackend> http;
  if (opts.backend == "scripted") {
    if (opts.script.empty()) {
      throw ValidationError("--script", "the scripted backend needs a script file");
    }
    rules = llm::ScriptedBackend::load_rules(opts.script);
  } else if (opts.backend == "http") {
    http = std::make_shared<llm::HttpBackend>(cfg.llm);
  } else if (opts.backend == "replay") {
    if (opts.replay_dir.empty()) {
      throw ValidationError("--replay-dir", "the replay backend needs a directory of exchange files");
    }
  } else {
    throw ValidationError("--backend", "expected scripted, replay or http");
  }

  const int workers = std::max(1, std::min(opts.workers, cfg.llm.max_in_flight));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failures{0};
  const auto worker = [&] {
    for (auto i = next++; i < scenes.size(); i = next++) {
      const auto & path = scenes[i];
      try {
        const auto snap = scene::load_snapshot(path, {cfg.memory.layout.history_length});
        const auto stem = file_stem_for(snap.scene_id);
        std::shared_ptr<llm::Backend> backend;
        if (http) {
          backend = http;
        } else if (opts.backend == "scripted") {
          backend = std::make_shared<llm::ScriptedBackend>(rules);
        } else {
          backend = llm::ReplayBackend::open(fs::path(opts.replay_dir) / (stem + ".exchanges.jsonl"));
        }
        std::string transcript;
        if (!opts.no_record) {
          transcript = stem + ".exchanges.jsonl";
          backend = std::make_shared<llm::RecordingBackend>(backend, fs::path(opts.out_dir) / transcript);
        }
        auto output = reasoning::run_pipeline(snap, *backend, resources, cfg);
        output.transcript = transcript;
        write_text(fs::path(opts.out_dir) / (stem + ".json"), reasoning::to_json(output).dump(2) + "\n");
        note("{}: ok{}", snap.scene_id,
          output.flags.empty() ? std::string() : fmt::format(" [{}]", fmt::join(output.flags, ", ")));
      } catch (const Error & e) {
        ++failures;
        note("{}: failed: {}: {}", path.string(), e.kind(), e.what());
      } catch (const std::exception & e) {
        ++failures;
        note("{}: failed: {}", path.string(), e.what());
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
  }
  note("{} scenes, {} ok, {} failed", scenes.size(), scenes.size() - failures.load(), failures.load());
  return failures.load() == 0 ? kOk : kSceneFailures;
}

struct EvaluateOptions
{
  std::string outputs;
  std::vector<std::string> scenes;
  std::string convention = "both";
  std::string json_path;
};

int evaluate_command(const EvaluateOptions & opts, const ConfigFlags & flags)
{
  const auto cfg = resolve_config(flags);
  std::vector<evaluation::Convention> conventions;
  if (opts.convention == "both") {
    conventions = {evaluation::Convention::uniad, evaluation::Convention::stp3};
  } else if (const auto c = evaluation::parse_convention(opts.convention)) {
    conventions = {*c};
  } else {
    throw ValidationError("--convention", "expected uniad, stp3 or both");
  }

  std::map<std::string, scene::SceneSnapshot> by_id;
  for (const auto & path : expand_inputs(opts.scenes)) {
    auto snap = scene::load_snapshot(path, {cfg.memory.layout.history_length});
    by_id.emplace(snap.scene_id, std::move(snap));
  }

  std::vector<evaluation::Sample> samples;
  std::size_t skipped = 0;
  for (const auto & path : expand_inputs({opts.outputs})) {
    const auto doc = read_json(path);
    if (!doc.is_object() || doc.value("schema", "") != reasoning::kOutputSchema) {
      continue;
    }
    const auto scene_id = doc.at("scene_id").get<std::string>();
    const auto it = by_id.find(scene_id);
    if (it == by_id.end() || !it->second.gt_trajectory) {
      note("{}: skipped, no ground-truth scene", scene_id);
      ++skipped;
      continue;
    }
    evaluation::Sample sample;
    sample.scene_id = scene_id;
    sample.pred = reasoning::output_trajectory(doc);
    sample.gt = *it->second.gt_trajectory;
    if (it->second.gt_boxes_per_step) {
      sample.gt_boxes = *it->second.gt_boxes_per_step;
    }
    samples.push_back(std::move(sample));
  }

  std::vector<evaluation::MetricReport> reports;
  for (const auto c : conventions) {
    reports.push_back(evaluation::report(samples, c, cfg.evaluation));
  }
  fmt::print("{}", evaluation::render_table(reports));
  if (skipped > 0) {
    fmt::print("skipped outputs: {}\n", skipped);
  }
  if (!opts.json_path.empty()) {
    json doc{{"reports", json::array()}, {"evaluation", config::to_json(cfg).at("evaluation")}, {"skipped", skipped}};
    for (const auto & r : reports) {
      doc["reports"].push_back(evaluation::to_json(r));
    }
    write_text(opts.json_path, doc.dump(2) + "\n");
  }
  return kOk;
}

int memory_build_command(const std::vector<std::string> & scene_patterns, const std::string & store_path, const ConfigFlags & flags)
{
  const auto cfg = resolve_config(flags);
  const tools::ToolRegistry registry;
  memory::ExperienceStore store(cfg.memory.layout);
  std::size_t skipped = 0;
  for (const auto & path : expand_inputs(scene_patterns)) {
    const auto snap = scene::load_snapshot(path, {cfg.memory.layout.history_length});
    try {
      store.insert(reasoning::make_experience_record(snap, cfg.memory.layout, registry, cfg.tools));
    } catch (const MissingGroundTruth & e) {
      ++skipped;
      note("{}: skipped: {}", path.string(), e.what());
    }
  }
  if (const auto parent = fs::path(store_path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  store.save(store_path);
  note("wrote {} records to {} ({} skipped)", store.size(), store_path, skipped);
  return kOk;
}

int export_sft_command(const std::vector<std::string> & scene_patterns, const std::string & out_path, const ConfigFlags & flags)
{
  const auto cfg = resolve_config(flags);
  const tools::ToolRegistry registry;
  std::vector<scene::SceneSnapshot> scenes;
  for (const auto & path : expand_inputs(scene_patterns)) {
    scenes.push_back(scene::load_snapshot(path, {cfg.memory.layout.history_length}));
  }
  std::string text;
  try {
    for (const auto & pair : reasoning::export_sft_pairs(scenes, registry, cfg.tools)) {
      text += pair.dump() + "\n";
    }
  } catch (const MissingGroundTruth & e) {
    note("export aborted: {}", e.what());
    return kSceneFailures;
  }
  write_text(out_path, text);
  note("wrote {} training pairs to {}", scenes.size(), out_path);
  return kOk;
}

int plot_command(const std::string & output_path, const std::string & scene_path, const std::string & svg_path, std::optional<int> occupancy_step)
{
  const auto doc = read_json(output_path);
  const auto planned = reasoning::output_trajectory(doc);
  std::set<std::string> notable;
  if (doc.contains("reasoning") && doc.at("reasoning").contains("notable_objects")) {
    for (const auto & o : doc.at("reasoning").at("notable_objects")) {
      notable.insert(o.value("referent", ""));
    }
  }
  const auto snap = scene::load_snapshot(scene_path);
  plot::PlotOptions options;
  options.occupancy_step = occupancy_step;
  const auto svg = plot::render_svg(snap, planned, notable, options);
  if (svg_path.empty() || svg_path == "-") {
    fmt::print("{}", svg);
  } else {
    write_text(svg_path, svg);
  }
  return kOk;
}

int main(int argc, char ** argv)
{
  CLI::App app{"LLM-driven motion planning agent: run scenes, build memory, evaluate, export and plot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "agent_driver 0.1.0");

  ConfigFlags run_cfg;
  RunOptions run_opts;
  auto * run = app.add_subcommand("run", "Plan trajectories for scene files");
  run->add_option("scenes", run_opts.scenes, "Scene files, globs or directories")->required();
  run->add_option("--backend", run_opts.backend, "scripted, replay or http")
    ->check(CLI::IsMember({"scripted", "replay", "http"}));
  run->add_option("--script", run_opts.script, "Rule file for the scripted backend")->check(CLI::ExistingFile);
  run->add_option("--replay-dir", run_opts.replay_dir, "Directory of <scene>.exchanges.jsonl files to replay")
    ->check(CLI::ExistingDirectory);
  run->add_option("--out", run_opts.out_dir, "Output directory");
  run->add_option("--workers", run_opts.workers, "Parallel scenes (capped by llm.max_in_flight)")
    ->check(CLI::PositiveNumber);
  run->add_flag("--no-record", run_opts.no_record, "Do not write exchange transcripts");
  add_config_flags(*run, run_cfg);

  ConfigFlags eval_cfg;
  EvaluateOptions eval_opts;
  auto * evaluate = app.add_subcommand("evaluate", "Score pipeline outputs against ground truth");
  evaluate->add_option("--outputs", eval_opts.outputs, "Directory of pipeline outputs")->required();
  evaluate->add_option("--scenes", eval_opts.scenes, "Ground-truth scene files, globs or directories")->required();
  evaluate->add_option("--convention", eval_opts.convention, "uniad, stp3 or both")
    ->check(CLI::IsMember({"uniad", "stp3", "both"}));
  evaluate->add_option("--json", eval_opts.json_path, "Write the report as JSON");
  add_config_flags(*evaluate, eval_cfg);

  ConfigFlags memory_cfg;
  std::vector<std::string> memory_scenes;
  std::string store_path;
  auto * memory_cmd = app.add_subcommand("memory", "Experience memory tools");
  memory_cmd->require_subcommand(1);
  auto * build = memory_cmd->add_subcommand("build", "Build an experience store from scenes with ground truth");
  build->add_option("scenes", memory_scenes, "Scene files, globs or directories")->required();
  build->add_option("--store", store_path, "Output JSON-lines store")->required();
  add_config_flags(*build, memory_cfg);

  ConfigFlags sft_cfg;
  std::vector<std::string> sft_scenes;
  std::string sft_out;
  auto * sft = app.add_subcommand("export-sft", "Write fine-tuning prompt/completion pairs");
  sft->add_option("scenes", sft_scenes, "Scene files, globs or directories");
  sft->add_option("--out", sft_out, "Output JSON-lines file")->required();
  add_config_flags(*sft, sft_cfg);

  std::string plot_output;
  std::string plot_scene;
  std::string plot_svg;
  std::optional<int> plot_step;
  auto * plot_cmd = app.add_subcommand("plot", "Draw a bird's-eye-view SVG of a planned trajectory");
  plot_cmd->add_option("--output", plot_output, "Pipeline output JSON")->required();
  plot_cmd->add_option("--scene", plot_scene, "Scene file")->required();
  plot_cmd->add_option("--svg", plot_svg, "SVG path, '-' for stdout");
  plot_cmd->add_option("--occupancy-step", plot_step, "Overlay occupancy of timestep 1..6")->check(CLI::Range(1, 6));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      return run_command(run_opts, run_cfg);
    }
    if (*evaluate) {
      return evaluate_command(eval_opts, eval_cfg);
    }
    if (*build) {
      return memory_build_command(memory_scenes, store_path, memory_cfg);
    }
    if (*sft) {
      return export_sft_command(sft_scenes, sft_out, sft_cfg);
    }
    if (*plot_cmd) {
      return plot_command(plot_output, plot_scene, plot_svg, plot_step);
    }
  } catch (const ValidationError & e) {
    note("configuration error: {}: {}", e.kind(), e.what());
    return kUsage;
  } catch (const ParseError & e) {
    note("input error: {}: {}", e.kind(), e.what());
    return kIo;
  } catch (const fs::filesystem_error & e) {
    note("filesystem error: {}", e.what());
    return kIo;
  } catch (const Error & e) {
    note("{}: {}", e.kind(), e.what());
    return kSceneFailures;
  }
  return kUsage;
}

}  // namespace agent_driver::cli

int main(int argc, char ** argv)
{
  return agent_driver::cli::main(argc, argv);
}
