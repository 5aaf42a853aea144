// Copyright 2026 The ProbeKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// probekit: command-line entry point.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "probekit/analysis.h"
#include "probekit/dataset.h"
#include "probekit/error.h"
#include "probekit/file_util.h"
#include "probekit/online_code.h"
#include "probekit/probing.h"
#include "probekit/repr_io.h"
#include "probekit/toy_experiment.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace probekit {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitData = 3;
constexpr int kExitProbeInput = 4;
constexpr int kExitConfig = 5;
constexpr int kExitRecords = 6;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
      return kExitIo;
    case ErrorCode::kParse:
    case ErrorCode::kUnknownLabel:
    case ErrorCode::kEmptyDataset:
    case ErrorCode::kDegenerateProperty:
      return kExitData;
    case ErrorCode::kFormat:
    case ErrorCode::kCorruptData:
    case ErrorCode::kLength:
    case ErrorCode::kJoin:
    case ErrorCode::kShape:
    case ErrorCode::kEmptyData:
      return kExitProbeInput;
    case ErrorCode::kConfig:
    case ErrorCode::kDomain:
    case ErrorCode::kNumeric:
      return kExitConfig;
    case ErrorCode::kUndefinedCorrelation:
    case ErrorCode::kSchema:
      return kExitRecords;
  }
  return 1;
}

std::string UtcNow() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::uint64_t DefaultSeed() {
  const char* env = std::getenv("PROBEKIT_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t v = 0;
  const std::string s(env);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kConfig, "PROBEKIT_SEED is not an unsigned integer: '" + s + "'");
  }
  return v;
}

void WriteJson(const fs::path& path, const ordered_json& j) {
  WriteFileAtomic(path, j.dump(2) + "\n");
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory " + dir.string() + ": " + ec.message());
}

ordered_json Digest(const fs::path& path) {
  return ordered_json{{"path", path.string()}, {"sha256", Sha256File(path)}};
}

std::vector<std::uint64_t> SeedList(std::uint64_t base, int count) {
  if (count < 1) throw Error(ErrorCode::kConfig, "--seeds must be >= 1");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
  return seeds;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first error is
// rethrown after all workers stop.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------- build-dataset

struct BuildArgs {
  std::string task;
  std::string schema;
  std::string input;
  std::string split = "train";
  std::string train, valid, test;
  std::string out_dir = ".";
  std::string name;
  std::string neg_words;
  std::uint64_t seed = 0;
};

NegWordList LoadNegWords(const std::string& path) {
  NegWordList list = NegWordList::Default();
  if (path.empty()) return list;
  list.words.clear();
  std::istringstream in(ReadFile(path));
  std::string line;
  while (std::getline(in, line)) {
    for (const std::string& t : Tokenize(line)) list.words.insert(t);
  }
  if (list.words.empty()) throw Error(ErrorCode::kConfig, "negation word list is empty: " + path);
  return list;
}

int CmdBuildDataset(const BuildArgs& a) {
  const Schema schema = ParseSchema(a.schema);
  ProbingProperty prop = ParseProperty(a.task);
  if (auto* neg = std::get_if<NegWordsProperty>(&prop)) neg->list = LoadNegWords(a.neg_words);

  std::vector<std::pair<Split, std::string>> inputs;
  if (!a.input.empty()) inputs.emplace_back(ParseSplit(a.split), a.input);
  if (!a.train.empty()) inputs.emplace_back(Split::kTrain, a.train);
  if (!a.valid.empty()) inputs.emplace_back(Split::kValid, a.valid);
  if (!a.test.empty()) inputs.emplace_back(Split::kTest, a.test);
  if (inputs.empty()) throw Error(ErrorCode::kConfig, "no input: pass --input or --train/--valid/--test");

  EnsureDir(a.out_dir);
  const std::string base = a.name.empty() ? std::string(SchemaName(schema)) : a.name;
  const std::string prop_name(PropertyName(prop));
  ordered_json manifest;
  manifest["command"] = "build-dataset";
  manifest["created_utc"] = UtcNow();
  manifest["config"] = {{"task", prop_name}, {"schema", SchemaName(schema)}, {"seed", a.seed},
                        {"neg_words_file", a.neg_words}, {"out_dir", a.out_dir}, {"name", base}};
  manifest["splits"] = ordered_json::array();

  std::ostringstream table;
  table << std::left << std::setw(10) << "dataset" << std::setw(13) << "property" << std::setw(7)
        << "split" << std::right << std::setw(10) << "examples" << std::setw(10) << "positive"
        << std::setw(10) << "negative" << std::setw(10) << "skipped" << "\n";
  for (const auto& [split, path] : inputs) {
    std::cerr << "loading " << path << " (" << SplitName(split) << ")\n";
    const NluDataset ds = LoadNluJsonl(path, schema, split);
    ProbingDataset pd = BuildProbingDataset(ds, prop, a.seed);
    pd.base_name = base;
    const std::string stem = base + "_" + prop_name + "_" + std::string(SplitName(split));
    const fs::path out = fs::path(a.out_dir) / (stem + ".jsonl");
    const fs::path man = fs::path(a.out_dir) / (stem + ".manifest.json");
    WriteProbingJsonl(pd, out);
    WriteProbingManifest(pd, man);
    manifest["splits"].push_back({{"split", SplitName(split)},
                                  {"input", Digest(path)},
                                  {"output", Digest(out)},
                                  {"examples", pd.examples.size()},
                                  {"positive", pd.CountLabel(1)},
                                  {"negative", pd.CountLabel(0)},
                                  {"base_positive", pd.base_positive},
                                  {"base_negative", pd.base_negative},
                                  {"skipped_lines", ds.skipped}});
    table << std::left << std::setw(10) << base << std::setw(13) << prop_name << std::setw(7)
          << SplitName(split) << std::right << std::setw(10) << pd.examples.size() << std::setw(10)
          << pd.CountLabel(1) << std::setw(10) << pd.CountLabel(0) << std::setw(10) << ds.skipped
          << "\n";
  }
  WriteJson(fs::path(a.out_dir) / (base + "_" + prop_name + ".run.json"), manifest);
  std::cout << table.str();
  return kExitOk;
}

// ---------------------------------------------------------------- probe

struct ProbeArgs {
  std::string reprs, probing;
  std::string valid_reprs, valid_probing;
  std::string test_reprs, test_probing;
  std::string config;
  std::string out = "probe_report.json";
  bool diagnostic_uniform = false;
  std::optional<std::uint64_t> seed;
};

ProbeReport ProbeFiles(const ProbeArgs& a, ordered_json& inputs, OnlineCodeConfig& cfg) {
  if (!a.config.empty()) {
    const auto j = nlohmann::json::parse(ReadFile(a.config), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kConfig, "probe config is not valid JSON: " + a.config);
    cfg = OnlineCodeConfigFromJson(j);
  }
  if (a.seed) cfg.seed = *a.seed;
  if (a.diagnostic_uniform) cfg.uniform_diagnostic = true;

  inputs = ordered_json::array();
  if (!a.config.empty()) inputs.push_back(Digest(a.config));
  const ReprMatrix train = ReadRepr(a.reprs);
  inputs.push_back(Digest(a.reprs));
  if (a.probing.empty()) {
    if (!a.valid_reprs.empty() || !a.test_reprs.empty()) {
      throw Error(ErrorCode::kConfig, "--valid-reprs/--test-reprs need --probing");
    }
    return OnlineCode(ProbeInputFromRepr(train), cfg).report;
  }
  inputs.push_back(Digest(a.probing));
  std::optional<ReprMatrix> valid, test;
  SplitSource s_train{ReadProbingJsonl(a.probing), &train}, s_valid, s_test;
  auto side = [&](const std::string& r, const std::string& p, std::optional<ReprMatrix>& m,
                  SplitSource& s, const char* what) {
    if (r.empty() && p.empty()) return;
    if (r.empty() || p.empty()) {
      throw Error(ErrorCode::kConfig, std::string(what) + " needs both a repr file and a probing file");
    }
    m = ReadRepr(r);
    s = SplitSource{ReadProbingJsonl(p), &*m};
    inputs.push_back(Digest(r));
    inputs.push_back(Digest(p));
  };
  side(a.valid_reprs, a.valid_probing, valid, s_valid, "valid split");
  side(a.test_reprs, a.test_probing, test, s_test, "test split");
  return OnlineCode(Join(s_train, s_valid, s_test), cfg).report;
}

int CmdProbe(const ProbeArgs& a) {
  OnlineCodeConfig cfg;
  ordered_json inputs;
  ProbeReport report;
  try {
    report = ProbeFiles(a, inputs, cfg);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("probe config: ") + e.what());
  }
  ordered_json j;
  j["command"] = "probe";
  j["created_utc"] = UtcNow();
  j["config"] = OnlineCodeConfigToJson(cfg);
  j["inputs"] = inputs;
  j["report"] = ProbeReportToJson(report);
  j["compression"] = report.compression;
  const fs::path out(a.out);
  if (out.has_parent_path()) EnsureDir(out.parent_path());
  WriteJson(out, j);
  std::cerr << "compression " << report.compression << " (" << report.n_train << " rows)\n";
  std::cout << out.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- toy

struct ToyArgs {
  std::string objective = "ce";
  double gamma = 2.0;
  std::vector<double> gammas = {1, 2, 3, 4};
  int seeds = 1;
  std::optional<std::uint64_t> seed;
  bool end_to_end = false;
  std::string weak;
  std::string config;
  std::string out_dir = "toy_out";
  bool no_probe = false;
  std::optional<int> epochs;
  std::optional<double> lr;
  int jobs = 1;
};

ToyExperimentConfig ResolveToyConfig(const ToyArgs& a) {
  ToyExperimentConfig c;
  if (!a.config.empty()) {
    const auto j = nlohmann::json::parse(ReadFile(a.config), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kConfig, "toy config is not valid JSON: " + a.config);
    c = ToyExperimentConfigFromJson(j);
  }
  if (!a.weak.empty()) c.weak = ParseWeakKind(a.weak);
  if (a.epochs) c.hyper.epochs = *a.epochs;
  if (a.lr) c.hyper.learning_rate = *a.lr;
  c.hyper.pipeline = !a.end_to_end;
  if (a.no_probe) c.run_probe = false;
  ValidateToyExperimentConfig(c);
  return c;
}

std::string RunStem(const ToyRun& run) {
  return ToyRunName(run.objective, run.pipeline) + "_s" + std::to_string(run.seed);
}

ModelRecord ToRecord(const ToyRun& run) {
  ModelRecord r;
  r.model_name = ToyRunName(run.objective, run.pipeline);
  r.bias = "synthetic";
  r.dataset = "toy";
  r.objective = std::string(ObjectiveName(run.objective.kind));
  if (run.objective.kind == ObjectiveKind::kDfl) r.gamma = run.objective.gamma;
  r.seed = static_cast<std::int64_t>(run.seed);
  r.ood_accuracy = run.anti_accuracy;
  r.baseline_ood_accuracy = run.baseline_anti_accuracy;
  r.compression = run.probe ? run.probe->compression : 0.0;
  if (run.probe) r.probe_accuracy = run.probe->accuracy;
  return r;
}

// Trains every objective for every seed, writes one repr file and manifest
// per run plus records.csv, and returns the records in (seed, objective)
// order.
std::vector<ModelRecord> RunToyGrid(const ToyExperimentConfig& cfg,
                                    const std::vector<DebiasObjective>& objectives,
                                    const std::vector<std::uint64_t>& seeds, const fs::path& out_dir,
                                    int jobs, ordered_json& summary) {
  for (const DebiasObjective& o : objectives) {
    if (o.kind == ObjectiveKind::kConfReg && !cfg.hyper.pipeline) {
      throw Error(ErrorCode::kConfig, "confreg is defined only for pipeline training");
    }
    if (o.kind == ObjectiveKind::kDfl && (!std::isfinite(o.gamma) || o.gamma < 0.0)) {
      throw Error(ErrorCode::kConfig, "gamma must be finite and >= 0");
    }
  }
  EnsureDir(out_dir);
  std::vector<std::vector<ToyRun>> runs(seeds.size());
  std::mutex log_mu;
  ParallelFor(seeds.size(), jobs, [&](std::size_t s) {
    const auto t0 = std::chrono::steady_clock::now();
    const ToySeedContext ctx = PrepareToySeed(cfg, seeds[s]);
    for (const DebiasObjective& o : objectives) {
      ToyRun run = RunToyObjective(cfg, ctx, o);
      {
        std::lock_guard<std::mutex> lock(log_mu);
        std::cerr << "seed " << run.seed << " " << std::left << std::setw(12)
                  << ToyRunName(o, run.pipeline) << " anti " << std::fixed << std::setprecision(3)
                  << run.anti_accuracy;
        if (run.probe) std::cerr << " compression " << run.probe->compression;
        std::cerr << std::defaultfloat << "\n";
      }
      runs[s].push_back(std::move(run));
    }
    std::lock_guard<std::mutex> lock(log_mu);
    std::cerr << "seed " << seeds[s] << " done in "
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
              << " s\n";
  });

  std::vector<ModelRecord> records;
  summary["runs"] = ordered_json::array();
  for (const auto& per_seed : runs) {
    for (const ToyRun& run : per_seed) {
      const std::string stem = RunStem(run);
      const fs::path repr_path = out_dir / (stem + ".rprb");
      WriteRepr(run.reprs, repr_path);
      ordered_json m;
      m["objective"] = ObjectiveName(run.objective.kind);
      m["gamma"] = run.objective.kind == ObjectiveKind::kDfl ? ordered_json(run.objective.gamma)
                                                             : ordered_json(nullptr);
      m["pipeline"] = run.pipeline;
      m["seeds"] = {{"run", run.seed},
                    {"data", cfg.data.seed + run.seed},
                    {"probe", cfg.probe.seed + run.seed}};
      m["hyperparameters"] = ToyExperimentConfigToJson(cfg);
      m["accuracy"] = {{"train", run.train_accuracy},
                       {"iid_test", run.iid_accuracy},
                       {"anti_test", run.anti_accuracy},
                       {"baseline_anti_test", run.baseline_anti_accuracy}};
      m["repr"] = Digest(repr_path);
      m["probe"] = run.probe ? ordered_json(ProbeReportToJson(*run.probe)) : ordered_json(nullptr);
      m["created_utc"] = UtcNow();
      WriteJson(out_dir / (stem + ".manifest.json"), m);
      summary["runs"].push_back(stem);
      if (run.probe) records.push_back(ToRecord(run));
    }
  }
  if (cfg.run_probe) WriteFileAtomic(out_dir / "records.csv", RecordsToCsv(records));
  return records;
}

int CmdToy(const ToyArgs& a, const std::string& mode) {
  const ToyExperimentConfig cfg = ResolveToyConfig(a);
  const std::uint64_t base = a.seed ? *a.seed : DefaultSeed();
  const std::vector<std::uint64_t> seeds = SeedList(base, a.seeds);

  std::vector<DebiasObjective> objectives;
  if (mode == "single") {
    objectives.push_back({ParseObjective(a.objective), a.gamma});
  } else if (mode == "sweep-gamma") {
    if (a.gammas.size() < 2) throw Error(ErrorCode::kConfig, "--gammas needs at least two values");
    for (double g : a.gammas) objectives.push_back({ObjectiveKind::kDfl, g});
  } else {
    objectives.push_back({ObjectiveKind::kCe, 0.0});
    for (double g : a.gammas) objectives.push_back({ObjectiveKind::kDfl, g});
    objectives.push_back({ObjectiveKind::kPoe, 0.0});
    if (cfg.hyper.pipeline) objectives.push_back({ObjectiveKind::kConfReg, 0.0});
  }

  const fs::path out_dir(a.out_dir);
  ordered_json summary;
  summary["command"] = mode == "single" ? "toy" : "toy " + mode;
  summary["created_utc"] = UtcNow();
  summary["config"] = ToyExperimentConfigToJson(cfg);
  summary["pipeline"] = cfg.hyper.pipeline;
  summary["seeds"] = seeds;
  summary["objectives"] = ordered_json::array();
  for (const auto& o : objectives) summary["objectives"].push_back(ToyRunName(o, cfg.hyper.pipeline));
  if (!a.config.empty()) summary["config_file"] = Digest(a.config);

  const std::vector<ModelRecord> records = RunToyGrid(cfg, objectives, seeds, out_dir, a.jobs, summary);

  if (mode == "sweep-gamma" && cfg.run_probe) {
    const auto sweep = GammaSweep(records, a.gammas, std::min<std::size_t>(3, seeds.size()));
    WriteFileAtomic(out_dir / "gamma_sweep.csv", GammaSweepToCsv(sweep));
    WriteJson(out_dir / "gamma_sweep.json", GammaSweepToJson(sweep));
    summary["gamma_sweep"] = GammaSweepToJson(sweep);
  }
  if (mode == "suite" && cfg.run_probe) {
    const auto report = BuildCorrelationReport(records, {GroupTag::kBias, GroupTag::kDataset});
    WriteFileAtomic(out_dir / "correlation.csv", CorrelationReportToCsv(report));
    WriteFileAtomic(out_dir / "models.csv", ModelSummariesToCsv(report));
    WriteJson(out_dir / "correlation.json", CorrelationReportToJson(report));
    summary["correlation"] = CorrelationReportToJson(report);
    if (seeds.size() >= 3 && a.gammas.size() >= 2) {
      const auto sweep = GammaSweep(records, a.gammas);
      WriteFileAtomic(out_dir / "gamma_sweep.csv", GammaSweepToCsv(sweep));
      WriteJson(out_dir / "gamma_sweep.json", GammaSweepToJson(sweep));
      summary["gamma_sweep"] = GammaSweepToJson(sweep);
    }
  }
  WriteJson(out_dir / "run.json", summary);
  std::cout << out_dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- correlate

struct CorrelateArgs {
  std::string records;
  std::string out_dir = "report";
  std::vector<std::string> group_by = {"bias", "dataset"};
  std::string aggregation = "model_median";
  std::vector<double> gammas;
};

int CmdCorrelate(const CorrelateArgs& a) {
  const std::vector<ModelRecord> records = ReadRecordsCsv(a.records);
  std::vector<GroupTag> tags;
  for (const std::string& g : a.group_by) tags.push_back(ParseGroupTag(g));
  Aggregation agg;
  if (a.aggregation == "model_median") {
    agg = Aggregation::kModelMedian;
  } else if (a.aggregation == "record") {
    agg = Aggregation::kRecord;
  } else {
    throw Error(ErrorCode::kConfig, "--aggregation must be model_median or record");
  }
  EnsureDir(a.out_dir);
  const fs::path out(a.out_dir);
  const CorrelationReport report = BuildCorrelationReport(records, tags, agg);
  for (const CorrelationRow& row : report.rows) {
    if (!row.warning.empty()) {
      std::string g;
      for (const auto& v : row.group) g += (g.empty() ? "" : "/") + v;
      std::cerr << "warning: group " << g << ": " << row.warning << "\n";
    }
  }
  WriteFileAtomic(out / "correlation.csv", CorrelationReportToCsv(report));
  WriteFileAtomic(out / "models.csv", ModelSummariesToCsv(report));
  ordered_json j;
  j["command"] = "correlate";
  j["created_utc"] = UtcNow();
  j["inputs"] = {Digest(a.records)};
  j["correlation"] = CorrelationReportToJson(report);

  const bool has_dfl = std::any_of(records.begin(), records.end(), [](const ModelRecord& r) {
    std::string o = r.objective;
    std::transform(o.begin(), o.end(), o.begin(), [](unsigned char c) { return std::tolower(c); });
    return o == "dfl" && r.gamma.has_value();
  });
  if (!a.gammas.empty() || has_dfl) {
    try {
      const auto sweep = GammaSweep(records, a.gammas);
      WriteFileAtomic(out / "gamma_sweep.csv", GammaSweepToCsv(sweep));
      j["gamma_sweep"] = GammaSweepToJson(sweep);
    } catch (const Error& e) {
      if (!a.gammas.empty()) throw;
      std::cerr << "warning: gamma sweep skipped: " << e.what() << "\n";
      j["gamma_sweep"] = nullptr;
    }
  }
  WriteJson(out / "correlation.json", j);
  std::cout << out.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- export-info

int CmdExportInfo(const std::string& input) {
  const ReprHeader h = ReadReprHeader(input);
  std::error_code ec;
  const auto size = fs::file_size(input, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot stat " + input + ": " + ec.message());
  ordered_json j;
  j["path"] = input;
  j["magic"] = "RPRB";
  j["version"] = h.version;
  j["n"] = h.n;
  j["d"] = h.d;
  j["k"] = h.k;
  j["file_bytes"] = size;
  j["expected_bytes"] = ReprFileSize(h.n, h.d);
  std::cout << j.dump(2) << "\n";
  if (size != ReprFileSize(h.n, h.d)) {
    throw Error(ErrorCode::kLength, "file size " + std::to_string(size) + " does not match header (" +
                                        std::to_string(ReprFileSize(h.n, h.d)) + " bytes)");
  }
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"probekit: MDL probing of bias extractability and a toy debiasing lab"};
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs,-j", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  BuildArgs build;
  auto* c_build = app.add_subcommand("build-dataset", "Build balanced probing datasets");
  c_build->add_option("--task", build.task, "negwords | overlap | subsequence")->required();
  c_build->add_option("--schema", build.schema, "snli | mnli | fever")->required();
  c_build->add_option("--input", build.input, "Source JSONL for --split");
  c_build->add_option("--split", build.split, "Split of --input")->capture_default_str();
  c_build->add_option("--train", build.train, "Train split JSONL");
  c_build->add_option("--valid", build.valid, "Validation split JSONL");
  c_build->add_option("--test", build.test, "Test split JSONL");
  c_build->add_option("--out-dir", build.out_dir)->capture_default_str();
  c_build->add_option("--name", build.name, "Base dataset name (default: schema)");
  c_build->add_option("--neg-words", build.neg_words, "Negation word list, one per line");
  auto* build_seed = c_build->add_option("--seed", build.seed);

  ProbeArgs probe;
  std::uint64_t probe_seed = 0;
  auto* c_probe = app.add_subcommand("probe", "Online-code MDL probe of a representation file");
  c_probe->add_option("--reprs", probe.reprs, "Train RPRB file")->required();
  c_probe->add_option("--probing", probe.probing, "Train probing JSONL (default: labels in --reprs)");
  c_probe->add_option("--valid-reprs", probe.valid_reprs);
  c_probe->add_option("--valid-probing", probe.valid_probing);
  c_probe->add_option("--test-reprs", probe.test_reprs);
  c_probe->add_option("--test-probing", probe.test_probing);
  c_probe->add_option("--config", probe.config, "Probe config JSON");
  c_probe->add_option("--out", probe.out, "Report path")->capture_default_str();
  c_probe->add_flag("--diagnostic-uniform", probe.diagnostic_uniform, "Code every block uniformly");
  auto* probe_seed_opt = c_probe->add_option("--seed", probe_seed);

  ToyArgs toy;
  std::uint64_t toy_seed = 0;
  auto* c_toy = app.add_subcommand("toy", "Train toy models and probe their representations");
  auto add_toy_common = [&](CLI::App* c) {
    c->add_option("--seeds", toy.seeds, "Number of seeds")->capture_default_str();
    c->add_option("--weak", toy.weak, "explicit | tiny | subset");
    c->add_option("--config", toy.config, "Toy config JSON");
    c->add_option("--out-dir", toy.out_dir)->capture_default_str();
    c->add_option("--epochs", toy.epochs);
    c->add_option("--lr", toy.lr);
    c->add_flag("--no-probe", toy.no_probe, "Skip the MDL probe");
    c->add_flag("--end-to-end", toy.end_to_end, "Joint training of main and bias model");
    return c->add_option("--seed", toy_seed, "First seed");
  };
  auto* toy_seed_opt = add_toy_common(c_toy);
  c_toy->add_option("--objective", toy.objective, "ce | dfl | poe | confreg")->capture_default_str();
  c_toy->add_option("--gamma", toy.gamma, "DFL focusing parameter")->capture_default_str();

  auto* c_sweep = c_toy->add_subcommand("sweep-gamma", "DFL runs over a list of gammas");
  auto* sweep_seed_opt = add_toy_common(c_sweep);
  c_sweep->add_option("--gammas", toy.gammas)->delimiter(',')->capture_default_str();

  auto* c_suite = c_toy->add_subcommand("suite", "CE, DFL per gamma, PoE and ConfReg per seed");
  auto* suite_seed_opt = add_toy_common(c_suite);
  c_suite->add_option("--gammas", toy.gammas)->delimiter(',')->capture_default_str();

  CorrelateArgs corr;
  auto* c_corr = app.add_subcommand("correlate", "Correlation and gamma-sweep reports from records CSV");
  c_corr->add_option("--records", corr.records)->required();
  c_corr->add_option("--out-dir", corr.out_dir)->capture_default_str();
  c_corr->add_option("--group-by", corr.group_by)->delimiter(',')->capture_default_str();
  c_corr->add_option("--aggregation", corr.aggregation, "model_median | record")->capture_default_str();
  c_corr->add_option("--gammas", corr.gammas, "Required DFL gammas")->delimiter(',');

  std::string info_input;
  auto* c_info = app.add_subcommand("export-info", "Print the header of an RPRB file");
  c_info->add_option("--input,input", info_input)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (c_build->parsed()) {
      if (!*build_seed) build.seed = DefaultSeed();
      return CmdBuildDataset(build);
    }
    if (c_probe->parsed()) {
      probe.seed = *probe_seed_opt ? probe_seed : DefaultSeed();
      return CmdProbe(probe);
    }
    if (c_toy->parsed()) {
      toy.jobs = jobs;
      std::string mode = "single";
      CLI::Option* seed_opt = toy_seed_opt;
      if (c_sweep->parsed()) {
        mode = "sweep-gamma";
        seed_opt = sweep_seed_opt;
      } else if (c_suite->parsed()) {
        mode = "suite";
        seed_opt = suite_seed_opt;
      }
      if (*seed_opt || *toy_seed_opt) toy.seed = toy_seed;
      return CmdToy(toy, mode);
    }
    if (c_corr->parsed()) return CmdCorrelate(corr);
    if (c_info->parsed()) return CmdExportInfo(info_input);
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace
}  // namespace probekit

int main(int argc, char** argv) { return probekit::Main(argc, argv); }
