// Copyright 2026 The StreamPCA Authors. All Rights Reserved.
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

#include "streampca/cli.h"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "CLI11.hpp"
#include "json.hpp"
#include "streampca/bench.h"
#include "streampca/data.h"
#include "streampca/format.h"

namespace streampca::cli {

namespace {

using nlohmann::json;

std::uint64_t Fnv1a(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string Hex(std::uint64_t value) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << value;
  return s.str();
}

json FiniteOrNull(double v) { return std::isfinite(v) ? json(v) : json(); }

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::uint64_t DefaultSeed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return 42;
  std::uint64_t value = 0;
  const std::string_view text(env);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError(std::string(kSeedEnv) + " is not an unsigned integer: '" +
                     std::string(text) + "'");
  }
  return value;
}

json SpecJson(const RunSpec& spec) {
  json methods = json::array();
  for (Method m : spec.methods) methods.push_back(std::string(MethodName(m)));
  json j;
  j["methods"] = methods;
  j["data"] = spec.data ? json(spec.data->string()) : json();
  j["n"] = spec.n;
  j["d"] = spec.d;
  j["spectrum_decay"] = spec.spectrum_decay;
  j["scale"] = spec.scale;
  j["k"] = spec.k;
  j["cap"] = spec.cap;
  j["eta"] = spec.eta ? json(*spec.eta) : json();
  j["iters"] = spec.iters;
  j["seed"] = spec.seed;
  j["out"] = spec.out.string();
  j["cadence"] = spec.cadence;
  j["timing"] = spec.timing;
  j["split"] = kDefaultSplit;
  j["eta_grid"] = DefaultRateGrid();
  j["schedule"] = "eta0/sqrt(t)";
  return j;
}

Dataset LoadData(const RunSpec& spec) {
  if (spec.data) return LoadCsv(*spec.data, CsvHeader::kAuto);
  return GenerateOrthogonal(spec.n, spec.d,
                            GeometricSpectrum(spec.d, spec.spectrum_decay),
                            spec.scale, spec.seed);
}

int RunMethods(const RunSpec& spec, bool combined, std::string_view command,
               std::ostream& out, std::ostream& err) {
  spec.Validate();
  const Dataset raw = LoadData(spec);
  if (spec.k > raw.dim()) {
    throw UsageError("--k " + std::to_string(spec.k) +
                     " exceeds data dimension " + std::to_string(raw.dim()));
  }
  const PreparedData prepared = PrepareExperiment(raw, kDefaultSplit, spec.seed);

  SolverConfig config;
  config.target_rank = spec.k;
  config.cap = spec.cap;
  config.seed = spec.seed;
  config.max_iterations = spec.iters > 0 ? spec.iters : prepared.split.train.size();
  config.Validate(raw.dim());

  RunOptions options;
  options.cadence = spec.cadence;
  options.record_initial = true;
  options.measure_time = spec.timing;
  const std::vector<double> grid = DefaultRateGrid();

  std::filesystem::create_directories(spec.out);

  json manifest;
  manifest["command"] = std::string(command);
  manifest["spec"] = SpecJson(spec);
  manifest["resolved"] = {
      {"rows", raw.size()},
      {"dim", raw.dim()},
      {"train_rows", prepared.split.train.size()},
      {"tune_rows", prepared.split.tune.size()},
      {"test_rows", prepared.split.test.size()},
      {"iterations", config.max_iterations},
      {"cadence", options.cadence > 0 ? options.cadence
                                      : DefaultCadence(config.max_iterations)}};
  manifest["runs"] = json::array();

  std::vector<MethodTrajectory> trajectories;
  std::vector<std::string> failed;
  for (Method method : spec.methods) {
    const std::string name(MethodName(method));
    json entry{{"method", name}};
    try {
      const ProtocolRun run =
          RunProtocol(method, prepared, config, spec.eta, grid, options);
      const auto& records = run.result.trajectory.records;
      Index max_rank = 0;
      for (const auto& r : records) max_rank = std::max(max_rank, r.rank);
      entry["status"] = "ok";
      entry["eta0"] = UsesLearningRate(method) ? json(run.rate) : json();
      if (run.tuning) {
        json scores = json::array();
        for (const auto& [rate, score] : run.tuning->scores) {
          scores.push_back({{"eta0", rate}, {"tune_objective", FiniteOrNull(score)}});
        }
        entry["tuning"] = scores;
      }
      entry["reference_objective"] = run.reference.value;
      entry["final_objective"] = records.back().objective;
      entry["final_suboptimality"] = records.back().suboptimality;
      entry["max_rank"] = max_rank;
      entry["records"] = records.size();

      out << name << ": eta0="
          << (UsesLearningRate(method) ? FormatDouble(run.rate) : "-")
          << " final_suboptimality="
          << FormatDouble(records.back().suboptimality)
          << " max_rank=" << max_rank << '\n';

      MethodTrajectory traj{name, run.result.trajectory};
      if (!combined) {
        WriteText(spec.out / (name + ".csv"),
                  TrajectoryCsv(std::span<const MethodTrajectory>(&traj, 1)));
      }
      trajectories.push_back(std::move(traj));
    } catch (const Error& e) {
      entry["status"] = "failed";
      entry["error"] = e.what();
      failed.push_back(name);
      err << name << " failed: " << e.what() << '\n';
    }
    manifest["runs"].push_back(entry);
  }
  if (combined) WriteText(spec.out / "compare.csv", TrajectoryCsv(trajectories));
  WriteText(spec.out / "manifest.json", manifest.dump(2) + "\n");

  if (!failed.empty()) {
    err << "failed methods:";
    for (const auto& f : failed) err << ' ' << f;
    err << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

template <typename F>
int Guard(F&& body, std::ostream& err) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgumentError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::vector<Method> ParseMethodList(const std::string& text) {
  std::vector<Method> methods;
  std::string_view rest(text);
  while (true) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    try {
      methods.push_back(ParseMethod(item));
    } catch (const InvalidArgumentError& e) {
      throw UsageError(e.what());
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return methods;
}

}  // namespace

void RunSpec::Validate() const {
  if (methods.empty()) throw UsageError("no method requested");
  if (!data && (n < 1 || d < 1)) throw UsageError("--n and --d must be >= 1");
  if (k < 1) throw UsageError("--k must be >= 1");
  if (!data && k > d) {
    throw UsageError("--k " + std::to_string(k) + " exceeds --d " +
                     std::to_string(d));
  }
  if (cap < k) throw UsageError("--cap must be >= --k");
  if (eta && !(*eta > 0.0)) throw UsageError("--eta must be positive");
  if (iters < 0) throw UsageError("--iters must be >= 0");
  if (cadence < 0) throw UsageError("--cadence must be >= 0");
  if (!(spectrum_decay > 0.0)) throw UsageError("--spectrum-decay must be > 0");
}

std::filesystem::path MetadataPath(const std::filesystem::path& csv) {
  std::filesystem::path meta = csv;
  meta.replace_extension(".meta.json");
  return meta;
}

int CmdGenerate(const GenerateSpec& spec, std::ostream& out,
                std::ostream& err) {
  return Guard(
      [&] {
        if (spec.n < 1 || spec.d < 1) {
          throw UsageError("--n and --d must be >= 1");
        }
        if (!(spec.spectrum_decay > 0.0)) {
          throw UsageError("--spectrum-decay must be > 0");
        }
        const Eigen::VectorXd spectrum =
            GeometricSpectrum(spec.d, spec.spectrum_decay);
        const Dataset data =
            GenerateOrthogonal(spec.n, spec.d, spectrum, spec.scale, spec.seed);
        if (spec.out.has_parent_path()) {
          std::filesystem::create_directories(spec.out.parent_path());
        }
        SaveCsv(data, spec.out, /*header=*/true);

        std::string basis_text;
        for (Index j = 0; j < data.basis.cols(); ++j) {
          for (Index i = 0; i < data.basis.rows(); ++i) {
            basis_text += FormatDouble(data.basis(i, j));
            basis_text += ',';
          }
        }
        json meta;
        meta["seed"] = spec.seed;
        meta["n"] = spec.n;
        meta["d"] = spec.d;
        meta["spectrum_decay"] = spec.spectrum_decay;
        meta["scale"] = spec.scale;
        meta["spectrum"] = std::vector<double>(spectrum.data(),
                                               spectrum.data() + spectrum.size());
        meta["basis_fnv1a64"] = Hex(Fnv1a(basis_text));
        WriteText(MetadataPath(spec.out), meta.dump(2) + "\n");
        out << "wrote " << spec.n << "x" << spec.d << " samples to "
            << spec.out.string() << '\n';
        return kExitOk;
      },
      err);
}

int CmdRun(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return Guard([&] { return RunMethods(spec, false, "run", out, err); }, err);
}

int CmdCompare(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return Guard([&] { return RunMethods(spec, true, "compare", out, err); },
               err);
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  std::uint64_t default_seed = 42;
  try {
    default_seed = DefaultSeed();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Stochastic PCA solvers and benchmark harness"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  GenerateSpec gen;
  gen.seed = default_seed;
  CLI::App* generate = app.add_subcommand(
      "generate", "Write a synthetic orthogonal-mixture dataset as CSV");
  generate->add_option("--n", gen.n, "Number of samples");
  generate->add_option("--d", gen.d, "Dimension");
  generate->add_option("--spectrum-decay", gen.spectrum_decay,
                       "Mixing probabilities p_i proportional to decay^i");
  generate->add_option("--scale", gen.scale, "Sample amplitude scale");
  generate->add_option("--seed", gen.seed,
                       std::string("Random seed (default from ") + kSeedEnv +
                           " when set)");
  generate->add_option("--out", gen.out, "Output CSV path");

  RunSpec run_spec;
  run_spec.seed = default_seed;
  std::string run_method = "msg";
  std::string compare_methods = "batch,incremental,power,msg,capped_msg";
  std::string data_path;
  double eta = 0.0;
  bool no_timing = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--data", data_path,
                    "CSV input (header auto-detected); synthetic if empty");
    cmd->add_option("--n", run_spec.n, "Synthetic sample count");
    cmd->add_option("--d", run_spec.d, "Synthetic dimension");
    cmd->add_option("--spectrum-decay", run_spec.spectrum_decay,
                    "Synthetic spectrum decay");
    cmd->add_option("--k", run_spec.k, "Target rank");
    cmd->add_option("--cap", run_spec.cap, "Rank cap for capped_msg");
    cmd->add_option("--eta", eta,
                    "Fixed base step size eta0 (0 = tune over 2^-6..2^2)");
    cmd->add_option("--iters", run_spec.iters,
                    "Iterations (0 = one pass over the training split)");
    cmd->add_option("--seed", run_spec.seed,
                    std::string("Random seed (default from ") + kSeedEnv +
                        " when set)");
    cmd->add_option("--out", run_spec.out, "Output directory");
    cmd->add_option("--cadence", run_spec.cadence,
                    "Probe every N steps (0 = ceil(T/500))");
    cmd->add_flag("--no-timing", no_timing,
                  "Write elapsed_s as 0 so reruns are byte-identical");
  };

  CLI::App* run = app.add_subcommand("run", "Run one method");
  run->add_option("--method", run_method,
                  "batch, incremental, power, msg or capped_msg");
  add_common(run);

  CLI::App* compare =
      app.add_subcommand("compare", "Run several methods on one shared split");
  compare->add_option("--methods", compare_methods, "Comma-separated methods");
  add_common(compare);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("streampca");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  if (*generate) return CmdGenerate(gen, out, err);

  if (!data_path.empty()) run_spec.data = data_path;
  if (eta != 0.0) run_spec.eta = eta;
  run_spec.timing = !no_timing;
  try {
    run_spec.methods = ParseMethodList(*run ? run_method : compare_methods);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (*run && run_spec.methods.size() != 1) {
    err << "usage error: run takes exactly one --method\n";
    return kExitUsage;
  }
  return *run ? CmdRun(run_spec, out, err) : CmdCompare(run_spec, out, err);
}

}  // namespace streampca::cli
