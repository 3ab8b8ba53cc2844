// Copyright 2026 The tmig Authors
// SPDX-License-Identifier: Apache-2.0

#include "tmig/cli/commands.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tmig/cli/oracle.hpp"
#include "tmig/format.hpp"
#include "tmig/plan_io.hpp"

namespace tmig::cli {

namespace {

namespace fs = std::filesystem;

/// Writes named files into a directory, or to a stream when the directory
/// is "-".
class OutputSink {
 public:
  OutputSink(std::string dir, std::ostream& stream) : dir_(std::move(dir)), stream_(stream) {
    if (dir_ == "-") return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir_ + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    if (dir_ == "-") {
      stream_ << "# " << name << '\n' << content;
      return;
    }
    const auto path = fs::path(dir_) / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  }

 private:
  std::string dir_;
  std::ostream& stream_;
};

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text, bool bytes) {
  const auto colon = text.find(':');
  const auto lo_text = text.substr(0, colon);
  const auto hi_text = colon == std::string::npos ? lo_text : text.substr(colon + 1);
  const auto parse = [&](const std::string& s) -> std::int64_t {
    if (bytes) return parse_bytes(s);
    ExperimentConfig probe;
    set_config_value(probe, "min_period_us", s);
    return probe.min_period_us;
  };
  return {parse(lo_text), parse(hi_text)};
}

std::string policy_label(PolicyKind k) { return std::string(to_string(k)); }

struct RunContext {
  ExperimentConfig config;
  std::ostream& out;
};

int cmd_analyze(RunContext& ctx) {
  const auto trace = load_trace(ctx.config.trace);
  const auto report = characterize(trace, build_timeline(trace));
  OutputSink sink(ctx.config.out, ctx.out);
  sink.write("active_vs_total.csv", report.active_vs_total_csv());
  sink.write("period_cdf.csv", report.period_cdf_csv());
  sink.write("period_scatter.csv", report.period_scatter_csv());
  return kExitOk;
}

PlannerOptions planner_options(const ExperimentConfig& c) {
  PlannerOptions o;
  o.min_period_us = c.min_period_us;
  o.eager_prefetch = c.eager_prefetch;
  o.allow_host = !(c.policy.size() == 1 && c.policy.front() == PolicyKind::G10SsdOnly);
  return o;
}

int cmd_plan(RunContext& ctx) {
  const auto trace = load_trace(ctx.config.trace);
  const auto bundle = plan_migrations(trace, ctx.config.device, planner_options(ctx.config));
  OutputSink sink(ctx.config.out, ctx.out);
  sink.write("plan.json", plan_to_json(bundle.plan));
  sink.write("program.g10", serialize_program(bundle.program));
  return kExitOk;
}

int cmd_simulate(RunContext& ctx) {
  const auto trace = load_trace(ctx.config.trace);
  std::vector<PolicyRun> runs;
  const auto opts = ctx.config.policy_options();
  for (auto kind : ctx.config.policy) runs.push_back(run_policy(kind, trace, ctx.config.device, opts));
  OutputSink sink(ctx.config.out, ctx.out);
  sink.write("summary.csv", summary_csv(runs));
  sink.write("kernels.csv", kernels_csv(runs.front().result));
  if (runs.size() > 1) {
    for (const auto& r : runs) sink.write("kernels_" + policy_label(r.kind) + ".csv", kernels_csv(r.result));
  }
  sink.write("traffic.csv", traffic_csv(runs));
  sink.write("result.json", result_json(runs));
  return kExitOk;
}

int cmd_sweep(RunContext& ctx) {
  if (ctx.config.sweep.empty()) {
    throw Error(ErrorCode::MalformedInput, "sweep needs at least one 'sweep.<key> = ...' axis");
  }
  const auto csv = run_sweep_csv(ctx.config);
  OutputSink sink(ctx.config.out, ctx.out);
  sink.write("sweep.csv", csv);
  return kExitOk;
}

int cmd_oracle(RunContext& ctx, std::size_t max_periods) {
  const auto trace = load_trace(ctx.config.trace);
  const auto po = planner_options(ctx.config);
  const auto r = run_brute_force(trace, ctx.config.device, po, max_periods);
  std::ostringstream csv;
  csv << "instance,periods,greedy_us,optimal_us,ratio\n";
  const auto name = fs::path(ctx.config.trace).stem().string();
  csv << name << ',' << r.periods << ',' << r.greedy_us << ',' << r.optimal_us << ','
      << format_fixed(r.ratio, 6) << '\n';
  OutputSink sink(ctx.config.out, ctx.out);
  sink.write("oracle.csv", csv.str());
  sink.write("optimal_plan.json", plan_to_json(r.best_plan));
  return kExitOk;
}

int cmd_gen(RunContext& ctx, const SynthParams& params) {
  const auto trace = synthesize_trace(params);
  OutputSink sink(ctx.config.out, ctx.out);
  sink.write("trace.json", serialize_trace(trace));
  return kExitOk;
}

}  // namespace

std::string summary_csv(const std::vector<PolicyRun>& runs) {
  std::ostringstream out;
  out << "policy,total_us,ideal_us,compute_us,overlap_us,stall_us,faults\n";
  for (const auto& r : runs) {
    const auto& s = r.result;
    out << to_string(r.kind) << ',' << s.total_us << ',' << s.ideal_us << ',' << s.compute_us
        << ',' << s.overlapped_migration_us << ',' << s.stall_us << ',' << s.fault_count << '\n';
  }
  return out.str();
}

std::string kernels_csv(const SimResult& result) {
  std::ostringstream out;
  out << "index,start,end,stall_us,slowdown\n";
  for (std::size_t i = 0; i < result.kernels.size(); ++i) {
    const auto& k = result.kernels[i];
    out << i << ',' << k.start_us << ',' << k.end_us << ',' << k.stall_us << ','
        << format_fixed(k.slowdown, 6) << '\n';
  }
  return out.str();
}

std::string traffic_csv(const std::vector<PolicyRun>& runs) {
  std::ostringstream out;
  out << "ssd_read,ssd_write,host_in,host_out\n";
  for (const auto& r : runs) {
    const auto& t = r.result.traffic;
    out << t.ssd_read << ',' << t.ssd_write << ',' << t.host_in << ',' << t.host_out << '\n';
  }
  return out.str();
}

std::string result_json(const std::vector<PolicyRun>& runs) {
  using ojson = nlohmann::ordered_json;
  ojson doc = ojson::array();
  for (const auto& r : runs) {
    const auto& s = r.result;
    ojson row;
    row["policy"] = std::string(to_string(r.kind));
    row["total_us"] = s.total_us;
    row["ideal_us"] = s.ideal_us;
    row["normalized_throughput"] = s.normalized_throughput();
    row["compute_us"] = s.compute_us;
    row["overlapped_migration_us"] = s.overlapped_migration_us;
    row["stall_us"] = s.stall_us;
    row["fault_count"] = s.fault_count;
    row["fault_stall_us"] = s.fault_stall_us;
    row["peak_gpu_bytes"] = s.peak_gpu_bytes;
    row["traffic"] = {{"ssd_read", s.traffic.ssd_read},
                      {"ssd_write", s.traffic.ssd_write},
                      {"host_in", s.traffic.host_in},
                      {"host_out", s.traffic.host_out}};
    row["infeasible"] = r.infeasible;
    row["event_log_hash"] = s.event_log_hash;
    doc.push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::string run_sweep_csv(const ExperimentConfig& config) {
  std::vector<const SweepAxis*> axes;
  const SweepAxis* policy_axis = nullptr;
  for (const auto& a : config.sweep) {
    if (!is_sweep_key(a.key)) {
      throw Error(ErrorCode::MalformedInput, "unknown sweep axis '" + a.key + "'");
    }
    if (a.key == "policy") {
      policy_axis = &a;
    } else {
      axes.push_back(&a);
    }
  }

  struct Job {
    std::vector<std::string> values;  // one per non-policy axis
    ExperimentConfig cfg;
    PolicyKind policy = PolicyKind::G10;
  };
  std::vector<Job> jobs;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    ExperimentConfig cfg = config;
    cfg.sweep.clear();
    std::vector<std::string> values;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& v = axes[a]->values[idx[a]];
      set_config_value(cfg, axes[a]->key, v);
      values.push_back(v);
    }
    cfg.device.validate();
    std::vector<PolicyKind> policies = cfg.policy;
    if (policy_axis != nullptr) {
      policies.clear();
      for (const auto& name : policy_axis->values) {
        auto p = parse_policy(name);
        if (!p) throw Error(ErrorCode::MalformedInput, "unknown policy '" + name + "'");
        policies.push_back(*p);
      }
    }
    for (auto p : policies) jobs.push_back({values, cfg, p});
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a]->values.size()) break;
      idx[a] = 0;
      if (a == 0) {
        a = axes.size() + 1;
        break;
      }
    }
    if (axes.empty() || a == axes.size() + 1) break;
  }

  // Traces are loaded once and shared read-only.
  std::map<std::string, WorkloadTrace> traces;
  for (const auto& j : jobs) {
    if (!traces.count(j.cfg.trace)) traces.emplace(j.cfg.trace, load_trace(j.cfg.trace));
  }

  std::vector<PolicyRun> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto& j = jobs[i];
        results[i] =
            run_policy(j.policy, traces.at(j.cfg.trace), j.cfg.device, j.cfg.policy_options());
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, config.workers));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(workers, jobs.size()); ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::ostringstream out;
  for (const auto* a : axes) out << a->key << ',';
  out << "policy,total_us,ideal_us,normalized_throughput,stall_us,faults,ssd_read,ssd_write,"
         "host_in,host_out\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& s = results[i].result;
    for (const auto& v : jobs[i].values) out << v << ',';
    out << to_string(jobs[i].policy) << ',' << s.total_us << ',' << s.ideal_us << ','
        << format_fixed(s.normalized_throughput(), 6) << ',' << s.stall_us << ','
        << s.fault_count << ',' << s.traffic.ssd_read << ',' << s.traffic.ssd_write << ','
        << s.traffic.host_in << ',' << s.traffic.host_out << '\n';
  }
  return out.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tensor migration planner and memory-hierarchy simulator", "tmig"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string policy;
  std::optional<int> workers;
  app.add_option("--config", config_path, "Experiment config file (key = value)");
  app.add_option("--out", out_dir, "Output directory, or - for standard output");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--policy", policy, "Policy name or comma-separated list");
  app.add_option("--workers", workers, "Parallel sweep workers");

  std::string trace_arg;
  const auto with_trace = [&](CLI::App* sub) {
    sub->add_option("trace", trace_arg, "Trace JSON file");
    sub->fallthrough();
    return sub;
  };
  auto* analyze = with_trace(app.add_subcommand("analyze", "Write characterization CSVs"));
  auto* plan = with_trace(app.add_subcommand("plan", "Write plan.json and program.g10"));
  auto* sim = with_trace(app.add_subcommand("simulate", "Simulate one or more policies"));
  auto* sweep = with_trace(app.add_subcommand("sweep", "Run the config's sweep axes"));
  auto* oracle = with_trace(app.add_subcommand("oracle", "Brute-force the best plan"));
  std::size_t max_periods = 8;
  oracle->add_option("--max-periods", max_periods, "Largest instance to enumerate");

  auto* gen = app.add_subcommand("gen", "Generate a synthetic training trace");
  gen->fallthrough();
  SynthParams synth;
  synth.layers = 8;
  std::string act = "1MB:4MB", weight = "1MB:4MB", dur = "200:1000";
  gen->add_option("--layers", synth.layers, "Number of layers");
  gen->add_option("--act-size", act, "Activation size range lo:hi");
  gen->add_option("--weight-size", weight, "Weight size range lo:hi");
  gen->add_option("--duration", dur, "Kernel duration range lo:hi (us)");

  std::vector<std::string> argv_store{"tmig"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "tmig: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!trace_arg.empty()) cfg.trace = trace_arg;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (seed) cfg.seed = *seed;
    if (!policy.empty()) set_config_value(cfg, "policy", policy);
    if (workers) set_config_value(cfg, "workers", std::to_string(*workers));
    cfg.device.validate();
    RunContext ctx{cfg, out};

    if (gen->parsed()) {
      const auto a = parse_range(act, true);
      const auto w = parse_range(weight, true);
      const auto d = parse_range(dur, false);
      synth.act_size = {a.first, a.second};
      synth.weight_size = {w.first, w.second};
      synth.duration_us = {d.first, d.second};
      synth.seed = cfg.seed;
      return cmd_gen(ctx, synth);
    }
    if (cfg.trace.empty() && !sweep->parsed()) {
      throw Error(ErrorCode::MalformedInput, "no trace given (argument or 'trace' config key)");
    }
    if (analyze->parsed()) return cmd_analyze(ctx);
    if (plan->parsed()) return cmd_plan(ctx);
    if (sim->parsed()) return cmd_simulate(ctx);
    if (sweep->parsed()) return cmd_sweep(ctx);
    if (oracle->parsed()) return cmd_oracle(ctx, max_periods);
  } catch (const Error& e) {
    err << "tmig: " << e.what() << '\n';
    return e.code() == ErrorCode::IoError ? kExitIo : kExitInput;
  } catch (const std::exception& e) {
    err << "tmig: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace tmig::cli
