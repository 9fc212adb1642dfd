// Copyright 2026 The shaped-ucbvi Authors.
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

#include "sucbvi/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sucbvi/error.hpp"
#include "sucbvi/modelsel.hpp"
#include "sucbvi/pruning.hpp"

namespace sucbvi {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Line of the first occurrence of "key" in the document, 0 if absent
// (e.g. the key came from an override).
int line_of_key(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const std::size_t at = text.find(quoted);
  return at == std::string_view::npos ? 0 : line_of_offset(text, at);
}

[[noreturn]] void config_error(std::string_view text, std::string_view key,
                               const std::string& what) {
  const int line = line_of_key(text, key);
  std::string msg = line > 0 ? "config line " + std::to_string(line) + ": " : "config: ";
  fail(ErrorCode::kConfig, msg + "'" + std::string(key) + "' " + what);
}

json parse_document(std::string_view text, std::string_view label) {
  try {
    json j = json::parse(text.begin(), text.end());
    if (!j.is_object()) {
      fail(ErrorCode::kConfig, std::string(label) + ": top level must be an object");
    }
    return j;
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kConfig, std::string(label) + " line " +
                                 std::to_string(line_of_offset(text, e.byte)) +
                                 ": malformed JSON (" + e.what() + ")");
  }
}

double get_real(const json& j, std::string_view text, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number()) config_error(text, key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) config_error(text, key, "must be finite");
  return x;
}

std::vector<double> get_reals(const json& j, std::string_view text, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array()) config_error(text, key, "must be an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) {
      config_error(text, key, "must be an array of finite numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

std::uint64_t get_count(const json& j, std::string_view text, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<std::int64_t>() < 0)) {
    config_error(text, key, "must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const json& j, std::string_view text, const char* key) {
  const json& v = j.at(key);
  if (!v.is_boolean()) config_error(text, key, "must be true or false");
  return v.get<bool>();
}

ExperimentConfig parse_config(const json& j, std::string_view text) {
  static const std::set<std::string> known{
      "env",   "variants", "bonus",  "beta",   "corrupt_sigma", "episodes", "seeds",
      "output_dir", "deltas", "betas", "sigmas", "members",       "gnuplot"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) config_error(text, key, "is not a known field");
  }
  ExperimentConfig c;
  if (j.contains("env")) {
    const json& e = j["env"];
    if (e.is_string()) {
      c.env_name = e.get<std::string>();
      const auto& names = preset_names();
      if (std::find(names.begin(), names.end(), c.env_name) == names.end()) {
        config_error(text, "env", "names an unknown preset '" + c.env_name + "'");
      }
    } else if (e.is_object()) {
      if (!e.contains("rows") || !e["rows"].is_array() || !e.contains("horizon") ||
          !e["horizon"].is_number_integer()) {
        config_error(text, "env", "must give \"rows\" (strings) and \"horizon\" (integer)");
      }
      std::vector<std::string> rows;
      for (const json& r : e["rows"]) {
        if (!r.is_string()) config_error(text, "rows", "must be strings");
        rows.push_back(r.get<std::string>());
      }
      c.env_name = e.value("name", std::string("maze"));
      try {
        c.maze = MazeSpec::from_ascii(c.env_name, rows, e["horizon"].get<int>());
      } catch (const Error& err) {
        config_error(text, "env", err.what());
      }
    } else {
      config_error(text, "env", "must be a preset name or a maze object");
    }
  }
  if (j.contains("variants")) {
    const json& v = j["variants"];
    if (!v.is_array() || v.empty()) config_error(text, "variants", "must be a nonempty array");
    c.variants.clear();
    for (const json& x : v) {
      if (!x.is_string()) config_error(text, "variants", "must hold variant names");
      try {
        c.variants.push_back(parse_variant(x.get<std::string>()));
      } catch (const Error& err) {
        config_error(text, "variants", err.what());
      }
    }
  }
  if (j.contains("bonus")) {
    const json& b = j["bonus"];
    if (!b.is_object()) config_error(text, "bonus", "must be an object");
    for (const auto& [key, value] : b.items()) {
      if (key != "kind" && key != "c" && key != "delta") {
        config_error(text, key, "is not a known bonus field");
      }
    }
    if (b.contains("kind")) {
      if (!b["kind"].is_string()) config_error(text, "kind", "must be a string");
      try {
        c.bonus.kind = parse_bonus_kind(b["kind"].get<std::string>());
      } catch (const Error& err) {
        config_error(text, "kind", err.what());
      }
    }
    if (b.contains("c")) c.bonus.c = get_real(b, text, "c");
    if (b.contains("delta")) c.bonus.delta = get_real(b, text, "delta");
  }
  if (j.contains("beta")) c.beta = get_real(j, text, "beta");
  if (j.contains("corrupt_sigma")) c.corrupt_sigma = get_real(j, text, "corrupt_sigma");
  if (j.contains("episodes")) c.episodes = get_count(j, text, "episodes");
  if (j.contains("seeds")) {
    const json& s = j["seeds"];
    if (!s.is_array() || s.empty()) config_error(text, "seeds", "must be a nonempty array");
    c.seeds.clear();
    for (const json& x : s) {
      if (!x.is_number_unsigned()) config_error(text, "seeds", "must be nonnegative integers");
      c.seeds.push_back(x.get<std::uint64_t>());
    }
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) config_error(text, "output_dir", "must be a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("deltas")) c.deltas = get_reals(j, text, "deltas");
  if (j.contains("betas")) c.betas = get_reals(j, text, "betas");
  if (j.contains("sigmas")) c.sigmas = get_reals(j, text, "sigmas");
  if (j.contains("members")) c.members = get_bool(j, text, "members");
  if (j.contains("gnuplot")) c.gnuplot = get_bool(j, text, "gnuplot");

  if (!(c.beta >= 1.0)) config_error(text, "beta", "must be >= 1");
  if (!(c.corrupt_sigma >= 0.0)) config_error(text, "corrupt_sigma", "must be >= 0");
  if (!(c.bonus.c >= 0.0)) config_error(text, "c", "must be >= 0");
  if (!(c.bonus.delta > 0.0 && c.bonus.delta < 1.0)) {
    config_error(text, "delta", "must lie in (0, 1)");
  }
  for (double d : c.deltas) {
    if (!(d > 0.0)) config_error(text, "deltas", "must all be positive");
  }
  for (double b : c.betas) {
    if (!(b >= 1.0)) config_error(text, "betas", "must all be >= 1");
  }
  for (double s : c.sigmas) {
    if (!(s >= 0.0)) config_error(text, "sigmas", "must all be >= 0");
  }
  if (c.output_dir.empty()) config_error(text, "output_dir", "must not be empty");
  return c;
}

// ---------------------------------------------------------------------------
// Output helpers

class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) fail(ErrorCode::kIo, "cannot create " + root_.string() + ": " + ec.message());
  }

  const fs::path& root() const { return root_; }

  void write(const fs::path& rel, const std::string& body) {
    const fs::path full = root_ / rel;
    std::error_code ec;
    fs::create_directories(full.parent_path(), ec);
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) fail(ErrorCode::kIo, "cannot write " + full.string());
    std::lock_guard<std::mutex> lock(mu_);
    files_.push_back(rel);
  }

  std::vector<fs::path> files() const {
    std::vector<fs::path> out = files_;
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  fs::path root_;
  std::mutex mu_;
  std::vector<fs::path> files_;
};

// Runs fn(0..n-1) on the worker pool. The first failure by index is
// rethrown after every job has finished.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string trace_csv(const RegretTrace& trace, bool with_arm) {
  std::ostringstream out;
  if (!with_arm) {
    write_trace_csv(trace, out);
    return out.str();
  }
  out << "episode,instant_regret,cumulative_regret,episodic_return,optimism_holds,arm\n";
  for (const EpisodeRecord& r : trace.episodes) {
    out << r.episode << ',' << format_number(r.instant_regret) << ','
        << format_number(r.cumulative_regret) << ',' << format_number(r.episodic_return)
        << ',' << (r.optimism_holds ? 1 : 0) << ',' << r.arm << '\n';
  }
  return out.str();
}

std::string heatmap_csv(const GridEnv& env, const std::vector<std::uint64_t>& visits) {
  const StateLayout& L = env.mdp.layout();
  std::vector<std::uint64_t> per_cell(env.cells.size(), 0);
  for (int h = 0; h <= L.horizon(); ++h) {
    for (StateIndex s = 0; s < L.layer_size(h); ++s) per_cell[s] += visits[L.global(h, s)];
  }
  std::vector<std::size_t> order(env.cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Cell& x = env.cells[a];
    const Cell& y = env.cells[b];
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  std::ostringstream out;
  out << "row,col,visits\n";
  for (std::size_t i : order) {
    out << env.cells[i].row << ',' << env.cells[i].col << ',' << per_cell[i] << '\n';
  }
  return out.str();
}

struct MeanErr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanErr mean_stderr(const std::vector<double>& xs) {
  MeanErr m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    const double n = static_cast<double>(xs.size());
    m.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return m;
}

// episode,mean_cumulative_regret,stderr_cumulative_regret
std::string aggregate_csv(const std::vector<const RegretTrace*>& traces) {
  std::ostringstream out;
  out << "episode,mean_cumulative_regret,stderr_cumulative_regret\n";
  const std::size_t T = traces.empty() ? 0 : traces.front()->episodes.size();
  std::vector<double> xs(traces.size());
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < traces.size(); ++k) {
      xs[k] = traces[k]->episodes[t].cumulative_regret;
    }
    const MeanErr m = mean_stderr(xs);
    out << (t + 1) << ',' << format_number(m.mean) << ',' << format_number(m.stderr_) << '\n';
  }
  return out.str();
}

std::string seed_tag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

std::string value_tag(double x) {
  std::string s = format_number(x);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

std::string gnuplot_script(const std::string& title,
                           const std::vector<std::pair<std::string, std::string>>& series) {
  std::ostringstream out;
  out << "set datafile separator ','\n"
      << "set key left top\n"
      << "set xlabel 'episode'\n"
      << "set ylabel 'cumulative regret'\n"
      << "set title '" << title << "'\n"
      << "plot ";
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i) out << ", \\\n     ";
    out << "'" << series[i].first << "' using 1:2 every ::1 with lines title '"
        << series[i].second << "'";
  }
  out << "\n";
  return out.str();
}

struct Context {
  GridEnv env;
  ValueTable vstar;
  std::uint64_t episodes;
};

Context make_context(const ExperimentConfig& config) {
  Context ctx{config.build_env(), {}, config.episode_count()};
  ctx.vstar = exact_optimal_values(ctx.env.mdp);
  return ctx;
}

BonusSpec bonus_with_beta(const ExperimentConfig& config, double beta) {
  BonusSpec spec = config.bonus;
  spec.beta = beta;
  return spec;
}

// The shared body of run and sweep: all variants x seeds at one (beta,
// sigma), files under prefix.
ordered_json run_cell(const ExperimentConfig& config, const Context& ctx, double beta,
                      double sigma, const fs::path& prefix, OutputDir& out) {
  const std::size_t nv = config.variants.size();
  const std::size_t ns = config.seeds.size();
  std::vector<ShapingTable> shaping(ns);
  for (std::size_t k = 0; k < ns; ++k) {
    shaping[k] = seeded_shaping(ctx.env.mdp, ctx.vstar, beta, sigma, config.seeds[k]);
  }
  std::vector<RegretTrace> traces(nv * ns);
  parallel_for(nv * ns, [&](std::size_t job) {
    const std::size_t v = job / ns;
    const std::size_t k = job % ns;
    const Variant variant = config.variants[v];
    CounterRng rng = seeded_run_rng(config.seeds[k]);
    std::optional<ShapingTable> sh;
    if (needs_shaping(variant)) sh = shaping[k];
    traces[job] = run(ctx.env.mdp, variant, bonus_with_beta(config, beta), sh, ctx.episodes, rng);
    const std::string tag = std::string(variant_name(variant)) + "_" + seed_tag(config.seeds[k]);
    out.write(prefix / ("regret_" + tag + ".csv"), trace_csv(traces[job], false));
    out.write(prefix / ("heatmap_" + tag + ".csv"), heatmap_csv(ctx.env, traces[job].visits));
    out.write(prefix / ("heatmap_late_" + tag + ".csv"),
              heatmap_csv(ctx.env, traces[job].late_visits));
  });

  ordered_json variants = ordered_json::object();
  std::vector<std::pair<std::string, std::string>> series;
  for (std::size_t v = 0; v < nv; ++v) {
    const std::string name = variant_name(config.variants[v]);
    std::vector<const RegretTrace*> group;
    std::vector<double> finals;
    ordered_json per_seed = ordered_json::array();
    ordered_json final_values = ordered_json::array();
    for (std::size_t k = 0; k < ns; ++k) {
      const RegretTrace& tr = traces[v * ns + k];
      group.push_back(&tr);
      finals.push_back(tr.cumulative_regret());
      per_seed.push_back(tr.cumulative_regret());
      final_values.push_back(tr.final_policy_value);
    }
    const fs::path agg = prefix / ("aggregate_" + name + ".csv");
    out.write(agg, aggregate_csv(group));
    series.emplace_back(("aggregate_" + name + ".csv"), name);
    const MeanErr m = mean_stderr(finals);
    variants[name] = {{"final_cumulative_regret",
                       {{"mean", m.mean}, {"stderr", m.stderr_}, {"per_seed", per_seed}}},
                      {"final_policy_value", final_values}};
  }
  if (config.gnuplot) {
    out.write(prefix / "plot_regret.gp",
              gnuplot_script(ctx.env.name + " beta=" + format_number(beta), series));
  }
  return variants;
}

ordered_json base_summary(const std::string& command, const ExperimentConfig& config,
                          const Context& ctx) {
  ordered_json j;
  j["command"] = command;
  j["env"] = ctx.env.name;
  j["horizon"] = ctx.env.mdp.horizon();
  j["episodes"] = ctx.episodes;
  j["optimal_value"] = ctx.vstar.value(0, ctx.env.mdp.start());
  j["seeds"] = config.seeds;
  j["bonus"] = {{"kind", bonus_kind_name(config.bonus.kind)},
                {"c", config.bonus.c},
                {"delta", config.bonus.delta}};
  return j;
}

CommandOutput finish(OutputDir& out, const ordered_json& summary) {
  const std::string text = summary.dump(2) + "\n";
  out.write("summary.json", text);
  return {text, out.files()};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  return parse_config(parse_document(text, "config"), text);
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text,
                                             std::string_view overrides) {
  json base = parse_document(text, "config");
  if (!overrides.empty()) base.merge_patch(parse_document(overrides, "overrides"));
  return parse_config(base, text);
}

GridEnv ExperimentConfig::build_env() const {
  return maze ? build_maze(*maze) : build_preset(env_name);
}

std::uint64_t default_episodes(std::string_view env_name) {
  if (env_name == "grid8" || env_name == "chain11") return 2000;
  return 5000;
}

std::uint64_t ExperimentConfig::episode_count() const {
  return episodes ? *episodes : default_episodes(env_name);
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("SHAPED_UCBVI_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end != cap && v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

ShapingTable seeded_shaping(const TabularMdp& mdp, const ValueTable& vstar, double beta,
                            double corrupt_sigma, std::uint64_t seed) {
  (void)mdp;
  CounterRng root(seed);
  CounterRng build_rng = root.split("shaping");
  ShapingTable table = build_sandwiched(vstar, beta, build_rng);
  if (corrupt_sigma > 0.0) {
    CounterRng noise = root.split("corrupt");
    table = corrupt(table, corrupt_sigma, noise);
  }
  return table;
}

CounterRng seeded_run_rng(std::uint64_t seed) { return CounterRng(seed).split("run"); }

CommandOutput cmd_run(const ExperimentConfig& config) {
  const Context ctx = make_context(config);
  OutputDir out(config.output_dir);
  ordered_json summary = base_summary("run", config, ctx);
  summary["beta"] = config.beta;
  summary["corrupt_sigma"] = config.corrupt_sigma;
  summary["variants"] = run_cell(config, ctx, config.beta, config.corrupt_sigma, "", out);
  return finish(out, summary);
}

CommandOutput cmd_sweep(const ExperimentConfig& config) {
  if (config.betas.empty() && config.sigmas.empty()) return cmd_run(config);
  const Context ctx = make_context(config);
  OutputDir out(config.output_dir);
  const std::vector<double> betas = config.betas.empty() ? std::vector<double>{config.beta}
                                                         : config.betas;
  const std::vector<double> sigmas =
      config.sigmas.empty() ? std::vector<double>{config.corrupt_sigma} : config.sigmas;
  ordered_json summary = base_summary("sweep", config, ctx);
  ordered_json cells = ordered_json::array();
  std::ostringstream combined;
  combined << "beta,sigma,variant,episode,mean_cumulative_regret,stderr_cumulative_regret\n";
  for (double b : betas) {
    for (double s : sigmas) {
      const fs::path cell = "beta" + value_tag(b) + "_sigma" + value_tag(s);
      ordered_json variants = run_cell(config, ctx, b, s, cell, out);
      for (Variant v : config.variants) {
        const std::string name = variant_name(v);
        std::ifstream in(out.root() / cell / ("aggregate_" + name + ".csv"), std::ios::binary);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
          combined << format_number(b) << ',' << format_number(s) << ',' << name << ','
                   << line << '\n';
        }
      }
      cells.push_back({{"beta", b}, {"sigma", s}, {"dir", cell.string()},
                       {"variants", std::move(variants)}});
    }
  }
  out.write("sweep_long.csv", combined.str());
  summary["cells"] = std::move(cells);
  return finish(out, summary);
}

CommandOutput cmd_prune(const ExperimentConfig& config) {
  const Context ctx = make_context(config);
  OutputDir out(config.output_dir);
  const std::vector<double> deltas =
      config.deltas.empty() ? geometric_grid(0.1, ctx.env.mdp.horizon(), 8) : config.deltas;
  ordered_json summary = base_summary("prune", config, ctx);
  summary["beta"] = config.beta;
  summary["deltas"] = deltas;
  ordered_json per_seed = ordered_json::object();
  PruneOptions options;
  options.beta = config.beta;
  options.episodes = ctx.episodes;
  options.confidence = config.bonus.delta;
  std::vector<std::vector<PruneReport>> sweeps(config.seeds.size());
  parallel_for(config.seeds.size(), [&](std::size_t k) {
    const ShapingTable sh = seeded_shaping(ctx.env.mdp, ctx.vstar, config.beta,
                                           config.corrupt_sigma, config.seeds[k]);
    sweeps[k] = delta_sweep(ctx.env.mdp, sh, deltas, options);
  });
  for (std::size_t k = 0; k < config.seeds.size(); ++k) {
    const std::string tag = seed_tag(config.seeds[k]);
    const std::vector<PruneReport>& reports = sweeps[k];
    const std::size_t best = best_delta(reports);
    std::ostringstream table;
    table << "delta,pseudosub,path,boundary,effective,reachable,bound_score,best\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const PruneReport& r = reports[i];
      out.write("prune_" + tag + "_delta" + std::to_string(i) + ".json",
                prune_report_to_json(r, ctx.env.mdp, config.members) + "\n");
      table << format_number(r.delta) << ',' << r.pseudosub.size() << ','
            << r.path_pseudosub.size() << ',' << r.boundary.size() << ','
            << r.effective_states << ',' << r.reachable_states << ','
            << format_number(r.bound_score) << ',' << (i == best ? 1 : 0) << '\n';
    }
    out.write("prune_" + tag + ".csv", table.str());
    const PruneReport& b = reports[best];
    per_seed[std::to_string(config.seeds[k])] = {
        {"best_delta", b.delta},
        {"path", b.path_pseudosub.size()},
        {"reachable", b.reachable_states},
        {"path_fraction", static_cast<double>(b.path_pseudosub.size()) /
                              static_cast<double>(std::max<std::size_t>(b.reachable_states, 1))}};
  }
  summary["seeds_best"] = std::move(per_seed);
  return finish(out, summary);
}

CommandOutput cmd_modelsel(const ExperimentConfig& config) {
  const Context ctx = make_context(config);
  OutputDir out(config.output_dir);
  BetaGrid grid{config.betas.empty() ? BetaGrid::exponential(3).betas : config.betas};
  grid.validate();
  const std::size_t ns = config.seeds.size();
  const std::size_t na = grid.betas.size();
  std::vector<ShapingTable> shaping(ns);
  for (std::size_t k = 0; k < ns; ++k) {
    shaping[k] = seeded_shaping(ctx.env.mdp, ctx.vstar, config.beta, config.corrupt_sigma,
                                config.seeds[k]);
  }
  // Job k * (na + 1) is the online run for seed k; the rest are the fixed arms.
  std::vector<OnlineResult> online(ns);
  std::vector<RegretTrace> fixed(ns * na);
  parallel_for(ns * (na + 1), [&](std::size_t job) {
    const std::size_t k = job / (na + 1);
    const std::size_t slot = job % (na + 1);
    const std::string tag = seed_tag(config.seeds[k]);
    CounterRng rng = seeded_run_rng(config.seeds[k]);
    if (slot == 0) {
      online[k] = run_online(ctx.env.mdp, grid, config.bonus, shaping[k], ctx.episodes, rng);
      out.write("modelsel_online_" + tag + ".csv", trace_csv(online[k].trace, true));
    } else {
      const double b = grid.betas[slot - 1];
      fixed[k * na + slot - 1] =
          run(ctx.env.mdp, Variant::kShaped, bonus_with_beta(config, b), shaping[k],
              ctx.episodes, rng);
      out.write("modelsel_fixed_beta" + value_tag(b) + "_" + tag + ".csv",
                trace_csv(fixed[k * na + slot - 1], false));
    }
  });

  ordered_json summary = base_summary("modelsel", config, ctx);
  summary["beta"] = config.beta;
  summary["betas"] = grid.betas;
  ordered_json per_seed = ordered_json::object();
  ordered_json hist = ordered_json::object();
  std::vector<double> online_regret, best_fixed_regret;
  for (std::size_t k = 0; k < ns; ++k) {
    ordered_json fixed_j = ordered_json::object();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < na; ++a) {
      const double r = fixed[k * na + a].cumulative_regret();
      fixed_j[format_number(grid.betas[a])] = r;
      best = std::min(best, r);
    }
    const double o = online[k].trace.cumulative_regret();
    online_regret.push_back(o);
    best_fixed_regret.push_back(best);
    per_seed[std::to_string(config.seeds[k])] = {
        {"online", o}, {"fixed", std::move(fixed_j)}, {"best_fixed", best},
        {"ratio", best > 0.0 ? o / best : (o > 0.0 ? std::numeric_limits<double>::infinity()
                                                   : 1.0)}};
    hist[std::to_string(config.seeds[k])] = {{"final_p", online[k].final_p},
                                             {"pulls", online[k].pulls}};
  }
  out.write("final_p.json", ordered_json{{"betas", grid.betas}, {"seeds", hist}}.dump(2) + "\n");
  summary["per_seed"] = std::move(per_seed);
  summary["mean_online"] = mean_stderr(online_regret).mean;
  summary["mean_best_fixed"] = mean_stderr(best_fixed_regret).mean;
  if (config.gnuplot && !config.seeds.empty()) {
    const std::string tag = seed_tag(config.seeds.front());
    std::vector<std::pair<std::string, std::string>> series{
        {"modelsel_online_" + tag + ".csv", "online"}};
    for (double b : grid.betas) {
      series.emplace_back("modelsel_fixed_beta" + value_tag(b) + "_" + tag + ".csv",
                          "beta=" + format_number(b));
    }
    // Column 3 is the cumulative regret in trace files.
    std::string script = gnuplot_script(ctx.env.name + " model selection", series);
    for (std::size_t pos; (pos = script.find("using 1:2")) != std::string::npos;) {
      script.replace(pos, 9, "using 1:3");
    }
    out.write("plot_modelsel.gp", script);
  }
  return finish(out, summary);
}

CommandOutput cmd_decay(const ExperimentConfig& config) {
  const Context ctx = make_context(config);
  OutputDir out(config.output_dir);
  const std::size_t ns = config.seeds.size();
  const Variant pair[2] = {Variant::kShaped, Variant::kAdditive};
  std::vector<ShapingTable> shaping(ns);
  for (std::size_t k = 0; k < ns; ++k) {
    shaping[k] = seeded_shaping(ctx.env.mdp, ctx.vstar, config.beta, config.corrupt_sigma,
                                config.seeds[k]);
  }
  std::vector<RegretTrace> traces(2 * ns);
  parallel_for(2 * ns, [&](std::size_t job) {
    const std::size_t k = job / 2;
    const Variant v = pair[job % 2];
    CounterRng rng = seeded_run_rng(config.seeds[k]);
    traces[job] =
        run(ctx.env.mdp, v, bonus_with_beta(config, config.beta), shaping[k], ctx.episodes, rng);
    out.write("decay_" + std::string(variant_name(v)) + "_" + seed_tag(config.seeds[k]) + ".csv",
              trace_csv(traces[job], false));
  });
  ordered_json summary = base_summary("decay", config, ctx);
  summary["beta"] = config.beta;
  summary["corrupt_sigma"] = config.corrupt_sigma;
  ordered_json runs = ordered_json::object();
  for (std::size_t k = 0; k < ns; ++k) {
    ordered_json seed_j = ordered_json::object();
    for (int i = 0; i < 2; ++i) {
      const RegretTrace& tr = traces[2 * k + i];
      seed_j[variant_name(pair[i])] = {{"final_return", tr.final_policy_value},
                                       {"reached_goal", tr.final_policy_value > 0.0},
                                       {"cumulative_regret", tr.cumulative_regret()}};
    }
    runs[std::to_string(config.seeds[k])] = std::move(seed_j);
  }
  summary["runs"] = std::move(runs);
  return finish(out, summary);
}

CommandOutput run_command(std::string_view name, const ExperimentConfig& config) {
  if (name == "run") return cmd_run(config);
  if (name == "sweep") return cmd_sweep(config);
  if (name == "prune") return cmd_prune(config);
  if (name == "modelsel") return cmd_modelsel(config);
  if (name == "decay") return cmd_decay(config);
  fail(ErrorCode::kConfig, "unknown command '" + std::string(name) + "'");
}

}  // namespace sucbvi
