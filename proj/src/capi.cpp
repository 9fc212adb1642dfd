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

#include "shaped_ucbvi.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "sucbvi/environments.hpp"
#include "sucbvi/error.hpp"
#include "sucbvi/harness.hpp"
#include "sucbvi/learner.hpp"
#include "sucbvi/pruning.hpp"
#include "sucbvi/shaping.hpp"

struct sucbvi_mdp {
  sucbvi::TabularMdp mdp;
  sucbvi::ValueTable vstar;
};

struct sucbvi_shaping {
  sucbvi::ShapingTable table;
};

struct sucbvi_trace {
  sucbvi::RegretTrace trace;
};

namespace {

thread_local std::string g_last_error;

sucbvi_status to_status(sucbvi::ErrorCode code) {
  return static_cast<sucbvi_status>(static_cast<int>(code));
}

template <class F>
sucbvi_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return SUCBVI_OK;
  } catch (const sucbvi::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SUCBVI_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SUCBVI_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SUCBVI_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) {
    sucbvi::fail(sucbvi::ErrorCode::kInvalidArgument, std::string(what) + " is null");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sucbvi_mdp* wrap(sucbvi::TabularMdp mdp) {
  auto* h = new sucbvi_mdp{std::move(mdp), {}};
  h->vstar = sucbvi::exact_optimal_values(h->mdp);
  return h;
}

}  // namespace

extern "C" {

const char* sucbvi_last_error(void) { return g_last_error.c_str(); }

const char* sucbvi_status_name(sucbvi_status status) {
  if (status == SUCBVI_OK) return "ok";
  if (status == SUCBVI_INTERNAL) return "internal";
  if (status >= SUCBVI_INVALID_ARGUMENT && status <= SUCBVI_IO) {
    return sucbvi::error_code_name(static_cast<sucbvi::ErrorCode>(status));
  }
  return "unknown";
}

void sucbvi_string_free(char* s) { std::free(s); }

sucbvi_status sucbvi_mdp_preset(const char* name, sucbvi_mdp** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = wrap(sucbvi::build_preset(name).mdp);
  });
}

sucbvi_status sucbvi_mdp_from_json(const char* text, sucbvi_mdp** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = wrap(sucbvi::mdp_from_json(text));
  });
}

sucbvi_status sucbvi_mdp_to_json(const sucbvi_mdp* mdp, char** out) {
  return guarded([&] {
    require(mdp, "mdp");
    require(out, "out");
    *out = dup_string(sucbvi::mdp_to_json(mdp->mdp));
  });
}

sucbvi_status sucbvi_mdp_shape(const sucbvi_mdp* mdp, int* horizon, int* actions,
                               size_t* states) {
  return guarded([&] {
    require(mdp, "mdp");
    if (horizon) *horizon = mdp->mdp.horizon();
    if (actions) *actions = mdp->mdp.actions();
    if (states) *states = mdp->mdp.layout().state_count();
  });
}

sucbvi_status sucbvi_mdp_optimal_value(const sucbvi_mdp* mdp, double* out) {
  return guarded([&] {
    require(mdp, "mdp");
    require(out, "out");
    *out = mdp->vstar.value(0, mdp->mdp.start());
  });
}

void sucbvi_mdp_free(sucbvi_mdp* mdp) { delete mdp; }

sucbvi_status sucbvi_shaping_sandwiched(const sucbvi_mdp* mdp, double beta, double sigma,
                                        uint64_t seed, sucbvi_shaping** out) {
  return guarded([&] {
    require(mdp, "mdp");
    require(out, "out");
    if (!(sigma >= 0.0)) {
      sucbvi::fail(sucbvi::ErrorCode::kInvalidArgument, "sigma must be >= 0");
    }
    *out = new sucbvi_shaping{sucbvi::seeded_shaping(mdp->mdp, mdp->vstar, beta, sigma, seed)};
  });
}

sucbvi_status sucbvi_shaping_from_json(const sucbvi_mdp* mdp, const char* text,
                                       sucbvi_shaping** out) {
  return guarded([&] {
    require(mdp, "mdp");
    require(text, "text");
    require(out, "out");
    *out = new sucbvi_shaping{sucbvi::shaping_from_json(text, mdp->mdp)};
  });
}

sucbvi_status sucbvi_shaping_to_json(const sucbvi_shaping* shaping, const sucbvi_mdp* mdp,
                                     char** out) {
  return guarded([&] {
    require(shaping, "shaping");
    require(mdp, "mdp");
    require(out, "out");
    *out = dup_string(sucbvi::shaping_to_json(shaping->table, mdp->mdp));
  });
}

sucbvi_status sucbvi_shaping_verify(const sucbvi_shaping* shaping, const sucbvi_mdp* mdp,
                                    int* holds) {
  return guarded([&] {
    require(shaping, "shaping");
    require(mdp, "mdp");
    require(holds, "holds");
    *holds = sucbvi::verify_sandwich(shaping->table, mdp->vstar).holds ? 1 : 0;
  });
}

void sucbvi_shaping_free(sucbvi_shaping* shaping) { delete shaping; }

sucbvi_status sucbvi_run(const sucbvi_mdp* mdp, const char* variant, const char* bonus_kind,
                         double c, double delta, double beta, const sucbvi_shaping* shaping,
                         uint64_t episodes, uint64_t seed, sucbvi_trace** out) {
  return guarded([&] {
    require(mdp, "mdp");
    require(variant, "variant");
    require(bonus_kind, "bonus_kind");
    require(out, "out");
    sucbvi::BonusSpec spec;
    spec.kind = sucbvi::parse_bonus_kind(bonus_kind);
    spec.c = c;
    spec.delta = delta;
    spec.beta = beta;
    std::optional<sucbvi::ShapingTable> table;
    if (shaping) table = shaping->table;
    sucbvi::CounterRng rng = sucbvi::seeded_run_rng(seed);
    *out = new sucbvi_trace{
        sucbvi::run(mdp->mdp, sucbvi::parse_variant(variant), spec, table, episodes, rng)};
  });
}

sucbvi_status sucbvi_trace_length(const sucbvi_trace* trace, uint64_t* out) {
  return guarded([&] {
    require(trace, "trace");
    require(out, "out");
    *out = trace->trace.episodes.size();
  });
}

sucbvi_status sucbvi_trace_episode(const sucbvi_trace* trace, uint64_t index,
                                   sucbvi_episode* out) {
  return guarded([&] {
    require(trace, "trace");
    require(out, "out");
    if (index >= trace->trace.episodes.size()) {
      sucbvi::fail(sucbvi::ErrorCode::kInvalidArgument, "episode index out of range");
    }
    const sucbvi::EpisodeRecord& r = trace->trace.episodes[index];
    *out = {r.episode, r.instant_regret, r.cumulative_regret, r.episodic_return,
            r.optimism_holds ? 1 : 0};
  });
}

sucbvi_status sucbvi_trace_final_value(const sucbvi_trace* trace, double* out) {
  return guarded([&] {
    require(trace, "trace");
    require(out, "out");
    *out = trace->trace.final_policy_value;
  });
}

sucbvi_status sucbvi_trace_to_csv(const sucbvi_trace* trace, char** out) {
  return guarded([&] {
    require(trace, "trace");
    require(out, "out");
    std::ostringstream s;
    sucbvi::write_trace_csv(trace->trace, s);
    *out = dup_string(s.str());
  });
}

void sucbvi_trace_free(sucbvi_trace* trace) { delete trace; }

sucbvi_status sucbvi_prune(const sucbvi_mdp* mdp, const sucbvi_shaping* shaping, double beta,
                           double delta, int with_members, char** out) {
  return guarded([&] {
    require(mdp, "mdp");
    require(shaping, "shaping");
    require(out, "out");
    sucbvi::PruneOptions options;
    options.beta = beta;
    const double deltas[1] = {delta};
    const auto reports = sucbvi::delta_sweep(mdp->mdp, shaping->table, deltas, options);
    *out = dup_string(sucbvi::prune_report_to_json(reports.front(), mdp->mdp, with_members != 0));
  });
}

sucbvi_status sucbvi_command(const char* command, const char* config_json,
                             const char* overrides_json, char** summary) {
  return guarded([&] {
    require(command, "command");
    require(config_json, "config_json");
    const sucbvi::ExperimentConfig config = sucbvi::ExperimentConfig::from_json(
        config_json, overrides_json ? overrides_json : "");
    const sucbvi::CommandOutput result = sucbvi::run_command(command, config);
    if (summary) *summary = dup_string(result.summary_json);
  });
}

}  // extern "C"
