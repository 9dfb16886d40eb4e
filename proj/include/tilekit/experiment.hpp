#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "tilekit/error.hpp"
#include "tilekit/fraclp.hpp"
#include "tilekit/graph.hpp"
#include "tilekit/io.hpp"
#include "tilekit/pipeline.hpp"
#include "tilekit/random.hpp"
#include "tilekit/slicing.hpp"
#include "tilekit/tiler.hpp"

namespace tilekit {

// ---------------------------------------------------------------------------
// Synthetic balancing instances.

struct BalanceInstance {
  ColumnStructure columns;
  ClusterLedger ledger;
};

// Default balancing parameters: L' = 1000, d' = 4/5, zeta = 1/50,
// eps' = 1/1000, gamma = 1/2, n = l' L'. These keep (nu - target)/quantum
// small, so A_r has at most about ten copies per cluster.
inline ClusterLedger::Params default_balance_params(int columns, int h) {
  ClusterLedger::Params p;
  p.l_prime = 1000;
  p.n = static_cast<std::int64_t>(columns) * p.l_prime;
  p.h = h;
  p.d_prime = Rational(4, 5);
  p.zeta = Rational(1, 50);
  p.eps_prime = Rational(1, 1000);
  p.gamma = Rational(1, 2);
  p.d0 = 1;
  return p;
}

// Smallest and largest nu in the window [(1 - sqrt(zeta)) L', (1 + k^2 eps') L'].
inline std::pair<std::int64_t, std::int64_t> nu_window(int k, const ClusterLedger::Params& p) {
  const Rational lp(p.l_prime);
  const Radical root = Radical::root(p.zeta, 2).scaled(lp);
  std::int64_t lo = to_int64(((Rational(1) - Rational(1, 2)) * lp).floor());
  while (!(root >= lp - Rational(lo))) ++lo;
  while (lo > 0 && root >= lp - Rational(lo - 1)) --lo;
  const std::int64_t hi = to_int64(((Rational(1) + Rational(k * k) * p.eps_prime) * lp).floor());
  return {lo, hi};
}

// Random non-red counts in the legal window with equal per-part totals, on
// the given column structure. Red counts are at most sqrt(zeta) L' / 2,
// blue counts at most 20.
inline ClusterLedger random_balance_ledger(const ColumnStructure& cs, const ClusterLedger::Params& p,
                                           std::uint64_t seed) {
  const int k = cs.k(), l = cs.columns();
  ClusterLedger led(k, l, p);
  Rng rng = make_rng(seed);
  const auto [lo, hi] = nu_window(k, p);
  const std::int64_t span = hi - lo + 1;
  const std::int64_t red_cap = std::max<std::int64_t>(1, (p.l_prime - lo) / 2);
  std::vector<std::vector<std::int64_t>> nu(k, std::vector<std::int64_t>(l + 1, 0));
  std::int64_t sum0 = 0;
  for (int j = 2; j <= l; ++j) sum0 += nu[0][j] = lo + static_cast<std::int64_t>(uniform_below(rng, span));
  for (int i = 1; i < k; ++i) {
    std::int64_t s = 0;
    for (int j = 2; j <= l; ++j) s += nu[i][j] = lo + static_cast<std::int64_t>(uniform_below(rng, span));
    std::int64_t diff = sum0 - s;
    for (int j = 2; j <= l && diff != 0; ++j) {
      const std::int64_t room = diff > 0 ? hi - nu[i][j] : lo - nu[i][j];
      const std::int64_t step = diff > 0 ? std::min(diff, room) : std::max(diff, room);
      nu[i][j] += step;
      diff -= step;
    }
  }
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= l; ++j) {
      auto& c = led.at(i, j);
      c.red = static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(red_cap)));
      if (j == 1) {
        c.uncolored = p.l_prime - c.red;
        continue;
      }
      c.blue = static_cast<std::int64_t>(uniform_below(rng, 21));
      c.uncolored = nu[i - 1][j] - c.blue;
    }
  return led;
}

// ---------------------------------------------------------------------------
// Scenario runner.

struct ScenarioReport {
  std::string scenario;
  std::string csv;
  Json summary;
  bool partial = false;  // some rows hit a capacity limit
  std::vector<std::string> files;
};

struct ExperimentReport {
  std::vector<ScenarioReport> scenarios;
};

namespace detail {

inline std::vector<std::uint64_t> seeds_of(const Json& cfg) {
  std::vector<std::uint64_t> seeds;
  if (cfg.contains("seeds"))
    for (const auto& s : cfg.at("seeds")) seeds.push_back(s.get<std::uint64_t>());
  else
    seeds.push_back(1);
  return seeds;
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline ScenarioReport run_tau_sweep(const Json& cfg) {
  ScenarioReport r;
  const int k = cfg.at("k").get<int>(), n = cfg.at("n").get<int>();
  const int tile_cap = cfg.contains("caps") ? cfg["caps"].value("tile_vertices", 36) : 36;
  std::vector<int> deltas;
  if (cfg.contains("deltas"))
    for (const auto& d : cfg.at("deltas")) deltas.push_back(d.get<int>());
  else
    for (int d = ((k - 1) * n + k - 1) / k; d <= n; ++d) deltas.push_back(d);
  std::ostringstream csv;
  csv << "seed,delta,tau_num,tau_den,tiled\n";
  int rows = 0, tau_equals_n = 0;
  for (const int target : deltas)
    for (const auto seed : seeds_of(cfg)) {
      const KPartiteGraph g = random_min_degree_graph(k, n, target, seed);
      const int delta = min_bipartite_degree(g).first;
      std::string tiled = "skipped";
      std::string tau_num = "", tau_den = "";
      try {
        const TauResult tr = fractional_tiling_number(g);
        tau_num = tr.tau.num().get_str();
        tau_den = tr.tau.den().get_str();
        tau_equals_n += tr.tau == Rational(n);
        if (g.vertex_count() <= tile_cap) {
          SearchOptions opt;
          opt.max_vertices = tile_cap;
          tiled = yes_no(perfect_clique_tiling(g, opt).has_value());
        }
      } catch (const CapacityError&) {
        r.partial = true;
        tiled = "capacity";
      }
      csv << seed << ',' << delta << ',' << tau_num << ',' << tau_den << ',' << tiled << '\n';
      ++rows;
    }
  r.csv = csv.str();
  r.summary = Json{{"k", k}, {"n", n}, {"rows", rows}, {"tau_equals_n", tau_equals_n}};
  return r;
}

inline ScenarioReport run_gap_witness(const Json& cfg) {
  ScenarioReport r;
  const int k = cfg.at("k").get<int>();
  std::vector<int> ns;
  if (cfg.contains("ns"))
    for (const auto& n : cfg.at("ns")) ns.push_back(n.get<int>());
  else
    ns.push_back(cfg.at("n").get<int>());
  std::ostringstream csv;
  csv << "k,n,delta,tau_num,tau_den,perfect_tiling\n";
  Json rows = Json::array();
  for (const int n : ns) {
    const KPartiteGraph g = catlin_graph(k, n);
    const int delta = min_bipartite_degree(g).first;
    const TauResult tr = fractional_tiling_number(g);
    std::string tiled = "capacity";
    try {
      SearchOptions opt;
      opt.max_vertices = std::max(36, g.vertex_count());
      opt.node_limit = 50'000'000;
      tiled = yes_no(perfect_clique_tiling(g, opt).has_value());
    } catch (const CapacityError&) {
      r.partial = true;
    }
    csv << k << ',' << n << ',' << delta << ',' << tr.tau.num().get_str() << ',' << tr.tau.den().get_str() << ','
        << tiled << '\n';
    rows.push_back(Json{{"n", n}, {"delta", delta}, {"tau", tr.tau.to_string()}, {"perfect_tiling", tiled}});
  }
  r.csv = csv.str();
  r.summary = Json{{"k", k}, {"rows", rows}};
  return r;
}

inline std::string slicing_csv(const SlicingReport& rep) {
  std::ostringstream csv;
  csv.precision(6);
  csv << "trial,failures,good_pair_min,bound\n";
  for (const auto& t : rep.trials)
    csv << t.trial << ',' << t.failures << ',' << t.good_pair_min << ',' << rep.bound.aggregate_bound << '\n';
  return csv.str();
}

inline Json slicing_summary(const SlicingReport& rep) {
  int kr = 0, kr_vac = 0, parent = 0;
  for (const auto& t : rep.trials) {
    kr += t.kr_certified;
    kr_vac += t.kr_vacuous;
    parent += t.parent_certified;
  }
  std::ostringstream bound;
  bound.precision(6);
  bound << rep.bound.aggregate_bound;
  return Json{{"L", rep.l},
              {"Lprime", rep.l_prime},
              {"m", rep.m},
              {"d", rep.d.to_string()},
              {"eps", rep.eps.to_string()},
              {"trials", rep.trials.size()},
              {"failed_trials", rep.failed_trials},
              {"aggregate_exponent", rep.bound.aggregate_exponent.to_string()},
              {"aggregate_bound", bound.str()},
              {"bound_vacuous", rep.bound.vacuous},
              {"good_pair_threshold", rep.good_pair_threshold.to_string()},
              {"slice_pairs_kr_certified", kr},
              {"slice_pairs_kr_vacuous", kr_vac},
              {"parents_kr_certified", parent},
              {"flags", rep.flags}};
}

inline ScenarioReport run_slicing(const Json& cfg) {
  ScenarioReport r;
  const auto rep = random_slicing_experiment(
      cfg.at("L").get<std::int64_t>(), cfg.at("Lprime").get<std::int64_t>(), rational_from_json(cfg.at("d")),
      rational_from_json(cfg.at("eps")), cfg.value("trials", 100), seeds_of(cfg).front());
  r.csv = slicing_csv(rep);
  r.summary = slicing_summary(rep);
  return r;
}

// Random reduced graph -> fractional tiling -> blow-up tiling -> columns ->
// every reach pair -> balancing on a random ledger.
inline ScenarioReport run_pipeline_demo(const Json& cfg) {
  ScenarioReport r;
  const int k = cfg.at("k").get<int>();
  const int l = cfg.value("l", 6);
  const int max_balance_columns = cfg.value("max_balance_columns", 8);
  const int h = cfg.value("h", 1);
  std::ostringstream csv;
  csv << "seed,l,D,tau_num,tau_den,columns,reach_pairs,reach_ok,balanced,new_leftover_max\n";
  int ok_rows = 0;
  for (const auto seed : seeds_of(cfg)) {
    // Degree (k-1)l/k + 2 survives the blow-up with room for reach.
    const int target = std::min(l, ((k - 1) * l + 3 * k - 1) / k);
    const KPartiteGraph gr = random_min_degree_graph(k, l, target, seed);
    const TauResult tr = fractional_tiling_number(gr);
    const std::int64_t d = common_denominator(tr.primal);
    const BlowUpTiling bt = tiling_from_fractional(gr, tr.cliques, tr.primal, d);
    if (!bt.complete) throw InvariantError("blow-up tiling incomplete");
    const ColumnStructure cs = ColumnStructure::from_tiling(bt.graph, bt.tiling);
    const int lp = cs.columns();
    int pairs = 0;
    std::string reach_ok = "skipped";
    const int delta = min_bipartite_degree(cs.graph()).first;
    if (Rational(delta) >= Rational(k - 1, k) * Rational(lp) + Rational(2)) {
      bool all = true;
      for (int i = 1; i <= k; ++i)
        for (int j = 2; j <= lp; ++j) {
          const ReachPair rp = reach(cs, i, j);
          all = all && !verify_reach(cs, i, j, rp);
          ++pairs;
        }
      reach_ok = yes_no(all);
    }
    std::string balanced = "skipped";
    std::int64_t leftover_max = 0;
    if (lp >= 2 && lp <= max_balance_columns) {
      try {
        const ClusterLedger led = random_balance_ledger(cs, default_balance_params(lp, h), seed);
        const BalancePlan plan = balance_columns(cs, led);
        for (const auto v : plan.new_leftover) leftover_max = std::max(leftover_max, v);
        balanced = "yes";
      } catch (const PreconditionError&) {
        balanced = "precondition";
      } catch (const CapacityError&) {
        balanced = "capacity";
        r.partial = true;
      }
    }
    ok_rows += reach_ok != "no";
    csv << seed << ',' << l << ',' << d << ',' << tr.tau.num().get_str() << ',' << tr.tau.den().get_str() << ','
        << lp << ',' << pairs << ',' << reach_ok << ',' << balanced << ',' << leftover_max << '\n';
  }
  r.csv = csv.str();
  r.summary = Json{{"k", k}, {"l", l}, {"h", h}, {"rows_without_reach_failure", ok_rows}};
  return r;
}

inline ScenarioReport run_scenario(const Json& cfg) {
  if (!cfg.is_object() || !cfg.contains("scenario") || !cfg["scenario"].is_string())
    throw ParameterError("scenario config needs a \"scenario\" string");
  const auto name = cfg["scenario"].get<std::string>();
  ScenarioReport r;
  try {
    if (name == "tau-sweep") r = run_tau_sweep(cfg);
    else if (name == "gap-witness") r = run_gap_witness(cfg);
    else if (name == "slicing") r = run_slicing(cfg);
    else if (name == "pipeline-demo") r = run_pipeline_demo(cfg);
    else throw ParameterError("unknown scenario \"" + name + "\"");
  } catch (const nlohmann::json::exception& ex) {
    throw ParameterError("malformed " + name + " config: " + ex.what());
  }
  r.scenario = name;
  if (r.partial) r.summary["partial"] = true;
  return r;
}

}  // namespace detail

// Runs one scenario object or {"scenarios": [...]}. When `write` is set,
// each scenario writes <out>/<scenario>.csv and <out>/<scenario>.json,
// with <out> taken from the scenario, then the top-level config, then ".".
inline ExperimentReport run_experiment(const Json& config, bool write = true) {
  ExperimentReport rep;
  std::vector<Json> list;
  if (config.is_object() && config.contains("scenarios")) {
    if (!config["scenarios"].is_array()) throw ParameterError("\"scenarios\" must be an array");
    for (const auto& s : config["scenarios"]) list.push_back(s);
  } else {
    list.push_back(config);
  }
  const std::string default_out = config.is_object() ? config.value("out", std::string(".")) : ".";
  for (const auto& cfg : list) {
    ScenarioReport s = detail::run_scenario(cfg);
    if (write) {
      const std::filesystem::path out = cfg.value("out", default_out);
      std::filesystem::create_directories(out);
      const auto csv = (out / (s.scenario + ".csv")).string();
      const auto json = (out / (s.scenario + ".json")).string();
      write_text_file(csv, s.csv);
      write_text_file(json, s.summary.dump(2) + "\n");
      s.files = {csv, json};
    }
    rep.scenarios.push_back(std::move(s));
  }
  return rep;
}

}  // namespace tilekit
