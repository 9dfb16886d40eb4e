#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tilekit/tilekit.hpp"

using namespace tilekit;

namespace {

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

Json clique_json(const Clique& c) {
  Json a = Json::array();
  for (const auto& v : c) a.push_back(to_json(v));
  return a;
}

Json tau_report(const KPartiteGraph& g) {
  const TauResult tr = fractional_tiling_number(g);
  Json cliques = Json::array();
  for (const auto& c : tr.cliques) cliques.push_back(clique_json(c));
  Json primal = Json::array(), dual = Json::array();
  for (std::size_t t = 0; t < tr.cliques.size(); ++t)
    if (!tr.primal.values[t].is_zero())
      primal.push_back(Json{{"clique", clique_json(tr.cliques[t])}, {"weight", tr.primal.values[t].to_string()}});
  for (int id = 0; id < g.vertex_count(); ++id)
    if (!tr.dual.values[id].is_zero())
      dual.push_back(Json{{"vertex", to_json(g.ref(id))}, {"weight", tr.dual.values[id].to_string()}});
  const auto check = verify_duality(tr.primal_lp, tr.primal, tr.dual_lp, tr.dual);
  return Json{{"tau", tr.tau.to_string()},
              {"cliques", tr.cliques.size()},
              {"primal", primal},
              {"dual", dual},
              {"duality_verified", check.ok()}};
}

Json certify_pair(const KPartiteGraph& g, int i, int j, const Rational& eps) {
  if (i < 1 || j < 1 || i > g.k() || j > g.k() || i == j) throw ParameterError("--pair needs two distinct parts");
  const BipartitePair p = pair_of(g, part_vertices(g, i), part_vertices(g, j));
  if (auto c = trivial_certificate(p)) return to_json(*c);
  const Radical r = Radical::exact(eps);
  if (p.a() <= kExactRegularityCap && p.b() <= kExactRegularityCap) {
    if (auto c = certify_exact(p, r)) return to_json(*c);
    const auto w = find_irregular_subpair(p, r);
    return Json{{"result", "irregular"}, {"x", w->x}, {"y", w->y}, {"density", w->density.to_string()}};
  }
  if (auto c = kr_certificate(p, eps)) return to_json(*c);
  return Json{{"result", "none"}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multipartite clique tiling lab"};
  app.require_subcommand(1);

  std::string path;
  auto* run = app.add_subcommand("run", "Run an experiment config; writes <scenario>.csv and <scenario>.json.\n"
                                        "  tau-sweep CSV: seed,delta,tau_num,tau_den,tiled\n"
                                        "  gap-witness CSV: k,n,delta,tau_num,tau_den,perfect_tiling\n"
                                        "  slicing CSV: trial,failures,good_pair_min,bound\n"
                                        "  pipeline-demo CSV: seed,l,D,tau_num,tau_den,columns,reach_pairs,reach_ok,"
                                        "balanced,new_leftover_max");
  run->add_option("config", path, "config JSON")->required();

  std::string family = "random";
  int k = 3, n = 3, delta = -1;
  std::uint64_t seed = 1;
  auto* gen = app.add_subcommand("gen", "Print a graph as JSON");
  gen->add_option("--family", family, "random | catlin | complete")->check(CLI::IsMember({"random", "catlin", "complete"}));
  gen->add_option("--k", k, "parts");
  gen->add_option("--n", n, "vertices per part");
  gen->add_option("--delta", delta, "target minimum bipartite degree (random; default ceil((k-1)n/k))");
  gen->add_option("--seed", seed);

  auto* tau = app.add_subcommand("tau", "Fractional tiling number with primal and dual certificates");
  tau->add_option("graph", path, "graph JSON")->required();

  int h = 1;
  auto* tile = app.add_subcommand("tile", "Perfect K_h^k tiling, {\"result\":\"none\"} or {\"result\":\"capacity\"}");
  tile->add_option("graph", path, "graph JSON")->required();
  tile->set_help_flag("--help", "Print this help message and exit");
  tile->add_option("--h", h, "tile size per part");

  int part = 1, column = 2;
  auto* reach_cmd = app.add_subcommand("reach", "Reachability pair for cluster (i, j) of a reduced graph whose "
                                                "columns are index classes (each must be a K_k)");
  reach_cmd->add_option("graph", path, "graph JSON")->required();
  reach_cmd->add_option("--i", part)->required();
  reach_cmd->add_option("--j", column)->required();
  bool find_columns = false;
  reach_cmd->add_flag("--find-columns", find_columns, "relabel columns from a perfect K_k-tiling first");

  std::int64_t big_l = 2000, l_prime = 500;
  std::string d = "1/2", eps = "3/10";
  int trials = 100;
  auto* slice = app.add_subcommand("slice-experiment", "Random slicing trials. CSV: trial,failures,good_pair_min,bound");
  slice->add_option("--L", big_l);
  slice->add_option("--Lprime", l_prime);
  slice->add_option("--d", d, "density p/q");
  slice->add_option("--eps", eps, "p/q");
  slice->add_option("--trials", trials);
  slice->add_option("--seed", seed);

  std::vector<int> pair;
  auto* certify = app.add_subcommand("certify", "Regularity certificate for the pair of parts i, j");
  certify->add_option("graph", path, "graph JSON")->required();
  certify->add_option("--pair", pair)->expected(2)->required();
  certify->add_option("--eps", eps, "p/q");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto rep = run_experiment(read_json_file(path));
      for (const auto& s : rep.scenarios) {
        for (const auto& f : s.files) std::cout << f << '\n';
        if (s.partial) std::cerr << s.scenario << ": partial results (capacity limit hit)\n";
      }
    } else if (*gen) {
      KPartiteGraph g;
      if (family == "catlin") g = catlin_graph(k, n);
      else if (family == "complete") g = complete_multipartite(k, n);
      else g = random_min_degree_graph(k, n, delta >= 0 ? delta : ((k - 1) * n + k - 1) / k, seed);
      std::cout << to_json(g).dump() << '\n';
    } else if (*tau) {
      print(tau_report(graph_from_json(read_json_file(path))));
    } else if (*tile) {
      const KPartiteGraph g = graph_from_json(read_json_file(path));
      try {
        const auto t = perfect_multipartite_tiling(g, h);
        print(t ? to_json(*t) : Json{{"result", "none"}});
      } catch (const CapacityError&) {
        print(Json{{"result", "capacity"}});
      }
    } else if (*reach_cmd) {
      const KPartiteGraph g = graph_from_json(read_json_file(path));
      const ColumnStructure cs = find_columns ? ColumnStructure::from_graph(g) : ColumnStructure(g);
      const ReachPair r = reach(cs, part, column);
      print(Json{{"t1", clique_json(r.t1)}, {"t2", clique_json(r.t2)}});
    } else if (*slice) {
      const auto rep = random_slicing_experiment(big_l, l_prime, Rational::parse(d), Rational::parse(eps), trials, seed);
      std::cout << detail::slicing_csv(rep);
    } else if (*certify) {
      print(certify_pair(graph_from_json(read_json_file(path)), pair[0], pair[1], Rational::parse(eps)));
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity: " << e.what() << '\n';
    return 3;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << '\n';
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
