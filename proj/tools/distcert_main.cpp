#include "distcert/bench.hpp"
#include "distcert/driver.hpp"
#include "distcert/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace distcert;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SemanticError("cannot read file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SemanticError("cannot write file: " + path);
  out << text;
}

struct CommonArgs {
  std::string mdp_path, spec, spec_file, hoa_path, init_arg;
  std::string report_path;
};

struct PipelineArgs {
  std::string strategy_path, strategy_class = "memoryless";
  std::string solver = "z3", emit_smt, cert_out;
  int invariant_size = 1, handelman_degree = 2;
  std::size_t choice_budget = 256;
  double timeout = 300;
  std::string eps = "1/1000";
  bool existential = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--mdp", a.mdp_path, "MDP file")->required();
  cmd->add_option("--spec", a.spec, "LTL pattern, e.g. G F \"V1>=0.249\"");
  cmd->add_option("--spec-file", a.spec_file, "file holding an LTL pattern");
  cmd->add_option("--hoa", a.hoa_path, "Buchi automaton in HOA format");
  cmd->add_option("--init", a.init_arg,
                  "initial region file, or inline point:p0,p1,...")
      ->required();
  cmd->add_option("--report", a.report_path, "write structured JSON report");
}

void add_pipeline(CLI::App* cmd, PipelineArgs& a) {
  cmd->add_option("--solver", a.solver, "SMT solver command");
  cmd->add_option("--emit-smt", a.emit_smt, "dump SMT-LIB2 and stop");
  cmd->add_option("--cert-out", a.cert_out, "certificate output file");
  cmd->add_option("--invariant-size", a.invariant_size, "invariant rows per location");
  cmd->add_option("--handelman-degree", a.handelman_degree, "monoid degree bound");
  cmd->add_option("--choice-budget", a.choice_budget, "successor choice budget");
  cmd->add_option("--timeout", a.timeout, "solver timeout in seconds");
  cmd->add_flag("--existential", a.existential,
                "require one good initial distribution instead of all");
}

Nba load_spec(const CommonArgs& a, std::size_t n) {
  int given = (!a.spec.empty()) + (!a.spec_file.empty()) + (!a.hoa_path.empty());
  if (given != 1)
    throw SemanticError("give exactly one of --spec, --spec-file, --hoa");
  if (!a.hoa_path.empty()) return parse_hoa(read_file(a.hoa_path), n);
  std::string text = a.spec.empty() ? read_file(a.spec_file) : a.spec;
  return parse_ltl_pattern(text, n);
}

InitRegion load_init(const CommonArgs& a, std::size_t n) {
  if (a.init_arg.rfind("point:", 0) == 0) return parse_init(a.init_arg, n);
  return parse_init(read_file(a.init_arg), n);
}

json choice_json(const PipelineResult& res) {
  json arr = json::array();
  for (const auto& c : res.per_choice) {
    json item;
    item["status"] = status_name(c.status);
    item["seconds"] = c.seconds;
    json picks = json::array();
    for (const auto& [key, q2] : c.choice.chosen)
      picks.push_back({{"q", key.first}, {"letter", key.second}, {"to", q2}});
    item["choice"] = picks;
    arr.push_back(std::move(item));
  }
  return arr;
}

json pipeline_json(const PipelineResult& res) {
  json j;
  j["status"] = res.emitted_only ? "emitted"
                                 : (res.solved ? "solved" : "not-solved");
  j["coeff_count"] = res.coeff_count;
  j["constraint_count"] = res.constraint_count;
  j["budget_exhausted"] = res.budget_exhausted;
  j["per_choice"] = choice_json(res);
  j["times"] = {{"build", res.t_build},
                {"transform", res.t_transform},
                {"solve", res.t_solve},
                {"validate", res.t_validate}};
  if (res.validation) {
    json conds = json::array();
    for (const auto& c : res.validation->conditions)
      conds.push_back({{"label", c.label},
                       {"method", c.method},
                       {"passed", c.passed}});
    j["validation"] = {{"passed", res.validation->passed},
                       {"sampled", res.validation->sampled},
                       {"conditions", std::move(conds)}};
  }
  return j;
}

void maybe_write_report(const std::string& path, const json& j) {
  if (!path.empty()) write_file(path, j.dump(2) + "\n");
}

int run_pipeline_cmd(const CommonArgs& ca, const PipelineArgs& pa,
                     bool synthesize) {
  Mdp mdp = parse_mdp(read_file(ca.mdp_path));
  Nba nba = load_spec(ca, mdp.num_states());
  InitRegion init = load_init(ca, mdp.num_states());

  PipelineOptions opt;
  opt.solver_cmd = pa.solver;
  opt.invariant_size = pa.invariant_size;
  opt.handelman_degree = pa.handelman_degree;
  opt.choice_budget = pa.choice_budget;
  opt.timeout = std::chrono::duration<double>(pa.timeout);
  opt.init_mode = pa.existential ? InitMode::Existential : InitMode::Universal;
  opt.emit_smt_path = pa.emit_smt;
  auto eps = parse_rational(pa.eps);
  if (!eps || *eps <= 0) throw SemanticError("bad --eps value");
  opt.eps_den = *eps;
  if (pa.strategy_class == "memoryless")
    opt.strategy_class = StrategyClass::Memoryless;
  else if (pa.strategy_class == "affine")
    opt.strategy_class = StrategyClass::Distributional;
  else
    throw SemanticError("--class must be memoryless or affine");

  std::optional<Strategy> given;
  if (!synthesize) {
    if (pa.strategy_path.empty())
      throw SemanticError("verify needs --strategy");
    given = parse_strategy(read_file(pa.strategy_path), mdp);
  }

  PipelineResult res = run_pipeline(mdp, nba, init, given, opt);
  json j = pipeline_json(res);
  maybe_write_report(ca.report_path, j);

  if (res.emitted_only) {
    std::cout << "SMT-LIB2 written to " << pa.emit_smt << " ("
              << res.constraint_count << " relations, " << res.coeff_count
              << " template variables)\n";
    return 0;
  }
  std::cout << (synthesize ? "synthesis" : "verification") << ": "
            << (res.solved ? "solved" : "not solved") << "\n";
  std::cout << "template variables: " << res.coeff_count
            << ", relations: " << res.constraint_count << "\n";
  for (std::size_t i = 0; i < res.per_choice.size(); ++i)
    std::cout << "  choice " << i << ": "
              << status_name(res.per_choice[i].status) << " ("
              << res.per_choice[i].seconds << "s)\n";
  if (res.budget_exhausted)
    std::cout << "successor-choice budget exhausted\n";
  if (res.validation) std::cout << res.validation->text();
  if (res.solved && !pa.cert_out.empty())
    write_file(pa.cert_out, write_certificate(*res.solution, mdp));
  if (res.solved && res.solution->strategy) {
    std::cout << "strategy:\n"
              << write_strategy(*res.solution->strategy, mdp);
  }
  return res.solved ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributional certificates for MDPs"};
  app.require_subcommand(1);

  CommonArgs ver_c, syn_c, sim_c, chk_c;
  PipelineArgs ver_p, syn_p;

  auto* verify = app.add_subcommand("verify", "verify a given strategy");
  add_common(verify, ver_c);
  add_pipeline(verify, ver_p);
  verify->add_option("--strategy", ver_p.strategy_path, "strategy file")
      ->required();

  auto* synth = app.add_subcommand("synthesize", "synthesize a strategy");
  add_common(synth, syn_c);
  add_pipeline(synth, syn_p);
  synth->add_option("--class", syn_p.strategy_class,
                    "strategy class: memoryless | affine");
  synth->add_option("--eps", syn_p.eps,
                    "denominator floor for the affine class");

  auto* sim = app.add_subcommand("simulate", "trajectory + Buchi monitor");
  add_common(sim, sim_c);
  std::string sim_strategy;
  int sim_steps = 200;
  sim->add_option("--strategy", sim_strategy, "strategy file")->required();
  sim->add_option("--steps", sim_steps, "number of steps");

  auto* chk = app.add_subcommand("check-cert", "validate a certificate file");
  add_common(chk, chk_c);
  std::string chk_cert, chk_strategy, chk_solver = "z3";
  double chk_timeout = 300;
  bool chk_existential = false;
  chk->add_option("--cert", chk_cert, "certificate file")->required();
  chk->add_option("--strategy", chk_strategy,
                  "strategy file (when the certificate says 'given')");
  chk->add_option("--solver", chk_solver, "SMT solver command");
  chk->add_option("--timeout", chk_timeout, "solver timeout in seconds");
  chk->add_flag("--existential", chk_existential, "existential initial mode");

  auto* gw = app.add_subcommand("gen-gridworld", "emit a gridworld instance");
  int gw_n = 3, gw_target = -1, gw_avoid = -1;
  std::vector<int> gw_walls;
  std::vector<std::string> gw_slip;
  std::string gw_prefix = "gridworld";
  gw->add_option("--n", gw_n, "grid side length");
  gw->add_option("--target", gw_target, "target cell (row-major)")->required();
  gw->add_option("--avoid", gw_avoid, "cell for the G side-constraint");
  gw->add_option("--wall", gw_walls, "wall cells");
  gw->add_option("--slip", gw_slip, "slippery cells as cell:prob");
  gw->add_option("--out-prefix", gw_prefix, "output file prefix");

  auto* pr = app.add_subcommand("gen-pagerank", "emit a random-surfer chain");
  int pr_nodes = 0;
  std::vector<std::string> pr_edges;
  std::string pr_damping = "17/20", pr_out = "pagerank.mdp";
  pr->add_option("--nodes", pr_nodes, "node count")->required();
  pr->add_option("--edge", pr_edges, "edges as u:v");
  pr->add_option("--damping", pr_damping, "damping factor");
  pr->add_option("--out", pr_out, "output MDP file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return run_pipeline_cmd(ver_c, ver_p, false);
    if (synth->parsed()) return run_pipeline_cmd(syn_c, syn_p, true);

    if (sim->parsed()) {
      Mdp mdp = parse_mdp(read_file(sim_c.mdp_path));
      Nba nba = load_spec(sim_c, mdp.num_states());
      InitRegion init = load_init(sim_c, mdp.num_states());
      if (init.points.empty())
        throw SemanticError("simulate needs a point initial distribution");
      Strategy strategy = parse_strategy(read_file(sim_strategy), mdp);
      SimulationReport rep =
          simulate_monitor(mdp, strategy, init.points[0], nba, sim_steps);
      std::cout << rep.text();
      if (!sim_c.report_path.empty()) {
        json j;
        j["status"] = "simulated";
        j["verdict"] = rep.verdict;
        j["inconsistent_at"] = rep.inconsistent_at;
        j["converged_at"] = rep.converged_at;
        j["accepting_steps"] = rep.accepting_steps.size();
        maybe_write_report(sim_c.report_path, j);
      }
      return 0;
    }

    if (chk->parsed()) {
      Mdp mdp = parse_mdp(read_file(chk_c.mdp_path));
      Nba nba = load_spec(chk_c, mdp.num_states());
      InitRegion init = load_init(chk_c, mdp.num_states());
      CertificateSolution sol =
          read_certificate(read_file(chk_cert), mdp, nba);
      std::optional<Strategy> strategy = sol.strategy;
      if (!strategy) {
        if (chk_strategy.empty())
          throw SemanticError(
              "certificate has no strategy block; pass --strategy");
        strategy = parse_strategy(read_file(chk_strategy), mdp);
      }
      ValidationReport rep = check_certificate(
          sol, mdp, nba, init,
          chk_existential ? InitMode::Existential : InitMode::Universal,
          *strategy, chk_solver, std::chrono::duration<double>(chk_timeout));
      std::cout << rep.text();
      if (!chk_c.report_path.empty()) {
        json j;
        j["status"] = rep.passed ? "validated" : "rejected";
        j["sampled"] = rep.sampled;
        maybe_write_report(chk_c.report_path, j);
      }
      return rep.passed ? 0 : 1;
    }

    if (gw->parsed()) {
      std::set<int> walls(gw_walls.begin(), gw_walls.end());
      std::map<int, Rational> slippery;
      for (const auto& s : gw_slip) {
        auto colon = s.find(':');
        if (colon == std::string::npos)
          throw SemanticError("--slip needs cell:prob");
        auto p = parse_rational(s.substr(colon + 1));
        if (!p) throw SemanticError("bad slip probability in '" + s + "'");
        slippery[std::stoi(s.substr(0, colon))] = *p;
      }
      std::optional<int> avoid;
      if (gw_avoid >= 0) avoid = gw_avoid;
      GeneratedInstance inst =
          gen_gridworld(gw_n, walls, slippery, gw_target, avoid);
      std::ostringstream mdp_text;
      mdp_text << "states:";
      for (const auto& s : inst.mdp.states) mdp_text << " " << s;
      mdp_text << "\nactions:";
      for (const auto& a : inst.mdp.actions) mdp_text << " " << a;
      mdp_text << "\n";
      for (std::size_t s = 0; s < inst.mdp.num_states(); ++s)
        for (int a : inst.mdp.available[s]) {
          mdp_text << "trans " << inst.mdp.states[s] << " "
                   << inst.mdp.actions[a] << " ->";
          const Distribution& d = inst.mdp.row(static_cast<int>(s), a);
          for (std::size_t t = 0; t < d.size(); ++t)
            if (d[t] != 0)
              mdp_text << " " << inst.mdp.states[t] << ":" << to_string(d[t]);
          mdp_text << "\n";
        }
      write_file(gw_prefix + ".mdp", mdp_text.str());
      write_file(gw_prefix + ".spec", inst.spec + "\n");
      write_file(gw_prefix + ".init", inst.init + "\n");
      std::cout << "wrote " << gw_prefix << ".mdp/.spec/.init  (spec: "
                << inst.spec << ")\n";
      return 0;
    }

    if (pr->parsed()) {
      std::vector<std::pair<int, int>> edges;
      for (const auto& e : pr_edges) {
        auto colon = e.find(':');
        if (colon == std::string::npos)
          throw SemanticError("--edge needs u:v");
        edges.emplace_back(std::stoi(e.substr(0, colon)),
                           std::stoi(e.substr(colon + 1)));
      }
      auto d = parse_rational(pr_damping);
      if (!d) throw SemanticError("bad damping factor");
      Mdp mdp = gen_pagerank(pr_nodes, edges, *d);
      std::ostringstream text;
      text << "states:";
      for (const auto& s : mdp.states) text << " " << s;
      text << "\nactions: surf\n";
      for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        text << "trans " << mdp.states[s] << " surf ->";
        const Distribution& row = mdp.row(static_cast<int>(s), 0);
        for (std::size_t t = 0; t < row.size(); ++t)
          if (row[t] != 0)
            text << " " << mdp.states[t] << ":" << to_string(row[t]);
        text << "\n";
      }
      write_file(pr_out, text.str());
      std::cout << "wrote " << pr_out << "\n";
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SemanticError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
