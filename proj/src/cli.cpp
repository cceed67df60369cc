#include "teq/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "teq/analytics.hpp"
#include "teq/fp_solver.hpp"
#include "teq/io.hpp"
#include "teq/payments.hpp"
#include "teq/reductions.hpp"
#include "teq/sim.hpp"
#include "teq/sp_solver.hpp"

namespace teq {
namespace {

struct GlobalOpts {
  double tolerance = kDefaultTolerance;
  int threads = 0;  // accepted for forward compatibility; solvers are
                    // single-threaded per invocation
  bool quiet = false;
};

void emit(const json& doc, const std::string& out_path, const GlobalOpts& g) {
  if (!out_path.empty())
    write_json_file(out_path, doc);
  else if (!g.quiet)
    std::cout << doc.dump(2) << "\n";
}

AuctionFormat parse_format(const std::string& s) {
  if (s == "fp" || s == "first-price") return AuctionFormat::FirstPrice;
  if (s == "sp" || s == "second-price") return AuctionFormat::SecondPrice;
  throw std::invalid_argument("format must be fp or sp");
}

int emit_certificate(const EquilibriumCertificate& cert, json extra,
                     const std::string& out_path, const GlobalOpts& g) {
  extra["certificate"] = certificate_to_json(cert);
  emit(extra, out_path, g);
  return cert.accepted ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"throttling equilibria in first- and second-price auction markets"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--tolerance", g.tolerance, "numeric tolerance");
  app.add_option("--threads", g.threads, "worker hint (currently unused)");
  app.add_flag("--quiet", g.quiet, "suppress stdout reports");

  std::string game_path, theta_path, out_path, trace_path, mapping_path;
  std::string graph_path, x_path, cnf_path, market_path;
  double delta = 1e-3, gamma = 0.01, eps = 0.5;
  std::string format_str = "fp";
  int ret = 0;

  // solve
  auto* solve = app.add_subcommand("solve", "compute equilibria");
  solve->require_subcommand(1);
  auto* solve_fp = solve->add_subcommand("fp", "first-price tatonnement");
  solve_fp->add_option("--game", game_path, "game JSON")->required();
  solve_fp->add_option("--delta", delta, "approximation level")->required();
  solve_fp->add_option("--trace", trace_path, "trace output JSON");
  solve_fp->add_option("--out", out_path, "result output JSON");
  solve_fp->callback([&] {
    auto game = game_from_json(load_json_file(game_path)).game;
    auto [theta, trace] = solve_fp_throttling(game, delta, !trace_path.empty());
    if (!trace_path.empty()) write_json_file(trace_path, trace_to_json(trace));
    auto cert = verify_equilibrium(game, theta, delta,
                                   AuctionFormat::FirstPrice, g.tolerance);
    ret = emit_certificate(cert, profile_to_json(theta), out_path, g);
  });

  auto* solve_pacing = solve->add_subcommand("fp-pacing", "first-price pacing");
  solve_pacing->add_option("--game", game_path, "game JSON")->required();
  solve_pacing->add_option("--delta", delta, "approximation level")->required();
  solve_pacing->add_option("--out", out_path, "result output JSON");
  solve_pacing->callback([&] {
    auto game = game_from_json(load_json_file(game_path)).game;
    PacingProfile pacing = solve_fp_pacing(game, delta);
    auto cert = verify_pacing_equilibrium(game, pacing, delta,
                                          AuctionFormat::FirstPrice, g.tolerance);
    ret = emit_certificate(cert, pacing_to_json(pacing, game.n, game.m),
                           out_path, g);
  });

  auto* solve_sp2 = solve->add_subcommand("sp-two", "two-bid second-price");
  solve_sp2->add_option("--game", game_path, "game JSON")->required();
  solve_sp2->add_option("--gamma", gamma, "step parameter")->required();
  solve_sp2->add_option("--trace", trace_path, "trace output JSON");
  solve_sp2->add_option("--out", out_path, "result output JSON");
  solve_sp2->callback([&] {
    auto game = game_from_json(load_json_file(game_path)).game;
    auto [theta, trace] = solve_sp_two_bid(game, gamma, !trace_path.empty());
    if (!trace_path.empty()) write_json_file(trace_path, trace_to_json(trace));
    auto cert = verify_equilibrium(game, theta, 3.0 * gamma,
                                   AuctionFormat::SecondPrice, g.tolerance);
    ret = emit_certificate(cert, profile_to_json(theta), out_path, g);
  });

  FixedPointConfig fpc;
  auto* solve_spf = solve->add_subcommand("sp-fixed", "second-price fixed point");
  solve_spf->add_option("--game", game_path, "game JSON")->required();
  solve_spf->add_option("--delta", fpc.delta, "approximation level");
  solve_spf->add_option("--damping", fpc.damping, "damping in (0,1]");
  solve_spf->add_option("--seed", fpc.seed, "restart seed");
  solve_spf->add_option("--max-iterations", fpc.max_iterations, "per-seed cap");
  solve_spf->add_option("--restarts", fpc.restart_seeds, "random restarts");
  solve_spf->add_option("--out", out_path, "result output JSON");
  solve_spf->callback([&] {
    auto game = game_from_json(load_json_file(game_path)).game;
    FixedPointResult res = solve_sp_fixed_point(game, fpc);
    json doc{{"iterations", res.iterations}, {"seeds_tried", res.seeds_tried}};
    if (res.profile) {
      doc["theta"] = *res.profile;
      auto cert = verify_equilibrium(game, *res.profile, fpc.delta,
                                     AuctionFormat::SecondPrice, g.tolerance);
      ret = emit_certificate(cert, std::move(doc), out_path, g);
    } else {
      doc["verdict"] = "NotConverged";
      emit(doc, out_path, g);
      ret = 1;
    }
  });

  // verify (game profile, or threshold strategy)
  auto* verify = app.add_subcommand("verify", "check equilibrium conditions");
  auto* verify_th = verify->add_subcommand("threshold", "threshold-game check");
  verify_th->add_option("--graph", graph_path, "threshold game JSON")->required();
  verify_th->add_option("--x", x_path, "strategy vector JSON")->required();
  verify_th->add_option("--epsilon", eps, "approximation level")->required();
  verify_th->callback([&] {
    auto tg = threshold_game_from_json(load_json_file(graph_path));
    auto x = vector_from_json(load_json_file(x_path), "x");
    ThresholdCheck check = verify_threshold_equilibrium(tg, x, eps);
    json issues = json::array();
    for (const auto& issue : check.issues)
      issues.push_back({{"node", issue.node},
                        {"in_sum", issue.in_sum},
                        {"x", issue.x}});
    emit(json{{"verdict", check.ok ? "Accept" : "Reject"},
              {"issues", std::move(issues)}},
         out_path, g);
    ret = check.ok ? 0 : 1;
  });
  verify->add_option("--game", game_path, "game JSON");
  verify->add_option("--theta", theta_path, "profile JSON");
  verify->add_option("--delta", delta, "approximation level");
  verify->add_option("--format", format_str, "fp | sp");
  verify->add_option("--out", out_path, "result output JSON");
  verify->callback([&] {
    if (verify_th->parsed()) return;
    if (game_path.empty() || theta_path.empty())
      throw CLI::RequiredError("verify requires --game and --theta");
    auto game = game_from_json(load_json_file(game_path)).game;
    auto theta = profile_from_json(load_json_file(theta_path), game.n);
    auto cert = verify_equilibrium(game, theta, delta,
                                   parse_format(format_str), g.tolerance);
    ret = emit_certificate(cert, json::object(), out_path, g);
  });

  // oracle
  GridOracleConfig goc;
  auto* oracle = app.add_subcommand("oracle", "exhaustive grid search");
  oracle->add_option("--game", game_path, "game JSON")->required();
  oracle->add_option("--step", goc.step, "grid spacing");
  oracle->add_option("--delta", goc.delta, "approximation level");
  oracle->add_option("--format", format_str, "fp | sp");
  oracle->add_option("--max-points", goc.max_points, "enumeration cap");
  oracle->add_option("--out", out_path, "result output JSON");
  oracle->callback([&] {
    auto game = game_from_json(load_json_file(game_path)).game;
    auto hits = brute_force_equilibria(game, goc, parse_format(format_str),
                                       g.tolerance);
    json arr = json::array();
    for (const auto& h : hits) arr.push_back(h);
    emit(json{{"count", hits.size()}, {"equilibria", std::move(arr)}}, out_path,
         g);
  });

  // reduce
  auto* reduce = app.add_subcommand("reduce", "hardness gadget constructions");
  reduce->require_subcommand(1);
  auto* red_th = reduce->add_subcommand("threshold", "threshold-game gadget");
  red_th->add_option("--graph", graph_path, "threshold game JSON")->required();
  red_th->add_option("--epsilon", eps, "threshold approximation level");
  red_th->add_option("--out", out_path, "game output JSON");
  red_th->add_option("--mapping", mapping_path, "mapping output JSON");
  red_th->callback([&] {
    auto tg = threshold_game_from_json(load_json_file(graph_path));
    if (red_th->count("--epsilon") > 0) tg.epsilon = eps;
    auto [game, mapping] = threshold_to_throttling(tg);
    if (!mapping_path.empty())
      write_json_file(mapping_path, reduction_mapping_to_json(mapping));
    emit(game_to_json(game), out_path, g);
  });
  auto* red_sat = reduce->add_subcommand("sat", "3-SAT revenue gadget");
  red_sat->add_option("--cnf", cnf_path, "DIMACS CNF input")->required();
  red_sat->add_option("--out", out_path, "game output JSON");
  red_sat->callback([&] {
    std::ifstream in(cnf_path);
    if (!in) throw std::invalid_argument("cannot open " + cnf_path);
    SatReduction red = sat_to_rev(parse_dimacs(in));
    json doc = game_to_json(red.game);
    doc["target_revenue"] = red.target_revenue;
    emit(doc, out_path, g);
  });

  // compare
  auto* compare = app.add_subcommand("compare", "throttling vs pacing");
  auto* cmp_rev = compare->add_subcommand("revenue", "throttling vs pacing revenue ratio");
  cmp_rev->add_option("--game", game_path, "game JSON")->required();
  cmp_rev->add_option("--delta", delta, "approximation level");
  cmp_rev->add_option("--out", out_path, "result output JSON");
  cmp_rev->callback([&] {
    auto game = game_from_json(load_json_file(game_path)).game;
    ComparisonReport rep = revenue_comparison_fp(game, delta);
    emit(comparison_report_to_json(rep, game.n, game.m), out_path, g);
  });
  compare->require_subcommand(1);

  // poa
  auto* poa = app.add_subcommand("poa", "liquid-welfare price of anarchy");
  poa->add_option("--game", game_path, "game JSON")->required();
  poa->add_option("--theta", theta_path, "profile JSON")->required();
  poa->add_option("--format", format_str, "fp | sp");
  poa->add_option("--out", out_path, "result output JSON");
  poa->callback([&] {
    auto game = game_from_json(load_json_file(game_path)).game;
    auto theta = profile_from_json(load_json_file(theta_path), game.n);
    WelfareReport rep =
        poa_ratio(game, theta, parse_format(format_str), g.tolerance);
    emit(welfare_report_to_json(rep, game.n, game.m), out_path, g);
  });

  // simulate
  SimConfig sim_cfg;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo payment estimator");
  sim->add_option("--market", market_path, "raw market JSON")->required();
  sim->add_option("--theta", theta_path, "profile JSON")->required();
  sim->add_option("--rounds", sim_cfg.rounds, "number of rounds");
  sim->add_option("--seed", sim_cfg.seed, "RNG seed");
  sim->add_option("--format", format_str, "fp | sp");
  sim->add_option("--out", out_path, "report output JSON");
  sim->callback([&] {
    RawMarket market = market_from_json(load_json_file(market_path));
    auto theta = profile_from_json(load_json_file(theta_path), market.n);
    sim_cfg.format = parse_format(format_str);
    SimReport rep = simulate(market, theta, sim_cfg);
    emit(sim_report_to_json(rep, market.n, market.m), out_path, g);
  });

  // generate
  GeneratorSpec gen;
  std::string dist_str = "uniform";
  auto* generate_cmd = app.add_subcommand("generate", "random game generator");
  generate_cmd->add_option("--n", gen.n, "buyers");
  generate_cmd->add_option("--m", gen.m, "goods");
  generate_cmd->add_option("--dist", dist_str, "uniform | loguniform");
  generate_cmd->add_option("--lo", gen.lo, "bid lower bound");
  generate_cmd->add_option("--hi", gen.hi, "bid upper bound");
  generate_cmd->add_option("--tightness", gen.budget_tightness,
                           "budget tightness factor");
  generate_cmd->add_option("--seed", gen.seed, "RNG seed");
  generate_cmd->add_option("--out", out_path, "game output JSON");
  generate_cmd->callback([&] {
    if (dist_str == "uniform")
      gen.bid_distribution = BidDistribution::Uniform;
    else if (dist_str == "loguniform")
      gen.bid_distribution = BidDistribution::LogUniform;
    else
      throw std::invalid_argument("dist must be uniform or loguniform");
    emit(game_to_json(generate(gen)), out_path, g);
  });

  // examples
  int ex_m = 4;
  double ex_eps = 0.1;
  auto* examples = app.add_subcommand("examples", "named tightness families");
  examples->require_subcommand(1);
  auto* ex_sp = examples->add_subcommand("poa-sp", "second-price tightness");
  ex_sp->add_option("--m", ex_m, "goods");
  ex_sp->add_option("--eps", ex_eps, "budget slack");
  ex_sp->add_option("--out", out_path, "game output JSON");
  ex_sp->callback(
      [&] { emit(game_to_json(poa_example_sp(ex_m, ex_eps)), out_path, g); });
  auto* ex_fp = examples->add_subcommand("poa-fp", "first-price tightness");
  ex_fp->add_option("--m", ex_m, "goods parameter");
  ex_fp->add_option("--out", out_path, "game output JSON");
  ex_fp->callback(
      [&] { emit(game_to_json(poa_example_fp(ex_m)), out_path, g); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return ret;
}

}  // namespace teq
