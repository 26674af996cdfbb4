#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polyschwarz/catalog.hpp"
#include "polyschwarz/comparison.hpp"
#include "polyschwarz/order.hpp"
#include "polyschwarz/serialize.hpp"
#include "polyschwarz/version.hpp"

namespace ps = polyschwarz;

namespace {

struct Options {
  std::string map_path;
  std::string z_text;
  std::string zeta_text;
  std::string out_path;
  std::string format = "json";
  double radius = 0.9;
  int grid = 0;
  int refine = 2;
  int budget = 8;
  double tol = 1e-12;
  std::uint64_t seed = ps::kDefaultSeed;
  int threads = 0;
  int phases = 48;
  double transport_t_end = 0.99;
  double riccati_x_end = 0.999;
  double compare_x_end = 0.99;
  double vanish_t_end = 1.0 - 1e-6;
  int order_budget = 16;
  double c = 0.0;
  double a = 0.0;
  double b = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  int power = 2;
  int n = 2;
  double alpha = -1.0;
  double r = -1.0;
  double alpha_scale = 1.0;
  bool full = false;
  std::string echo;
};

ps::MapExpr load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ps::parse_error("cannot open map file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ps::parse_map_document(buf.str());
}

void write_text(const Options& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.out_path);
  if (!out) throw ps::parse_error("cannot write output file '" + opt.out_path + "'");
  out << text;
}

int emit_report(const Options& opt, ps::Json result, bool pass = true) {
  ps::Json report;
  report["command"] = opt.echo;
  report["seed"] = opt.seed;
  report["version"] = ps::kVersion;
  report["result"] = std::move(result);
  write_text(opt, report.dump(2) + "\n");
  return pass ? 0 : 1;
}

int emit_outcome(const Options& opt, const ps::OdeOutcome& outcome) {
  if (opt.format == "csv") {
    write_text(opt, ps::ode_samples_csv(outcome));
    return outcome.envelope_ok ? 0 : 1;
  }
  return emit_report(opt, ps::to_json(outcome), outcome.envelope_ok);
}

void require_json_format(const Options& opt) {
  if (opt.format != "json")
    throw ps::parse_error("csv output is only available for sampled curves "
                          "(transport, riccati, compare, vanish)");
}

ps::SupNormGrid grid_from_flag(int grid) {
  if (grid <= 0) return ps::SupNormGrid{};
  return ps::SupNormGrid{grid, std::max(3, (4 * grid + 2) / 3)};
}

int run_tensor(const Options& opt) {
  require_json_format(opt);
  const ps::MapExpr f = load_map(opt.map_path);
  const ps::Point z = ps::parse_point(opt.z_text, f.dim());
  return emit_report(opt, ps::to_json(ps::schwarzian_tensor(f, z)));
}

int run_opnorm(const Options& opt) {
  require_json_format(opt);
  const ps::MapExpr f = load_map(opt.map_path);
  const ps::Point z = ps::parse_point(opt.z_text, f.dim());
  return emit_report(opt, ps::to_json(ps::operator_norm(f, z, opt.budget, opt.tol, opt.seed)));
}

int run_supnorm(const Options& opt) {
  require_json_format(opt);
  const ps::MapExpr f = load_map(opt.map_path);
  const ps::SupNormResult r = ps::sup_norm(f, opt.radius, grid_from_flag(opt.grid), opt.refine,
                                           opt.budget, opt.tol, opt.seed, opt.threads);
  return emit_report(opt, ps::to_json(r));
}

int run_normalize(const Options& opt) {
  require_json_format(opt);
  const ps::MapExpr f = load_map(opt.map_path);
  const ps::MapExpr g = ps::MapExpr::compose(ps::make_normalizer(f), f);
  const ps::Json doc = ps::map_to_json(g);
  if (!opt.out_path.empty()) {
    // The output file is itself a map description, so it feeds back into --map.
    std::ofstream out(opt.out_path);
    if (!out) throw ps::parse_error("cannot write output file '" + opt.out_path + "'");
    out << ps::write_map_document(g);
    Options echo_only = opt;
    echo_only.out_path.clear();
    return emit_report(echo_only, doc);
  }
  return emit_report(opt, doc);
}

int run_transport(const Options& opt) {
  const ps::MapExpr f = load_map(opt.map_path);
  const ps::Point zeta = ps::parse_point(opt.zeta_text, f.dim());
  const ps::MapJet mj = ps::map_jet(f, ps::origin(f.dim()));
  const ps::Jet3 u0 = ps::u0_jet(mj);
  std::vector<ps::cxd> grad0(static_cast<std::size_t>(f.dim()));
  for (int i = 0; i < f.dim(); ++i) grad0[i] = u0.grad(i);
  return emit_outcome(opt, ps::transport_ray(f, zeta, u0.value, grad0, opt.transport_t_end));
}

int run_riccati(const Options& opt) {
  return emit_outcome(opt, ps::riccati_solve(opt.c, opt.riccati_x_end));
}

int run_compare(const Options& opt) {
  return emit_outcome(opt, ps::linear_comparison_check(opt.a, opt.b, opt.compare_x_end));
}

int run_vanish(const Options& opt) {
  return emit_outcome(opt, ps::vanish_radius(opt.eps, opt.delta, opt.gamma, opt.power, opt.vanish_t_end));
}

int run_order(const Options& opt) {
  require_json_format(opt);
  const bool has_alpha = opt.alpha >= 0;
  const bool has_r = opt.r >= 0;
  if (has_alpha != has_r)
    throw ps::parse_error("order: --alpha and --r must be given together");
  if (has_alpha)
    return emit_report(opt,
                       ps::to_json(ps::mu_r_lower(opt.n, opt.alpha, opt.r, opt.order_budget, opt.seed)));
  return emit_report(opt, ps::to_json(ps::moebius_order(opt.n)));
}

int run_cover(const Options& opt) {
  require_json_format(opt);
  const ps::MapExpr f = load_map(opt.map_path);
  const ps::CoveringEstimate est = ps::covering_estimate(f, opt.radius, opt.phases);
  return emit_report(opt, ps::to_json(est), est.half_radius_ok);
}

int run_verify(const Options& opt) {
  require_json_format(opt);
  ps::SuiteConfig cfg;
  cfg.seed = opt.seed;
  cfg.alpha_scale = opt.alpha_scale;
  cfg.quick = !opt.full;
  cfg.radius = opt.radius;
  cfg.threads = opt.threads;
  const ps::SuiteRun run = ps::run_suite(cfg);
  return emit_report(opt, ps::to_json(run), run.pass);
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) opt.echo += ' ';
    opt.echo += argv[i];
  }

  CLI::App app{"Schwarzian tensor diagnostics for holomorphic maps of the polydisk"};
  app.require_subcommand(1);

  auto add_map = [&](CLI::App* cmd) {
    cmd->add_option("--map", opt.map_path, "map description file (JSON)")->required();
  };
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", opt.out_path, "write the report to this path instead of stdout");
    cmd->add_option("--format", opt.format, "output format: json (default) or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", opt.seed, "random seed (default 0x5eed5eed)");
  };

  CLI::App* tensor = app.add_subcommand("tensor", "Schwarzian tensor of a map at a point");
  add_map(tensor);
  tensor->add_option("--z", opt.z_text, "evaluation point, comma list of re+imi literals")
      ->required();
  add_common(tensor);

  CLI::App* opnorm = app.add_subcommand("opnorm", "operator norm of the tensor at a point");
  add_map(opnorm);
  opnorm->add_option("--z", opt.z_text, "evaluation point")->required();
  opnorm->add_option("--budget", opt.budget, "extra random ascent starts (default 8)");
  opnorm->add_option("--tol", opt.tol, "ascent convergence tolerance (default 1e-12)");
  add_common(opnorm);

  CLI::App* supnorm =
      app.add_subcommand("supnorm", "grid lower bound for the sup of the operator norm");
  add_map(supnorm);
  supnorm->add_option("--radius", opt.radius, "polydisk truncation radius (default 0.9)");
  supnorm->add_option("--grid", opt.grid, "radial grid size; phases scale with it");
  supnorm->add_option("--refine", opt.refine, "local refinement rounds (default 2)");
  supnorm->add_option("--budget", opt.budget, "extra ascent starts per point");
  supnorm->add_option("--tol", opt.tol, "ascent convergence tolerance");
  supnorm->add_option("--threads", opt.threads, "worker threads (default: hardware)");
  add_common(supnorm);

  CLI::App* normalize = app.add_subcommand(
      "normalize", "compose with the renormalizing factor; --out writes a map file");
  add_map(normalize);
  add_common(normalize);

  CLI::App* transport =
      app.add_subcommand("transport", "integrate the canonical solution along a ray");
  add_map(transport);
  transport->add_option("--zeta", opt.zeta_text, "ray direction with |zeta|_inf = 1")->required();
  transport->add_option("--t-end", opt.transport_t_end, "integration endpoint in [0, 1) (default 0.99)");
  add_common(transport);

  CLI::App* riccati = app.add_subcommand(
      "riccati", "comparison Riccati equation: completion or bracketed blow-up");
  riccati->add_option("--c", opt.c, "coefficient constant, >= 0")->required();
  riccati->add_option("--x-end", opt.riccati_x_end, "integration endpoint in (0, 1) (default 0.999)");
  add_common(riccati);

  CLI::App* compare = app.add_subcommand(
      "compare", "linear comparison equation against its closed-form envelope");
  compare->add_option("--a", opt.a, "first-order coefficient, >= 0")->required();
  compare->add_option("--b", opt.b, "zeroth-order coefficient, >= 0")->required();
  compare->add_option("--x-end", opt.compare_x_end, "integration endpoint (default 0.99)");
  add_common(compare);

  CLI::App* vanish =
      app.add_subcommand("vanish", "first zero of the damped comparison solution");
  vanish->add_option("--eps", opt.eps, "zeroth-order forcing strength, >= 0")->required();
  vanish->add_option("--delta", opt.delta, "singular forcing strength, >= 0");
  vanish->add_option("--gamma", opt.gamma, "singular forcing exponent");
  vanish->add_option("--power", opt.power, "rim power of the forcing term, 1 or 2 (default 2)");
  vanish->add_option("--t-end", opt.vanish_t_end, "integration endpoint (default 1 - 1e-6)");
  add_common(vanish);

  CLI::App* order = app.add_subcommand(
      "order", "family order: Moebius extremal, or a searched lower bound with --alpha/--r");
  order->add_option("--n", opt.n, "dimension (default 2)");
  order->add_option("--alpha", opt.alpha, "Schwarzian norm budget for the searched family");
  order->add_option("--r", opt.r, "pole-control radius in (0, 1/sqrt(5))");
  order->add_option("--budget", opt.order_budget, "search iterations (default 16)");
  add_common(order);

  CLI::App* cover = app.add_subcommand(
      "cover", "covering radius lower bound from the image of a torus grid");
  add_map(cover);
  cover->add_option("--radius", opt.radius, "domain torus radius (default 0.9)");
  cover->add_option("--phases", opt.phases, "phase samples per axis (default 48)");
  add_common(cover);

  CLI::App* verify = app.add_subcommand("verify", "run the built-in inequality suites");
  verify->add_option("--alpha-scale", opt.alpha_scale,
                     "multiplier on every measured alpha (default 1; <1 must fail)");
  verify->add_flag("--full", opt.full, "denser grids (slower)");
  verify->add_option("--radius", opt.radius, "truncation radius for measured norms");
  verify->add_option("--threads", opt.threads, "worker threads");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (tensor->parsed()) return run_tensor(opt);
    if (opnorm->parsed()) return run_opnorm(opt);
    if (supnorm->parsed()) return run_supnorm(opt);
    if (normalize->parsed()) return run_normalize(opt);
    if (transport->parsed()) return run_transport(opt);
    if (riccati->parsed()) return run_riccati(opt);
    if (compare->parsed()) return run_compare(opt);
    if (vanish->parsed()) return run_vanish(opt);
    if (order->parsed()) return run_order(opt);
    if (cover->parsed()) return run_cover(opt);
    if (verify->parsed()) return run_verify(opt);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ps::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ps::precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ps::singular_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
