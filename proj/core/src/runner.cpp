#include "nehari/runner.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "nehari/field_io.hpp"
#include "nehari/properties.hpp"
#include "nehari/report.hpp"

namespace nehari {

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int exit_code = kExitSuccess;
  Json payload = Json::object();
  std::string summary;  // one line for stdout
};

std::vector<Point> sample_points(const Grid& g) {
  std::vector<Point> pts;
  const std::size_t n = g.num_nodes();
  const std::size_t stride = std::max<std::size_t>(1, n / 48);
  for (std::size_t i = 0; i < n; i += stride) pts.push_back(g.node(i));
  return pts;
}

Json domain_json(const RunConfig& rc) {
  Json d = Json::object();
  d.set("dim", Json::integer(rc.dim));
  Json lens = Json::array();
  Json nodes = Json::array();
  for (int a = 0; a < rc.dim; ++a) {
    lens.push(Json::real(rc.lengths[static_cast<std::size_t>(a)]));
    nodes.push(Json::integer(rc.nodes[static_cast<std::size_t>(a)]));
  }
  d.set("lengths", std::move(lens));
  d.set("nodes", std::move(nodes));
  return d;
}

Json kernel_json(const RunConfig& rc) {
  Json k = Json::object();
  k.set("family", Json::str(rc.family));
  if (rc.family == "strong-resonance") {
    k.set("eta", Json::str(rc.eta_expr));
    k.set("c", Json::real(rc.c));
  } else {
    k.set("alpha", Json::str(rc.alpha_expr));
    k.set("eta", Json::str(rc.eta_expr));
  }
  return k;
}

std::string csv_name(const char* stem, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%02zu.csv", stem, index);
  return std::string(buf);
}

Outcome do_check(const RunConfig& rc) {
  Outcome oc;
  auto grid = rc.make_grid();
  auto nl = rc.make_nonlinearity();

  const std::vector<Point> pts = sample_points(*grid);
  const std::vector<double> tg = default_t_grid();
  const F1Report f1 = validate_f1(*nl, pts, tg);
  oc.payload.set("hypothesis_f1", to_json(f1));
  if (!f1.passed) {
    oc.exit_code = kExitHypothesisFail;
    oc.summary = "check: kernel violates the asymptotic-linearity hypotheses";
    return oc;
  }

  EnergyModel model(grid, nl);
  const ConditionReport cr = check_conditions(model, rc.condition_options());
  Json cj = to_json(cr);
  oc.payload.set("conditions", std::move(cj));

  const bool any_fail = cr.verdict_f2 == Verdict::fails ||
                        cr.verdict_beta == Verdict::fails ||
                        cr.verdict_beta_m == Verdict::fails;
  const bool all_clear = cr.verdict_f2 == Verdict::holds &&
                         cr.verdict_beta == Verdict::holds &&
                         cr.verdict_beta_m == Verdict::holds;
  if (any_fail)
    oc.exit_code = kExitHypothesisFail;
  else if (all_clear)
    oc.exit_code = kExitSuccess;
  else
    oc.exit_code = kExitInconclusive;
  oc.summary = std::string("check: eigenvalue hypothesis ") + to_string(cr.verdict_f2) +
               ", compactness condition " + to_string(cr.verdict_beta) +
               " (multiplicity variant " + to_string(cr.verdict_beta_m) + ")";
  return oc;
}

Outcome do_solve(const RunConfig& rc, const std::string& digest, const fs::path& out) {
  Outcome oc;
  auto grid = rc.make_grid();
  auto nl = rc.make_nonlinearity();
  EnergyModel model(grid, nl);

  ConditionOptions copts = rc.condition_options();
  const F2Result f2 = check_f2(model, copts);
  Json fj = Json::object();
  fj.set("verdict", Json::str(to_string(f2.verdict)));
  fj.set("m", Json::integer(f2.m));
  fj.set("s_m", Json::integer(f2.s_m));
  fj.set("lambda1_eta", Json::real(f2.lambda1_eta));
  fj.set("lambda1_alpha", Json::real(f2.lambda1_alpha));
  oc.payload.set("hypothesis_f2", std::move(fj));
  if (f2.verdict == Verdict::fails || f2.m < 1) {
    oc.exit_code = kExitHypothesisFail;
    oc.summary = "solve: eigenvalue hypothesis fails; no descent attempted";
    return oc;
  }

  SolveOptions so = rc.solve;
  so.seed = rc.seed;
  so.config_digest = digest;
  const SolveReport sr = minimize_psi(model, f2.eta_spectrum.pairs.front().e, so);
  oc.payload.set("solve", to_json(sr));
  write_field_csv(sr.u_star, out / "solution.csv");
  oc.payload.set("solution_csv", Json::str("solution.csv"));

  oc.exit_code = sr.status == SolveStatus::converged ? kExitSuccess : kExitNumericFailure;
  oc.summary = std::string("solve: ") + to_string(sr.status) + ", level " +
               format_real(sr.level) + ", " + sr.sign_verdict;
  return oc;
}

Outcome do_multi(const RunConfig& rc, const std::string& digest, const fs::path& out) {
  Outcome oc;
  auto grid = rc.make_grid();
  auto nl = rc.make_nonlinearity();
  EnergyModel model(grid, nl);

  ConditionOptions copts = rc.condition_options();
  const F2Result f2 = check_f2(model, copts);
  Json fj = Json::object();
  fj.set("verdict", Json::str(to_string(f2.verdict)));
  fj.set("m", Json::integer(f2.m));
  fj.set("s_m", Json::integer(f2.s_m));
  oc.payload.set("hypothesis_f2", std::move(fj));
  if (f2.verdict == Verdict::fails || f2.m < 1) {
    oc.exit_code = kExitHypothesisFail;
    oc.summary = "multi: eigenvalue hypothesis fails; no search attempted";
    return oc;
  }

  MultiplicityOptions mo = rc.multiplicity_options();
  mo.threads = thread_cap();
  mo.solve.config_digest = digest;
  const MultiplicityReport mr = multiplicity_search(model, f2.eta_spectrum, mo);
  Json mj = to_json(mr);
  Json files = Json::array();
  for (std::size_t i = 0; i < mr.solutions.size(); ++i) {
    const std::string name = csv_name("solution", i + 1);
    write_field_csv(mr.solutions[i].u, out / name);
    files.push(Json::str(name));
  }
  mj.set("solution_csv", std::move(files));
  oc.payload.set("multiplicity", std::move(mj));

  oc.exit_code = mr.distinct_count >= 1 ? kExitSuccess : kExitNumericFailure;
  oc.summary = "multi: " + std::to_string(mr.distinct_count) +
               " distinct pair(s) found, target " + std::to_string(mr.target_pairs);
  return oc;
}

Outcome do_spectrum(const RunConfig& rc, const fs::path& out) {
  Outcome oc;
  auto grid = rc.make_grid();
  auto nl = rc.make_nonlinearity();
  EnergyModel model(grid, nl);

  std::vector<double> theta;
  if (rc.spectrum_weight == "alpha") {
    theta = model.alpha_nodes();
  } else if (rc.spectrum_weight == "eta") {
    theta = model.eta_nodes();
  } else if (rc.spectrum_weight == "eta-alpha") {
    theta.resize(model.eta_nodes().size());
    for (std::size_t i = 0; i < theta.size(); ++i)
      theta[i] = std::max(model.eta_nodes()[i] - model.alpha_nodes()[i], 0.0);
  } else {
    const Weight w = Weight::expression(rc.spectrum_weight);
    theta.resize(grid->num_nodes());
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = w(grid->node(i));
  }

  EigsOptions eo;
  eo.residual_tol = rc.eigs_residual_tol;
  const SpectrumResult sp = weighted_eigs(grid, std::move(theta), rc.spectrum_count, eo);
  Json sj = to_json(sp);
  Json files = Json::array();
  for (std::size_t i = 0; i < sp.pairs.size(); ++i) {
    const std::string name = csv_name("eigenfunction", i + 1);
    write_field_csv(sp.pairs[i].e, out / name);
    files.push(Json::str(name));
  }
  sj.set("eigenfunction_csv", std::move(files));
  oc.payload.set("spectrum", std::move(sj));
  oc.payload.set("weight", Json::str(rc.spectrum_weight));

  oc.summary = "spectrum: " + std::to_string(sp.pairs.size()) + " eigenvalue(s), " +
               std::to_string(sp.clusters.size()) + " distinct cluster(s)";
  return oc;
}

Outcome do_proptest(const RunConfig& rc) {
  Outcome oc;
  PropertyOptions po;
  po.seed = rc.seed;
  po.trials = rc.trials;
  po.threads = thread_cap();
  const std::vector<PropertyResult> results = run_properties(po);

  long total_failures = 0;
  std::string first_failing;
  Json arr = Json::array();
  for (const PropertyResult& r : results) {
    Json e = Json::object();
    e.set("name", Json::str(r.name));
    e.set("trials", Json::integer(r.trials));
    e.set("failures", Json::integer(r.failures));
    if (!r.first_failure.empty()) e.set("first_failure", Json::str(r.first_failure));
    arr.push(std::move(e));
    total_failures += r.failures;
    if (r.failures > 0 && first_failing.empty()) first_failing = r.name;
  }
  Json pj = Json::object();
  pj.set("suites", Json::integer(static_cast<std::int64_t>(results.size())));
  pj.set("total_failures", Json::integer(total_failures));
  pj.set("results", std::move(arr));
  oc.payload.set("properties", std::move(pj));

  if (total_failures > 0) {
    oc.exit_code = kExitHypothesisFail;
    oc.summary = "proptest: FAILED suite '" + first_failing + "' (" +
                 std::to_string(total_failures) + " failing trial(s) overall)";
  } else {
    oc.summary = "proptest: all " + std::to_string(results.size()) + " suites passed";
  }
  return oc;
}

}  // namespace

CliArgs parse_cli(const std::vector<std::string>& args) {
  CliArgs out;
  if (args.empty()) throw ConfigError("missing subcommand\n" + usage());
  out.subcommand = args[0];
  const bool known = out.subcommand == "check" || out.subcommand == "solve" ||
                     out.subcommand == "multi" || out.subcommand == "spectrum" ||
                     out.subcommand == "proptest";
  if (!known)
    throw ConfigError("unknown subcommand '" + out.subcommand + "'\n" + usage());

  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    auto need_value = [&]() -> const std::string& {
      if (i + 1 >= args.size())
        throw ConfigError("flag '" + a + "' needs a value");
      return args[++i];
    };
    if (a == "--config") {
      out.config_path = need_value();
    } else if (a == "--seed") {
      const std::string& v = need_value();
      errno = 0;
      char* end = nullptr;
      const unsigned long long s = std::strtoull(v.c_str(), &end, 0);
      if (errno != 0 || end == v.c_str() || *end != '\0')
        throw ConfigError("--seed expects an unsigned integer, got '" + v + "'");
      out.seed = static_cast<std::uint64_t>(s);
    } else if (a == "--out") {
      out.out_dir = need_value();
    } else if (a == "--quiet") {
      out.quiet = true;
    } else {
      throw ConfigError("unknown flag '" + a + "'\n" + usage());
    }
  }
  return out;
}

int thread_cap() {
  const char* env = std::getenv("NEHARI_THREADS");
  if (!env || !*env) return 1;
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (errno != 0 || end == env || *end != '\0' || v < 1 || v > 256)
    throw ConfigError("NEHARI_THREADS must be a positive integer, got '" +
                      std::string(env) + "'");
  return static_cast<int>(v);
}

std::string usage() {
  return "usage: nehari <check|solve|multi|spectrum|proptest> "
         "[--config PATH] [--seed N] [--out DIR] [--quiet]\n"
         "  check     audit the standing hypotheses and write a verdict report\n"
         "  solve     ground-state descent on the reduced functional\n"
         "  multi     multi-start search for distinct solution pairs\n"
         "  spectrum  weighted Dirichlet eigenvalues and eigenfunctions\n"
         "  proptest  randomized property suites over all modules\n"
         "exit codes: 0 success/holds, 1 hypothesis failure, 2 numeric failure,\n"
         "            3 inconclusive, 64 configuration error";
}

int run_cli(const std::vector<std::string>& args) {
  const auto t0 = std::chrono::steady_clock::now();
  CliArgs cli;
  ConfigFile file;
  RunConfig rc;
  try {
    cli = parse_cli(args);
    if (!cli.config_path.empty()) file = ConfigFile::parse_file(cli.config_path);
    if (cli.seed) file.set("sampling", "seed", std::to_string(*cli.seed));
    if (cli.out_dir) file.set("output", "directory", *cli.out_dir);
    rc = RunConfig::load(file);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  const std::string digest = file.digest();

  Outcome oc;
  try {
    const fs::path out(rc.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec)
      throw Error("cannot create output directory '" + rc.out_dir + "': " +
                  ec.message());

    if (cli.subcommand == "check")
      oc = do_check(rc);
    else if (cli.subcommand == "solve")
      oc = do_solve(rc, digest, out);
    else if (cli.subcommand == "multi")
      oc = do_multi(rc, digest, out);
    else if (cli.subcommand == "spectrum")
      oc = do_spectrum(rc, out);
    else
      oc = do_proptest(rc);

    Json root = Json::object();
    root.set("schema_version", Json::str(kSchemaVersion));
    root.set("subcommand", Json::str(cli.subcommand));
    root.set("config_digest", Json::str(digest));
    root.set("seed", Json::integer(static_cast<std::int64_t>(rc.seed)));
    root.set("domain", domain_json(rc));
    root.set("nonlinearity", kernel_json(rc));
    root.set("exit_code", Json::integer(oc.exit_code));
    root.set("payload", std::move(oc.payload));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    root.set("wall_time_seconds", Json::real(wall));
    write_text_file((out / "report.json").string(), root.dump());

    if (!cli.quiet) {
      std::cout << oc.summary << "\n";
      std::cout << "report: " << (out / "report.json").string() << "\n";
    }
    return oc.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumericFailure;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace nehari
