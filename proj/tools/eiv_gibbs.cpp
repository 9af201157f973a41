// eiv-gibbs: command-line front end for the error-in-variables Gibbs sampler.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "eiv/experiments.hpp"
#include "eiv/geweke.hpp"
#include "eiv/identities.hpp"
#include "eiv/io.hpp"
#include "eiv/sampler.hpp"
#include "eiv/simulate.hpp"

using namespace eiv;

namespace {

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<long> T;
  std::optional<long> burn_in;
  std::optional<long> thin;
  std::optional<int> replicates;
  std::optional<std::string> out;
  std::optional<std::string> store;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--seed", f.seed, "Base random seed (replicate r uses seed + r)");
  cmd->add_option("--T", f.T, "Total Gibbs sweeps, including burn-in");
  cmd->add_option("--burn-in", f.burn_in, "Sweeps discarded before storing");
  cmd->add_option("--thin", f.thin, "Store every thin-th sweep");
  cmd->add_option("--replicates", f.replicates, "Independent chains");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--store", f.store, "Stored coordinates: gamma, all, or a list from gamma,sigma,latent");
}

void emit_error(std::string_view kind, std::string_view message) {
  const json err = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << std::endl;
}

std::string replicate_name(int r) { return "chain_r" + std::to_string(r) + ".csv"; }

// ------------------------------------------------------------------ simulate

int cmd_simulate(const std::string& scenario_text, const RunFlags& f) {
  const Scenario scenario = Scenario::parse(scenario_text);
  const std::uint64_t seed = f.seed.value_or(1);
  const fs::path out = f.out.value_or("sim");
  RngStream rng(seed, stream_id(0x73696dULL, 0));
  const auto data = simulate_dataset(scenario, rng);
  const ModelConfig& c = data.config;

  CsvTable t;
  t.comments.push_back("simulated " + scenario.name() + " seed " + std::to_string(seed));
  for (Eigen::Index j = 0; j < c.m(); ++j) t.header.push_back("y." + std::to_string(j + 1));
  for (Eigen::Index j = 0; j < c.p(); ++j) t.header.push_back("x." + std::to_string(j + 1));
  for (Eigen::Index j = 0; j < c.p(); ++j) t.header.push_back("x_evar." + std::to_string(j + 1));
  t.data.resize(c.n(), c.m() + 2 * c.p());
  t.data << c.Y, c.X, Matrix::Zero(c.n(), c.p());
  for (Eigen::Index i = 0; i < c.n(); ++i) {
    t.data.row(i).tail(c.p()) = c.V[static_cast<std::size_t>(i)].diagonal().transpose();
  }
  write_text_atomic(out / "data.csv", format_csv(t));

  const json truth = {{"scenario", scenario.name()},
                      {"seed", seed},
                      {"Theta", matrix_to_json(data.truth.Theta)},
                      {"B", matrix_to_json(data.truth.B)},
                      {"Sigma", matrix_to_json(data.truth.Sigma)},
                      {"A", matrix_to_json(data.truth.A)}};
  write_json(out / "truth.json", truth);

  json ycols = json::array(), xcols = json::array();
  for (Eigen::Index j = 0; j < c.m(); ++j) ycols.push_back("y." + std::to_string(j + 1));
  for (Eigen::Index j = 0; j < c.p(); ++j) xcols.push_back("x." + std::to_string(j + 1));
  const json config = {
      {"model",
       {{"variant", std::string(to_string(c.variant))},
        {"data", {{"file", "data.csv"}, {"y", ycols}, {"x", xcols}, {"intercept", true}, {"x_error", "x_evar"}}},
        {"prior", {{"a0", c.a0}, {"B0", matrix_to_json(c.B0)}, {"j0", 0.0}, {"J0", c.J0(0, 0)}}}}},
      {"run",
       {{"T", f.T.value_or(100000)},
        {"burn_in", f.burn_in.value_or(10000)},
        {"thin", f.thin.value_or(1)},
        {"seed", seed},
        {"replicates", f.replicates.value_or(1)},
        {"store", f.store.value_or("gamma")}}},
      {"diagnostics", {{"max_lag", 20}, {"prefix", "gamma.beta"}}},
      {"output", {{"dir", "chains"}}}};
  write_json(out / "config.json", config);
  std::cout << "wrote " << (out / "data.csv").string() << ", truth.json and config.json\n";
  return 0;
}

// ------------------------------------------------------------------ run

int cmd_run(const std::string& config_path, const RunFlags& f) {
  json source = read_json(config_path);
  if (source.is_object() && source.contains("run") && source["run"].is_object()) {
    auto& run = source["run"];
    if (f.seed) run["seed"] = *f.seed;
    if (f.T) run["T"] = *f.T;
    if (f.burn_in) run["burn_in"] = *f.burn_in;
    if (f.thin) run["thin"] = *f.thin;
    if (f.replicates) run["replicates"] = *f.replicates;
    if (f.store) run["store"] = *f.store;
  }
  const fs::path base = fs::path(config_path).has_parent_path() ? fs::path(config_path).parent_path() : ".";
  ExperimentConfig cfg = parse_config(source, base);
  if (f.out) cfg.output_dir = *f.out;

  const GeneralDensity g = build_general(cfg.model);
  json report = {{"config", source}, {"replicates", json::array()}};
  for (int r = 0; r < cfg.run.replicates; ++r) {
    const ChainOutput chain = run_chain(g, cfg.run, cfg.init, r, to_string(cfg.model.variant));
    const json provenance = {{"config", source}, {"seed", chain.meta.seed}, {"replicate", r}};
    write_chain(cfg.output_dir / replicate_name(r), chain, provenance);

    Matrix selected = chain.columns_with_prefix(cfg.diagnostics_prefix);
    std::vector<std::string> labels;
    for (const auto& l : chain.labels) {
      if (l.rfind(cfg.diagnostics_prefix, 0) == 0) labels.push_back(l);
    }
    json entry = {{"chain", replicate_name(r)}, {"meta", to_json(chain.meta)}};
    if (selected.cols() > 0 && selected.rows() > cfg.max_lag && selected.rows() >= 4) {
      const auto diag = diagnose(selected, labels, cfg.max_lag);
      if (diag.mess_pseudo_determinant) {
        std::cerr << "warning: replicate " << r << ": batch-means matrix is near singular; mESS uses a pseudo-determinant\n";
      }
      entry["diagnostics"] = to_json(diag);
    } else {
      entry["diagnostics"] = nullptr;
    }
    report["replicates"].push_back(std::move(entry));
  }
  write_json(cfg.output_dir / "report.json", report);
  std::cout << "wrote " << cfg.run.replicates << " chain(s) and report.json to " << cfg.output_dir.string() << "\n";
  return 0;
}

// ------------------------------------------------------------------ diagnose

int cmd_diagnose(const std::string& chain_path, const std::string& prefix, long max_lag,
                 const std::optional<std::string>& out) {
  const ChainFile file = read_chain(chain_path);
  std::vector<std::string> labels;
  std::vector<Eigen::Index> cols;
  for (std::size_t k = 0; k < file.chain.labels.size(); ++k) {
    if (file.chain.labels[k].rfind(prefix, 0) == 0) {
      labels.push_back(file.chain.labels[k]);
      cols.push_back(static_cast<Eigen::Index>(k));
    }
  }
  if (cols.empty()) fail(ErrorKind::data, chain_path + ": no coordinates start with '" + prefix + "'");
  Matrix selected(file.chain.draws.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) selected.col(static_cast<Eigen::Index>(k)) = file.chain.draws.col(cols[k]);

  const auto report = diagnose(selected, labels, max_lag);
  json j = to_json(report);
  j["source"] = chain_path;
  if (!file.provenance.is_null()) j["provenance"] = file.provenance;
  if (report.mess_pseudo_determinant) std::cerr << "warning: batch-means matrix is near singular; mESS uses a pseudo-determinant\n";
  if (out) {
    write_json(*out, j);
    std::cout << "mess " << format_double(report.mess) << " over T = " << report.T << "; wrote " << *out << "\n";
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------ validate

int cmd_validate(const std::string& config_path, const RunFlags& f, int identity_instances, int moment_draws) {
  const ExperimentConfig cfg = load_config(config_path);
  const std::uint64_t seed = f.seed.value_or(cfg.run.seed);
  RngStream rng(seed, stream_id(0x76616cULL, 0));

  GewekeOptions gopt;
  gopt.iterations = f.T.value_or(10000);
  const auto geweke = geweke_validate(cfg.model, gopt, rng);

  IdentityOptions iopt;
  iopt.instances = identity_instances;
  iopt.moment_draws = moment_draws;
  RngStream id_rng(seed, stream_id(0x6964ULL, 0));
  const auto identities = proof_identities_check(iopt, id_rng);

  const bool geweke_ok = geweke.diverged_at == 0 && geweke.fraction_within(4.0) >= 0.95;
  const json j = {{"seed", seed},
                  {"geweke", to_json(geweke)},
                  {"geweke_passed", geweke_ok},
                  {"identities", to_json(identities)}};
  const fs::path out = fs::path(f.out.value_or(cfg.output_dir.string())) / "validate.json";
  write_json(out, j);
  std::cout << "geweke: " << format_double(100.0 * geweke.fraction_within(4.0)) << "% of |z| <= 4, max |z| "
            << format_double(geweke.max_abs_z()) << (geweke_ok ? " PASS" : " FAIL") << "\n";
  for (const auto& c : identities.checks) {
    std::cout << c.name << ": " << (c.passed ? "PASS" : "FAIL") << " (" << (c.is_bound ? "min slack " : "max error ")
              << format_double(c.worst) << ")\n";
  }
  std::cout << "wrote " << out.string() << "\n";
  return geweke_ok && identities.all_passed() ? 0 : 1;
}

// ------------------------------------------------------------------ experiment

ExperimentOptions experiment_options(const RunFlags& f, long default_burn_in) {
  ExperimentOptions o;
  o.iterations = f.T.value_or(100000);
  o.burn_in = f.burn_in.value_or(std::min(default_burn_in, o.iterations / 10));
  o.replicates = f.replicates.value_or(5);
  o.seed = f.seed.value_or(1);
  return o;
}

int cmd_experiment(const std::string& which, const RunFlags& f, const std::string& data_file) {
  const fs::path out = f.out.value_or("results");
  if (which == "fig1" || which == "fig2") {
    const auto o = experiment_options(f, 10000);
    const auto rows = which == "fig1" ? run_scaling_experiment(o) : run_misspec_experiment(o);
    const fs::path file = out / (which + "_replicates.csv");
    write_text_atomic(file, format_replicate_summaries(rows));
    std::cout << "wrote " << rows.size() << " replicate rows to " << file.string() << "\n";
    return 0;
  }
  if (which == "fig3") {
    auto o = experiment_options(f, 0);
    o.replicates = 1;
    const fs::path data = data_file.empty() ? fs::path(EIV_SOURCE_DIR) / "data" / "msigma.csv" : fs::path(data_file);
    const auto r = run_astro_experiment(data, o);
    write_text_atomic(out / "fig3_acf.csv", format_astro_acf(r));
    write_text_atomic(out / "fig3_summary.csv", format_astro_summary(r));
    json report = to_json(r.report);
    report["sane"] = r.sane;
    if (!r.sane) report["sanity_message"] = r.sanity_message;
    report["meta"] = to_json(r.chain.meta);
    report["data"] = data.string();
    write_json(out / "fig3_report.json", report);
    std::cout << "wrote fig3_acf.csv, fig3_summary.csv and fig3_report.json to " << out.string() << "\n";
    if (!r.sane) {
      fail(ErrorKind::data, "chain failed the sanity check: " + r.sanity_message);
    }
    return 0;
  }
  fail(ErrorKind::config, "unknown experiment '" + which + "' (expected fig1, fig2 or fig3)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs sampler for Bayesian error-in-variables regression"};
  app.require_subcommand(1);

  RunFlags sim_flags, run_flags, val_flags, exp_flags;
  std::string scenario, config_path, chain_path, experiment_name, data_file, prefix;
  std::optional<std::string> diag_out;
  long max_lag = 20;
  int identity_instances = 100, moment_draws = 100000;

  auto* sim = app.add_subcommand("simulate", "Write a synthetic data set, its ground truth and a run config");
  sim->add_option("scenario", scenario, "scaling:M,P or misspec:DF")->required();
  add_run_flags(sim, sim_flags);

  auto* run = app.add_subcommand("run", "Run the sampler from a JSON config; writes chains and report.json");
  run->add_option("config", config_path, "Config file")->required();
  add_run_flags(run, run_flags);

  auto* diag = app.add_subcommand("diagnose", "Batch means, mESS, MCSE and autocorrelations of a chain file");
  diag->add_option("chain", chain_path, "Chain CSV")->required();
  diag->add_option("--prefix", prefix, "Only coordinates whose label starts with this");
  diag->add_option("--max-lag", max_lag, "Largest autocorrelation lag")->check(CLI::NonNegativeNumber);
  diag->add_option("--out", diag_out, "Report path (default: stdout)");

  auto* val = app.add_subcommand("validate", "Joint-distribution test of the config's model and the identity suite");
  val->add_option("config", config_path, "Config file")->required();
  add_run_flags(val, val_flags);
  val->add_option("--identity-instances", identity_instances, "Random instances per identity");
  val->add_option("--moment-draws", moment_draws, "Monte Carlo draws per moment bound");

  auto* exp = app.add_subcommand("experiment", "Run a full experiment: fig1 (scaling), fig2 (misspecification), fig3 (M-sigma)");
  exp->add_option("name", experiment_name, "fig1, fig2 or fig3")->required();
  add_run_flags(exp, exp_flags);
  exp->add_option("--data", data_file, "Data file for fig3 (default: the shipped data/msigma.csv)");

  app.add_subcommand("schema", "Print the JSON schema of run configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(scenario, sim_flags);
    if (*run) return cmd_run(config_path, run_flags);
    if (*diag) return cmd_diagnose(chain_path, prefix, max_lag, diag_out);
    if (*val) return cmd_validate(config_path, val_flags, identity_instances, moment_draws);
    if (*exp) return cmd_experiment(experiment_name, exp_flags, data_file);
    std::cout << config_schema().dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    emit_error(to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
  }
  return 2;
}
