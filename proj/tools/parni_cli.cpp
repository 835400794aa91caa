// parni: command-line front end.
//
//   parni run --config run.cfg [--sampler ads] [--iters 20000] [--out dir] ...
//   parni simulate --model weibull --n 500 --p 200 --seed 3 --out data.csv
//   parni enumerate --config run.cfg --out gold_dir
//   parni compare --gold gold/pip.csv runA runB ...
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include "parni.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Overrides {
  std::string config;
  std::vector<std::string> sets;
  std::string sampler, proposal, acceptance, out;
  std::optional<std::size_t> iters, chains, workers;
  std::optional<double> budget;
  std::optional<std::uint64_t> seed;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config,-c", o.config, "key=value configuration file");
  cmd->add_option("--set", o.sets, "extra key=value setting (repeatable)");
  cmd->add_option("--sampler", o.sampler, "parni or ads");
  cmd->add_option("--proposal", o.proposal, "adaptive-ala, ala, la or da");
  cmd->add_option("--acceptance", o.acceptance, "da, la or cpm");
  cmd->add_option("--iters", o.iters, "iterations per chain");
  cmd->add_option("--budget-seconds", o.budget, "wall-clock budget per chain");
  cmd->add_option("--chains", o.chains, "number of chains");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--out", o.out, "output directory");
}

parni::RunConfig resolve(const Overrides& o) {
  parni::RunConfig c;
  if (!o.config.empty()) c = parni::load_run_config(o.config);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw parni::ConfigError("--set expects key=value, got '" + s + "'");
    parni::apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  auto set = [&c](const char* k, const std::string& v) {
    if (!v.empty()) parni::apply_setting(c, k, v);
  };
  set("sampler", o.sampler);
  set("proposal", o.proposal);
  set("acceptance", o.acceptance);
  set("out", o.out);
  if (o.iters) set("iterations", std::to_string(*o.iters));
  if (o.chains) set("chains", std::to_string(*o.chains));
  if (o.workers) set("workers", std::to_string(*o.workers));
  if (o.seed) set("seed", std::to_string(*o.seed));
  if (o.budget) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *o.budget);
    set("budget_seconds", buf);
  }
  c.validate();
  return c;
}

int cmd_run(const Overrides& o) {
  const parni::RunConfig c = resolve(o);
  const parni::Dataset data = parni::load_dataset(c);
  std::optional<parni::Vector> gold;
  if (c.gold_path) gold = parni::read_pip_csv(*c.gold_path);
  const auto outputs = parni::run_chains(data, c.prior, c.chain, c.seed, c.chains, c.workers);
  const std::filesystem::path dir(c.out_dir);
  const auto s = parni::report(outputs, gold, dir, data.free_names, parni::to_string(c.chain.sampler));
  parni::write_run_metadata(c, outputs, dir / "run.txt");
  std::cout << "wrote " << dir.string() << " (" << outputs.size() << " chain(s), target "
            << outputs.front().target << ")\n";
  if (s.avg_mse) std::cout << "average MSE vs gold: " << *s.avg_mse << '\n';
  return 0;
}

int cmd_enumerate(const Overrides& o) {
  const parni::RunConfig c = resolve(o);
  const parni::Dataset data = parni::load_dataset(c);
  std::optional<double> shape;
  if (c.kind == parni::ModelKind::weibull) shape = c.chain.shape_init;
  const parni::ExactPosterior ex = parni::enumerate_exact(data, c.prior, shape);
  const std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "pip.csv");
  if (!out) throw parni::ConfigError("cannot write '" + (dir / "pip.csv").string() + "'");
  out << "covariate,mean\n";
  for (parni::Index j = 0; j < ex.pip.size(); ++j) {
    out << data.free_names[static_cast<std::size_t>(j)] << ',' << parni::detail::fmt(ex.pip[j]) << '\n';
  }
  std::cout << "enumerated " << ex.pmp.size() << " models";
  if (ex.failures > 0) std::cout << " (" << ex.failures << " failed)";
  std::cout << "; wrote " << (dir / "pip.csv").string() << '\n';
  return 0;
}

int cmd_simulate(const std::string& model, parni::SimConfig sim, const std::string& out) {
  const parni::Dataset d = parni::simulate(sim, parni::parse_model_kind(model));
  parni::write_dataset_csv(d, out);
  std::cout << "wrote " << out << " (n=" << d.n() << ", p=" << d.p() << ")\n";
  return 0;
}

int cmd_compare(const std::string& gold_path, const std::vector<std::string>& runs) {
  const parni::Vector gold = parni::read_pip_csv(gold_path);
  std::vector<double> mse;
  for (const auto& r : runs) {
    const parni::CsvTable t = parni::read_csv((std::filesystem::path(r) / "pip.csv").string());
    std::vector<parni::Vector> chains;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (t.header[c].rfind("chain_", 0) == 0) {
        chains.push_back(parni::detail::numeric_column(t, t.header[c], r));
      }
    }
    if (chains.empty()) chains.push_back(parni::read_pip_csv((std::filesystem::path(r) / "pip.csv").string()));
    mse.push_back(parni::average_mse(chains, gold));
  }
  std::cout << "run,avg_mse,relative_efficiency\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::cout << runs[i] << ',' << parni::detail::fmt(mse[i]) << ','
              << parni::detail::fmt(parni::relative_efficiency(mse.front(), mse[i])) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive MCMC for Bayesian variable selection"};
  app.require_subcommand(1);

  Overrides run_o;
  auto* run = app.add_subcommand("run", "run one or more chains");
  add_overrides(run, run_o);

  Overrides enum_o;
  auto* enumerate = app.add_subcommand("enumerate", "exact posterior over all 2^p models (p <= 20)");
  add_overrides(enumerate, enum_o);

  std::string sim_model = "logistic";
  std::string sim_out = "sim.csv";
  std::string censoring = "administrative";
  parni::SimConfig sim;
  auto* simulate = app.add_subcommand("simulate", "write a simulated data set");
  simulate->add_option("--model", sim_model, "logistic, cox or weibull");
  simulate->add_option("--n", sim.n, "rows");
  simulate->add_option("--p", sim.p, "free covariates");
  simulate->add_option("--rho", sim.ar_rho, "AR(1) correlation between adjacent covariates");
  simulate->add_option("--sigma", sim.sigma, "survival scale");
  simulate->add_option("--q", sim.q_shape, "generalised-gamma shape");
  simulate->add_option("--censoring", censoring, "none, administrative or uniform");
  simulate->add_option("--event-fraction", sim.event_fraction, "target fraction of events");
  simulate->add_flag("--intercept", sim.intercept, "add an intercept column");
  simulate->add_option("--seed", sim.seed, "seed");
  simulate->add_option("--out", sim_out, "output CSV");

  std::string gold_path;
  std::vector<std::string> runs;
  auto* compare = app.add_subcommand("compare", "average MSE and relative efficiency against gold PIPs");
  compare->add_option("--gold", gold_path, "pip.csv holding gold-standard PIPs")->required();
  compare->add_option("runs", runs, "run directories; the first is the baseline")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_o);
    if (*enumerate) return cmd_enumerate(enum_o);
    if (*simulate) {
      if (censoring == "none") {
        sim.censoring = parni::Censoring::none;
      } else if (censoring == "uniform") {
        sim.censoring = parni::Censoring::uniform;
      } else if (censoring == "administrative") {
        sim.censoring = parni::Censoring::administrative;
      } else {
        throw parni::ConfigError("unknown censoring rule '" + censoring + "'");
      }
      return cmd_simulate(sim_model, sim, sim_out);
    }
    if (*compare) return cmd_compare(gold_path, runs);
  } catch (const parni::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const parni::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const parni::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
