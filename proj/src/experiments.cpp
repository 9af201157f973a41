#include "eiv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace eiv {

namespace {

constexpr std::uint64_t data_stream_tag = 0x64617461ULL;

/// Runs body(k) for k in [0, count) on up to `workers` threads. The first
/// exception is rethrown after all workers finish.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double median(std::vector<double> v) {
  require(!v.empty(), "median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<double> group_values(const std::vector<ReplicateSummary>& rows, const std::string& name,
                                 double ReplicateSummary::*field) {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.scenario.name() == name) out.push_back(r.*field);
  }
  return out;
}

RunSpec run_spec(const ExperimentOptions& o) {
  RunSpec spec;
  spec.iterations = o.iterations;
  spec.burn_in = o.burn_in;
  spec.seed = o.seed;
  spec.replicates = o.replicates;
  spec.validate();
  return spec;
}

}  // namespace

unsigned worker_count() {
  if (const char* env = std::getenv("EIV_GIBBS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ReplicateSummary> run_replicates(const std::vector<Scenario>& scenarios, const ExperimentOptions& o) {
  const RunSpec spec = run_spec(o);
  const std::size_t reps = static_cast<std::size_t>(o.replicates);
  std::vector<ReplicateSummary> rows(scenarios.size() * reps);

  parallel_for(rows.size(), o.threads ? o.threads : worker_count(), [&](std::size_t k) {
    const std::size_t s = k / reps;
    const int r = static_cast<int>(k % reps);
    RngStream data_rng(replicate_seed(spec, r), stream_id(data_stream_tag, s));
    const auto data = simulate_dataset(scenarios[s], data_rng);
    const GeneralDensity g = build_general(data.config);
    const ChainOutput chain = run_chain(g, spec, o.init, r, to_string(data.config.variant));
    const Matrix beta = chain.columns_with_prefix("gamma.beta");
    const auto bm = batch_means(beta);
    const auto eig = se_eigen_extremes(bm.cov);
    const auto m = mess_detail(beta);

    ReplicateSummary& row = rows[k];
    row.scenario = scenarios[s];
    row.replicate = r;
    row.seed = chain.meta.seed;
    row.stored = static_cast<long>(beta.rows());
    row.d = beta.cols();
    row.mess = m.value;
    row.pseudo_determinant = m.pseudo_determinant;
    row.se_eig_min = eig.first;
    row.se_eig_max = eig.second;
  });
  return rows;
}

std::vector<ReplicateSummary> run_scaling_experiment(const ExperimentOptions& o) {
  return run_replicates({Scenario::scaling(1, 1), Scenario::scaling(2, 7), Scenario::scaling(3, 7)}, o);
}

std::vector<ReplicateSummary> run_misspec_experiment(const ExperimentOptions& o) {
  return run_replicates({Scenario::misspec(2.0), Scenario::misspec(10.0)}, o);
}

double median_mess(const std::vector<ReplicateSummary>& rows, const std::string& name) {
  return median(group_values(rows, name, &ReplicateSummary::mess));
}

double median_se_eig_max(const std::vector<ReplicateSummary>& rows, const std::string& name) {
  return median(group_values(rows, name, &ReplicateSummary::se_eig_max));
}

std::string format_replicate_summaries(const std::vector<ReplicateSummary>& rows) {
  std::string out = "scenario,m,p,df,replicate,seed,stored,d,mess,se_eig_min,se_eig_max,pseudo_determinant\n";
  for (const auto& r : rows) {
    out += "\"" + r.scenario.name() + "\"," + std::to_string(r.scenario.m) + "," + std::to_string(r.scenario.p) + "," +
           format_double(r.scenario.df) + "," + std::to_string(r.replicate) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.stored) + "," + std::to_string(r.d) + "," + format_double(r.mess) + "," +
           format_double(r.se_eig_min) + "," + format_double(r.se_eig_max) + "," +
           (r.pseudo_determinant ? "1" : "0") + "\n";
  }
  return out;
}

ModelConfig msigma_model(const fs::path& data_file) {
  DataSpec spec;
  spec.file = data_file;
  spec.y = {"log_mbh"};
  spec.x = {"log_sigma"};
  spec.intercept = true;
  spec.x_error.sd_column = "log_sigma_err";
  spec.y_error.sd_column = "log_mbh_err";
  Dataset d = load_dataset(spec);
  const Eigen::Index n = d.Y.rows();

  ModelConfig c;
  c.variant = Variant::classical_xy;
  c.Y = std::move(d.Y);
  c.X = std::move(d.X);
  c.Z = std::move(d.Z);
  c.V = std::move(d.V);
  c.U = std::move(d.U);
  // sigma^2 ~ inverse-gamma(1e-3, 1e-3) is W^{-1}(2e-3, 2e-3) in one dimension.
  c.a0 = 2e-3;
  c.B0 = Matrix::Constant(1, 1, 2e-3);
  c.j0 = Vector::Zero(2);
  c.J0 = 1e3 * Matrix::Identity(2, 2);
  c.k = Matrix::Zero(n, 1);
  c.K.assign(static_cast<std::size_t>(n), Matrix::Constant(1, 1, 1e3));
  return c;
}

std::string chain_sanity(const ChainOutput& chain) {
  const Matrix& D = chain.draws;
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    for (Eigen::Index j = 0; j < D.cols(); ++j) {
      if (!std::isfinite(D(i, j))) {
        return "non-finite value at row " + std::to_string(i + 1) + ", " + chain.labels[static_cast<std::size_t>(j)];
      }
    }
  }
  const Eigen::Index m = chain.meta.m;
  std::vector<Eigen::Index> cols;
  for (Eigen::Index l = 0; l < m; ++l) {
    for (Eigen::Index k = 0; k <= l; ++k) {
      const std::string name = "Sigma." + std::to_string(k + 1) + "." + std::to_string(l + 1);
      const auto it = std::find(chain.labels.begin(), chain.labels.end(), name);
      if (it == chain.labels.end()) return {};  // Sigma not stored; logdetSigma finiteness was checked
      cols.push_back(static_cast<Eigen::Index>(it - chain.labels.begin()));
    }
  }
  Matrix S(m, m);
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    std::size_t at = 0;
    for (Eigen::Index l = 0; l < m; ++l) {
      for (Eigen::Index k = 0; k <= l; ++k) S(k, l) = S(l, k) = D(i, cols[at++]);
    }
    if (Eigen::LLT<Matrix>(S).info() != Eigen::Success) {
      return "Sigma draw at row " + std::to_string(i + 1) + " is not positive definite";
    }
  }
  return {};
}

AstroResult run_astro_experiment(const fs::path& data_file, const ExperimentOptions& o) {
  const ModelConfig config = msigma_model(data_file);
  const GeneralDensity g = build_general(config);
  RunSpec spec = run_spec(o);
  spec.replicates = 1;
  spec.store.sigma = true;

  AstroResult out;
  out.chain = run_chain(g, spec, o.init, 0, to_string(config.variant));
  out.parameters = {"alpha", "beta", "sigma2"};
  out.traces.resize(out.chain.draws.rows(), 3);
  out.traces.col(0) = out.chain.draws.col(out.chain.column("gamma.theta.1.1"));
  out.traces.col(1) = out.chain.draws.col(out.chain.column("gamma.beta.1.1"));
  out.traces.col(2) = out.chain.draws.col(out.chain.column("Sigma.1.1"));
  out.report = diagnose(out.traces, out.parameters, 20);
  out.sanity_message = chain_sanity(out.chain);
  out.sane = out.sanity_message.empty();
  return out;
}

std::string format_astro_acf(const AstroResult& r) {
  std::string out = "lag";
  for (const auto& p : r.parameters) out += "," + p;
  out += "\n";
  for (Eigen::Index l = 0; l < r.report.acf.cols(); ++l) {
    out += std::to_string(l);
    for (Eigen::Index k = 0; k < r.report.acf.rows(); ++k) out += "," + format_double(r.report.acf(k, l));
    out += "\n";
  }
  return out;
}

std::string format_astro_summary(const AstroResult& r) {
  std::string out = "parameter,mean,mcse,ess\n";
  for (std::size_t k = 0; k < r.parameters.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out += r.parameters[k] + "," + format_double(r.report.mean(i)) + "," + format_double(r.report.mcse(i)) + "," +
           format_double(r.report.ess(i)) + "\n";
  }
  return out;
}

}  // namespace eiv
