#include "irsce/experiments.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace irsce {

using nlohmann::json;

std::string algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::omp: return "omp";
    case Algorithm::gamp: return "gamp";
    case Algorithm::oracle_ls: return "oracle_ls";
    case Algorithm::conventional_ls: return "conventional_ls";
  }
  throw std::logic_error("unknown algorithm");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "omp") return Algorithm::omp;
  if (name == "gamp") return Algorithm::gamp;
  if (name == "oracle_ls") return Algorithm::oracle_ls;
  if (name == "conventional_ls") return Algorithm::conventional_ls;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

void validate_config(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (config.algorithms.empty()) throw std::invalid_argument("no algorithms selected");
  for (std::size_t i = 0; i < config.algorithms.size(); ++i)
    for (std::size_t j = i + 1; j < config.algorithms.size(); ++j)
      if (config.algorithms[i] == config.algorithms[j])
        throw std::invalid_argument("duplicate algorithm in config");
  if (config.axis_name != "T" && config.axis_name != "snr_db")
    throw std::invalid_argument("axis must be 'T' or 'snr_db'");
  if (config.axis_values.empty()) throw std::invalid_argument("empty sweep axis");
  if (config.channel.l_paths < 1 || config.channel.lprime_paths < 1)
    throw std::invalid_argument("path counts must be >= 1");
  if (config.channel.pathloss_g <= 0.0 || config.channel.pathloss_hr <= 0.0)
    throw std::invalid_argument("path losses must be positive");

  const bool has_ls = std::find(config.algorithms.begin(), config.algorithms.end(),
                                Algorithm::conventional_ls) != config.algorithms.end();
  const long nm = static_cast<long>(config.ula.n_antennas) * config.upa.elements();
  if (config.axis_name == "T") {
    for (double t : config.axis_values) {
      if (t < 1.0 || std::abs(t - std::round(t)) > 1e-9)
        throw std::invalid_argument("T axis values must be positive integers");
      if (has_ls && t < static_cast<double>(nm))
        throw std::invalid_argument(
            "conventional_ls requires every swept T >= N*M (overdetermined system)");
    }
  } else {
    if (config.noise_free)
      throw std::invalid_argument("noise_free is incompatible with an SNR sweep");
    if (config.fixed_t < 1) throw std::invalid_argument("fixed T must be >= 1");
    const int t_ls = config.fixed_t_conventional_ls > 0 ? config.fixed_t_conventional_ls
                                                        : config.fixed_t;
    if (has_ls && t_ls < nm)
      throw std::invalid_argument("conventional_ls requires its fixed T >= N*M");
  }
}

namespace {

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
  }
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  ExperimentConfig cfg = preset_paper();
  cfg.axis_values.clear();
  cfg.algorithms.clear();

  require_keys(j, "config",
               {"arrays", "grid", "channel", "sweep", "algorithms", "trials",
                "master_seed", "timing", "operator_mode", "solvers", "output"});

  if (j.contains("arrays")) {
    const json& a = j.at("arrays");
    require_keys(a, "arrays", {"bs_antennas", "bs_spacing", "irs_x", "irs_y"});
    if (a.contains("bs_antennas")) cfg.ula.n_antennas = a.at("bs_antennas").get<int>();
    if (a.contains("bs_spacing")) cfg.ula.spacing = a.at("bs_spacing").get<double>();
    if (a.contains("irs_x")) cfg.upa.m_x = a.at("irs_x").get<int>();
    if (a.contains("irs_y")) cfg.upa.m_y = a.at("irs_y").get<int>();
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    require_keys(g, "grid", {"tx", "irs_x", "irs_y"});
    if (g.contains("tx")) cfg.grid.n_grid_tx = g.at("tx").get<int>();
    if (g.contains("irs_x")) cfg.grid.m_grid_x = g.at("irs_x").get<int>();
    if (g.contains("irs_y")) cfg.grid.m_grid_y = g.at("irs_y").get<int>();
  }
  if (j.contains("channel")) {
    const json& c = j.at("channel");
    require_keys(c, "channel",
                 {"rician_k_db", "paths_bs_irs", "paths_irs_user", "pathloss_bs_irs",
                  "pathloss_irs_user", "on_grid"});
    if (c.contains("rician_k_db")) cfg.channel.rician_k_db = c.at("rician_k_db").get<double>();
    if (c.contains("paths_bs_irs")) cfg.channel.l_paths = c.at("paths_bs_irs").get<int>();
    if (c.contains("paths_irs_user"))
      cfg.channel.lprime_paths = c.at("paths_irs_user").get<int>();
    if (c.contains("pathloss_bs_irs"))
      cfg.channel.pathloss_g = c.at("pathloss_bs_irs").get<double>();
    if (c.contains("pathloss_irs_user"))
      cfg.channel.pathloss_hr = c.at("pathloss_irs_user").get<double>();
    if (c.contains("on_grid")) cfg.on_grid = c.at("on_grid").get<bool>();
  }

  const json& s = j.at("sweep");
  require_keys(s, "sweep", {"axis", "values", "snr_db", "t", "t_conventional_ls"});
  cfg.axis_name = s.at("axis").get<std::string>();
  for (const json& v : s.at("values")) cfg.axis_values.push_back(v.get<double>());
  if (s.contains("snr_db")) {
    if (s.at("snr_db").is_null())
      cfg.noise_free = true;
    else
      cfg.fixed_snr_db = s.at("snr_db").get<double>();
  }
  if (s.contains("t")) cfg.fixed_t = s.at("t").get<int>();
  if (s.contains("t_conventional_ls"))
    cfg.fixed_t_conventional_ls = s.at("t_conventional_ls").get<int>();

  for (const json& a : j.at("algorithms"))
    cfg.algorithms.push_back(algorithm_from_name(a.get<std::string>()));
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("timing")) cfg.timing = j.at("timing").get<bool>();
  if (j.contains("operator_mode")) {
    const std::string mode = j.at("operator_mode").get<std::string>();
    if (mode == "dense")
      cfg.operator_mode = OperatorMode::dense;
    else if (mode == "factored")
      cfg.operator_mode = OperatorMode::factored;
    else
      throw std::invalid_argument("operator_mode must be 'dense' or 'factored'");
  }
  if (j.contains("solvers")) {
    const json& so = j.at("solvers");
    require_keys(so, "solvers", {"omp", "gamp", "oracle", "beamforming"});
    if (so.contains("omp")) {
      require_keys(so.at("omp"), "solvers.omp", {"max_support"});
      if (so.at("omp").contains("max_support"))
        cfg.solvers.omp_max_support = so.at("omp").at("max_support").get<int>();
    }
    if (so.contains("gamp")) {
      const json& g = so.at("gamp");
      require_keys(g, "solvers.gamp",
                   {"max_iters", "tol", "damping", "init_sparsity", "init_noise_fraction",
                    "max_restarts"});
      if (g.contains("max_iters")) cfg.solvers.gamp.max_iters = g.at("max_iters").get<int>();
      if (g.contains("tol")) cfg.solvers.gamp.tol = g.at("tol").get<double>();
      if (g.contains("damping")) cfg.solvers.gamp.damping = g.at("damping").get<double>();
      if (g.contains("init_sparsity"))
        cfg.solvers.gamp.init_sparsity = g.at("init_sparsity").get<double>();
      if (g.contains("init_noise_fraction"))
        cfg.solvers.gamp.init_noise_fraction = g.at("init_noise_fraction").get<double>();
      if (g.contains("max_restarts"))
        cfg.solvers.gamp.max_restarts = g.at("max_restarts").get<int>();
    }
    if (so.contains("oracle")) {
      require_keys(so.at("oracle"), "solvers.oracle", {"max_support"});
      if (so.at("oracle").contains("max_support"))
        cfg.solvers.oracle_max_support = so.at("oracle").at("max_support").get<int>();
    }
    if (so.contains("beamforming")) {
      const json& b = so.at("beamforming");
      require_keys(b, "solvers.beamforming", {"restarts", "max_iters"});
      if (b.contains("restarts"))
        cfg.solvers.beamforming.restarts = b.at("restarts").get<int>();
      if (b.contains("max_iters"))
        cfg.solvers.beamforming.max_iters = b.at("max_iters").get<int>();
    }
  }
  if (j.contains("output")) cfg.output_path = j.at("output").get<std::string>();

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

ExperimentConfig preset_paper() {
  ExperimentConfig cfg;
  cfg.ula = UlaSpec{16, kDefaultSpacing};
  cfg.upa = UpaSpec{8, 8};
  cfg.grid = GridSpec{64, 32, 32};
  cfg.channel = ChannelStatistics{13.2, 3, 3, 1.0, 1.0};
  cfg.axis_name = "T";
  cfg.axis_values = {110};
  cfg.fixed_snr_db = 10.0;
  cfg.algorithms = {Algorithm::omp, Algorithm::gamp, Algorithm::oracle_ls};
  cfg.trials = 100;
  cfg.master_seed = 1;
  return cfg;
}

ExperimentConfig preset_sweep_t() {
  ExperimentConfig cfg = preset_paper();
  cfg.axis_values.clear();
  for (int t = 20; t <= 160; t += 10) cfg.axis_values.push_back(t);
  return cfg;
}

ExperimentConfig preset_sweep_snr() {
  ExperimentConfig cfg = preset_paper();
  cfg.axis_name = "snr_db";
  cfg.axis_values = {-10, -5, 0, 5, 10, 15, 20};
  cfg.fixed_t = 110;
  cfg.fixed_t_conventional_ls = 1524;
  cfg.algorithms = {Algorithm::omp, Algorithm::gamp, Algorithm::oracle_ls,
                    Algorithm::conventional_ls};
  return cfg;
}

ExperimentContext make_context(const ExperimentConfig& config) {
  ExperimentContext ctx;
  ctx.dicts = build_dictionaries(config.ula, config.upa, config.grid);
  ctx.rep = build_cascade_representation(ctx.dicts);
  return ctx;
}

std::uint64_t trial_seed(std::uint64_t master_seed, double axis_value, Algorithm alg,
                         int trial_index) {
  return seed_mix({master_seed, std::bit_cast<std::uint64_t>(axis_value),
                   fnv1a(algorithm_name(alg)), static_cast<std::uint64_t>(trial_index)});
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Training matrix for the unstructured estimator: rows w(t)^T kron v(t)^H
// with w and v cycling through the columns of the N- and M-point DFTs, so
// rows are mutually orthogonal within each full pass over the N*M index
// pairs.
Eigen::MatrixXcd ls_training_matrix(int t_pilots, int n, int m) {
  Eigen::MatrixXcd w_v(t_pilots, static_cast<Eigen::Index>(n) * m);
  const double w_scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int t = 0; t < t_pilots; ++t) {
    const long c = t % (static_cast<long>(n) * m);
    const int jf = static_cast<int>(c / m);
    const int if_ = static_cast<int>(c % m);
    for (int jj = 0; jj < n; ++jj) {
      const double wp = kTwoPi * jj * jf / n;
      const std::complex<double> wj = w_scale * std::complex<double>(std::cos(wp), std::sin(wp));
      for (int ii = 0; ii < m; ++ii) {
        const double vp = kTwoPi * ii * if_ / m;
        w_v(t, static_cast<Eigen::Index>(jj) * m + ii) =
            wj * std::complex<double>(std::cos(vp), -std::sin(vp));
      }
    }
  }
  return w_v;
}

double snr_to_noise_std(double signal_energy_per_sample, double snr_db) {
  return std::sqrt(signal_energy_per_sample / std::pow(10.0, snr_db / 10.0));
}

}  // namespace

MetricsRecord run_trial(const ExperimentConfig& config, double axis_value, Algorithm alg,
                        int trial_index) {
  return run_trial(make_context(config), config, axis_value, alg, trial_index);
}

MetricsRecord run_trial(const ExperimentContext& ctx, const ExperimentConfig& config,
                        double axis_value, Algorithm alg, int trial_index) {
  MetricsRecord rec;
  rec.axis_name = config.axis_name;
  rec.axis_value = axis_value;
  rec.algorithm = algorithm_name(alg);
  rec.trial = trial_index;
  rec.seed = trial_seed(config.master_seed, axis_value, alg, trial_index);

  int t_pilots;
  double snr_db;
  if (config.axis_name == "T") {
    t_pilots = static_cast<int>(std::llround(axis_value));
    snr_db = config.fixed_snr_db;
  } else {
    snr_db = axis_value;
    t_pilots = (alg == Algorithm::conventional_ls && config.fixed_t_conventional_ls > 0)
                   ? config.fixed_t_conventional_ls
                   : config.fixed_t;
  }

  Rng rng(rec.seed);
  const ChannelRealization channel =
      config.on_grid
          ? sample_channel_on_grid(rng, config.channel, config.ula, config.upa, config.grid)
          : sample_channel(rng, config.channel, config.ula, config.upa);

  const auto t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXcd h_hat;
  if (alg == Algorithm::conventional_ls) {
    const int n = config.ula.n_antennas;
    const int m = config.upa.elements();
    const Eigen::MatrixXcd w_v = ls_training_matrix(t_pilots, n, m);
    const Eigen::Map<const Eigen::VectorXcd> h_vec(channel.h_cascade.data(),
                                                   channel.h_cascade.size());
    Eigen::VectorXcd y = w_v * h_vec;
    if (!config.noise_free) {
      const double sigma = snr_to_noise_std(y.squaredNorm() / t_pilots, snr_db);
      for (Eigen::Index t = 0; t < y.size(); ++t) y(t) += sigma * rng.cgaussian();
    }
    const Eigen::VectorXcd h_ls = conventional_ls(w_v, y);
    h_hat = Eigen::Map<const Eigen::MatrixXcd>(h_ls.data(), m, n);
    rec.iterations = 1;
    rec.converged = true;
  } else {
    SensingProblem prob = assemble_problem(channel, t_pilots, rng, 0.0, ctx.dicts,
                                           ctx.rep.d_u, config.operator_mode);
    if (!config.noise_free) {
      const double sigma = snr_to_noise_std(prob.y.squaredNorm() / t_pilots, snr_db);
      prob.noise_std = sigma;
      for (Eigen::Index t = 0; t < prob.y.size(); ++t)
        prob.y(t) += sigma * rng.cgaussian();
    }

    SparseEstimate est;
    switch (alg) {
      case Algorithm::omp: {
        const double rel_tol =
            prob.noise_std > 0.0
                ? 1.1 * std::sqrt(static_cast<double>(t_pilots)) * prob.noise_std /
                      prob.y.norm()
                : 1e-6;
        est = omp(*prob.phi, prob.y, config.solvers.omp_max_support, rel_tol);
        break;
      }
      case Algorithm::gamp:
        est = gamp_em_bg(*prob.phi, prob.y, config.solvers.gamp);
        break;
      case Algorithm::oracle_ls: {
        const int k = std::min(config.channel.l_paths * config.channel.lprime_paths,
                               config.solvers.oracle_max_support);
        const auto support =
            oracle_support_from_truth(channel.h_cascade, ctx.rep.d_u, ctx.dicts, k);
        est = oracle_ls(*prob.phi, prob.y, support);
        break;
      }
      default:
        throw std::logic_error("unhandled algorithm");
    }
    rec.iterations = est.iterations;
    rec.converged = est.converged;
    const Eigen::Map<const Eigen::MatrixXcd> lambda_hat(est.x_hat.data(),
                                                        config.grid.m_grid(),
                                                        config.grid.n_grid_tx);
    h_hat = reconstruct_h(lambda_hat, ctx.rep.d_u, ctx.dicts);
  }
  const auto t1 = std::chrono::steady_clock::now();
  if (config.timing)
    rec.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

  rec.nmse = nmse(h_hat, channel.h_cascade);
  PhaseOptConfig bf = config.solvers.beamforming;
  bf.seed = seed_mix({rec.seed, fnv1a("beamforming")});
  rec.arspr = arspr(h_hat, channel.h_cascade, bf);
  return rec;
}

std::string csv_header() {
  return "axis_name,axis_value,algorithm,trial,seed,nmse,arspr,iterations,converged,"
         "runtime_ms";
}

std::string csv_row(const MetricsRecord& rec) {
  char buf[320];
  std::snprintf(buf, sizeof buf, "%s,%.17g,%s,%d,%llu,%.17g,%.17g,%d,%d,%.3f",
                rec.axis_name.c_str(), rec.axis_value, rec.algorithm.c_str(), rec.trial,
                static_cast<unsigned long long>(rec.seed), rec.nmse, rec.arspr,
                rec.iterations, rec.converged ? 1 : 0, rec.runtime_ms);
  return buf;
}

namespace {

std::vector<CellAggregate> compute_aggregates(const ExperimentConfig& config,
                                              const std::vector<MetricsRecord>& rows) {
  std::vector<CellAggregate> cells;
  std::size_t idx = 0;
  for (double axis_value : config.axis_values) {
    for (Algorithm alg : config.algorithms) {
      CellAggregate cell;
      cell.axis_value = axis_value;
      cell.algorithm = algorithm_name(alg);
      cell.trials = config.trials;
      double sum_n = 0.0, sum_a = 0.0, sum_r = 0.0;
      for (int t = 0; t < config.trials; ++t) {
        const MetricsRecord& r = rows[idx + t];
        sum_n += r.nmse;
        sum_a += r.arspr;
        sum_r += r.runtime_ms;
      }
      cell.mean_nmse = sum_n / config.trials;
      cell.mean_arspr = sum_a / config.trials;
      cell.mean_runtime_ms = sum_r / config.trials;
      if (config.trials > 1) {
        double var_n = 0.0, var_a = 0.0;
        for (int t = 0; t < config.trials; ++t) {
          const MetricsRecord& r = rows[idx + t];
          var_n += (r.nmse - cell.mean_nmse) * (r.nmse - cell.mean_nmse);
          var_a += (r.arspr - cell.mean_arspr) * (r.arspr - cell.mean_arspr);
        }
        cell.se_nmse = std::sqrt(var_n / (config.trials - 1)) / std::sqrt(config.trials);
        cell.se_arspr = std::sqrt(var_a / (config.trials - 1)) / std::sqrt(config.trials);
      }
      cells.push_back(cell);
      idx += config.trials;
    }
  }
  return cells;
}

}  // namespace

std::string aggregates_path(const std::string& csv_path) {
  if (csv_path.size() > 4 && csv_path.substr(csv_path.size() - 4) == ".csv")
    return csv_path.substr(0, csv_path.size() - 4) + ".agg.json";
  return csv_path + ".agg.json";
}

void write_aggregates_json(const SweepResult& result, const std::string& axis_name,
                           const std::string& path) {
  json out;
  out["axis_name"] = axis_name;
  out["cells"] = json::array();
  for (const CellAggregate& c : result.aggregates) {
    json cell;
    cell["axis_value"] = c.axis_value;
    cell["algorithm"] = c.algorithm;
    cell["trials"] = c.trials;
    cell["mean_nmse"] = c.mean_nmse;
    cell["se_nmse"] = c.se_nmse;
    cell["mean_arspr"] = c.mean_arspr;
    cell["se_arspr"] = c.se_arspr;
    cell["mean_runtime_ms"] = c.mean_runtime_ms;
    out["cells"].push_back(cell);
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << out.dump(2) << '\n';
}

SweepResult run_sweep(const ExperimentConfig& config, int workers) {
  validate_config(config);
  const ExperimentContext ctx = make_context(config);

  struct Task {
    double axis_value;
    Algorithm alg;
    int trial;
  };
  std::vector<Task> tasks;
  for (double axis_value : config.axis_values)
    for (Algorithm alg : config.algorithms)
      for (int trial = 0; trial < config.trials; ++trial)
        tasks.push_back({axis_value, alg, trial});

  SweepResult result;
  result.rows.resize(tasks.size());

  std::ofstream csv;
  if (!config.output_path.empty()) {
    csv.open(config.output_path);
    if (!csv)
      throw std::runtime_error("cannot open '" + config.output_path + "' for writing");
    csv << csv_header() << '\n';
    csv.flush();
  }

  std::unique_ptr<std::atomic<bool>[]> done(new std::atomic<bool>[tasks.size()]);
  for (std::size_t i = 0; i < tasks.size(); ++i) done[i].store(false);
  std::size_t flushed = 0;
  auto flush_prefix = [&] {
    bool wrote = false;
    while (flushed < tasks.size() && done[flushed].load(std::memory_order_acquire)) {
      if (csv.is_open()) {
        csv << csv_row(result.rows[flushed]) << '\n';
        wrote = true;
      }
      ++flushed;
    }
    if (wrote) csv.flush();
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      result.rows[i] =
          run_trial(ctx, config, tasks[i].axis_value, tasks[i].alg, tasks[i].trial);
      done[i].store(true, std::memory_order_release);
      flush_prefix();
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto work = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        try {
          result.rows[i] =
              run_trial(ctx, config, tasks[i].axis_value, tasks[i].alg, tasks[i].trial);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
        done[i].store(true, std::memory_order_release);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    while (flushed < tasks.size()) {
      flush_prefix();
      if (flushed < tasks.size())
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    for (std::thread& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  result.aggregates = compute_aggregates(config, result.rows);
  if (!config.output_path.empty())
    write_aggregates_json(result, config.axis_name, aggregates_path(config.output_path));
  return result;
}

// ---------------------------------------------------------------------------
// verification checklist
// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXcd materialize_cascade_dictionary(const Eigen::MatrixXcd& f_p) {
  const Eigen::Index m = f_p.rows();
  const Eigen::Index mg = f_p.cols();
  Eigen::MatrixXcd full(m, mg * mg);
  for (Eigen::Index p = 0; p < mg; ++p)
    for (Eigen::Index q = 0; q < mg; ++q)
      full.col(p * mg + q) = f_p.col(p).conjugate().cwiseProduct(f_p.col(q));
  return full;
}

CheckResult check_dictionary_norms() {
  CheckResult r{"dictionary-column-norms", true, ""};
  double worst = 0.0;
  for (const auto& [ula, upa, grid] :
       {std::tuple{UlaSpec{16, 0.5}, UpaSpec{8, 8}, GridSpec{64, 32, 32}},
        std::tuple{UlaSpec{4, 0.5}, UpaSpec{2, 3}, GridSpec{5, 3, 4}}}) {
    const DictionarySet d = build_dictionaries(ula, upa, grid);
    for (const Eigen::MatrixXcd* mat : {&d.f_l, &d.f_x, &d.f_y, &d.f_p})
      for (Eigen::Index c = 0; c < mat->cols(); ++c)
        worst = std::max(worst, std::abs(mat->col(c).norm() - 1.0));
  }
  r.pass = worst <= 1e-12;
  r.detail = "max column-norm deviation " + std::to_string(worst);
  return r;
}

CheckResult check_cascade_redundancy(double perturb) {
  CheckResult r{"cascade-dictionary-redundancy", true, ""};
  double worst = 0.0;
  // Axes where the array resolves its grid (a single-element axis only
  // carries a one-point grid); larger grids on a one-element axis collapse
  // to duplicate atoms and are excluded by construction here.
  for (int mx : {1, 2})
    for (int my : {1, 2})
      for (int gx = mx; gx <= (mx == 1 ? 1 : 4); ++gx)
        for (int gy = my; gy <= (my == 1 ? 1 : 4); ++gy) {
          const DictionarySet d =
              build_dictionaries(UlaSpec{2, 0.5}, UpaSpec{mx, my}, GridSpec{2, gx, gy});
          Eigen::MatrixXcd d_u = build_d_u(d);
          if (perturb != 0.0) d_u(0, 0) += perturb;
          const MergeMap merge = build_merge_map(d.grid);
          const Eigen::MatrixXcd full = materialize_cascade_dictionary(d.f_p);
          const int mg = d.grid.m_grid();

          // distinct columns by brute-force comparison
          std::vector<Eigen::Index> reps;
          for (Eigen::Index c = 0; c < full.cols(); ++c) {
            bool fresh = true;
            for (Eigen::Index rep : reps)
              if ((full.col(c) - full.col(rep)).cwiseAbs().maxCoeff() <= 1e-10) {
                fresh = false;
                break;
              }
            if (fresh) reps.push_back(c);
          }
          if (static_cast<int>(reps.size()) != mg) {
            r.pass = false;
            r.detail = "distinct-column count mismatch";
            return r;
          }
          for (Eigen::Index c = 0; c < full.cols(); ++c)
            worst = std::max(worst, (full.col(c) - d_u.col(merge.class_of_index(c)))
                                        .cwiseAbs()
                                        .maxCoeff());
        }
  r.pass = worst <= 1e-10;
  r.detail = "max |D(:,n) - D_u(:,class(n))| = " + std::to_string(worst);
  return r;
}

CheckResult check_merge_map() {
  CheckResult r{"merge-map-vs-bruteforce", true, ""};
  for (const GridSpec grid : {GridSpec{2, 2, 2}, GridSpec{2, 3, 2}, GridSpec{2, 4, 3}}) {
    const DictionarySet d = build_dictionaries(UlaSpec{2, 0.5}, UpaSpec{2, 2}, grid);
    const MergeMap merge = build_merge_map(grid);
    const Eigen::MatrixXcd full = materialize_cascade_dictionary(d.f_p);
    for (Eigen::Index a = 0; a < full.cols(); ++a)
      for (Eigen::Index b = 0; b < full.cols(); ++b) {
        const bool equal_cols = (full.col(a) - full.col(b)).cwiseAbs().maxCoeff() <= 1e-10;
        const bool same_class = merge.class_of_index(a) == merge.class_of_index(b);
        if (equal_cols != same_class) {
          r.pass = false;
          r.detail = "class partition disagrees with column equality";
          return r;
        }
      }
  }
  r.detail = "classes match column-equality partition";
  return r;
}

CheckResult check_representation_identity() {
  CheckResult r{"representation-identity", true, ""};
  const ExperimentConfig cfg = preset_paper();
  const DictionarySet dicts = build_dictionaries(cfg.ula, cfg.upa, cfg.grid);
  double worst = 0.0;
  for (int s = 0; s < 5; ++s) {
    Rng rng(seed_mix({0xC0FFEEULL, static_cast<std::uint64_t>(s)}));
    const ChannelRealization chan =
        sample_channel_on_grid(rng, cfg.channel, cfg.ula, cfg.upa, cfg.grid);
    const CascadeRepresentation rep =
        build_cascade_representation(dicts, chan, cfg.channel);
    const Eigen::MatrixXcd rebuilt = reconstruct_h(rep.lambda, rep.d_u, dicts);
    worst = std::max(worst,
                     (rebuilt - chan.h_cascade).norm() / chan.h_cascade.norm());
  }
  r.pass = worst <= 1e-10;
  r.detail = "max relative error " + std::to_string(worst);
  return r;
}

CheckResult check_measurement_identity() {
  CheckResult r{"measurement-identity", true, ""};
  const ExperimentConfig cfg = preset_paper();
  const DictionarySet dicts = build_dictionaries(cfg.ula, cfg.upa, cfg.grid);
  double worst = 0.0;
  for (int s = 0; s < 3; ++s) {
    Rng rng(seed_mix({0xBEEFULL, static_cast<std::uint64_t>(s)}));
    const ChannelRealization chan =
        sample_channel_on_grid(rng, cfg.channel, cfg.ula, cfg.upa, cfg.grid);
    const CascadeRepresentation rep =
        build_cascade_representation(dicts, chan, cfg.channel);
    const SensingProblem prob =
        assemble_problem(chan, 16, rng, 0.0, dicts, rep.d_u, OperatorMode::factored);
    const Eigen::VectorXcd predicted = prob.phi->apply(rep.x);
    worst = std::max(worst, (predicted - prob.y).norm() / prob.y.norm());
  }
  r.pass = worst <= 1e-9;
  r.detail = "max relative residual " + std::to_string(worst);
  return r;
}

CheckResult check_sparsity_bound() {
  CheckResult r{"merged-coefficient-sparsity", true, ""};
  const ExperimentConfig cfg = preset_paper();
  const DictionarySet dicts = build_dictionaries(cfg.ula, cfg.upa, cfg.grid);
  int worst = 0;
  for (int s = 0; s < 5; ++s) {
    Rng rng(seed_mix({0xABCDULL, static_cast<std::uint64_t>(s)}));
    const ChannelRealization chan =
        sample_channel_on_grid(rng, cfg.channel, cfg.ula, cfg.upa, cfg.grid);
    const CascadeRepresentation rep =
        build_cascade_representation(dicts, chan, cfg.channel);
    int nnz = 0;
    for (Eigen::Index i = 0; i < rep.lambda.size(); ++i)
      if (rep.lambda.data()[i] != std::complex<double>(0.0, 0.0)) ++nnz;
    worst = std::max(worst, nnz);
  }
  r.pass = worst <= cfg.channel.l_paths * cfg.channel.lprime_paths;
  r.detail = "max nnz " + std::to_string(worst);
  return r;
}

CheckResult check_mimo_chain() {
  CheckResult r{"mimo-chain-identity", true, ""};
  const UlaSpec ula{2, 0.5};
  const UpaSpec upa{2, 2};
  const GridSpec grid{2, 2, 2};
  const UlaSpec rx{2, 0.5};
  const int n_grid_rx = 2;
  const DictionarySet dicts = build_dictionaries(ula, upa, grid);
  const MergeMap merge = build_merge_map(grid);
  double worst = 0.0;
  for (int s = 0; s < 5; ++s) {
    Rng rng(seed_mix({0x51D0ULL, static_cast<std::uint64_t>(s)}));
    Eigen::VectorXcd v_phase(upa.elements());
    for (Eigen::Index i = 0; i < v_phase.size(); ++i) v_phase(i) = rng.unit_phase();
    const MimoRepresentation mimo = build_mimo_operator(dicts, rx, n_grid_rx, v_phase);

    Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(grid.m_grid(), grid.n_grid_tx);
    Eigen::MatrixXcd gamma = Eigen::MatrixXcd::Zero(n_grid_rx, grid.m_grid());
    for (int k = 0; k < 2; ++k) {
      sigma(rng.integer(grid.m_grid()), rng.integer(grid.n_grid_tx)) += rng.cgaussian();
      gamma(rng.integer(n_grid_rx), rng.integer(grid.m_grid())) += rng.cgaussian();
    }
    const Eigen::MatrixXcd theta = v_phase.conjugate().asDiagonal();
    const Eigen::MatrixXcd h_bar = mimo.f_r * gamma * dicts.f_p.adjoint() * theta *
                                   dicts.f_p * sigma * dicts.f_l.adjoint();
    const Eigen::MatrixXcd lambda_bar = mimo_lambda_bar(sigma, gamma, merge);
    const Eigen::Map<const Eigen::VectorXcd> x_bar(lambda_bar.data(), lambda_bar.size());
    const Eigen::VectorXcd predicted = mimo.k_op * x_bar;
    const Eigen::Map<const Eigen::VectorXcd> truth(h_bar.data(), h_bar.size());
    worst = std::max(worst, (predicted - truth).norm() / truth.norm());
  }
  r.pass = worst <= 1e-10;
  r.detail = "max relative error " + std::to_string(worst);
  return r;
}

CheckResult check_beamforming_rank1() {
  CheckResult r{"beamforming-rank1-optimum", true, ""};
  double worst_ratio = 1.0;
  double worst_self = 0.0;
  for (int s = 0; s < 5; ++s) {
    Rng rng(seed_mix({0xFACEULL, static_cast<std::uint64_t>(s)}));
    Eigen::VectorXcd a(16), b(4);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.cgaussian();
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.cgaussian();
    const Eigen::MatrixXcd h = a * b.adjoint();
    PhaseOptConfig cfg;
    cfg.seed = seed_mix({0xFACEULL, static_cast<std::uint64_t>(s), 7ULL});
    const Eigen::VectorXcd v = optimize_phases(h, cfg);
    const double achieved = (v.adjoint() * h).squaredNorm();
    const double optimum = std::pow(a.cwiseAbs().sum(), 2) * b.squaredNorm();
    worst_ratio = std::min(worst_ratio, achieved / optimum);
    worst_self = std::max(worst_self, std::abs(arspr(h, h, cfg) - 1.0));
  }
  r.pass = worst_ratio >= 0.999 && worst_self <= 1e-9;
  r.detail = "min optimum fraction " + std::to_string(worst_ratio) +
             ", max |arspr(h,h)-1| = " + std::to_string(worst_self);
  return r;
}

}  // namespace

std::vector<CheckResult> verify_suite(const VerifyOptions& options) {
  std::vector<CheckResult> checks;
  checks.push_back(check_dictionary_norms());
  checks.push_back(check_cascade_redundancy(options.perturb_d_u));
  checks.push_back(check_merge_map());
  checks.push_back(check_representation_identity());
  checks.push_back(check_measurement_identity());
  checks.push_back(check_sparsity_bound());
  checks.push_back(check_mimo_chain());
  checks.push_back(check_beamforming_rank1());
  return checks;
}

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

namespace {

json complex_to_json(const std::complex<double>& z) {
  return json::array({z.real(), z.imag()});
}

std::complex<double> complex_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(j.at(i).at(c));
  return m;
}

json paths_to_json(const std::vector<PathComponent>& paths) {
  json arr = json::array();
  for (const PathComponent& p : paths) {
    json e;
    e["gain"] = complex_to_json(p.gain);
    e["azimuth"] = p.azimuth;
    e["elevation"] = p.elevation;
    e["aod"] = p.aod;
    e["u"] = p.u;
    e["v"] = p.v;
    e["tx_freq"] = p.tx_freq;
    e["is_los"] = p.is_los;
    arr.push_back(e);
  }
  return arr;
}

std::vector<PathComponent> paths_from_json(const json& arr) {
  std::vector<PathComponent> paths;
  for (const json& e : arr) {
    PathComponent p;
    p.gain = complex_from_json(e.at("gain"));
    p.azimuth = e.at("azimuth").get<double>();
    p.elevation = e.at("elevation").get<double>();
    p.aod = e.at("aod").get<double>();
    p.u = e.at("u").get<double>();
    p.v = e.at("v").get<double>();
    p.tx_freq = e.at("tx_freq").get<double>();
    p.is_los = e.at("is_los").get<bool>();
    paths.push_back(p);
  }
  return paths;
}

}  // namespace

void dump_realization_json(const ChannelRealization& channel, const std::string& path) {
  json j;
  j["paths_g"] = paths_to_json(channel.paths_g);
  j["paths_hr"] = paths_to_json(channel.paths_hr);
  j["g"] = matrix_to_json(channel.g);
  j["h_r"] = matrix_to_json(channel.h_r);
  j["h_cascade"] = matrix_to_json(channel.h_cascade);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
}

ChannelRealization load_realization_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  f >> j;
  ChannelRealization c;
  c.paths_g = paths_from_json(j.at("paths_g"));
  c.paths_hr = paths_from_json(j.at("paths_hr"));
  c.g = matrix_from_json(j.at("g"));
  c.h_r = matrix_from_json(j.at("h_r"));
  c.h_cascade = matrix_from_json(j.at("h_cascade"));
  return c;
}

void dump_lambda_json(const Eigen::MatrixXcd& lambda, const std::string& path) {
  json j;
  j["rows"] = lambda.rows();
  j["cols"] = lambda.cols();
  json entries = json::array();
  for (Eigen::Index c = 0; c < lambda.cols(); ++c)
    for (Eigen::Index i = 0; i < lambda.rows(); ++i)
      if (lambda(i, c) != std::complex<double>(0.0, 0.0)) {
        json e;
        e["row"] = i;
        e["col"] = c;
        e["value"] = complex_to_json(lambda(i, c));
        entries.push_back(e);
      }
  j["entries"] = entries;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
}

Eigen::MatrixXcd load_lambda_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  f >> j;
  Eigen::MatrixXcd lambda = Eigen::MatrixXcd::Zero(j.at("rows").get<Eigen::Index>(),
                                                   j.at("cols").get<Eigen::Index>());
  for (const json& e : j.at("entries"))
    lambda(e.at("row").get<Eigen::Index>(), e.at("col").get<Eigen::Index>()) =
        complex_from_json(e.at("value"));
  return lambda;
}

}  // namespace irsce
