#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pdflow/csvio.hpp"
#include "pdflow/experiments.hpp"
#include "pdflow/samplers.hpp"
#include "pdflow/specfun.hpp"
#include "pdflow/toda.hpp"
#include "pdflow/whittaker.hpp"

namespace fs = std::filesystem;
using namespace pdflow;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

void ensure_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output dir '" + dir + "' is not writable");
  }
  const fs::path probe = fs::path(dir) / ".pdflow-probe";
  {
    std::ofstream out(probe);
    if (!out.good()) {
      throw ConfigError("output dir '" + dir + "' is not writable");
    }
  }
  fs::remove(probe);
}

std::string out_dir_from(const IniConfig& ini, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  return ini.get_string("output", "dir", std::string("out"));
}

int run_simulate(const std::string& config_path, const std::string& out_override,
                 long seed_override) {
  const IniConfig ini = IniConfig::parse_file(config_path);
  const SystemSpec spec = system_spec_from_ini(ini);
  const StepperConfig stepper = stepper_from_ini(ini);
  const double T = ini.get_double("simulate", "T", 1.0);
  long seed = ini.get_long("simulate", "seed", 1);
  const long paths = ini.get_long("simulate", "paths", 1);
  const std::string init = ini.get_string("simulate", "init", "identity");
  const std::string dir = out_dir_from(ini, out_override);
  ini.check_all_consumed();
  if (seed_override != 0) seed = seed_override;
  if (paths < 1) throw ConfigError("simulate paths must be >= 1");
  ensure_output_dir(dir);

  RngStream rng(static_cast<std::uint64_t>(seed), 1);
  State state;
  for (int i = 0; i < spec.particle_count(); ++i) {
    if (init == "identity") {
      state.push_back(Matrix::Identity(spec.n, spec.n));
    } else if (init == "random") {
      state.push_back(random_pd(spec.n, rng).mat());
    } else {
      throw ConfigError("init must be identity or random");
    }
  }
  size_t stored = 0;
  for (long p = 0; p < paths; ++p) {
    RngStream path_rng(static_cast<std::uint64_t>(seed), 2 + p);
    const PathSample path = simulate(spec, state, T, stepper, path_rng);
    const std::string name =
        paths == 1 ? "path.csv" : "path_" + std::to_string(p) + ".csv";
    atomic_write(dir + "/" + name, path_csv(path));
    stored = path.times.size();
  }
  std::cout << "wrote " << paths << " path file(s) to " << dir << " ("
            << stored << " states each, " << spec.particle_count()
            << " particles)\n";
  return kExitPass;
}

int run_specfun_eval(const std::string& config_path,
                     const std::string& out_override) {
  const IniConfig ini = IniConfig::parse_file(config_path);
  const std::string fn = ini.get_string("specfun", "fn");
  const int n = static_cast<int>(ini.get_long("specfun", "n", 1));
  const double nu = ini.get_double("specfun", "nu", 0.0);
  const std::string grid_spec = ini.get_string("specfun", "grid", "0.5:4:8");
  Vector svec;
  if (ini.has("specfun", "s")) svec = ini.get_vector("specfun", "s");
  Vector lambda;
  if (ini.has("specfun", "lambda_vec"))
    lambda = ini.get_vector("specfun", "lambda_vec");
  const std::string dir = out_dir_from(ini, out_override);
  ini.check_all_consumed();
  ensure_output_dir(dir);

  double lo = 0.5, hi = 4.0;
  long count = 8;
  {
    std::stringstream ss(grid_spec);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 3) throw ConfigError("grid must be lo:hi:count");
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    count = std::stol(parts[2]);
    if (count < 1 || lo <= 0.0 || hi < lo) throw ConfigError("bad grid");
  }

  std::vector<std::vector<double>> inputs;
  std::vector<double> values, errors;
  for (long i = 0; i < count; ++i) {
    const double x =
        count == 1 ? lo : lo * std::pow(hi / lo, double(i) / (count - 1));
    if (fn == "bessel_B") {
      const IntegralResult r =
          bessel_B(nu, PdMatrix(x * Matrix::Identity(n, n)));
      inputs.push_back({x});
      values.push_back(r.value);
      errors.push_back(r.error);
    } else if (fn == "macdonald") {
      inputs.push_back({x});
      values.push_back(macdonald_k(nu, x));
      errors.push_back(0.0);
    } else if (fn == "psi") {
      if (lambda.size() < 1 || n != 1)
        throw ConfigError("psi evaluation needs n=1 and lambda_vec");
      std::vector<PdMatrix> xs;
      for (int j = 0; j < lambda.size(); ++j)
        xs.push_back(PdMatrix(x * Matrix::Identity(1, 1)));
      const IntegralResult r = whittaker_psi(lambda, xs);
      inputs.push_back({x});
      values.push_back(r.value);
      errors.push_back(r.error);
    } else if (fn == "gamma_n") {
      if (svec.size() != n) throw ConfigError("gamma_n needs s of length n");
      inputs.push_back({x});
      values.push_back(gamma_n(svec));
      errors.push_back(0.0);
    } else if (fn == "c_s") {
      if (svec.size() != n) throw ConfigError("c_s needs s of length n");
      inputs.push_back({x});
      values.push_back(c_s_formula(svec));
      errors.push_back(
          n <= 2 ? std::abs(c_s_quadrature(svec).value - c_s_formula(svec))
                 : 0.0);
    } else {
      throw ConfigError("unknown fn '" + fn + "'");
    }
  }
  atomic_write(dir + "/specfun.csv", eval_csv(inputs, values, errors));
  std::cout << "wrote " << dir << "/specfun.csv (" << values.size()
            << " rows)\n";
  return kExitPass;
}

int run_toda_cmd(const std::string& config_path,
                 const std::string& out_override) {
  const IniConfig ini = IniConfig::parse_file(config_path);
  const std::string mode = ini.get_string("toda", "mode", "lattice");
  const int N = static_cast<int>(ini.get_long("toda", "N", 3));
  const int n = static_cast<int>(ini.get_long("toda", "n", 2));
  const double T = ini.get_double("toda", "T", 5.0);
  const double h = ini.get_double("toda", "h", 1e-3);
  const double nu = ini.get_double("toda", "nu", 0.5);
  const long seed = ini.get_long("toda", "seed", 1);
  const long store_every = ini.get_long("toda", "store_every", 100);
  Vector lambda;
  if (ini.has("toda", "lambda_vec"))
    lambda = ini.get_vector("toda", "lambda_vec");
  const std::string dir = out_dir_from(ini, out_override);
  ini.check_all_consumed();
  ensure_output_dir(dir);

  RngStream rng(static_cast<std::uint64_t>(seed), 3);
  LabelledSeries series;
  std::string summary;

  try {
    if (mode == "lattice") {
      TodaState s;
      s.N = N;
      s.n = n;
      for (int i = 0; i < N; ++i) {
        s.x.push_back(random_pd(n, rng, 0.3).mat());
        s.p.push_back(0.25 * rng.gaussian_sym(n));
      }
      for (int i = 1; i <= N; ++i)
        series.labels.push_back("X" + std::to_string(i));
      for (int i = 1; i <= N; ++i)
        series.labels.push_back("P" + std::to_string(i));
      for (int k = 1; k <= 3; ++k)
        series.labels.push_back("C" + std::to_string(k));
      VecState v = s.x;
      v.insert(v.end(), s.p.begin(), s.p.end());
      const RhsFn rhs = [&](const VecState& vv) {
        TodaState st;
        st.N = N;
        st.n = n;
        st.x.assign(vv.begin(), vv.begin() + N);
        st.p.assign(vv.begin() + N, vv.end());
        const TodaState d = toda_rhs(st);
        VecState out = d.x;
        out.insert(out.end(), d.p.begin(), d.p.end());
        return out;
      };
      std::vector<int> pd_idx;
      for (int i = 0; i < N; ++i) pd_idx.push_back(i);
      const Rk4Result traj = integrate_rk4(
          rhs, v, T, h, static_cast<int>(store_every), pd_idx);
      for (size_t k = 0; k < traj.times.size(); ++k) {
        TodaState st;
        st.N = N;
        st.n = n;
        st.x.assign(traj.states[k].begin(), traj.states[k].begin() + N);
        st.p.assign(traj.states[k].begin() + N, traj.states[k].end());
        std::vector<Matrix> objs = traj.states[k];
        const std::vector<Matrix> cs = constants_of_motion(st, 3);
        objs.insert(objs.end(), cs.begin(), cs.end());
        series.times.push_back(traj.times[k]);
        series.values.push_back(objs);
      }
      summary = "lattice run complete to T=" + format_double(T) + "\n";
    } else if (mode == "cascade") {
      if (lambda.size() != N)
        throw ConfigError("cascade needs lambda_vec of length N");
      std::vector<PdMatrix> x;
      for (int i = 0; i < N; ++i) x.push_back(random_pd(n, rng, 0.3));
      const TriangularArray start = critical_point(lambda, x);
      for (int m = 1; m <= N; ++m)
        for (int i = 1; i <= m; ++i)
          series.labels.push_back("Y" + std::to_string(m) + "_" +
                                  std::to_string(i));
      VecState v;
      for (int m = 1; m <= N; ++m)
        for (int i = 1; i <= m; ++i) v.push_back(start.y(m, i));
      const RhsFn rhs = [&](const VecState& vv) {
        TriangularArray arr(N, n);
        int idx = 0;
        for (int m = 1; m <= N; ++m)
          for (int i = 1; i <= m; ++i) arr.y(m, i) = vv[idx++];
        return cascade_rhs(arr, lambda);
      };
      std::vector<int> pd_idx;
      for (int i = 0; i < start.particle_count(); ++i) pd_idx.push_back(i);
      const Rk4Result traj = integrate_rk4(
          rhs, v, T, h, static_cast<int>(store_every), pd_idx);
      double worst = 0.0;
      for (size_t k = 0; k < traj.times.size(); ++k) {
        series.times.push_back(traj.times[k]);
        series.values.push_back(traj.states[k]);
        TriangularArray arr(N, n);
        int idx = 0;
        for (int m = 1; m <= N; ++m)
          for (int i = 1; i <= m; ++i) arr.y(m, i) = traj.states[k][idx++];
        worst = std::max(worst, cpe_residual(arr, lambda));
      }
      summary = "cascade run complete; max critical-point residual " +
                format_double(worst) + "\n";
    } else if (mode == "backlund") {
      BacklundState s;
      s.nu = nu;
      for (int i = 0; i < N; ++i) s.x.push_back(random_pd(n, rng, 0.3).mat());
      for (int i = 0; i < N - 1; ++i)
        s.y.push_back(random_pd(n, rng, 0.3).mat());
      for (int i = 1; i <= N; ++i)
        series.labels.push_back("X" + std::to_string(i));
      for (int i = 1; i < N; ++i)
        series.labels.push_back("Y" + std::to_string(i));
      VecState v = s.x;
      v.insert(v.end(), s.y.begin(), s.y.end());
      const RhsFn rhs = [&](const VecState& vv) {
        BacklundState st;
        st.nu = nu;
        st.x.assign(vv.begin(), vv.begin() + N);
        st.y.assign(vv.begin() + N, vv.end());
        const BacklundRhs d = backlund_rhs(st);
        VecState out = d.xdot;
        out.insert(out.end(), d.ydot.begin(), d.ydot.end());
        return out;
      };
      std::vector<int> pd_idx;
      for (int i = 0; i < 2 * N - 1; ++i) pd_idx.push_back(i);
      const Rk4Result traj = integrate_rk4(
          rhs, v, T, h, static_cast<int>(store_every), pd_idx);
      double worst = 0.0;
      for (size_t k = 0; k < traj.times.size(); ++k) {
        series.times.push_back(traj.times[k]);
        series.values.push_back(traj.states[k]);
        BacklundState st;
        st.nu = nu;
        st.x.assign(traj.states[k].begin(), traj.states[k].begin() + N);
        st.y.assign(traj.states[k].begin() + N, traj.states[k].end());
        worst = std::max(worst, dressing_residual(st));
      }
      summary = "backlund run complete; max dressing residual " +
                format_double(worst) + "\n";
    } else {
      throw ConfigError("toda mode must be lattice, cascade or backlund");
    }
  } catch (const ConeEscape& esc) {
    summary = "trajectory left the cone at t=" + format_double(esc.time) +
              " (recorded; expected for some data)\n";
  }

  atomic_write(dir + "/toda.csv", labelled_csv(series));
  atomic_write(dir + "/report.txt", summary);
  std::cout << summary;
  return kExitPass;
}

int run_verify(const std::string& kind_name, const std::string& config_path,
               const std::string& out_override, long seed_override,
               bool quick) {
  ExperimentConfig cfg;
  std::string dir = out_override.empty() ? "out" : out_override;
  if (!config_path.empty()) {
    const IniConfig ini = IniConfig::parse_file(config_path);
    if (!kind_name.empty() && !ini.has("experiment", "kind")) {
      // kind comes from the command line; parse the rest
      cfg.kind = experiment_kind_from_string(kind_name);
      cfg.n = static_cast<int>(ini.get_long("system", "n", 0));
      cfg.N = static_cast<int>(ini.get_long("system", "N", 0));
      if (ini.has("system", "nu")) {
        cfg.nu = ini.get_double("system", "nu");
        cfg.has_nu = true;
      }
      if (ini.has("system", "lambda")) {
        cfg.lambda = ini.get_double("system", "lambda");
        cfg.has_lambda = true;
      }
      cfg.paths = ini.get_long("experiment", "paths", 0);
      cfg.T = ini.get_double("experiment", "T", 0.0);
      cfg.h = ini.get_double("stepper", "h", 0.0);
      cfg.seed =
          static_cast<std::uint64_t>(ini.get_long("experiment", "seed", 0));
      cfg.policy.z_max = ini.get_double("experiment", "z_max", 3.0);
      cfg.policy.ks_floor = ini.get_double("experiment", "ks_floor", 0.01);
      cfg.quick = ini.get_bool("experiment", "quick", false);
    } else {
      cfg = experiment_config_from_ini(ini);
    }
    dir = out_dir_from(ini, out_override);
    ini.check_all_consumed();
  }
  if (!kind_name.empty()) cfg.kind = experiment_kind_from_string(kind_name);
  if (seed_override != 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  cfg.quick = cfg.quick || quick;
  ensure_output_dir(dir);

  const std::vector<StatReport> rows = run_experiment(cfg);
  atomic_write(dir + "/results.csv", results_csv(rows));
  atomic_write(dir + "/report.txt", report_text(rows));
  std::cout << report_text(rows);
  for (const StatReport& row : rows) {
    if (!row.pass) return kExitCheckFailure;
  }
  return kExitPass;
}

int run_verify_all(const std::string& out_dir, long seed_override, bool quick) {
  ensure_output_dir(out_dir);
  std::vector<StatReport> all;
  std::string summary;
  bool ok = true;
  for (int c = 1; c <= criterion_count(); ++c) {
    const CriterionResult res =
        run_criterion(c, quick, static_cast<std::uint64_t>(seed_override));
    const std::string line = std::string(res.pass ? "[PASS] " : "[FAIL] ") +
                             "criterion " + std::to_string(c) + ": " +
                             res.name + "\n";
    summary += line;
    std::cout << line;
    all.insert(all.end(), res.rows.begin(), res.rows.end());
    ok = ok && res.pass;
  }
  atomic_write(out_dir + "/results.csv", results_csv(all));
  atomic_write(out_dir + "/report.txt", summary + "\n" + report_text(all));
  std::cout << (ok ? "verify-all: PASS\n" : "verify-all: FAIL\n");
  return ok ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pdflow: interacting matrix diffusions, their special functions, and a "
      "seeded verification harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, kind_name;
  long seed = 0;
  bool quick = false;

  CLI::App* sim = app.add_subcommand("simulate", "integrate one diffusion path");
  sim->add_option("--config", config_path, "INI config file")->required();
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--seed", seed, "seed override");

  CLI::App* spe =
      app.add_subcommand("specfun-eval", "evaluate special functions on a grid");
  spe->add_option("--config", config_path, "INI config file")->required();
  spe->add_option("--out", out_dir, "output directory");

  CLI::App* tod = app.add_subcommand("toda", "classical lattice runs");
  tod->add_option("--config", config_path, "INI config file")->required();
  tod->add_option("--out", out_dir, "output directory");

  CLI::App* ver = app.add_subcommand("verify", "run one verification kind");
  ver->add_option("--kind", kind_name, "experiment kind")->required();
  ver->add_option("--config", config_path, "INI config file");
  ver->add_option("--out", out_dir, "output directory");
  ver->add_option("--seed", seed, "seed override");
  ver->add_flag("--quick", quick, "reduced path counts");

  CLI::App* all =
      app.add_subcommand("verify-all", "run the full acceptance suite");
  all->add_option("--out", out_dir, "output directory");
  all->add_option("--seed", seed, "seed override");
  all->add_flag("--quick", quick, "reduced path counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (sim->parsed()) return run_simulate(config_path, out_dir, seed);
    if (spe->parsed()) return run_specfun_eval(config_path, out_dir);
    if (tod->parsed()) return run_toda_cmd(config_path, out_dir);
    if (ver->parsed())
      return run_verify(kind_name, config_path, out_dir, seed, quick);
    if (all->parsed())
      return run_verify_all(out_dir.empty() ? "out" : out_dir, seed, quick);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
