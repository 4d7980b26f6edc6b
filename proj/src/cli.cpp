#include "cmaflow/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cmaflow/config.hpp"
#include "cmaflow/diagnostics.hpp"
#include "cmaflow/errors.hpp"
#include "cmaflow/field_io.hpp"
#include "cmaflow/flow.hpp"
#include "cmaflow/oracle.hpp"

namespace fs = std::filesystem;

namespace cmaflow {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

struct Setup {
  RunConfig cfg;
  Grid grid;
  Spectral sp;
  ScalarField f;
  ScalarField u0;

  explicit Setup(RunConfig c)
      : cfg(std::move(c)),
        grid(make_grid(cfg)),
        sp(grid),
        f(cosine_series(grid, cfg.f)),
        u0(cosine_series(grid, cfg.u0)) {}

  FlowEngine engine(const SpeedFunction& F) const { return FlowEngine(sp, make_metric(cfg), f, F); }
};

std::string dump_name(const std::string& stem, std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%06zu.cmaf", step);
  return stem + buf;
}

// Runs one flow writing diagnostics.csv and field dumps under dir.
FlowResult run_to_dir(const Setup& s, const SpeedFunction& F, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream csv(dir / "diagnostics.csv");
  if (!csv) throw InvalidInput("cannot write " + (dir / "diagnostics.csv").string());
  DiagnosticsWriter writer(csv);
  const std::size_t every = s.cfg.dump_every;
  auto observer = [&](std::size_t step, const FlowState& st, const DiagnosticsRecord& rec) {
    writer.append(rec);
    if (every > 0 && step % every == 0) write_field(dir / dump_name("phi", step), normalized(st.u));
  };
  FlowResult res = s.engine(F).run(s.u0, make_policy(s.cfg), make_monitor(s.cfg), observer);
  write_field(dir / "phi_final.cmaf", res.phi);
  write_field(dir / "u_final.cmaf", res.state.u);
  return res;
}

void print_fit(std::ostream& out, const DecayFit& fit) {
  if (fit.fitted)
    out << "decay: eta=" << fmt(fit.eta) << " C=" << fmt(fit.C) << " r_squared=" << fmt(fit.r_squared)
        << " points=" << fit.points << " window=[" << fmt(fit.t_begin) << ", " << fmt(fit.t_end) << "]";
  else
    out << "decay: not fitted";
  if (!fit.note.empty()) out << " (" << fit.note << ")";
  out << '\n';
}

std::vector<IdentityReport> run_checks(const Setup& s, std::ostream& out, const fs::path& dir) {
  const FlowEngine e = s.engine(make_speed(s.cfg));
  const double dt = s.cfg.check_dt;
  const int steps = s.cfg.check_steps;
  const auto coarse = check_trajectory(e, s.u0, dt, steps, TimeDifference::Centered);
  const auto fine = check_trajectory(e, s.u0, 0.5 * dt, 2 * steps, TimeDifference::Centered);
  fs::create_directories(dir);
  std::ofstream csv(dir / "identities.csv");
  if (!csv) throw InvalidInput("cannot write " + (dir / "identities.csv").string());
  std::vector<IdentityReport> all = coarse;
  all.insert(all.end(), fine.begin(), fine.end());
  write_identity_reports(csv, all);

  auto worst = [](const std::vector<IdentityReport>& reps, const std::string& name) {
    double m = 0.0;
    for (const auto& r : reps)
      if (r.name == name) m = std::max(m, r.residual);
    return m;
  };
  for (const auto& name : identity_names()) {
    const double a = worst(coarse, name), b = worst(fine, name);
    out << name << ": residual=" << fmt(a) << " residual_half_dt=" << fmt(b)
        << " order=" << fmt(std::log2(a / b)) << '\n';
  }
  const FlowState s0 = e.make_state(0.0, s.u0);
  out << "F2 right side, two assemblies: max difference="
      << fmt(sup_distance(evol_F2_rhs(e, s0), evol_F2_rhs_direct(e, s0))) << '\n';
  out << "log Tr h right side, two assemblies: max difference="
      << fmt(sup_distance(evol_logtrh_rhs(e, s0), evol_logtrh_rhs_precursors(e, s0))) << '\n';
  return all;
}

int cmd_run(const std::string& path, std::ostream& out) {
  const Setup s(load_config(path));
  const SpeedFunction F = make_speed(s.cfg);
  const fs::path dir = s.cfg.output_dir;
  const FlowResult res = run_to_dir(s, F, dir);
  out << "speed: " << F.name() << '\n';
  out << "c0: " << fmt(res.c0) << '\n';
  out << "steps: " << res.steps << " retries: " << res.retries << " t: " << fmt(res.state.t) << '\n';
  out << "residual: " << fmt(res.residual) << '\n';
  print_fit(out, fit_decay(oscillation_series(res.diagnostics)));
  const double bound = g_bound(res.diagnostics, F, s.cfg.A, s.cfg.B);
  double gmax = -std::numeric_limits<double>::infinity();
  for (const auto& r : res.diagnostics) gmax = std::max(gmax, r.G_max);
  out << "G: max=" << fmt(gmax) << " bound=" << fmt(bound) << '\n';
  if (s.cfg.checks) run_checks(s, out, dir);
  out << (res.converged ? "CONVERGED" : "NOT_CONVERGED") << '\n';
  return res.converged ? kExitOk : kExitNotConverged;
}

int cmd_oracle(const std::string& path, bool newton, std::ostream& out) {
  const Setup s(load_config(path));
  const StationaryProblem pb(make_metric(s.cfg), s.f);
  ScalarField phi(s.grid);
  if (s.grid.n() == 1 && !newton) {
    phi = solve_n1(s.sp, pb);
    out << "method: poisson\n";
  } else {
    const NewtonResult nr = solve_newton(s.sp, pb);
    phi = nr.phi;
    out << "method: newton iterations=" << nr.iterations << " linear_iterations=" << nr.linear_iterations
        << '\n';
  }
  const StationaryResidual r = residual(s.sp, pb.chi, s.f, phi, pb.c0);
  const fs::path dir = s.cfg.output_dir;
  fs::create_directories(dir);
  write_field(dir / "phi_oracle.cmaf", phi);
  write_field(dir / "residual_oracle.cmaf", r.field);
  out << "c0: " << fmt(pb.c0) << '\n';
  out << "residual: " << fmt(r.sup) << '\n';
  return kExitOk;
}

std::string sanitize(const std::string& token) {
  std::string s = token;
  for (char& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '.') ch = '_';
  return s;
}

int cmd_compare(const std::string& path, const std::string& speeds, std::ostream& out) {
  const Setup s(load_config(path));
  std::vector<SpeedFunction> Fs;
  {
    std::stringstream ss(speeds);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      try {
        Fs.push_back(SpeedFunction::from_token(tok));
      } catch (const Error& e) {
        throw ConfigError("--speeds", e.what());
      }
    }
  }
  if (Fs.empty()) throw ConfigError("--speeds", "no speeds given");

  const std::size_t m = Fs.size();
  std::vector<std::optional<FlowResult>> results(m);
  std::vector<std::exception_ptr> errors(m);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < m;) {
      try {
        results[i] = run_to_dir(s, Fs[i], fs::path(s.cfg.output_dir) / sanitize(Fs[i].name()));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::min<unsigned>(thread_cap(), static_cast<unsigned>(m));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  bool all = true;
  for (std::size_t i = 0; i < m; ++i) {
    const FlowResult& r = *results[i];
    all = all && r.converged;
    const DecayFit fit = fit_decay(oscillation_series(r.diagnostics));
    out << Fs[i].name() << ": " << (r.converged ? "CONVERGED" : "NOT_CONVERGED") << " steps=" << r.steps
        << " residual=" << fmt(r.residual) << " eta=" << (fit.fitted ? fmt(fit.eta) : "n/a")
        << " r_squared=" << (fit.fitted ? fmt(fit.r_squared) : "n/a") << '\n';
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = sup_distance(results[i]->phi, results[j]->phi);
      worst = std::max(worst, d);
      out << "phi difference " << Fs[i].name() << " vs " << Fs[j].name() << ": " << fmt(d) << '\n';
    }
  out << "max pairwise phi difference: " << fmt(worst) << '\n';
  return all ? kExitOk : kExitNotConverged;
}

int cmd_check(const std::string& path, std::ostream& out) {
  const Setup s(load_config(path));
  run_checks(s, out, s.cfg.output_dir);
  return kExitOk;
}

int cmd_dump_info(const std::string& path, std::ostream& out) {
  const FieldHeader h = read_field_header(fs::path(path));
  out << "n=" << h.n << '\n' << "N=" << h.N << '\n' << "count=" << h.count << '\n';
  return kExitOk;
}

}  // namespace

void write_identity_reports(std::ostream& out, const std::vector<IdentityReport>& reports) {
  out << kIdentitiesVersionLine << '\n' << "name,t,residual,scale,dt,N\n";
  for (const auto& r : reports)
    out << r.name << ',' << fmt(r.t) << ',' << fmt(r.residual) << ',' << fmt(r.scale) << ',' << fmt(r.dt)
        << ',' << r.N << '\n';
  out.flush();
}

unsigned thread_cap() {
  if (const char* env = std::getenv("CMAFLOW_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parabolic complex Monge-Ampere flows on flat tori"};
  app.require_subcommand(1);
  std::string config, field, speeds = "log,linear,power:2,inverse_ma";
  bool newton = false;

  auto* run = app.add_subcommand("run", "integrate the flow and write diagnostics");
  run->add_option("config", config, "TOML configuration")->required();
  auto* oracle = app.add_subcommand("oracle", "solve the stationary equation directly");
  oracle->add_option("config", config, "TOML configuration")->required();
  oracle->add_flag("--newton", newton, "use the Newton solver also for n = 1");
  auto* compare = app.add_subcommand("compare", "run several speeds on shared data and compare limits");
  compare->add_option("config", config, "TOML configuration")->required();
  compare->add_option("--speeds", speeds, "comma-separated speed tokens");
  auto* check = app.add_subcommand("check", "evaluate the evolution identities on a short trajectory");
  check->add_option("config", config, "TOML configuration")->required();
  auto* dump = app.add_subcommand("dump-info", "print the header of a CMAF1 field file");
  dump->add_option("field", field, "field file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (*run) return cmd_run(config, out);
    if (*oracle) return cmd_oracle(config, newton, out);
    if (*compare) return cmd_compare(config, speeds, out);
    if (*check) return cmd_check(config, out);
    if (*dump) return cmd_dump_info(field, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace cmaflow
