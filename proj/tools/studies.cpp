#include "studies.hpp"

#include <atomic>
#include <cctype>
#include <mutex>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "dynslip/evolution.hpp"
#include "dynslip/manufactured.hpp"
#include "dynslip/random_fields.hpp"
#include "dynslip/spectral.hpp"

namespace dynslip::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string canonical_config(const ExperimentConfig& c) {
  json j;
  j["study"] = to_string(c.study);
  std::vector<std::string> doms;
  for (const auto& d : c.domains) doms.push_back(d.id());
  j["domains"] = doms;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  if (c.alpha_fraction_of_alpha0) j["alpha_fraction_of_alpha0"] = *c.alpha_fraction_of_alpha0;
  j["h_levels"] = c.h_levels;
  if (c.lambdas) {
    std::vector<std::array<double, 2>> l;
    for (const auto& z : *c.lambdas) l.push_back({z.real(), z.imag()});
    j["lambdas"] = l;
  }
  j["data"] = c.data;
  if (c.omega) j["omega"] = *c.omega;
  j["theta"] = c.theta;
  if (c.angles) j["angles"] = *c.angles;
  j["rho"] = {c.rho_min, c.rho_max};
  j["n_per_ray"] = c.n_per_ray;
  j["n_probes"] = c.n_probes;
  j["krylov_steps"] = c.krylov_steps;
  j["t_end"] = c.t_end;
  j["n_steps"] = c.n_steps;
  j["q"] = c.q;
  j["ensemble"] = c.ensemble;
  j["initial"] = c.initial;
  j["forcing"] = c.forcing;
  j["target"] = c.target;
  j["seed"] = c.seed;
  return j.dump();
}

RunContext::RunContext(ExperimentConfig cfg) : cfg_(std::move(cfg)), out_(cfg_.output_dir) {
  fs::create_directories(out_);
}

void RunContext::write(const std::string& name, const std::string& content) {
  const fs::path p = out_ / name;
  fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  os << content;
  if (!os) throw Error(fmt::format("cannot write {}", p.string()));
  files_[name] = sha256_hex(content);
}

std::shared_ptr<const Mesh> RunContext::mesh(const DomainSpec& spec, double h) {
  std::string key = fmt::format("{}_h{}", spec.id(), h);
  for (char& ch : key)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '_') ch = '_';
  const fs::path p = out_ / "meshes" / (key + ".mesh");
  std::shared_ptr<const Mesh> m;
  if (fs::exists(p)) {
    std::ifstream in(p);
    m = std::make_shared<const Mesh>(read_mesh(in));
  } else {
    m = std::make_shared<const Mesh>(generate_mesh(spec, h));
  }
  const std::string text = serialize_mesh(*m);
  write("meshes/" + key + ".mesh", text);
  meshes_[key] = sha256_hex(text);
  return m;
}

void RunContext::write_manifest() {
  json j;
  j["study"] = to_string(cfg_.study);
  const std::string canon = canonical_config(cfg_);
  j["config"] = json::parse(canon);
  j["config_sha256"] = sha256_hex(canon);
  j["versions"] = {{"dynslip", "1.0.0"},
                   {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
                   {"fmt", FMT_VERSION},
                   {"boost", BOOST_LIB_VERSION},
                   {"compiler", __VERSION__}};
  j["meshes"] = meshes_;
  j["files"] = files_;
  j["flags"] = flags_;
  const fs::path p = out_ / "manifest.json";
  std::ofstream os(p, std::ios::binary);
  os << j.dump(2) << "\n";
}

namespace {

std::string csv_double(double v) { return fmt::format("{:.17g}", v); }

template <class F>
void parallel_for(int n, int threads, F&& body) {
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

int steps_at(const ExperimentConfig& c, std::size_t level) {
  return c.n_steps.size() == 1 ? c.n_steps[0] : c.n_steps[level];
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a; sy += b; sxx += a * a; sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// α from the config, or fraction·α₀ with α₀ from the Korn constants on `mesh`.
std::pair<double, std::optional<double>> resolve_alpha(const ExperimentConfig& c, std::shared_ptr<const Mesh> mesh) {
  std::optional<double> alpha0;
  double alpha = c.alpha;
  if (c.alpha_fraction_of_alpha0 || (c.alpha <= 0.0 && !mesh->axisymmetric)) {
    alpha0 = korn_constants(assemble(mesh, 0.0, c.beta)).alpha0;
    if (c.alpha_fraction_of_alpha0) alpha = *c.alpha_fraction_of_alpha0 * *alpha0;
  }
  return {alpha, alpha0};
}

Data make_data(const OperatorBundle& b, const std::string& kind, cplx lambda, std::uint64_t seed,
               std::uint64_t member) {
  if (kind == "rigid_rotation") return rigid_rotation_data(b, lambda);
  if (kind == "stream") return StreamSolution().resolvent_data(b, lambda);
  return random_smooth_data(b, seed, member);
}

void study_resolvent(RunContext& ctx) {
  const auto& c = ctx.config();
  const DomainSpec& dom = c.domains.front();
  std::ostringstream table;
  table << "level,h,re_lambda,im_lambda,regime,u_l2,ub_l2,ub_h12,p_h1,residual,weak_identity,apriori,"
           "elliptic,error_u,error_p,condition,flags\n";
  for (std::size_t lev = 0; lev < c.h_levels.size(); ++lev) {
    const auto mesh = ctx.mesh(dom, c.h_levels[lev]);
    const auto [alpha, alpha0] = resolve_alpha(c, mesh);
    const OperatorBundle b = assemble(mesh, alpha, c.beta);
    const OperatorA A(b);
    ResolventOptions ro;
    ro.alpha0 = alpha0;
    for (std::size_t i = 0; i < c.lambdas->size(); ++i) {
      const cplx lam = (*c.lambdas)[i];
      const Data F = make_data(b, c.data, lam, c.seed, i);
      const auto sol = ResolventSolver(b, lam, ro).solve(F);
      double eu = std::nan(""), ep = std::nan("");
      if (c.data == "rigid_rotation") {
        const VectorField ue = [](const Vec2& x) { return Eigen::Vector2cd(-x.y(), x.x()); };
        eu = velocity_l2_error(b, sol.u, ue) / velocity_l2_error(b, CVec::Zero(b.n_velocity()), ue);
        ep = pressure_l2(b, sol.p);
      } else if (c.data == "stream") {
        const StreamSolution S;
        const VectorField ue = [&](const Vec2& x) { return Eigen::Vector2cd(S.velocity(x).cast<cplx>()); };
        eu = velocity_l2_error(b, sol.u, ue) / velocity_l2_error(b, CVec::Zero(b.n_velocity()), ue);
        ep = pressure_l2_error(b, sol.p, [&](const Vec2& x) { return cplx(S.pressure(x)); });
      }
      const double wi = weak_identity_residual(A, lam, sol.state(), F);
      for (const auto& f : sol.flags) ctx.flag(fmt::format("level {} lambda {}: {}", lev, i, f));
      fmt::print(table, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", lev, csv_double(c.h_levels[lev]),
                 csv_double(lam.real()), csv_double(lam.imag()), to_string(sol.regime), csv_double(sol.diag.u_l2),
                 csv_double(sol.diag.ub_l2), csv_double(sol.diag.ub_h12), csv_double(sol.diag.p_h1),
                 csv_double(sol.diag.residual), csv_double(wi), csv_double(apriori_ratio(b, sol, F)),
                 csv_double(elliptic_regularity_ratio(A, sol, F)), csv_double(eu), csv_double(ep),
                 csv_double(sol.diag.condition), fmt::join(sol.flags, ";"));
      std::ostringstream sol_csv;
      write_solution_csv(sol_csv, b, sol);
      ctx.write(fmt::format("solution_L{}_{}.csv", lev, i), sol_csv.str());
      ctx.write(fmt::format("diagnostics_L{}_{}.json", lev, i), diagnostics_json(sol) + "\n");
    }
  }
  ctx.write("resolvent.csv", table.str());
}

void study_sweep(RunContext& ctx) {
  const auto& c = ctx.config();
  const DomainSpec& dom = c.domains.front();
  const auto finest = ctx.mesh(dom, c.h_levels.back());
  const auto [alpha, alpha0] = resolve_alpha(c, finest);
  const double omega = c.omega.value_or(sector_shift(alpha, c.beta));
  const std::vector<cplx> grid =
      c.lambdas ? *c.lambdas
                : sector_grid(omega, c.angles.value_or(default_sector_angles()), c.rho_min, c.rho_max, c.n_per_ray);
  NormEstimateOptions no;
  no.n_probes = c.n_probes;
  no.krylov_steps = c.krylov_steps;
  no.seed = c.seed;
  ResolventOptions ro;
  ro.alpha0 = alpha0;
  json summary;
  summary["domain"] = dom.id();
  summary["alpha"] = alpha;
  summary["beta"] = c.beta;
  if (alpha0) summary["alpha0"] = *alpha0;
  summary["theta"] = c.theta;
  summary["omega"] = omega;
  json levels = json::array();
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (std::size_t lev = 0; lev < c.h_levels.size(); ++lev) {
    const OperatorBundle b = assemble(ctx.mesh(dom, c.h_levels[lev]), alpha, c.beta);
    const SectorReport rep = sector_sweep(b, c.theta, omega, grid, no, ro, c.threads);
    std::ostringstream os;
    rep.write_csv(os);
    ctx.write(fmt::format("sector_L{}.csv", lev), os.str());
    for (const auto& r : rep.records)
      if (!r.flag.empty())
        ctx.flag(fmt::format("level {} lambda {}{:+}i: {}", lev, r.lambda.real(), r.lambda.imag(), r.flag));
    json l = json::parse(rep.summary_json());
    l["h"] = c.h_levels[lev];
    levels.push_back(l);
    cmin = std::min(cmin, rep.c_sector());
    cmax = std::max(cmax, rep.c_sector());
  }
  summary["levels"] = levels;
  summary["C_sector_spread"] = cmin > 0.0 ? cmax / cmin : 0.0;
  ctx.write("sweep.json", summary.dump(2) + "\n");
}

void study_korn(RunContext& ctx) {
  const auto& c = ctx.config();
  std::ostringstream table;
  table << "domain,h,q1,q2,alpha0\n";
  json reports = json::array();
  for (const auto& dom : c.domains)
    for (double h : c.h_levels) {
      const KornReport k = korn_constants(assemble(ctx.mesh(dom, h), 0.0, c.beta));
      fmt::print(table, "\"{}\",{},{},{},{}\n", k.domain, csv_double(k.h), csv_double(k.q1), csv_double(k.q2),
                 csv_double(k.alpha0));
      reports.push_back(json::parse(k.to_json()));
    }
  ctx.write("korn.csv", table.str());
  ctx.write("korn.json", reports.dump(2) + "\n");
}

State make_initial(const OperatorBundle& b, const std::string& kind, std::uint64_t seed) {
  if (kind == "rigid_rotation") return make_tied(b, rigid_rotation(b));
  if (kind == "random") return random_smooth_state(b, seed, 1000);
  return {CVec::Zero(b.n_velocity()), BoundaryScalar(CVec::Zero(b.n_boundary())), true};
}

/// f = −e^{−t}(−y, x), h = (−1 + α/β)e^{−t}: exact solution e^{−t}(−y, x).
Forcing decay_forcing(const OperatorBundle& b) {
  const CVec rot = rigid_rotation(b);
  const double g = -1.0 + b.alpha() / b.beta();
  const auto nb = b.n_boundary();
  return [rot, g, nb](double t) {
    const double e = std::exp(-t);
    return Data{-e * rot, BoundaryScalar(CVec::Constant(nb, g * e))};
  };
}

Forcing make_forcing(const OperatorBundle& b, const std::string& kind, std::uint64_t seed, std::uint64_t member) {
  if (kind == "manufactured_decay") return decay_forcing(b);
  if (kind == "random") return random_smooth_forcing(b, seed, member);
  return zero_forcing(b);
}

double decay_error(const OperatorBundle& b, const EvolutionTrace& tr) {
  double err = 0.0;
  const auto ex0 = [](const Vec2& x) { return Eigen::Vector2cd(-x.y(), x.x()); };
  for (std::size_t n = 0; n < tr.states.size(); ++n) {
    const double e = std::exp(-tr.t[n]);
    err = std::max(err, velocity_l2_error(b, tr.states[n].u, [&](const Vec2& x) { return Eigen::Vector2cd(e * ex0(x)); }) /
                            std::sqrt(kPi / 2));
  }
  return err;
}

void study_evolve(RunContext& ctx) {
  const auto& c = ctx.config();
  const DomainSpec& dom = c.domains.front();
  for (std::size_t lev = 0; lev < c.h_levels.size(); ++lev) {
    const auto mesh = ctx.mesh(dom, c.h_levels[lev]);
    const auto [alpha, alpha0] = resolve_alpha(c, mesh);
    const OperatorBundle b = assemble(mesh, alpha, c.beta);
    const State U0 = make_initial(b, c.initial, c.seed);
    const Forcing F = make_forcing(b, c.forcing, c.seed, 0);
    EvolutionOptions eo;
    eo.resolvent.alpha0 = alpha0;
    for (double q : c.q) {
      const EvolutionTrace tr = evolve(b, U0, F, TimeGrid(c.t_end, steps_at(c, lev)), q, eo);
      const double interp = interp_norm(b, U0, q, InterpMethod::semigroup);
      std::ostringstream os;
      tr.write_csv(os);
      const std::string tag = fmt::format("L{}_q{}", lev, q);
      ctx.write(fmt::format("trace_{}.csv", tag), os.str());
      json s = json::parse(tr.summary_json(interp));
      s["h"] = c.h_levels[lev];
      s["weak_residual"] = weak_solution_residual(b, tr, F);
      if (c.forcing == "manufactured_decay" && c.initial == "rigid_rotation") s["max_error"] = decay_error(b, tr);
      ctx.write(fmt::format("summary_{}.json", tag), s.dump(2) + "\n");
      for (const auto& f : tr.flags) ctx.flag(fmt::format("{}: {}", tag, f));
    }
  }
}

void study_maxreg(RunContext& ctx) {
  const auto& c = ctx.config();
  const DomainSpec& dom = c.domains.front();
  std::ostringstream table;
  table << "level,h,n_steps,q,member,ratio,pressure_ratio,dt_lq,AU_lq,F_lq\n";
  json summary = json::array();
  std::map<double, std::vector<double>> max_by_q;
  for (std::size_t lev = 0; lev < c.h_levels.size(); ++lev) {
    const auto mesh = ctx.mesh(dom, c.h_levels[lev]);
    const auto [alpha, alpha0] = resolve_alpha(c, mesh);
    const OperatorBundle b = assemble(mesh, alpha, c.beta);
    const int ns = steps_at(c, lev);
    for (double q : c.q) {
      std::vector<EvolutionTrace> traces(static_cast<std::size_t>(c.ensemble));
      parallel_for(c.ensemble, c.threads, [&](int m) {
        const State U0 = make_initial(b, "zero", c.seed);
        EvolutionOptions eo;
        eo.store_states = false;
        eo.resolvent.alpha0 = alpha0;
        eo.resolvent.estimate_condition = false;
        traces[static_cast<std::size_t>(m)] =
            evolve(b, U0, random_smooth_forcing(b, c.seed, static_cast<std::uint64_t>(m)), TimeGrid(c.t_end, ns), q, eo);
      });
      double rmin = std::numeric_limits<double>::infinity(), rmax = 0, pmin = rmin, pmax = 0;
      for (int m = 0; m < c.ensemble; ++m) {
        const auto& tr = traces[static_cast<std::size_t>(m)];
        const double r = max_reg_ratio(tr, 0.0), pr = pressure_ratio(tr);
        rmin = std::min(rmin, r); rmax = std::max(rmax, r);
        pmin = std::min(pmin, pr); pmax = std::max(pmax, pr);
        fmt::print(table, "{},{},{},{},{},{},{},{},{},{}\n", lev, csv_double(c.h_levels[lev]), ns, csv_double(q), m,
                   csv_double(r), csv_double(pr), csv_double(tr.dt_lq), csv_double(tr.AU_lq), csv_double(tr.F_lq));
      }
      max_by_q[q].push_back(rmax);
      summary.push_back({{"level", lev}, {"h", c.h_levels[lev]}, {"n_steps", ns}, {"q", q},
                         {"ratio_min", rmin}, {"ratio_max", rmax}, {"ratio_spread", rmax / rmin},
                         {"pressure_min", pmin}, {"pressure_max", pmax}, {"pressure_spread", pmax / pmin}});
    }
  }
  json out;
  out["ensembles"] = summary;
  json drift;
  for (const auto& [q, v] : max_by_q) {
    std::vector<double> d;
    for (std::size_t i = 1; i < v.size(); ++i) d.push_back(std::abs(v[i] - v[i - 1]) / v[i - 1]);
    drift[fmt::format("q={}", q)] = d;
  }
  out["drift_of_max_ratio"] = drift;
  ctx.write("maxreg.csv", table.str());
  ctx.write("maxreg.json", out.dump(2) + "\n");
}

void study_interp(RunContext& ctx) {
  const auto& c = ctx.config();
  const DomainSpec& dom = c.domains.front();
  const OperatorBundle b = assemble(ctx.mesh(dom, c.h_levels.front()), c.alpha, c.beta);
  std::ostringstream table;
  table << "member,q,semigroup,k_functional,ratio\n";
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int m = 0; m < c.ensemble; ++m) {
    const State U0 = m == 0 ? make_tied(b, rigid_rotation(b)) : random_smooth_state(b, c.seed, static_cast<std::uint64_t>(m));
    for (double q : c.q) {
      const double sg = interp_norm(b, U0, q, InterpMethod::semigroup);
      const double kf = interp_norm(b, U0, q, InterpMethod::k_functional);
      lo = std::min(lo, sg / kf);
      hi = std::max(hi, sg / kf);
      fmt::print(table, "{},{},{},{},{}\n", m, csv_double(q), csv_double(sg), csv_double(kf), csv_double(sg / kf));
    }
  }
  ctx.write("interp.csv", table.str());
  json s{{"ratio_min", lo}, {"ratio_max", hi}};
  ctx.write("interp.json", s.dump(2) + "\n");
}

}  // namespace

void ConvergenceTable::write_csv(std::ostream& os) const {
  fmt::print(os, "level,h,dt,error,secondary,order\n");
  for (std::size_t i = 0; i < rows.size(); ++i)
    fmt::print(os, "{},{},{},{},{},{}\n", rows[i].level, csv_double(rows[i].h), csv_double(rows[i].dt),
               csv_double(rows[i].error), csv_double(rows[i].secondary), i == 0 ? "" : csv_double(orders[i - 1]));
}

std::string ConvergenceTable::to_json() const {
  json j;
  j["target"] = target;
  j["parameter"] = parameter;
  json rs = json::array();
  for (const auto& r : rows)
    rs.push_back({{"level", r.level}, {"h", r.h}, {"dt", r.dt}, {"error", r.error}, {"secondary", r.secondary}});
  j["rows"] = rs;
  j["orders"] = orders;
  j["fitted_order"] = fitted_order;
  return j.dump(2);
}

ConvergenceTable convergence_study(const ExperimentConfig& c) {
  ConvergenceTable t;
  t.target = c.target;
  const DomainSpec& dom = c.domains.front();
  std::vector<double> par, err;
  if (c.target == "resolvent") {
    if (c.h_levels.size() < 3) throw InvalidArgument("convergence_study: need at least 3 mesh levels");
    t.parameter = "h";
    const cplx lam = c.lambdas && !c.lambdas->empty() ? c.lambdas->front() : cplx(1.0, 1.0);
    const StreamSolution S;
    const VectorField ue = [&](const Vec2& x) { return Eigen::Vector2cd(S.velocity(x).cast<cplx>()); };
    for (std::size_t lev = 0; lev < c.h_levels.size(); ++lev) {
      const OperatorBundle b = assemble(generate_mesh(dom, c.h_levels[lev]), c.alpha, c.beta);
      const auto sol = solve_resolvent(b, lam, S.resolvent_data(b, lam));
      ConvergenceRow r;
      r.level = static_cast<int>(lev);
      r.h = c.h_levels[lev];
      r.error = velocity_l2_error(b, sol.u, ue) / velocity_l2_error(b, CVec::Zero(b.n_velocity()), ue);
      r.secondary = pressure_l2_error(b, sol.p, [&](const Vec2& x) { return cplx(S.pressure(x)); });
      t.rows.push_back(r);
      par.push_back(r.h);
      err.push_back(r.error);
    }
  } else if (c.target == "evolve") {
    if (c.n_steps.size() < 3) throw InvalidArgument("convergence_study: need at least 3 time levels");
    t.parameter = "dt";
    const OperatorBundle b = assemble(generate_mesh(dom, c.h_levels.front()), c.alpha, c.beta);
    const State U0 = make_tied(b, rigid_rotation(b));
    const Forcing F = decay_forcing(b);
    for (std::size_t lev = 0; lev < c.n_steps.size(); ++lev) {
      const TimeGrid g(c.t_end, c.n_steps[lev]);
      const EvolutionTrace tr = evolve(b, U0, F, g, 2.0);
      ConvergenceRow r;
      r.level = static_cast<int>(lev);
      r.h = c.h_levels.front();
      r.dt = g.dt();
      r.error = decay_error(b, tr);
      const double e = std::exp(-c.t_end);
      r.secondary = velocity_l2_error(b, tr.states.back().u,
                                      [&](const Vec2& x) { return Eigen::Vector2cd(-e * x.y(), e * x.x()); }) /
                    (e * std::sqrt(kPi / 2));
      t.rows.push_back(r);
      par.push_back(r.dt);
      err.push_back(r.error);
    }
  } else {
    throw InvalidArgument("convergence_study: unknown target " + c.target);
  }
  for (std::size_t i = 1; i < par.size(); ++i)
    t.orders.push_back(std::log(err[i - 1] / err[i]) / std::log(par[i - 1] / par[i]));
  t.fitted_order = fitted_slope(par, err);
  return t;
}

int run(const ExperimentConfig& cfg) {
  validate(cfg);
  RunContext ctx(cfg);
  switch (cfg.study) {
    case Study::resolvent: study_resolvent(ctx); break;
    case Study::sweep: study_sweep(ctx); break;
    case Study::korn: study_korn(ctx); break;
    case Study::evolve: study_evolve(ctx); break;
    case Study::maxreg: study_maxreg(ctx); break;
    case Study::interp: study_interp(ctx); break;
    case Study::convergence: {
      const ConvergenceTable t = convergence_study(cfg);
      std::ostringstream os;
      t.write_csv(os);
      ctx.write("convergence.csv", os.str());
      ctx.write("convergence.json", t.to_json() + "\n");
      break;
    }
  }
  ctx.write_manifest();
  return ctx.flags().empty() ? kSuccess : kFlagged;
}

}  // namespace dynslip::cli
