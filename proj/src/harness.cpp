#include "kinslip/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

namespace kinslip {

using nlohmann::json;

void RunConfig::validate() const {
  if (epsilons.empty()) throw std::invalid_argument("config: epsilon list empty");
  for (size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1]))
      throw std::invalid_argument("config: epsilon list must be strictly decreasing");
  if (wall_law == "power-law") {
    if (!(beta > 0)) throw std::invalid_argument("config: beta must be positive");
    for (double e : epsilons)
      if (chi * std::pow(e, beta) > 1.0)
        throw std::invalid_argument("config: chi eps^beta exceeds 1 (accommodation in [0,1])");
  }
  if (nx < 4) throw std::invalid_argument("config: nx too small");
  if (t_final <= 0) throw std::invalid_argument("config: t_final must be positive");
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j = json::parse(in);
  RunConfig c;
  c.schema_version = j.value("schema_version", 1);
  if (c.schema_version != 1) throw std::runtime_error("unsupported schema_version");
  c.experiment = j.value("experiment", c.experiment);
  if (j.contains("epsilons")) c.epsilons = j["epsilons"].get<std::vector<double>>();
  c.beta = j.value("beta", c.beta);
  c.chi = j.value("chi", c.chi);
  if (j.contains("beta_sweep")) c.beta_sweep = j["beta_sweep"].get<std::vector<double>>();
  if (j.contains("model")) {
    c.model_kind = j["model"].value("kind", c.model_kind);
    c.nu0 = j["model"].value("nu0", c.nu0);
    c.sonine_order = j["model"].value("sonine_order", c.sonine_order);
  }
  if (j.contains("lattice")) {
    c.scheme = lattice_scheme_from_string(j["lattice"].value("scheme", std::string("uniform-cartesian")));
    if (j["lattice"].contains("counts")) {
      auto v = j["lattice"]["counts"].get<std::vector<int>>();
      if (v.size() != 3) throw std::runtime_error("lattice counts must have 3 entries");
      c.lattice_counts = {v[0], v[1], v[2]};
    }
    c.v_max = j["lattice"].value("v_max", c.v_max);
  }
  c.nx = j.value("nx", c.nx);
  c.nx_control = j.value("nx_control", c.nx_control);
  c.t_final = j.value("t_final", c.t_final);
  c.lambda_amp = j.value("lambda_amp", c.lambda_amp);
  c.k_weight = j.value("k_weight", c.k_weight);
  if (j.contains("walls")) {
    c.u_wall = j["walls"].value("u_wall", c.u_wall);
    c.theta_left = j["walls"].value("theta_left", c.theta_left);
    c.theta_right = j["walls"].value("theta_right", c.theta_right);
    c.wall_law = j["walls"].value("law", c.wall_law);
  }
  c.knudsen_variant = j.value("knudsen_variant", c.knudsen_variant);
  c.gradient = j.value("gradient", c.gradient);
  c.seed = j.value("seed", c.seed);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.validate();
  return c;
}

std::string RunConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["experiment"] = experiment;
  j["epsilons"] = epsilons;
  j["beta"] = beta;
  j["chi"] = chi;
  j["beta_sweep"] = beta_sweep;
  j["model"] = {{"kind", model_kind}, {"nu0", nu0}, {"sonine_order", sonine_order}};
  j["lattice"] = {{"scheme", to_string(scheme)},
                  {"counts", std::vector<int>{lattice_counts[0], lattice_counts[1], lattice_counts[2]}},
                  {"v_max", v_max}};
  j["nx"] = nx;
  j["nx_control"] = nx_control;
  j["t_final"] = t_final;
  j["lambda_amp"] = lambda_amp;
  j["k_weight"] = k_weight;
  j["walls"] = {{"u_wall", u_wall},
                {"theta_left", theta_left},
                {"theta_right", theta_right},
                {"law", wall_law}};
  j["knudsen_variant"] = knudsen_variant;
  j["gradient"] = gradient;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  return j.dump(2);
}

CollisionModel RunConfig::make_model() const {
  auto kind = collision_kind_from_string(model_kind);
  switch (kind) {
    case CollisionKind::BgkConstantNu: return CollisionModel::bgk_constant(nu0, 1.0, v_max);
    case CollisionKind::BgkMatchedNu: return CollisionModel::bgk_matched(1.0, v_max, sonine_order);
    case CollisionKind::HardSphereLinearized:
      return CollisionModel::hard_sphere(kHsNuZeroRaw, sonine_order, v_max);
  }
  throw std::logic_error("unreachable");
}

int worker_count() {
  const char* env = std::getenv("KINSLIP_WORKERS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n > 0 ? n : 1;
}

std::string git_describe() {
  const char* env = std::getenv("KINSLIP_GIT_DESCRIBE");
  if (env) return env;
  FILE* p = ::popen("git describe --always --dirty 2>/dev/null", "r");
  if (!p) return "unknown";
  char buf[256] = {0};
  std::string out;
  while (fgets(buf, sizeof(buf), p)) out += buf;
  ::pclose(p);
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return out.empty() ? "unknown" : out;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n == 0 ? 0.0 : (n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]));
}

}  // namespace

SlabFields cns_initial_profile(int nx, double amp) {
  SlabFields f;
  f.x.resize(nx);
  f.resize(nx);
  for (int j = 0; j < nx; ++j) {
    f.x[j] = (j + 0.5) / nx;
    double c = std::cos(kPi * f.x[j]);
    f.rho[j] = 1.0 + amp * c;
    f.u1[j] = 0.0;
    f.u2[j] = amp * c;
    f.u3[j] = 0.0;
    f.theta[j] = 1.0 + 0.5 * amp * c;
  }
  return f;
}

FluidGradients slab_gradients(const SlabFields& f, size_t j) {
  const size_t n = f.size();
  const double dx = 1.0 / n;
  auto d = [&](const std::vector<double>& v) {
    if (j == 0) return (-1.5 * v[0] + 2.0 * v[1] - 0.5 * v[2]) / dx;
    if (j == n - 1) return (1.5 * v[n - 1] - 2.0 * v[n - 2] + 0.5 * v[n - 3]) / dx;
    return (v[j + 1] - v[j - 1]) / (2.0 * dx);
  };
  FluidGradients g;
  g.grad_u[0][0] = d(f.u1);
  g.grad_u[0][1] = d(f.u2);
  g.grad_u[0][2] = d(f.u3);
  g.grad_theta = {d(f.theta), 0.0, 0.0};
  return g;
}

ConvergenceReport run_convergence(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.epsilons.size() < 3)
    throw std::invalid_argument("run_convergence: need >= 3 epsilon points");
  CollisionModel model = cfg.make_model();
  auto lat = std::make_shared<VelocityLattice>(cfg.scheme, cfg.lattice_counts, cfg.v_max);

  const std::vector<double> checkpoints{0.1 * cfg.t_final, 0.3 * cfg.t_final, 0.6 * cfg.t_final,
                                        cfg.t_final};

  auto run_one = [&](double eps, int nx) {
    const double amp = cfg.lambda_amp * std::pow(eps, 1.5);
    SlabFields init = cns_initial_profile(nx, amp);

    CnsConfig cc;
    cc.nx = nx;
    cc.epsilon = eps;
    cc.bc_left = BCFamily{};  // complete slip (specular regime)
    cc.bc_right = BCFamily{};
    CnsSolver cns(init, cc, model);

    std::vector<FluidState> states(nx);
    std::vector<FluidGradients> grads(nx);
    auto fill = [&](const SlabFields& f) {
      for (int j = 0; j < nx; ++j) {
        states[j] = FluidState{f.rho[j], {f.u1[j], f.u2[j], f.u3[j]}, f.theta[j]};
        grads[j] = slab_gradients(f, j);
      }
    };
    fill(init);
    KineticDistribution F = reconstruct(init.x, states, grads, eps, model, lat);

    WallPair walls;  // specular by default
    RemainderWeight wk{cfg.k_weight};
    RemainderNorms worst;
    const double dt0 = 0.45 / (nx * lat->v_max());
    for (double tc : checkpoints) {
      cns.advance_to(tc);
      while (F.time < tc - 1e-13) {
        double dt = std::min(dt0, tc - F.time);
        step(F, dt, eps, model, walls);
      }
      fill(cns.fields());
      RemainderNorms nr = remainder_norms(F, states, grads, eps, wk, model, true);
      worst.l2 = std::max(worst.l2, nr.l2);
      worst.linf_w = std::max(worst.linf_w, nr.linf_w);
      if (nr.r_norm)
        worst.r_norm = std::max(worst.r_norm.value_or(0.0), nr.r_norm.value());
    }
    return worst;
  };

  ConvergenceReport rep;
  rep.epsilons = cfg.epsilons;
  rep.l2.resize(cfg.epsilons.size());
  rep.linf_w.resize(cfg.epsilons.size());
  rep.r_norm.resize(cfg.epsilons.size());

  const int nw = worker_count();
  if (nw > 1) {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int w = 0; w < nw; ++w)
      pool.emplace_back([&] {
        size_t i;
        while ((i = next.fetch_add(1)) < cfg.epsilons.size()) {
          auto nr = run_one(cfg.epsilons[i], cfg.nx);
          rep.l2[i] = nr.l2;
          rep.linf_w[i] = nr.linf_w;
          rep.r_norm[i] = nr.r_norm.value_or(0.0);
        }
      });
    for (auto& t : pool) t.join();
  } else {
    for (size_t i = 0; i < cfg.epsilons.size(); ++i) {
      auto nr = run_one(cfg.epsilons[i], cfg.nx);
      rep.l2[i] = nr.l2;
      rep.linf_w[i] = nr.linf_w;
      rep.r_norm[i] = nr.r_norm.value_or(0.0);
    }
  }

  auto orders = [&](const std::vector<double>& nrm, double& mn, double& md, double& mx) {
    std::vector<double> o;
    for (size_t i = 0; i + 1 < nrm.size(); ++i)
      o.push_back(std::log(nrm[i] / nrm[i + 1]) /
                  std::log(cfg.epsilons[i] / cfg.epsilons[i + 1]));
    mn = *std::min_element(o.begin(), o.end());
    mx = *std::max_element(o.begin(), o.end());
    md = median(o);
  };
  orders(rep.l2, rep.l2_order_min, rep.l2_order_med, rep.l2_order_max);
  orders(rep.linf_w, rep.linf_order_min, rep.linf_order_med, rep.linf_order_max);
  for (size_t i = 0; i < cfg.epsilons.size(); ++i) {
    rep.l2_prefactor.push_back(rep.l2[i] / std::pow(cfg.epsilons[i], 2.0));
    rep.linf_prefactor.push_back(rep.linf_w[i] / cfg.epsilons[i]);
  }
  // discretization-error floor: one refined control run at the smallest eps
  if (cfg.nx_control > cfg.nx) {
    auto nr = run_one(cfg.epsilons.back(), cfg.nx_control);
    rep.control_floor_l2 = std::abs(nr.l2 - rep.l2.back());
  }
  rep.ok_l2 = rep.l2_order_med >= 1.8;
  rep.ok_linf = rep.linf_order_med >= 0.9;
  return rep;
}

namespace {

CouetteConfig couette_from(const RunConfig& cfg, double beta, double eps) {
  CouetteConfig cc;
  cc.u_wall = cfg.u_wall;
  cc.theta_left = cfg.theta_left;
  cc.theta_right = cfg.theta_right;
  cc.epsilon = eps;
  cc.law = (cfg.wall_law == "specular") ? AccommodationLaw::specular()
                                        : AccommodationLaw::power_law(cfg.chi, beta);
  cc.nx = cfg.nx;
  cc.lattice_counts = cfg.lattice_counts;
  cc.v_max = cfg.v_max;
  cc.scheme = cfg.scheme;
  return cc;
}

}  // namespace

SlipVerification run_slip_verification(const RunConfig& cfg) {
  cfg.validate();
  CollisionModel model = cfg.make_model();
  SlipCoefficients sc = compute_slip_coefficients(model, cfg.theta_left);
  SlipVerification out;

  auto run_pair = [&](double beta, double eps) {
    CouetteResult r = steady_couette(couette_from(cfg, beta, eps), model);
    SlipVerificationRow row;
    row.beta = beta;
    row.epsilon = eps;
    row.converged = r.converged;
    row.measured_ratio = 0.5 * (r.left.ratio + r.right.ratio);
    row.rho_wall = 0.5 * (r.left.rho_wall + r.right.rho_wall);
    if (cfg.wall_law == "specular") {
      row.predicted_ratio = 0.0;
      row.rel_error = 0.0;
    } else {
      BCFamily fam = boundary_family(AccommodationLaw::power_law(cfg.chi, beta), eps, sc);
      row.predicted_ratio = fam.slip_u(row.rho_wall);
      row.rel_error = std::abs(row.measured_ratio - row.predicted_ratio) /
                      std::max(std::abs(row.predicted_ratio), 1e-300);
    }
    row.theta_jump_left = r.left.theta_jump;
    row.theta_jump_right = r.right.theta_jump;
    return std::make_pair(row, r);
  };

  const std::vector<double> eps_pair =
      cfg.epsilons.size() >= 2
          ? std::vector<double>{cfg.epsilons[0], cfg.epsilons[1]}
          : std::vector<double>{cfg.epsilons[0], 0.5 * cfg.epsilons[0]};

  std::vector<double> sweep_x, sweep_y;  // scaling collapse across the beta sweep
  for (double beta : cfg.beta_sweep) {
    std::vector<double> lx, ly;
    for (double eps : eps_pair) {
      auto [row, r] = run_pair(beta, eps);
      out.rows.push_back(row);
      if (std::abs(row.measured_ratio) > 0) {
        lx.push_back(std::log(eps));
        ly.push_back(std::log(std::abs(row.measured_ratio)));
      }
      if (eps == eps_pair[0] && std::abs(row.measured_ratio) > 0) {
        sweep_x.push_back((1.0 - beta) * std::log(eps));
        sweep_y.push_back(std::log(std::abs(row.measured_ratio)));
      }
    }
    double slope = 0;
    if (lx.size() >= 2) slope = fit_line(lx, ly).second;
    out.slopes.emplace_back(beta, slope);
    // specular walls transmit no tangential stress: no finite slip/shear law
    std::string cls;
    if (cfg.wall_law == "specular")
      cls = "complete-slip";
    else
      cls = slope < -0.2   ? "complete-slip"
            : slope <= 0.2 ? "navier-slip-critical"
                           : "navier-slip-sub-linear";
    out.classified.emplace_back(beta, cls);
  }
  if (sweep_x.size() >= 2) out.scaling_slope = fit_line(sweep_x, sweep_y).second;

  // beta = 1: two-temperature moving walls isolate the |u-u_w|^2/4 offset
  {
    RunConfig c2 = cfg;
    c2.theta_left = 0.9;
    c2.theta_right = 1.1;
    c2.u_wall = std::max(cfg.u_wall, 0.6);
    CouetteResult rr = steady_couette(couette_from(c2, 1.0, eps_pair[0]), model);
    double r0 = 0, r1 = 0, num = 0, den = 0;
    for (const WallMeasurement* m : {&rr.left, &rr.right}) {
      double base = m->theta_jump - sc.cI_theta / (cfg.chi * m->rho_wall) * m->dtheta_n;
      r0 += std::abs(base);
      r1 += std::abs(base - 0.25 * m->u_slip_sq);
      num += base * 0.25 * m->u_slip_sq;
      den += 0.25 * m->u_slip_sq * 0.25 * m->u_slip_sq;
    }
    out.resid_without_offset = r0;
    out.resid_with_offset = r1;
    out.offset_coefficient = den > 0 ? num / den : 0.0;
    out.offset_detected = r1 < 0.5 * r0;
  }
  return out;
}

std::vector<CrosscheckRow> run_coefficient_crosscheck(const RunConfig& cfg) {
  cfg.validate();
  std::vector<CrosscheckRow> rows;
  auto add = [&](const std::string& name, const CollisionModel& m, SlipVariant variant,
                 double quad) {
    HalfSpaceProblem p;
    p.ordinates = HalfSpaceProblem::default_ordinates();
    p.frame = WallFrame::slab_left();
    p.model = m;
    auto ex = extract_slip(p, variant, 1.0, 1.0);
    CrosscheckRow r{name, quad, ex.coefficient,
                    std::abs(ex.coefficient - quad) / std::max(std::abs(quad), 1e-300)};
    rows.push_back(r);
  };
  CollisionModel bgk = CollisionModel::bgk_constant(1.0, 1.0, cfg.v_max);
  auto [bu, bt] = slip_coefficients_first(bgk, 1.0);
  add("bI_u_bgk", bgk, SlipVariant::Shear, bu);
  add("bI_theta_bgk", bgk, SlipVariant::Heat, bt);
  if (cfg.model_kind == "hard-sphere-linearized") {
    CollisionModel hs = cfg.make_model();
    auto [hu, ht] = slip_coefficients_first(hs, 1.0);
    add("bI_u_hs", hs, SlipVariant::Shear, hu);
    add("bI_theta_hs", hs, SlipVariant::Heat, ht);
  }
  return rows;
}

std::string csv_fields_profile(const SlabFields& f) {
  std::ostringstream os;
  os << "x,rho,u1,u2,u3,theta\n";
  for (size_t j = 0; j < f.size(); ++j)
    os << fmt(f.x[j]) << ',' << fmt(f.rho[j]) << ',' << fmt(f.u1[j]) << ',' << fmt(f.u2[j]) << ','
       << fmt(f.u3[j]) << ',' << fmt(f.theta[j]) << '\n';
  return os.str();
}

int emit_outputs(const RunConfig& cfg, const std::string& kind,
                 const std::vector<std::string>& csv_names,
                 const std::vector<std::string>& csv_bodies, const std::string& summary_json,
                 bool acceptance_ok) {
  namespace fs = std::filesystem;
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("emit_outputs: cannot create " + dir.string());
  for (size_t i = 0; i < csv_names.size(); ++i) {
    std::ofstream out(dir / csv_names[i]);
    if (!out) throw std::runtime_error("emit_outputs: cannot write " + csv_names[i]);
    out << csv_bodies[i];
  }
  json s = json::parse(summary_json.empty() ? "{}" : summary_json);
  s["experiment"] = kind;
  s["config"] = json::parse(cfg.to_json());
  s["provenance"] = git_describe();
  s["acceptance_ok"] = acceptance_ok;
  std::ofstream out(dir / (kind + "_summary.json"));
  out << s.dump(2) << "\n";
  return acceptance_ok ? 0 : 2;
}

}  // namespace kinslip
