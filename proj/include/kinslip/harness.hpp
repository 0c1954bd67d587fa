#pragma once

#include <filesystem>
#include <string>

#include "kinslip/cns.hpp"
#include "kinslip/kinetic.hpp"
#include "kinslip/knudsen.hpp"

namespace kinslip {

struct RunConfig {
  int schema_version = 1;
  std::string experiment = "converge";
  std::vector<double> epsilons{0.1, 0.05, 0.025};
  double beta = 0.5;
  double chi = 1.0;
  std::vector<double> beta_sweep{0.25, 0.5, 0.75};

  std::string model_kind = "bgk-matched-nu";
  double nu0 = 1.0;
  int sonine_order = 3;

  LatticeScheme scheme = LatticeScheme::UniformCartesian;
  std::array<int, 3> lattice_counts{24, 24, 24};
  double v_max = 6.2;

  int nx = 96;
  int nx_control = 192;
  double t_final = 0.5;
  double lambda_amp = 0.5;
  double k_weight = 4.0;

  double u_wall = 0.5;
  double theta_left = 1.0, theta_right = 1.0;
  std::string wall_law = "power-law";  // or "specular"

  std::string knudsen_variant = "shear";
  double gradient = 1.0;

  uint64_t seed = 1234;
  std::string output_dir = "out";

  void validate() const;
  static RunConfig from_json_file(const std::string& path);
  std::string to_json() const;
  CollisionModel make_model() const;
};

struct ConvergenceReport {
  std::vector<double> epsilons;
  std::vector<double> l2, linf_w, r_norm;
  // pairwise log2 ratios
  double l2_order_min = 0, l2_order_med = 0, l2_order_max = 0;
  double linf_order_min = 0, linf_order_med = 0, linf_order_max = 0;
  std::vector<double> l2_prefactor, linf_prefactor;  // norm / eps^order at target orders 2, 1
  double control_floor_l2 = 0;  // refined-grid estimate of the discretization floor
  bool ok_l2 = false, ok_linf = false;
};

ConvergenceReport run_convergence(const RunConfig& cfg);

struct SlipVerificationRow {
  double beta, epsilon;
  double measured_ratio;   // slip/shear, wall-averaged
  double predicted_ratio;  // eps^{1-beta} bI_u / (chi rho_wall)
  double rel_error;
  double theta_jump_left, theta_jump_right;
  double rho_wall;
  bool converged;
};

struct SlipVerification {
  std::vector<SlipVerificationRow> rows;
  // per-beta log-log slope of |ratio| vs eps (expect 1 - beta)
  std::vector<std::pair<double, double>> slopes;  // (beta, slope)
  std::vector<std::pair<double, std::string>> classified;  // (beta, family)
  double scaling_slope = 0;  // log |slip| vs (1-beta) log eps across the beta sweep
  bool offset_detected = false;  // |u-u_w|^2/4 in the critical family
  double offset_coefficient = 0;
  double resid_without_offset = 0, resid_with_offset = 0;
};

SlipVerification run_slip_verification(const RunConfig& cfg);

struct CrosscheckRow {
  std::string coefficient;
  double quadrature;
  double half_space;
  double rel_gap;
};

std::vector<CrosscheckRow> run_coefficient_crosscheck(const RunConfig& cfg);

// deterministic CSV + JSON summary emission; returns process exit code (0/2)
int emit_outputs(const RunConfig& cfg, const std::string& kind,
                 const std::vector<std::string>& csv_names,
                 const std::vector<std::string>& csv_bodies, const std::string& summary_json,
                 bool acceptance_ok);

std::string git_describe();
int worker_count();

// shared helpers for the CLI and tests
std::string csv_fields_profile(const SlabFields& f);
SlabFields cns_initial_profile(int nx, double amp);
FluidGradients slab_gradients(const SlabFields& f, size_t j);

}  // namespace kinslip
