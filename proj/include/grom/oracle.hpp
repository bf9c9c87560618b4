#pragma once

#include <Eigen/Dense>

#include "grom/snapshot.hpp"

namespace grom {

// Periodic second-order central stencils shared by the Burgers oracle and
// the Galerkin projection (the ROM must project exactly the discrete
// operators the truth was generated with).
namespace fd {
Eigen::VectorXd periodic_gradient(const Eigen::VectorXd& f, double dx);
Eigen::VectorXd periodic_laplacian(const Eigen::VectorXd& u, double dx);
}  // namespace fd

// Closed-form parametrized field on [0,1] x [0, t_final]:
//   f(x,t; mu) = sum_{k=1}^{r} k^-1 exp(-k mu / 4) sin(k pi x)
//                cos(k (1 + mu/50) 2 pi 4 t / t_final)
// Amplitudes and frequencies both depend on mu, so subspaces and singular
// values all move with the parameter. Snapshot rank is at most 2r.
struct AnalyticFamilyConfig {
  int n_x = 256;       // spatial points on [0,1], endpoints included
  int n_s = 200;       // snapshots
  double t_final = 4.0;
  int mode_count = 4;  // r
  double mu_min = 0.5;
  double mu_max = 2.5;

  void validate() const;  // n_x >= 32, n_s >= 16, 1 <= r <= 8
};

SnapshotSet analytic_field(const AnalyticFamilyConfig& cfg, double mu);

// Viscous Burgers on the periodic unit interval,
//   u_t = -(u^2/2)_x + nu u_xx,
// central differences in space, explicit midpoint RK2 in time, snapshots
// recorded every snapshot_stride steps (the initial state included).
struct BurgersConfig {
  int n_x = 512;            // periodic grid, x_i = i/n_x
  double dt = 5e-4;
  double t_final = 2.0;
  int snapshot_stride = 20;
  double nu_min = 0.005;    // parameter range (Reynolds-like: 1/nu)
  double nu_max = 0.05;

  void validate() const;
  // Stability bounds dt <= 0.4 dx^2 / nu and dt <= 0.4 dx / max|u0|;
  // violation throws ValidationError naming nu.
  void check_cfl(double nu) const;
};

// u0(x) = sin(2 pi x) + 0.5 sin(4 pi x) on the periodic grid.
Eigen::VectorXd burgers_initial_condition(int n_x);

// Throws ValidationError before stepping on a CFL violation and
// NumericalError naming the step if the integration produces non-finite
// values.
SnapshotSet solve_burgers(const BurgersConfig& cfg, double nu);

}  // namespace grom
