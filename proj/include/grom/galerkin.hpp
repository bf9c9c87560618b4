#pragma once

#include <Eigen/Dense>
#include <vector>

#include "grom/database.hpp"
#include "grom/itsgm.hpp"
#include "grom/oracle.hpp"
#include "grom/snapshot.hpp"

namespace grom {

// Galerkin projection of the semi-discrete Burgers operator onto span(phi)
// around the mean field: with u = mean + phi a,
//   da/dt = mean_terms + (nu linear_operator + mean_coupling) a
//           + [a' quadratic_tensor[i] a]_i .
struct GalerkinRom {
  Eigen::MatrixXd phi;   // N_x x q, orthonormal columns
  Eigen::VectorXd mean;  // N_x
  double nu = 0.0;
  double dt = 0.0;

  Eigen::MatrixXd linear_operator;  // phi' Lap phi (viscosity factored out)
  Eigen::MatrixXd mean_coupling;    // -phi' d_x(mean .* phi_j), column j
  Eigen::VectorXd mean_terms;       // phi' (-d_x(mean^2)/2 + nu Lap mean)
  std::vector<Eigen::MatrixXd> quadratic_tensor;  // Q[i](j,k) = -phi_i' d_x(phi_j .* phi_k)/2
  Eigen::VectorXd a0;               // phi' (u0 - mean)
};

// Projects the oracle's own stencils; the initial coefficients come from the
// Burgers initial condition. Throws ValidationError when phi rows, mean size
// and cfg.n_x disagree or phi is not orthonormal.
GalerkinRom build_rom(const Eigen::MatrixXd& phi, const MeanField& mean,
                      const BurgersConfig& cfg, double nu);

// Classical RK4 with the oracle's dt; `times` must be a uniform grid whose
// spacing is an integer multiple of rom.dt (the oracle's snapshot grid).
// Returns the q x N_s coefficient matrix. Throws NumericalError with the
// step index when the trajectory diverges (||a|| > 1e6).
Eigen::MatrixXd integrate_rom(const GalerkinRom& rom, const Eigen::VectorXd& times);

// The intrusive baseline at an untrained parameter: ITSGM-interpolate the
// spatial basis, build the ROM there, integrate over the database's time
// grid. wall_time_s covers those three stages.
struct BaselineSolution {
  double parameter = 0.0;
  Eigen::MatrixXd reconstruction;  // mean + phi a(t)
  double wall_time_s = 0.0;
};

BaselineSolution baseline_predict(const TrainingDatabase& db, double query,
                                  const BurgersConfig& cfg, const ItsgmConfig& spatial);

}  // namespace grom
