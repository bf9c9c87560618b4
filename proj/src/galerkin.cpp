#include "grom/galerkin.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "grom/errors.hpp"

namespace grom {

GalerkinRom build_rom(const Eigen::MatrixXd& phi, const MeanField& mean,
                      const BurgersConfig& cfg, double nu) {
  cfg.validate();
  const Eigen::Index n = phi.rows();
  const Eigen::Index q = phi.cols();
  if (n != cfg.n_x || mean.values.size() != n) {
    throw ValidationError("build_rom: phi has " + std::to_string(n) + " rows, mean has " +
                          std::to_string(mean.values.size()) + ", grid has " +
                          std::to_string(cfg.n_x) + " points");
  }
  const double ortho_defect =
      (phi.transpose() * phi - Eigen::MatrixXd::Identity(q, q)).norm();
  if (ortho_defect > 1e-8) {
    throw ValidationError("build_rom: basis columns not orthonormal, defect " +
                          std::to_string(ortho_defect));
  }

  const double dx = 1.0 / cfg.n_x;
  GalerkinRom rom;
  rom.phi = phi;
  rom.mean = mean.values;
  rom.nu = nu;
  rom.dt = cfg.dt;

  // Viscous projection, viscosity factored out: L = phi' Lap phi.
  Eigen::MatrixXd lap_phi(n, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    lap_phi.col(j) = fd::periodic_laplacian(phi.col(j), dx);
  }
  rom.linear_operator = phi.transpose() * lap_phi;

  // Advection by and of the mean: B_j = -d_x(mean .* phi_j) projected.
  Eigen::MatrixXd adv_phi(n, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    adv_phi.col(j) = -fd::periodic_gradient(mean.values.cwiseProduct(phi.col(j)), dx);
  }
  rom.mean_coupling = phi.transpose() * adv_phi;

  rom.mean_terms = phi.transpose() *
                   (-fd::periodic_gradient(0.5 * mean.values.cwiseAbs2(), dx) +
                    nu * fd::periodic_laplacian(mean.values, dx));

  // Quadratic convective projection, symmetric in (j, k).
  rom.quadratic_tensor.assign(static_cast<std::size_t>(q), Eigen::MatrixXd::Zero(q, q));
  for (Eigen::Index j = 0; j < q; ++j) {
    for (Eigen::Index k = j; k < q; ++k) {
      const Eigen::VectorXd term =
          -0.5 * fd::periodic_gradient(phi.col(j).cwiseProduct(phi.col(k)), dx);
      const Eigen::VectorXd proj = phi.transpose() * term;
      for (Eigen::Index i = 0; i < q; ++i) {
        rom.quadratic_tensor[static_cast<std::size_t>(i)](j, k) = proj(i);
        rom.quadratic_tensor[static_cast<std::size_t>(i)](k, j) = proj(i);
      }
    }
  }

  rom.a0 = phi.transpose() * (burgers_initial_condition(cfg.n_x) - mean.values);
  return rom;
}

namespace {

Eigen::VectorXd rom_rhs(const GalerkinRom& rom, const Eigen::MatrixXd& lin,
                        const Eigen::VectorXd& a) {
  Eigen::VectorXd out = rom.mean_terms + lin * a;
  for (std::size_t i = 0; i < rom.quadratic_tensor.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) += a.dot(rom.quadratic_tensor[i] * a);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd integrate_rom(const GalerkinRom& rom, const Eigen::VectorXd& times) {
  if (times.size() < 2) {
    throw ValidationError("integrate_rom: need at least 2 output times");
  }
  const double spacing = times(1) - times(0);
  for (Eigen::Index j = 1; j < times.size(); ++j) {
    if (std::abs(times(j) - times(j - 1) - spacing) > 1e-9 * spacing) {
      throw ValidationError("integrate_rom: output times not uniform at index " +
                            std::to_string(j));
    }
  }
  const double steps_per_record = spacing / rom.dt;
  const long m = std::lround(steps_per_record);
  if (m < 1 || std::abs(steps_per_record - static_cast<double>(m)) > 1e-6) {
    throw ValidationError("integrate_rom: output spacing " + std::to_string(spacing) +
                          " is not an integer multiple of dt=" + std::to_string(rom.dt));
  }

  const Eigen::MatrixXd lin = rom.nu * rom.linear_operator + rom.mean_coupling;
  const Eigen::Index q = rom.a0.size();
  Eigen::MatrixXd coeffs(q, times.size());
  Eigen::VectorXd a = rom.a0;
  coeffs.col(0) = a;

  const double dt = rom.dt;
  long step = 0;
  for (Eigen::Index rec = 1; rec < times.size(); ++rec) {
    for (long s = 0; s < m; ++s) {
      ++step;
      const Eigen::VectorXd k1 = rom_rhs(rom, lin, a);
      const Eigen::VectorXd k2 = rom_rhs(rom, lin, a + 0.5 * dt * k1);
      const Eigen::VectorXd k3 = rom_rhs(rom, lin, a + 0.5 * dt * k2);
      const Eigen::VectorXd k4 = rom_rhs(rom, lin, a + dt * k3);
      a += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!a.allFinite() || a.norm() > 1e6) {
        throw NumericalError("integrate_rom: trajectory diverged at step " +
                             std::to_string(step) + " (t=" + std::to_string(step * dt) + ")");
      }
    }
    coeffs.col(rec) = a;
  }
  return coeffs;
}

BaselineSolution baseline_predict(const TrainingDatabase& db, double query,
                                  const BurgersConfig& cfg, const ItsgmConfig& spatial) {
  db.validate();
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<std::pair<double, StiefelPoint>> pts;
  pts.reserve(db.triplets.size());
  for (const auto& t : db.triplets) pts.emplace_back(t.parameter, StiefelPoint(t.phi));
  const StiefelPoint phi = itsgm_interpolate(pts, query, spatial);

  const GalerkinRom rom = build_rom(phi.matrix(), db.mean, cfg, query);
  const Eigen::MatrixXd coeffs = integrate_rom(rom, db.times);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  BaselineSolution out;
  out.parameter = query;
  out.reconstruction = (phi.matrix() * coeffs).colwise() + db.mean.values;
  out.wall_time_s = elapsed;
  return out;
}

}  // namespace grom
