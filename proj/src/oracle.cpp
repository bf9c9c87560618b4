#include "grom/oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "grom/errors.hpp"

namespace grom {

namespace fd {

Eigen::VectorXd periodic_gradient(const Eigen::VectorXd& f, double dx) {
  const Eigen::Index n = f.size();
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index ip = (i + 1) % n;
    const Eigen::Index im = (i + n - 1) % n;
    g(i) = (f(ip) - f(im)) / (2.0 * dx);
  }
  return g;
}

Eigen::VectorXd periodic_laplacian(const Eigen::VectorXd& u, double dx) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd l(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index ip = (i + 1) % n;
    const Eigen::Index im = (i + n - 1) % n;
    l(i) = (u(ip) - 2.0 * u(i) + u(im)) / (dx * dx);
  }
  return l;
}

}  // namespace fd

void AnalyticFamilyConfig::validate() const {
  if (n_x < 32) throw ValidationError("analytic: n_x must be >= 32, got " + std::to_string(n_x));
  if (n_s < 16) throw ValidationError("analytic: n_s must be >= 16, got " + std::to_string(n_s));
  if (mode_count < 1 || mode_count > 8) {
    throw ValidationError("analytic: mode_count must lie in [1, 8], got " +
                          std::to_string(mode_count));
  }
  if (!(t_final > 0.0)) throw ValidationError("analytic: t_final must be positive");
  if (!(mu_min < mu_max)) throw ValidationError("analytic: need mu_min < mu_max");
}

SnapshotSet analytic_field(const AnalyticFamilyConfig& cfg, double mu) {
  cfg.validate();
  constexpr double pi = std::numbers::pi;

  SnapshotSet out;
  out.field_name = "u";
  out.parameter = mu;
  out.times = Eigen::VectorXd::LinSpaced(cfg.n_s, 0.0, cfg.t_final);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(cfg.n_x, 0.0, 1.0);

  out.data = Eigen::MatrixXd::Zero(cfg.n_x, cfg.n_s);
  for (int k = 1; k <= cfg.mode_count; ++k) {
    const double amp = std::exp(-k * mu / 4.0) / k;
    const double omega = k * (1.0 + mu / 50.0) * 2.0 * pi * 4.0 / cfg.t_final;
    const Eigen::VectorXd spatial = (k * pi * x.array()).sin();
    const Eigen::VectorXd temporal = (omega * out.times.array()).cos();
    out.data.noalias() += amp * spatial * temporal.transpose();
  }
  return out;
}

void BurgersConfig::validate() const {
  if (n_x < 8) throw ValidationError("burgers: n_x must be >= 8, got " + std::to_string(n_x));
  if (!(dt > 0.0)) throw ValidationError("burgers: dt must be positive");
  if (!(t_final > dt)) throw ValidationError("burgers: t_final must exceed dt");
  if (snapshot_stride < 1) {
    throw ValidationError("burgers: snapshot_stride must be >= 1, got " +
                          std::to_string(snapshot_stride));
  }
  if (!(nu_min > 0.0) || !(nu_min < nu_max)) {
    throw ValidationError("burgers: need 0 < nu_min < nu_max");
  }
}

Eigen::VectorXd burgers_initial_condition(int n_x) {
  constexpr double pi = std::numbers::pi;
  Eigen::VectorXd u0(n_x);
  for (int i = 0; i < n_x; ++i) {
    const double x = static_cast<double>(i) / n_x;
    u0(i) = std::sin(2.0 * pi * x) + 0.5 * std::sin(4.0 * pi * x);
  }
  return u0;
}

void BurgersConfig::check_cfl(double nu) const {
  validate();
  if (!(nu > 0.0)) {
    throw ValidationError("burgers: viscosity nu=" + std::to_string(nu) + " must be positive");
  }
  const double dx = 1.0 / n_x;
  const double viscous_limit = 0.4 * dx * dx / nu;
  const double advective_limit = 0.4 * dx / burgers_initial_condition(n_x).cwiseAbs().maxCoeff();
  if (dt > viscous_limit) {
    throw ValidationError("burgers: CFL violation at nu=" + std::to_string(nu) + ": dt=" +
                          std::to_string(dt) + " exceeds viscous limit " +
                          std::to_string(viscous_limit));
  }
  if (dt > advective_limit) {
    throw ValidationError("burgers: CFL violation at nu=" + std::to_string(nu) + ": dt=" +
                          std::to_string(dt) + " exceeds advective limit " +
                          std::to_string(advective_limit));
  }
}

namespace {
// Conservative central flux: u_t = -(u^2/2)_x + nu u_xx.
Eigen::VectorXd burgers_rhs(const Eigen::VectorXd& u, double dx, double nu) {
  return -fd::periodic_gradient(0.5 * u.cwiseAbs2(), dx) + nu * fd::periodic_laplacian(u, dx);
}
}  // namespace

SnapshotSet solve_burgers(const BurgersConfig& cfg, double nu) {
  cfg.check_cfl(nu);
  const double dx = 1.0 / cfg.n_x;
  const auto n_steps = static_cast<long>(std::llround(cfg.t_final / cfg.dt));
  const long n_records = n_steps / cfg.snapshot_stride + 1;

  SnapshotSet out;
  out.field_name = "u";
  out.parameter = nu;
  out.times.resize(n_records);
  out.data.resize(cfg.n_x, n_records);

  Eigen::VectorXd u = burgers_initial_condition(cfg.n_x);
  long rec = 0;
  out.times(rec) = 0.0;
  out.data.col(rec++) = u;

  for (long step = 1; step <= n_steps; ++step) {
    const Eigen::VectorXd u_half = u + 0.5 * cfg.dt * burgers_rhs(u, dx, nu);
    u += cfg.dt * burgers_rhs(u_half, dx, nu);
    if (!u.allFinite()) {
      throw NumericalError("burgers: instability at step " + std::to_string(step) + " (t=" +
                           std::to_string(step * cfg.dt) + ", nu=" + std::to_string(nu) + ")");
    }
    if (step % cfg.snapshot_stride == 0) {
      out.times(rec) = step * cfg.dt;
      out.data.col(rec++) = u;
    }
  }
  out.data.conservativeResize(cfg.n_x, rec);
  out.times.conservativeResize(rec);
  return out;
}

}  // namespace grom
