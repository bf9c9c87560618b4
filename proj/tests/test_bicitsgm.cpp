#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "grom/bicitsgm.hpp"
#include "grom/errors.hpp"
#include "grom/oracle.hpp"

using namespace grom;

namespace {

Eigen::MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index q, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd g(n, q);
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = dist(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, q);
}

AnalyticFamilyConfig small_family() {
  AnalyticFamilyConfig cfg;
  cfg.n_x = 64;
  cfg.n_s = 48;
  // Four separable modes -> every fluctuation matrix has rank exactly 4, so
  // the rank-4 databases below capture the data completely while the rank-2
  // and rank-3 ones genuinely truncate.
  cfg.mode_count = 4;
  return cfg;
}

TrainingDatabase analytic_database(int rank) {
  std::vector<SnapshotSet> sets;
  for (double mu : {0.5, 1.0, 1.5, 2.0, 2.5}) sets.push_back(analytic_field(small_family(), mu));
  return train_database(sets, rank);
}

// Independent spline oracle (dense tridiagonal solve) for the natural cubic
// spline through (xs, ys) evaluated at x.
double dense_spline_eval(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, double x) {
  const Eigen::Index n = xs.size();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  const Eigen::Index k = n - 2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double h0 = xs(i + 1) - xs(i);
    const double h1 = xs(i + 2) - xs(i + 1);
    a(i, i) = 2.0 * (h0 + h1);
    if (i > 0) a(i, i - 1) = h0;
    if (i + 1 < k) a(i, i + 1) = h1;
    rhs(i) = 6.0 * ((ys(i + 2) - ys(i + 1)) / h1 - (ys(i + 1) - ys(i)) / h0);
  }
  m.segment(1, k) = a.fullPivLu().solve(rhs);
  Eigen::Index seg = n - 2;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (x <= xs(i + 1)) {
      seg = i;
      break;
    }
  }
  const double h = xs(seg + 1) - xs(seg);
  const double a_ = (xs(seg + 1) - x) / h;
  const double b_ = (x - xs(seg)) / h;
  return a_ * ys(seg) + b_ * ys(seg + 1) +
         ((a_ * a_ * a_ - a_) * m(seg) + (b_ * b_ * b_ - b_) * m(seg + 1)) * h * h / 6.0;
}

SnapshotSet snapshot_like(const SnapshotSet& reference, const Eigen::MatrixXd& data) {
  SnapshotSet out = reference;
  out.data = data;
  return out;
}

}  // namespace

TEST_CASE("singular values are exact at training parameters") {
  const TrainingDatabase db = analytic_database(3);
  for (const PodTriplet& t : db.triplets) {
    const Eigen::VectorXd s = interpolate_singular_values(db, t.parameter);
    CHECK((s - t.sigma).cwiseAbs().maxCoeff() <= 1e-12 * t.sigma(0));
  }
}

TEST_CASE("constant spectra interpolate to themselves") {
  TrainingDatabase db = analytic_database(2);
  Eigen::VectorXd fixed(2);
  fixed << 7.0, 2.0;
  for (PodTriplet& t : db.triplets) t.sigma = fixed;
  const Eigen::VectorXd s = interpolate_singular_values(db, 1.23);
  CHECK(s(0) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(s(1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("singular-value interpolation matches a dense spline oracle") {
  const TrainingDatabase db = analytic_database(3);
  const Eigen::VectorXd params = db.parameters();
  for (double query : {0.7, 1.2, 1.8, 2.3}) {
    const Eigen::VectorXd s = interpolate_singular_values(db, query);
    for (Eigen::Index i = 0; i < 3; ++i) {
      Eigen::VectorXd ys(params.size());
      for (Eigen::Index k = 0; k < params.size(); ++k)
        ys(k) = db.triplets[static_cast<std::size_t>(k)].sigma(i);
      CHECK(s(i) == doctest::Approx(dense_spline_eval(params, ys, query)).epsilon(1e-10));
    }
  }
}

TEST_CASE("two training points fall back to the linear chord") {
  TrainingDatabase db = analytic_database(2);
  db.triplets.resize(2);
  Eigen::VectorXd s0(2), s1(2);
  s0 << 4.0, 1.0;
  s1 << 8.0, 3.0;
  db.triplets[0].sigma = s0;
  db.triplets[1].sigma = s1;  // parameters 0.5 and 1.0
  const Eigen::VectorXd s = interpolate_singular_values(db, 0.75);
  CHECK(s(0) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(s(1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("interpolated singular values are clamped away from zero") {
  TrainingDatabase db = analytic_database(2);
  // Plant a second spectrum value that dips negative under spline overshoot:
  // values 1, 0, 1, 0, 1 over five nodes force negative lobes between nodes.
  for (std::size_t k = 0; k < db.triplets.size(); ++k) {
    db.triplets[k].sigma(0) = 10.0;
    db.triplets[k].sigma(1) = (k % 2 == 0) ? 1.0 : 0.0;
  }
  bool saw_clamp = false;
  for (double query = 0.5; query <= 2.5; query += 0.01) {
    const Eigen::VectorXd s = interpolate_singular_values(db, query);
    CHECK(s.minCoeff() >= 0.0);
    if (s(1) == 1e-14 * s(0)) saw_clamp = true;
  }
  CHECK(saw_clamp);
}

TEST_CASE("calibration against the interpolated basis itself is the identity") {
  const StiefelPoint y(random_orthonormal(20, 4, 3));
  const Eigen::MatrixXd q = calibrate_basis(y, {{1.0, y}}, 3.0);
  CHECK((q - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("a zero distance short-circuits to plain alignment with that basis") {
  const StiefelPoint y(random_orthonormal(16, 3, 5));
  const Eigen::MatrixXd r = random_orthonormal(3, 3, 6);
  const StiefelPoint rotated((y.matrix() * r).eval());
  // Training point at distance zero holds y; aligning the rotated copy
  // toward it must recover r^-1 = r' exactly (up to rounding).
  const std::vector<std::pair<double, StiefelPoint>> training = {{0.5, StiefelPoint(random_orthonormal(16, 3, 7))},
                                                                 {0.0, y}};
  const Eigen::MatrixXd q = calibrate_basis(rotated, training, 3.0);
  CHECK((rotated.matrix() * q - y.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("calibration maximizes the weighted trace over random orthogonals") {
  std::mt19937 rng(11);
  const StiefelPoint interp(random_orthonormal(14, 3, 21));
  std::vector<std::pair<double, StiefelPoint>> training;
  for (unsigned k = 0; k < 4; ++k) {
    training.emplace_back(0.3 + 0.4 * k, StiefelPoint(random_orthonormal(14, 3, 30 + k)));
  }
  const double power = 3.0;
  const Eigen::MatrixXd q = calibrate_basis(interp, training, power);

  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(14, 3);
  double wmax = 0.0;
  for (const auto& [d, y] : training) wmax = std::max(wmax, std::pow(d, -power));
  for (const auto& [d, y] : training) target += std::pow(d, -power) / wmax * y.matrix();

  const double best = (target.transpose() * (interp.matrix() * q)).trace();
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::MatrixXd other = random_orthonormal(3, 3, 1000 + trial);
    CHECK((target.transpose() * (interp.matrix() * other)).trace() <= best + 1e-10);
  }
}

TEST_CASE("calibration rejects bad inputs") {
  const StiefelPoint y(random_orthonormal(8, 2, 40));
  CHECK_THROWS_AS(calibrate_basis(y, {}, 3.0), ValidationError);
  CHECK_THROWS_AS(calibrate_basis(y, {{1.0, y}}, 0.0), ValidationError);
  CHECK_THROWS_AS(calibrate_basis(y, {{-1.0, y}}, 3.0), ValidationError);
  const StiefelPoint wrong(random_orthonormal(8, 3, 41));
  CHECK_THROWS_AS(calibrate_basis(y, {{1.0, wrong}}, 3.0), ValidationError);
}

TEST_CASE("prediction at a training parameter recovers the training snapshots") {
  const TrainingDatabase db = analytic_database(4);
  BiCitsgmConfig cfg;
  for (double mu : {0.5, 1.5, 2.5}) {
    const PredictedSolution sol = predict(db, mu, cfg);
    const SnapshotSet truth = analytic_field(small_family(), mu);
    const double eps = mean_relative_error(truth, sol.reconstruction);
    CAPTURE(mu);
    CHECK(eps <= 1e-6);
  }
}

TEST_CASE("calibrated bases span the interpolated subspaces") {
  const TrainingDatabase db = analytic_database(4);
  BiCitsgmConfig cfg;
  const PredictedSolution sol = predict(db, 1.25, cfg);

  // Same ITSGM stages run standalone: the calibration must only rotate
  // inside the span, never change the subspace.
  std::vector<std::pair<double, StiefelPoint>> sp, tp;
  for (const auto& t : db.triplets) {
    sp.emplace_back(t.parameter, StiefelPoint(t.phi));
    tp.emplace_back(t.parameter, StiefelPoint(t.psi));
  }
  const StiefelPoint phi_i = itsgm_interpolate(sp, 1.25, cfg.spatial);
  const StiefelPoint psi_i = itsgm_interpolate(tp, 1.25, cfg.temporal);
  CHECK(geodesic_distance(StiefelPoint(sol.phi_cal), phi_i) <= 1e-10);
  CHECK(geodesic_distance(StiefelPoint(sol.psi_cal), psi_i) <= 1e-10);
}

TEST_CASE("prediction is deterministic") {
  const TrainingDatabase db = analytic_database(3);
  BiCitsgmConfig cfg;
  const PredictedSolution a = predict(db, 1.3, cfg);
  const PredictedSolution b = predict(db, 1.3, cfg);
  CHECK((a.reconstruction.array() == b.reconstruction.array()).all());
  CHECK((a.sigma.array() == b.sigma.array()).all());
  CHECK((a.phi_cal.array() == b.phi_cal.array()).all());
  CHECK((a.psi_cal.array() == b.psi_cal.array()).all());
}

TEST_CASE("prediction records a positive online wall time") {
  const TrainingDatabase db = analytic_database(3);
  const PredictedSolution sol = predict(db, 1.1, BiCitsgmConfig{});
  CHECK(sol.wall_time_s > 0.0);
  CHECK(sol.wall_time_s < 60.0);
}

TEST_CASE("stage labels survive in pipeline errors") {
  TrainingDatabase db = analytic_database(3);
  BiCitsgmConfig cfg;
  cfg.spatial.neighbor_count = 50;  // more neighbors than training points
  try {
    predict(db, 1.2, cfg);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("spatial itsgm") != std::string::npos);
  }
}

TEST_CASE("error metric: identical fields give zero") {
  const SnapshotSet truth = analytic_field(small_family(), 1.0);
  CHECK(mean_relative_error(truth, truth.data) == 0.0);
}

TEST_CASE("error metric: zero approximation gives one hundred percent") {
  const SnapshotSet truth = analytic_field(small_family(), 1.0);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(truth.data.rows(), truth.data.cols());
  CHECK(mean_relative_error(truth, zero) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("error metric matches a hand-built perturbation level") {
  const SnapshotSet truth = analytic_field(small_family(), 1.0);
  // Relative perturbation of each column by 1e-3 of itself: the time
  // integrals cancel exactly and the error is 0.1 percent.
  const Eigen::MatrixXd approx = truth.data * (1.0 + 1e-3);
  CHECK(mean_relative_error(truth, approx) == doctest::Approx(0.1).epsilon(1e-10));
}

TEST_CASE("error metric applies trapezoid time weights") {
  SnapshotSet truth = analytic_field(small_family(), 1.0);
  // Corrupt only the first column: its squared error enters with weight 1/2.
  Eigen::MatrixXd approx = truth.data;
  approx.col(0) = truth.data.col(0) * 2.0;
  double den = 0.0;
  const Eigen::Index ns = truth.data.cols();
  for (Eigen::Index j = 0; j < ns; ++j) {
    den += ((j == 0 || j == ns - 1) ? 0.5 : 1.0) * truth.data.col(j).squaredNorm();
  }
  const double expected = 100.0 * std::sqrt(0.5 * truth.data.col(0).squaredNorm() / den);
  CHECK(mean_relative_error(truth, approx) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("error metric honors spatial quadrature weights") {
  const SnapshotSet truth = analytic_field(small_family(), 1.0);
  Eigen::MatrixXd approx = truth.data;
  approx.row(0).array() += 1.0;  // error concentrated on one grid point

  Eigen::VectorXd uniform = Eigen::VectorXd::Ones(truth.data.rows());
  Eigen::VectorXd damped = uniform;
  damped(0) = 1e-6;  // nearly ignore the corrupted point
  const double e_uniform = mean_relative_error(truth, approx, &uniform);
  const double e_damped = mean_relative_error(truth, approx, &damped);
  CHECK(e_uniform == doctest::Approx(mean_relative_error(truth, approx)).epsilon(1e-12));
  CHECK(e_damped < 1e-2 * e_uniform);

  Eigen::VectorXd negative = uniform;
  negative(3) = -1.0;
  CHECK_THROWS_AS(mean_relative_error(truth, approx, &negative), ValidationError);
  Eigen::VectorXd short_w = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(mean_relative_error(truth, approx, &short_w), ValidationError);
}

TEST_CASE("error metric rejects zero-norm truth and shape mismatches") {
  SnapshotSet truth = analytic_field(small_family(), 1.0);
  const SnapshotSet zero_truth =
      snapshot_like(truth, Eigen::MatrixXd::Zero(truth.data.rows(), truth.data.cols()));
  CHECK_THROWS_AS(mean_relative_error(zero_truth, zero_truth.data), NumericalError);
  CHECK_THROWS_AS(mean_relative_error(truth, Eigen::MatrixXd::Zero(3, 3)), ValidationError);

  SnapshotSet shifted = truth;
  shifted.times.array() += 1.0;
  CHECK_THROWS_AS(mean_relative_error(truth, shifted), ValidationError);
}
