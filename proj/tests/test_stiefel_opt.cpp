#include "doctest.h"

#include <cmath>
#include <vector>

#include "kentmix/errors.hpp"
#include "kentmix/random.hpp"
#include "kentmix/simulate.hpp"
#include "kentmix/stiefel_opt.hpp"

using namespace kentmix;

namespace {

std::vector<UnitVector3> random_points(Rng& rng, int n) {
  std::vector<UnitVector3> pts;
  for (int i = 0; i < n; ++i) {
    pts.push_back(
        UnitVector3::normalized(Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal())));
  }
  return pts;
}

FrameObjective random_objective(Rng& rng, double kappa, double beta) {
  const std::vector<UnitVector3> pts = random_points(rng, 30);
  std::vector<double> w;
  for (int i = 0; i < 30; ++i) w.push_back(rng.uniform());
  return FrameObjective::from_data(pts, w, kappa, beta);
}

double orthonormality(const Frame3& f) { return Frame3::orthonormality_error(f.matrix()); }

}  // namespace

TEST_CASE("FrameObjective sufficient statistics") {
  Rng rng(1);
  const std::vector<UnitVector3> pts = random_points(rng, 25);
  std::vector<double> w;
  for (int i = 0; i < 25; ++i) w.push_back(rng.uniform());
  const FrameObjective obj = FrameObjective::from_data(pts, w, 3.0, 1.0);
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
  double total = 0.0;
  for (int i = 0; i < 25; ++i) {
    m += w[i] * pts[i].vec();
    S += w[i] * pts[i].vec() * pts[i].vec().transpose();
    total += w[i];
  }
  CHECK((obj.m - m).norm() <= 1e-13);
  CHECK((obj.S - S).norm() <= 1e-13);
  CHECK((obj.S - obj.S.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(obj.S.trace() == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("frame_objective_value examples") {
  FrameObjective obj{1.0, 5.0, Eigen::Vector3d::UnitX(), Eigen::Matrix3d::Identity()};
  CHECK(frame_objective_value(Frame3::identity(), obj) == doctest::Approx(1.0));

  Rng rng(2);
  FrameObjective o = random_objective(rng, 4.0, 0.0);
  Eigen::Matrix3d f = sample_uniform_frame(rng).matrix();
  f.col(0) = o.m.normalized();
  const Eigen::Vector3d u = f.col(0).unitOrthogonal();
  f.col(1) = u;
  f.col(2) = f.col(0).cross(u);
  CHECK(frame_objective_value(Frame3(f), o) == doctest::Approx(4.0 * o.m.norm()));

  o.beta = 2.0;
  Eigen::Matrix3d swapped = f;
  swapped.col(1) = f.col(2);
  swapped.col(2) = f.col(1);
  const double base = frame_objective_value(Frame3(f), o);
  const double sw = frame_objective_value(Frame3(swapped), o);
  const double mean_part = 4.0 * o.m.dot(f.col(0));
  CHECK(sw - mean_part == doctest::Approx(-(base - mean_part)));
}

TEST_CASE("riemannian_gradient") {
  SUBCASE("identity frame with G = I projects to zero") {
    // kappa m = e1, 2 beta S xi2 = e2, -2 beta S xi3 = e3.
    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
    S(1, 1) = 1.0;
    S(2, 2) = -1.0;
    const FrameObjective obj{1.0, 0.5, Eigen::Vector3d::UnitX(), S};
    CHECK(euclidean_gradient(Eigen::Matrix3d::Identity(), obj).isApprox(Eigen::Matrix3d::Identity()));
    CHECK(riemannian_gradient(Frame3::identity(), obj).norm() <= 1e-15);
  }
  SUBCASE("xi1 column vanishes at the beta = 0 optimum") {
    Rng rng(3);
    const FrameObjective obj = random_objective(rng, 2.0, 0.0);
    Eigen::Matrix3d f;
    f.col(0) = obj.m.normalized();
    f.col(1) = f.col(0).unitOrthogonal();
    f.col(2) = f.col(0).cross(f.col(1));
    CHECK(riemannian_gradient(Frame3(f), obj).col(0).norm() <= 1e-12);
  }
  SUBCASE("tangency for random frames") {
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
      const FrameObjective obj = random_objective(rng, 1.0 + 10.0 * rng.uniform(), 3.0 * rng.uniform());
      const Frame3 f = sample_uniform_frame(rng);
      const Eigen::Matrix3d T = riemannian_gradient(f, obj);
      const Eigen::Matrix3d sym = f.matrix().transpose() * T + T.transpose() * f.matrix();
      CHECK(sym.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + T.norm()));
    }
  }
  SUBCASE("directional derivative matches finite differences") {
    Rng rng(5);
    const FrameObjective obj = random_objective(rng, 3.0, 1.2);
    const Frame3 f = sample_uniform_frame(rng);
    const Eigen::Matrix3d T = riemannian_gradient(f, obj);
    const double h = 1e-6;
    const double up = frame_objective_value(retract(f, h * T), obj);
    const double down = frame_objective_value(retract(f, -h * T), obj);
    CHECK((up - down) / (2.0 * h) == doctest::Approx(T.squaredNorm()).epsilon(1e-5));
  }
}

TEST_CASE("retract") {
  Rng rng(6);
  const Frame3 f = sample_uniform_frame(rng);
  CHECK(retract(f, Eigen::Matrix3d::Zero()) == f);

  for (int t = 0; t < 50; ++t) {
    const Frame3 g = sample_uniform_frame(rng);
    Eigen::Matrix3d step = Eigen::Matrix3d::NullaryExpr([&] { return rng.normal(); });
    CHECK(orthonormality(retract(g, 0.3 * step)) <= 1e-10);
  }

  // Second-order agreement with the straight step along a tangent direction.
  const FrameObjective obj = random_objective(rng, 2.0, 1.0);
  const Eigen::Matrix3d T = riemannian_gradient(f, obj).normalized();
  double prev = 0.0;
  for (int k = 0; k < 6; ++k) {
    const double t = 0.1 / std::pow(2.0, k);
    const double err = (retract(f, t * T).matrix() - (f.matrix() + t * T)).norm();
    if (k > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
    prev = err;
  }

  // Rank-deficient input.
  CHECK_THROWS_AS(retract(Frame3::identity(), -Eigen::Matrix3d::Identity()), RetractionError);
}

TEST_CASE("ascend_frame never decreases the objective") {
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    const FrameObjective obj =
        random_objective(rng, 0.1 + 20.0 * rng.uniform(), 10.0 * rng.uniform());
    const Frame3 start = sample_uniform_frame(rng);
    AscentConfig cfg;
    cfg.max_steps = 1 + t % 20;
    const Frame3 out = ascend_frame(start, obj, cfg);
    CHECK(frame_objective_value(out, obj) >= frame_objective_value(start, obj));
    CHECK(orthonormality(out) <= 1e-9);
  }
}

TEST_CASE("ascend_frame at a stationary frame returns it unchanged") {
  Eigen::Matrix3d S = Eigen::Vector3d(0.2, 0.7, 0.1).asDiagonal();
  const FrameObjective obj{2.0, 1.0, Eigen::Vector3d(3.0, 0.0, 0.0), S};
  Eigen::Matrix3d f;
  f << 1, 0, 0, 0, 1, 0, 0, 0, 1;
  CHECK(riemannian_gradient(Frame3(f), obj).norm() <= 1e-15);
  CHECK(ascend_frame(Frame3(f), obj) == Frame3(f));
}

TEST_CASE("beta = 0 ascent finds the mean direction") {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const FrameObjective obj = random_objective(rng, 1.0 + 5.0 * rng.uniform(), 0.0);
    AscentConfig cfg;
    cfg.max_steps = 500;
    const Frame3 out = ascend_frame(sample_uniform_frame(rng), obj, cfg);
    const double angle = std::acos(std::clamp(out.xi1().dot(obj.m.normalized()), -1.0, 1.0));
    CHECK(angle <= 1e-4);
  }
}

TEST_CASE("kappa = 0 ascent reaches the eigenvalue spread") {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    FrameObjective obj = random_objective(rng, 0.0, 1.5);
    obj.kappa = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(obj.S);
    const double want = 1.5 * (es.eigenvalues()(2) - es.eigenvalues()(0));
    AscentConfig cfg;
    cfg.max_steps = 2000;
    const Frame3 out = ascend_frame(sample_uniform_frame(rng), obj, cfg);
    CHECK(frame_objective_value(out, obj) == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("sign-flipped starts reach the same objective") {
  Rng rng(10);
  for (int t = 0; t < 20; ++t) {
    const FrameObjective obj = random_objective(rng, 5.0, 1.0);
    const Frame3 f = sample_uniform_frame(rng);
    Eigen::Matrix3d flipped = f.matrix();
    flipped.col(1) = -flipped.col(1);
    flipped.col(2) = -flipped.col(2);
    CHECK(frame_objective_value(f, obj) == frame_objective_value(Frame3(flipped), obj));
    AscentConfig cfg;
    cfg.max_steps = 2000;
    const double a = frame_objective_value(ascend_frame(f, obj, cfg), obj);
    const double b = frame_objective_value(ascend_frame(Frame3(flipped), obj, cfg), obj);
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
  }
}

TEST_CASE("moment_init_frame") {
  SUBCASE("concentrated data") {
    const std::vector<UnitVector3> pts(5, UnitVector3(1.0, 0.0, 0.0));
    const std::vector<double> w(5, 1.0);
    const Frame3 f = moment_init_frame(pts, w);
    CHECK((f.xi1() - Eigen::Vector3d::UnitX()).norm() <= 1e-12);
    CHECK(orthonormality(f) <= 1e-12);
  }
  SUBCASE("scatter spread along e2 gives xi2 = +-e2") {
    std::vector<UnitVector3> pts;
    for (double a : {-0.6, -0.3, 0.3, 0.6}) {
      pts.push_back(UnitVector3(std::cos(a), std::sin(a), 0.0));
    }
    for (double a : {-0.1, 0.1}) pts.push_back(UnitVector3(std::cos(a), 0.0, std::sin(a)));
    const std::vector<double> w(pts.size(), 1.0);
    const Frame3 f = moment_init_frame(pts, w);
    CHECK(std::abs(f.xi1().dot(Eigen::Vector3d::UnitX())) == doctest::Approx(1.0));
    CHECK(std::abs(f.xi2().dot(Eigen::Vector3d::UnitY())) == doctest::Approx(1.0));
    CHECK(std::abs(f.xi3().dot(Eigen::Vector3d::UnitZ())) == doctest::Approx(1.0));
  }
  SUBCASE("errors") {
    const std::vector<UnitVector3> pts{UnitVector3(1.0, 0.0, 0.0), UnitVector3(-1.0, 0.0, 0.0)};
    CHECK_THROWS_AS(moment_init_frame(pts, std::vector<double>{0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(moment_init_frame(pts, std::vector<double>{1.0, 1.0}), DegenerateDataError);
  }
  SUBCASE("random data is orthonormal") {
    Rng rng(11);
    for (int t = 0; t < 30; ++t) {
      const std::vector<UnitVector3> pts = random_points(rng, 20);
      std::vector<double> w;
      for (int i = 0; i < 20; ++i) w.push_back(rng.uniform());
      CHECK(orthonormality(moment_init_frame(pts, w)) <= 1e-12);
    }
  }
}
