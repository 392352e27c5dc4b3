#include <doctest.h>

#include <Eigen/Geometry>
#include <random>

#include "fixtures.hpp"
#include "pgs/grasp_model.hpp"

using namespace pgs;

namespace {

Contact contact_at(const Vec3& p, const Vec3& n, double mu = 1.0) {
  return Contact::with_default_frame(p, n, mu);
}

}  // namespace

TEST_CASE("wrench basis at the origin has zero torque rows") {
  const Contact c = contact_at(Vec3::Zero(), Vec3::UnitZ());
  const Mat63 b = contact_wrench_basis(c);
  CHECK(b.block<3, 3>(3, 0).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  // Force rows are the frame vectors themselves.
  CHECK((b.block<3, 1>(0, 2) - Vec3::UnitZ()).norm() == doctest::Approx(0.0));
}

TEST_CASE("unit normal force at an offset position produces p x f torque") {
  const Contact c = contact_at(Vec3(0.1, 0.0, 0.0), Vec3::UnitZ());
  const Mat63 b = contact_wrench_basis(c);
  const Vec3 torque = b.block<3, 1>(3, 2);
  CHECK(torque.x() == doctest::Approx(0.0));
  CHECK(torque.y() == doctest::Approx(-0.1));
  CHECK(torque.z() == doctest::Approx(0.0));
}

TEST_CASE("wrench basis matches an independent moment computation") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const Vec3 n = Vec3(u(rng), u(rng), u(rng)).normalized();
    const Contact c = contact_at(p, n, 0.5);
    const Mat63 b = contact_wrench_basis(c);
    const Vec3 dirs[3] = {c.tangent1, c.tangent2, c.normal};
    for (int k = 0; k < 3; ++k) {
      const Vec3 f = dirs[k];
      const Vec3 moment = p.cross(f);  // independent cross-product oracle
      CHECK((b.block<3, 1>(0, k) - f).norm() < 1e-9);
      CHECK((b.block<3, 1>(3, k) - moment).norm() < 1e-9);
    }
  }
}

TEST_CASE("default frames are orthonormal and right handed") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 n = Vec3(u(rng), u(rng), u(rng)).normalized();
    const Contact c = contact_at(Vec3::Zero(), n);
    CHECK_NOTHROW(c.validate());
  }
}

TEST_CASE("grasp map is the horizontal concatenation of contact bases") {
  const Contact a = contact_at(Vec3(0.0, 0.1, 0.0), Vec3::UnitX());
  SUBCASE("single contact") {
    const MatX g = assemble_grasp_map({a});
    CHECK(g.cols() == 3);
    CHECK((g - contact_wrench_basis(a)).norm() == doctest::Approx(0.0));
  }
  SUBCASE("two identical contacts duplicate the block") {
    const MatX g = assemble_grasp_map({a, a});
    CHECK(g.cols() == 6);
    CHECK((g.block<6, 3>(0, 0) - g.block<6, 3>(0, 3)).norm() ==
          doctest::Approx(0.0));
  }
  SUBCASE("empty list rejected") {
    CHECK_THROWS_AS(assemble_grasp_map({}), std::invalid_argument);
  }
}

TEST_CASE("grasp map is permutation equivariant over contact order") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Contact> contacts;
  for (int i = 0; i < 4; ++i) {
    contacts.push_back(contact_at(Vec3(u(rng), u(rng), u(rng)),
                                  Vec3(u(rng), u(rng), u(rng)).normalized()));
  }
  const MatX g = assemble_grasp_map(contacts);
  std::vector<Contact> shuffled = {contacts[2], contacts[0], contacts[3],
                                   contacts[1]};
  const MatX gs = assemble_grasp_map(shuffled);
  const int order[4] = {2, 0, 3, 1};
  for (int i = 0; i < 4; ++i) {
    CHECK((gs.block<6, 3>(0, 3 * i) - g.block<6, 3>(0, 3 * order[i])).norm() <
          1e-15);
  }
}

TEST_CASE("relative contact motion") {
  const auto grasp = pgs::testing::canonical_grasp();
  SUBCASE("zero motion gives zero d") {
    const VecX d = relative_contact_motion(Vec6::Zero(),
                                           VecX::Zero(grasp.num_joints),
                                           grasp.grasp_map, grasp.jacobian);
    CHECK(d.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
  SUBCASE("pure translation projects onto each contact frame") {
    Vec6 r = Vec6::Zero();
    r.head<3>() = Vec3(0.0, 1.0, 0.0);
    const VecX d = relative_contact_motion(r, VecX::Zero(grasp.num_joints),
                                           grasp.grasp_map, grasp.jacobian);
    for (int i = 0; i < grasp.num_contacts(); ++i) {
      const Contact& c = grasp.contacts[i];
      CHECK(d[3 * i + 0] == doctest::Approx(c.tangent1.y()));
      CHECK(d[3 * i + 1] == doctest::Approx(c.tangent2.y()));
      CHECK(d[3 * i + 2] == doctest::Approx(c.normal.y()));
    }
  }
  SUBCASE("matches direct matrix arithmetic on random inputs") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      Vec6 r;
      for (int a = 0; a < 6; ++a) r[a] = u(rng);
      VecX q(grasp.num_joints);
      for (int j = 0; j < grasp.num_joints; ++j) q[j] = u(rng);
      const VecX d =
          relative_contact_motion(r, q, grasp.grasp_map, grasp.jacobian);
      const VecX expect =
          grasp.grasp_map.transpose() * r - grasp.jacobian * q;
      CHECK((d - expect).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
  SUBCASE("dimension mismatch rejected") {
    CHECK_THROWS_AS(relative_contact_motion(Vec6::Zero(), VecX::Zero(2),
                                            grasp.grasp_map, grasp.jacobian),
                    std::invalid_argument);
  }
}

TEST_CASE("adjoint identity ties the grasp map to its transpose") {
  const auto grasp = pgs::testing::nonplanar_grasp();
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    VecX c(3 * grasp.num_contacts());
    for (int i = 0; i < c.size(); ++i) c[i] = u(rng);
    Vec6 r;
    for (int a = 0; a < 6; ++a) r[a] = u(rng);
    const double lhs = (grasp.grasp_map * c).dot(r);
    const double rhs = c.dot(grasp.grasp_map.transpose() * r);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("residuals") {
  const auto grasp = pgs::testing::canonical_grasp();
  const int m = grasp.num_contacts();
  SUBCASE("all zero is balanced") {
    const auto res = residuals(VecX::Zero(3 * m), Vec6::Zero(),
                               VecX::Zero(grasp.num_joints), grasp.grasp_map,
                               grasp.jacobian);
    CHECK(res.max_norm() == doctest::Approx(0.0));
  }
  SUBCASE("constructed balance has zero residuals") {
    VecX c = VecX::Zero(3 * m);
    c[3 * 1 + 2] = 2.0;  // normal force at the left side contact
    const Vec6 w = -(grasp.grasp_map * c);
    const auto res = residuals(c, w, grasp.jacobian.transpose() * c,
                               grasp.grasp_map, grasp.jacobian);
    CHECK(res.max_norm() < 1e-15);
  }
  SUBCASE("dimension mismatch rejected") {
    CHECK_THROWS_AS(residuals(VecX::Zero(5), Vec6::Zero(), VecX::Zero(4),
                              grasp.grasp_map, grasp.jacobian),
                    std::invalid_argument);
  }
}

TEST_CASE("contact validation catches broken frames") {
  Contact c = contact_at(Vec3::Zero(), Vec3::UnitZ());
  SUBCASE("negative mu") {
    c.mu = -0.1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  SUBCASE("non-unit normal") {
    c.normal *= 1.001;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  SUBCASE("tangent not orthogonal") {
    c.tangent1 = (c.tangent1 + 0.01 * c.normal).normalized();
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  SUBCASE("left-handed frame") {
    std::swap(c.tangent1, c.tangent2);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
}

TEST_CASE("model creation validates torques and jacobian shape") {
  const Contact c = contact_at(Vec3::Zero(), Vec3::UnitZ());
  VecX tau = VecX::Zero(2);
  SUBCASE("negative commanded torque rejected") {
    tau[1] = -0.1;
    CHECK_THROWS_AS(GraspModel::create({c}, MatX::Zero(3, 2), tau),
                    std::invalid_argument);
  }
  SUBCASE("wrong jacobian shape rejected") {
    CHECK_THROWS_AS(GraspModel::create({c}, MatX::Zero(4, 2), tau),
                    std::invalid_argument);
  }
}
