#include "pgs/grasp_model.hpp"

#include <Eigen/Geometry>
#include <cmath>

namespace pgs {

namespace {

constexpr double kFrameTol = 1e-9;

std::string contact_label(int index) {
  return index >= 0 ? "contact " + std::to_string(index) : "contact";
}

}  // namespace

Contact Contact::with_default_frame(const Vec3& position, const Vec3& normal,
                                    double mu) {
  Contact c;
  c.position = position;
  c.normal = normal;
  c.mu = mu;
  int least = 0;
  double best = std::abs(normal.x());
  for (int a = 1; a < 3; ++a) {
    const double align = std::abs(normal[a]);
    if (align < best - 1e-15) {
      best = align;
      least = a;
    }
  }
  const Vec3 axis = Vec3::Unit(least);
  c.tangent1 = normal.cross(axis).normalized();
  c.tangent2 = normal.cross(c.tangent1);
  return c;
}

void Contact::validate(int index) const {
  const auto bad = [&](const std::string& what) {
    throw std::invalid_argument(contact_label(index) + ": " + what);
  };
  if (!position.allFinite() || !normal.allFinite() || !tangent1.allFinite() ||
      !tangent2.allFinite() || !std::isfinite(mu)) {
    bad("non-finite entries");
  }
  if (std::abs(normal.norm() - 1.0) > kFrameTol) bad("normal is not unit length");
  if (std::abs(tangent1.norm() - 1.0) > kFrameTol)
    bad("tangent1 is not unit length");
  if (std::abs(tangent2.norm() - 1.0) > kFrameTol)
    bad("tangent2 is not unit length");
  if (std::abs(normal.dot(tangent1)) > kFrameTol ||
      std::abs(normal.dot(tangent2)) > kFrameTol ||
      std::abs(tangent1.dot(tangent2)) > kFrameTol) {
    bad("contact frame is not orthogonal");
  }
  if ((tangent1.cross(tangent2) - normal).norm() > 1e-8)
    bad("contact frame is not right-handed");
  if (mu < 0.0) bad("negative friction coefficient");
}

GraspModel GraspModel::create(std::vector<Contact> contacts,
                              const MatX& jacobian,
                              const VecX& commanded_torques,
                              const Vec6& wrench) {
  GraspModel g;
  if (contacts.empty()) throw std::invalid_argument("empty contact list");
  for (int i = 0; i < static_cast<int>(contacts.size()); ++i) {
    contacts[i].validate(i);
  }
  const int m = static_cast<int>(contacts.size());
  const int l = static_cast<int>(commanded_torques.size());
  if (jacobian.rows() != 3 * m || jacobian.cols() != l) {
    throw std::invalid_argument(
        "jacobian shape must be 3m x l = " + std::to_string(3 * m) + " x " +
        std::to_string(l) + ", got " + std::to_string(jacobian.rows()) + " x " +
        std::to_string(jacobian.cols()));
  }
  for (int j = 0; j < l; ++j) {
    if (commanded_torques[j] < 0.0) {
      throw std::invalid_argument("joint " + std::to_string(j) +
                                  ": negative commanded torque");
    }
  }
  if (!jacobian.allFinite() || !wrench.allFinite())
    throw std::invalid_argument("non-finite matrix entries");
  g.contacts = std::move(contacts);
  g.num_joints = l;
  g.grasp_map = assemble_grasp_map(g.contacts);
  g.jacobian = jacobian;
  g.commanded_torques = commanded_torques;
  g.wrench = wrench;
  return g;
}

Mat63 contact_wrench_basis(const Contact& contact) {
  Mat63 basis;
  const Vec3 dirs[3] = {contact.tangent1, contact.tangent2, contact.normal};
  for (int k = 0; k < 3; ++k) {
    basis.block<3, 1>(0, k) = dirs[k];
    basis.block<3, 1>(3, k) = contact.position.cross(dirs[k]);
  }
  return basis;
}

MatX assemble_grasp_map(const std::vector<Contact>& contacts) {
  if (contacts.empty()) throw std::invalid_argument("empty contact list");
  MatX g(6, 3 * contacts.size());
  for (int i = 0; i < static_cast<int>(contacts.size()); ++i) {
    g.block<6, 3>(0, 3 * i) = contact_wrench_basis(contacts[i]);
  }
  return g;
}

VecX relative_contact_motion(const Vec6& object_motion,
                             const VecX& joint_motions, const MatX& grasp_map,
                             const MatX& jacobian) {
  if (jacobian.cols() != joint_motions.size() ||
      jacobian.rows() != grasp_map.cols()) {
    throw std::invalid_argument("relative_contact_motion: dimension mismatch");
  }
  return grasp_map.transpose() * object_motion - jacobian * joint_motions;
}

Residuals residuals(const VecX& contact_forces, const Vec6& wrench,
                    const VecX& joint_torques, const MatX& grasp_map,
                    const MatX& jacobian) {
  if (grasp_map.cols() != contact_forces.size() ||
      jacobian.rows() != contact_forces.size() ||
      jacobian.cols() != joint_torques.size()) {
    throw std::invalid_argument("residuals: dimension mismatch");
  }
  Residuals r;
  r.object = grasp_map * contact_forces + wrench;
  r.joint = jacobian.transpose() * contact_forces - joint_torques;
  return r;
}

}  // namespace pgs
