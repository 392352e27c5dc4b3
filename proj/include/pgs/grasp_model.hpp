#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pgs/types.hpp"

namespace pgs {

// A point contact with friction. The frame (tangent1, tangent2, normal) is
// right-handed; `normal` is the direction along which a positive normal
// force acts on the object (it points from the finger surface into the
// object). Contact-frame vectors are ordered (t1, t2, n) throughout.
struct Contact {
  Vec3 position = Vec3::Zero();   // meters, object frame
  Vec3 normal = Vec3::UnitZ();    // unit
  Vec3 tangent1 = Vec3::UnitX();  // unit, orthogonal to normal
  Vec3 tangent2 = Vec3::UnitY();  // = normal x tangent1
  double mu = 0.0;                // friction coefficient, >= 0

  // Completes the frame from `normal` alone: tangent1 = normalize(normal x e_a)
  // with e_a the global axis least aligned with the normal (lowest index on
  // ties), tangent2 = normal x tangent1.
  static Contact with_default_frame(const Vec3& position, const Vec3& normal,
                                    double mu);

  // Throws std::invalid_argument if the frame is not orthonormal
  // right-handed within 1e-9 or mu < 0.
  void validate(int index = -1) const;
};

struct Wrench {
  Vec3 force = Vec3::Zero();   // N
  Vec3 torque = Vec3::Zero();  // N·m about the object-frame origin

  Vec6 vector() const {
    Vec6 w;
    w << force, torque;
    return w;
  }
  static Wrench from_vector(const Vec6& v) {
    Wrench w;
    w.force = v.head<3>();
    w.torque = v.tail<3>();
    return w;
  }
};

// Grasp geometry plus the linear maps tying contact forces, object wrench
// and joint torques together.
//
//   grasp_map G (6 x 3m): stacked contact-frame forces -> object wrench
//   jacobian  J (3m x l):  joint rates -> contact-frame velocities of the
//                          hand-side contact points, rows (t1, t2, n) per
//                          contact. Joint axes are oriented so that the
//                          commanded torque drives the joint toward positive
//                          rate; commanded torques are therefore >= 0.
struct GraspModel {
  std::vector<Contact> contacts;
  int num_joints = 0;
  MatX grasp_map;          // 6 x 3m
  MatX jacobian;           // 3m x l
  VecX commanded_torques;  // l, N·m, >= 0
  Vec6 wrench = Vec6::Zero();  // optional default disturbance from the file

  int num_contacts() const { return static_cast<int>(contacts.size()); }

  // Builds G from the contacts and validates all invariants. Throws
  // std::invalid_argument on any violation.
  static GraspModel create(std::vector<Contact> contacts, const MatX& jacobian,
                           const VecX& commanded_torques,
                           const Vec6& wrench = Vec6::Zero());
};

// Witness for a static equilibrium: contact forces, virtual motions and the
// weight vectors of the cone representation. Contact forces are stacked
// (t1, t2, n) per contact.
struct EquilibriumSolution {
  VecX contact_forces;  // 3m
  Vec6 object_motion = Vec6::Zero();  // virtual twist (translation, rotation)
  VecX joint_motions;   // l, >= 0
  VecX joint_torques;   // l, torque delivered at each joint
  std::vector<VecX> friction_weights;  // beta, per contact
  std::vector<VecX> motion_weights;    // alpha, per contact (empty w/o MDP)
  std::vector<VecX> sos_weights;       // z, per contact

  Vec3 contact_force(int i) const {
    return contact_forces.segment<3>(3 * i);
  }
};

// Columns are the object wrenches of unit forces along (t1, t2, n).
Mat63 contact_wrench_basis(const Contact& contact);

// Horizontal concatenation of the per-contact wrench bases in contact order.
// Throws std::invalid_argument on an empty contact list.
MatX assemble_grasp_map(const std::vector<Contact>& contacts);

// d = G^T r - J q, the virtual motion of the object relative to the hand at
// each contact, in contact frames. Throws on dimension mismatch.
VecX relative_contact_motion(const Vec6& object_motion,
                             const VecX& joint_motions, const MatX& grasp_map,
                             const MatX& jacobian);

struct Residuals {
  Vec6 object;  // G c + w
  VecX joint;   // J^T c - tau (delivered-torque convention)

  double max_norm() const {
    return std::max(object.cwiseAbs().maxCoeff(),
                    joint.size() ? joint.cwiseAbs().maxCoeff() : 0.0);
  }
};

// Equilibrium residuals of a candidate solution. The joint residual uses the
// delivered torque tau = J^T c, conjugate to the joint rates via virtual
// work, so a balanced grasp has both residuals at zero.
Residuals residuals(const VecX& contact_forces, const Vec6& wrench,
                    const VecX& joint_torques, const MatX& grasp_map,
                    const MatX& jacobian);

}  // namespace pgs
