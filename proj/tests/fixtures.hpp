#pragma once

#include <random>
#include <string>

#include "pgs/grasp_io.hpp"
#include "pgs/grasp_model.hpp"

namespace pgs::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(PGS_SOURCE_DIR) + "/fixtures/" + name;
}

// Two-finger box pinch: side contacts on the proximal links at a 0.09 m
// moment arm, fingertips curled under the object, mu = 1. Proximal preload
// 0.1 N·m is stored in the file.
inline GraspModel canonical_grasp() {
  return load_grasp_file(fixture_path("canonical.grasp"));
}

// Same topology but the distal side contacts are offset out of plane, which
// lets a relaxed friction model wedge the object.
inline GraspModel offset_grasp() {
  return load_grasp_file(fixture_path("offset.grasp"));
}

// Two opposed fingers on the x-axis plus a third pressing up from below.
inline GraspModel three_finger_grasp() {
  return load_grasp_file(fixture_path("three_finger.grasp"));
}

// Four-fingertip grasp with non-coplanar contacts and skewed normals.
inline GraspModel nonplanar_grasp() {
  return load_grasp_file(fixture_path("nonplanar.grasp"));
}

inline VecX zero_torques(const GraspModel& g) {
  return VecX::Zero(g.num_joints);
}

inline Vec6 wrench_y(double fy) {
  Vec6 w = Vec6::Zero();
  w[1] = fy;
  return w;
}

// Random small grasp for pipeline/oracle agreement runs: contacts near a
// ring around the origin with inward-ish normals, one driven joint per
// contact with a dominant normal entry.
inline GraspModel random_small_grasp(std::mt19937& rng, int m) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> mu_dist(0.4, 1.1);
  std::uniform_real_distribution<double> arm_dist(0.03, 0.08);
  std::vector<Contact> contacts;
  for (int i = 0; i < m; ++i) {
    const double phi = 2.0 * M_PI * (i + 0.15 * unit(rng)) / m;
    Vec3 pos(0.05 * std::cos(phi), 0.05 * std::sin(phi), 0.01 * unit(rng));
    Vec3 toward_center = -pos + 0.01 * Vec3(unit(rng), unit(rng), unit(rng));
    contacts.push_back(Contact::with_default_frame(
        pos, toward_center.normalized(), mu_dist(rng)));
  }
  const int l = m;
  MatX jac = MatX::Zero(3 * m, l);
  for (int i = 0; i < m; ++i) {
    jac(3 * i, i) = 0.01 * unit(rng);
    jac(3 * i + 1, i) = 0.01 * unit(rng);
    jac(3 * i + 2, i) = arm_dist(rng);
  }
  VecX tau = VecX::Zero(l);
  for (int j = 0; j < l; ++j) tau[j] = 0.05 + 0.05 * std::abs(unit(rng));
  return GraspModel::create(contacts, jac, tau);
}

}  // namespace pgs::testing
