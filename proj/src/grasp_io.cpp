#include "pgs/grasp_io.hpp"

#include <fstream>
#include <sstream>

#include <Eigen/Geometry>
#include <json.hpp>

namespace pgs {

namespace {

using nlohmann::json;

Vec3 parse_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument(what + " must be an array of 3 numbers");
  }
  Vec3 v;
  for (int a = 0; a < 3; ++a) {
    if (!j[a].is_number()) {
      throw std::invalid_argument(what + " must be numeric");
    }
    v[a] = j[a].get<double>();
  }
  return v;
}

}  // namespace

GraspModel load_grasp(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed grasp document: ") +
                                e.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("grasp document must be a JSON object");
  }
  if (!doc.contains("contacts") || !doc["contacts"].is_array() ||
      doc["contacts"].empty()) {
    throw std::invalid_argument("contacts must be a non-empty array");
  }

  std::vector<Contact> contacts;
  int index = 0;
  for (const auto& jc : doc["contacts"]) {
    const std::string label = "contact " + std::to_string(index);
    if (!jc.is_object()) {
      throw std::invalid_argument(label + " must be an object");
    }
    const Vec3 position = parse_vec3(jc.at("position"), label + ".position");
    const Vec3 normal = parse_vec3(jc.at("normal"), label + ".normal");
    if (!jc.contains("mu") || !jc["mu"].is_number()) {
      throw std::invalid_argument(label + ".mu must be numeric");
    }
    const double mu = jc["mu"].get<double>();
    Contact c;
    if (jc.contains("tangent1")) {
      c.position = position;
      c.normal = normal;
      c.mu = mu;
      c.tangent1 = parse_vec3(jc["tangent1"], label + ".tangent1");
      c.tangent2 = normal.cross(c.tangent1);
    } else {
      if (std::abs(normal.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument(label + ": normal is not unit length");
      }
      c = Contact::with_default_frame(position, normal, mu);
    }
    try {
      c.validate(index);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(e.what());
    }
    contacts.push_back(c);
    ++index;
  }
  const int m = static_cast<int>(contacts.size());

  if (!doc.contains("num_joints") || !doc["num_joints"].is_number_integer()) {
    throw std::invalid_argument("num_joints must be an integer");
  }
  const int l = doc["num_joints"].get<int>();
  if (l < 0) throw std::invalid_argument("num_joints must be nonnegative");

  if (!doc.contains("jacobian") || !doc["jacobian"].is_array()) {
    throw std::invalid_argument("jacobian must be an array");
  }
  MatX jac(3 * m, l);
  const json& jj = doc["jacobian"];
  if (!jj.empty() && jj[0].is_array()) {
    // Nested rows, ordered (t1, t2, n) per contact.
    if (static_cast<int>(jj.size()) != 3 * m) {
      throw std::invalid_argument("jacobian must have 3m = " +
                                  std::to_string(3 * m) + " rows");
    }
    for (int r = 0; r < 3 * m; ++r) {
      if (static_cast<int>(jj[r].size()) != l) {
        throw std::invalid_argument("jacobian row " + std::to_string(r) +
                                    " must have l = " + std::to_string(l) +
                                    " entries");
      }
      for (int c = 0; c < l; ++c) jac(r, c) = jj[r][c].get<double>();
    }
  } else {
    // Flat row-major 3m x l.
    if (static_cast<int>(jj.size()) != 3 * m * l) {
      throw std::invalid_argument("jacobian must have 3m*l = " +
                                  std::to_string(3 * m * l) + " entries");
    }
    for (int r = 0; r < 3 * m; ++r) {
      for (int c = 0; c < l; ++c) jac(r, c) = jj[r * l + c].get<double>();
    }
  }

  if (!doc.contains("commanded_torques") ||
      !doc["commanded_torques"].is_array() ||
      static_cast<int>(doc["commanded_torques"].size()) != l) {
    throw std::invalid_argument("commanded_torques must be an array of l = " +
                                std::to_string(l) + " numbers");
  }
  VecX tau_c(l);
  for (int j = 0; j < l; ++j) {
    tau_c[j] = doc["commanded_torques"][j].get<double>();
  }

  Vec6 wrench = Vec6::Zero();
  if (doc.contains("wrench")) {
    if (!doc["wrench"].is_array() || doc["wrench"].size() != 6) {
      throw std::invalid_argument("wrench must be an array of 6 numbers");
    }
    for (int a = 0; a < 6; ++a) wrench[a] = doc["wrench"][a].get<double>();
  }

  return GraspModel::create(std::move(contacts), jac, tau_c, wrench);
}

GraspModel load_grasp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open grasp file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_grasp(buf.str());
}

std::string to_json(const GraspModel& grasp) {
  json doc;
  doc["contacts"] = json::array();
  for (const Contact& c : grasp.contacts) {
    json jc;
    jc["position"] = {c.position.x(), c.position.y(), c.position.z()};
    jc["normal"] = {c.normal.x(), c.normal.y(), c.normal.z()};
    jc["tangent1"] = {c.tangent1.x(), c.tangent1.y(), c.tangent1.z()};
    jc["mu"] = c.mu;
    doc["contacts"].push_back(jc);
  }
  doc["num_joints"] = grasp.num_joints;
  json rows = json::array();
  for (int r = 0; r < grasp.jacobian.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < grasp.jacobian.cols(); ++c) {
      row.push_back(grasp.jacobian(r, c));
    }
    rows.push_back(row);
  }
  doc["jacobian"] = rows;
  doc["commanded_torques"] = json::array();
  for (int j = 0; j < grasp.num_joints; ++j) {
    doc["commanded_torques"].push_back(grasp.commanded_torques[j]);
  }
  if (grasp.wrench.cwiseAbs().maxCoeff() > 0.0) {
    doc["wrench"] = json::array();
    for (int a = 0; a < 6; ++a) doc["wrench"].push_back(grasp.wrench[a]);
  }
  return doc.dump(2) + "\n";
}

}  // namespace pgs
