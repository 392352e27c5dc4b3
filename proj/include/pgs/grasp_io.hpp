#pragma once

#include <string>

#include "pgs/grasp_model.hpp"

namespace pgs {

// Parses a grasp description document (JSON text, schema in
// docs/grasp_schema.md) into a validated model. The grasp map is assembled
// from the contacts; the Jacobian is taken verbatim. Throws
// std::invalid_argument with a message naming the offending field on any
// validation failure.
GraspModel load_grasp(const std::string& json_text);

// Reads and parses the file at `path`.
GraspModel load_grasp_file(const std::string& path);

// Serializes a model back into schema-conformant JSON.
std::string to_json(const GraspModel& grasp);

}  // namespace pgs
