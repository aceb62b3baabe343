#pragma once

// Matrices as row-major JSON arrays of arrays.

#include <string>

#include <json.hpp>

#include "liecramer/lie.hpp"

namespace liecramer {

nlohmann::json matrix_to_json(const Matrix& m);

/// Square matrix of finite numbers; InvalidArgument on ragged or non-numeric input.
Matrix matrix_from_json(const nlohmann::json& j);

/// Rejects non-members with a message naming the violated constraint and residual.
GroupElement group_from_json(const nlohmann::json& j);
AlgebraVector algebra_from_json(const nlohmann::json& j);

GroupElement group_from_json_text(const std::string& text);
AlgebraVector algebra_from_json_text(const std::string& text);

}  // namespace liecramer
