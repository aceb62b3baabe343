#include "liecramer/matrix_json.hpp"

#include <cmath>
#include <sstream>

#include "liecramer/stochastic.hpp"

namespace liecramer {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorKind::InvalidArgument, "matrix JSON: expected a non-empty array of rows");
  const auto d = static_cast<Eigen::Index>(j.size());
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      std::ostringstream os;
      os << "matrix JSON: row " << i << " must have " << d << " entries";
      fail(ErrorKind::InvalidArgument, os.str());
    }
    for (Eigen::Index k = 0; k < d; ++k) {
      const auto& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) {
        std::ostringstream os;
        os << "matrix JSON: entry (" << i << ", " << k << ") is not a number";
        fail(ErrorKind::InvalidArgument, os.str());
      }
      m(i, k) = v.get<double>();
      if (!std::isfinite(m(i, k))) fail(ErrorKind::InvalidArgument, "matrix JSON: non-finite entry");
    }
  }
  return m;
}

GroupElement group_from_json(const nlohmann::json& j) {
  const Matrix m = matrix_from_json(j);
  const MembershipReport r = is_group_member(m);
  if (!r.member) {
    std::ostringstream os;
    os << "matrix is not in S(" << m.rows() << ",R): " << r.violated << " (row-sum residual "
       << r.row_sum_residual << ", det " << r.determinant << ")";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  return GroupElement(m);
}

AlgebraVector algebra_from_json(const nlohmann::json& j) { return AlgebraVector(matrix_from_json(j)); }

namespace {

nlohmann::json parse(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::InvalidArgument, std::string("matrix JSON: ") + e.what());
  }
}

}  // namespace

GroupElement group_from_json_text(const std::string& text) { return group_from_json(parse(text)); }

AlgebraVector algebra_from_json_text(const std::string& text) { return algebra_from_json(parse(text)); }

}  // namespace liecramer
