#include "lswasp/draw_matrix.hpp"

#include <sstream>

#include "lswasp/errors.hpp"

namespace lswasp {

void DrawMatrix::validate() const {
  if (draws.rows() < 2) {
    std::ostringstream os;
    os << "draw matrix needs at least 2 rows, got " << draws.rows();
    throw ValidationError(os.str());
  }
  if (draws.cols() < 1) throw ValidationError("draw matrix has no columns");
  if (static_cast<Eigen::Index>(param_names.size()) != draws.cols()) {
    std::ostringstream os;
    os << "draw matrix has " << draws.cols() << " columns but "
       << param_names.size() << " parameter names";
    throw ValidationError(os.str());
  }
  if (!draws.allFinite()) throw ValidationError("draw matrix has non-finite entries");
}

std::vector<std::string> indexed_names(const std::string& stem,
                                       Eigen::Index count) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 1; i <= count; ++i) {
    out.push_back(stem + "_" + std::to_string(i));
  }
  return out;
}

}  // namespace lswasp
