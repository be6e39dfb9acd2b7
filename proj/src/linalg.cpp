// Copyright 2026 The Reflectolab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "reflectolab/linalg.hpp"

#include <vector>

namespace reflectolab {

Mat orthonormal_complement(const Mat& rows, double tol) {
  const Eigen::Index d = rows.cols();
  std::vector<Vec> basis;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    Vec v = rows.row(r).transpose();
    for (const auto& q : basis) v -= q.dot(v) * q;
    const double norm = v.norm();
    if (norm > tol) basis.push_back(v / norm);
  }
  const std::size_t row_rank = basis.size();
  for (Eigen::Index k = 0; k < d; ++k) {
    Vec v = Vec::Unit(d, k);
    for (const auto& q : basis) v -= q.dot(v) * q;
    // second pass keeps the basis orthogonal to machine precision
    for (const auto& q : basis) v -= q.dot(v) * q;
    const double norm = v.norm();
    if (norm > 1e-8) basis.push_back(v / norm);
  }
  Mat out(d, static_cast<Eigen::Index>(basis.size() - row_rank));
  for (std::size_t c = row_rank; c < basis.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c - row_rank)) = basis[c];
  }
  return out;
}

}  // namespace reflectolab
