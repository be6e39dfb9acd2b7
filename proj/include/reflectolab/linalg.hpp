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

#ifndef REFLECTOLAB_LINALG_HPP_
#define REFLECTOLAB_LINALG_HPP_

#include <Eigen/Dense>

#include <limits>
#include <string>

#include "reflectolab/error.hpp"

namespace reflectolab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline void require_dim(const Vec& x, Eigen::Index dim, const char* what) {
  if (x.size() != dim) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": expected dimension " + std::to_string(dim) +
             ", got " + std::to_string(x.size()));
  }
}

inline bool all_finite(const Vec& x) { return x.allFinite(); }

// Orthonormal basis (as columns) of the orthogonal complement of the row
// space of `rows`. Columns are built by Gram-Schmidt over the standard basis,
// so a face normal e_1 yields tangent directions e_2, e_3, ... exactly.
Mat orthonormal_complement(const Mat& rows, double tol = 1e-12);

}  // namespace reflectolab

#endif  // REFLECTOLAB_LINALG_HPP_
