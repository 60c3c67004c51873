// Copyright 2026 The rsopt Authors.
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


#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rsopt/nls.hpp"

namespace rsopt {

/// Names of the native least-squares test problems.
const std::vector<std::string>& problem_names();

/// Closest dimension <= d (or the smallest admissible one) for a family.
Index admissible_dimension(std::string_view name, Index d);

/// Builds a problem at dimension d. Throws std::invalid_argument for unknown
/// names and for dimensions the family does not support.
NlsProblem make_problem(std::string_view name, Index d);

/// Every family at the admissible dimension nearest to d.
std::vector<NlsProblem> problem_suite(Index d);

/// Only the zero-residual families.
std::vector<NlsProblem> zero_residual_suite(Index d);

}  // namespace rsopt
