// Copyright 2026 The poolmech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POOLMECH_ERROR_HPP
#define POOLMECH_ERROR_HPP

#include <stdexcept>
#include <string>

namespace poolmech {

// Raised when an operation is called outside its domain (negative energy,
// infeasible production vector, mismatched profile length, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Raised when a numerical procedure cannot establish its preconditions,
// e.g. a bisection bracket that does not change sign.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace poolmech

#endif  // POOLMECH_ERROR_HPP
