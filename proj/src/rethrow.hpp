// Copyright 2026 The lot Authors
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

#include "lot/common.hpp"

#include <exception>
#include <string>
#include <vector>

namespace lot::detail {

// Rethrows `e` as the same library error type with `prefix` prepended.
[[noreturn]] inline void rethrow_with_prefix(const std::exception_ptr& e, const std::string& prefix) {
  try {
    std::rethrow_exception(e);
  } catch (const IntegrationError& x) {
    throw IntegrationError(prefix + x.what(), x.step(), x.time());
  } catch (const ConvergenceError& x) {
    throw ConvergenceError(prefix + x.what(), x.residual());
  } catch (const NumericalError& x) {
    throw NumericalError(prefix + x.what());
  } catch (const AmbiguityError& x) {
    throw AmbiguityError(prefix + x.what());
  } catch (const DomainError& x) {
    throw DomainError(prefix + x.what());
  } catch (const PreconditionError& x) {
    throw PreconditionError(prefix + x.what(), x.key());
  } catch (const InputError& x) {
    throw InputError(prefix + x.what(), x.key());
  }
}

// First captured error in index order, if any.
inline void rethrow_first(const std::vector<std::exception_ptr>& errors, const std::string& label) {
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i]) rethrow_with_prefix(errors[i], label + " " + std::to_string(i) + ": ");
}

}  // namespace lot::detail
