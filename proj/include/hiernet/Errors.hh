/******************************************************************************
This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
*******************************************************************************/

#pragma once

#include <stdexcept>
#include <string>

namespace hiernet {

// Raised for malformed user input: topology strings, workload records,
// sweep config files, CLI argument values. Maps to exit code 1 in the CLI.
// Everything else (solver non-convergence, I/O failures, API misuse) uses
// std::invalid_argument / std::runtime_error and maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hiernet
