// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace haarlab {

// Bad or inconsistent run configuration. CLI exit code 2.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation could not proceed (window overflow, missing digit
// pattern, ...). CLI exit code 3.
struct computation_error : std::runtime_error {
  explicit computation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A materialization or enumeration cap was exceeded. CLI exit code 4.
struct cap_error : std::runtime_error {
  explicit cap_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace haarlab
