#pragma once

#include <stdexcept>
#include <string>

namespace prevalence {

// Contract or input-content violations (bad schema, bad parameter, bad state).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem-level failures (missing file, unreadable, unwritable).
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace prevalence
