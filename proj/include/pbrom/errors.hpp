#pragma once

#include <stdexcept>
#include <string>

namespace pbrom {

// Error taxonomy mirrored by the CLI exit codes: input/parse problems (1),
// model assembly problems (2), iterative-solver failures (3), file I/O (4).

struct parse_error : std::runtime_error {
  explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct assembly_error : std::runtime_error {
  explicit assembly_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct solver_error : std::runtime_error {
  explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pbrom
