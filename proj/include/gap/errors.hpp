#pragma once

#include <stdexcept>
#include <string>

namespace gap {

// Error categories map to CLI exit codes: config -> 2, io -> 3, pipeline -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct PipelineError : Error {
  using Error::Error;
};

// Raised by appearance providers; the pipeline turns it into a skipped view.
struct ProviderError : Error {
  using Error::Error;
};

}  // namespace gap
