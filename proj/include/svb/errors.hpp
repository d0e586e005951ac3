#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace svb {

// Invalid inputs: malformed files, schema mismatches, violated data invariants.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failures: non-finite objective values, divergent solves.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg,
                        std::optional<double> abscissa = std::nullopt)
      : std::runtime_error(msg), abscissa_(abscissa) {}

  // Offending evaluation point, when the failure is tied to one.
  std::optional<double> abscissa() const { return abscissa_; }

 private:
  std::optional<double> abscissa_;
};

}  // namespace svb
