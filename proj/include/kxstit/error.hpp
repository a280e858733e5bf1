#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace kx {

// Every library failure carries a stable machine-readable code plus optional
// key/value details; the CLI turns these into its JSON error record.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message,
        std::map<std::string, std::string> details = {})
      : std::runtime_error(message), code_(std::move(code)), details_(std::move(details)) {}

  const std::string& code() const { return code_; }
  const std::map<std::string, std::string>& details() const { return details_; }

 private:
  std::string code_;
  std::map<std::string, std::string> details_;
};

}  // namespace kx
