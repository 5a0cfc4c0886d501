#pragma once

#include <stdexcept>
#include <string>

namespace accesskit {

// Every failure surfaced by the toolkit carries a module name and a short
// error code, e.g. "data_model" / "DuplicateId". what() renders as
// "data_model.DuplicateId: <detail>".
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string code, const std::string& detail);

  const std::string& module() const noexcept { return module_; }
  const std::string& code() const noexcept { return code_; }
  // "module.Code"
  std::string qualified_code() const { return module_ + "." + code_; }

 private:
  std::string module_;
  std::string code_;
};

}  // namespace accesskit
