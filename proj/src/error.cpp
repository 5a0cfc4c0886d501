#include "accesskit/error.hpp"

namespace accesskit {

Error::Error(std::string module, std::string code, const std::string& detail)
    : std::runtime_error(module + "." + code + ": " + detail),
      module_(std::move(module)),
      code_(std::move(code)) {}

}  // namespace accesskit
