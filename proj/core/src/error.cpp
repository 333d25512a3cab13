#include "sbarom/error.hpp"

#include <sstream>
#include <utility>

namespace sbarom {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

ConfigError::ConfigError(std::string key, const std::string& what)
    : std::runtime_error("config key '" + key + "': " + what), key_(std::move(key)) {}

namespace {
std::string divergence_message(double time) {
  std::ostringstream os;
  os << "integration diverged (non-finite state) at t = " << time << " s";
  return os.str();
}
}  // namespace

DivergenceError::DivergenceError(double time)
    : std::runtime_error(divergence_message(time)), time_(time) {}

}  // namespace sbarom
