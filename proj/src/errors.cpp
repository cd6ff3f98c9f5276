#include "t2h/errors.hpp"

namespace t2h {

ReplayError::ReplayError(const std::string& what, std::size_t line, long long missing_tick)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      detail_(what),
      line_(line),
      missing_tick_(missing_tick) {}

}  // namespace t2h
