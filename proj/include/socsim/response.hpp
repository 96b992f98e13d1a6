#pragma once

#include <string>

#include "socsim/actions.hpp"

namespace socsim::agent {

// Outcome of parsing a raw driver response. Anything unusable degrades to
// DoNothing with a diagnostic; this function never throws.
struct ParsedResponse {
  std::string thought;
  AgentAction action = DoNothing{};
  std::string diagnostic;  // empty when the response parsed cleanly
};

// Reads the Thought/Action format. The last "Action:" line wins; keyword and
// positional arguments are both accepted; string values may use single or
// double quotes with backslash escapes; None marks an absent value. Without
// an "Action:" line the first recognizable function call anywhere in the
// text is used.
ParsedResponse parse_response(const std::string& raw);

}  // namespace socsim::agent
