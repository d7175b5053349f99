#pragma once

#include "orbistab/mech_model.hpp"

#include <map>
#include <string>

namespace orbistab {

/// Compile an arithmetic expression over the variables x1 and x2 into a
/// callable. Supported: + - * / ^ (right-associative power), unary minus,
/// parentheses, the functions sin cos tan sec sqrt abs ln exp, the constant
/// pi, and any caller-supplied named constants. Throws ConfigError with the
/// offending position on malformed input. Evaluation follows IEEE semantics:
/// out-of-domain arguments yield inf/nan rather than throwing.
ConfigField compile_expression(const std::string& text,
                               const std::map<std::string, double>& constants = {});

/// Same, but the expression must depend on x1 only.
Profile compile_profile(const std::string& text,
                        const std::map<std::string, double>& constants = {});

}  // namespace orbistab
