#pragma once

#include <string>

namespace pbsim {

// Shortest decimal text that parses back to exactly `value`. NaN prints as
// "nan", infinities as "inf" / "-inf", and both signed zeros as "0".
std::string format_double(double value);

}  // namespace pbsim
