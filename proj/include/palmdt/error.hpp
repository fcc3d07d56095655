#pragma once

#include <stdexcept>
#include <string>

namespace palmdt {

/// Raised for any invalid input or pipeline failure. The message is meant for
/// end users and is printed verbatim by the command line tool.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace palmdt
