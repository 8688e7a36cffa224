#pragma once

#include <stdexcept>
#include <string>

namespace sceneloop {

// Root of every typed error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sceneloop
