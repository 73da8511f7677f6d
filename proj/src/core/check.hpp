#pragma once

#include <stdexcept>
#include <string>

namespace ramlt::detail {

[[noreturn]] inline void check_fail(const char *msg, const char *file, int line) {
    throw std::logic_error(std::string(file) + ":" + std::to_string(line) +
                           ": invariant violated: " + msg);
}

} // namespace ramlt::detail

#define RAMLT_CHECK(cond, msg)                                    \
    do {                                                          \
        if (!(cond))                                              \
            ::ramlt::detail::check_fail(msg, __FILE__, __LINE__); \
    } while (0)
