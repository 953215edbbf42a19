#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace storygen::detail {

// Canonical documents carry reals rounded to 6 decimals so repeated exports are
// byte-identical and diffs stay small.
inline double round6(double v) noexcept {
    double r = std::round(v * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace storygen::detail
