#pragma once

// Portable text format for representations.
//
// Line 1: JSON header {"format_version": 1, "q": ..., "M": ..., "d": ...}.
// Then one CSV line per row of U, entries interleaved as re,im. Doubles are
// written in shortest round-trip form, so save followed by load is bit-exact.

#include <iosfwd>
#include <string>

#include "azb/corep.hpp"

namespace azb {

inline constexpr int kRepFormatVersion = 1;

void save_rep(const Representation& rep, std::ostream& out);
void save_rep(const Representation& rep, const std::string& path);

// Throws FormatError on malformed input.
Representation load_rep(std::istream& in);
Representation load_rep(const std::string& path);

}  // namespace azb
