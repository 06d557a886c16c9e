#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "berrysim/sequence.hpp"

// Line-oriented sequence file parser with per-line error recovery.
// Grammar ('#' starts a comment):
//   ampsweep (up|down) AMP INT DUR [phase ANGLE]
//   phasesweep (cw|ccw) AMP INT DUR
//   pulse (I|S) ANGLE ANGLE (ideal|nu1 AMP)
//   delay DUR
// AMP := float('hz'|'khz'), DUR := float('us'|'ms'|'s'), ANGLE := float'deg'

namespace berrysim {

struct ParseError {
  int line = 0;    // 1-based
  int column = 0;  // 1-based
  std::string message;
  std::vector<std::string> expected;

  std::string to_string() const;
};

struct ParseResult {
  Sequence sequence;
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty(); }
};

ParseResult parse_sequence(std::string_view text);

}  // namespace berrysim
