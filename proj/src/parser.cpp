#include "berrysim/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

namespace berrysim {

namespace {

struct Token {
  std::string_view text;
  int column = 0;  // 1-based
};

std::vector<Token> tokenize_line(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#')
      ++i;
    tokens.push_back({line.substr(start, i - start), int(start) + 1});
  }
  return tokens;
}

class LineParser {
 public:
  LineParser(int line_no, std::vector<Token> tokens, std::vector<ParseError>& errors)
      : line_(line_no), tokens_(std::move(tokens)), errors_(errors) {}

  bool done() const { return pos_ >= tokens_.size(); }

  const Token* peek() const { return done() ? nullptr : &tokens_[pos_]; }

  const Token* next() { return done() ? nullptr : &tokens_[pos_++]; }

  int end_column() const {
    if (tokens_.empty()) return 1;
    const Token& last = tokens_.back();
    return last.column + int(last.text.size());
  }

  void error(int column, std::string message, std::vector<std::string> expected = {}) {
    errors_.push_back({line_, column, std::move(message), std::move(expected)});
    failed_ = true;
  }

  bool failed() const { return failed_; }

  std::optional<std::string_view> expect_word(const std::vector<std::string>& expected) {
    const Token* t = next();
    if (!t) {
      error(end_column(), "unexpected end of line", expected);
      return std::nullopt;
    }
    for (const auto& e : expected)
      if (t->text == e) return t->text;
    error(t->column, "unexpected token '" + std::string(t->text) + "'", expected);
    return std::nullopt;
  }

  // float with a required unit suffix attached to the same token
  std::optional<double> expect_unit_number(const char* what,
                                           const std::vector<std::pair<std::string, double>>& units,
                                           bool allow_negative) {
    std::vector<std::string> expected;
    for (const auto& [u, f] : units) expected.push_back(std::string("<number>") + u);
    const Token* t = next();
    if (!t) {
      error(end_column(), std::string("missing ") + what, expected);
      return std::nullopt;
    }
    double value = 0.0;
    auto [p, ec] = std::from_chars(t->text.data(), t->text.data() + t->text.size(), value);
    if (ec != std::errc{} || p == t->text.data()) {
      error(t->column, std::string("malformed number in ") + what, expected);
      return std::nullopt;
    }
    std::string_view unit = t->text.substr(p - t->text.data());
    for (const auto& [u, factor] : units) {
      if (unit == u) {
        if (!allow_negative && value < 0.0) {
          error(t->column, std::string(what) + " must not be negative");
          return std::nullopt;
        }
        return value * factor;
      }
    }
    error(t->column + int(p - t->text.data()),
          unit.empty() ? std::string("missing unit on ") + what
                       : "unknown unit '" + std::string(unit) + "' on " + what,
          expected);
    return std::nullopt;
  }

  std::optional<double> expect_amplitude(const char* what = "amplitude") {
    return expect_unit_number(what, {{"hz", 1.0}, {"khz", 1e3}}, false);
  }

  std::optional<double> expect_duration() {
    return expect_unit_number("duration", {{"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0}}, false);
  }

  std::optional<double> expect_angle() {
    return expect_unit_number("angle", {{"deg", 1.0}}, true);
  }

  std::optional<int> expect_count() {
    const Token* t = next();
    if (!t) {
      error(end_column(), "missing step count", {"<integer>"});
      return std::nullopt;
    }
    int value = 0;
    auto [p, ec] = std::from_chars(t->text.data(), t->text.data() + t->text.size(), value);
    if (ec != std::errc{} || p != t->text.data() + t->text.size()) {
      error(t->column, "malformed step count", {"<integer>"});
      return std::nullopt;
    }
    if (value < 1) {
      error(t->column, "step count must be >= 1");
      return std::nullopt;
    }
    return value;
  }

  void expect_end() {
    if (const Token* t = peek())
      error(t->column, "unexpected trailing token '" + std::string(t->text) + "'");
  }

 private:
  int line_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<ParseError>& errors_;
  bool failed_ = false;
};

void parse_line(int line_no, std::string_view line, Sequence& seq,
                std::vector<ParseError>& errors) {
  std::vector<Token> tokens = tokenize_line(line);
  if (tokens.empty()) return;
  LineParser p(line_no, std::move(tokens), errors);

  const std::vector<std::string> keywords = {"ampsweep", "phasesweep", "pulse", "delay"};
  auto kw = p.expect_word(keywords);
  if (!kw) return;

  if (*kw == "ampsweep") {
    auto dir = p.expect_word({"up", "down"});
    auto amp = p.expect_amplitude();
    auto steps = p.expect_count();
    auto dur = p.expect_duration();
    double phase_deg = 0.0;
    if (const Token* t = p.peek(); t && t->text == "phase") {
      p.next();
      if (auto a = p.expect_angle()) phase_deg = *a;
    }
    p.expect_end();
    if (p.failed()) return;
    seq.segments.push_back(AmplitudeSweep{
        *dir == "up" ? SweepDirection::Up : SweepDirection::Down, *amp, *steps, *dur,
        deg2rad(phase_deg)});
  } else if (*kw == "phasesweep") {
    auto rot = p.expect_word({"cw", "ccw"});
    auto amp = p.expect_amplitude();
    auto steps = p.expect_count();
    auto dur = p.expect_duration();
    p.expect_end();
    if (p.failed()) return;
    seq.segments.push_back(PhaseSweep{*rot == "cw" ? SweepRotation::CW : SweepRotation::CCW, *amp,
                                      *steps, *dur});
  } else if (*kw == "pulse") {
    auto target = p.expect_word({"I", "S"});
    auto angle = p.expect_angle();
    auto axis = p.expect_angle();
    auto mode = p.expect_word({"ideal", "nu1"});
    std::optional<double> nu1;
    if (mode && *mode == "nu1") {
      nu1 = p.expect_amplitude("pulse amplitude");
      if (nu1 && *nu1 == 0.0) {
        p.error(p.end_column(), "finite pulse amplitude must be > 0");
        return;
      }
    }
    p.expect_end();
    if (p.failed()) return;
    seq.segments.push_back(
        HardPulseSeg{*target == "I" ? SpinTarget::I : SpinTarget::S, *angle, *axis, nu1});
  } else {  // delay
    auto dur = p.expect_duration();
    p.expect_end();
    if (p.failed()) return;
    seq.segments.push_back(DelaySeg{*dur});
  }
}

}  // namespace

std::string ParseError::to_string() const {
  std::string s = "line " + std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  if (!expected.empty()) {
    s += " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) s += " | ";
      s += expected[i];
    }
    s += ")";
  }
  return s;
}

ParseResult parse_sequence(std::string_view text) {
  ParseResult result;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    parse_line(line_no, line, result.sequence, result.errors);
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return result;
}

}  // namespace berrysim
