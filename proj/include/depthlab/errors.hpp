#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace depthlab {

/// Invalid experiment, game or player configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was called outside its precondition (e.g. asking a finished
/// game for a move).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A value lies outside the mathematical domain of a rating formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A persisted match log cannot be trusted or resumed.
class CorruptLog : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Rule { Occupied, Capture, Suicide, OffBoard };

inline std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::Occupied: return "occupied";
    case Rule::Capture: return "capture";
    case Rule::Suicide: return "suicide";
    case Rule::OffBoard: return "off-board";
  }
  return "?";
}

/// A move that breaks a placement rule of the game.
class RuleViolation : public std::invalid_argument {
 public:
  RuleViolation(Rule rule, const std::string& detail)
      : std::invalid_argument(std::string(to_string(rule)) + ": " + detail), rule_(rule) {}

  Rule rule() const noexcept { return rule_; }

 private:
  Rule rule_;
};

}  // namespace depthlab
