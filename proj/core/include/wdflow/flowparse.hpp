#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Inverse of the target grammars produced by taskcast. Parsers are total:
// any byte string yields a structure, problems are reported through flags.
namespace wdflow {

enum ParseFlag : unsigned {
  kParseMissingPrefix = 1u << 0,
  kParseEmpty = 1u << 1,
  kParseDroppedItem = 1u << 2,
  kParseAmbiguousValues = 1u << 3,
  kParseEmptyAction = 1u << 4,
  kParseTooFewFields = 1u << 5,
  kParseMissingPayload = 1u << 6,
  kParseUnexpectedPayload = 1u << 7,
};

std::vector<std::string> parse_flag_names(unsigned flags);

struct ParsedStep {
  std::string description;
  std::vector<std::string> values;

  bool operator==(const ParsedStep&) const = default;
};

struct ParsedWD {
  std::vector<ParsedStep> steps;
  unsigned flags = 0;
};

inline constexpr std::string_view kEmptyActionSentinel = "<empty-action>";

struct ParsedAST {
  std::string action;
  std::vector<std::string> values;
  unsigned flags = 0;
};

struct ParsedCDS {
  std::string intent;
  std::string nextstep;
  std::optional<std::string> payload;  // absent iff nextstep is end_conversation
  unsigned flags = 0;
};

ParsedWD parse_wd(std::string_view text);
ParsedAST parse_ast(std::string_view text);
ParsedCDS parse_cds(std::string_view text);

// "name" or "name:v1, v2" without any prefix; used for CDS action payloads.
ParsedAST parse_action(std::string_view text);

}  // namespace wdflow
