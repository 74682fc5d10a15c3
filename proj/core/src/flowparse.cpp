#include "wdflow/flowparse.hpp"

#include "wdflow/text.hpp"

namespace wdflow {

std::vector<std::string> parse_flag_names(unsigned flags) {
  static constexpr std::pair<unsigned, const char*> kNames[] = {
      {kParseMissingPrefix, "missing_prefix"},   {kParseEmpty, "empty"},
      {kParseDroppedItem, "dropped_item"},       {kParseAmbiguousValues, "ambiguous_values"},
      {kParseEmptyAction, "empty_action"},       {kParseTooFewFields, "too_few_fields"},
      {kParseMissingPayload, "missing_payload"}, {kParseUnexpectedPayload, "unexpected_payload"},
  };
  std::vector<std::string> out;
  for (const auto& [bit, name] : kNames)
    if (flags & bit) out.emplace_back(name);
  return out;
}

ParsedWD parse_wd(std::string_view input) {
  ParsedWD out;
  std::string_view body = input;
  if (!text::consume_prefix_icase(body, "Flow:")) out.flags |= kParseMissingPrefix;

  for (auto item : text::split(body, ',')) {
    item = text::trim(item);
    if (item.empty()) continue;
    ParsedStep step;
    const auto colon = item.find(':');
    step.description = std::string(text::trim(item.substr(0, colon)));
    if (colon != std::string_view::npos) {
      const auto rest = item.substr(colon + 1);
      if (rest.find(':') != std::string_view::npos) out.flags |= kParseAmbiguousValues;
      for (auto v : text::split(rest, ';')) {
        v = text::trim(v);
        if (!v.empty()) step.values.emplace_back(v);
      }
    }
    if (step.description.empty()) {
      out.flags |= kParseDroppedItem;
      continue;
    }
    out.steps.push_back(std::move(step));
  }
  if (out.steps.empty()) out.flags |= kParseEmpty;
  return out;
}

ParsedAST parse_action(std::string_view input) {
  ParsedAST out;
  const auto body = text::trim(input);
  const auto colon = body.find(':');
  out.action = std::string(text::trim(body.substr(0, colon)));
  if (colon != std::string_view::npos) {
    for (auto v : text::split(body.substr(colon + 1), ',')) {
      v = text::trim(v);
      if (!v.empty()) out.values.emplace_back(v);
    }
  }
  if (out.action.empty()) {
    out.action = std::string(kEmptyActionSentinel);
    out.flags |= kParseEmptyAction;
  }
  return out;
}

ParsedAST parse_ast(std::string_view input) {
  std::string_view body = input;
  const bool had_prefix = text::consume_prefix_icase(body, "AST:");
  auto out = parse_action(body);
  if (!had_prefix) out.flags |= kParseMissingPrefix;
  return out;
}

ParsedCDS parse_cds(std::string_view input) {
  ParsedCDS out;
  std::string_view body = input;
  if (!text::consume_prefix_icase(body, "CDS:")) out.flags |= kParseMissingPrefix;

  const auto first = body.find(',');
  if (first == std::string_view::npos) {
    out.intent = std::string(text::trim(body));
    out.flags |= kParseTooFewFields;
    if (out.intent.empty()) out.flags |= kParseEmpty;
    out.payload = std::string();
    return out;
  }
  out.intent = std::string(text::trim(body.substr(0, first)));
  const auto rest = body.substr(first + 1);
  const auto second = rest.find(',');
  out.nextstep = std::string(text::trim(rest.substr(0, second)));
  std::optional<std::string> remainder;
  if (second != std::string_view::npos) remainder = std::string(text::trim(rest.substr(second + 1)));

  if (text::iequals(out.nextstep, "end_conversation")) {
    if (remainder && !remainder->empty()) out.flags |= kParseUnexpectedPayload;
    return out;
  }
  if (!remainder || remainder->empty()) {
    out.flags |= kParseMissingPayload;
    out.payload = std::string();
  } else {
    out.payload = std::move(remainder);
  }
  return out;
}

}  // namespace wdflow
