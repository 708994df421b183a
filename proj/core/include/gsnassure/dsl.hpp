#pragma once
// Textual assurance-case format (.gsn). One case block per file:
//
//   case "NAME" {
//     goal G0 "statement" [undeveloped] [scope: [class, ...]] [supports P[, P]*]
//     strategy S1 "statement" [supports P[, P]*]
//     solution Sn1 "statement" [valid|invalid] [supports P[, P]*]
//     context C1 "statement" [of H[, H]*]          # also: assumption, justification
//     defeater D1 "statement" [challenges T[, T]*] [state: open|mitigated|retired]
//                  [mitigated_by G[, G]*]
//   }
//
// `supports P` declares P as the parent (stored edge P -supported_by-> child).
// `#` comments run to end of line; encoding is UTF-8; spans count bytes.
// print() emits the canonical form: nodes in numeric-aware id order, clause
// targets sorted, defaults (valid, open) omitted. parse(print(g)) == g.

#include <string>
#include <string_view>
#include <vector>

#include "gsnassure/argument.hpp"

namespace gsn {

struct SourceSpan {
  int line = 1;    // 1-based
  int column = 1;  // 1-based, bytes
  int length = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct ParseError {
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;  // token names, may be empty
};

struct ParseResult {
  ArgumentGraph graph;               // meaningful only when ok()
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty(); }
};

// Never throws; reports as many errors as it can recover to.
ParseResult parse(std::string_view text);

// Canonical printer. Throws InvalidGraph if validate() reports errors.
std::string print(const ArgumentGraph& graph);

std::string to_text(const ParseError& error);

}  // namespace gsn
