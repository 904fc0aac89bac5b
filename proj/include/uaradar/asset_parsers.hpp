#pragma once

#include <string>
#include <string_view>

#include "uaradar/syntax_tree.hpp"

namespace uaradar {

// Node kinds: "stylesheet" (root), "rule" (label = selector list joined with
// ", "), "atrule" (label = "@name prelude"), "decl" (label = "property: value",
// lowercased, whitespace collapsed). Malformed input is skipped up to the next
// rule or declaration boundary.
SyntaxTree parse_css(std::string_view css);

// Lexical block tree. Leaves are tokens in source order with kinds "ident",
// "keyword", "num", "str", "template", "regex" and "punct"; brackets open
// groups of kind "paren", "bracket" or "brace", and a parenthesis directly
// after a non-keyword identifier becomes a "call" group that owns the
// identifier. Comments are dropped. Root kind is "program".
SyntaxTree parse_js_lexical(std::string_view js);

// Strings up to this many bytes keep their contents as label; longer ones
// are labelled "str#<hash>".
inline constexpr std::size_t kMaxLiteralLabel = 64;

class CssParser final : public AssetParser {
 public:
  SyntaxTree parse(const std::string& bytes) const override { return parse_css(bytes); }
};

class JsLexicalParser final : public AssetParser {
 public:
  SyntaxTree parse(const std::string& bytes) const override { return parse_js_lexical(bytes); }
};

}  // namespace uaradar
