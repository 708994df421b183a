#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "gsnassure/dsl.hpp"

namespace gsn {

namespace {

enum class TokenType { Word, String, LBrace, RBrace, LBracket, RBracket, Comma, Colon, End };

struct Token {
  TokenType type = TokenType::End;
  std::string text;     // word text or decoded string value
  SourceSpan span;
};

const char* token_type_name(TokenType t) {
  switch (t) {
    case TokenType::Word: return "identifier";
    case TokenType::String: return "string";
    case TokenType::LBrace: return "'{'";
    case TokenType::RBrace: return "'}'";
    case TokenType::LBracket: return "'['";
    case TokenType::RBracket: return "']'";
    case TokenType::Comma: return "','";
    case TokenType::Colon: return "':'";
    case TokenType::End: return "end of input";
  }
  return "?";
}

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
}

class Lexer {
public:
  Lexer(std::string_view text, std::vector<ParseError>& errors)
      : text_(text), errors_(errors) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') { advance_line(); continue; }
      if (c == ' ' || c == '\t' || c == '\r') { ++pos_; ++col_; continue; }
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') { ++pos_; ++col_; }
        continue;
      }
      SourceSpan at{line_, col_, 1};
      switch (c) {
        case '{': tokens.push_back({TokenType::LBrace, "{", at}); ++pos_; ++col_; continue;
        case '}': tokens.push_back({TokenType::RBrace, "}", at}); ++pos_; ++col_; continue;
        case '[': tokens.push_back({TokenType::LBracket, "[", at}); ++pos_; ++col_; continue;
        case ']': tokens.push_back({TokenType::RBracket, "]", at}); ++pos_; ++col_; continue;
        case ',': tokens.push_back({TokenType::Comma, ",", at}); ++pos_; ++col_; continue;
        case ':': tokens.push_back({TokenType::Colon, ":", at}); ++pos_; ++col_; continue;
        case '"': tokens.push_back(lex_string()); continue;
        default: break;
      }
      if (word_char(c)) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && word_char(text_[pos_])) { ++pos_; ++col_; }
        at.length = static_cast<int>(pos_ - start);
        tokens.push_back({TokenType::Word, std::string(text_.substr(start, pos_ - start)), at});
        continue;
      }
      // Illegal byte run: one error covering the run, then resync.
      std::size_t start = pos_;
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
             !word_char(text_[pos_]) && std::string_view("{}[],:\"#").find(text_[pos_]) ==
                 std::string_view::npos) {
        ++pos_;
        ++col_;
      }
      at.length = static_cast<int>(pos_ - start);
      errors_.push_back({at, "unexpected character sequence", {}});
    }
    tokens.push_back({TokenType::End, "", {line_, col_, 1}});
    return tokens;
  }

private:
  void advance_line() { ++pos_; ++line_; col_ = 1; }

  Token lex_string() {
    SourceSpan at{line_, col_, 1};
    std::size_t start = pos_;
    ++pos_; ++col_;  // opening quote
    std::string value;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '"') {
        ++pos_; ++col_;
        at.length = static_cast<int>(pos_ - start);
        return {TokenType::String, value, at};
      }
      if (c == '\n') break;  // unterminated on this line
      if (c == '\\' && pos_ + 1 < text_.size()) {
        char e = text_[pos_ + 1];
        pos_ += 2; col_ += 2;
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          default:
            errors_.push_back({{line_, col_ - 2, 2}, "unknown escape sequence", {}});
            value += e;
        }
        continue;
      }
      value += c;
      ++pos_; ++col_;
    }
    at.length = static_cast<int>(pos_ - start);
    errors_.push_back({at, "unterminated string", {}});
    return {TokenType::String, value, at};
  }

  std::string_view text_;
  std::vector<ParseError>& errors_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// A relation clause recorded during the first pass and resolved once all
// declarations are known (ids may be referenced before their declaration in
// canonical output).
struct PendingEdge {
  Edge edge;
  SourceSpan span;  // span of the referenced id token
};

class Parser {
public:
  Parser(std::vector<Token> tokens, std::vector<ParseError>& errors)
      : tokens_(std::move(tokens)), errors_(errors) {}

  ArgumentGraph run() {
    expect_word("case");
    ArgumentGraph graph;
    if (peek().type == TokenType::String) graph.set_name(next().text);
    else fail(peek(), "case name string expected", {"string"});
    expect(TokenType::LBrace);
    while (peek().type != TokenType::RBrace && peek().type != TokenType::End) {
      parse_decl(graph);
    }
    expect(TokenType::RBrace);
    if (peek().type != TokenType::End)
      fail(peek(), "content after closing '}'", {"end of input"});
    resolve_edges(graph);
    return graph;
  }

private:
  static constexpr std::string_view kDeclKeywords[] = {
      "goal", "strategy", "solution", "context", "assumption", "justification", "defeater"};

  static bool is_decl_keyword(const Token& t) {
    if (t.type != TokenType::Word) return false;
    for (std::string_view k : kDeclKeywords)
      if (t.text == k) return true;
    return false;
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  void fail(const Token& at, std::string message, std::vector<std::string> expected) {
    errors_.push_back({at.span, std::move(message), std::move(expected)});
  }

  bool expect(TokenType type) {
    if (peek().type == type) { next(); return true; }
    fail(peek(), std::string(token_type_name(type)) + " expected", {token_type_name(type)});
    return false;
  }

  bool expect_word(std::string_view word) {
    if (peek().type == TokenType::Word && peek().text == word) { next(); return true; }
    fail(peek(), "'" + std::string(word) + "' expected", {std::string(word)});
    return false;
  }

  bool at_clause_word(std::string_view word) const {
    return peek().type == TokenType::Word && peek().text == word;
  }

  // Skip to the next declaration keyword or closing brace.
  void synchronize() {
    while (peek().type != TokenType::End && peek().type != TokenType::RBrace &&
           !is_decl_keyword(peek()))
      next();
  }

  std::optional<Token> parse_id() {
    if (peek().type != TokenType::Word) {
      fail(peek(), "node id expected", {"identifier"});
      return std::nullopt;
    }
    Token t = next();
    if (!valid_id(t.text)) {
      fail(t, "invalid node id '" + t.text + "'", {});
      return std::nullopt;
    }
    return t;
  }

  std::optional<std::string> parse_statement() {
    if (peek().type != TokenType::String) {
      fail(peek(), "statement string expected", {"string"});
      return std::nullopt;
    }
    return next().text;
  }

  // `keyword id[, id]*`; emits one pending edge per target.
  void parse_targets(EdgeKind kind, bool node_is_source, const std::string& node_id) {
    next();  // clause keyword
    while (true) {
      auto id = parse_id();
      if (!id) return;
      Edge e = node_is_source ? Edge{node_id, kind, id->text} : Edge{id->text, kind, node_id};
      pending_.push_back({e, id->span});
      if (peek().type == TokenType::Comma) { next(); continue; }
      break;
    }
  }

  std::optional<std::set<AttackClass>> parse_scope_list() {
    next();  // "scope"
    if (!expect(TokenType::Colon)) return std::nullopt;
    if (!expect(TokenType::LBracket)) return std::nullopt;
    std::set<AttackClass> scope;
    if (peek().type == TokenType::RBracket) { next(); return scope; }
    while (true) {
      if (peek().type != TokenType::Word) {
        fail(peek(), "attack class expected", {"attack class"});
        return std::nullopt;
      }
      Token t = next();
      auto cls = attack_class_from_token(t.text);
      if (!cls) {
        fail(t, "unknown attack class '" + t.text + "'", {});
        return std::nullopt;
      }
      scope.insert(*cls);
      if (peek().type == TokenType::Comma) { next(); continue; }
      break;
    }
    if (!expect(TokenType::RBracket)) return std::nullopt;
    return scope;
  }

  void declare(ArgumentGraph& graph, Node node, const SourceSpan& id_span) {
    if (graph.contains(node.id)) {
      errors_.push_back({id_span, "duplicate node id '" + node.id + "'", {}});
      return;
    }
    graph.add_node(node);  // shape is consistent by construction here
  }

  void parse_decl(ArgumentGraph& graph) {
    if (!is_decl_keyword(peek())) {
      fail(peek(), "declaration expected", {"goal", "strategy", "solution", "context",
                                            "assumption", "justification", "defeater"});
      next();
      synchronize();
      return;
    }
    Token kw = next();
    auto id = parse_id();
    auto stmt = id ? parse_statement() : std::nullopt;
    if (!id || !stmt) { synchronize(); return; }

    Node node;
    node.id = id->text;
    node.statement = *stmt;

    if (kw.text == "goal") {
      node.kind = NodeKind::Goal;
      if (at_clause_word("undeveloped")) { next(); node.undeveloped = true; }
      if (at_clause_word("scope")) {
        auto scope = parse_scope_list();
        if (!scope) { synchronize(); return; }
        node.scope = std::move(*scope);
      }
      if (at_clause_word("supports")) parse_targets(EdgeKind::SupportedBy, false, node.id);
    } else if (kw.text == "strategy") {
      node.kind = NodeKind::Strategy;
      if (at_clause_word("supports")) parse_targets(EdgeKind::SupportedBy, false, node.id);
    } else if (kw.text == "solution") {
      node.kind = NodeKind::Solution;
      node.evidence_valid = true;
      if (at_clause_word("valid")) { next(); }
      else if (at_clause_word("invalid")) { next(); node.evidence_valid = false; }
      if (at_clause_word("supports")) parse_targets(EdgeKind::SupportedBy, false, node.id);
    } else if (kw.text == "context" || kw.text == "assumption" || kw.text == "justification") {
      node.kind = kw.text == "context"      ? NodeKind::Context
                  : kw.text == "assumption" ? NodeKind::Assumption
                                            : NodeKind::Justification;
      if (at_clause_word("of")) parse_targets(EdgeKind::InContextOf, false, node.id);
    } else {  // defeater
      node.kind = NodeKind::Defeater;
      node.defeater_state = DefeaterState::Open;
      if (at_clause_word("challenges")) parse_targets(EdgeKind::ChallengedBy, false, node.id);
      if (at_clause_word("state")) {
        next();
        if (!expect(TokenType::Colon)) { synchronize(); return; }
        if (peek().type != TokenType::Word) {
          fail(peek(), "defeater state expected", {"open", "mitigated", "retired"});
          synchronize();
          return;
        }
        Token st = next();
        auto state = defeater_state_from_token(st.text);
        if (!state) {
          fail(st, "unknown defeater state '" + st.text + "'", {"open", "mitigated", "retired"});
          synchronize();
          return;
        }
        node.defeater_state = *state;
      }
      if (at_clause_word("mitigated_by")) parse_targets(EdgeKind::MitigatedBy, true, node.id);
    }

    declare(graph, std::move(node), id->span);

    if (peek().type != TokenType::RBrace && peek().type != TokenType::End &&
        !is_decl_keyword(peek())) {
      fail(peek(), "unexpected token in declaration", {});
      synchronize();
    }
  }

  void resolve_edges(ArgumentGraph& graph) {
    for (const PendingEdge& p : pending_) {
      const std::string* missing = nullptr;
      if (!graph.contains(p.edge.from)) missing = &p.edge.from;
      else if (!graph.contains(p.edge.to)) missing = &p.edge.to;
      if (missing) {
        errors_.push_back({p.span, "unknown node '" + *missing + "'", {}});
        continue;
      }
      try {
        graph.add_edge(p.edge);
      } catch (const GsnError& err) {
        errors_.push_back({p.span, err.what(), {}});
      }
    }
  }

  std::vector<Token> tokens_;
  std::vector<ParseError>& errors_;
  std::size_t pos_ = 0;
  std::vector<PendingEdge> pending_;
};

}  // namespace

ParseResult parse(std::string_view text) {
  ParseResult result;
  Lexer lexer(text, result.errors);
  std::vector<Token> tokens = lexer.run();
  Parser parser(std::move(tokens), result.errors);
  ArgumentGraph graph = parser.run();
  if (result.ok()) result.graph = std::move(graph);
  return result;
}

std::string to_text(const ParseError& error) {
  std::ostringstream os;
  os << error.span.line << ":" << error.span.column << ": " << error.message;
  if (!error.expected.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < error.expected.size(); ++i) {
      if (i) os << ", ";
      os << error.expected[i];
    }
    os << ")";
  }
  return os.str();
}

}  // namespace gsn
