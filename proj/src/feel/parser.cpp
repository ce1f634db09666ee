// Copyright 2026 The bproc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bproc/feel/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "bproc/feel/errors.hpp"

namespace bproc::feel {

namespace {

enum class Tok {
  End,
  Number,
  String,
  Name,
  Plus,
  Minus,
  Star,
  Slash,
  StarStar,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Colon,
  Dot,
  DotDot,
};

struct Token {
  Tok kind;
  std::string text;  // number text, decoded string, or name
  std::size_t column;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto fail = [&](std::size_t at, const std::string& what) {
    throw SyntaxError(at + 1, {}, what);
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      if (i + 1 < src.size() && src[i] == '.' && std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
        ++i;
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      } else if (i < src.size() && src[i] == '.' && !(i + 1 < src.size() && src[i + 1] == '.') &&
                 start == i) {
        ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      out.push_back({Tok::Number, std::string(src.substr(start, i - start)), start + 1});
      continue;
    }
    if (c == '"') {
      std::string s;
      ++i;
      bool closed = false;
      while (i < src.size()) {
        char d = src[i++];
        if (d == '"') {
          closed = true;
          break;
        }
        if (d == '\\' && i < src.size()) {
          char e = src[i++];
          switch (e) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            default: s += e;
          }
        } else {
          s += d;
        }
      }
      if (!closed) fail(start, "unterminated string literal");
      out.push_back({Tok::String, std::move(s), start + 1});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        ++i;
      }
      out.push_back({Tok::Name, std::string(src.substr(start, i - start)), start + 1});
      continue;
    }
    auto two = src.substr(i, 2);
    auto push = [&](Tok k, std::size_t len) {
      out.push_back({k, std::string(src.substr(i, len)), start + 1});
      i += len;
    };
    if (two == "**") { push(Tok::StarStar, 2); continue; }
    if (two == "<=") { push(Tok::Le, 2); continue; }
    if (two == ">=") { push(Tok::Ge, 2); continue; }
    if (two == "!=") { push(Tok::Ne, 2); continue; }
    if (two == "..") { push(Tok::DotDot, 2); continue; }
    switch (c) {
      case '+': push(Tok::Plus, 1); continue;
      case '-': push(Tok::Minus, 1); continue;
      case '*': push(Tok::Star, 1); continue;
      case '/': push(Tok::Slash, 1); continue;
      case '<': push(Tok::Lt, 1); continue;
      case '>': push(Tok::Gt, 1); continue;
      case '=': push(Tok::Eq, 1); continue;
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case '[': push(Tok::LBracket, 1); continue;
      case ']': push(Tok::RBracket, 1); continue;
      case '{': push(Tok::LBrace, 1); continue;
      case '}': push(Tok::RBrace, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case ':': push(Tok::Colon, 1); continue;
      case '.': push(Tok::Dot, 1); continue;
      default: fail(start, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", src.size() + 1});
  return out;
}

bool isKeyword(const std::string& s) {
  return s == "and" || s == "or" || s == "not" || s == "in" || s == "instance" || s == "of" ||
         s == "true" || s == "false" || s == "null";
}

const std::vector<std::string> kPrimaryStart = {"number", "string", "name",  "true", "false",
                                                "null",   "(",      "[",     "]",    "{",
                                                "-",      "not"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ExprPtr parseAll() {
    if (peek().kind == Tok::End) {
      throw SyntaxError(peek().column, {"expression"}, "empty expression");
    }
    ExprPtr e = disjunction();
    if (peek().kind != Tok::End) {
      throw SyntaxError(peek().column, {"end of input", "operator"},
                        "unexpected '" + peek().text + "'");
    }
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool acceptName(std::string_view kw) {
    if (peek().kind == Tok::Name && peek().text == kw) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept(Tok k) {
    if (peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token& expect(Tok k, const std::string& what) {
    if (peek().kind != k) {
      throw SyntaxError(peek().column, {what},
                        peek().kind == Tok::End ? "unexpected end of input"
                                                : "unexpected '" + peek().text + "'");
    }
    return next();
  }

  ExprPtr disjunction() {
    ExprPtr lhs = conjunction();
    while (acceptName("or")) {
      lhs = make(node::Binary{BinaryOp::Or, lhs, conjunction()});
    }
    return lhs;
  }

  ExprPtr conjunction() {
    ExprPtr lhs = negation();
    while (acceptName("and")) {
      lhs = make(node::Binary{BinaryOp::And, lhs, negation()});
    }
    return lhs;
  }

  ExprPtr negation() {
    if (acceptName("not")) return make(node::Unary{UnaryOp::Not, negation()});
    return comparison();
  }

  ExprPtr comparison() {
    ExprPtr lhs = additive();
    BinaryOp op;
    switch (peek().kind) {
      case Tok::Lt: op = BinaryOp::Lt; break;
      case Tok::Le: op = BinaryOp::Le; break;
      case Tok::Gt: op = BinaryOp::Gt; break;
      case Tok::Ge: op = BinaryOp::Ge; break;
      case Tok::Eq: op = BinaryOp::Eq; break;
      case Tok::Ne: op = BinaryOp::Ne; break;
      default:
        if (acceptName("in")) return make(node::In{lhs, additive()});
        if (acceptName("instance")) {
          if (!acceptName("of")) throw SyntaxError(peek().column, {"of"}, "expected 'of'");
          const Token& t = expect(Tok::Name, "type name");
          InstanceType type;
          if (t.text == "string") type = InstanceType::String;
          else if (t.text == "number") type = InstanceType::Number;
          else if (t.text == "boolean") type = InstanceType::Boolean;
          else throw SyntaxError(t.column, {"string", "number", "boolean"}, "unsupported type '" + t.text + "'");
          return make(node::InstanceOf{lhs, type});
        }
        return lhs;
    }
    ++pos_;
    return make(node::Binary{op, lhs, additive()});
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    for (;;) {
      if (accept(Tok::Plus)) lhs = make(node::Binary{BinaryOp::Add, lhs, multiplicative()});
      else if (accept(Tok::Minus)) lhs = make(node::Binary{BinaryOp::Sub, lhs, multiplicative()});
      else return lhs;
    }
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = power();
    for (;;) {
      if (accept(Tok::Star)) lhs = make(node::Binary{BinaryOp::Mul, lhs, power()});
      else if (accept(Tok::Slash)) lhs = make(node::Binary{BinaryOp::Div, lhs, power()});
      else return lhs;
    }
  }

  ExprPtr power() {
    ExprPtr lhs = unary();
    while (accept(Tok::StarStar)) lhs = make(node::Binary{BinaryOp::Pow, lhs, unary()});
    return lhs;
  }

  ExprPtr unary() {
    if (accept(Tok::Minus)) return make(node::Unary{UnaryOp::Neg, unary()});
    return postfix();
  }

  static bool booleanShaped(const Expr& e) {
    if (const auto* b = e.as<node::Binary>()) {
      switch (b->op) {
        case BinaryOp::Add: case BinaryOp::Sub: case BinaryOp::Mul: case BinaryOp::Div:
        case BinaryOp::Pow:
          return false;
        default:
          return true;
      }
    }
    if (const auto* u = e.as<node::Unary>()) return u->op == UnaryOp::Not;
    if (const auto* l = e.as<node::Literal>()) return l->value.kind() == Value::Kind::Boolean;
    return e.as<node::In>() || e.as<node::InstanceOf>();
  }

  ExprPtr postfix() {
    ExprPtr base = primary();
    for (;;) {
      if (!inRangeEnd_ && accept(Tok::LBracket)) {
        Nested guard(inRangeEnd_);
        ExprPtr inner = disjunction();
        expect(Tok::RBracket, "]");
        if (booleanShaped(*inner)) base = make(node::Filter{base, inner});
        else base = make(node::Index{base, inner});
      } else if (peek().kind == Tok::Dot && peek(1).kind == Tok::Name) {
        ++pos_;
        base = make(node::Path{base, next().text});
      } else {
        return base;
      }
    }
  }

  bool rangeHiClosed() {
    if (accept(Tok::RBracket)) return true;
    if (accept(Tok::RParen) || accept(Tok::LBracket)) return false;
    throw SyntaxError(peek().column, {"]", ")", "["}, "unterminated range");
  }

  // The upper end of a range may be followed by `[` closing the range
  // (as in [1..5[), so postfix indexing is off there unless re-nested.
  struct Nested {
    explicit Nested(bool& flag) : flag_(flag), saved_(flag) { flag_ = false; }
    ~Nested() { flag_ = saved_; }
    bool& flag_;
    bool saved_;
  };

  ExprPtr rangeEnd() {
    bool saved = inRangeEnd_;
    inRangeEnd_ = true;
    ExprPtr e = disjunction();
    inRangeEnd_ = saved;
    return e;
  }

  ExprPtr primary() {
    const Token& t = peek();
    Nested guard(inRangeEnd_);
    switch (t.kind) {
      case Tok::Number: {
        ++pos_;
        if (t.text.find_first_of(".eE") == std::string::npos) {
          std::int64_t v = 0;
          auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
          if (res.ec == std::errc()) return make(node::Literal{Value(v)});
        }
        return make(node::Literal{Value(std::strtod(t.text.c_str(), nullptr))});
      }
      case Tok::String:
        ++pos_;
        return make(node::Literal{Value(t.text)});
      case Tok::Name:
        return namePrimary();
      case Tok::LParen: {
        ++pos_;
        ExprPtr inner = disjunction();
        if (accept(Tok::DotDot)) {
          ExprPtr hi = rangeEnd();
          return make(node::RangeLiteral{inner, hi, false, rangeHiClosed()});
        }
        expect(Tok::RParen, ")");
        return inner;
      }
      case Tok::RBracket: {
        ++pos_;
        ExprPtr lo = disjunction();
        expect(Tok::DotDot, "..");
        ExprPtr hi = rangeEnd();
        return make(node::RangeLiteral{lo, hi, false, rangeHiClosed()});
      }
      case Tok::LBracket: {
        ++pos_;
        std::vector<ExprPtr> items;
        if (accept(Tok::RBracket)) return make(node::ListLiteral{});
        ExprPtr first = disjunction();
        if (accept(Tok::DotDot)) {
          ExprPtr hi = rangeEnd();
          return make(node::RangeLiteral{first, hi, true, rangeHiClosed()});
        }
        items.push_back(first);
        while (accept(Tok::Comma)) items.push_back(disjunction());
        expect(Tok::RBracket, "]");
        return make(node::ListLiteral{std::move(items)});
      }
      case Tok::LBrace: {
        ++pos_;
        std::vector<std::pair<std::string, ExprPtr>> entries;
        if (accept(Tok::RBrace)) return make(node::ContextLiteral{});
        do {
          const Token& k = peek();
          if (k.kind != Tok::Name && k.kind != Tok::String) {
            throw SyntaxError(k.column, {"name", "string"}, "expected context key");
          }
          ++pos_;
          expect(Tok::Colon, ":");
          entries.emplace_back(k.text, disjunction());
        } while (accept(Tok::Comma));
        expect(Tok::RBrace, "}");
        return make(node::ContextLiteral{std::move(entries)});
      }
      case Tok::End:
        throw SyntaxError(t.column, kPrimaryStart, "unexpected end of input");
      default:
        throw SyntaxError(t.column, kPrimaryStart, "unexpected '" + t.text + "'");
    }
  }

  std::vector<ExprPtr> arguments() {
    Nested guard(inRangeEnd_);
    expect(Tok::LParen, "(");
    std::vector<ExprPtr> args;
    if (accept(Tok::RParen)) return args;
    args.push_back(disjunction());
    while (accept(Tok::Comma)) args.push_back(disjunction());
    expect(Tok::RParen, ")");
    return args;
  }

  ExprPtr namePrimary() {
    const Token t = next();
    if (t.text == "true") return make(node::Literal{Value(true)});
    if (t.text == "false") return make(node::Literal{Value(false)});
    if (t.text == "null") return make(node::Literal{Value()});
    if (isKeyword(t.text)) {
      throw SyntaxError(t.column, kPrimaryStart, "unexpected keyword '" + t.text + "'");
    }
    if ((t.text == "date" || t.text == "time") && peek().kind == Tok::LParen) {
      ++pos_;
      const Token& s = expect(Tok::String, "string literal");
      expect(Tok::RParen, ")");
      TemporalKind kind = t.text == "date" ? TemporalKind::Date : TemporalKind::Time;
      bool ok = kind == TemporalKind::Date ? parseDate(s.text).has_value()
                                           : parseTime(s.text).has_value();
      if (!ok) throw SyntaxError(s.column, {}, "malformed " + t.text + " literal \"" + s.text + "\"");
      return make(node::TemporalLiteral{kind, s.text});
    }
    if (t.text == "overlaps" && peek().kind == Tok::Name && peek().text == "before" &&
        peek(1).kind == Tok::LParen) {
      ++pos_;
      return call(Builtin::OverlapsBefore, 2, t.column);
    }
    if (peek().kind == Tok::LParen) {
      static const std::pair<const char*, Builtin> unary[] = {{"abs", Builtin::Abs},
                                                              {"floor", Builtin::Floor},
                                                              {"ceiling", Builtin::Ceiling},
                                                              {"sqrt", Builtin::Sqrt},
                                                              {"length", Builtin::Length}};
      for (const auto& [name, fn] : unary) {
        if (t.text == name) return call(fn, 1, t.column);
      }
      throw SyntaxError(t.column, {"abs", "floor", "ceiling", "sqrt", "length", "overlaps before"},
                        "unknown function '" + t.text + "'");
    }
    return make(node::Variable{t.text});
  }

  ExprPtr call(Builtin fn, std::size_t arity, std::size_t column) {
    auto args = arguments();
    if (args.size() != arity) {
      throw SyntaxError(column, {}, std::string(builtinName(fn)) + " expects " +
                                        std::to_string(arity) + " argument(s)");
    }
    return make(node::Call{fn, std::move(args)});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool inRangeEnd_ = false;
};

// Binding strength used by the renderer; mirrors the grammar levels.
enum Prec { kOr = 1, kAnd, kNot, kCmp, kAdd, kMul, kPow, kUnary, kPostfix, kPrimary };

int precedence(const Expr& e) {
  if (const auto* b = e.as<node::Binary>()) {
    switch (b->op) {
      case BinaryOp::Or: return kOr;
      case BinaryOp::And: return kAnd;
      case BinaryOp::Add: case BinaryOp::Sub: return kAdd;
      case BinaryOp::Mul: case BinaryOp::Div: return kMul;
      case BinaryOp::Pow: return kPow;
      default: return kCmp;
    }
  }
  if (const auto* u = e.as<node::Unary>()) return u->op == UnaryOp::Not ? kNot : kUnary;
  if (e.as<node::In>() || e.as<node::InstanceOf>()) return kCmp;
  if (e.as<node::Index>() || e.as<node::Filter>() || e.as<node::Path>()) return kPostfix;
  if (const auto* l = e.as<node::Literal>()) {
    const Value& v = l->value;
    if ((v.kind() == Value::Kind::Integer && v.asInteger() < 0) ||
        (v.kind() == Value::Kind::Decimal && std::signbit(v.asDecimal()))) {
      return kUnary;
    }
  }
  return kPrimary;
}

std::string renderAt(const ExprPtr& e, int minPrec);

// Would the rendered text contain a `[...]` postfix outside any grouping?
bool bareBracket(const Expr& e) {
  if (e.as<node::Index>() || e.as<node::Filter>()) return true;
  if (const auto* b = e.as<node::Binary>()) return bareBracket(*b->lhs) || bareBracket(*b->rhs);
  if (const auto* u = e.as<node::Unary>()) return u->op == UnaryOp::Neg && bareBracket(*u->operand);
  if (const auto* in = e.as<node::In>()) return bareBracket(*in->operand) || bareBracket(*in->container);
  if (const auto* io = e.as<node::InstanceOf>()) return bareBracket(*io->operand);
  if (const auto* p = e.as<node::Path>()) return bareBracket(*p->base);
  return false;
}

std::string renderNode(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Literal>) {
          return render(n.value);
        } else if constexpr (std::is_same_v<T, node::TemporalLiteral>) {
          return std::string(n.kind == TemporalKind::Date ? "date" : "time") + "(" +
                 render(Value(n.text)) + ")";
        } else if constexpr (std::is_same_v<T, node::Variable>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, node::Unary>) {
          if (n.op == UnaryOp::Not) return "not(" + renderAt(n.operand, kOr) + ")";
          return "-" + renderAt(n.operand, kUnary);
        } else if constexpr (std::is_same_v<T, node::Binary>) {
          int p = precedence(e);
          int lhsMin = p == kCmp ? kAdd : p;
          int rhsMin = p == kCmp ? kAdd : p + 1;
          if (p == kPow) rhsMin = kUnary;
          return renderAt(n.lhs, lhsMin) + " " + opSymbol(n.op) + " " + renderAt(n.rhs, rhsMin);
        } else if constexpr (std::is_same_v<T, node::Call>) {
          std::string out = std::string(builtinName(n.fn)) + "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            out += renderAt(n.args[i], kOr);
          }
          return out + ")";
        } else if constexpr (std::is_same_v<T, node::InstanceOf>) {
          static const char* names[] = {"string", "number", "boolean"};
          return renderAt(n.operand, kAdd) + " instance of " + names[static_cast<int>(n.type)];
        } else if constexpr (std::is_same_v<T, node::ListLiteral>) {
          std::string out = "[";
          for (std::size_t i = 0; i < n.items.size(); ++i) {
            if (i) out += ", ";
            out += renderAt(n.items[i], kOr);
          }
          return out + "]";
        } else if constexpr (std::is_same_v<T, node::Index>) {
          return renderAt(n.base, kPostfix) + "[" + renderAt(n.index, kOr) + "]";
        } else if constexpr (std::is_same_v<T, node::Filter>) {
          return renderAt(n.base, kPostfix) + "[" + renderAt(n.predicate, kOr) + "]";
        } else if constexpr (std::is_same_v<T, node::ContextLiteral>) {
          std::string out = "{";
          for (std::size_t i = 0; i < n.entries.size(); ++i) {
            if (i) out += ", ";
            const auto& key = n.entries[i].first;
            bool plain = !key.empty() && !isKeyword(key) &&
                         (std::isalpha(static_cast<unsigned char>(key[0])) || key[0] == '_');
            for (char c : key) {
              if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
            }
            out += plain ? key : render(Value(key));
            out += ": " + renderAt(n.entries[i].second, kOr);
          }
          return out + "}";
        } else if constexpr (std::is_same_v<T, node::Path>) {
          return renderAt(n.base, kPostfix) + "." + n.member;
        } else if constexpr (std::is_same_v<T, node::RangeLiteral>) {
          return std::string(n.loClosed ? "[" : "(") + renderAt(n.lo, kOr) + ".." +
                 renderAt(n.hi, bareBracket(*n.hi) ? kPrimary + 1 : kOr) + (n.hiClosed ? "]" : ")");
        } else if constexpr (std::is_same_v<T, node::In>) {
          return renderAt(n.operand, kAdd) + " in " + renderAt(n.container, kAdd);
        }
      },
      e.node);
}

std::string renderAt(const ExprPtr& e, int minPrec) {
  std::string s = renderNode(*e);
  if (precedence(*e) < minPrec) return "(" + s + ")";
  return s;
}

}  // namespace

ExprPtr parseExpr(std::string_view text) { return Parser(lex(text)).parseAll(); }

std::string render(const Expr& e) { return renderNode(e); }

}  // namespace bproc::feel
