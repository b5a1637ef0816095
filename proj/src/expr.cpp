// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#include "cba/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace cba {
namespace {

constexpr double kSqrtClamp = 1e-12;

struct Token {
  enum Type { Number, Ident, Op, LParen, RParen, Comma, End } type;
  std::size_t offset;
  double number = 0.0;
  std::string ident;
  char op = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ >= text_.size()) {
      t.type = Token::End;
      return t;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.data() + pos_;
      char* end = nullptr;
      t.number = std::strtod(begin, &end);
      if (end == begin) throw ParseError(pos_, "malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      t.type = Token::Number;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      t.type = Token::Ident;
      t.ident = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    switch (c) {
      case '+':
      case '-':
      case '*':
      case '^':
        t.type = Token::Op;
        t.op = c;
        ++pos_;
        return t;
      case '(':
        t.type = Token::LParen;
        ++pos_;
        return t;
      case ')':
        t.type = Token::RParen;
        ++pos_;
        return t;
      case ',':
        t.type = Token::Comma;
        ++pos_;
        return t;
      default:
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

ExprPtr make(ExprKind k, ExprPtr a = nullptr, ExprPtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { advance(); }

  ExprPtr parse() {
    ExprPtr e = sum();
    if (cur_.type != Token::End) throw ParseError(cur_.offset, "trailing input");
    return e;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  bool is_op(char c) const { return cur_.type == Token::Op && cur_.op == c; }

  ExprPtr sum() {
    ExprPtr e = term();
    while (is_op('+') || is_op('-')) {
      char op = cur_.op;
      advance();
      ExprPtr r = term();
      e = make(op == '+' ? ExprKind::Add : ExprKind::Sub, e, r);
    }
    return e;
  }

  ExprPtr term() {
    ExprPtr e = factor();
    while (is_op('*')) {
      advance();
      e = make(ExprKind::Mul, e, factor());
    }
    return e;
  }

  ExprPtr factor() {
    if (is_op('-')) {
      advance();
      return make(ExprKind::Neg, factor());
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (is_op('^')) {
      std::size_t at = cur_.offset;
      advance();
      if (cur_.type != Token::Number) throw ParseError(cur_.offset, "exponent must be a nonnegative integer literal");
      double v = cur_.number;
      int k = static_cast<int>(v);
      if (v < 0 || static_cast<double>(k) != v)
        throw ParseError(cur_.offset, "exponent must be a nonnegative integer literal");
      advance();
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprKind::PowInt;
      n->exponent = k;
      n->lhs = base;
      (void)at;
      return n;
    }
    return base;
  }

  ExprPtr atom() {
    switch (cur_.type) {
      case Token::Number: {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprKind::Constant;
        n->value = cur_.number;
        advance();
        return n;
      }
      case Token::Ident: {
        std::string name = cur_.ident;
        std::size_t at = cur_.offset;
        advance();
        if (name == "abs" || name == "sqrt") {
          expect_lparen();
          ExprPtr a = sum();
          expect_rparen();
          return make(name == "abs" ? ExprKind::Abs : ExprKind::Sqrt, a);
        }
        if (name == "min" || name == "max") {
          expect_lparen();
          ExprPtr a = sum();
          if (cur_.type != Token::Comma) throw ParseError(cur_.offset, "expected ','");
          advance();
          ExprPtr b = sum();
          expect_rparen();
          return make(name == "min" ? ExprKind::Min : ExprKind::Max, a, b);
        }
        if (name.size() >= 2 && name[0] == 'x') {
          bool digits = true;
          for (std::size_t i = 1; i < name.size(); ++i)
            digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
          if (digits) {
            int idx = std::atoi(name.c_str() + 1);
            if (idx >= 1) {
              auto n = std::make_shared<ExprNode>();
              n->kind = ExprKind::Var;
              n->var = idx;
              return n;
            }
          }
        }
        throw ParseError(at, "unknown identifier '" + name + "'");
      }
      case Token::LParen: {
        advance();
        ExprPtr e = sum();
        expect_rparen();
        return e;
      }
      default:
        throw ParseError(cur_.offset, "expected operand");
    }
  }

  void expect_lparen() {
    if (cur_.type != Token::LParen) throw ParseError(cur_.offset, "expected '('");
    advance();
  }
  void expect_rparen() {
    if (cur_.type != Token::RParen) throw ParseError(cur_.offset, "expected ')'");
    advance();
  }

  Lexer lex_;
  Token cur_;
};

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
      return 2;
    case ExprKind::Neg:
      return 3;
    case ExprKind::PowInt:
      return 4;
    default:
      return 5;
  }
}

std::string fmt_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void render(const ExprPtr& e, std::string& out, int parent_prec) {
  int prec = precedence(e->kind);
  bool need = prec < parent_prec;
  if (need) out += '(';
  switch (e->kind) {
    case ExprKind::Constant:
      if (e->value < 0) {
        out += '(';
        out += fmt_number(e->value);
        out += ')';
      } else {
        out += fmt_number(e->value);
      }
      break;
    case ExprKind::Var:
      out += 'x';
      out += std::to_string(e->var);
      break;
    case ExprKind::Add:
      render(e->lhs, out, 1);
      out += " + ";
      render(e->rhs, out, 2);
      break;
    case ExprKind::Sub:
      render(e->lhs, out, 1);
      out += " - ";
      render(e->rhs, out, 2);
      break;
    case ExprKind::Neg:
      out += '-';
      render(e->lhs, out, 3);
      break;
    case ExprKind::Mul:
      render(e->lhs, out, 2);
      out += '*';
      render(e->rhs, out, 3);
      break;
    case ExprKind::PowInt:
      render(e->lhs, out, 5);
      out += '^';
      out += std::to_string(e->exponent);
      break;
    case ExprKind::Abs:
      out += "abs(";
      render(e->lhs, out, 0);
      out += ')';
      break;
    case ExprKind::Sqrt:
      out += "sqrt(";
      render(e->lhs, out, 0);
      out += ')';
      break;
    case ExprKind::Min:
    case ExprKind::Max:
      out += e->kind == ExprKind::Min ? "min(" : "max(";
      render(e->lhs, out, 0);
      out += ", ";
      render(e->rhs, out, 0);
      out += ')';
      break;
  }
  if (need) out += ')';
}

}  // namespace

ExprPtr parse_expr(std::string_view text) {
  if (text.empty()) throw ParseError(0, "empty expression");
  Parser p(text);
  return p.parse();
}

double eval_expr(const ExprPtr& e, const Vec& p) {
  switch (e->kind) {
    case ExprKind::Constant:
      return e->value;
    case ExprKind::Var:
      if (static_cast<std::size_t>(e->var) > p.size())
        throw InputError("eval: variable x" + std::to_string(e->var) + " exceeds dimension " +
                         std::to_string(p.size()));
      return p[static_cast<std::size_t>(e->var - 1)];
    case ExprKind::Add:
      return eval_expr(e->lhs, p) + eval_expr(e->rhs, p);
    case ExprKind::Sub:
      return eval_expr(e->lhs, p) - eval_expr(e->rhs, p);
    case ExprKind::Neg:
      return -eval_expr(e->lhs, p);
    case ExprKind::Mul:
      return eval_expr(e->lhs, p) * eval_expr(e->rhs, p);
    case ExprKind::PowInt: {
      double b = eval_expr(e->lhs, p);
      double r = 1.0;
      for (int i = 0; i < e->exponent; ++i) r *= b;
      return r;
    }
    case ExprKind::Abs:
      return std::fabs(eval_expr(e->lhs, p));
    case ExprKind::Min:
      return std::min(eval_expr(e->lhs, p), eval_expr(e->rhs, p));
    case ExprKind::Max:
      return std::max(eval_expr(e->lhs, p), eval_expr(e->rhs, p));
    case ExprKind::Sqrt: {
      double v = eval_expr(e->lhs, p);
      if (v < -kSqrtClamp) throw NumericError("sqrt of negative value " + std::to_string(v));
      return v <= 0 ? 0.0 : std::sqrt(v);
    }
  }
  throw NumericError("eval: corrupt expression node");
}

std::string expr_to_string(const ExprPtr& e) {
  std::string out;
  render(e, out, 0);
  return out;
}

int expr_max_var(const ExprPtr& e) {
  if (!e) return 0;
  int m = e->kind == ExprKind::Var ? e->var : 0;
  if (e->lhs) m = std::max(m, expr_max_var(e->lhs));
  if (e->rhs) m = std::max(m, expr_max_var(e->rhs));
  return m;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Constant:
      if (a->value != b->value) return false;
      break;
    case ExprKind::Var:
      if (a->var != b->var) return false;
      break;
    case ExprKind::PowInt:
      if (a->exponent != b->exponent) return false;
      break;
    default:
      break;
  }
  if ((a->lhs == nullptr) != (b->lhs == nullptr)) return false;
  if ((a->rhs == nullptr) != (b->rhs == nullptr)) return false;
  if (a->lhs && !expr_equal(a->lhs, b->lhs)) return false;
  if (a->rhs && !expr_equal(a->rhs, b->rhs)) return false;
  return true;
}

}  // namespace cba
