// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "cba/vec.hpp"

namespace cba {

// Scalar expressions over x1..xn. Grammar: infix + - * ^ with the usual
// precedence, unary minus, parentheses, abs(e), min(e,e), max(e,e), sqrt(e),
// decimal literals (e-notation accepted), variables x1..xn. Exponents must be
// nonnegative integer literals.
enum class ExprKind {
  Constant,
  Var,
  Add,
  Sub,
  Neg,
  Mul,
  PowInt,
  Abs,
  Min,
  Max,
  Sqrt,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind;
  double value = 0.0;  // Constant
  int var = 0;         // Var: 1-based index
  int exponent = 0;    // PowInt
  ExprPtr lhs, rhs;    // children (rhs only for binary nodes)
};

// Throws ParseError with a byte offset on malformed input.
ExprPtr parse_expr(std::string_view text);

// Evaluates at p. sqrt arguments in [-1e-12, 0] clamp to 0; below that is a
// NumericError. Variable index beyond p's dimension is an InputError.
double eval_expr(const ExprPtr& e, const Vec& p);

// Renders a string that parses back to a structurally identical tree.
std::string expr_to_string(const ExprPtr& e);

// Largest variable index referenced (0 when none).
int expr_max_var(const ExprPtr& e);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

}  // namespace cba
