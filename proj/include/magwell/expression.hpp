#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace magwell {

/// A compiled arithmetic expression in a fixed set of named variables.
///
/// Grammar: numbers, variables, the constants `pi` and `e`, binary `+ - * / ^`
/// (`^` is right associative), unary minus, parentheses, and the functions
/// sin cos tan exp log sqrt abs sinh cosh tanh atan (one argument) and
/// pow min max (two arguments). Compiled once to a postfix program; evaluation
/// is allocation-free and reentrant.
class Expression {
 public:
  static Expression parse(std::string_view text,
                          std::vector<std::string> variables = {"s", "t"});

  double evaluate(std::span<const double> values) const;
  double operator()(double s, double t) const {
    const double v[2] = {s, t};
    return evaluate(v);
  }

  const std::string& text() const { return text_; }
  std::size_t variable_count() const { return variables_.size(); }

 private:
  enum class Op : unsigned char {
    kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg,
    kSin, kCos, kTan, kExp, kLog, kSqrt, kAbs, kSinh, kCosh, kTanh, kAtan,
    kPow2, kMin, kMax
  };
  struct Instr {
    Op op;
    double value = 0.0;
    int var = 0;
  };
  class Parser;

  std::string text_;
  std::vector<std::string> variables_;
  std::vector<Instr> program_;
  int max_stack_ = 0;
};

}  // namespace magwell
