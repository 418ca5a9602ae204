#include "magwell/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "magwell/error.hpp"

namespace magwell {

class Expression::Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars,
         std::vector<Instr>& out)
      : text_(text), vars_(vars), out_(out) {}

  void run() {
    parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
  }

 private:
  void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_) + " in '" +
                     std::string(text_) + "'");
  }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  void parse_sum() {
    parse_product();
    for (;;) {
      if (accept('+')) {
        parse_product();
        out_.push_back({Op::kAdd});
      } else if (accept('-')) {
        parse_product();
        out_.push_back({Op::kSub});
      } else {
        return;
      }
    }
  }
  void parse_product() {
    parse_unary();
    for (;;) {
      if (accept('*')) {
        parse_unary();
        out_.push_back({Op::kMul});
      } else if (accept('/')) {
        parse_unary();
        out_.push_back({Op::kDiv});
      } else {
        return;
      }
    }
  }
  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      out_.push_back({Op::kNeg});
    } else if (accept('+')) {
      parse_unary();
    } else {
      parse_power();
    }
  }
  void parse_power() {
    parse_atom();
    if (accept('^')) {
      parse_unary();  // right associative, binds unary minus in the exponent
      out_.push_back({Op::kPow});
    }
  }
  void parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      parse_sum();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      const char* begin = text_.data() + pos_;
      const char* end = text_.data() + text_.size();
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc()) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - begin);
      out_.push_back({Op::kConst, value});
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        parse_call(name);
        return;
      }
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) {
          out_.push_back({Op::kVar, 0.0, static_cast<int>(i)});
          return;
        }
      }
      if (name == "pi") {
        out_.push_back({Op::kConst, std::numbers::pi});
        return;
      }
      if (name == "e") {
        out_.push_back({Op::kConst, std::numbers::e});
        return;
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
  void parse_call(const std::string& name) {
    struct Fn {
      const char* name;
      Op op;
      int arity;
    };
    static constexpr std::array<Fn, 14> kFunctions{{
        {"sin", Op::kSin, 1},   {"cos", Op::kCos, 1},   {"tan", Op::kTan, 1},
        {"exp", Op::kExp, 1},   {"log", Op::kLog, 1},   {"sqrt", Op::kSqrt, 1},
        {"abs", Op::kAbs, 1},   {"sinh", Op::kSinh, 1}, {"cosh", Op::kCosh, 1},
        {"tanh", Op::kTanh, 1}, {"atan", Op::kAtan, 1}, {"pow", Op::kPow2, 2},
        {"min", Op::kMin, 2},   {"max", Op::kMax, 2},
    }};
    const auto it = std::find_if(kFunctions.begin(), kFunctions.end(),
                                 [&](const Fn& f) { return name == f.name; });
    if (it == kFunctions.end()) fail("unknown function '" + name + "'");
    expect('(');
    parse_sum();
    for (int i = 1; i < it->arity; ++i) {
      expect(',');
      parse_sum();
    }
    expect(')');
    out_.push_back({it->op});
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::vector<Instr>& out_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
  Expression e;
  e.text_ = std::string(text);
  e.variables_ = std::move(variables);
  Parser(e.text_, e.variables_, e.program_).run();

  int depth = 0;
  for (const auto& ins : e.program_) {
    switch (ins.op) {
      case Op::kConst:
      case Op::kVar:
        ++depth;
        break;
      case Op::kAdd: case Op::kSub: case Op::kMul: case Op::kDiv: case Op::kPow:
      case Op::kPow2: case Op::kMin: case Op::kMax:
        --depth;
        break;
      default:
        break;
    }
    e.max_stack_ = std::max(e.max_stack_, depth);
  }
  return e;
}

double Expression::evaluate(std::span<const double> values) const {
  if (values.size() < variables_.size())
    throw DomainError("expression '" + text_ + "' needs " +
                      std::to_string(variables_.size()) + " variables");
  constexpr int kInline = 32;
  std::array<double, kInline> small{};
  std::vector<double> big;
  double* st = small.data();
  if (max_stack_ > kInline) {
    big.resize(static_cast<std::size_t>(max_stack_));
    st = big.data();
  }
  int top = -1;
  for (const auto& ins : program_) {
    switch (ins.op) {
      case Op::kConst: st[++top] = ins.value; break;
      case Op::kVar: st[++top] = values[static_cast<std::size_t>(ins.var)]; break;
      case Op::kAdd: st[top - 1] += st[top]; --top; break;
      case Op::kSub: st[top - 1] -= st[top]; --top; break;
      case Op::kMul: st[top - 1] *= st[top]; --top; break;
      case Op::kDiv: st[top - 1] /= st[top]; --top; break;
      case Op::kPow:
      case Op::kPow2: st[top - 1] = std::pow(st[top - 1], st[top]); --top; break;
      case Op::kMin: st[top - 1] = std::min(st[top - 1], st[top]); --top; break;
      case Op::kMax: st[top - 1] = std::max(st[top - 1], st[top]); --top; break;
      case Op::kNeg: st[top] = -st[top]; break;
      case Op::kSin: st[top] = std::sin(st[top]); break;
      case Op::kCos: st[top] = std::cos(st[top]); break;
      case Op::kTan: st[top] = std::tan(st[top]); break;
      case Op::kExp: st[top] = std::exp(st[top]); break;
      case Op::kLog: st[top] = std::log(st[top]); break;
      case Op::kSqrt: st[top] = std::sqrt(st[top]); break;
      case Op::kAbs: st[top] = std::abs(st[top]); break;
      case Op::kSinh: st[top] = std::sinh(st[top]); break;
      case Op::kCosh: st[top] = std::cosh(st[top]); break;
      case Op::kTanh: st[top] = std::tanh(st[top]); break;
      case Op::kAtan: st[top] = std::atan(st[top]); break;
    }
  }
  return st[0];
}

}  // namespace magwell
