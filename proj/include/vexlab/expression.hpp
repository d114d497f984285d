// Small arithmetic expression compiler for scalar fields over coordinates.
//
// Grammar: + - * / ^ (right-assoc power), unary minus, parentheses,
// numeric literals, the coordinates x and y, the constant pi, and the
// functions sin, cos, exp, abs, min(a,b), max(a,b).
//
// Expressions compile to a flat postfix program evaluated on a fixed-size
// stack, so per-point evaluation is allocation-free.

#ifndef VEXLAB_EXPRESSION_HPP
#define VEXLAB_EXPRESSION_HPP

#include <cctype>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vexlab {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

class Expression {
public:
  Expression() = default;

  static Expression parse(const std::string& text) {
    Parser p(text);
    Expression e;
    e.text_ = text;
    p.parse_into(e.code_);
    return e;
  }

  double eval(double x, double y = 0.0) const {
    double stack[kStackSize];
    int top = -1;
    for (const Instr& in : code_) {
      switch (in.op) {
        case Op::kConst: stack[++top] = in.value; break;
        case Op::kX: stack[++top] = x; break;
        case Op::kY: stack[++top] = y; break;
        case Op::kAdd: --top; stack[top] += stack[top + 1]; break;
        case Op::kSub: --top; stack[top] -= stack[top + 1]; break;
        case Op::kMul: --top; stack[top] *= stack[top + 1]; break;
        case Op::kDiv: --top; stack[top] /= stack[top + 1]; break;
        case Op::kPow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
        case Op::kNeg: stack[top] = -stack[top]; break;
        case Op::kSin: stack[top] = std::sin(stack[top]); break;
        case Op::kCos: stack[top] = std::cos(stack[top]); break;
        case Op::kExp: stack[top] = std::exp(stack[top]); break;
        case Op::kAbs: stack[top] = std::fabs(stack[top]); break;
        case Op::kMin: --top; stack[top] = std::fmin(stack[top], stack[top + 1]); break;
        case Op::kMax: --top; stack[top] = std::fmax(stack[top], stack[top + 1]); break;
      }
    }
    return stack[0];
  }

  bool empty() const { return code_.empty(); }
  const std::string& text() const { return text_; }

private:
  enum class Op : unsigned char {
    kConst, kX, kY,
    kAdd, kSub, kMul, kDiv, kPow, kNeg,
    kSin, kCos, kExp, kAbs, kMin, kMax
  };
  struct Instr {
    Op op;
    double value = 0.0;
  };
  static constexpr int kStackSize = 64;

  class Parser {
  public:
    explicit Parser(const std::string& text) : text_(text) {}

    void parse_into(std::vector<Instr>& code) {
      code_ = &code;
      depth_ = 0;
      max_depth_ = 0;
      pos_ = 0;
      parse_expr();
      skip_ws();
      if (pos_ != text_.size())
        fail("unexpected trailing input");
      if (max_depth_ > kStackSize)
        fail("expression too deeply nested");
    }

  private:
    void emit(Op op, double v = 0.0) {
      code_->push_back({op, v});
      switch (op) {
        case Op::kConst: case Op::kX: case Op::kY:
          ++depth_;
          if (depth_ > max_depth_) max_depth_ = depth_;
          break;
        case Op::kNeg: case Op::kSin: case Op::kCos: case Op::kExp: case Op::kAbs:
          break;
        default:
          --depth_;
          break;
      }
    }

    [[noreturn]] void fail(const std::string& msg) const {
      throw ParseError(msg + " at position " + std::to_string(pos_) +
                           " in \"" + text_ + "\"",
                       pos_);
    }

    void skip_ws() {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == c) {
        ++pos_;
        return true;
      }
      return false;
    }

    char peek() {
      skip_ws();
      return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void parse_expr() {
      parse_term();
      for (;;) {
        if (consume('+')) {
          parse_term();
          emit(Op::kAdd);
        } else if (consume('-')) {
          parse_term();
          emit(Op::kSub);
        } else {
          return;
        }
      }
    }

    void parse_term() {
      parse_unary();
      for (;;) {
        if (consume('*')) {
          parse_unary();
          emit(Op::kMul);
        } else if (consume('/')) {
          parse_unary();
          emit(Op::kDiv);
        } else {
          return;
        }
      }
    }

    void parse_unary() {
      if (consume('-')) {
        parse_unary();
        emit(Op::kNeg);
      } else if (consume('+')) {
        parse_unary();
      } else {
        parse_power();
      }
    }

    void parse_power() {
      parse_atom();
      if (consume('^')) {
        parse_unary();  // right-associative, allows 2^-x
        emit(Op::kPow);
      }
    }

    void parse_atom() {
      skip_ws();
      if (pos_ >= text_.size()) fail("unexpected end of expression");
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        parse_number();
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        parse_identifier();
      } else if (c == '(') {
        ++pos_;
        parse_expr();
        if (!consume(')')) fail("expected ')'");
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
    }

    void parse_number() {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      emit(Op::kConst, v);
    }

    void parse_identifier() {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name = text_.substr(start, pos_ - start);
      if (name == "x") { emit(Op::kX); return; }
      if (name == "y") { emit(Op::kY); return; }
      if (name == "pi") { emit(Op::kConst, 3.14159265358979323846); return; }

      Op fn;
      int arity = 1;
      if (name == "sin") fn = Op::kSin;
      else if (name == "cos") fn = Op::kCos;
      else if (name == "exp") fn = Op::kExp;
      else if (name == "abs") fn = Op::kAbs;
      else if (name == "min") { fn = Op::kMin; arity = 2; }
      else if (name == "max") { fn = Op::kMax; arity = 2; }
      else { pos_ = start; fail("unknown identifier '" + name + "'"); }

      if (!consume('(')) fail("expected '(' after function name '" + name + "'");
      parse_expr();
      if (arity == 2) {
        if (!consume(',')) fail("function '" + name + "' expects two arguments");
        parse_expr();
      }
      if (!consume(')')) fail("expected ')'");
      emit(fn);
    }

    const std::string& text_;
    std::vector<Instr>* code_ = nullptr;
    std::size_t pos_ = 0;
    int depth_ = 0;
    int max_depth_ = 0;
  };

  std::vector<Instr> code_;
  std::string text_;
};

}  // namespace vexlab

#endif  // VEXLAB_EXPRESSION_HPP
