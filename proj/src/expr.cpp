#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "pentahelix/curve_file.hpp"

namespace pentahelix::io {

// Recursive-descent parser for the curvature profile language:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?
//   unary  := '-' unary | primary
//   primary:= number | 's' | k1..k4 | name '(' expr ')' | '(' expr ')'
// k_j may only reference profiles with a smaller index.

struct CurvatureExpressions::Node {
  enum class Kind { Constant, Parameter, KRef, Unary, Binary, Call };
  Kind kind = Kind::Constant;
  double value = 0.0;
  int kref = -1;
  char op = 0;
  double (*fn)(double) = nullptr;
  NodePtr a, b;
};

namespace {

using Node = CurvatureExpressions::Node;
using NodePtr = std::shared_ptr<const Node>;

struct Parser {
  const std::string& src;
  std::size_t pos = 0;
  int self_index;  // 0-based index of the profile being parsed

  explicit Parser(const std::string& text, int index)
      : src(text), self_index(index) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) {
      ++pos;
    }
  }

  bool consume(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("curvature expression '" + src + "': " + why +
                     " (near position " + std::to_string(pos) + ")");
  }

  NodePtr make(Node n) { return std::make_shared<Node>(std::move(n)); }

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos != src.size()) fail("trailing characters");
    return e;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (consume('+')) {
        lhs = make({Node::Kind::Binary, 0, -1, '+', nullptr, lhs, term()});
      } else if (consume('-')) {
        lhs = make({Node::Kind::Binary, 0, -1, '-', nullptr, lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (consume('*')) {
        lhs = make({Node::Kind::Binary, 0, -1, '*', nullptr, lhs, factor()});
      } else if (consume('/')) {
        lhs = make({Node::Kind::Binary, 0, -1, '/', nullptr, lhs, factor()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    NodePtr base = unary();
    if (consume('^')) {
      return make({Node::Kind::Binary, 0, -1, '^', nullptr, base, factor()});
    }
    return base;
  }

  NodePtr unary() {
    if (consume('-')) {
      return make({Node::Kind::Unary, 0, -1, '-', nullptr, unary(), nullptr});
    }
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of expression");
    const char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(src.substr(pos), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos += used;
      return make({Node::Kind::Constant, v, -1, 0, nullptr, nullptr, nullptr});
    }
    if (c == '(') {
      ++pos;
      NodePtr inner = expr();
      if (!consume(')')) fail("missing ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos;
      while (end < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[end])) || src[end] == '_')) {
        ++end;
      }
      const std::string name = src.substr(pos, end - pos);
      pos = end;
      if (name == "s") {
        return make({Node::Kind::Parameter, 0, -1, 0, nullptr, nullptr, nullptr});
      }
      if (name.size() == 2 && name[0] == 'k' && name[1] >= '1' && name[1] <= '4') {
        const int ref = name[1] - '1';
        if (ref >= self_index) {
          fail("k" + std::to_string(ref + 1) +
               " may only be referenced by later profiles");
        }
        return make({Node::Kind::KRef, 0, ref, 0, nullptr, nullptr, nullptr});
      }
      double (*fn)(double) = nullptr;
      if (name == "sin") fn = std::sin;
      else if (name == "cos") fn = std::cos;
      else if (name == "tan") fn = std::tan;
      else if (name == "exp") fn = std::exp;
      else if (name == "log") fn = std::log;
      else if (name == "sqrt") fn = std::sqrt;
      else if (name == "sinh") fn = std::sinh;
      else if (name == "cosh") fn = std::cosh;
      else if (name == "tanh") fn = std::tanh;
      else if (name == "abs") fn = std::fabs;
      if (!fn) fail("unknown name '" + name + "'");
      if (!consume('(')) fail("expected '(' after '" + name + "'");
      NodePtr arg = expr();
      if (!consume(')')) fail("missing ')'");
      return make({Node::Kind::Call, 0, -1, 0, fn, arg, nullptr});
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

CurvatureExpressions CurvatureExpressions::parse(
    const std::array<std::string, 4>& sources) {
  CurvatureExpressions out;
  for (int i = 0; i < 4; ++i) {
    if (sources[static_cast<std::size_t>(i)].empty()) {
      throw ParseError("curvature profile k" + std::to_string(i + 1) +
                       " is missing");
    }
    Parser p(sources[static_cast<std::size_t>(i)], i);
    out.roots_[static_cast<std::size_t>(i)] = p.parse();
  }
  return out;
}

namespace {

double eval_node(const Node& n, double s, const double* k_values) {
  switch (n.kind) {
    case Node::Kind::Constant:
      return n.value;
    case Node::Kind::Parameter:
      return s;
    case Node::Kind::KRef:
      return k_values[n.kref];
    case Node::Kind::Unary:
      return -eval_node(*n.a, s, k_values);
    case Node::Kind::Call:
      return n.fn(eval_node(*n.a, s, k_values));
    case Node::Kind::Binary: {
      const double a = eval_node(*n.a, s, k_values);
      const double b = eval_node(*n.b, s, k_values);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return std::pow(a, b);
        default: break;
      }
      break;
    }
  }
  throw Error("Internal", "malformed expression node");
}

}  // namespace

double CurvatureExpressions::eval(int index, double s) const {
  double k_values[4] = {0, 0, 0, 0};
  for (int i = 0; i <= index; ++i) {
    k_values[i] = eval_node(*roots_[static_cast<std::size_t>(i)], s, k_values);
  }
  return k_values[index];
}

std::function<double(double)> CurvatureExpressions::function(int index) const {
  // Copies the shared AST roots; the returned callable owns what it needs.
  auto roots = roots_;
  return [roots, index](double s) {
    double k_values[4] = {0, 0, 0, 0};
    for (int i = 0; i <= index; ++i) {
      k_values[i] = eval_node(*roots[static_cast<std::size_t>(i)], s, k_values);
    }
    return k_values[index];
  };
}

}  // namespace pentahelix::io
