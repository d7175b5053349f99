#include "orbistab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <utility>

namespace orbistab {

namespace {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum Kind { Const, Var1, Var2, Unary, Binary, Call } kind;
  double value = 0.0;                  // Const
  char op = 0;                         // Unary/Binary
  double (*fn)(double) = nullptr;      // Call
  NodePtr a, b;

  double eval(double x1, double x2) const {
    switch (kind) {
      case Const: return value;
      case Var1: return x1;
      case Var2: return x2;
      case Unary: return -a->eval(x1, x2);
      case Call: return fn(a->eval(x1, x2));
      case Binary: {
        const double l = a->eval(x1, x2);
        const double r = b->eval(x1, x2);
        switch (op) {
          case '+': return l + r;
          case '-': return l - r;
          case '*': return l * r;
          case '/': return l / r;
          case '^': return std::pow(l, r);
        }
      }
    }
    return 0.0;
  }
};

double fn_sec(double x) { return 1.0 / std::cos(x); }

struct Parser {
  const std::string& text;
  const std::map<std::string, double>& constants;
  std::size_t pos = 0;
  bool uses_x2 = false;

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression error at position " << pos << ": " << what << " in \""
       << text << "\"";
    throw ConfigError(os.str());
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  NodePtr parse() {
    NodePtr e = expr();
    if (peek() != '\0') fail("unexpected trailing input");
    return e;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos;
      auto n = std::make_shared<Node>();
      n->kind = Node::Binary;
      n->op = c;
      n->a = lhs;
      n->b = term();
      lhs = n;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos;
      auto n = std::make_shared<Node>();
      n->kind = Node::Binary;
      n->op = c;
      n->a = lhs;
      n->b = factor();
      lhs = n;
    }
  }

  // unary minus binds looser than ^, so -x^2 is -(x^2) in every context
  NodePtr factor() {
    bool neg = false;
    while (peek() == '-' || peek() == '+') {
      if (text[pos] == '-') neg = !neg;
      ++pos;
    }
    NodePtr p = power();
    if (!neg) return p;
    auto n = std::make_shared<Node>();
    n->kind = Node::Unary;
    n->a = p;
    return n;
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    auto n = std::make_shared<Node>();
    n->kind = Node::Binary;
    n->op = '^';
    n->a = base;
    n->b = factor();  // right-associative, and allows a signed exponent
    return n;
  }

  NodePtr primary() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    const char c = text[pos];

    if (std::isdigit((unsigned char)c) || c == '.') {
      const char* begin = text.c_str() + pos;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos += (std::size_t)(end - begin);
      auto n = std::make_shared<Node>();
      n->kind = Node::Const;
      n->value = v;
      return n;
    }

    if (c == '(') {
      ++pos;
      NodePtr inner = expr();
      if (!accept(')')) fail("missing ')'");
      return inner;
    }

    if (std::isalpha((unsigned char)c) || c == '_') {
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum((unsigned char)text[pos]) || text[pos] == '_'))
        ++pos;
      const std::string name = text.substr(start, pos - start);

      if (accept('(')) {
        double (*fn)(double) = nullptr;
        if (name == "sin") fn = [](double x) { return std::sin(x); };
        else if (name == "cos") fn = [](double x) { return std::cos(x); };
        else if (name == "tan") fn = [](double x) { return std::tan(x); };
        else if (name == "sec") fn = fn_sec;
        else if (name == "sqrt") fn = [](double x) { return std::sqrt(x); };
        else if (name == "abs") fn = [](double x) { return std::abs(x); };
        else if (name == "ln") fn = [](double x) { return std::log(x); };
        else if (name == "exp") fn = [](double x) { return std::exp(x); };
        else fail("unknown function '" + name + "'");
        NodePtr arg = expr();
        if (!accept(')')) fail("missing ')' after call");
        auto n = std::make_shared<Node>();
        n->kind = Node::Call;
        n->fn = fn;
        n->a = arg;
        return n;
      }

      auto n = std::make_shared<Node>();
      if (name == "x1") {
        n->kind = Node::Var1;
      } else if (name == "x2") {
        n->kind = Node::Var2;
        uses_x2 = true;
      } else if (name == "pi") {
        n->kind = Node::Const;
        n->value = M_PI;
      } else if (auto it = constants.find(name); it != constants.end()) {
        n->kind = Node::Const;
        n->value = it->second;
      } else {
        fail("unknown identifier '" + name + "'");
      }
      return n;
    }

    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

ConfigField compile_expression(const std::string& text,
                               const std::map<std::string, double>& constants) {
  Parser p{text, constants};
  NodePtr root = p.parse();
  return [root](double x1, double x2) { return root->eval(x1, x2); };
}

Profile compile_profile(const std::string& text,
                        const std::map<std::string, double>& constants) {
  Parser p{text, constants};
  NodePtr root = p.parse();
  if (p.uses_x2)
    throw ConfigError("expression \"" + text +
                      "\" must depend on x1 only, but uses x2");
  return [root](double x1) { return root->eval(x1, 0.0); };
}

}  // namespace orbistab
