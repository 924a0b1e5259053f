#include "sbwave/weight_expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace sbwave {
namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string at_x(const std::string& what, double x) {
  std::ostringstream msg;
  msg.precision(17);
  msg << what << " at x = " << x;
  return msg.str();
}

struct FamilySpec {
  std::string_view name;
  std::size_t arity;
};

constexpr FamilySpec kFamilies[] = {{"linear", 2}, {"quad", 2}, {"betainv", 2}, {"identity", 0}};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::unique_ptr<WeightExpr> parse() {
    skip_space();
    if (pos_ == text_.size()) fail("empty weight specification");
    auto expr = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return expr;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw WeightSyntaxError(what, pos_); }

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

  static std::unique_ptr<WeightExpr> binary(WeightExpr::Kind kind, std::unique_ptr<WeightExpr> a,
                                            std::unique_ptr<WeightExpr> b) {
    auto node = std::make_unique<WeightExpr>();
    node->kind = kind;
    node->lhs = std::move(a);
    node->rhs = std::move(b);
    return node;
  }

  std::unique_ptr<WeightExpr> parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(WeightExpr::Kind::add, std::move(lhs), parse_term());
      } else if (accept('-')) {
        lhs = binary(WeightExpr::Kind::subtract, std::move(lhs), parse_term());
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<WeightExpr> parse_term() {
    auto lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = binary(WeightExpr::Kind::multiply, std::move(lhs), parse_factor());
      } else if (accept('/')) {
        lhs = binary(WeightExpr::Kind::divide, std::move(lhs), parse_factor());
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<WeightExpr> parse_factor() {
    auto base = parse_atom();
    if (accept('^')) {
      auto node = std::make_unique<WeightExpr>();
      node->kind = WeightExpr::Kind::power;
      node->value = parse_signed_number();
      node->lhs = std::move(base);
      return node;
    }
    return base;
  }

  double parse_signed_number() {
    skip_space();
    double sign = 1.0;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      if (text_[pos_] == '-') sign = -1.0;
      ++pos_;
    }
    skip_space();
    return sign * parse_number();
  }

  double parse_number() {
    if (pos_ >= text_.size() ||
        !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      fail("expected a number");
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const auto res = std::from_chars(begin, text_.data() + text_.size(), value);
    if (res.ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    return value;
  }

  std::unique_ptr<WeightExpr> parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto node = std::make_unique<WeightExpr>();
      node->value = parse_number();
      return node;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "x") {
        auto node = std::make_unique<WeightExpr>();
        node->kind = WeightExpr::Kind::variable;
        return node;
      }
      for (const auto& fam : kFamilies) {
        if (fam.name != word) continue;
        auto node = std::make_unique<WeightExpr>();
        node->kind = WeightExpr::Kind::family;
        node->family = std::string(word);
        if (fam.arity == 0) {
          if (accept('(') && !accept(')')) fail("'" + node->family + "' takes no arguments");
          return node;
        }
        if (!accept('(')) fail("expected '(' after '" + node->family + "'");
        for (std::size_t i = 0; i < fam.arity; ++i) {
          if (i > 0 && !accept(',')) fail("expected ','");
          node->args.push_back(parse_signed_number());
        }
        if (!accept(')')) fail("expected ')'");
        return node;
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(word) + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double checked_power(double base, double exponent, double x) {
  if (base == 0.0 && exponent < 0.0) throw WeightEvalError(at_x("zero raised to a negative power", x), x);
  const double v = std::pow(base, exponent);
  if (std::isnan(v)) throw WeightEvalError(at_x("undefined power", x), x);
  return v;
}

}  // namespace

WeightSyntaxError::WeightSyntaxError(const std::string& message, std::size_t offset)
    : std::invalid_argument("weight syntax error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

WeightEvalError::WeightEvalError(const std::string& message, double x)
    : std::domain_error(message), x_(x) {}

double WeightExpr::evaluate(double x) const {
  switch (kind) {
    case Kind::number: return value;
    case Kind::variable: return x;
    case Kind::add: return lhs->evaluate(x) + rhs->evaluate(x);
    case Kind::subtract: return lhs->evaluate(x) - rhs->evaluate(x);
    case Kind::multiply: return lhs->evaluate(x) * rhs->evaluate(x);
    case Kind::divide: {
      const double num = lhs->evaluate(x);
      const double den = rhs->evaluate(x);
      if (den == 0.0) throw WeightEvalError(at_x("division by zero", x), x);
      return num / den;
    }
    case Kind::power: return checked_power(lhs->evaluate(x), value, x);
    case Kind::family: {
      if (family == "identity") return x;
      if (family == "linear") return args[0] + args[1] * x;
      if (family == "quad") return args[0] + args[1] * x * x;
      if (family == "betainv") return checked_power(x, -args[0], x) * checked_power(1.0 - x, -args[1], x);
      throw std::logic_error("unknown weight family '" + family + "'");
    }
  }
  return 0.0;
}

bool WeightExpr::operator==(const WeightExpr& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::number: return value == other.value;
    case Kind::variable: return true;
    case Kind::family: return family == other.family && args == other.args;
    case Kind::power: return value == other.value && *lhs == *other.lhs;
    default: return *lhs == *other.lhs && *rhs == *other.rhs;
  }
}

std::unique_ptr<WeightExpr> parse_weight_expr(std::string_view text) { return Parser(text).parse(); }

std::string print_weight_expr(const WeightExpr& expr) {
  using Kind = WeightExpr::Kind;
  auto op = [&](const char* sym) {
    return "(" + print_weight_expr(*expr.lhs) + " " + sym + " " + print_weight_expr(*expr.rhs) + ")";
  };
  switch (expr.kind) {
    case Kind::number: return format_number(expr.value);
    case Kind::variable: return "x";
    case Kind::add: return op("+");
    case Kind::subtract: return op("-");
    case Kind::multiply: return op("*");
    case Kind::divide: return op("/");
    case Kind::power: {
      std::string base = print_weight_expr(*expr.lhs);
      if (expr.lhs->kind == Kind::power) base = "(" + base + ")";
      return base + "^" + format_number(expr.value);
    }
    case Kind::family: {
      if (expr.family == "identity") return "identity";
      std::string out = expr.family + "(";
      for (std::size_t i = 0; i < expr.args.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_number(expr.args[i]);
      }
      return out + ")";
    }
  }
  return {};
}

}  // namespace sbwave
