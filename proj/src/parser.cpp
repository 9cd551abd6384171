#include <cctype>
#include <charconv>
#include <cmath>

#include "jlie/expr.hpp"

namespace jlie {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& symbols) : text_(text), symbols_(symbols) {}

  Expression run() {
    Expression e = expr();
    skip_space();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

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

  Expression expr() {
    std::vector<Expression> terms{term()};
    for (;;) {
      if (accept('+'))
        terms.push_back(term());
      else if (accept('-'))
        terms.push_back(-term());
      else
        break;
    }
    return Expression::sum(std::move(terms));
  }

  Expression term() {
    Expression acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expression d = unary();
        if (d.is_zero_constant()) throw ParseError("division by zero", at);
        acc = acc / d;
      } else {
        break;
      }
    }
    return acc;
  }

  Expression unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (!accept('^')) return base;
    Expression ex = unary();
    if (ex.is_constant()) return Expression::power(base, ex.number());
    return Expression::exp(ex * Expression::ln(base));
  }

  Expression primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expression number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    bool has_exponent = false;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        has_exponent = true;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string_view lit = text_.substr(start, pos_ - start);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
    if (ec != std::errc{} || ptr != lit.data() + lit.size()) throw ParseError("malformed number", start);
    if (!has_exponent) {
      std::string digits;
      std::size_t frac = 0;
      bool after_dot = false;
      for (char ch : lit) {
        if (ch == '.') {
          after_dot = true;
          continue;
        }
        digits += ch;
        if (after_dot) ++frac;
      }
      auto first = digits.find_first_not_of('0');
      std::size_t significant = first == std::string::npos ? 0 : digits.size() - first;
      if (significant <= 15 && frac <= 15) {
        std::int64_t num = significant == 0 ? 0 : std::stoll(digits.substr(first));
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac; ++i) den *= 10;
        return Expression::constant(Number::rational(num, den));
      }
    }
    return Expression::constant(Number::real(v));
  }

  Expression identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    skip_space();
    bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (call) {
      using Fn = Expression (*)(Expression);
      static const std::pair<const char*, Fn> functions[] = {
          {"exp", &Expression::exp},   {"ln", &Expression::ln},   {"sinh", &Expression::sinh},
          {"cosh", &Expression::cosh}, {"sin", &Expression::sin}, {"cos", &Expression::cos},
          {"Ei1", &Expression::expint1},
      };
      for (const auto& [fname, fn] : functions) {
        if (name == fname) {
          ++pos_;
          Expression arg = expr();
          expect(')');
          return fn(std::move(arg));
        }
      }
      throw ParseError("unknown function '" + name + "'", start);
    }
    if (symbols_.is_coordinate(name)) return Expression::variable(name);
    if (symbols_.is_parameter(name)) return Expression::parameter(name);
    std::vector<std::string> declared = symbols_.coordinates;
    declared.insert(declared.end(), symbols_.parameters.begin(), symbols_.parameters.end());
    throw UnknownIdentifierError(name, std::move(declared));
  }

  std::string_view text_;
  const SymbolTable& symbols_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse(std::string_view text, const SymbolTable& symbols) { return Parser(text, symbols).run(); }

}  // namespace jlie
