#include "nullflow/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include "nullflow/errors.hpp"

namespace nullflow {

namespace {

[[noreturn]] void fail_at(const std::string& text, std::size_t pos, const std::string& why) {
  throw FormatError("expression error at position " + std::to_string(pos) + ": " + why +
                    " (in \"" + text + "\")");
}

}  // namespace

/// Recursive-descent parser over the AngularExpr node pool.
class ExprParser {
public:
  explicit ExprParser(AngularExpr& out) : out_(out), text_(out.text_) {}

  void run() {
    pos_ = 0;
    out_.root_ = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail_at(text_, pos_, "unexpected trailing input");
  }

private:
  using Op = AngularExpr::Op;

  int add_node(Op op, double value = 0.0, int lhs = -1, int rhs = -1) {
    out_.nodes_.push_back({op, value, lhs, rhs});
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int parse_sum() {
    int lhs = parse_product();
    while (consume('+')) {
      int rhs = parse_product();
      lhs = add_node(Op::Add, 0.0, lhs, rhs);
    }
    return lhs;
  }

  int parse_product() {
    int lhs = parse_factor();
    while (consume('*')) {
      int rhs = parse_factor();
      lhs = add_node(Op::Mul, 0.0, lhs, rhs);
    }
    return lhs;
  }

  std::string peek_word() {
    std::size_t end = pos_;
    while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
    return text_.substr(pos_, end - pos_);
  }

  int parse_factor() {
    skip_space();
    if (pos_ >= text_.size()) fail_at(text_, pos_, "expected a value");
    char c = text_[pos_];

    if (c == '(') {
      ++pos_;
      int inner = parse_sum();
      if (!consume(')')) fail_at(text_, pos_, "expected ')'");
      return inner;
    }

    if (c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      // A signed numeric literal; '-' is only legal as a literal sign.
      const char* start = text_.c_str() + pos_;
      char* end = nullptr;
      double value = std::strtod(start, &end);
      if (end == start || (c == '-' && end == start + 1)) {
        fail_at(text_, pos_, "'-' must introduce a numeric literal");
      }
      if (!std::isfinite(value)) fail_at(text_, pos_, "non-finite literal");
      pos_ += static_cast<std::size_t>(end - start);
      return add_node(Op::Number, value);
    }

    std::string word = peek_word();
    if (word == "theta") {
      pos_ += word.size();
      return add_node(Op::Theta);
    }
    if (word == "phi") {
      pos_ += word.size();
      return add_node(Op::Phi);
    }
    if (word == "cos" || word == "sin") {
      pos_ += word.size();
      if (!consume('(')) fail_at(text_, pos_, "expected '(' after " + word);
      int inner = parse_sum();
      if (!consume(')')) fail_at(text_, pos_, "expected ')'");
      return add_node(word == "cos" ? Op::Cos : Op::Sin, 0.0, inner);
    }
    if (!word.empty()) fail_at(text_, pos_, "unknown name '" + word + "'");
    fail_at(text_, pos_, std::string("unexpected character '") + c + "'");
  }

  AngularExpr& out_;
  const std::string& text_;
  std::size_t pos_ = 0;
};

AngularExpr AngularExpr::parse(const std::string& text) {
  AngularExpr expr;
  expr.text_ = text;
  ExprParser(expr).run();
  return expr;
}

double AngularExpr::eval_node(int idx, double theta, double phi) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::Theta: return theta;
    case Op::Phi: return phi;
    case Op::Cos: return std::cos(eval_node(n.lhs, theta, phi));
    case Op::Sin: return std::sin(eval_node(n.lhs, theta, phi));
    case Op::Add: return eval_node(n.lhs, theta, phi) + eval_node(n.rhs, theta, phi);
    case Op::Mul: return eval_node(n.lhs, theta, phi) * eval_node(n.rhs, theta, phi);
  }
  return 0.0;
}

double AngularExpr::eval(double theta, double phi) const {
  return eval_node(root_, theta, phi);
}

ScalarField AngularExpr::evaluate(const SphereGrid& grid) const {
  return ScalarField::from_function(grid,
                                    [this](double t, double p) { return eval(t, p); });
}

}  // namespace nullflow
