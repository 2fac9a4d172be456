#pragma once

// Test-only evaluator that computes directly while scanning the text. It
// shares no code with the library parser or AST and serves as an oracle.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>

namespace invaria::oracle {

class ReferenceEvaluator {
 public:
  ReferenceEvaluator(std::string text, std::map<std::string, double> env)
      : s_(std::move(text)), env_(std::move(env)) {}

  double run() {
    const double v = sum();
    ws();
    if (i_ != s_.size()) throw std::runtime_error("trailing input");
    return v;
  }

 private:
  void ws() {
    while (i_ < s_.size() && s_[i_] == ' ') ++i_;
  }
  bool eat(char c) {
    ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  static double fin(double v) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite");
    return v;
  }
  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v = fin(v + product());
      else if (eat('-')) v = fin(v - product());
      else return v;
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) {
        v = fin(v * unary());
      } else if (eat('/')) {
        const double d = unary();
        if (d == 0.0) throw std::runtime_error("div0");
        v = fin(v / d);
      } else {
        return v;
      }
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    return power();
  }
  double power() {
    const double base = atom();
    if (eat('^')) {
      const double e = unary();
      if (base == 0.0 && e < 0.0) throw std::runtime_error("0^neg");
      return fin(std::pow(base, e));
    }
    return base;
  }
  double atom() {
    ws();
    if (eat('(')) {
      const double v = sum();
      if (!eat(')')) throw std::runtime_error("paren");
      return v;
    }
    const std::size_t start = i_;
    if (i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
      return env_.at(s_.substr(start, i_ - start));
    }
    char* end = nullptr;
    const double v = std::strtod(s_.c_str() + i_, &end);
    if (end == s_.c_str() + i_) throw std::runtime_error("bad atom");
    i_ = static_cast<std::size_t>(end - s_.c_str());
    return v;
  }

  std::string s_;
  std::map<std::string, double> env_;
  std::size_t i_ = 0;
};

}  // namespace invaria::oracle
