#pragma once

#include "dispersim/common.hpp"

#include <vector>

namespace dispersim {

// Arithmetic expressions in the variables xi1, xi2, xi3 (alias: xi = xi1) and
// the constant pi, with + - * / ^ (right-associative power), parentheses, and
// the unary functions sin cos tan asin acos atan exp log sqrt abs sinh cosh
// tanh asinh atanh. Compiled once to a postfix program, evaluated many times.
class Expression {
  public:
    static Expression parse(const std::string& text);

    double eval(double xi1, double xi2, double xi3) const;
    double eval(double xi) const { return eval(xi, 0.0, 0.0); }

    const std::string& source() const { return source_; }

  private:
    struct Instr {
        int op = 0;
        double value = 0.0;
    };
    std::string source_;
    std::vector<Instr> program_;
};

}  // namespace dispersim
