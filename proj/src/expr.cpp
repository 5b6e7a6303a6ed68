#include "dispersim/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

namespace dispersim {

namespace {

enum Op {
    kPushConst,
    kPushX1,
    kPushX2,
    kPushX3,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kPow,
    kNeg,
    kFuncBase  // kFuncBase + function id
};

using UnaryFn = double (*)(double);

const std::map<std::string, UnaryFn>& function_table() {
    static const std::map<std::string, UnaryFn> table = {
        {"sin", +[](double x) { return std::sin(x); }},
        {"cos", +[](double x) { return std::cos(x); }},
        {"tan", +[](double x) { return std::tan(x); }},
        {"asin", +[](double x) { return std::asin(x); }},
        {"acos", +[](double x) { return std::acos(x); }},
        {"atan", +[](double x) { return std::atan(x); }},
        {"exp", +[](double x) { return std::exp(x); }},
        {"log", +[](double x) { return std::log(x); }},
        {"sqrt", +[](double x) { return std::sqrt(x); }},
        {"abs", +[](double x) { return std::fabs(x); }},
        {"sinh", +[](double x) { return std::sinh(x); }},
        {"cosh", +[](double x) { return std::cosh(x); }},
        {"tanh", +[](double x) { return std::tanh(x); }},
        {"asinh", +[](double x) { return std::asinh(x); }},
        {"atanh", +[](double x) { return std::atanh(x); }},
    };
    return table;
}

struct Token {
    enum Type { kNumber, kIdent, kOp, kLParen, kRParen, kEnd } type;
    double number = 0.0;
    std::string text;
    char op = 0;
    size_t pos = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& s) : s_(s) {}

    Token next() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        Token t;
        t.pos = i_;
        if (i_ >= s_.size()) {
            t.type = Token::kEnd;
            return t;
        }
        const char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            t.number = std::strtod(s_.c_str() + i_, &end);
            require(end != s_.c_str() + i_, parse_msg("malformed number", i_));
            i_ = static_cast<size_t>(end - s_.c_str());
            t.type = Token::kNumber;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i_;
            while (j < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
                ++j;
            t.type = Token::kIdent;
            t.text = s_.substr(i_, j - i_);
            i_ = j;
            return t;
        }
        if (c == '(') {
            t.type = Token::kLParen;
            ++i_;
            return t;
        }
        if (c == ')') {
            t.type = Token::kRParen;
            ++i_;
            return t;
        }
        if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
            t.type = Token::kOp;
            t.op = c;
            ++i_;
            return t;
        }
        fail(parse_msg(std::string("unexpected character '") + c + "'", i_));
    }

    std::string parse_msg(const std::string& what, size_t pos) const {
        return "expression parse error at position " + std::to_string(pos) + ": " + what +
               " in '" + s_ + "'";
    }

  private:
    const std::string& s_;
    size_t i_ = 0;
};

// Recursive-descent parser emitting postfix instructions.
class Parser {
  public:
    Parser(const std::string& s, std::vector<std::pair<int, double>>& out)
        : lex_(s), src_(s), out_(out) {
        advance();
    }

    void run() {
        parse_expr();
        require(cur_.type == Token::kEnd,
                lex_.parse_msg("unexpected trailing input", cur_.pos));
    }

  private:
    void advance() { cur_ = lex_.next(); }

    void parse_expr() {  // additive
        parse_term();
        while (cur_.type == Token::kOp && (cur_.op == '+' || cur_.op == '-')) {
            const char op = cur_.op;
            advance();
            parse_term();
            out_.emplace_back(op == '+' ? kAdd : kSub, 0.0);
        }
    }

    void parse_term() {  // multiplicative
        parse_unary();
        while (cur_.type == Token::kOp && (cur_.op == '*' || cur_.op == '/')) {
            const char op = cur_.op;
            advance();
            parse_unary();
            out_.emplace_back(op == '*' ? kMul : kDiv, 0.0);
        }
    }

    void parse_unary() {
        if (cur_.type == Token::kOp && (cur_.op == '-' || cur_.op == '+')) {
            const char op = cur_.op;
            advance();
            parse_unary();
            if (op == '-') out_.emplace_back(kNeg, 0.0);
            return;
        }
        parse_power();
    }

    void parse_power() {
        parse_primary();
        if (cur_.type == Token::kOp && cur_.op == '^') {
            advance();
            parse_unary();  // right-associative; allows 2^-3
            out_.emplace_back(kPow, 0.0);
        }
    }

    void parse_primary() {
        if (cur_.type == Token::kNumber) {
            out_.emplace_back(kPushConst, cur_.number);
            advance();
            return;
        }
        if (cur_.type == Token::kLParen) {
            advance();
            parse_expr();
            require(cur_.type == Token::kRParen, lex_.parse_msg("missing ')'", cur_.pos));
            advance();
            return;
        }
        if (cur_.type == Token::kIdent) {
            const std::string name = cur_.text;
            const size_t pos = cur_.pos;
            advance();
            if (name == "xi" || name == "xi1") {
                out_.emplace_back(kPushX1, 0.0);
                return;
            }
            if (name == "xi2") {
                out_.emplace_back(kPushX2, 0.0);
                return;
            }
            if (name == "xi3") {
                out_.emplace_back(kPushX3, 0.0);
                return;
            }
            if (name == "pi") {
                out_.emplace_back(kPushConst, kPi);
                return;
            }
            auto fn = function_table().find(name);
            require(fn != function_table().end(),
                    lex_.parse_msg("unknown identifier '" + name + "'", pos));
            require(cur_.type == Token::kLParen,
                    lex_.parse_msg("function '" + name + "' needs '('", cur_.pos));
            advance();
            parse_expr();
            require(cur_.type == Token::kRParen, lex_.parse_msg("missing ')'", cur_.pos));
            advance();
            const int id =
                static_cast<int>(std::distance(function_table().begin(), fn));
            out_.emplace_back(kFuncBase + id, 0.0);
            return;
        }
        fail(lex_.parse_msg("expected a value", cur_.pos));
    }

    Lexer lex_;
    const std::string& src_;
    std::vector<std::pair<int, double>>& out_;
    Token cur_;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.source_ = text;
    std::vector<std::pair<int, double>> prog;
    Parser p(text, prog);
    p.run();
    require(!prog.empty(), "empty expression");
    e.program_.reserve(prog.size());
    for (const auto& [op, v] : prog) e.program_.push_back({op, v});
    return e;
}

double Expression::eval(double xi1, double xi2, double xi3) const {
    double stack[64];
    int top = -1;
    for (const auto& ins : program_) {
        switch (ins.op) {
            case kPushConst: stack[++top] = ins.value; break;
            case kPushX1: stack[++top] = xi1; break;
            case kPushX2: stack[++top] = xi2; break;
            case kPushX3: stack[++top] = xi3; break;
            case kAdd: --top; stack[top] += stack[top + 1]; break;
            case kSub: --top; stack[top] -= stack[top + 1]; break;
            case kMul: --top; stack[top] *= stack[top + 1]; break;
            case kDiv: --top; stack[top] /= stack[top + 1]; break;
            case kPow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
            case kNeg: stack[top] = -stack[top]; break;
            default: {
                auto it = function_table().begin();
                std::advance(it, ins.op - kFuncBase);
                stack[top] = it->second(stack[top]);
                break;
            }
        }
        require(top >= 0 && top < 63, "expression too deeply nested");
    }
    return stack[0];
}

}  // namespace dispersim
