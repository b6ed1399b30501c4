#include "discrimax/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "discrimax/error.hpp"

namespace discrimax {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.offset = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        } else {
          throw ParseError(fmt::format("malformed exponent at offset {}", j), j, {"digit"});
        }
      }
      t.kind = Tok::Number;
      t.text = src.substr(i, j - i);
      const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
        throw ParseError(fmt::format("malformed number '{}' at offset {}", t.text, i), i,
                         {"number"});
      }
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isalnum(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      i = j;
    } else {
      switch (c) {
        case '+': t.kind = Tok::Plus; break;
        case '-': t.kind = Tok::Minus; break;
        case '*': t.kind = Tok::Star; break;
        case '/': t.kind = Tok::Slash; break;
        case '^': t.kind = Tok::Caret; break;
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        default:
          throw ParseError(fmt::format("unexpected character '{}' at offset {}", c, i), i,
                           {"number", "x", "p<k>", "exp", "log", "sqrt", "'('", "'-'"});
      }
      t.text = src.substr(i, 1);
      ++i;
    }
    out.push_back(t);
  }
  Token end;
  end.kind = Tok::End;
  end.offset = src.size();
  out.push_back(end);
  return out;
}

}  // namespace

class ExprParser {
 public:
  ExprParser(MeanExpr& e, std::string_view src) : e_(e), toks_(tokenize(src)) {}

  void run() {
    e_.root_ = expr();
    if (peek().kind != Tok::End) fail({"operator", "end of input"});
  }

  std::set<int> params;

 private:
  using Op = MeanExpr::Op;

  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : fmt::format("'{}'", t.text);
    std::string exp;
    for (std::size_t i = 0; i < expected.size(); ++i) exp += (i ? ", " : "") + expected[i];
    throw ParseError(fmt::format("unexpected {} at offset {} (expected {})", got, t.offset, exp),
                     t.offset, std::move(expected));
  }

  int add(MeanExpr::Node n) {
    e_.nodes_.push_back(n);
    return static_cast<int>(e_.nodes_.size()) - 1;
  }

  int binary(Op op, int l, int r) {
    MeanExpr::Node n;
    n.op = op;
    n.lhs = l;
    n.rhs = r;
    return add(n);
  }

  int expr() {
    int lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Op op = take().kind == Tok::Plus ? Op::Add : Op::Sub;
      lhs = binary(op, lhs, term());
    }
    return lhs;
  }

  int term() {
    int lhs = factor();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Op op = take().kind == Tok::Star ? Op::Mul : Op::Div;
      lhs = binary(op, lhs, factor());
    }
    return lhs;
  }

  int factor() {
    if (peek().kind == Tok::Minus) {
      take();
      return binary(Op::Neg, factor(), -1);
    }
    if (peek().kind == Tok::Plus) {
      take();
      return factor();
    }
    const int b = base();
    if (peek().kind == Tok::Caret) {
      take();
      return binary(Op::Pow, b, factor());
    }
    return b;
  }

  int base() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        take();
        MeanExpr::Node n;
        n.op = Op::Const;
        n.value = t.number;
        return add(n);
      }
      case Tok::LParen: {
        take();
        const int inner = expr();
        expect(Tok::RParen);
        return inner;
      }
      case Tok::Ident: return identifier();
      default: fail({"number", "x", "p<k>", "exp", "log", "sqrt", "'('"});
    }
  }

  int identifier() {
    const Token t = take();
    const std::string_view s = t.text;
    MeanExpr::Node n;
    if (s == "x") {
      n.op = Op::X;
      e_.uses_x_ = true;
      return add(n);
    }
    if (s.size() >= 2 && s[0] == 'p' && s.find_first_not_of("0123456789", 1) == std::string_view::npos) {
      int idx = 0;
      std::from_chars(s.data() + 1, s.data() + s.size(), idx);
      if (idx < 1) {
        throw ParseError(fmt::format("parameter indices start at p1 (offset {})", t.offset),
                         t.offset, {"p<k> with k >= 1"});
      }
      n.op = Op::Param;
      n.index = idx - 1;
      params.insert(idx);
      return add(n);
    }
    Op fn;
    if (s == "exp") {
      fn = Op::Exp;
    } else if (s == "log") {
      fn = Op::Log;
    } else if (s == "sqrt") {
      fn = Op::Sqrt;
    } else {
      throw ParseError(fmt::format("unknown identifier '{}' at offset {}", s, t.offset), t.offset,
                       {"x", "p<k>", "exp", "log", "sqrt"});
    }
    expect(Tok::LParen);
    const int arg = expr();
    expect(Tok::RParen);
    return binary(fn, arg, -1);
  }

  void expect(Tok kind) {
    if (peek().kind != kind) fail({describe(kind)});
    take();
  }

  MeanExpr& e_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

MeanExpr MeanExpr::parse(std::string_view source) {
  MeanExpr e;
  e.source_ = std::string(source);
  if (source.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError("empty expression", 0, {"number", "x", "p<k>", "exp", "log", "sqrt", "'('"});
  }
  ExprParser p(e, source);
  p.run();
  if (!p.params.empty()) {
    const int k = *p.params.rbegin();
    if (static_cast<int>(p.params.size()) != k) {
      int missing = 1;
      while (p.params.count(missing)) ++missing;
      throw ArityError(fmt::format("parameter p{} is referenced but p{} is missing", k, missing));
    }
    e.arity_ = k;
  }
  return e;
}

double MeanExpr::eval(double x, std::span<const double> theta) const {
  if (root_ < 0) throw DomainError("evaluating an empty expression");
  if (static_cast<int>(theta.size()) < arity_) {
    throw DomainError(fmt::format("expression needs {} parameters, got {}", arity_, theta.size()));
  }
  return eval_node(root_, x, theta.data());
}

double MeanExpr::eval_node(int id, double x, const double* theta) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::X: return x;
    case Op::Param: return theta[n.index];
    case Op::Add: return eval_node(n.lhs, x, theta) + eval_node(n.rhs, x, theta);
    case Op::Sub: return eval_node(n.lhs, x, theta) - eval_node(n.rhs, x, theta);
    case Op::Mul: return eval_node(n.lhs, x, theta) * eval_node(n.rhs, x, theta);
    case Op::Div: return eval_node(n.lhs, x, theta) / eval_node(n.rhs, x, theta);
    case Op::Pow: return std::pow(eval_node(n.lhs, x, theta), eval_node(n.rhs, x, theta));
    case Op::Neg: return -eval_node(n.lhs, x, theta);
    case Op::Exp: return std::exp(eval_node(n.lhs, x, theta));
    case Op::Log: return std::log(eval_node(n.lhs, x, theta));
    case Op::Sqrt: return std::sqrt(eval_node(n.lhs, x, theta));
  }
  return 0.0;
}

void MeanExpr::render(int id, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  auto bin = [&](const char* sym) {
    out += '(';
    render(n.lhs, out);
    out += sym;
    render(n.rhs, out);
    out += ')';
  };
  auto fn = [&](const char* name) {
    out += name;
    out += '(';
    render(n.lhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::Const: out += fmt::format("{:.17g}", n.value); break;
    case Op::X: out += 'x'; break;
    case Op::Param: out += fmt::format("p{}", n.index + 1); break;
    case Op::Add: bin(" + "); break;
    case Op::Sub: bin(" - "); break;
    case Op::Mul: bin(" * "); break;
    case Op::Div: bin(" / "); break;
    case Op::Pow: bin("^"); break;
    case Op::Neg:
      out += "(-";
      render(n.lhs, out);
      out += ')';
      break;
    case Op::Exp: fn("exp"); break;
    case Op::Log: fn("log"); break;
    case Op::Sqrt: fn("sqrt"); break;
  }
}

std::string MeanExpr::to_string() const {
  std::string out;
  if (root_ < 0) return out;
  render(root_, out);
  return out;
}

bool MeanExpr::same_node(int id, const MeanExpr& other, int other_id) const {
  if ((id < 0) != (other_id < 0)) return false;
  if (id < 0) return true;
  const Node& a = nodes_[static_cast<std::size_t>(id)];
  const Node& b = other.nodes_[static_cast<std::size_t>(other_id)];
  if (a.op != b.op) return false;
  if (a.op == Op::Const) return a.value == b.value;
  if (a.op == Op::Param) return a.index == b.index;
  return same_node(a.lhs, other, b.lhs) && same_node(a.rhs, other, b.rhs);
}

bool MeanExpr::same_tree(const MeanExpr& other) const {
  return same_node(root_, other, other.root_);
}

}  // namespace discrimax
