#include "medqsl/hspec.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <tuple>

namespace medqsl::hspec {

namespace {

constexpr std::size_t kMaxInput = 1u << 20;
constexpr std::array<std::string_view, 7> kNames = {"I", "X", "Y", "Z", "GX", "GY", "P"};

bool takes_arg(std::string_view name) { return name == "GX" || name == "GY" || name == "P"; }
bool is_pauli(std::string_view name) { return name == "X" || name == "Y" || name == "Z"; }

std::string line_of(std::string_view text, int line) {
  int current = 1;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < text.size() && current < line; ++i)
    if (text[i] == '\n') {
      ++current;
      begin = i + 1;
    }
  const auto end = text.find('\n', begin);
  std::string out(text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
  if (!out.empty() && out.back() == '\r') out.pop_back();
  return out;
}

std::string caret_excerpt(std::string_view text, SourcePos pos) {
  std::string src = line_of(text, pos.line);
  std::string marker;
  for (int i = 1; i < pos.column; ++i)
    marker += (static_cast<std::size_t>(i - 1) < src.size() && src[i - 1] == '\t') ? '\t' : ' ';
  return src + "\n" + marker + "^";
}

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_blank();
      const SourcePos pos{line_, column_};
      if (at_ >= text_.size()) {
        out.push_back({Tok::End, "", pos});
        return out;
      }
      const char c = text_[at_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back({Tok::Ident, take_while([](char x) {
                         return std::isalnum(static_cast<unsigned char>(x)) || x == '_';
                       }),
                       pos});
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        out.push_back({Tok::Number, number(), pos});
      } else if (std::string_view(":;=+-*/(),@").find(c) != std::string_view::npos) {
        advance();
        out.push_back({Tok::Punct, std::string(1, c), pos});
      } else {
        throw ParseError(ErrorKind::SyntaxError, std::string("unexpected character '") + c + "'", pos.line,
                         pos.column, caret_excerpt(text_, pos));
      }
    }
  }

 private:
  void advance() {
    if (text_[at_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++at_;
  }

  void skip_blank() {
    while (at_ < text_.size()) {
      const char c = text_[at_];
      if (c == '#') {
        while (at_ < text_.size() && text_[at_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  template <typename Pred>
  std::string take_while(Pred pred) {
    const std::size_t begin = at_;
    while (at_ < text_.size() && pred(text_[at_])) advance();
    return std::string(text_.substr(begin, at_ - begin));
  }

  std::string number() {
    auto digits = [](char x) { return std::isdigit(static_cast<unsigned char>(x)) != 0; };
    std::string out = take_while(digits);
    if (at_ < text_.size() && text_[at_] == '.') {
      advance();
      out += '.' + take_while(digits);
    }
    if (at_ < text_.size() && (text_[at_] == 'e' || text_[at_] == 'E')) {
      const std::size_t save = at_;
      const int save_col = column_;
      std::string exp(1, text_[at_]);
      advance();
      if (at_ < text_.size() && (text_[at_] == '+' || text_[at_] == '-')) {
        exp += text_[at_];
        advance();
      }
      const std::string tail = take_while(digits);
      if (tail.empty()) {
        at_ = save;
        column_ = save_col;
      } else {
        out += exp + tail;
      }
    }
    return out;
  }

  std::string_view text_;
  std::size_t at_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, std::vector<Token> tokens) : text_(text), tokens_(std::move(tokens)) {}

  Ast run() {
    Ast ast;
    bool have_h = false;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind == Tok::Ident && t.text == "system") {
        next();
        system_decl(ast);
      } else if (t.kind == Tok::Ident && t.text == "H") {
        if (have_h) fail(ErrorKind::SyntaxError, "duplicate 'H =' statement", t.pos);
        have_h = true;
        next();
        expect_punct("=");
        expr(ast);
        expect_punct(";");
      } else {
        fail(ErrorKind::SyntaxError, "expected 'system' or 'H', found " + describe(t), t.pos);
      }
    }
    if (!have_h) fail(ErrorKind::SyntaxError, "expected 'H =' statement before end of input", peek().pos);
    validate(ast);
    return ast;
  }

 private:
  const Token& peek() const { return tokens_[at_]; }
  const Token& next() { return tokens_[at_ < tokens_.size() - 1 ? at_++ : at_]; }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End:
        return "end of input";
      case Tok::Number:
        return "number '" + t.text + "'";
      default:
        return "'" + t.text + "'";
    }
  }

  [[noreturn]] void fail(ErrorKind kind, const std::string& message, SourcePos pos) const {
    throw ParseError(kind, message, pos.line, pos.column, caret_excerpt(text_, pos));
  }

  bool is_punct(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail(ErrorKind::SyntaxError, "expected '" + std::string(p) + "', found " + describe(peek()), peek().pos);
    next();
  }

  std::string expect_ident(std::string_view what) {
    if (peek().kind != Tok::Ident)
      fail(ErrorKind::SyntaxError, "expected " + std::string(what) + ", found " + describe(peek()), peek().pos);
    return next().text;
  }

  double expect_number() {
    const Token& t = peek();
    if (t.kind != Tok::Number) fail(ErrorKind::SyntaxError, "expected number, found " + describe(t), t.pos);
    next();
    double v = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size() || !std::isfinite(v))
      fail(ErrorKind::SyntaxError, "number '" + t.text + "' is not a finite real", t.pos);
    return v;
  }

  int expect_int(std::string_view what) {
    const Token& t = peek();
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (t.kind != Tok::Number || ec != std::errc{} || ptr != t.text.data() + t.text.size())
      fail(ErrorKind::SyntaxError, "expected integer " + std::string(what) + ", found " + describe(t), t.pos);
    next();
    return v;
  }

  void system_decl(Ast& ast) {
    const SourcePos pos = peek().pos;
    std::string label = expect_ident("subsystem label");
    if (label.size() > 32) fail(ErrorKind::SyntaxError, "label longer than 32 characters", pos);
    for (const auto& s : ast.systems)
      if (s.label == label) fail(ErrorKind::SyntaxError, "subsystem '" + label + "' declared twice", pos);
    expect_punct(":");
    const SourcePos dim_pos = peek().pos;
    const int dim = expect_int("dimension");
    if (dim < 2) fail(ErrorKind::BadDimension, "subsystem dimension must be >= 2", dim_pos);
    expect_punct(";");
    ast.systems.push_back({std::move(label), dim});
  }

  void expr(Ast& ast) {
    bool negative = false;
    if (is_punct("+") || is_punct("-")) negative = next().text == "-";
    ast.terms.push_back(term(negative));
    while (is_punct("+") || is_punct("-")) {
      negative = next().text == "-";
      ast.terms.push_back(term(negative));
    }
    if (!is_punct(";"))
      fail(ErrorKind::SyntaxError, "expected '+', '-', '@' or ';', found " + describe(peek()), peek().pos);
  }

  Term term(bool negative) {
    Term t;
    t.coeff.negative = negative;
    if (peek().kind == Tok::Number) {
      t.coeff.num = expect_number();
      if (is_punct("/")) {
        next();
        const Token& s = peek();
        if (s.kind != Tok::Ident || s.text != "sqrt")
          fail(ErrorKind::SyntaxError, "expected 'sqrt', found " + describe(s), s.pos);
        next();
        expect_punct("(");
        const SourcePos root_pos = peek().pos;
        const double root = expect_number();
        if (!(root > 0)) fail(ErrorKind::ArgOutOfRange, "sqrt argument must be positive", root_pos);
        t.coeff.root = root;
        expect_punct(")");
      }
      expect_punct("*");
    }
    t.factors.push_back(opref());
    while (is_punct("@")) {
      next();
      t.factors.push_back(opref());
    }
    return t;
  }

  OpRef opref() {
    OpRef op;
    op.pos = peek().pos;
    if (peek().kind != Tok::Ident)
      fail(ErrorKind::SyntaxError, "expected operator name (I, X, Y, Z, GX, GY, P), found " + describe(peek()), op.pos);
    op.name = next().text;
    if (std::find(kNames.begin(), kNames.end(), op.name) == kNames.end())
      fail(ErrorKind::SyntaxError, "unknown operator '" + op.name + "'; expected one of I, X, Y, Z, GX, GY, P", op.pos);
    expect_punct("(");
    label_pos_.push_back(peek().pos);
    op.label = expect_ident("subsystem label");
    if (is_punct(",")) {
      next();
      const SourcePos arg_pos = peek().pos;
      if (!takes_arg(op.name)) fail(ErrorKind::SyntaxError, op.name + " takes no level argument", arg_pos);
      op.arg = expect_int("level");
      arg_pos_.push_back(arg_pos);
    } else {
      if (takes_arg(op.name)) fail(ErrorKind::SyntaxError, "expected ',' and a level for " + op.name + ", found " + describe(peek()), peek().pos);
      arg_pos_.push_back(op.pos);
    }
    expect_punct(")");
    return op;
  }

  // Positions are recorded in source order, matching a pre-canonical walk.
  void validate(Ast& ast) {
    const SystemLayout layout(ast.systems);
    std::size_t k = 0;
    for (auto& term : ast.terms) {
      std::vector<bool> used(ast.systems.size(), false);
      for (auto& op : term.factors) {
        const SourcePos label_pos = label_pos_[k], arg_pos = arg_pos_[k];
        ++k;
        if (!layout.contains(op.label))
          fail(ErrorKind::UnknownLabel, "subsystem '" + op.label + "' is not declared", label_pos);
        const int p = layout.position(op.label);
        if (used[p]) fail(ErrorKind::SyntaxError, "subsystem '" + op.label + "' appears twice in one product", op.pos);
        used[p] = true;
        const int dim = ast.systems[p].dim;
        if (is_pauli(op.name) && dim != 2)
          fail(ErrorKind::PauliOnQudit,
               op.name + " needs a 2-level subsystem; '" + op.label + "' has dimension " + std::to_string(dim), op.pos);
        if (op.arg && (*op.arg < 0 || *op.arg >= dim))
          fail(ErrorKind::ArgOutOfRange,
               "level " + std::to_string(*op.arg) + " outside subsystem '" + op.label + "' of dimension " + std::to_string(dim),
               arg_pos);
      }
      std::sort(term.factors.begin(), term.factors.end(), [&](const OpRef& a, const OpRef& b) {
        return layout.position(a.label) < layout.position(b.label);
      });
    }
    auto key = [&](const Term& t) {
      std::vector<std::tuple<int, std::string, int>> out;
      for (const auto& op : t.factors) out.emplace_back(layout.position(op.label), op.name, op.arg.value_or(-1));
      return out;
    };
    std::stable_sort(ast.terms.begin(), ast.terms.end(), [&](const Term& a, const Term& b) { return key(a) < key(b); });
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t at_ = 0;
  std::vector<SourcePos> label_pos_;
  std::vector<SourcePos> arg_pos_;
};

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

ParseError::ParseError(ErrorKind kind, const std::string& message, int line, int column, std::string excerpt)
    : Error(kind, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message + "\n" + excerpt),
      message_(message),
      line_(line),
      column_(column),
      excerpt_(std::move(excerpt)) {}

double Coefficient::value() const {
  const double magnitude = root ? num / std::sqrt(*root) : num;
  return negative ? -magnitude : magnitude;
}

Matrix operator_matrix(std::string_view name, int dim, std::optional<int> arg) {
  if (name == "I") return ops::identity(dim);
  if (is_pauli(name)) {
    if (dim != 2) throw Error(ErrorKind::PauliOnQudit, std::string(name) + " on dimension " + std::to_string(dim));
    return name == "X" ? ops::pauli_x() : name == "Y" ? ops::pauli_y() : ops::pauli_z();
  }
  if (!arg) throw Error(ErrorKind::InvalidArgument, std::string(name) + " needs a level");
  if (name == "GX") return ops::gx(dim, *arg);
  if (name == "GY") return ops::gy(dim, *arg);
  if (name == "P") return ops::projector(dim, *arg);
  throw Error(ErrorKind::InvalidArgument, "unknown operator '" + std::string(name) + "'");
}

Ast parse(std::string_view text) {
  if (text.size() > kMaxInput) throw Error(ErrorKind::InvalidArgument, "hspec input larger than 1 MiB");
  return Parser(text, Lexer(text).run()).run();
}

Hamiltonian build(const Ast& ast, std::string label) {
  const SystemLayout layout = ast.layout();
  const auto n = layout.total_dim();
  Matrix h = Matrix::Zero(n, n);
  for (const auto& term : ast.terms) {
    std::map<int, const OpRef*> by_position;
    for (const auto& op : term.factors) by_position[layout.position(op.label)] = &op;
    Matrix product = Matrix::Ones(1, 1);
    for (std::size_t p = 0; p < layout.size(); ++p) {
      const int dim = layout.dims()[p];
      const auto it = by_position.find(static_cast<int>(p));
      const Matrix local = it == by_position.end() ? ops::identity(dim)
                                                   : operator_matrix(it->second->name, dim, it->second->arg);
      product = kron(product, local);
    }
    h += term.coeff.value() * product;
  }
  return Hamiltonian(layout, std::move(h), std::move(label));
}

std::string format(const Ast& ast) {
  std::string out;
  for (const auto& s : ast.systems) out += "system " + s.label + ":" + std::to_string(s.dim) + ";\n";
  out += "H =";
  bool first = true;
  for (const auto& term : ast.terms) {
    if (first)
      out += term.coeff.negative ? " -" : " ";
    else
      out += term.coeff.negative ? "\n  - " : "\n  + ";
    first = false;
    const Coefficient& c = term.coeff;
    if (c.root)
      out += shortest(c.num) + "/sqrt(" + shortest(*c.root) + ")*";
    else if (c.num != 1)
      out += shortest(c.num) + "*";
    for (std::size_t k = 0; k < term.factors.size(); ++k) {
      const OpRef& op = term.factors[k];
      if (k) out += "@";
      out += op.name + "(" + op.label;
      if (op.arg) out += "," + std::to_string(*op.arg);
      out += ")";
    }
  }
  out += ";\n";
  return out;
}

}  // namespace medqsl::hspec
