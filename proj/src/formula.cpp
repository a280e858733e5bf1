#include "kxstit/formula.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_set>

namespace kx {

struct Formula::Node {
  Op op;
  std::string name;
  std::vector<Formula> kids;
};

Formula::Formula() : Formula(atom("p")) {}
Formula::Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

Formula Formula::make(Op op, std::string name, std::vector<Formula> kids) {
  return Formula(std::make_shared<const Node>(Node{op, std::move(name), std::move(kids)}));
}

Formula Formula::atom(std::string name) { return make(Op::Atom, std::move(name), {}); }
Formula Formula::neg(Formula f) { return make(Op::Not, "", {std::move(f)}); }
Formula Formula::conj(Formula a, Formula b) { return make(Op::And, "", {std::move(a), std::move(b)}); }
Formula Formula::disj(Formula a, Formula b) { return make(Op::Or, "", {std::move(a), std::move(b)}); }
Formula Formula::implies(Formula a, Formula b) {
  return make(Op::Implies, "", {std::move(a), std::move(b)});
}
Formula Formula::box(Formula f) { return make(Op::Box, "", {std::move(f)}); }
Formula Formula::diamond(Formula f) { return make(Op::Diamond, "", {std::move(f)}); }
Formula Formula::next(Formula f) { return make(Op::Next, "", {std::move(f)}); }
Formula Formula::yesterday(Formula f) { return make(Op::Yesterday, "", {std::move(f)}); }
Formula Formula::stit(std::string agent, Formula f) {
  return make(Op::Stit, std::move(agent), {std::move(f)});
}
Formula Formula::stit_ags(Formula f) { return make(Op::StitAgs, "", {std::move(f)}); }
Formula Formula::knows(std::string agent, Formula f) {
  return make(Op::Knows, std::move(agent), {std::move(f)});
}
Formula Formula::common(Formula f) { return make(Op::Common, "", {std::move(f)}); }
Formula Formula::ex_ante(std::string agent, Formula f) {
  return make(Op::ExAnte, std::move(agent), {std::move(f)});
}
Formula Formula::ex_interim(std::string agent, Formula f) {
  return make(Op::ExInterim, std::move(agent), {std::move(f)});
}
Formula Formula::ex_post(std::string agent, Formula f) {
  return make(Op::ExPost, std::move(agent), {std::move(f)});
}
Formula Formula::know_how(std::string agent, Formula f) {
  return make(Op::KnowHow, std::move(agent), {std::move(f)});
}
Formula Formula::group_ex_ante(Formula f) { return make(Op::GroupExAnte, "", {std::move(f)}); }

Op Formula::op() const { return node_->op; }
const std::string& Formula::name() const { return node_->name; }
std::size_t Formula::arity() const { return node_->kids.size(); }
const Formula& Formula::child(std::size_t i) const { return node_->kids.at(i); }

bool Formula::is_macro() const {
  switch (op()) {
    case Op::ExAnte:
    case Op::ExInterim:
    case Op::ExPost:
    case Op::KnowHow:
    case Op::GroupExAnte:
      return true;
    default:
      return false;
  }
}

bool Formula::is_sugar() const {
  return op() == Op::Or || op() == Op::Implies || op() == Op::Diamond;
}

namespace {

const char* op_tag(Op op) {
  switch (op) {
    case Op::Atom: return "atom";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "imp";
    case Op::Box: return "box";
    case Op::Diamond: return "dia";
    case Op::Next: return "X";
    case Op::Yesterday: return "Y";
    case Op::Stit: return "stit";
    case Op::StitAgs: return "ags";
    case Op::Knows: return "K";
    case Op::Common: return "C";
    case Op::ExAnte: return "ExAnte";
    case Op::ExInterim: return "ExInterim";
    case Op::ExPost: return "ExPost";
    case Op::KnowHow: return "Kh";
    case Op::GroupExAnte: return "GExAnte";
  }
  return "?";
}

void write_key(const Formula& f, std::string& out) {
  out += op_tag(f.op());
  if (!f.name().empty()) {
    out += ':';
    out += f.name();
  }
  if (f.arity() == 0) return;
  out += '(';
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (i) out += ',';
    write_key(f.child(i), out);
  }
  out += ')';
}

int compare(const Formula& a, const Formula& b) {
  if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
  if (int c = a.name().compare(b.name())) return c < 0 ? -1 : 1;
  if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (int c = compare(a.child(i), b.child(i))) return c;
  return 0;
}

}  // namespace

std::string Formula::key() const {
  std::string out;
  write_key(*this, out);
  return out;
}

bool operator==(const Formula& a, const Formula& b) {
  return a.node_ == b.node_ || compare(a, b) == 0;
}
bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

// ---------------------------------------------------------------- parsing

namespace {

std::string describe(std::size_t offset, const std::set<std::string>& expected,
                     const std::string& found) {
  std::ostringstream os;
  os << "syntax error at byte " << offset << ": found " << found << ", expected one of {";
  bool first = true;
  for (const auto& e : expected) {
    os << (first ? "" : ", ") << e;
    first = false;
  }
  os << "}";
  return os.str();
}

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& e : s) {
    if (!out.empty()) out += ' ';
    out += e;
  }
  return out;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::set<std::string> expected, const std::string& found)
    : Error("SyntaxError", describe(offset, expected, found),
            {{"offset", std::to_string(offset)}, {"expected", join(expected)}, {"found", found}}),
      offset_(offset),
      expected_(std::move(expected)) {}

namespace {

enum class Tok { Ident, LParen, RParen, LBracket, RBracket, LBrace, RBrace, Comma, Not, And, Or, Arrow, BoxTok, DiaTok, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

const std::set<std::string> kUnaryStart = {"atom", "(", "~", "[]", "<>", "X", "Y", "[agent]", "[Ags]", "K{agent}", "C", "macro"};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t at = i;
    if (ident_char(c)) {
      while (i < s.size() && ident_char(s[i])) ++i;
      out.push_back({Tok::Ident, s.substr(at, i - at), at});
      continue;
    }
    auto two = s.compare(i, 2, "->") == 0 ? "->" : s.compare(i, 2, "<>") == 0 ? "<>" : "";
    if (std::string(two) == "->") {
      out.push_back({Tok::Arrow, "->", at});
      i += 2;
      continue;
    }
    if (std::string(two) == "<>") {
      out.push_back({Tok::DiaTok, "<>", at});
      i += 2;
      continue;
    }
    if (c == '[') {
      std::size_t j = i + 1;
      while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == ']') {
        out.push_back({Tok::BoxTok, "[]", at});
        i = j + 1;
        continue;
      }
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case ',': k = Tok::Comma; break;
      case '~': k = Tok::Not; break;
      case '&': k = Tok::And; break;
      case '|': k = Tok::Or; break;
      default:
        throw SyntaxError(at, kUnaryStart, "character '" + std::string(1, c) + "'");
    }
    out.push_back({k, std::string(1, c), at});
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

bool reserved(const std::string& id) { return id == "X" || id == "Y" || id == "K" || id == "C"; }

const std::map<std::string, Op> kMacros = {
    {"ExAnte", Op::ExAnte}, {"ExInterim", Op::ExInterim}, {"ExPost", Op::ExPost},
    {"Kh", Op::KnowHow},    {"GExAnte", Op::GroupExAnte},
};

class Parser {
 public:
  Parser(const std::string& text, const ParseOptions& opts) : toks_(lex(text)), opts_(opts) {}

  Formula run() {
    Formula f = implication();
    expect(Tok::End, {"end of input", "&", "|", "->"});
    return f;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

  static std::string found(const Token& t) {
    return t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  }

  [[noreturn]] void fail(const std::set<std::string>& expected) const {
    throw SyntaxError(peek().offset, expected, found(peek()));
  }

  const Token& expect(Tok k, const std::set<std::string>& expected) {
    if (peek().kind != k) fail(expected);
    return toks_[pos_++];
  }

  std::string agent_name() {
    const Token& t = expect(Tok::Ident, {"agent"});
    if (reserved(t.text))
      throw SyntaxError(t.offset, {"agent"}, "reserved word '" + t.text + "'");
    return t.text;
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::Arrow) {
      ++pos_;
      return Formula::implies(lhs, implication());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (peek().kind == Tok::Or) {
      ++pos_;
      f = Formula::disj(f, conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (peek().kind == Tok::And) {
      ++pos_;
      f = Formula::conj(f, unary());
    }
    return f;
  }

  Formula unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not: ++pos_; return Formula::neg(unary());
      case Tok::BoxTok: ++pos_; return Formula::box(unary());
      case Tok::DiaTok: ++pos_; return Formula::diamond(unary());
      case Tok::LBracket: {
        ++pos_;
        const Token& a = peek();
        if (a.kind == Tok::Ident && a.text == "Ags") {
          ++pos_;
          expect(Tok::RBracket, {"]"});
          return Formula::stit_ags(unary());
        }
        std::string agent = agent_name();
        expect(Tok::RBracket, {"]"});
        return Formula::stit(agent, unary());
      }
      case Tok::LParen: {
        ++pos_;
        Formula f = implication();
        expect(Tok::RParen, {")", "&", "|", "->"});
        return f;
      }
      case Tok::Ident: return identifier();
      default: fail(kUnaryStart);
    }
  }

  Formula identifier() {
    const Token& t = peek();
    const std::string& id = t.text;
    if (id == "X") {
      ++pos_;
      return Formula::next(unary());
    }
    if (id == "Y") {
      ++pos_;
      return Formula::yesterday(unary());
    }
    if (id == "K") {
      ++pos_;
      expect(Tok::LBrace, {"{"});
      std::string agent = agent_name();
      expect(Tok::RBrace, {"}"});
      return Formula::knows(agent, unary());
    }
    if (id == "C") {
      if (!opts_.common_knowledge)
        throw Error("CommonKnowledgeDisabled",
                    "common knowledge operator C at byte " + std::to_string(t.offset) +
                        " requires the common-knowledge extension",
                    {{"offset", std::to_string(t.offset)}});
      ++pos_;
      return Formula::common(unary());
    }
    if (peek(1).kind == Tok::LParen) {
      auto it = kMacros.find(id);
      if (it == kMacros.end())
        throw Error("UnknownMacro", "unknown macro '" + id + "' at byte " + std::to_string(t.offset),
                    {{"offset", std::to_string(t.offset)}, {"macro", id}});
      pos_ += 2;
      if (it->second == Op::GroupExAnte) {
        if (!opts_.common_knowledge)
          throw Error("CommonKnowledgeDisabled",
                      "GExAnte at byte " + std::to_string(t.offset) +
                          " requires the common-knowledge extension",
                      {{"offset", std::to_string(t.offset)}});
        Formula body = implication();
        expect(Tok::RParen, {")"});
        return Formula::group_ex_ante(body);
      }
      std::string agent = agent_name();
      expect(Tok::Comma, {","});
      Formula body = implication();
      expect(Tok::RParen, {")"});
      switch (it->second) {
        case Op::ExAnte: return Formula::ex_ante(agent, body);
        case Op::ExInterim: return Formula::ex_interim(agent, body);
        case Op::ExPost: return Formula::ex_post(agent, body);
        default: return Formula::know_how(agent, body);
      }
    }
    ++pos_;
    return Formula::atom(id);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOptions opts_;
};

}  // namespace

Formula parse(const std::string& text, const ParseOptions& opts) { return Parser(text, opts).run(); }

// ---------------------------------------------------------------- printing

namespace {

void print_to(const Formula& f, std::string& out) {
  auto wrap = [&](const std::string& prefix) {
    out += prefix;
    out += '(';
    print_to(f.child(), out);
    out += ')';
  };
  auto binary = [&](const char* sym) {
    out += '(';
    print_to(f.child(0), out);
    out += sym;
    print_to(f.child(1), out);
    out += ')';
  };
  switch (f.op()) {
    case Op::Atom: out += f.name(); return;
    case Op::Not:
      out += '~';
      print_to(f.child(), out);
      return;
    case Op::And: binary(" & "); return;
    case Op::Or: binary(" | "); return;
    case Op::Implies: binary(" -> "); return;
    case Op::Box: wrap("[]"); return;
    case Op::Diamond: wrap("<>"); return;
    case Op::Next: wrap("X"); return;
    case Op::Yesterday: wrap("Y"); return;
    case Op::Stit: wrap("[" + f.name() + "]"); return;
    case Op::StitAgs: wrap("[Ags]"); return;
    case Op::Knows: wrap("K{" + f.name() + "}"); return;
    case Op::Common: wrap("C"); return;
    default: print_to(expand_macros(f), out); return;
  }
}

}  // namespace

std::string print(const Formula& f) {
  std::string out;
  print_to(f, out);
  return out;
}

// ---------------------------------------------------------------- rewriting

namespace {

Formula rebuild(const Formula& f, std::vector<Formula> kids) {
  switch (f.op()) {
    case Op::Atom: return f;
    case Op::Not: return Formula::neg(kids[0]);
    case Op::And: return Formula::conj(kids[0], kids[1]);
    case Op::Or: return Formula::disj(kids[0], kids[1]);
    case Op::Implies: return Formula::implies(kids[0], kids[1]);
    case Op::Box: return Formula::box(kids[0]);
    case Op::Diamond: return Formula::diamond(kids[0]);
    case Op::Next: return Formula::next(kids[0]);
    case Op::Yesterday: return Formula::yesterday(kids[0]);
    case Op::Stit: return Formula::stit(f.name(), kids[0]);
    case Op::StitAgs: return Formula::stit_ags(kids[0]);
    case Op::Knows: return Formula::knows(f.name(), kids[0]);
    case Op::Common: return Formula::common(kids[0]);
    case Op::ExAnte: return Formula::ex_ante(f.name(), kids[0]);
    case Op::ExInterim: return Formula::ex_interim(f.name(), kids[0]);
    case Op::ExPost: return Formula::ex_post(f.name(), kids[0]);
    case Op::KnowHow: return Formula::know_how(f.name(), kids[0]);
    case Op::GroupExAnte: return Formula::group_ex_ante(kids[0]);
  }
  return f;
}

template <class Fn>
Formula map_children(const Formula& f, Fn&& fn) {
  std::vector<Formula> kids;
  kids.reserve(f.arity());
  for (std::size_t i = 0; i < f.arity(); ++i) kids.push_back(fn(f.child(i)));
  return rebuild(f, std::move(kids));
}

}  // namespace

Formula expand_macros(const Formula& f) {
  using F = Formula;
  if (f.arity() == 0) return f;
  Formula body = expand_macros(f.child());
  const std::string& a = f.name();
  switch (f.op()) {
    case Op::ExAnte: return F::box(F::knows(a, F::box(F::next(body))));
    case Op::ExInterim: return F::knows(a, F::stit(a, F::next(body)));
    case Op::ExPost: return F::next(F::knows(a, F::yesterday(F::stit_ags(F::next(body)))));
    case Op::KnowHow:
      return F::box(F::knows(a, F::diamond(F::knows(a, F::stit(a, F::next(body))))));
    case Op::GroupExAnte: return F::box(F::common(F::box(F::next(body))));
    default: return map_children(f, [](const Formula& c) { return expand_macros(c); });
  }
}

Formula normalize(const Formula& f) {
  using F = Formula;
  if (f.is_macro()) return normalize(expand_macros(f));
  switch (f.op()) {
    case Op::Or:
      return F::neg(F::conj(F::neg(normalize(f.child(0))), F::neg(normalize(f.child(1)))));
    case Op::Implies:
      return F::neg(F::conj(normalize(f.child(0)), F::neg(normalize(f.child(1)))));
    case Op::Diamond: return F::neg(F::box(F::neg(normalize(f.child()))));
    default: return map_children(f, [](const Formula& c) { return normalize(c); });
  }
}

bool is_primitive(const Formula& f) {
  if (f.is_macro() || f.is_sugar()) return false;
  for (std::size_t i = 0; i < f.arity(); ++i)
    if (!is_primitive(f.child(i))) return false;
  return true;
}

Formula substitute(const Formula& f, const std::string& atom, const Formula& by) {
  if (f.op() == Op::Atom) return f.name() == atom ? by : f;
  return map_children(f, [&](const Formula& c) { return substitute(c, atom, by); });
}

// ---------------------------------------------------------------- metrics

namespace {

struct Span {
  int hi;
  int lo;
};

// running-offset extremes over every root-to-leaf path, starting from 0
Span span(const Formula& f) {
  switch (f.op()) {
    case Op::Atom: return {0, 0};
    case Op::Next: {
      Span s = span(f.child());
      return {1 + s.hi, std::min(0, 1 + s.lo)};
    }
    case Op::Yesterday: {
      Span s = span(f.child());
      return {std::max(0, s.hi - 1), s.lo - 1};
    }
    default: {
      Span out{0, 0};
      for (std::size_t i = 0; i < f.arity(); ++i) {
        Span s = span(f.child(i));
        out.hi = std::max(out.hi, s.hi);
        out.lo = std::min(out.lo, s.lo);
      }
      return out;
    }
  }
}

void post_order(const Formula& f, std::vector<Formula>& out, std::unordered_set<std::string>& seen) {
  for (std::size_t i = 0; i < f.arity(); ++i) post_order(f.child(i), out, seen);
  if (seen.insert(f.key()).second) out.push_back(f);
}

}  // namespace

DepthProfile depth_profile(const Formula& f) {
  Span s = span(expand_macros(f));
  return {s.hi, -s.lo};
}

std::vector<Formula> subformulas(const Formula& f) {
  std::vector<Formula> out;
  std::unordered_set<std::string> seen;
  post_order(f, out, seen);
  return out;
}

int modal_depth(const Formula& f) {
  int d = 0;
  for (std::size_t i = 0; i < f.arity(); ++i) d = std::max(d, modal_depth(f.child(i)));
  switch (f.op()) {
    case Op::Atom:
    case Op::Not:
    case Op::And:
    case Op::Or:
    case Op::Implies:
      return d;
    default:
      return d + 1;
  }
}

namespace {
void collect(const Formula& f, std::set<std::string>& atoms, std::set<std::string>& agents, bool& common) {
  if (f.op() == Op::Atom) atoms.insert(f.name());
  else if (!f.name().empty()) agents.insert(f.name());
  if (f.op() == Op::Common || f.op() == Op::GroupExAnte) common = true;
  for (std::size_t i = 0; i < f.arity(); ++i) collect(f.child(i), atoms, agents, common);
}
}  // namespace

std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> a, g;
  bool c = false;
  collect(f, a, g, c);
  return a;
}

std::set<std::string> agents_of(const Formula& f) {
  std::set<std::string> a, g;
  bool c = false;
  collect(f, a, g, c);
  return g;
}

bool mentions_common(const Formula& f) {
  std::set<std::string> a, g;
  bool c = false;
  collect(f, a, g, c);
  return c;
}

bool in_next_stit_fragment(const Formula& f) {
  Formula e = expand_macros(f);
  if ((e.op() == Op::Stit || e.op() == Op::StitAgs) && e.child().op() != Op::Next) return false;
  for (std::size_t i = 0; i < e.arity(); ++i)
    if (!in_next_stit_fragment(e.child(i))) return false;
  return true;
}

}  // namespace kx
