#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "kxstit/error.hpp"

namespace kx {

enum class Op {
  Atom,
  Not,
  And,
  Or,
  Implies,
  Box,
  Diamond,
  Next,
  Yesterday,
  Stit,
  StitAgs,
  Knows,
  Common,
  // macros
  ExAnte,
  ExInterim,
  ExPost,
  KnowHow,
  GroupExAnte,
};

class Formula {
 public:
  Formula();  // the atom "p"; only useful as a placeholder

  static Formula atom(std::string name);
  static Formula neg(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula box(Formula f);
  static Formula diamond(Formula f);
  static Formula next(Formula f);
  static Formula yesterday(Formula f);
  static Formula stit(std::string agent, Formula f);
  static Formula stit_ags(Formula f);
  static Formula knows(std::string agent, Formula f);
  static Formula common(Formula f);
  static Formula ex_ante(std::string agent, Formula f);
  static Formula ex_interim(std::string agent, Formula f);
  static Formula ex_post(std::string agent, Formula f);
  static Formula know_how(std::string agent, Formula f);
  static Formula group_ex_ante(Formula f);

  Op op() const;
  // atom name for Atom, agent name for agent-indexed operators, empty otherwise
  const std::string& name() const;
  std::size_t arity() const;
  const Formula& child(std::size_t i = 0) const;

  bool is_macro() const;
  bool is_sugar() const;  // Or, Implies, Diamond

  // Unambiguous structural key; macros are kept as macros.
  std::string key() const;
  // identity of the shared node; stable for the lifetime of the value
  const void* id() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
  friend bool operator<(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n);
  static Formula make(Op op, std::string name, std::vector<Formula> kids);
  std::shared_ptr<const Node> node_;
};

struct ParseOptions {
  bool common_knowledge = false;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::set<std::string> expected, const std::string& found);
  std::size_t offset() const { return offset_; }
  const std::set<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::set<std::string> expected_;
};

Formula parse(const std::string& text, const ParseOptions& opts = {});
std::string print(const Formula& f);

Formula expand_macros(const Formula& f);
// Rewrites Or/Implies/Diamond into the primitive base; macros are expanded first.
Formula normalize(const Formula& f);
bool is_primitive(const Formula& f);

struct DepthProfile {
  int forward_reach = 0;
  int backward_reach = 0;
  friend bool operator==(const DepthProfile&, const DepthProfile&) = default;
};

DepthProfile depth_profile(const Formula& f);
std::vector<Formula> subformulas(const Formula& f);

int modal_depth(const Formula& f);
std::set<std::string> atoms_of(const Formula& f);
std::set<std::string> agents_of(const Formula& f);
bool mentions_common(const Formula& f);
// true when every stit operator is immediately followed by X, i.e. the
// [a]X / [Ags]X fragment used by the knowledge notions
bool in_next_stit_fragment(const Formula& f);

Formula substitute(const Formula& f, const std::string& atom, const Formula& by);

}  // namespace kx
