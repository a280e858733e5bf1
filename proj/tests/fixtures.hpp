#pragma once

#include <random>
#include <string>
#include <vector>

#include "kxstit/bdt.hpp"
#include "kxstit/checker.hpp"
#include "kxstit/formula.hpp"
#include "kxstit/model.hpp"

namespace kxtest {

// single world w, succ w -> w, every partition {{w}}, agent a, p false
kx::KripkeModel one_world();
const char* one_world_doc();

const kx::KripkeModel& figure1(char which);

struct Judgment {
  char which;  // 'a' or 'b'
  const char* world;
  const char* formula;
  bool expected;
};

// judgments on the two compiled bomb-defusal models
const std::vector<Judgment>& figure1_judgments();

// evaluates parse(formula) at the named world
bool holds(const kx::KripkeModel& m, const std::string& world, const std::string& formula);

}  // namespace kxtest

namespace kxtest {

// formula over the full surface syntax (sugar, macros, common knowledge)
kx::Formula random_surface_formula(std::mt19937_64& rng, int depth, const std::vector<std::string>& agents,
                                   const std::vector<std::string>& props);

// copy of m whose agent choices are random partitions of each box class and
// whose Ags partition is their intersection; frame conditions are not kept
kx::KripkeModel scramble_choices(const kx::KripkeModel& m, std::mt19937_64& rng);

}  // namespace kxtest
