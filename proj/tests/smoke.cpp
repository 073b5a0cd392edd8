#include <cassert>
#include <iostream>

#include "treg/constraints.hpp"
#include "treg/dta.hpp"
#include "treg/term.hpp"

using namespace treg;

int main() {
  Signature sig;
  sig.add("f", 2);
  sig.add("a", 0);
  sig.add("b", 0);

  Term a = Term::symbol("a");
  Term b = Term::symbol("b");
  Term fab = Term::symbol("f", {a, b});
  assert(fab.size() == 3 && fab.height() == 1);
  assert(fab.str() == "f(a,b)");

  Dta d(sig);
  StateId qa = d.add_state("qa");
  StateId qb = d.add_state("qb");
  d.add_transition("a", {}, qa);
  d.add_transition("b", {}, qb);
  d.add_transition("f", {qa, qb}, qb);
  assert(d.run(a) == qa);
  assert(d.run(fab) == qb);
  assert(!d.run(Term::symbol("f", {b, b})));

  Dta c = complete(d);
  assert(c.is_complete());
  assert(c.run(Term::symbol("f", {b, b})).has_value());

  auto ne = non_empty_states(c);
  assert(ne.size() == 3);
  auto counts = count_upto(c, 5);
  assert(counts.at(qa) == 1);

  std::cout << "smoke ok\n";
  return 0;
}
