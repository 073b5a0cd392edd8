#ifndef TREG_CONSTRAINTS_HPP
#define TREG_CONSTRAINTS_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "treg/dta.hpp"
#include "treg/term.hpp"

namespace treg {

/// Input problem: patterns S plus one accepting automaton per variable.
struct RegularConstraintProblem {
  std::shared_ptr<const Signature> sig;
  std::vector<Term> patterns;
  std::vector<Dta> automata;
  std::map<int, std::size_t> var_automaton;  // variable id -> index into automata
  VarTable vars;

  /// Every variable of every pattern is bound; automata share sig and
  /// carry accepting sets. Throws on violation.
  void validate() const;
};

/// One complete automaton without accepting states plus a total map from
/// variables to its states.
struct SingleConstraint {
  std::shared_ptr<const Dta> a;
  std::map<int, StateId> c;
};

/// Single constraint extended with a height cap: solutions map each x in W
/// to a term of height at most h.
struct RestrictedConstraint {
  std::shared_ptr<const Dta> a;
  std::map<int, StateId> c;  // domain doubles as the variable set V
  std::set<int> w;
  int h = 0;

  bool solution_ok(int var, const Term& ground) const;
};

/// State of every subterm of s, bottom-up in one pass. Variables evaluate
/// to their C-state. Throws Error when a transition is missing (incomplete
/// automaton) or a variable is unbound.
std::map<Position, StateId> annotate(const Term& s, const Dta& a,
                                     const std::map<int, StateId>& c);

/// C-state of the whole term.
StateId state_of(const Term& s, const Dta& a, const std::map<int, StateId>& c);

/// Result of the 1-or-n split.
struct SplitResult {
  Dta dta;
  /// new state -> origin state of the input automaton; the completion sink,
  /// if one was added, has no origin.
  std::vector<std::optional<StateId>> flatten;
};

/// Rebuilds a complete automaton so that every inhabited state has a
/// language of cardinality exactly 1 or at least n. States with a finite
/// count below n are split into one singleton copy per member; `counts`
/// must equal count_upto(a, n).
SplitResult split_one_or_n(const Dta& a, std::uint64_t n,
                           const std::map<StateId, std::uint64_t>& counts);

/// Did the 1-or-n split succeed: every state's language is a singleton,
/// has at least n members, or is empty (dead completion sinks).
bool is_one_or_n(const Dta& a, std::uint64_t n);

struct ToSingleOptions {
  std::size_t max_product_states = 600;
  std::size_t max_split_states = 600;
  std::size_t max_patterns = 100000;
};

struct ToSingleResult {
  std::vector<Term> patterns;  // S', pairwise variable-disjoint, sorted
  SingleConstraint r;
  VarTable vars;  // extends the problem's table with the renamed variables
  /// renamed variable id -> (original variable id, assigned state)
  std::map<int, std::pair<int, StateId>> origin;
  int max_pattern_height = 0;  // H, over the *input* patterns
  /// provenance chain: product automaton and the split's flatten map
  std::shared_ptr<const Dta> project;
  std::vector<std::optional<StateId>> flatten;
};

/// The exponential reduction to a single constraint: complete each bound
/// automaton, form their product, split it 1-or-|S|, then instantiate each
/// pattern through every selection of accepting-component states,
/// de-duplicating modulo structural equality and renaming the survivors
/// apart. Language is preserved.
ToSingleResult to_single(const RegularConstraintProblem& prob, const ToSingleOptions& = {});

/// True iff every variable occurring at least twice in s has a finite
/// language or carries the height cap.
bool is_regular_term(const Term& s, const RestrictedConstraint& r);

/// Ground-instance test: does some solution phi of r give phi(s) = t?
bool match_instance(const Term& t, const Term& s, const RestrictedConstraint& r);

/// Canonical key identifying s up to structural similarity (variables
/// renamed to first-occurrence indices).
std::string shape_key(const Term& s);
/// Canonical key identifying s up to structural equality w.r.t. C
/// (first-occurrence indices tagged with the variable's state).
std::string struct_key(const Term& s, const std::map<int, StateId>& c);

}  // namespace treg

#endif
