#ifndef TREG_DTA_HPP
#define TREG_DTA_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "treg/term.hpp"

namespace treg {

/// Index of a state within its automaton.
using StateId = int;

/// How a state came to exist; kept for diagnostics and for the bookkeeping
/// of the single-constraint transformation.
struct StateInfo {
  enum class Kind { Base, Tuple, Indexed, Sink };
  Kind kind = Kind::Base;
  std::string name;
  std::vector<StateId> tuple;  // Kind::Tuple: component states in the factor automata
  StateId origin = -1;         // Kind::Indexed: state of the pre-split automaton
  int copy_index = 0;          // Kind::Indexed: 1-based copy number
  bool sink = false;           // hidden in printed automata
};

/// A deterministic bottom-up tree automaton. The accepting set is optional;
/// constraint automata drop it. Transitions are kept in a map keyed by
/// (symbol, child states), which both enforces determinism and gives every
/// iteration a reproducible order.
class Dta {
 public:
  explicit Dta(std::shared_ptr<const Signature> sig) : sig_(std::move(sig)) {}
  explicit Dta(const Signature& sig) : sig_(std::make_shared<Signature>(sig)) {}

  StateId add_state(StateInfo info);
  StateId add_state(const std::string& name) {
    StateInfo i;
    i.name = name;
    return add_state(std::move(i));
  }

  /// Throws Error if a transition with the same left-hand side but a
  /// different target already exists, or on a signature/arity mismatch.
  void add_transition(const std::string& symbol, const std::vector<StateId>& children, StateId to);

  int state_count() const { return static_cast<int>(states_.size()); }
  const StateInfo& state(StateId q) const;
  std::optional<StateId> state_by_name(const std::string& name) const;

  const Signature& sig() const { return *sig_; }
  std::shared_ptr<const Signature> sig_ptr() const { return sig_; }

  using TransKey = std::pair<std::string, std::vector<StateId>>;
  const std::map<TransKey, StateId>& transitions() const { return delta_; }
  std::optional<StateId> target(const std::string& symbol, const std::vector<StateId>& children) const;

  void set_accepting(std::set<StateId> f) { accepting_ = std::move(f); }
  bool has_accepting() const { return accepting_.has_value(); }
  const std::set<StateId>& accepting() const;
  bool is_accepting(StateId q) const;

  bool is_complete() const;

  /// |Q| plus the sum of transition sizes (arity + 2 per transition).
  int automaton_size() const;

  /// Bottom-up evaluation of a ground term. Returns nullopt when some
  /// transition is missing. `leaf_states` makes the given variables behave
  /// like state-labelled leaves that evaluate to themselves.
  std::optional<StateId> run(const Term& t,
                             const std::map<int, StateId>& leaf_states = {}) const;

  /// States sorted by name, transitions in key order; byte-stable.
  std::string canonical_str() const;

 private:
  std::shared_ptr<const Signature> sig_;
  std::vector<StateInfo> states_;
  std::map<std::string, StateId> by_name_;
  std::map<TransKey, StateId> delta_;
  std::optional<std::set<StateId>> accepting_;
};

/// Total completion: adds at most one sink state and the missing
/// transitions into it. Accepted language unchanged.
Dta complete(const Dta& a);

/// Product of complete automata over one signature, without accepting
/// states. run(product, t) is the tuple of the component runs; the
/// component states of each product state are recorded in its StateInfo
/// and, when `components` is given, also written there.
Dta product(const std::vector<Dta>& as, std::vector<std::vector<StateId>>* components = nullptr);

/// {q | L(A,q) != empty}, by least-fixpoint saturation.
std::set<StateId> non_empty_states(const Dta& a);

/// {q | L(A,q) is infinite}: states reachable in the non-empty-support
/// graph from a state that lies on a cycle.
std::set<StateId> infinite_states(const Dta& a);

/// q -> min(|L(A,q)|, k) with saturating arithmetic; requires k >= 1.
std::map<StateId, std::uint64_t> count_upto(const Dta& a, std::uint64_t k);

/// Exactly {t | A(t) = q, height(t) <= max_height}.
/// Throws ResourceLimitError beyond `cap` terms.
std::set<Term> enumerate_language(const Dta& a, StateId q, int max_height,
                                  std::size_t cap = 100000);

/// Per-state languages up to a height bound, grouped by state.
std::map<StateId, std::set<Term>> languages_up_to(const Dta& a, int max_height,
                                                  std::size_t cap = 100000);

/// complete(A) with the accepting set flipped. Requires an accepting set.
Dta complement(const Dta& a);

/// Smallest member of each non-empty language, by (height, lexicographic).
std::map<StateId, Term> minimal_witnesses(const Dta& a);

/// Greatest member height for every finite-language state. Infinite and
/// empty states are absent from the result.
std::map<StateId, int> finite_language_max_heights(const Dta& a);

/// Some member of L(A,q) with height >= hmin; requires q infinite.
Term witness_with_height_at_least(const Dta& a, StateId q, int hmin);

/// Deterministic stream over L(A,q): first the members of height <= gate
/// in (height, lex) order, then for infinite states ever taller pumped
/// witnesses. Every yielded term is distinct.
class LanguageStream {
 public:
  LanguageStream(const Dta& a, StateId q, int gate = 3, std::size_t cap = 100000);
  /// Next term, or nullopt when a finite language is exhausted.
  std::optional<Term> next();

 private:
  const Dta& a_;
  StateId q_;
  std::vector<Term> bounded_;
  std::size_t idx_ = 0;
  bool infinite_;
  int next_height_;
};

}  // namespace treg

#endif
