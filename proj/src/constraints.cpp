#include "treg/constraints.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace treg {

void RegularConstraintProblem::validate() const {
  if (!sig) throw Error("problem has no signature");
  if (sig->constants().empty()) throw Error("signature has no constant; no ground terms exist");
  if (sig->max_arity() > 2) throw Error("problem must be binarized before use");
  for (const Dta& a : automata) {
    if (!(a.sig() == *sig)) throw Error("automaton signature differs from the problem's");
    if (!a.has_accepting()) throw Error("constraint automata need accepting sets");
  }
  for (const Term& s : patterns)
    for (int v : treg::vars(s)) {
      auto it = var_automaton.find(v);
      if (it == var_automaton.end())
        throw Error("variable " + this->vars.decl(v).name + " of pattern " + s.str() +
                    " is not bound to an automaton");
      if (it->second >= automata.size()) throw Error("variable bound to unknown automaton");
    }
}

bool RestrictedConstraint::solution_ok(int var, const Term& ground) const {
  auto it = c.find(var);
  if (it == c.end()) throw Error("variable not in constraint domain");
  auto q = a->run(ground);
  if (!q || *q != it->second) return false;
  if (w.count(var) && ground.height() > h) return false;
  return true;
}

namespace {
void annotate_rec(const Term& s, const Dta& a, const std::map<int, StateId>& c, Position& here,
                  std::map<Position, StateId>& out, StateId& result) {
  if (s.is_var()) {
    auto it = c.find(s.var_id());
    if (it == c.end()) throw Error("annotate: unbound variable " + s.label());
    out[here] = result = it->second;
    return;
  }
  std::vector<StateId> child_states;
  child_states.reserve(static_cast<std::size_t>(s.arity()));
  for (int i = 0; i < s.arity(); ++i) {
    here.push_back(i + 1);
    StateId q = -1;
    annotate_rec(s.children()[static_cast<std::size_t>(i)], a, c, here, out, q);
    child_states.push_back(q);
    here.pop_back();
  }
  auto q = a.target(s.label(), child_states);
  if (!q)
    throw Error("annotate: no transition for " + s.label() + " at position " + to_string(here));
  out[here] = result = *q;
}
}  // namespace

std::map<Position, StateId> annotate(const Term& s, const Dta& a,
                                     const std::map<int, StateId>& c) {
  std::map<Position, StateId> out;
  Position here;
  StateId root = -1;
  annotate_rec(s, a, c, here, out, root);
  return out;
}

StateId state_of(const Term& s, const Dta& a, const std::map<int, StateId>& c) {
  if (s.is_var()) {
    auto it = c.find(s.var_id());
    if (it == c.end()) throw Error("state_of: unbound variable " + s.label());
    return it->second;
  }
  std::vector<StateId> child_states;
  for (const Term& ch : s.children()) child_states.push_back(state_of(ch, a, c));
  auto q = a.target(s.label(), child_states);
  if (!q) throw Error("state_of: no transition for " + s.label());
  return *q;
}

SplitResult split_one_or_n(const Dta& a, std::uint64_t n,
                           const std::map<StateId, std::uint64_t>& counts) {
  if (!a.is_complete()) throw Error("split_one_or_n: automaton must be complete");
  for (StateId q = 0; q < a.state_count(); ++q)
    if (!counts.count(q) || counts.at(q) > n)
      throw Error("split_one_or_n: counts inconsistent with the automaton");

  Dta out(a.sig_ptr());
  std::vector<std::optional<StateId>> flatten;
  // copies[q] lists the new states standing for old q: the state itself when
  // its count is n, one singleton copy per member otherwise
  std::vector<std::vector<StateId>> copies(static_cast<std::size_t>(a.state_count()));
  for (StateId q = 0; q < a.state_count(); ++q) {
    std::uint64_t m = counts.at(q);
    if (m == n) {
      StateInfo info = a.state(q);
      StateId nq = out.add_state(std::move(info));
      copies[static_cast<std::size_t>(q)].push_back(nq);
      flatten.emplace_back(q);
    } else {
      for (std::uint64_t i = 1; i <= m; ++i) {
        StateInfo info;
        info.kind = StateInfo::Kind::Indexed;
        info.origin = q;
        info.copy_index = static_cast<int>(i);
        info.name = a.state(q).name + "^" + std::to_string(i);
        StateId nq = out.add_state(std::move(info));
        copies[static_cast<std::size_t>(q)].push_back(nq);
        flatten.emplace_back(q);
      }
    }
  }

  for (StateId q = 0; q < a.state_count(); ++q) {
    // transitions into q, in the automaton's canonical order
    std::vector<Dta::TransKey> into;
    for (const auto& [key, to] : a.transitions())
      if (to == q) into.push_back(key);

    std::uint64_t counter = 1;
    bool splitting = counts.at(q) != n;
    for (const auto& [sym, children] : into) {
      std::vector<const std::vector<StateId>*> child_copies;
      bool dead = false;
      for (StateId ch : children) {
        child_copies.push_back(&copies[static_cast<std::size_t>(ch)]);
        dead = dead || child_copies.back()->empty();
      }
      if (dead) continue;  // some child has an empty language
      // all combinations of child copies, lexicographic
      std::vector<std::size_t> pick(children.size(), 0);
      while (true) {
        std::vector<StateId> cs;
        cs.reserve(children.size());
        for (std::size_t i = 0; i < children.size(); ++i) cs.push_back((*child_copies[i])[pick[i]]);
        if (splitting) {
          if (counter > counts.at(q))
            throw Error("split_one_or_n: more member transitions than counted for " +
                        a.state(q).name);
          out.add_transition(
              sym, cs, copies[static_cast<std::size_t>(q)][static_cast<std::size_t>(counter - 1)]);
          ++counter;
        } else {
          out.add_transition(sym, cs, copies[static_cast<std::size_t>(q)][0]);
        }
        std::size_t i = children.size();
        bool wrapped = true;
        while (i > 0) {
          --i;
          if (++pick[i] < child_copies[i]->size()) {
            wrapped = false;
            break;
          }
          pick[i] = 0;
        }
        if (wrapped) break;
      }
    }
    if (splitting && counter - 1 != counts.at(q))
      throw Error("split_one_or_n: expected " + std::to_string(counts.at(q)) +
                  " member transitions into " + a.state(q).name + ", built " +
                  std::to_string(counter - 1));
  }

  Dta completed = complete(out);
  while (flatten.size() < static_cast<std::size_t>(completed.state_count()))
    flatten.emplace_back(std::nullopt);
  return SplitResult{std::move(completed), std::move(flatten)};
}

bool is_one_or_n(const Dta& a, std::uint64_t n) {
  auto counts = count_upto(a, n);
  for (StateId q = 0; q < a.state_count(); ++q) {
    std::uint64_t m = counts.at(q);
    if (m == 0 || m == 1 || m == n) continue;
    return false;
  }
  return true;
}

ToSingleResult to_single(const RegularConstraintProblem& prob, const ToSingleOptions& opt) {
  prob.validate();
  ToSingleResult res;
  res.vars = prob.vars;

  for (const Term& s : prob.patterns)
    res.max_pattern_height = std::max(res.max_pattern_height, s.height());

  // one product factor per bound variable, in variable-id order
  std::vector<int> bound_vars;
  for (const auto& [v, ai] : prob.var_automaton) bound_vars.push_back(v);
  if (bound_vars.empty()) {
    // purely ground patterns: a single universal-state automaton suffices
    Dta triv(prob.sig);
    StateId q = triv.add_state("q");
    for (const auto& [name, k] : prob.sig->symbols())
      triv.add_transition(name, std::vector<StateId>(static_cast<std::size_t>(k), q), q);
    res.patterns = prob.patterns;
    std::sort(res.patterns.begin(), res.patterns.end());
    res.patterns.erase(std::unique(res.patterns.begin(), res.patterns.end()), res.patterns.end());
    res.r.a = std::make_shared<Dta>(std::move(triv));
    return res;
  }

  std::vector<Dta> factors;
  std::size_t product_size = 1;
  for (int v : bound_vars) {
    Dta completed = complete(prob.automata[prob.var_automaton.at(v)]);
    product_size *= static_cast<std::size_t>(completed.state_count());
    if (product_size > opt.max_product_states)
      throw ResourceLimitError("to_single: product automaton would exceed " +
                               std::to_string(opt.max_product_states) + " states");
    factors.push_back(std::move(completed));
  }
  std::vector<std::vector<StateId>> components;
  Dta prod = product(factors, &components);
  res.project = std::make_shared<Dta>(prod);

  std::uint64_t n = prob.patterns.size();
  if (n == 0) {
    // no patterns: empty language under a trivially valid constraint
    SplitResult sr = split_one_or_n(prod, 1, count_upto(prod, 1));
    res.r.a = std::make_shared<Dta>(std::move(sr.dta));
    res.flatten = std::move(sr.flatten);
    return res;
  }
  SplitResult sr = split_one_or_n(prod, n, count_upto(prod, n));
  if (static_cast<std::size_t>(sr.dta.state_count()) > opt.max_split_states)
    throw ResourceLimitError("to_single: split automaton would exceed " +
                             std::to_string(opt.max_split_states) + " states");
  res.flatten = sr.flatten;
  auto a = std::make_shared<Dta>(std::move(sr.dta));
  res.r.a = a;

  // families[x] = split states whose component for x is accepting
  std::map<int, std::vector<StateId>> families;
  for (std::size_t fi = 0; fi < bound_vars.size(); ++fi) {
    int v = bound_vars[fi];
    const Dta& fa = factors[fi];
    for (StateId nq = 0; nq < a->state_count(); ++nq) {
      auto orig = res.flatten[static_cast<std::size_t>(nq)];
      if (!orig) continue;  // completion sink
      StateId comp = components[static_cast<std::size_t>(*orig)][fi];
      if (fa.is_accepting(comp)) families[v].push_back(nq);
    }
  }

  // instantiate every pattern through all selections over its own variables
  std::map<std::string, Term> dedup;  // struct_key -> representative
  std::map<std::string, std::map<int, StateId>> dedup_states;
  std::size_t emitted = 0;
  for (const Term& s : prob.patterns) {
    std::vector<int> svars(vars(s).begin(), vars(s).end());
    bool feasible = true;
    for (int v : svars)
      if (families[v].empty()) {
        feasible = false;  // the variable's language is empty
        break;
      }
    if (!feasible) continue;
    // lexicographic over (variable order, state order)
    std::vector<std::size_t> pick(svars.size(), 0);
    while (true) {
      // temporary variables x@q, one per (original var, chosen state)
      Substitution phi;
      std::map<int, StateId> cstates;
      std::map<int, std::pair<int, StateId>> temp_origin;
      VarTable scratch = res.vars;
      for (std::size_t i = 0; i < svars.size(); ++i) {
        int v = svars[i];
        StateId q = families[v][pick[i]];
        int nv = scratch.fresh(prob.vars.decl(v).name + "@" + std::to_string(q),
                               "single:" + prob.vars.decl(v).name);
        phi[v] = Term::var(nv, scratch.decl(nv).name);
        cstates[nv] = q;
        temp_origin[nv] = {v, q};
      }
      Term inst = apply(phi, s);
      std::string key = struct_key(inst, cstates);
      if (!dedup.count(key)) {
        if (++emitted > opt.max_patterns)
          throw ResourceLimitError("to_single: more than " + std::to_string(opt.max_patterns) +
                                   " instantiated patterns");
        // commit the scratch variables
        res.vars = scratch;
        for (const auto& [nv, ori] : temp_origin) {
          res.r.c[nv] = cstates[nv];
          res.origin[nv] = ori;
        }
        dedup.emplace(key, inst);
        dedup_states.emplace(key, cstates);
      }
      if (svars.empty()) break;
      std::size_t i = svars.size();
      bool done = false;
      while (i > 0) {
        --i;
        if (++pick[i] < families[svars[i]].size()) break;
        pick[i] = 0;
        if (i == 0) done = true;
      }
      if (done) break;
    }
  }

  for (const auto& [key, t] : dedup) res.patterns.push_back(t);
  std::sort(res.patterns.begin(), res.patterns.end());

  // split may add copies per count plus one completion sink, nothing else
  std::uint64_t split_bound =
      static_cast<std::uint64_t>(prod.state_count()) * n + 1;
  if (static_cast<std::uint64_t>(a->state_count()) > split_bound)
    throw Error("to_single: split produced more states than its construction allows");
  return res;
}

bool is_regular_term(const Term& s, const RestrictedConstraint& r) {
  std::set<StateId> infinite = infinite_states(*r.a);
  for (int v : duplicated_vars(s)) {
    if (r.w.count(v)) continue;
    auto it = r.c.find(v);
    if (it == r.c.end()) throw Error("is_regular_term: unbound variable");
    if (infinite.count(it->second)) return false;
  }
  return true;
}

namespace {
bool match_rec(const Term& t, const Term& s, const RestrictedConstraint& r,
               std::map<int, Term>& binding) {
  if (s.is_var()) {
    auto [it, inserted] = binding.emplace(s.var_id(), t);
    if (!inserted && !(it->second == t)) return false;
    return true;
  }
  if (t.is_var() || t.label() != s.label() || t.arity() != s.arity()) return false;
  for (int i = 0; i < s.arity(); ++i)
    if (!match_rec(t.children()[static_cast<std::size_t>(i)],
                   s.children()[static_cast<std::size_t>(i)], r, binding))
      return false;
  return true;
}
}  // namespace

bool match_instance(const Term& t, const Term& s, const RestrictedConstraint& r) {
  if (!vars(t).empty()) throw Error("match_instance: left argument must be ground");
  std::map<int, Term> binding;
  if (!match_rec(t, s, r, binding)) return false;
  for (const auto& [v, ground] : binding)
    if (!r.solution_ok(v, ground)) return false;
  return true;
}

namespace {
void key_rec(const Term& s, const std::map<int, StateId>* c, std::map<int, int>& first_seen,
             std::ostringstream& os) {
  if (s.is_var()) {
    auto [it, inserted] = first_seen.emplace(s.var_id(), static_cast<int>(first_seen.size()) + 1);
    os << 'v' << it->second;
    if (c) {
      auto sit = c->find(s.var_id());
      if (sit == c->end()) throw Error("struct_key: unbound variable");
      os << ':' << sit->second;
    }
    return;
  }
  os << s.label();
  if (s.arity() > 0) {
    os << '(';
    for (int i = 0; i < s.arity(); ++i) {
      if (i) os << ',';
      key_rec(s.children()[static_cast<std::size_t>(i)], c, first_seen, os);
    }
    os << ')';
  }
}
}  // namespace

std::string shape_key(const Term& s) {
  std::ostringstream os;
  std::map<int, int> seen;
  key_rec(s, nullptr, seen, os);
  return os.str();
}

std::string struct_key(const Term& s, const std::map<int, StateId>& c) {
  std::ostringstream os;
  std::map<int, int> seen;
  key_rec(s, &c, seen, os);
  return os.str();
}

}  // namespace treg
