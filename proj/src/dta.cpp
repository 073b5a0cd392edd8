#include "treg/dta.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>

namespace treg {

StateId Dta::add_state(StateInfo info) {
  if (info.name.empty()) throw Error("state needs a name");
  if (by_name_.count(info.name)) throw Error("duplicate state name: " + info.name);
  StateId id = static_cast<StateId>(states_.size());
  by_name_[info.name] = id;
  states_.push_back(std::move(info));
  return id;
}

void Dta::add_transition(const std::string& symbol, const std::vector<StateId>& children,
                         StateId to) {
  int k = sig_->arity(symbol);  // throws on unknown symbol
  if (k != static_cast<int>(children.size()))
    throw Error("arity mismatch in transition for " + symbol);
  auto check = [&](StateId q) {
    if (q < 0 || q >= state_count()) throw Error("transition references unknown state");
  };
  for (StateId q : children) check(q);
  check(to);
  TransKey key{symbol, children};
  auto [it, inserted] = delta_.emplace(std::move(key), to);
  if (!inserted && it->second != to)
    throw Error("nondeterministic transitions for " + symbol + ": targets " +
                states_[static_cast<std::size_t>(it->second)].name + " and " +
                states_[static_cast<std::size_t>(to)].name);
}

const StateInfo& Dta::state(StateId q) const {
  if (q < 0 || q >= state_count()) throw Error("unknown state id");
  return states_[static_cast<std::size_t>(q)];
}

std::optional<StateId> Dta::state_by_name(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<StateId> Dta::target(const std::string& symbol,
                                   const std::vector<StateId>& children) const {
  auto it = delta_.find(TransKey{symbol, children});
  if (it == delta_.end()) return std::nullopt;
  return it->second;
}

const std::set<StateId>& Dta::accepting() const {
  if (!accepting_) throw Error("automaton has no accepting set");
  return *accepting_;
}

bool Dta::is_accepting(StateId q) const { return accepting_ && accepting_->count(q) > 0; }

bool Dta::is_complete() const {
  std::size_t expected = 0;
  std::size_t n = static_cast<std::size_t>(state_count());
  for (const auto& [name, k] : sig_->symbols()) {
    std::size_t combos = 1;
    for (int i = 0; i < k; ++i) combos *= n;
    expected += combos;
  }
  return delta_.size() == expected;
}

int Dta::automaton_size() const {
  int sz = state_count();
  for (const auto& [key, to] : delta_) sz += static_cast<int>(key.second.size()) + 2;
  return sz;
}

std::optional<StateId> Dta::run(const Term& t, const std::map<int, StateId>& leaf_states) const {
  if (t.is_var()) {
    auto it = leaf_states.find(t.var_id());
    if (it == leaf_states.end())
      throw Error("run: variable " + t.label() + " has no assigned state");
    return it->second;
  }
  std::vector<StateId> child_states;
  child_states.reserve(static_cast<std::size_t>(t.arity()));
  for (const Term& c : t.children()) {
    auto q = run(c, leaf_states);
    if (!q) return std::nullopt;
    child_states.push_back(*q);
  }
  return target(t.label(), child_states);
}

std::string Dta::canonical_str() const {
  std::vector<StateId> order;
  for (const auto& [name, q] : by_name_) order.push_back(q);
  std::ostringstream os;
  os << "states";
  for (StateId q : order) os << ' ' << states_[static_cast<std::size_t>(q)].name;
  os << '\n';
  if (accepting_) {
    os << "accepting";
    std::vector<std::string> names;
    for (StateId q : *accepting_) names.push_back(states_[static_cast<std::size_t>(q)].name);
    std::sort(names.begin(), names.end());
    for (const auto& n : names) os << ' ' << n;
    os << '\n';
  }
  for (const auto& [key, to] : delta_) {
    os << key.first;
    if (!key.second.empty()) {
      os << '(';
      for (std::size_t i = 0; i < key.second.size(); ++i) {
        if (i) os << ',';
        os << states_[static_cast<std::size_t>(key.second[i])].name;
      }
      os << ')';
    }
    os << " -> " << states_[static_cast<std::size_t>(to)].name << '\n';
  }
  return os.str();
}

namespace {
void for_each_child_combo(int state_count, int k, std::vector<StateId>& combo,
                          const std::function<void(const std::vector<StateId>&)>& f) {
  if (static_cast<int>(combo.size()) == k) {
    f(combo);
    return;
  }
  for (StateId q = 0; q < state_count; ++q) {
    combo.push_back(q);
    for_each_child_combo(state_count, k, combo, f);
    combo.pop_back();
  }
}
}  // namespace

Dta complete(const Dta& a) {
  if (a.is_complete()) return a;
  Dta out = a;
  StateInfo sink;
  sink.kind = StateInfo::Kind::Sink;
  sink.sink = true;
  sink.name = "_sink";
  while (out.state_by_name(sink.name)) sink.name += "_";
  StateId qs = out.add_state(std::move(sink));
  for (const auto& [name, k] : out.sig().symbols()) {
    std::vector<StateId> combo;
    for_each_child_combo(out.state_count(), k, combo, [&](const std::vector<StateId>& cs) {
      if (!out.target(name, cs)) out.add_transition(name, cs, qs);
    });
  }
  return out;
}

Dta product(const std::vector<Dta>& as, std::vector<std::vector<StateId>>* components) {
  if (as.empty()) throw Error("product of zero automata");
  for (const Dta& a : as) {
    if (!(a.sig() == as.front().sig())) throw Error("product: incompatible signatures");
    if (!a.is_complete()) throw Error("product: factors must be complete");
  }
  Dta out(as.front().sig_ptr());
  // all tuples, lexicographic over factor state ids
  std::vector<std::vector<StateId>> tuples;
  std::vector<StateId> cur;
  std::function<void(std::size_t)> gen = [&](std::size_t i) {
    if (i == as.size()) {
      tuples.push_back(cur);
      return;
    }
    for (StateId q = 0; q < as[i].state_count(); ++q) {
      cur.push_back(q);
      gen(i + 1);
      cur.pop_back();
    }
  };
  gen(0);
  std::map<std::vector<StateId>, StateId> index;
  for (const auto& tup : tuples) {
    StateInfo info;
    info.kind = StateInfo::Kind::Tuple;
    info.tuple = tup;
    bool all_sink = true;
    std::ostringstream name;
    name << '<';
    for (std::size_t i = 0; i < tup.size(); ++i) {
      if (i) name << ',';
      name << as[i].state(tup[i]).name;
      all_sink = all_sink && as[i].state(tup[i]).sink;
    }
    name << '>';
    info.name = name.str();
    info.sink = all_sink;
    index[tup] = out.add_state(std::move(info));
  }
  for (const auto& [name, k] : out.sig().symbols()) {
    std::vector<StateId> combo;
    for_each_child_combo(out.state_count(), k, combo, [&](const std::vector<StateId>& cs) {
      std::vector<StateId> to_tuple;
      to_tuple.reserve(as.size());
      for (std::size_t i = 0; i < as.size(); ++i) {
        std::vector<StateId> child_states;
        child_states.reserve(cs.size());
        for (StateId c : cs) child_states.push_back(out.state(c).tuple[i]);
        auto t = as[i].target(name, child_states);
        if (!t) throw Error("product: factor not complete");
        to_tuple.push_back(*t);
      }
      out.add_transition(name, cs, index.at(to_tuple));
    });
  }
  if (components) {
    components->clear();
    for (StateId q = 0; q < out.state_count(); ++q) components->push_back(out.state(q).tuple);
  }
  return out;
}

std::set<StateId> non_empty_states(const Dta& a) {
  std::set<StateId> nonempty;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [key, to] : a.transitions()) {
      if (nonempty.count(to)) continue;
      bool ok = true;
      for (StateId c : key.second)
        if (!nonempty.count(c)) {
          ok = false;
          break;
        }
      if (ok) {
        nonempty.insert(to);
        changed = true;
      }
    }
  }
  return nonempty;
}

std::set<StateId> infinite_states(const Dta& a) {
  std::set<StateId> nonempty = non_empty_states(a);
  // support graph: edge child -> target for transitions whose children are
  // all non-empty
  std::map<StateId, std::set<StateId>> succ;
  for (const auto& [key, to] : a.transitions()) {
    bool ok = true;
    for (StateId c : key.second)
      if (!nonempty.count(c)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    for (StateId c : key.second) succ[c].insert(to);
  }
  // q is on a cycle iff q is reachable from some successor of q
  auto reach_from = [&](StateId start) {
    std::set<StateId> seen;
    std::queue<StateId> work;
    work.push(start);
    seen.insert(start);
    while (!work.empty()) {
      StateId q = work.front();
      work.pop();
      auto it = succ.find(q);
      if (it == succ.end()) continue;
      for (StateId nxt : it->second)
        if (seen.insert(nxt).second) work.push(nxt);
    }
    return seen;
  };
  std::set<StateId> out;
  for (StateId q = 0; q < a.state_count(); ++q) {
    auto it = succ.find(q);
    if (it == succ.end()) continue;
    for (StateId nxt : it->second) {
      std::set<StateId> r = reach_from(nxt);
      if (r.count(q)) {
        // everything reachable from the cycle member q is infinite
        for (StateId x : r) out.insert(x);
        out.insert(q);
        break;
      }
    }
  }
  // restrict to non-empty (support edges already guarantee it, but cheap)
  std::set<StateId> res;
  for (StateId q : out)
    if (nonempty.count(q)) res.insert(q);
  return res;
}

std::map<StateId, std::uint64_t> count_upto(const Dta& a, std::uint64_t k) {
  if (k < 1) throw Error("count_upto requires k >= 1");
  std::set<StateId> nonempty = non_empty_states(a);
  std::set<StateId> infinite = infinite_states(a);
  std::map<StateId, std::uint64_t> counts;
  for (StateId q = 0; q < a.state_count(); ++q) {
    if (!nonempty.count(q))
      counts[q] = 0;
    else if (infinite.count(q))
      counts[q] = k;
  }
  // remaining states have finite non-empty languages; their supports form a
  // DAG, so memoized recursion terminates
  std::function<std::uint64_t(StateId)> count = [&](StateId q) -> std::uint64_t {
    auto it = counts.find(q);
    if (it != counts.end()) return it->second;
    counts[q] = 0;  // placeholder; cycles impossible for finite states
    std::uint64_t total = 0;
    for (const auto& [key, to] : a.transitions()) {
      if (to != q) continue;
      std::uint64_t prod = 1;
      bool ok = true;
      for (StateId c : key.second) {
        if (!nonempty.count(c)) {
          ok = false;
          break;
        }
        std::uint64_t cc = count(c);
        prod = (cc > 0 && prod > k / cc) ? k : prod * cc;  // saturate at k
      }
      if (!ok) continue;
      total = std::min(k, total + prod);
    }
    counts[q] = std::min(k, total);
    return counts[q];
  };
  for (StateId q = 0; q < a.state_count(); ++q) count(q);
  return counts;
}

std::map<StateId, std::set<Term>> languages_up_to(const Dta& a, int max_height, std::size_t cap) {
  std::map<StateId, std::set<Term>> langs;
  std::size_t total = 0;
  // terms of height exactly h that reach each state
  std::vector<std::map<StateId, std::vector<Term>>> strata;
  std::map<StateId, std::vector<Term>> layer0;
  for (const auto& [key, to] : a.transitions())
    if (key.second.empty()) layer0[to].push_back(Term::symbol(key.first));
  strata.push_back(std::move(layer0));
  auto note = [&](std::map<StateId, std::vector<Term>>& layer, StateId q, Term t) {
    if (++total > cap)
      throw ResourceLimitError("languages_up_to: more than " + std::to_string(cap) + " terms");
    layer[q].push_back(std::move(t));
  };
  for (int h = 1; h <= max_height; ++h) {
    std::map<StateId, std::vector<Term>> layer;
    auto& prev = strata[static_cast<std::size_t>(h - 1)];
    // per-state terms of height < h-1
    std::map<StateId, std::vector<Term>> below;
    for (int g = 0; g + 1 < h; ++g)
      for (const auto& [q, ts] : strata[static_cast<std::size_t>(g)])
        below[q].insert(below[q].end(), ts.begin(), ts.end());
    for (const auto& [key, to] : a.transitions()) {
      const auto& [sym, cs] = key;
      if (cs.empty()) continue;
      if (cs.size() == 1) {
        auto it = prev.find(cs[0]);
        if (it == prev.end()) continue;
        for (const Term& c : it->second) note(layer, to, Term::symbol(sym, {c}));
      } else {
        auto* p0 = prev.count(cs[0]) ? &prev[cs[0]] : nullptr;
        auto* p1 = prev.count(cs[1]) ? &prev[cs[1]] : nullptr;
        auto* b0 = below.count(cs[0]) ? &below[cs[0]] : nullptr;
        auto* b1 = below.count(cs[1]) ? &below[cs[1]] : nullptr;
        if (p0 && p1)
          for (const Term& x : *p0)
            for (const Term& y : *p1) note(layer, to, Term::symbol(sym, {x, y}));
        if (p0 && b1)
          for (const Term& x : *p0)
            for (const Term& y : *b1) note(layer, to, Term::symbol(sym, {x, y}));
        if (b0 && p1)
          for (const Term& x : *b0)
            for (const Term& y : *p1) note(layer, to, Term::symbol(sym, {x, y}));
      }
    }
    strata.push_back(std::move(layer));
  }
  for (const auto& layer : strata)
    for (const auto& [q, ts] : layer) langs[q].insert(ts.begin(), ts.end());
  return langs;
}

std::set<Term> enumerate_language(const Dta& a, StateId q, int max_height, std::size_t cap) {
  auto langs = languages_up_to(a, max_height, cap);
  auto it = langs.find(q);
  return it == langs.end() ? std::set<Term>{} : it->second;
}

Dta complement(const Dta& a) {
  if (!a.has_accepting()) throw Error("complement requires an accepting set");
  Dta out = complete(a);
  std::set<StateId> flipped;
  for (StateId q = 0; q < out.state_count(); ++q)
    if (!out.is_accepting(q)) flipped.insert(q);
  out.set_accepting(std::move(flipped));
  return out;
}

std::map<StateId, Term> minimal_witnesses(const Dta& a) {
  std::map<StateId, Term> wit;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [key, to] : a.transitions()) {
      std::vector<Term> children;
      bool ok = true;
      for (StateId c : key.second) {
        auto it = wit.find(c);
        if (it == wit.end()) {
          ok = false;
          break;
        }
        children.push_back(it->second);
      }
      if (!ok) continue;
      Term t = Term::symbol(key.first, std::move(children));
      auto it = wit.find(to);
      if (it == wit.end() ||
          t.height() < it->second.height() ||
          (t.height() == it->second.height() && Term::compare(t, it->second) < 0)) {
        wit.insert_or_assign(to, std::move(t));
        changed = true;
      }
    }
  }
  return wit;
}

std::map<StateId, int> finite_language_max_heights(const Dta& a) {
  std::set<StateId> nonempty = non_empty_states(a);
  std::set<StateId> infinite = infinite_states(a);
  std::map<StateId, int> maxh;
  std::function<int(StateId)> get = [&](StateId q) -> int {
    auto it = maxh.find(q);
    if (it != maxh.end()) return it->second;
    int best = 0;
    for (const auto& [key, to] : a.transitions()) {
      if (to != q) continue;
      bool ok = true;
      int h = 0;
      for (StateId c : key.second) {
        if (!nonempty.count(c) || infinite.count(c)) {
          ok = false;
          break;
        }
        h = std::max(h, get(c) + 1);
      }
      if (ok) best = std::max(best, h);
    }
    maxh[q] = best;
    return best;
  };
  std::map<StateId, int> out;
  for (StateId q = 0; q < a.state_count(); ++q)
    if (nonempty.count(q) && !infinite.count(q)) out[q] = get(q);
  return out;
}

Term witness_with_height_at_least(const Dta& a, StateId q, int hmin) {
  std::map<StateId, Term> wit = minimal_witnesses(a);
  if (!wit.count(q)) throw Error("witness_with_height_at_least: empty language");
  if (wit.at(q).height() >= hmin) return wit.at(q);
  // tall[k][q] = term reaching q with height >= k
  std::map<StateId, Term> tall = wit;
  for (int k = 1; k <= hmin; ++k) {
    std::map<StateId, Term> next;
    for (const auto& [key, to] : a.transitions()) {
      if (next.count(to)) continue;
      // one child from the previous tall layer, the rest minimal
      for (std::size_t tall_at = 0; tall_at < key.second.size(); ++tall_at) {
        if (!tall.count(key.second[tall_at])) continue;
        std::vector<Term> children;
        bool ok = true;
        for (std::size_t i = 0; i < key.second.size(); ++i) {
          if (i == tall_at) {
            children.push_back(tall.at(key.second[i]));
          } else {
            auto it = wit.find(key.second[i]);
            if (it == wit.end()) {
              ok = false;
              break;
            }
            children.push_back(it->second);
          }
        }
        if (!ok) continue;
        next.emplace(to, Term::symbol(key.first, std::move(children)));
        break;
      }
    }
    tall = std::move(next);
  }
  auto it = tall.find(q);
  if (it == tall.end())
    throw Error("witness_with_height_at_least: state " + a.state(q).name +
                " has no member of height >= " + std::to_string(hmin));
  return it->second;
}

LanguageStream::LanguageStream(const Dta& a, StateId q, int gate, std::size_t cap)
    : a_(a), q_(q) {
  infinite_ = infinite_states(a).count(q) > 0;
  if (!infinite_) {
    // finite languages are fully materialized; all members have height < |Q|
    auto langs = enumerate_language(a, q, a.state_count(), cap);
    bounded_.assign(langs.begin(), langs.end());
  } else {
    auto langs = enumerate_language(a, q, gate, cap);
    bounded_.assign(langs.begin(), langs.end());
  }
  std::sort(bounded_.begin(), bounded_.end(), [](const Term& x, const Term& y) {
    if (x.height() != y.height()) return x.height() < y.height();
    return Term::compare(x, y) < 0;
  });
  next_height_ = bounded_.empty() ? 1 : bounded_.back().height() + 1;
}

std::optional<Term> LanguageStream::next() {
  if (idx_ < bounded_.size()) return bounded_[idx_++];
  if (!infinite_) return std::nullopt;
  // pumped witnesses of strictly increasing height are pairwise distinct
  Term t = witness_with_height_at_least(a_, q_, next_height_);
  next_height_ = t.height() + 1;
  return t;
}

}  // namespace treg
