#include "treg/term.hpp"

#include <algorithm>
#include <sstream>

namespace treg {

void Signature::add(const std::string& name, int arity) {
  if (arity < 0) throw Error("negative arity for symbol " + name);
  if (arity_.count(name)) throw Error("duplicate symbol: " + name);
  symbols_.emplace_back(name, arity);
  arity_[name] = arity;
}

bool Signature::has(const std::string& name) const { return arity_.count(name) > 0; }

int Signature::arity(const std::string& name) const {
  auto it = arity_.find(name);
  if (it == arity_.end()) throw Error("unknown symbol: " + name);
  return it->second;
}

std::vector<std::string> Signature::constants() const {
  std::vector<std::string> out;
  for (const auto& [name, k] : symbols_)
    if (k == 0) out.push_back(name);
  return out;
}

int Signature::max_arity() const {
  int m = 0;
  for (const auto& [name, k] : symbols_) m = std::max(m, k);
  return m;
}

std::string to_string(const Position& p) {
  if (p.empty()) return "e";
  std::ostringstream os;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << '.';
    os << p[i];
  }
  return os.str();
}

int VarTable::fresh(const std::string& name, const std::string& origin) {
  int id = static_cast<int>(decls_.size());
  std::string unique = name;
  if (by_name_.count(unique)) unique = name + "_" + std::to_string(id);
  decls_.push_back(VarDecl{id, unique, origin});
  by_name_[unique] = id;
  return id;
}

const VarDecl& VarTable::decl(int id) const {
  if (id < 0 || id >= static_cast<int>(decls_.size())) throw Error("unknown variable id");
  return decls_[static_cast<std::size_t>(id)];
}

std::optional<int> VarTable::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

Term Term::symbol(std::string name, std::vector<Term> children) {
  auto n = std::make_shared<Node>();
  n->label = std::move(name);
  n->children = std::move(children);
  int size = 1, height = 0;
  for (const Term& c : n->children) {
    size += c.size();
    height = std::max(height, c.height() + 1);
  }
  n->size = size;
  n->height = height;
  return Term(std::move(n));
}

Term Term::var(int id, std::string name) {
  if (id < 0) throw Error("variable id must be non-negative");
  auto n = std::make_shared<Node>();
  n->label = std::move(name);
  n->var_id = id;
  return Term(std::move(n));
}

bool Term::operator==(const Term& other) const {
  if (node_ == other.node_) return true;
  if (is_var() != other.is_var()) return false;
  if (is_var()) return var_id() == other.var_id();
  if (label() != other.label() || arity() != other.arity()) return false;
  for (int i = 0; i < arity(); ++i)
    if (!(children()[static_cast<std::size_t>(i)] == other.children()[static_cast<std::size_t>(i)]))
      return false;
  return true;
}

int Term::compare(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return 0;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
  if (a.is_var()) return a.var_id() < b.var_id() ? -1 : (a.var_id() == b.var_id() ? 0 : 1);
  if (int c = a.label().compare(b.label()); c != 0) return c < 0 ? -1 : 1;
  if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
  for (int i = 0; i < a.arity(); ++i) {
    int c = compare(a.children()[static_cast<std::size_t>(i)],
                    b.children()[static_cast<std::size_t>(i)]);
    if (c != 0) return c;
  }
  return 0;
}

namespace {
void print_term(const Term& t, std::ostream& os) {
  os << t.label();
  if (t.arity() > 0) {
    os << '(';
    for (int i = 0; i < t.arity(); ++i) {
      if (i) os << ',';
      print_term(t.children()[static_cast<std::size_t>(i)], os);
    }
    os << ')';
  }
}
}  // namespace

std::string Term::str() const {
  std::ostringstream os;
  print_term(*this, os);
  return os.str();
}

namespace {
void collect_positions(const Term& t, Position& here, Measure& m) {
  m.pos.insert(here);
  if (t.is_var())
    m.posv.insert(here);
  else
    m.posnv.insert(here);
  for (int i = 0; i < t.arity(); ++i) {
    here.push_back(i + 1);
    collect_positions(t.children()[static_cast<std::size_t>(i)], here, m);
    here.pop_back();
  }
}
}  // namespace

Measure measure(const Term& t) {
  Measure m;
  m.size = t.size();
  m.height = t.height();
  Position here;
  collect_positions(t, here, m);
  return m;
}

std::set<Position> positions(const Term& t) { return measure(t).pos; }
std::set<Position> var_positions(const Term& t) { return measure(t).posv; }
std::set<Position> nonvar_positions(const Term& t) { return measure(t).posnv; }

namespace {
void collect_vars(const Term& t, std::map<int, int>& counts) {
  if (t.is_var()) {
    ++counts[t.var_id()];
    return;
  }
  for (const Term& c : t.children()) collect_vars(c, counts);
}
}  // namespace

std::set<int> vars(const Term& t) {
  std::map<int, int> counts;
  collect_vars(t, counts);
  std::set<int> out;
  for (const auto& [id, n] : counts) out.insert(id);
  return out;
}

bool is_linear(const Term& t) { return duplicated_vars(t).empty(); }

std::set<int> duplicated_vars(const Term& t) {
  std::map<int, int> counts;
  collect_vars(t, counts);
  std::set<int> out;
  for (const auto& [id, n] : counts)
    if (n >= 2) out.insert(id);
  return out;
}

bool is_position_of(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (int i : p) {
    if (i < 1 || i > cur->arity()) return false;
    cur = &cur->children()[static_cast<std::size_t>(i - 1)];
  }
  return true;
}

Term subterm(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (int i : p) {
    if (i < 1 || i > cur->arity())
      throw Error("invalid position " + to_string(p) + " in " + t.str());
    cur = &cur->children()[static_cast<std::size_t>(i - 1)];
  }
  return *cur;
}

Term replace(const Term& t, const Position& p, const Term& u) {
  if (p.empty()) return u;
  int i = p.front();
  if (i < 1 || i > t.arity())
    throw Error("invalid position " + to_string(p) + " in " + t.str());
  std::vector<Term> children = t.children();
  Position rest(p.begin() + 1, p.end());
  children[static_cast<std::size_t>(i - 1)] =
      replace(children[static_cast<std::size_t>(i - 1)], rest, u);
  return Term::symbol(t.label(), std::move(children));
}

std::set<Position> prefixes(const std::set<Position>& ps) {
  std::set<Position> out;
  for (const Position& p : ps)
    for (std::size_t len = 0; len <= p.size(); ++len)
      out.insert(Position(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(len)));
  return out;
}

Term apply(const Substitution& phi, const Term& t) {
  if (t.is_var()) {
    auto it = phi.find(t.var_id());
    return it == phi.end() ? t : it->second;
  }
  if (t.arity() == 0) return t;
  std::vector<Term> children;
  children.reserve(static_cast<std::size_t>(t.arity()));
  bool changed = false;
  for (const Term& c : t.children()) {
    children.push_back(apply(phi, c));
    changed = changed || !(children.back() == c);
  }
  if (!changed) return t;
  return Term::symbol(t.label(), std::move(children));
}

namespace {
std::string comb_symbol(const std::string& name, int i) {
  return name + "#" + std::to_string(i);
}
}  // namespace

Signature binarize_signature(const Signature& sig) {
  if (sig.max_arity() <= 2) return sig;
  Signature out;
  for (const auto& [name, k] : sig.symbols()) {
    if (k <= 2) {
      out.add(name, k);
    } else {
      // f(t1,..,tk) becomes f(t1, f#2(t2, .. f#k-1(t_{k-1}, tk)..)).
      out.add(name, 2);
      for (int i = 2; i < k; ++i) out.add(comb_symbol(name, i), 2);
    }
  }
  return out;
}

namespace {
Term encode_rec(const Signature& sig, const Term& t) {
  if (t.is_var()) return t;
  int k = sig.arity(t.label());
  std::vector<Term> enc;
  enc.reserve(static_cast<std::size_t>(k));
  for (const Term& c : t.children()) enc.push_back(encode_rec(sig, c));
  if (k <= 2) return Term::symbol(t.label(), std::move(enc));
  Term acc = Term::symbol(comb_symbol(t.label(), k - 1),
                          {enc[static_cast<std::size_t>(k - 2)], enc[static_cast<std::size_t>(k - 1)]});
  for (int i = k - 2; i >= 2; --i)
    acc = Term::symbol(comb_symbol(t.label(), i), {enc[static_cast<std::size_t>(i - 1)], acc});
  return Term::symbol(t.label(), {enc[0], acc});
}

Term decode_rec(const Signature& sig, const Term& t) {
  if (t.is_var()) return t;
  int k = sig.arity(t.label());
  if (k <= 2) {
    std::vector<Term> children;
    for (const Term& c : t.children()) children.push_back(decode_rec(sig, c));
    return Term::symbol(t.label(), std::move(children));
  }
  std::vector<Term> children;
  children.push_back(decode_rec(sig, t.children()[0]));
  Term cur = t.children()[1];
  for (int i = 2; i < k; ++i) {
    if (cur.is_var() || cur.label() != comb_symbol(t.label(), i))
      throw Error("malformed binary encoding at " + cur.str());
    children.push_back(decode_rec(sig, cur.children()[0]));
    cur = cur.children()[1];
  }
  children.push_back(decode_rec(sig, cur));
  return Term::symbol(t.label(), std::move(children));
}
}  // namespace

Term encode_binary(const Signature& sig, const Term& t) {
  if (sig.max_arity() <= 2) return t;
  return encode_rec(sig, t);
}

Term decode_binary(const Signature& sig, const Term& t) {
  if (sig.max_arity() <= 2) return t;
  return decode_rec(sig, t);
}

std::vector<std::vector<Term>> enumerate_terms_by_height(const Signature& sig, int max_height,
                                                         std::size_t cap) {
  std::vector<std::vector<Term>> strata;  // strata[h] = terms of height exactly h
  std::size_t total = 0;
  auto emit = [&](std::vector<Term>& layer, Term t) {
    if (++total > cap)
      throw ResourceLimitError("enumerate_terms_by_height: more than " + std::to_string(cap) +
                               " terms of height <= " + std::to_string(max_height));
    layer.push_back(std::move(t));
  };
  std::vector<Term> consts;
  for (const std::string& c : sig.constants()) emit(consts, Term::symbol(c));
  strata.push_back(std::move(consts));
  std::vector<Term> below;  // heights < current
  for (int h = 1; h <= max_height; ++h) {
    const std::vector<Term>& prev = strata.back();
    std::vector<Term> layer;
    for (const auto& [name, k] : sig.symbols()) {
      if (k == 0) continue;
      if (k == 1) {
        for (const Term& c : prev) emit(layer, Term::symbol(name, {c}));
      } else {
        // at least one child of height h-1
        for (const Term& a : prev)
          for (const Term& b : prev) emit(layer, Term::symbol(name, {a, b}));
        for (const Term& a : prev)
          for (const Term& b : below) {
            emit(layer, Term::symbol(name, {a, b}));
            emit(layer, Term::symbol(name, {b, a}));
          }
      }
    }
    below.insert(below.end(), prev.begin(), prev.end());
    strata.push_back(std::move(layer));
  }
  for (auto& layer : strata) std::sort(layer.begin(), layer.end());
  return strata;
}

}  // namespace treg
