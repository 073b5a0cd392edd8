#ifndef TREG_TERM_HPP
#define TREG_TERM_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace treg {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a configured cap (enumeration size, branch fan-out, ...)
/// would be exceeded. The message names the offending construction.
struct ResourceLimitError : Error {
  using Error::Error;
};

/// A ranked alphabet. After ingestion every arity is at most 2; see
/// binarize() in problem.hpp for how larger arities are encoded.
class Signature {
 public:
  Signature() = default;

  void add(const std::string& name, int arity);
  bool has(const std::string& name) const;
  int arity(const std::string& name) const;  // throws on unknown symbol

  const std::vector<std::pair<std::string, int>>& symbols() const { return symbols_; }
  std::vector<std::string> constants() const;
  int max_arity() const;

  bool operator==(const Signature& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::pair<std::string, int>> symbols_;  // declaration order
  std::map<std::string, int> arity_;
};

/// A path from the root: 1-based child indices. The empty vector is the root.
using Position = std::vector<int>;

std::string to_string(const Position& p);

/// Declared variable with a printable name and a provenance note for
/// diagnostics. Ids are handed out by a monotone counter in VarTable.
struct VarDecl {
  int id = -1;
  std::string name;
  std::string origin;  // e.g. "problem", "single:x", "determine:..."
};

/// Owns variable identities for one problem instance. Fresh variables never
/// reuse an id, so terms created at different pipeline stages cannot clash.
class VarTable {
 public:
  int fresh(const std::string& name, const std::string& origin);
  const VarDecl& decl(int id) const;
  int size() const { return static_cast<int>(decls_.size()); }
  std::optional<int> find(const std::string& name) const;

 private:
  std::vector<VarDecl> decls_;
  std::map<std::string, int> by_name_;
};

/// An immutable term over a ranked alphabet with variable leaves.
/// Copies share structure; equality and hashing are structural
/// (variables compare by id).
class Term {
 public:
  Term() = default;  // empty handle; only valid after assignment

  static Term symbol(std::string name, std::vector<Term> children = {});
  static Term var(int id, std::string name);

  bool is_var() const { return node_->var_id >= 0; }
  int var_id() const { return node_->var_id; }
  const std::string& label() const { return node_->label; }
  const std::vector<Term>& children() const { return node_->children; }
  int arity() const { return static_cast<int>(node_->children.size()); }

  int size() const { return node_->size; }
  int height() const { return node_->height; }

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }
  /// Total order: size, then variables before symbols, then label/id,
  /// then children lexicographically.
  bool operator<(const Term& other) const { return compare(*this, other) < 0; }

  static int compare(const Term& a, const Term& b);

  /// Printed form, e.g. "f(g(a,x),b)". Parsing it back (see problem.hpp)
  /// yields an equal term.
  std::string str() const;

  /// Identity of the shared node, usable as a memoization key.
  const void* node_key() const { return node_.get(); }

 private:
  struct Node {
    std::string label;      // symbol name, or variable name
    int var_id = -1;        // >= 0 for variable leaves
    std::vector<Term> children;
    int size = 1;
    int height = 0;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Finite map from variable ids to replacement terms.
using Substitution = std::map<int, Term>;

struct Measure {
  int size = 0;
  int height = 0;
  std::set<Position> pos;
  std::set<Position> posv;   // variable positions
  std::set<Position> posnv;  // non-variable positions
};

/// Size, height and the position sets of a term in one pass.
Measure measure(const Term& t);

std::set<Position> positions(const Term& t);
std::set<Position> var_positions(const Term& t);
std::set<Position> nonvar_positions(const Term& t);

/// Set of variable ids occurring in t.
std::set<int> vars(const Term& t);
/// True if no variable occurs twice.
bool is_linear(const Term& t);
/// Variable ids occurring at least twice.
std::set<int> duplicated_vars(const Term& t);

bool is_position_of(const Term& t, const Position& p);

/// Subterm at p. Throws Error if p is not a position of t.
Term subterm(const Term& t, const Position& p);

/// t with the subterm at p replaced by u. Throws Error if p is invalid.
Term replace(const Term& t, const Position& p, const Term& u);

/// Prefix closure: every p with some extension in P, including P itself
/// and the root when P is non-empty.
std::set<Position> prefixes(const std::set<Position>& ps);

/// Homomorphic application; unmapped variables pass through.
Term apply(const Substitution& phi, const Term& t);

/// Rewrites t over a signature with arities above 2 into a term over the
/// binarized signature (see binarize_signature). Terms that are already
/// binary are returned unchanged.
Term encode_binary(const Signature& sig, const Term& t);
/// Inverse of encode_binary.
Term decode_binary(const Signature& sig, const Term& t);
/// The binarized signature: arities 0..2 kept, each symbol of arity k > 2
/// replaced by a right comb of fresh binary symbols "name#2".."name#k-1".
Signature binarize_signature(const Signature& sig);

/// All ground terms of height at most max_height, grouped by height.
/// Throws ResourceLimitError when more than cap terms would be produced.
std::vector<std::vector<Term>> enumerate_terms_by_height(const Signature& sig, int max_height,
                                                         std::size_t cap = 100000);

}  // namespace treg

#endif
