#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tropa {

// Reserved letter naming the hole of a context. Never part of a user alphabet.
inline const std::string kHoleName = "□";  // □

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Finite set of letters, each with a fixed rank.
class RankedAlphabet {
 public:
  RankedAlphabet() = default;

  void add_letter(const std::string& name, int rank);
  bool contains(const std::string& name) const { return letters_.count(name) != 0; }
  int rank(const std::string& name) const;
  const std::map<std::string, int>& letters() const { return letters_; }

  bool has_nullary_letter() const;
  // One rank-0 letter, everything else rank 1 (the word-as-unary-tree shape).
  bool is_unary_word_alphabet() const;

  // One "name/rank" entry per line; '#' starts a comment.
  static RankedAlphabet parse_lines(std::string_view text);

  friend bool operator==(const RankedAlphabet&, const RankedAlphabet&) = default;

 private:
  std::map<std::string, int> letters_;
};

/// Immutable ranked tree. Rank conformance against an alphabet is checked at
/// the points where terms are built from text or fed to automata, not here.
class Term {
 public:
  explicit Term(std::string letter, std::vector<Term> children = {})
      : letter_(std::move(letter)), children_(std::move(children)) {}

  const std::string& letter() const { return letter_; }
  const std::vector<Term>& children() const { return children_; }

  int height() const;       // single leaf has height 0
  int size() const;         // number of nodes
  int hole_count() const;   // occurrences of the reserved hole letter
  bool is_hole() const { return letter_ == kHoleName; }

  std::string str() const;

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  std::string letter_;
  std::vector<Term> children_;
};

inline bool operator<(const Term& a, const Term& b) { return (a <=> b) == std::strong_ordering::less; }

// Sequence of child indices from the root.
using NodePath = std::vector<int>;

const Term& subterm_at(const Term& t, const NodePath& path);
Term replace_at(const Term& t, const NodePath& path, const Term& replacement);
bool conforms(const RankedAlphabet& alphabet, const Term& t);

/// A term with exactly one hole.
class Context {
 public:
  static Context hole() { return Context(Term(kHoleName)); }
  explicit Context(Term skeleton);

  const Term& skeleton() const { return skeleton_; }
  const NodePath& hole_path() const { return hole_path_; }
  bool empty() const { return skeleton_.is_hole(); }
  int height() const { return skeleton_.height(); }
  int size() const { return skeleton_.size(); }
  std::string str() const { return skeleton_.str(); }

  friend bool operator==(const Context&, const Context&) = default;
  friend bool operator<(const Context& a, const Context& b) { return a.skeleton_ < b.skeleton_; }

 private:
  Term skeleton_;
  NodePath hole_path_;
};

// Plugging: the hole of c is replaced by t.
Term compose(const Context& c, const Term& t);
Context compose(const Context& c, const Context& d);

// The context obtained from t by carving a hole at `path`.
Context context_at(const Term& t, const NodePath& path);
// The slice of t between two nodes on one branch: the subterm at `upper`
// with the subterm at `lower` replaced by the hole. `lower` must extend `upper`.
Context slice_context(const Term& t, const NodePath& upper, const NodePath& lower);

// Every term (context) of height <= max_height, exactly once, in a fixed
// order: height-major, then by letter name, then lexicographically by child
// tuple (children indexed in enumeration order; the hole precedes the rank-0
// letters). The order is part of the contract so oracle output is reproducible.
std::vector<Term> enumerate_terms(const RankedAlphabet& alphabet, int max_height);
std::vector<Context> enumerate_contexts(const RankedAlphabet& alphabet, int max_height);

// Text format: letter(child,...,child), letter() for rank 0, □ for the hole.
// Whitespace is insignificant.
Term parse_term(const RankedAlphabet& alphabet, std::string_view text);
Context parse_context(const RankedAlphabet& alphabet, std::string_view text);

}  // namespace tropa
