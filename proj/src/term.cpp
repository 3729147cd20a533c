#include "tropa/term.hpp"

#include <algorithm>
#include <cctype>

namespace tropa {

void RankedAlphabet::add_letter(const std::string& name, int rank) {
  if (name.empty()) throw std::invalid_argument("letter name must be non-empty");
  if (name == kHoleName) throw std::invalid_argument("'" + kHoleName + "' is reserved for the hole");
  if (rank < 0) throw std::invalid_argument("negative rank for letter '" + name + "'");
  for (char c : name)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',' ||
        c == '/' || c == '#')
      throw std::invalid_argument("illegal character in letter name '" + name + "'");
  if (!letters_.emplace(name, rank).second)
    throw std::invalid_argument("duplicate letter '" + name + "'");
}

int RankedAlphabet::rank(const std::string& name) const {
  auto it = letters_.find(name);
  if (it == letters_.end()) throw std::invalid_argument("unknown letter '" + name + "'");
  return it->second;
}

bool RankedAlphabet::has_nullary_letter() const {
  return std::any_of(letters_.begin(), letters_.end(), [](const auto& e) { return e.second == 0; });
}

bool RankedAlphabet::is_unary_word_alphabet() const {
  int nullary = 0;
  for (const auto& [name, rank] : letters_) {
    if (rank == 0)
      ++nullary;
    else if (rank != 1)
      return false;
  }
  return nullary == 1;
}

RankedAlphabet RankedAlphabet::parse_lines(std::string_view text) {
  RankedAlphabet out;
  std::size_t pos = 0, line_start = 0;
  while (line_start <= text.size()) {
    std::size_t eol = text.find('\n', line_start);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(line_start, eol - line_start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t b = 0, e = line.size();
    while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
    if (b < e) {
      std::string_view entry = line.substr(b, e - b);
      auto slash = entry.rfind('/');
      if (slash == std::string_view::npos)
        throw ParseError("expected 'name/rank'", line_start + b);
      std::string name(entry.substr(0, slash));
      std::string rank_text(entry.substr(slash + 1));
      if (rank_text.empty() ||
          !std::all_of(rank_text.begin(), rank_text.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw ParseError("malformed rank in '" + std::string(entry) + "'", line_start + b);
      out.add_letter(name, std::stoi(rank_text));
    }
    line_start = eol + 1;
    pos = line_start;
  }
  (void)pos;
  if (!out.has_nullary_letter())
    throw std::invalid_argument("alphabet has no rank-0 letter, so no terms exist");
  return out;
}

int Term::height() const {
  int h = 0;
  for (const Term& c : children_) h = std::max(h, c.height() + 1);
  return h;
}

int Term::size() const {
  int n = 1;
  for (const Term& c : children_) n += c.size();
  return n;
}

int Term::hole_count() const {
  int n = is_hole() ? 1 : 0;
  for (const Term& c : children_) n += c.hole_count();
  return n;
}

std::string Term::str() const {
  if (is_hole()) return kHoleName;
  std::string out = letter_;
  out += '(';
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (i) out += ',';
    out += children_[i].str();
  }
  out += ')';
  return out;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (auto c = a.letter_ <=> b.letter_; c != 0) return c;
  return a.children_ <=> b.children_;
}

const Term& subterm_at(const Term& t, const NodePath& path) {
  const Term* cur = &t;
  for (int i : path) {
    if (i < 0 || static_cast<std::size_t>(i) >= cur->children().size())
      throw std::out_of_range("node path leaves the term");
    cur = &cur->children()[i];
  }
  return *cur;
}

Term replace_at(const Term& t, const NodePath& path, const Term& replacement) {
  if (path.empty()) return replacement;
  if (path.front() < 0 || static_cast<std::size_t>(path.front()) >= t.children().size())
    throw std::out_of_range("node path leaves the term");
  std::vector<Term> children = t.children();
  NodePath rest(path.begin() + 1, path.end());
  children[path.front()] = replace_at(children[path.front()], rest, replacement);
  return Term(t.letter(), std::move(children));
}

bool conforms(const RankedAlphabet& alphabet, const Term& t) {
  if (!alphabet.contains(t.letter())) return false;
  if (alphabet.rank(t.letter()) != static_cast<int>(t.children().size())) return false;
  return std::all_of(t.children().begin(), t.children().end(),
                     [&](const Term& c) { return conforms(alphabet, c); });
}

namespace {

bool find_hole(const Term& t, NodePath& path) {
  if (t.is_hole()) return true;
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    path.push_back(static_cast<int>(i));
    if (find_hole(t.children()[i], path)) return true;
    path.pop_back();
  }
  return false;
}

}  // namespace

Context::Context(Term skeleton) : skeleton_(std::move(skeleton)) {
  if (skeleton_.hole_count() != 1)
    throw std::invalid_argument("a context must contain exactly one hole, got " +
                                std::to_string(skeleton_.hole_count()));
  find_hole(skeleton_, hole_path_);
}

Term compose(const Context& c, const Term& t) {
  if (t.hole_count() != 0) throw std::invalid_argument("plugging a holed term; use the context overload");
  return replace_at(c.skeleton(), c.hole_path(), t);
}

Context compose(const Context& c, const Context& d) {
  return Context(replace_at(c.skeleton(), c.hole_path(), d.skeleton()));
}

Context context_at(const Term& t, const NodePath& path) {
  subterm_at(t, path);  // bounds check
  return Context(replace_at(t, path, Term(kHoleName)));
}

Context slice_context(const Term& t, const NodePath& upper, const NodePath& lower) {
  if (lower.size() <= upper.size() || !std::equal(upper.begin(), upper.end(), lower.begin()))
    throw std::invalid_argument("slice_context: lower node must lie strictly below upper");
  NodePath rel(lower.begin() + upper.size(), lower.end());
  return context_at(subterm_at(t, upper), rel);
}

namespace {

// Shared enumerator for terms and contexts: height-major levels built over
// the cumulative list of smaller trees (with at most one hole when enabled).
std::vector<Term> enumerate_skeletons(const RankedAlphabet& alphabet, int max_height,
                                      bool with_hole) {
  std::vector<Term> all;        // cumulative, enumeration order
  std::vector<int> holes;       // hole count per entry
  std::vector<int> heights;
  if (max_height < 0) return all;

  if (with_hole) {
    all.emplace_back(Term(kHoleName));
    holes.push_back(1);
    heights.push_back(0);
  }
  for (const auto& [name, rank] : alphabet.letters()) {
    if (rank == 0) {
      all.emplace_back(Term(name));
      holes.push_back(0);
      heights.push_back(0);
    }
  }

  std::size_t level_begin = 0, level_end = all.size();
  for (int h = 1; h <= max_height; ++h) {
    std::size_t known = level_end;  // trees of height <= h-1
    if (known == 0) break;
    for (const auto& [name, rank] : alphabet.letters()) {
      if (rank == 0) continue;
      std::vector<std::size_t> idx(rank, 0);
      while (true) {
        int hole_total = 0, tallest = 0;
        for (int i = 0; i < rank; ++i) {
          hole_total += holes[idx[i]];
          tallest = std::max(tallest, heights[idx[i]]);
        }
        if (tallest == h - 1 && hole_total <= (with_hole ? 1 : 0)) {
          std::vector<Term> children;
          children.reserve(rank);
          for (int i = 0; i < rank; ++i) children.push_back(all[idx[i]]);
          all.emplace_back(Term(name, std::move(children)));
          holes.push_back(hole_total);
          heights.push_back(h);
        }
        int j = rank - 1;
        while (j >= 0 && ++idx[j] == known) idx[j--] = 0;
        if (j < 0) break;
      }
    }
    level_begin = level_end;
    level_end = all.size();
    if (level_begin == level_end) break;  // nothing taller exists
  }
  return all;
}

}  // namespace

std::vector<Term> enumerate_terms(const RankedAlphabet& alphabet, int max_height) {
  return enumerate_skeletons(alphabet, max_height, false);
}

std::vector<Context> enumerate_contexts(const RankedAlphabet& alphabet, int max_height) {
  std::vector<Context> out;
  for (Term& t : enumerate_skeletons(alphabet, max_height, true))
    if (t.hole_count() == 1) out.emplace_back(Context(std::move(t)));
  return out;
}

namespace {

class TermParser {
 public:
  TermParser(const RankedAlphabet& alphabet, std::string_view text, bool allow_holes)
      : alphabet_(alphabet), text_(text), allow_holes_(allow_holes) {}

  Term parse() {
    Term t = parse_node();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing input after term", pos_);
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ',' || std::isspace(static_cast<unsigned char>(c));
  }

  std::string read_name() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delim(text_[pos_])) ++pos_;
    if (pos_ == start) throw ParseError("expected a letter", pos_);
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  Term parse_node() {
    std::size_t name_pos = pos_;
    std::string name = read_name();
    if (name == kHoleName) {
      if (!allow_holes_) throw ParseError("hole not allowed in a term", name_pos);
      return Term(kHoleName);
    }
    if (!alphabet_.contains(name))
      throw ParseError("unknown letter '" + name + "'", name_pos);
    int rank = alphabet_.rank(name);
    expect('(');
    std::vector<Term> children;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ')') {
      ++pos_;
    } else {
      while (true) {
        children.push_back(parse_node());
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        expect(')');
        break;
      }
    }
    if (static_cast<int>(children.size()) != rank)
      throw ParseError("arity mismatch: letter '" + name + "' has rank " + std::to_string(rank) +
                           " but " + std::to_string(children.size()) + " children were given",
                       name_pos);
    return Term(std::move(name), std::move(children));
  }

  const RankedAlphabet& alphabet_;
  std::string_view text_;
  bool allow_holes_;
  std::size_t pos_ = 0;
};

}  // namespace

Term parse_term(const RankedAlphabet& alphabet, std::string_view text) {
  return TermParser(alphabet, text, false).parse();
}

Context parse_context(const RankedAlphabet& alphabet, std::string_view text) {
  Term skeleton = TermParser(alphabet, text, true).parse();
  if (skeleton.hole_count() != 1)
    throw ParseError("a context needs exactly one hole, got " +
                         std::to_string(skeleton.hole_count()),
                     0);
  return Context(std::move(skeleton));
}

}  // namespace tropa
