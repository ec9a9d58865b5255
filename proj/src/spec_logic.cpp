#include "distcert/spec_logic.hpp"

#include "distcert/errors.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace distcert {

void Nba::validate() const {
  if (num_states <= 0) throw SemanticError("NBA has no states");
  if (initial < 0 || initial >= num_states)
    throw SemanticError("NBA initial state out of range");
  if (static_cast<int>(accepting.size()) != num_states)
    throw SemanticError("NBA accepting vector size mismatch");
  if (static_cast<int>(delta.size()) != num_states)
    throw SemanticError("NBA delta size mismatch");
  for (const auto& row : delta) {
    if (row.size() != num_letters())
      throw SemanticError("NBA delta is not total over letters");
    for (const auto& succs : row)
      for (int q : succs)
        if (q < 0 || q >= num_states)
          throw SemanticError("NBA delta target out of range");
  }
}

// ---------------------------------------------------------------------------
// Affine atom parsing

namespace {

struct LinExpr {
  std::vector<Rational> coeffs;
  Rational offset;
};

// Parses a sum of terms: [+-] (rational ['*' Vk] | Vk)
LinExpr parse_linexpr(const std::string& s, std::size_t& pos, std::size_t n) {
  LinExpr e;
  e.coeffs.assign(n, Rational(0));
  auto skip_ws = [&] {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  };
  bool expect_term = true;
  Rational sign = 1;
  while (true) {
    skip_ws();
    if (pos >= s.size()) break;
    char c = s[pos];
    if (c == '+' || c == '-') {
      sign *= (c == '-') ? -1 : 1;
      ++pos;
      expect_term = true;
      continue;
    }
    if (!expect_term) break; // relational operator or junk; caller decides
    if (c == 'V') {
      ++pos;
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
        ++pos;
      if (start == pos)
        throw SemanticError("atom '" + s + "': expected index after V");
      std::size_t idx = std::stoul(s.substr(start, pos - start));
      if (idx >= n)
        throw SemanticError("atom '" + s + "': V" + std::to_string(idx) +
                            " out of range for " + std::to_string(n) +
                            " states");
      e.coeffs[idx] += sign;
      sign = 1;
      expect_term = false;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[pos])) ||
              s[pos] == '.' || s[pos] == '/'))
        ++pos;
      auto r = parse_rational(s.substr(start, pos - start));
      if (!r) throw SemanticError("atom '" + s + "': bad number");
      skip_ws();
      if (pos < s.size() && s[pos] == '*') {
        ++pos;
        skip_ws();
        if (pos >= s.size() || s[pos] != 'V')
          throw SemanticError("atom '" + s + "': expected V after *");
        ++pos;
        std::size_t vstart = pos;
        while (pos < s.size() &&
               std::isdigit(static_cast<unsigned char>(s[pos])))
          ++pos;
        if (vstart == pos)
          throw SemanticError("atom '" + s + "': expected index after V");
        std::size_t idx = std::stoul(s.substr(vstart, pos - vstart));
        if (idx >= n)
          throw SemanticError("atom '" + s + "': V" + std::to_string(idx) +
                              " out of range");
        e.coeffs[idx] += sign * *r;
      } else {
        e.offset += sign * *r;
      }
      sign = 1;
      expect_term = false;
      continue;
    }
    break;
  }
  if (expect_term)
    throw SemanticError("atom '" + s + "': expected a term");
  return e;
}

} // namespace

AffineAtom parse_affine_atom(const std::string& text, std::size_t n) {
  std::size_t pos = 0;
  LinExpr lhs = parse_linexpr(text, pos, n);
  auto skip_ws = [&] {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  };
  skip_ws();
  if (pos >= text.size())
    throw SemanticError("atom '" + text + "': missing relation");
  std::string op;
  while (pos < text.size() &&
         (text[pos] == '<' || text[pos] == '>' || text[pos] == '='))
    op += text[pos++];
  AtomRel rel;
  bool flip = false;
  if (op == ">=") rel = AtomRel::Geq;
  else if (op == ">") rel = AtomRel::Gt;
  else if (op == "<=") { rel = AtomRel::Geq; flip = true; }
  else if (op == "<") { rel = AtomRel::Gt; flip = true; }
  else if (op == "=" || op == "==") rel = AtomRel::Eq;
  else
    throw SemanticError("atom '" + text + "': unsupported relation '" + op +
                        "'");
  LinExpr rhs = parse_linexpr(text, pos, n);
  skip_ws();
  if (pos != text.size())
    throw SemanticError("atom '" + text + "': trailing input at position " +
                        std::to_string(pos));
  AffineAtom atom;
  atom.coeffs.assign(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i)
    atom.coeffs[i] = flip ? rhs.coeffs[i] - lhs.coeffs[i]
                          : lhs.coeffs[i] - rhs.coeffs[i];
  atom.offset = flip ? rhs.offset - lhs.offset : lhs.offset - rhs.offset;
  atom.rel = rel;
  atom.source = text;
  return atom;
}

// ---------------------------------------------------------------------------
// Atom / letter / guard semantics

namespace {

Rational atom_value(const AffineAtom& atom, const Distribution& mu) {
  if (atom.coeffs.size() != mu.size())
    throw ContractError("atom dimension " + std::to_string(atom.coeffs.size()) +
                        " != distribution dimension " +
                        std::to_string(mu.size()));
  Rational v = atom.offset;
  for (std::size_t i = 0; i < mu.size(); ++i) v += atom.coeffs[i] * mu[i];
  return v;
}

} // namespace

bool eval_atom(const AffineAtom& atom, const Distribution& mu) {
  Rational v = atom_value(atom, mu);
  switch (atom.rel) {
    case AtomRel::Geq: return v >= 0;
    case AtomRel::Gt: return v > 0;
    case AtomRel::Eq: return v == 0;
  }
  return false;
}

Letter letter_of(const std::vector<AffineAtom>& ap, const Distribution& mu) {
  Letter sigma = 0;
  for (std::size_t i = 0; i < ap.size(); ++i)
    if (eval_atom(ap[i], mu)) sigma |= (Letter(1) << i);
  return sigma;
}

std::vector<AffineRow> guard_of(Letter sigma,
                                const std::vector<AffineAtom>& ap) {
  std::vector<AffineRow> rows;
  for (std::size_t i = 0; i < ap.size(); ++i) {
    const AffineAtom& atom = ap[i];
    AffineRow pos{atom.coeffs, atom.offset};
    AffineRow neg{atom.coeffs, atom.offset};
    for (auto& c : neg.coeffs) c = -c;
    neg.offset = -neg.offset;
    if (sigma & (Letter(1) << i)) {
      switch (atom.rel) {
        case AtomRel::Geq:
        case AtomRel::Gt: // strict inequality closed
          rows.push_back(pos);
          break;
        case AtomRel::Eq:
          rows.push_back(pos);
          rows.push_back(neg);
          break;
      }
    } else {
      switch (atom.rel) {
        case AtomRel::Geq: // not(expr >= 0) = expr < 0, closed to -expr >= 0
        case AtomRel::Gt:
          rows.push_back(neg);
          break;
        case AtomRel::Eq:
          // closure of expr != 0 is trivially true; no row
          break;
      }
    }
  }
  return rows;
}

std::vector<Letter> satisfiable_letters(const std::vector<AffineAtom>& ap,
                                        std::size_t num_states,
                                        std::size_t ap_cap) {
  if (ap.size() > ap_cap)
    throw SemanticError("atomic proposition cap exceeded: " +
                        std::to_string(ap.size()) + " > " +
                        std::to_string(ap_cap));
  // A letter must be realized under strict semantics: negated >= atoms hold
  // with a positive margin t, decided exactly by maximizing t over the
  // simplex. Closed-guard feasibility alone would keep boundary-only
  // letters that no distribution actually produces.
  std::vector<Letter> out;
  auto ge_base = simplex_ge_rows(num_states);
  for (auto& row : ge_base) row.coeffs.push_back(Rational(0));
  std::vector<AffineRow> eq;
  {
    AffineRow sum = simplex_sum_row(num_states);
    sum.coeffs.push_back(Rational(0));
    eq.push_back(std::move(sum));
  }
  for (Letter sigma = 0; sigma < (Letter(1) << ap.size()); ++sigma) {
    auto ge = ge_base;
    bool strict = false;
    for (std::size_t i = 0; i < ap.size(); ++i) {
      const AffineAtom& atom = ap[i];
      AffineRow row;
      row.coeffs = atom.coeffs;
      row.offset = atom.offset;
      row.coeffs.push_back(Rational(0));
      if (sigma & (Letter(1) << i)) {
        if (atom.rel == AtomRel::Eq) {
          AffineRow neg;
          neg.coeffs.resize(num_states + 1);
          for (std::size_t j = 0; j < num_states; ++j)
            neg.coeffs[j] = -atom.coeffs[j];
          neg.offset = -atom.offset;
          ge.push_back(std::move(neg));
        } else if (atom.rel == AtomRel::Gt) {
          row.coeffs[num_states] = -1;
          strict = true;
        }
        ge.push_back(std::move(row));
      } else {
        if (atom.rel == AtomRel::Eq) continue; // != is not pruned
        for (std::size_t j = 0; j < num_states; ++j)
          row.coeffs[j] = -atom.coeffs[j];
        row.offset = -atom.offset;
        if (atom.rel == AtomRel::Geq) {
          row.coeffs[num_states] = -1;
          strict = true;
        }
        ge.push_back(std::move(row));
      }
    }
    if (!strict) {
      for (auto& row : ge) row.coeffs.resize(num_states);
      auto eqn = eq;
      for (auto& row : eqn) row.coeffs.resize(num_states);
      if (lp_feasible_point(ge, eqn, num_states)) out.push_back(sigma);
      continue;
    }
    AffineRow cap; // t <= 1 keeps the margin objective bounded
    cap.coeffs.resize(num_states + 1);
    cap.coeffs[num_states] = -1;
    cap.offset = 1;
    ge.push_back(std::move(cap));
    AffineRow obj;
    obj.coeffs.resize(num_states + 1);
    obj.coeffs[num_states] = -1; // maximize t
    LpResult res = lp_minimize(obj, ge, eq, num_states + 1);
    if (res.status == LpStatus::Optimal && res.value < 0) out.push_back(sigma);
  }
  return out;
}

// ---------------------------------------------------------------------------
// HOA subset parsing

namespace {

// Boolean edge-label formulas over AP indices.
struct LabelExpr {
  enum Kind { True, False, Ap, Not, And, Or } kind;
  int ap = -1;
  std::vector<LabelExpr> kids;

  bool eval(Letter sigma) const {
    switch (kind) {
      case True: return true;
      case False: return false;
      case Ap: return (sigma >> ap) & 1u;
      case Not: return !kids[0].eval(sigma);
      case And: return kids[0].eval(sigma) && kids[1].eval(sigma);
      case Or: return kids[0].eval(sigma) || kids[1].eval(sigma);
    }
    return false;
  }
};

struct LabelParser {
  const std::string& s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  LabelExpr parse_or() {
    LabelExpr e = parse_and();
    while (peek() == '|') {
      ++pos;
      LabelExpr rhs = parse_and();
      e = LabelExpr{LabelExpr::Or, -1, {std::move(e), std::move(rhs)}};
    }
    return e;
  }
  LabelExpr parse_and() {
    LabelExpr e = parse_unary();
    while (peek() == '&') {
      ++pos;
      LabelExpr rhs = parse_unary();
      e = LabelExpr{LabelExpr::And, -1, {std::move(e), std::move(rhs)}};
    }
    return e;
  }
  LabelExpr parse_unary() {
    char c = peek();
    if (c == '!') {
      ++pos;
      return LabelExpr{LabelExpr::Not, -1, {parse_unary()}};
    }
    if (c == '(') {
      ++pos;
      LabelExpr e = parse_or();
      if (peek() != ')')
        throw SemanticError("edge label '" + s + "': missing ')'");
      ++pos;
      return e;
    }
    if (c == 't') {
      ++pos;
      return LabelExpr{LabelExpr::True, -1, {}};
    }
    if (c == 'f') {
      ++pos;
      return LabelExpr{LabelExpr::False, -1, {}};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
        ++pos;
      LabelExpr e{LabelExpr::Ap, std::stoi(s.substr(start, pos - start)), {}};
      return e;
    }
    throw SemanticError("edge label '" + s + "': parse error at position " +
                        std::to_string(pos));
  }
};

std::vector<std::string> extract_quoted(const std::string& line, int lineno) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = line.find('"', pos)) != std::string::npos) {
    auto end = line.find('"', pos + 1);
    if (end == std::string::npos)
      throw ParseError("unterminated string literal", lineno);
    out.push_back(line.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return out;
}

} // namespace

Nba parse_hoa(const std::string& text, std::size_t num_states) {
  Nba nba;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool in_body = false, ended = false;
  bool have_states = false, have_acceptance = false;
  int current_state = -1;
  int declared_states = 0;

  auto reject = [&](const std::string& feature) {
    throw SemanticError("unsupported HOA feature at line " +
                        std::to_string(lineno) + ": " + feature);
  };

  while (std::getline(in, line)) {
    ++lineno;
    // trim
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.empty() || line[0] == '/') continue;

    if (!in_body) {
      std::istringstream ls(line);
      std::string key;
      ls >> key;
      if (key == "HOA:") {
        std::string ver;
        ls >> ver;
        if (ver != "v1") reject("HOA version " + ver);
      } else if (key == "States:") {
        ls >> declared_states;
        if (declared_states <= 0) throw ParseError("bad States: count", lineno);
        have_states = true;
      } else if (key == "Start:") {
        std::string rest;
        std::getline(ls, rest);
        if (rest.find('&') != std::string::npos)
          reject("alternation (conjunction of start states)");
        std::istringstream rs(rest);
        int q;
        if (!(rs >> q)) throw ParseError("bad Start: line", lineno);
        int extra;
        if (rs >> extra) reject("multiple start states");
        nba.initial = q;
      } else if (key == "AP:") {
        int k = 0;
        ls >> k;
        auto atoms = extract_quoted(line, lineno);
        if (static_cast<int>(atoms.size()) != k)
          throw ParseError("AP: declares " + std::to_string(k) + " atoms, " +
                           std::to_string(atoms.size()) + " given", lineno);
        for (const auto& a : atoms)
          nba.ap.push_back(parse_affine_atom(a, num_states));
        if (nba.ap.size() > 16) reject("more than 16 atomic propositions");
      } else if (key == "Acceptance:") {
        std::string rest;
        std::getline(ls, rest);
        std::string squeezed;
        for (char c : rest)
          if (!std::isspace(static_cast<unsigned char>(c))) squeezed += c;
        if (squeezed != "1Inf(0)")
          reject("acceptance condition '" + rest + "' (only Buchi '1 Inf(0)')");
        have_acceptance = true;
      } else if (key == "acc-name:") {
        std::string name;
        ls >> name;
        if (name != "Buchi") reject("acceptance name " + name);
      } else if (key == "Alias:") {
        reject("aliases");
      } else if (key == "name:" || key == "tool:" || key == "properties:") {
        // ignored
      } else if (key == "--BODY--") {
        if (!have_states || !have_acceptance)
          throw ParseError("--BODY-- before States:/Acceptance:", lineno);
        nba.num_states = declared_states;
        nba.accepting.assign(declared_states, false);
        nba.delta.assign(declared_states,
                         std::vector<std::set<int>>(nba.num_letters()));
        in_body = true;
      } else {
        reject("header item " + key);
      }
      continue;
    }

    if (line == "--END--") {
      ended = true;
      break;
    }
    if (line.rfind("State:", 0) == 0) {
      std::string rest = line.substr(6);
      auto p = rest.find_first_not_of(" \t");
      if (p != std::string::npos && rest[p] == '[')
        reject("state labels (implicit edges)");
      std::istringstream rs(rest);
      int q;
      if (!(rs >> q) || q < 0 || q >= declared_states)
        throw ParseError("bad state index", lineno);
      current_state = q;
      auto brace = rest.find('{');
      if (brace != std::string::npos) {
        auto close = rest.find('}', brace);
        if (close == std::string::npos)
          throw ParseError("missing '}'", lineno);
        std::istringstream as(rest.substr(brace + 1, close - brace - 1));
        int acc;
        while (as >> acc) {
          if (acc != 0) reject("acceptance set " + std::to_string(acc));
          nba.accepting[q] = true;
        }
      }
      continue;
    }
    // edge line: [formula] target [{accsets}]
    if (current_state < 0)
      throw ParseError("edge before any State:", lineno);
    if (line[0] != '[') reject("implicit (label-less) edges");
    auto close = line.find(']');
    if (close == std::string::npos) throw ParseError("missing ']'", lineno);
    std::string formula = line.substr(1, close - 1);
    std::string rest = line.substr(close + 1);
    if (rest.find('{') != std::string::npos)
      reject("transition-based acceptance");
    if (rest.find('&') != std::string::npos)
      reject("alternation (conjunction of successors)");
    std::istringstream rs(rest);
    int target;
    if (!(rs >> target) || target < 0 || target >= declared_states)
      throw ParseError("bad edge target", lineno);
    LabelParser lp{formula};
    LabelExpr expr = lp.parse_or();
    lp.skip_ws();
    if (lp.pos != formula.size())
      throw ParseError("trailing input in edge label", lineno);
    for (Letter sigma = 0; sigma < nba.num_letters(); ++sigma)
      if (expr.eval(sigma)) nba.delta[current_state][sigma].insert(target);
  }
  if (!in_body) throw ParseError("missing --BODY--", lineno);
  if (!ended) throw ParseError("missing --END--", lineno);
  nba.validate();
  return nba;
}

// ---------------------------------------------------------------------------
// LTL pattern library

namespace {

struct PatternLit {
  int ap = -1;
  bool negated = false;

  bool sat(Letter sigma) const {
    bool b = (sigma >> ap) & 1u;
    return negated ? !b : b;
  }
};

struct PatternToken {
  enum Kind { G, F, U, And, Implies, Lit } kind;
  PatternLit lit;
};

} // namespace

Nba parse_ltl_pattern(const std::string& text, std::size_t num_states) {
  // Tokenize; quoted strings become literals, parentheses are dropped (the
  // supported pattern skeletons are unambiguous without them).
  std::vector<PatternToken> toks;
  std::vector<AffineAtom> atoms;
  std::vector<std::string> atom_texts;
  std::size_t pos = 0;
  bool pending_neg = false;
  auto fail = [&]() -> Nba {
    throw SemanticError(
        "unrecognized LTL pattern: '" + text +
        "'; supported patterns are G p, F p, G F p, F G p, p U q, "
        "G (p -> F q), (G F p) & (G q); use HOA input for anything else");
  };
  while (pos < text.size()) {
    char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') {
      ++pos;
      continue;
    }
    if (c == '!') {
      pending_neg = !pending_neg;
      ++pos;
      continue;
    }
    if (c == '"') {
      auto end = text.find('"', pos + 1);
      if (end == std::string::npos)
        throw SemanticError("unterminated atom string in '" + text + "'");
      std::string atom_text = text.substr(pos + 1, end - pos - 1);
      pos = end + 1;
      int idx = -1;
      for (std::size_t i = 0; i < atom_texts.size(); ++i)
        if (atom_texts[i] == atom_text) idx = static_cast<int>(i);
      if (idx < 0) {
        idx = static_cast<int>(atoms.size());
        atoms.push_back(parse_affine_atom(atom_text, num_states));
        atom_texts.push_back(atom_text);
      }
      toks.push_back({PatternToken::Lit, {idx, pending_neg}});
      pending_neg = false;
      continue;
    }
    if (pending_neg) return fail();
    if (c == 'G') { toks.push_back({PatternToken::G, {}}); ++pos; continue; }
    if (c == 'F') { toks.push_back({PatternToken::F, {}}); ++pos; continue; }
    if (c == 'U') { toks.push_back({PatternToken::U, {}}); ++pos; continue; }
    if (c == '&') { toks.push_back({PatternToken::And, {}}); ++pos; continue; }
    if (c == '-' && pos + 1 < text.size() && text[pos + 1] == '>') {
      toks.push_back({PatternToken::Implies, {}});
      pos += 2;
      continue;
    }
    return fail();
  }

  auto shape_is = [&](std::initializer_list<PatternToken::Kind> kinds) {
    if (toks.size() != kinds.size()) return false;
    std::size_t i = 0;
    for (auto k : kinds)
      if (toks[i++].kind != k) return false;
    return true;
  };

  Nba nba;
  nba.ap = atoms;
  const std::size_t nl = nba.num_letters();
  auto make = [&](int states, std::vector<int> acc) {
    nba.num_states = states;
    nba.initial = 0;
    nba.accepting.assign(states, false);
    for (int q : acc) nba.accepting[q] = true;
    nba.delta.assign(states, std::vector<std::set<int>>(nl));
  };

  using K = PatternToken::Kind;
  if (shape_is({K::G, K::Lit})) {
    PatternLit p = toks[1].lit;
    make(1, {0});
    for (Letter s = 0; s < nl; ++s)
      if (p.sat(s)) nba.delta[0][s] = {0};
  } else if (shape_is({K::F, K::Lit})) {
    PatternLit p = toks[1].lit;
    make(2, {1});
    for (Letter s = 0; s < nl; ++s) {
      nba.delta[0][s].insert(0);
      if (p.sat(s)) nba.delta[0][s].insert(1);
      nba.delta[1][s] = {1};
    }
  } else if (shape_is({K::G, K::F, K::Lit})) {
    PatternLit p = toks[2].lit;
    make(2, {1});
    for (Letter s = 0; s < nl; ++s) {
      nba.delta[0][s] = {p.sat(s) ? 1 : 0};
      nba.delta[1][s] = {0};
    }
  } else if (shape_is({K::F, K::G, K::Lit})) {
    PatternLit p = toks[2].lit;
    make(2, {1});
    for (Letter s = 0; s < nl; ++s) {
      nba.delta[0][s].insert(0);
      if (p.sat(s)) {
        nba.delta[0][s].insert(1);
        nba.delta[1][s] = {1};
      }
    }
  } else if (shape_is({K::Lit, K::U, K::Lit})) {
    PatternLit p = toks[0].lit, q = toks[2].lit;
    make(2, {1});
    for (Letter s = 0; s < nl; ++s) {
      if (q.sat(s))
        nba.delta[0][s] = {1};
      else if (p.sat(s))
        nba.delta[0][s] = {0};
      nba.delta[1][s] = {1};
    }
  } else if (shape_is({K::G, K::Lit, K::Implies, K::F, K::Lit})) {
    PatternLit p = toks[1].lit, q = toks[4].lit;
    make(2, {0});
    for (Letter s = 0; s < nl; ++s) {
      nba.delta[0][s] = {(!p.sat(s) || q.sat(s)) ? 0 : 1};
      nba.delta[1][s] = {q.sat(s) ? 0 : 1};
    }
  } else if (shape_is({K::G, K::F, K::Lit, K::And, K::G, K::Lit})) {
    PatternLit p = toks[2].lit, q = toks[5].lit;
    make(2, {1});
    for (Letter s = 0; s < nl; ++s) {
      if (q.sat(s)) {
        nba.delta[0][s] = {p.sat(s) ? 1 : 0};
        nba.delta[1][s] = {0};
      }
    }
  } else {
    return fail();
  }
  nba.validate();
  return nba;
}

} // namespace distcert
