#include "distcert/pdts.hpp"

#include "distcert/errors.hpp"

#include <algorithm>
#include <sstream>

namespace distcert {

std::vector<AffineRow> InitRegion::premise_rows(std::size_t n) const {
  std::vector<AffineRow> rows;
  for (const auto& r : ge) rows.push_back(r);
  for (const auto& r : eq) {
    rows.push_back(r);
    AffineRow neg = r;
    for (auto& c : neg.coeffs) c = -c;
    neg.offset = -neg.offset;
    rows.push_back(std::move(neg));
  }
  if (points.size() > 1)
    throw ContractError(
        "universal initial condition with multiple explicit points is not "
        "supported; give a region or use existential mode");
  if (points.size() == 1) {
    const Distribution& p = points[0];
    if (p.size() != n) throw ContractError("init point dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      AffineRow up, down;
      up.coeffs.assign(n, Rational(0));
      up.coeffs[i] = 1;
      up.offset = -p[i]; // mu_i - p_i >= 0
      down.coeffs.assign(n, Rational(0));
      down.coeffs[i] = -1;
      down.offset = p[i]; // p_i - mu_i >= 0
      rows.push_back(std::move(up));
      rows.push_back(std::move(down));
    }
  }
  return rows;
}

bool InitRegion::feasible(std::size_t n) const {
  auto rows = premise_rows(n);
  for (auto& r : simplex_ge_rows(n)) rows.push_back(std::move(r));
  std::vector<AffineRow> eqr = {simplex_sum_row(n)};
  return lp_feasible_point(rows, eqr, n).has_value();
}

InitRegion parse_init(const std::string& text, std::size_t n) {
  InitRegion init;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto parse_point = [&](std::string spec) {
    for (auto& c : spec)
      if (c == ',') c = ' ';
    std::istringstream ps(spec);
    Distribution d;
    std::string tok;
    while (ps >> tok) {
      auto r = parse_rational(tok);
      if (!r) throw ParseError("bad rational '" + tok + "' in point", lineno);
      d.mass.push_back(*r);
    }
    if (d.size() != n)
      throw ParseError("point has " + std::to_string(d.size()) +
                       " entries, expected " + std::to_string(n), lineno);
    d.validate();
    init.points.push_back(std::move(d));
  };
  // inline form "point:v0,v1,..."
  if (text.rfind("point:", 0) == 0 && text.find('\n') == std::string::npos) {
    lineno = 1;
    parse_point(text.substr(6));
    return init;
  }
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    if (line.rfind("point:", 0) == 0) {
      parse_point(line.substr(6));
      continue;
    }
    AffineAtom atom = parse_affine_atom(line, n);
    AffineRow row{atom.coeffs, atom.offset};
    if (atom.rel == AtomRel::Eq)
      init.eq.push_back(std::move(row));
    else
      init.ge.push_back(std::move(row)); // strict rows closed
  }
  return init;
}

Pdts build_pdts(const Mdp& mdp, const Nba& nba, const InitRegion& init,
                UpdateKind update) {
  const std::size_t n = mdp.num_states();
  for (const auto& atom : nba.ap)
    if (atom.coeffs.size() != n)
      throw SemanticError("atomic proposition dimension mismatch with MDP");
  if (!init.feasible(n))
    throw SemanticError("initial region is empty within the simplex");

  Pdts pdts;
  pdts.mdp = mdp;
  pdts.nba = nba;
  pdts.init = init;
  pdts.update = update;
  pdts.relevant.assign(nba.num_states, 0);
  pdts.classes.resize(nba.num_states);

  const std::size_t nl = nba.num_letters();
  const std::size_t nap = nba.ap.size();
  auto ge_base = simplex_ge_rows(n);
  std::vector<AffineRow> eq = {simplex_sum_row(n)};

  for (int q = 0; q < nba.num_states; ++q) {
    // Minimal relevant mask: atom i matters iff flipping it changes delta.
    Letter mask = 0;
    for (std::size_t i = 0; i < nap; ++i) {
      for (Letter s = 0; s < nl; ++s) {
        if (nba.delta[q][s] != nba.delta[q][s ^ (Letter(1) << i)]) {
          mask |= (Letter(1) << i);
          break;
        }
      }
    }
    pdts.relevant[q] = mask;

    // Enumerate classes: assignments to the relevant atoms only.
    std::vector<Letter> rel_bits;
    for (std::size_t i = 0; i < nap; ++i)
      if (mask & (Letter(1) << i)) rel_bits.push_back(Letter(1) << i);
    const std::size_t nclasses = std::size_t(1) << rel_bits.size();
    for (std::size_t c = 0; c < nclasses; ++c) {
      Letter bits = 0;
      for (std::size_t i = 0; i < rel_bits.size(); ++i)
        if (c & (std::size_t(1) << i)) bits |= rel_bits[i];
      // Guard over relevant atoms only.
      std::vector<AffineRow> guard;
      for (std::size_t i = 0; i < nap; ++i) {
        if (!(mask & (Letter(1) << i))) continue;
        Letter single = Letter(1) << i;
        auto rows = guard_of((bits & single) ? 1u : 0u, {nba.ap[i]});
        for (auto& r : rows) guard.push_back(std::move(r));
      }
      auto ge = ge_base;
      for (const auto& r : guard) ge.push_back(r);
      if (!lp_feasible_point(ge, eq, n)) continue;

      LetterClass cls;
      cls.letter = bits;
      cls.relevant = mask;
      cls.guard = guard;
      const auto& succ = nba.delta[q][bits]; // representative: others = bits
      cls.successors.assign(succ.begin(), succ.end());
      pdts.classes[q].push_back(std::move(cls));
    }
    for (const auto& cls : pdts.classes[q]) {
      for (int target : cls.successors) {
        PdtsTransition t;
        t.source = q;
        t.target = target;
        t.letter = cls.letter;
        t.relevant = cls.relevant;
        t.guard = cls.guard;
        pdts.transitions.push_back(std::move(t));
      }
    }
  }
  return pdts;
}

std::vector<std::pair<int, Distribution>> successor_states(
    const Pdts& pdts, int q, const Distribution& mu,
    const Strategy& strategy) {
  Letter sigma = letter_of(pdts.nba.ap, mu);
  std::vector<std::pair<int, Distribution>> out;
  Distribution next = step(pdts.mdp, strategy, mu);
  for (int target : pdts.nba.delta.at(q).at(sigma))
    out.emplace_back(target, next);
  return out;
}

namespace {

std::string guard_str(const std::vector<AffineRow>& guard) {
  if (guard.empty()) return "true";
  std::ostringstream out;
  for (std::size_t k = 0; k < guard.size(); ++k) {
    if (k) out << " /\\ ";
    bool first = true;
    for (std::size_t i = 0; i < guard[k].coeffs.size(); ++i) {
      if (guard[k].coeffs[i] == 0) continue;
      if (!first) out << " + ";
      out << to_string(guard[k].coeffs[i]) << "*mu" << i;
      first = false;
    }
    if (guard[k].offset != 0 || first)
      out << (first ? "" : " + ") << to_string(guard[k].offset);
    out << " >= 0";
  }
  return out.str();
}

} // namespace

std::string Pdts::report() const {
  std::ostringstream out;
  out << "PDTS: " << num_locations() << " locations, " << num_variables()
      << " variables, " << transitions.size() << " transitions\n";
  out << "initial location: q" << nba.initial << "\n";
  for (const auto& t : transitions) {
    out << "  q" << t.source << " -> q" << t.target << "  letter=0x" << std::hex
        << t.letter << std::dec << "  guard: " << guard_str(t.guard)
        << "  update: "
        << (update == UpdateKind::FixedStrategy ? "fixed-strategy map"
                                                : "symbolic-strategy map")
        << "\n";
  }
  for (int q = 0; q < num_locations(); ++q) {
    for (const auto& cls : classes[q]) {
      if (cls.successors.empty())
        out << "  q" << q << "  letter=0x" << std::hex << cls.letter << std::dec
            << "  (no successor; rejecting)\n";
    }
  }
  return out.str();
}

} // namespace distcert
