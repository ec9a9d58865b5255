#include "distcert/solver.hpp"

#include "distcert/errors.hpp"

#include <algorithm>
#include <cctype>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <fcntl.h>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace distcert {

std::string status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::Sat: return "sat";
    case SolverStatus::Unsat: return "unsat";
    case SolverStatus::Unknown: return "unknown";
    case SolverStatus::Timeout: return "timeout";
    case SolverStatus::SolverError: return "solver-error";
  }
  return "solver-error";
}

std::string smt_rational(const Rational& r) {
  Rational a = r < 0 ? -r : r;
  std::string body;
  if (denominator(a) == 1) {
    body = numerator(a).str();
  } else {
    body = "(/ " + numerator(a).str() + " " + denominator(a).str() + ")";
  }
  if (r < 0) return "(- " + body + ")";
  return body;
}

std::string smt_term(const Poly& p, const VarTable& vars, bool allow_mu) {
  if (p.is_zero()) return "0";
  std::vector<std::string> terms;
  for (const auto& [mono, coeff] : p.terms()) {
    std::vector<std::string> factors;
    if (coeff != 1 || mono.empty()) factors.push_back(smt_rational(coeff));
    for (const auto& [v, e] : mono) {
      std::string name;
      if (v.is_mu()) {
        if (!allow_mu)
          throw ContractError("mu variable leaked into the existential system");
        name = "mu" + std::to_string(v.id);
      } else {
        name = vars.name(v.table_index());
      }
      for (int k = 0; k < e; ++k) factors.push_back(name);
    }
    if (factors.size() == 1)
      terms.push_back(factors[0]);
    else {
      std::string t = "(*";
      for (const auto& f : factors) t += " " + f;
      t += ")";
      terms.push_back(std::move(t));
    }
  }
  if (terms.size() == 1) return terms[0];
  std::string out = "(+";
  for (const auto& t : terms) out += " " + t;
  out += ")";
  return out;
}

namespace {

void collect_vars(const Poly& p, std::set<int>& ids) {
  for (const auto& [mono, coeff] : p.terms())
    for (const auto& [v, e] : mono)
      if (!v.is_mu()) ids.insert(v.table_index());
}

} // namespace

std::string emit_smtlib(const ExistentialSystem& sys, const VarTable& vars) {
  std::ostringstream out;
  out << "(set-logic QF_NRA)\n";
  std::set<int> ids;
  for (const auto& rel : sys.relations) collect_vars(rel.expr, ids);
  for (int id : ids)
    out << "(declare-fun " << vars.name(id) << " () Real)\n";
  for (const auto& rel : sys.relations) {
    out << "; " << rel.label << "\n";
    out << "(assert (" << (rel.equality ? "=" : ">=") << " "
        << smt_term(rel.expr, vars, false) << " 0))\n";
  }
  out << "(check-sat)\n(get-model)\n";
  return out.str();
}

SolverOutcome invoke_solver(const std::string& smtlib,
                            const std::string& solver_cmd,
                            std::chrono::duration<double> timeout) {
  SolverOutcome out;
  auto start = std::chrono::steady_clock::now();

  char path[] = "/tmp/distcert_XXXXXX.smt2";
  int fd = mkstemps(path, 5);
  if (fd < 0) {
    out.raw = "cannot create temp file";
    return out;
  }
  {
    std::size_t off = 0;
    while (off < smtlib.size()) {
      ssize_t w = write(fd, smtlib.data() + off, smtlib.size() - off);
      if (w <= 0) break;
      off += static_cast<std::size_t>(w);
    }
    close(fd);
  }

  int pipefd[2];
  if (pipe(pipefd) != 0) {
    unlink(path);
    out.raw = "pipe failed";
    return out;
  }
  pid_t pid = fork();
  if (pid < 0) {
    close(pipefd[0]);
    close(pipefd[1]);
    unlink(path);
    out.raw = "fork failed";
    return out;
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(pipefd[1], 1);
    dup2(pipefd[1], 2);
    close(pipefd[0]);
    close(pipefd[1]);
    std::string cmd = solver_cmd + " " + path;
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(pipefd[1]);
  fcntl(pipefd[0], F_SETFL, O_NONBLOCK);

  std::string raw;
  bool timed_out = false;
  int wstatus = 0;
  char buf[4096];
  for (;;) {
    ssize_t r;
    while ((r = read(pipefd[0], buf, sizeof buf)) > 0)
      raw.append(buf, static_cast<std::size_t>(r));
    pid_t done = waitpid(pid, &wstatus, WNOHANG);
    if (done == pid) break;
    if (std::chrono::steady_clock::now() - start > timeout) {
      kill(-pid, SIGKILL);
      waitpid(pid, &wstatus, 0);
      timed_out = true;
      break;
    }
    usleep(2000);
  }
  ssize_t r;
  while ((r = read(pipefd[0], buf, sizeof buf)) > 0)
    raw.append(buf, static_cast<std::size_t>(r));
  close(pipefd[0]);
  unlink(path);

  out.raw = raw;
  out.wall_time = std::chrono::steady_clock::now() - start;
  if (timed_out) {
    out.status = SolverStatus::Timeout;
    return out;
  }

  std::istringstream lines(raw);
  std::string line;
  out.status = SolverStatus::SolverError;
  while (std::getline(lines, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line == "sat") { out.status = SolverStatus::Sat; break; }
    if (line == "unsat") { out.status = SolverStatus::Unsat; break; }
    if (line == "unknown") { out.status = SolverStatus::Unknown; break; }
  }
  if (out.status == SolverStatus::SolverError && WIFEXITED(wstatus) &&
      WEXITSTATUS(wstatus) == 127)
    out.raw = "solver command not found: " + solver_cmd + "\n" + raw;
  return out;
}

namespace {

std::vector<std::string> tokenize_sexp(const std::string& text) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (c == '(' || c == ')') {
      toks.emplace_back(1, c);
      ++i;
      continue;
    }
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == '|') {
      std::size_t end = text.find('|', i + 1);
      if (end == std::string::npos) throw SemanticError("unterminated |name|");
      toks.push_back(text.substr(i + 1, end - i - 1));
      i = end + 1;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
           text[j] != '(' && text[j] != ')')
      ++j;
    toks.push_back(text.substr(i, j - i));
    i = j;
  }
  return toks;
}

Rational parse_value(const std::vector<std::string>& t, std::size_t& i) {
  if (i >= t.size()) throw SemanticError("truncated model value");
  if (t[i] != "(") {
    auto r = parse_rational(t[i]);
    if (!r) throw SemanticError("unparseable model value '" + t[i] + "'");
    ++i;
    return *r;
  }
  ++i; // consume "("
  if (i >= t.size()) throw SemanticError("truncated model value");
  if (t[i] == "root-obj")
    throw SemanticError(
        "non-rational model; rerun with rational-model solver option");
  if (t[i] == "-") {
    ++i;
    Rational v = parse_value(t, i);
    if (i >= t.size() || t[i] != ")") throw SemanticError("malformed negation");
    ++i;
    return -v;
  }
  if (t[i] == "/") {
    ++i;
    Rational p = parse_value(t, i);
    Rational q = parse_value(t, i);
    if (i >= t.size() || t[i] != ")") throw SemanticError("malformed quotient");
    ++i;
    if (q == 0) throw SemanticError("zero denominator in model value");
    return p / q;
  }
  throw SemanticError("unparseable model value form '" + t[i] + "'");
}

void skip_sexp(const std::vector<std::string>& t, std::size_t& i) {
  if (i >= t.size()) return;
  if (t[i] != "(") { ++i; return; }
  int depth = 0;
  do {
    if (t[i] == "(") ++depth;
    else if (t[i] == ")") --depth;
    ++i;
  } while (i < t.size() && depth > 0);
}

} // namespace

std::map<int, Rational> parse_model(const std::string& raw,
                                    const VarTable& vars) {
  std::map<int, Rational> model;
  auto toks = tokenize_sexp(raw);
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (toks[i] != "(" || toks[i + 1] != "define-fun") continue;
    std::size_t j = i + 2;
    if (j >= toks.size()) break;
    std::string name = toks[j++];
    // argument list must be empty: "( )"
    if (j + 1 >= toks.size() || toks[j] != "(" || toks[j + 1] != ")") {
      skip_sexp(toks, i); // not a constant; skip whole define-fun
      --i;
      continue;
    }
    j += 2;
    if (j >= toks.size()) break;
    std::string sort = toks[j++];
    int id = vars.lookup(name);
    if (id < 0 || sort != "Real") {
      std::size_t k = i;
      skip_sexp(toks, k);
      i = k - 1;
      continue;
    }
    Rational v = parse_value(toks, j);
    if (j >= toks.size() || toks[j] != ")")
      throw SemanticError("malformed define-fun for '" + name + "'");
    model[id] = v;
    i = j;
  }
  return model;
}

CertificateSolution extract_solution(const std::map<int, Rational>& model,
                                     const CertTemplate& cert,
                                     const StrategyTemplate* strategy,
                                     const Mdp& mdp,
                                     const SuccessorChoice& choice) {
  auto value = [&](int id) {
    auto it = model.find(id);
    if (it == model.end())
      throw SemanticError("model is missing template variable id " +
                          std::to_string(id));
    return it->second;
  };
  CertificateSolution sol;
  sol.choice = choice;
  for (int q = 0; q < cert.num_nba_states; ++q) {
    AffineRow row;
    for (int c : cert.ranking[q].coeffs) row.coeffs.push_back(value(c));
    row.offset = value(cert.ranking[q].offset);
    sol.ranking.push_back(std::move(row));
  }
  for (int q = 0; q < cert.num_nba_states; ++q) {
    std::vector<AffineRow> rows;
    for (int k = 0; k < cert.invariant_size; ++k) {
      AffineRow row;
      for (int c : cert.invariant[q][k].coeffs) row.coeffs.push_back(value(c));
      row.offset = value(cert.invariant[q][k].offset);
      rows.push_back(std::move(row));
    }
    sol.invariant.push_back(std::move(rows));
  }
  if (!strategy) return sol;

  if (strategy->cls == StrategyClass::Memoryless) {
    MemorylessStrategy ms;
    for (const auto& [key, var] : strategy->prob) ms.prob[key] = value(var);
    ms.validate(mdp); // throws on simplex violation (solver bug)
    sol.strategy = std::move(ms);
  } else {
    AffineDistStrategy ds;
    ds.eps_den = strategy->eps_den;
    for (const auto& [key, trow] : strategy->rows) {
      AffineDistStrategy::Row row;
      for (int c : trow.coeffs) row.coeffs.push_back(value(c));
      row.offset = value(trow.offset);
      ds.numerator[key] = std::move(row);
    }
    ds.validate(mdp);
    sol.strategy = std::move(ds);
  }
  return sol;
}

} // namespace distcert
