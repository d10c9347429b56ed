// qblocks: exact conformal-block dimensions, quantum mapping-class-group
// representations over cyclotomic fields, and their finite residue quotients.
//
// Subcommands: dims, verify-lemmas, square-scan, build-rep, check-rep,
// push-explore, reduce, closure, compare-images, roundtrip.
//
// Exit codes: 0 all requested checks pass; 1 a check failed (or input
// corruption, reported with byte offset); 2 unknown subcommand; 3 invalid
// configuration; 4 I/O failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qblocks/bundle.hpp"
#include "qblocks/cyclotomic.hpp"
#include "qblocks/dims.hpp"
#include "qblocks/graphs.hpp"
#include "qblocks/matrix.hpp"
#include "qblocks/moves.hpp"
#include "qblocks/quotients.hpp"
#include "qblocks/residue.hpp"
#include "qblocks/skein.hpp"
#include "qblocks/spectrum.hpp"
#include "qblocks/surfaces.hpp"

namespace {

using njson = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUnknownCommand = 2;
constexpr int kInvalidConfig = 3;
constexpr int kIoFailure = 4;

struct IoError {
  std::string msg;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError{"cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError{"read failure on " + path};
  return ss.str();
}

// common output options shared by every subcommand
struct Sink {
  bool json = false;
  bool no_timestamp = false;
  std::string out;

  void add_to(CLI::App* cmd) {
    cmd->add_flag("--json", json, "structured output with the same fields");
    cmd->add_flag("--no-timestamp", no_timestamp,
                  "suppress the timestamp header; time columns print '-'");
    cmd->add_option("--out", out, "output file (default: stdout)");
  }

  // resolve the target path; empty means stdout.  QBLOCKS_OUT supplies a
  // default directory for artifact-producing commands and a base directory
  // for relative --out paths.
  std::string resolve(const std::string& default_name) const {
    const char* env = std::getenv("QBLOCKS_OUT");
    if (out.empty()) {
      if (env && *env && !default_name.empty())
        return std::string(env) + "/" + default_name;
      return "";
    }
    if (env && *env && out.front() != '/')
      return std::string(env) + "/" + out;
    return out;
  }

  void write(const std::string& default_name, const std::string& content) const {
    std::string path = resolve(default_name);
    if (path.empty()) {
      std::cout << content;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError{"cannot open " + path + " for writing"};
    f << content;
    f.flush();
    if (!f) throw IoError{"write failure on " + path};
    std::cerr << "wrote " << path << "\n";
  }

  std::string timestamp() const {
    if (no_timestamp) return "";
    std::time_t t = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
  }
};

std::string spec_slug(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (c == '(' || c == ')' || c == ',' || c == ';') {
      if (!s.empty() && s.back() != '-') s += '-';
    } else {
      s += c;
    }
  }
  while (!s.empty() && s.back() == '-') s.pop_back();
  return s;
}

// a generic TSV/JSON table: fixed columns, string cells
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void row(std::initializer_list<std::string> cells) {
    rows.emplace_back(cells);
  }

  std::string render(const Sink& sink) const {
    if (sink.json) {
      njson j;
      std::string ts = sink.timestamp();
      if (!ts.empty()) j["generated"] = ts;
      j["rows"] = njson::array();
      for (const auto& r : rows) {
        njson o;
        for (std::size_t c = 0; c < columns.size(); ++c) o[columns[c]] = r[c];
        j["rows"].push_back(std::move(o));
      }
      return j.dump(2) + "\n";
    }
    std::string s;
    std::string ts = sink.timestamp();
    if (!ts.empty()) s += "# generated: " + ts + "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) s += '\t';
      s += columns[c];
    }
    s += '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c) s += '\t';
        s += r[c];
      }
      s += '\n';
    }
    return s;
  }
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// dims

struct DimsArgs {
  std::vector<int> ps, gs, label;
  bool all_labels = false;
  int max_len = 2;
  std::string method = "recursion";
  bool agree = false;
  Sink sink;
};

int run_dims(const DimsArgs& a) {
  static const std::vector<std::string> kMethods{"enumeration", "recursion",
                                                 "verlinde", "closed-form",
                                                 "all"};
  if (std::find(kMethods.begin(), kMethods.end(), a.method) == kMethods.end())
    throw std::invalid_argument("unknown method: " + a.method);
  if (a.ps.empty() || a.gs.empty())
    throw std::invalid_argument("dims requires at least one --p and one --g");
  std::vector<std::string> methods =
      a.method == "all"
          ? std::vector<std::string>{"enumeration", "recursion", "verlinde"}
          : std::vector<std::string>{a.method};

  std::map<int, qblocks::DimEngine> engines;
  auto engine = [&](int p) -> qblocks::DimEngine& {
    auto it = engines.find(p);
    if (it == engines.end()) it = engines.emplace(p, qblocks::DimEngine(p)).first;
    return it->second;
  };

  auto compute = [&](const std::string& method, int g, int p,
                     const std::vector<int>& labels) -> mpz_class {
    if (method == "recursion") return engine(p).dim(g, labels);
    if (method == "enumeration")
      return qblocks::count_colorings(p, qblocks::standard_graph(g, labels));
    if (method == "verlinde") return qblocks::verlinde_dim(p, g, labels);
    return qblocks::dim_closed_form(p, g, labels);
  };

  qblocks::DimTable table;
  bool all_agree = true;
  for (int p : a.ps) {
    qblocks::check_level(p);
    for (int l : a.label) qblocks::check_color(p, l);
    std::vector<std::vector<int>> tuples;
    if (a.all_labels) {
      tuples.push_back({});
      if (a.max_len >= 1)
        for (int c : qblocks::colors(p)) tuples.push_back({c});
      if (a.max_len >= 2)
        for (int c1 : qblocks::colors(p))
          for (int c2 : qblocks::colors(p)) tuples.push_back({c1, c2});
      if (a.max_len >= 3)
        throw std::invalid_argument("--max-len supports at most 2");
    } else {
      tuples.push_back(a.label);
    }
    for (int g : a.gs) {
      if (g < 1) throw std::invalid_argument("genus must be >= 1");
      for (const auto& labels : tuples) {
        mpz_class first;
        bool have_first = false;
        for (const auto& m : methods) {
          mpz_class d = compute(m, g, p, labels);
          table.rows.push_back({g, p, labels, d, m});
          if (!have_first) {
            first = d;
            have_first = true;
          } else if (d != first) {
            all_agree = false;
          }
        }
      }
    }
  }

  // one explicit cell with one method prints the bare value
  if (!a.all_labels && a.ps.size() == 1 && a.gs.size() == 1 &&
      methods.size() == 1 && !a.agree) {
    if (a.sink.json) {
      njson j;
      j["g"] = a.gs[0];
      j["p"] = a.ps[0];
      j["labels"] = qblocks::labels_to_string(a.label);
      j["dim"] = table.rows[0].dim.get_str();
      j["method"] = methods[0];
      a.sink.write("", j.dump(2) + "\n");
    } else {
      a.sink.write("", table.rows[0].dim.get_str() + "\n");
    }
    return kOk;
  }

  if (a.sink.json) {
    njson j;
    std::string ts = a.sink.timestamp();
    if (!ts.empty()) j["generated"] = ts;
    j["rows"] = njson::array();
    for (const auto& r : table.rows) {
      njson o;
      o["g"] = r.g;
      o["p"] = r.p;
      o["labels"] = qblocks::labels_to_string(r.labels);
      o["dim"] = r.dim.get_str();
      o["method"] = r.method;
      j["rows"].push_back(std::move(o));
    }
    if (a.agree) j["agree"] = all_agree;
    a.sink.write("", j.dump(2) + "\n");
  } else {
    std::string ts = a.sink.timestamp();
    if (!ts.empty()) table.timestamp_line = "# generated: " + ts;
    a.sink.write("", qblocks::serialize_dim_table(table));
  }
  if (a.agree && !all_agree) {
    std::cerr << "dimension methods disagree\n";
    return kCheckFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify-lemmas

struct LemmaArgs {
  std::vector<int> ps;
  int gmax = 4;
  double ratio_tol = -1.0;  // <0: ratio rows are informational
  Sink sink;
};

int run_verify_lemmas(const LemmaArgs& a) {
  if (a.ps.empty())
    throw std::invalid_argument("verify-lemmas requires at least one --p");
  if (a.gmax < 2) throw std::invalid_argument("--gmax must be >= 2");
  Table t;
  t.columns = {"check", "g", "p", "lhs", "rhs", "ok", "method"};
  bool all_ok = true;
  auto put = [&](const std::string& check, int g, int p, const std::string& l,
                 const std::string& r, bool ok, const std::string& method) {
    t.row({check, std::to_string(g), std::to_string(p), l, r,
           ok ? "yes" : "NO", method});
    all_ok = all_ok && ok;
  };
  for (int p : a.ps) {
    qblocks::check_level(p);
    for (int g = 2; g <= a.gmax; ++g) {
      qblocks::CompareReport cr = qblocks::check_compare(g, p);
      put("compare", g, p, cr.top.get_str(),
          (cr.strict ? std::string(">") : std::string("=")) +
              cr.plain.get_str(),
          cr.ok, "recursion");
    }
    for (int g = 2; g <= a.gmax; ++g) {
      qblocks::GrowthReport gr = qblocks::check_growth(g, p);
      put("growth", g, p, gr.next.get_str(), "<" + gr.bound.get_str(), gr.ok,
          "recursion");
      if (g == 2) {
        bool rok = a.ratio_tol < 0 ||
                   (gr.ratio > 0.7 - a.ratio_tol && gr.ratio < 0.7 + a.ratio_tol);
        put("ratio", g, p, fmt_double(gr.ratio), "0.7", rok, "recursion");
        all_ok = all_ok && rok;
      }
    }
    // decomposition spot checks: removing a transparent point, and label
    // fusion against the one-point dimensions
    qblocks::DimEngine eng(p);
    for (int k : std::vector<int>{0, 2, p - 3}) {
      if (!qblocks::is_valid_color(p, k)) continue;
      mpz_class with0 = eng.dim(2, {k, 0});
      mpz_class base = eng.dim(2, {k});
      put("zero-leg", 2, p, with0.get_str(), base.get_str(), with0 == base,
          "recursion");
    }
    for (std::pair<int, int> ij :
         std::vector<std::pair<int, int>>{{2, 2}, {2, p - 3}}) {
      if (!qblocks::is_valid_color(p, ij.first) ||
          !qblocks::is_valid_color(p, ij.second))
        continue;
      mpz_class lhs = eng.dim(2, {ij.first, ij.second});
      mpz_class rhs = 0;
      for (int m : qblocks::colors(p))
        if (qblocks::admissible(p, ij.first, ij.second, m))
          rhs += eng.dim(2, {m});
      put("fusion", 2, p, lhs.get_str(), rhs.get_str(), lhs == rhs,
          "recursion");
    }
  }
  a.sink.write("", t.render(a.sink));
  return all_ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// square-scan

struct ScanArgs {
  long max = 10000;
  Sink sink;
};

int run_square_scan(const ScanArgs& a) {
  qblocks::ScanResult res = qblocks::square_scan(a.max);
  if (a.sink.json) {
    njson j;
    std::string ts = a.sink.timestamp();
    if (!ts.empty()) j["generated"] = ts;
    j["max"] = a.max;
    j["squares_found"] = res.offenders.size();
    j["offenders"] = res.offenders;
    j["primes_scanned"] = res.primes_scanned;
    j["cross_checked"] = res.cross_checked;
    a.sink.write("", j.dump(2) + "\n");
  } else {
    std::string s;
    std::string ts = a.sink.timestamp();
    if (!ts.empty()) s += "# generated: " + ts + "\n";
    s += std::to_string(res.offenders.size()) + " squares found\n";
    for (int p : res.offenders) s += "offender: p=" + std::to_string(p) + "\n";
    s += "scanned " + std::to_string(res.primes_scanned) + " primes, " +
         std::to_string(res.cross_checked) + " cross-checked by recursion\n";
    a.sink.write("", s);
  }
  return res.offenders.empty() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// build-rep

struct BuildArgs {
  std::string spec;
  int p = 0;
  int t = 1;
  std::vector<std::string> hints;
  Sink sink;
};

int run_build_rep(const BuildArgs& a) {
  qblocks::SurfaceSpec spec = qblocks::SurfaceSpec::parse(a.spec);
  qblocks::SkeinCtx cx(a.p, a.t);
  qblocks::SurfaceRep rep = qblocks::build_rep(cx, spec);
  qblocks::Bundle b = qblocks::make_bundle(rep);
  b.hints = a.hints;
  std::string name = spec_slug(spec.name()) + "-p" + std::to_string(a.p) +
                     "-t" + std::to_string(a.t) + ".qbundle";
  a.sink.write(name, qblocks::serialize_bundle(b));
  return kOk;
}

// ---------------------------------------------------------------------------
// check-rep

struct CheckArgs {
  std::string spec;
  int p = 0;
  int t = 1;
  std::vector<std::string> checks;  // empty = default set
  Sink sink;
};

int run_check_rep(const CheckArgs& a) {
  qblocks::SurfaceSpec spec = qblocks::SurfaceSpec::parse(a.spec);

  // a holed sphere whose chain root is not a color carries no block space
  if (spec.kind == qblocks::SurfaceKind::HoledSphere &&
      !qblocks::is_valid_color(a.p, spec.a * spec.k - 2)) {
    std::string s = "no admissible blocks for " + spec.name() + " at p=" +
                    std::to_string(a.p) + "\n";
    if (a.sink.json) {
      njson j;
      j["spec"] = spec.name();
      j["p"] = a.p;
      j["status"] = "no admissible blocks";
      s = j.dump(2) + "\n";
    }
    a.sink.write("", s);
    return kOk;
  }

  std::vector<std::string> checks = a.checks;
  if (checks.empty()) {
    checks = {"relations", "unitary", "conj", "burnside"};
    if (spec.kind == qblocks::SurfaceKind::HoledSphere)
      checks.push_back("scalars");
    else
      checks.push_back("twists");
  }
  static const std::vector<std::string> kKnown{
      "relations", "unitary", "twists", "scalars", "conj", "galois",
      "burnside"};
  for (const auto& c : checks)
    if (std::find(kKnown.begin(), kKnown.end(), c) == kKnown.end())
      throw std::invalid_argument("unknown check: " + c);
  auto wants = [&](const std::string& c) {
    return std::find(checks.begin(), checks.end(), c) != checks.end();
  };

  qblocks::SkeinCtx cx(a.p, a.t);
  Table t;
  t.columns = {"check", "name", "status", "detail"};
  bool all_ok = true;
  auto put = [&](const std::string& check, const std::string& name, bool ok,
                 const std::string& detail) {
    t.row({check, name, ok ? "pass" : "FAIL", detail});
    all_ok = all_ok && ok;
  };

  // cheap path: only the Burnside identity was requested, and the named
  // loops are available without assembling the full twist set
  const bool only_burnside = checks == std::vector<std::string>{"burnside"};
  if (only_burnside) {
    auto [space, pushes] = qblocks::build_pushes(cx, spec);
    for (const auto& nm : pushes) {
      bool ok = nm.mat.pow(a.p) ==
                qblocks::CycMatrix::identity(a.p, space.dim());
      put("burnside", nm.name, ok, "loop^p = identity");
    }
    a.sink.write("", t.render(a.sink));
    return all_ok ? kOk : kCheckFailed;
  }

  qblocks::SurfaceRep rep = qblocks::build_rep(cx, spec);

  if (wants("relations")) {
    for (const auto& rc : qblocks::check_relations(rep)) {
      std::string kind =
          rc.rel.kind == qblocks::RelKind::Braid ? "braid" : "commute";
      std::string detail = kind;
      if (rc.holds)
        detail += rc.exact ? " exact" : " up to root of unity " + rc.scalar;
      put("relations", rc.rel.a + "~" + rc.rel.b, rc.holds, detail);
    }
    // modular relation on the one-holed torus: ta tb ta agrees with the
    // s-move up to a root-of-unity scalar
    if (spec.kind == qblocks::SurfaceKind::OneHoledTorus) {
      const qblocks::CycMatrix& ta = rep.curve("ta").mat;
      const qblocks::CycMatrix& tb = rep.curve("tb").mat;
      const qblocks::CycMatrix* smat = nullptr;
      for (const auto& mv : rep.moves)
        if (mv.name == "s") smat = &mv.mat;
      if (smat) {
        auto lam = qblocks::scalar_ratio(ta * tb * ta, *smat);
        bool ok = lam && !lam->is_zero() &&
                  qblocks::is_root_of_unity(*lam).is_root;
        put("relations", "ta*tb*ta~s", ok,
            ok ? (lam->is_one() ? "modular exact"
                                : "modular up to root of unity " +
                                      lam->serialize())
               : "modular relation fails");
      }
    }
  }

  if (wants("unitary")) {
    for (const auto& nm : rep.curves)
      put("unitary", nm.name, qblocks::hermit_ok(nm.mat, rep.space.weights),
          "M^dagger H M = H");
    for (const auto& nm : rep.pushes)
      put("unitary", nm.name, qblocks::hermit_ok(nm.mat, rep.space.weights),
          "M^dagger H M = H");
    for (const auto& mv : rep.moves) {
      qblocks::CycMatrix lhs = qblocks::apply_form(mv.mat, mv.target_weights);
      bool ok = lhs == qblocks::CycMatrix::diagonal(a.p, rep.space.weights);
      put("unitary", mv.name, ok, "move^dagger H_target move = H_source");
    }
  }

  if (wants("twists")) {
    if (spec.kind == qblocks::SurfaceKind::HoledSphere) {
      put("twists", "-", false,
          "twist eigenvalue contract does not apply to half-twists");
    } else {
      for (const auto& tc : qblocks::twist_eigenvalue_checks(rep))
        put("twists", tc.name, tc.ok, "eigenvalues among A^{c(c+2)}");
    }
  }

  if (wants("scalars") && spec.kind == qblocks::SurfaceKind::HoledSphere) {
    qblocks::BurauContract bc = qblocks::burau_contract(cx, spec.a);
    put("scalars", "eigen-ratio", bc.matches,
        "ratio " + bc.ratio.serialize() + " target -A^{-2a^2} = " +
            bc.contract_value.serialize());
    put("scalars", "eigen-order", true,
        "order(A^{2a^2}) = " + std::to_string(bc.eigen_order) +
            (bc.expect_infinite ? ", expect infinite image"
                                : ", finite triangle-group range"));
  }

  if (wants("conj")) {
    qblocks::SymmetryReport sr = qblocks::conj_symmetry_check(spec, a.p, a.t);
    put("conj", sr.ok ? "all-generators" : sr.first_failure, sr.ok,
        "entrywise conjugate equals the build at the inverse root");
  }

  if (wants("galois")) {
    for (int u : {2, 3}) {
      qblocks::SymmetryReport sr =
          qblocks::galois_coherence_check(spec, a.p, a.t, u);
      put("galois", sr.ok ? "u=" + std::to_string(u) : sr.first_failure, sr.ok,
          "galois twist commutes with the build");
    }
  }

  if (wants("burnside")) {
    for (const auto& nm : rep.pushes) {
      bool ok = nm.mat.pow(a.p) ==
                qblocks::CycMatrix::identity(a.p, rep.space.dim());
      put("burnside", nm.name, ok, "loop^p = identity");
    }
  }

  a.sink.write("", t.render(a.sink));
  return all_ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// push-explore

struct PushArgs {
  std::string spec;
  int p = 0;
  int t = 1;
  int max_len = 8;
  std::string word;
  bool expect_infinite = false;
  bool expect_finite = false;
  Sink sink;
};

int run_push_explore(const PushArgs& a) {
  qblocks::SurfaceSpec spec = qblocks::SurfaceSpec::parse(a.spec);
  qblocks::SkeinCtx cx(a.p, a.t);
  qblocks::SurfaceRep rep = qblocks::build_rep(cx, spec);
  Table t;
  t.columns = {"kind", "word", "verdict", "order", "witness", "note"};

  auto spectrum_cells = [&](const qblocks::SpectrumReport& sr)
      -> std::array<std::string, 4> {
    std::string verdict = sr.finite ? "finite" : "infinite";
    std::string order = sr.finite ? std::to_string(sr.order) : "-";
    std::string witness = sr.finite ? "-" : qblocks::qpoly_to_string(sr.witness_factor);
    std::string note = sr.note.empty() ? "-" : sr.note;
    return {verdict, order, witness, note};
  };

  if (!a.word.empty()) {
    qblocks::CycMatrix m = qblocks::point_push(rep, a.word);
    qblocks::SpectrumReport sr = qblocks::spectrum_report(m);
    auto c = spectrum_cells(sr);
    t.row({"spectrum", a.word, c[0], c[1], c[2], c[3]});
    a.sink.write("", t.render(a.sink));
    if (a.expect_infinite && sr.finite) return kCheckFailed;
    if (a.expect_finite && !sr.finite) return kCheckFailed;
    return kOk;
  }

  qblocks::PushSearchResult res = qblocks::push_search(rep, a.max_len);
  if (res.commutator_found)
    t.row({"commutator", "[" + res.commutator_u + "," + res.commutator_v + "]",
           "non-scalar", "-", "-", "-"});
  else
    t.row({"commutator", "-", "not-found", "-", "-",
           "no non-scalar commutator within the bound"});
  if (res.infinite_found) {
    auto c = spectrum_cells(res.infinite_report);
    t.row({"infinite", res.infinite_word, c[0], c[1], c[2], c[3]});
  } else {
    t.row({"infinite", "-", "not-found", "-", "-",
           "every word in the bound has finite-order spectrum"});
  }
  t.row({"stats", "-", "-", "-", "-",
         "words examined: " + std::to_string(res.words_examined)});
  a.sink.write("", t.render(a.sink));
  return res.commutator_found && res.infinite_found ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// reduce

struct ReduceArgs {
  std::string in;
  long q = 0;  // 0 = smallest split prime
  int modulus_index = 0;
  Sink sink;
};

long pick_split_prime(const qblocks::Bundle& b) {
  auto denom_ok = [&](long q) {
    auto entry_ok = [&](const qblocks::CycNum& x) {
      for (int k = 0; k < x.level() - 1; ++k)
        if (mpz_divisible_ui_p(x.coeff(k).get_den().get_mpz_t(),
                               static_cast<unsigned long>(q)))
          return false;
      return true;
    };
    for (const auto& w : b.weights)
      if (!entry_ok(w)) return false;
    for (const auto& m : b.matrices)
      for (int i = 0; i < m.mat.rows(); ++i)
        for (int j = 0; j < m.mat.cols(); ++j)
          if (!entry_ok(m.mat.at(i, j))) return false;
    return true;
  };
  for (long q = b.p + 1;; q += b.p)
    if (qblocks::is_prime_u64(static_cast<std::uint64_t>(q)) && denom_ok(q))
      return q;
}

int run_reduce(const ReduceArgs& a) {
  qblocks::Bundle b = qblocks::parse_bundle(read_file(a.in));
  long q = a.q > 0 ? a.q : pick_split_prime(b);
  qblocks::SplittingData sd = qblocks::splitting_data(q, b.p);
  if (a.modulus_index < 0 ||
      a.modulus_index >= static_cast<int>(sd.moduli.size()))
    throw std::invalid_argument("modulus index out of range (0.." +
                                std::to_string(sd.moduli.size() - 1) + ")");
  qblocks::ResidueField F =
      qblocks::ResidueField::from_splitting(sd, a.modulus_index);
  qblocks::ResidueBundle rb = qblocks::reduce_bundle(b, F);

  // homomorphism spot check on the first two matrices
  if (b.matrices.size() >= 2 && b.basis.size() <= 40) {
    const auto& M = b.matrices[0].mat;
    const auto& N = b.matrices[1].mat;
    qblocks::RMat lhs = qblocks::reduce_matrix(M * N, F);
    qblocks::RMat rhs = qblocks::rmat_mul(F, qblocks::reduce_matrix(M, F),
                                          qblocks::reduce_matrix(N, F));
    if (lhs.e != rhs.e) {
      std::cerr << "reduction is not multiplicative on a spot check\n";
      return kCheckFailed;
    }
  }

  std::string stem = a.in;
  std::size_t slash = stem.find_last_of('/');
  if (slash != std::string::npos) stem = stem.substr(slash + 1);
  std::size_t dot = stem.find_last_of('.');
  if (dot != std::string::npos) stem = stem.substr(0, dot);
  std::string name = stem + "-q" + std::to_string(q) + "-m" +
                     std::to_string(a.modulus_index) + ".qresidues";
  a.sink.write(name, qblocks::serialize_residue_bundle(rb));
  return kOk;
}

// ---------------------------------------------------------------------------
// closure

struct ClosureArgs {
  std::string in;
  long sl2 = 0;
  std::vector<std::string> sets;
  std::uint64_t cap = 10000000;
  bool projective = false;
  long expect_order = -1;
  Sink sink;
};

std::vector<std::pair<std::string, qblocks::RMat>> resolve_set(
    const qblocks::ResidueBundle& rb, const std::string& set) {
  std::vector<std::pair<std::string, qblocks::RMat>> out;
  if (set == "curves" || set == "pushes" || set == "all") {
    std::string role = set == "curves" ? "curve" : "push";
    for (const auto& m : rb.matrices)
      if (set == "all" || m.role == role) out.emplace_back(m.name, m.mat);
  } else {
    for (const std::string& name : qblocks::detail::split(set, ',')) {
      bool found = false;
      for (const auto& m : rb.matrices)
        if (m.name == name) {
          out.emplace_back(m.name, m.mat);
          found = true;
        }
      if (!found)
        throw std::invalid_argument("no matrix named " + name +
                                    " in the residue bundle");
    }
  }
  if (out.empty())
    throw std::invalid_argument("generator set \"" + set + "\" is empty");
  return out;
}

int run_closure(const ClosureArgs& a) {
  Table t;
  t.columns = {"p", "q", "f", "spec", "set", "status", "order", "time"};
  bool ok = true;

  auto run_one = [&](const qblocks::ResidueField& F, const std::string& pcol,
                     const std::string& spec, const std::string& set,
                     const std::vector<qblocks::RMat>& gens) {
    auto start = std::chrono::steady_clock::now();
    qblocks::ClosureResult res =
        qblocks::group_closure(F, gens, a.cap, a.projective);
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    std::string status = res.complete
                             ? "complete"
                             : "cap-exceeded(" + std::to_string(res.visited) +
                                   ")";
    std::string order = res.complete ? res.order.get_str() : "undecided";
    char tbuf[32];
    std::snprintf(tbuf, sizeof tbuf, "%.3f", secs);
    t.row({pcol, std::to_string(F.q()), std::to_string(F.f()), spec, set,
           status, order, a.sink.no_timestamp ? "-" : tbuf});
    if (res.complete && !res.order_divides_group) {
      std::cerr << "closure order fails the ambient-group divisibility check\n";
      ok = false;
    }
    if (a.expect_order >= 0 &&
        (!res.complete || res.order != a.expect_order))
      ok = false;
  };

  if (a.sl2 > 0) {
    if (!qblocks::is_prime_u64(static_cast<std::uint64_t>(a.sl2)))
      throw std::invalid_argument("--sl2 needs a prime field size");
    qblocks::ResidueField F(a.sl2, 0, {a.sl2 - 1, 1});
    qblocks::RMat u = qblocks::rmat_identity(F, 2),
                  l = qblocks::rmat_identity(F, 2);
    qblocks::rmat_set(F, u, 0, 1, F.one());
    qblocks::rmat_set(F, l, 1, 0, F.one());
    run_one(F, "-", "sl2", "transvections", {u, l});
  } else {
    if (a.in.empty())
      throw std::invalid_argument("closure needs --in or --sl2");
    qblocks::ResidueBundle rb =
        qblocks::parse_residue_bundle(read_file(a.in));
    qblocks::ResidueField F = rb.field();
    std::vector<std::string> sets =
        a.sets.empty() ? std::vector<std::string>{"all"} : a.sets;
    for (const auto& set : sets) {
      std::vector<qblocks::RMat> gens;
      for (auto& [nm, g] : resolve_set(rb, set)) gens.push_back(g);
      run_one(F, std::to_string(rb.p), rb.spec.name(), set, gens);
    }
  }
  a.sink.write("", t.render(a.sink));
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// compare-images

struct CompareArgs {
  std::string in;
  std::uint64_t cap = 10000000;
  bool projective = false;
  std::uint64_t seed = 20260818;
  std::uint64_t steps = 3000000;
  bool allow_undecided = false;
  Sink sink;
};

int run_compare_images(const CompareArgs& a) {
  qblocks::ResidueBundle rb = qblocks::parse_residue_bundle(read_file(a.in));
  qblocks::ResidueField F = rb.field();
  std::vector<std::pair<std::string, qblocks::RMat>> curves, pushes;
  for (const auto& m : rb.matrices)
    (m.role == "curve" ? curves : pushes).emplace_back(m.name, m.mat);
  if (curves.empty() || pushes.empty())
    throw std::invalid_argument(
        "compare-images needs both curve and push matrices in the bundle");

  std::vector<qblocks::MembershipHint> ab, ba;
  if (rb.spec.kind == qblocks::SurfaceKind::TwiceHoledTorus) {
    ab = qblocks::tht_curve_hints_over_pushes();
    ba = qblocks::tht_push_hints_over_curves();
  }
  qblocks::SubgroupComparison cmp = qblocks::same_subgroup(
      F, curves, pushes, ab, ba, a.cap, a.projective, a.seed, a.steps);
  qblocks::NormalityReport norm;
  if (cmp.verdict == "same") {
    // coinciding subgroups: every group is normal in itself
    norm.verdict = "normal";
  } else {
    norm = qblocks::normality_check(F, curves, pushes, a.cap, a.projective);
  }

  Table t;
  t.columns = {"item", "verdict", "detail"};
  t.row({"same-subgroup", cmp.verdict, cmp.detail});
  t.row({"normality", norm.verdict,
         cmp.verdict == "same"
             ? "the images coincide"
             : (norm.failures.empty()
                    ? "push image is normal in the twist image"
                    : norm.failures.front())});
  for (const auto& c : cmp.certificates) {
    std::size_t eq = c.find(" = ");
    std::string word = c.substr(eq + 3);
    // walk-found words can be enormous; they were verified exactly before
    // being reported, so summarize them for display
    std::size_t letters =
        std::count(word.begin(), word.end(), '*') + (word.empty() ? 0 : 1);
    if (word.size() > 160)
      word = "(verified search word, " + std::to_string(letters) + " letters)";
    t.row({"certificate", c.substr(0, eq), word});
  }
  a.sink.write("", t.render(a.sink));

  bool pass = cmp.verdict == "same" && norm.verdict == "normal";
  if (a.allow_undecided &&
      (cmp.verdict == "undecided" || norm.verdict == "undecided"))
    pass = cmp.verdict != "different" && norm.verdict != "not-normal";
  return pass ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// roundtrip

struct RoundtripArgs {
  std::string in;
  Sink sink;
};

int run_roundtrip(const RoundtripArgs& a) {
  std::string text = read_file(a.in);
  std::string kind, again;
  if (text.rfind("qblocks-bundle:1\n", 0) == 0) {
    kind = "bundle";
    again = qblocks::serialize_bundle(qblocks::parse_bundle(text));
  } else if (text.rfind("qblocks-residues:1\n", 0) == 0) {
    kind = "residues";
    again = qblocks::serialize_residue_bundle(
        qblocks::parse_residue_bundle(text));
  } else if (text.rfind("g\tp\tlabels\tdim\tmethod\n", 0) == 0 ||
             text.rfind("# ", 0) == 0) {
    kind = "dim-table";
    again = qblocks::serialize_dim_table(qblocks::parse_dim_table(text));
  } else {
    std::cerr << "unrecognized file type\n";
    return kCheckFailed;
  }
  if (again != text) {
    std::size_t off = 0;
    while (off < again.size() && off < text.size() && again[off] == text[off])
      ++off;
    std::cerr << "round-trip mismatch at byte " << off << "\n";
    return kCheckFailed;
  }
  std::string s;
  if (a.sink.json) {
    njson j;
    j["file"] = a.in;
    j["kind"] = kind;
    j["status"] = "ok";
    j["bytes"] = text.size();
    s = j.dump(2) + "\n";
  } else {
    s = "roundtrip ok: " + kind + ", " + std::to_string(text.size()) +
        " bytes\n";
  }
  a.sink.write("", s);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  static const std::vector<std::string> kCommands{
      "dims",       "verify-lemmas", "square-scan",    "build-rep",
      "check-rep",  "push-explore",  "reduce",         "closure",
      "compare-images", "roundtrip"};
  if (argc >= 2 && argv[1][0] != '-') {
    if (std::find(kCommands.begin(), kCommands.end(), std::string(argv[1])) ==
        kCommands.end()) {
      std::cerr << "unknown subcommand: " << argv[1] << "\n";
      return kUnknownCommand;
    }
  }

  CLI::App app{
      "exact conformal-block dimensions, quantum representations, and their "
      "finite quotients"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");

  DimsArgs dims;
  CLI::App* cdims = app.add_subcommand("dims", "dimension tables");
  cdims->add_option("--p", dims.ps, "prime level(s)")->required();
  cdims->add_option("--g", dims.gs, "genus value(s)")->required();
  cdims->add_option("--label", dims.label, "boundary colors of one tuple");
  cdims->add_flag("--all-labels", dims.all_labels,
                  "every label tuple up to --max-len");
  cdims->add_option("--max-len", dims.max_len, "tuple length bound (<= 2)");
  cdims->add_option("--method", dims.method,
                    "enumeration|recursion|verlinde|closed-form|all");
  cdims->add_flag("--agree", dims.agree, "fail unless all methods agree");
  dims.sink.add_to(cdims);

  LemmaArgs lem;
  CLI::App* clem = app.add_subcommand("verify-lemmas",
                                      "compare/growth/decomposition checks");
  clem->add_option("--p", lem.ps, "prime level(s)")->required();
  clem->add_option("--gmax", lem.gmax, "largest genus checked");
  clem->add_option("--ratio-tol", lem.ratio_tol,
                   "make the genus-2 ratio a check against 0.7");
  lem.sink.add_to(clem);

  ScanArgs scan;
  CLI::App* cscan = app.add_subcommand(
      "square-scan", "test 1 + 8 dim W_{3,(p-3)} for squares over primes");
  cscan->add_option("--max", scan.max, "scan primes up to this bound");
  scan.sink.add_to(cscan);

  BuildArgs build;
  CLI::App* cbuild = app.add_subcommand("build-rep", "write a matrix bundle");
  cbuild->add_option("--spec", build.spec, "surface spec name")->required();
  cbuild->add_option("--p", build.p, "prime level")->required();
  cbuild->add_option("--t", build.t, "root exponent (A = -zeta^{t(p+1)/2})");
  cbuild->add_option("--hint", build.hints, "annotation lines for the bundle");
  build.sink.add_to(cbuild);

  CheckArgs check;
  CLI::App* ccheck = app.add_subcommand(
      "check-rep", "relations, invariance, symmetry, and loop-order checks");
  ccheck->add_option("--spec", check.spec, "surface spec name")->required();
  ccheck->add_option("--p", check.p, "prime level")->required();
  ccheck->add_option("--t", check.t, "root exponent");
  ccheck->add_option("--checks", check.checks,
                     "subset of relations,unitary,twists,scalars,conj,galois,"
                     "burnside");
  check.sink.add_to(ccheck);

  PushArgs push;
  CLI::App* cpush = app.add_subcommand(
      "push-explore", "word search and spectrum verdicts for based loops");
  cpush->add_option("--spec", push.spec, "surface spec name")->required();
  cpush->add_option("--p", push.p, "prime level")->required();
  cpush->add_option("--t", push.t, "root exponent");
  cpush->add_option("--max-len", push.max_len, "word length bound");
  cpush->add_option("--word", push.word, "spectrum of one explicit word");
  cpush->add_flag("--expect-infinite", push.expect_infinite,
                  "fail unless the word has infinite order");
  cpush->add_flag("--expect-finite", push.expect_finite,
                  "fail unless the word has finite order");
  push.sink.add_to(cpush);

  ReduceArgs reduce;
  CLI::App* creduce = app.add_subcommand(
      "reduce", "reduce a bundle along a prime above q");
  creduce->add_option("--in", reduce.in, "input bundle file")->required();
  creduce->add_option("--q", reduce.q,
                      "residue characteristic (default: smallest split prime)");
  creduce->add_option("--modulus-index", reduce.modulus_index,
                      "which sorted factor of the cyclotomic polynomial");
  reduce.sink.add_to(creduce);

  ClosureArgs closure;
  CLI::App* cclosure = app.add_subcommand(
      "closure", "breadth-first closure of generated matrix groups");
  cclosure->add_option("--in", closure.in, "input residue bundle");
  cclosure->add_option("--sl2", closure.sl2,
                       "closure of the SL(2) transvections over F_q instead");
  cclosure->add_option("--set", closure.sets,
                       "curves|pushes|all|comma-joined names (repeatable)");
  cclosure->add_option("--cap", closure.cap, "element cap");
  cclosure->add_flag("--projective", closure.projective,
                     "scale first nonzero entry to 1 before hashing");
  cclosure->add_option("--expect-order", closure.expect_order,
                       "fail unless every closure completes at this order");
  closure.sink.add_to(cclosure);

  CompareArgs compare;
  CLI::App* ccompare = app.add_subcommand(
      "compare-images", "same-subgroup and normality for curve vs push images");
  ccompare->add_option("--in", compare.in, "input residue bundle")->required();
  ccompare->add_option("--cap", compare.cap, "closure element cap");
  ccompare->add_flag("--projective", compare.projective, "projective classes");
  ccompare->add_option("--seed", compare.seed, "search seed");
  ccompare->add_option("--steps", compare.steps, "search walk length");
  ccompare->add_flag("--allow-undecided", compare.allow_undecided,
                     "exit 0 when the verdict is undecided");
  compare.sink.add_to(ccompare);

  RoundtripArgs rt;
  CLI::App* crt = app.add_subcommand(
      "roundtrip", "verify parse -> serialize is byte-identical");
  crt->add_option("--in", rt.in, "file to verify")->required();
  rt.sink.add_to(crt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ConfigError& e) {
    app.exit(e);
    return kInvalidConfig;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidConfig;
  }

  try {
    if (app.got_subcommand(cdims)) return run_dims(dims);
    if (app.got_subcommand(clem)) return run_verify_lemmas(lem);
    if (app.got_subcommand(cscan)) return run_square_scan(scan);
    if (app.got_subcommand(cbuild)) return run_build_rep(build);
    if (app.got_subcommand(ccheck)) return run_check_rep(check);
    if (app.got_subcommand(cpush)) return run_push_explore(push);
    if (app.got_subcommand(creduce)) return run_reduce(reduce);
    if (app.got_subcommand(cclosure)) return run_closure(closure);
    if (app.got_subcommand(ccompare)) return run_compare_images(compare);
    if (app.got_subcommand(crt)) return run_roundtrip(rt);
    std::cerr << "no subcommand selected\n";
    return kUnknownCommand;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.msg << "\n";
    return kIoFailure;
  } catch (const qblocks::parse_error& e) {
    std::cerr << "corruption at byte " << e.offset << ": " << e.what() << "\n";
    return kCheckFailed;
  } catch (const qblocks::bad_prime_error& e) {
    std::cerr << "invalid cell: " << e.what() << " on entry " << e.entry
              << "\n";
    return kInvalidConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}
