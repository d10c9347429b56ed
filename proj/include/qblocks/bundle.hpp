#pragma once

// Line-oriented file formats: exact matrix bundles, their residue-field
// reductions, and dimension tables.  Serialization is a pure function of the
// data, and parsing is strict — any deviation raises parse_error carrying
// the byte offset of the offending text, and parse followed by serialize
// reproduces a well-formed file byte for byte.

#include <string>
#include <utility>
#include <vector>

#include "qblocks/cyclotomic.hpp"
#include "qblocks/quotients.hpp"
#include "qblocks/residue.hpp"
#include "qblocks/surfaces.hpp"

namespace qblocks {

struct BundleMatrix {
  std::string role;  // "curve" or "push"
  std::string name;
  std::string provenance;
  CycMatrix mat;
};

struct Bundle {
  int p = 0;
  int t = 0;
  SurfaceSpec spec;
  std::vector<std::string> edges;
  std::vector<std::vector<int>> basis;
  std::vector<CycNum> weights;
  std::vector<BundleMatrix> matrices;
  std::vector<std::string> hints;
};

inline Bundle make_bundle(const SurfaceRep& rep) {
  Bundle b;
  b.p = rep.space.p;
  b.t = rep.space.t;
  b.spec = rep.space.spec;
  b.edges = rep.space.edge_names;
  b.basis = rep.space.basis;
  b.weights = rep.space.weights;
  for (const auto& nm : rep.curves)
    b.matrices.push_back({"curve", nm.name, nm.provenance, nm.mat});
  for (const auto& nm : rep.pushes)
    b.matrices.push_back({"push", nm.name, nm.provenance, nm.mat});
  return b;
}

namespace detail {

inline std::string join_ints(const std::vector<int>& v, char sep) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += sep;
    s += std::to_string(v[k]);
  }
  return s;
}

// strict reader over a full file image, tracking byte offsets
struct LineReader {
  const std::string& text;
  std::size_t pos = 0;

  bool eof() const { return pos >= text.size(); }
  std::size_t offset() const { return pos; }

  // consume one '\n'-terminated line, returning it without the newline
  std::string line() {
    if (eof()) throw parse_error(pos, "unexpected end of file");
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos)
      throw parse_error(text.size(), "missing final newline");
    std::string s = text.substr(pos, nl - pos);
    pos = nl + 1;
    return s;
  }

  // peek at the next line without consuming it
  std::string peek() const {
    if (eof()) throw parse_error(pos, "unexpected end of file");
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos)
      throw parse_error(text.size(), "missing final newline");
    return text.substr(pos, nl - pos);
  }

  // the line must start with `prefix`; returns the remainder
  std::string expect(const std::string& prefix) {
    std::size_t at = pos;
    std::string s = line();
    if (s.rfind(prefix, 0) != 0)
      throw parse_error(at, "expected \"" + prefix + "\"");
    return s.substr(prefix.size());
  }
};

inline long parse_long_strict(const std::string& s, std::size_t at) {
  if (s.empty()) throw parse_error(at, "empty integer");
  std::size_t k = s[0] == '-' ? 1 : 0;
  if (k == s.size()) throw parse_error(at, "malformed integer");
  for (; k < s.size(); ++k)
    if (s[k] < '0' || s[k] > '9')
      throw parse_error(at + k, "malformed integer");
  return std::stol(s);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t k = s.find(sep, pos);
    if (k == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, k - pos));
    pos = k + 1;
  }
}

inline std::vector<int> parse_int_tuple(const std::string& s,
                                        std::size_t at) {
  std::vector<int> out;
  for (const std::string& part : split(s, ','))
    out.push_back(static_cast<int>(parse_long_strict(part, at)));
  return out;
}

}  // namespace detail

inline std::string serialize_bundle(const Bundle& b) {
  std::string s = "qblocks-bundle:1\n";
  s += "p:" + std::to_string(b.p) + ";t:" + std::to_string(b.t) + "\n";
  s += "spec:" + b.spec.name() + "\n";
  s += "edges:";
  for (std::size_t k = 0; k < b.edges.size(); ++k) {
    if (k) s += ',';
    s += b.edges[k];
  }
  s += "\nbasis:";
  for (std::size_t k = 0; k < b.basis.size(); ++k) {
    if (k) s += '|';
    s += detail::join_ints(b.basis[k], ',');
  }
  s += "\nweights:";
  for (std::size_t k = 0; k < b.weights.size(); ++k) {
    if (k) s += '|';
    s += b.weights[k].serialize();
  }
  s += '\n';
  for (const auto& m : b.matrices) {
    s += "matrix:" + m.role + ":" + m.name + ";provenance:" + m.provenance +
         "\n";
    for (int i = 0; i < m.mat.rows(); ++i) {
      for (int j = 0; j < m.mat.cols(); ++j) {
        if (j) s += ' ';
        s += m.mat.at(i, j).serialize();
      }
      s += '\n';
    }
  }
  for (const auto& h : b.hints) s += "hint:" + h + "\n";
  s += "end:qblocks-bundle\n";
  return s;
}

inline Bundle parse_bundle(const std::string& text) {
  detail::LineReader rd{text};
  Bundle b;
  rd.expect("qblocks-bundle:1");
  {
    std::size_t at = rd.offset();
    std::string hdr = rd.expect("p:");
    std::size_t semi = hdr.find(";t:");
    if (semi == std::string::npos)
      throw parse_error(at, "expected p:<int>;t:<int>");
    b.p = static_cast<int>(detail::parse_long_strict(hdr.substr(0, semi), at));
    b.t = static_cast<int>(
        detail::parse_long_strict(hdr.substr(semi + 3), at));
    check_level(b.p);
    if (b.t <= 0 || b.t >= b.p)
      throw parse_error(at, "root exponent out of range");
  }
  b.spec = SurfaceSpec::parse(rd.expect("spec:"));
  {
    std::string e = rd.expect("edges:");
    if (!e.empty()) b.edges = detail::split(e, ',');
  }
  {
    std::size_t at = rd.offset();
    std::string bs = rd.expect("basis:");
    if (!bs.empty())
      for (const std::string& part : detail::split(bs, '|'))
        b.basis.push_back(detail::parse_int_tuple(part, at));
  }
  {
    std::size_t at = rd.offset();
    std::string ws = rd.expect("weights:");
    if (!ws.empty())
      for (const std::string& part : detail::split(ws, '|'))
        b.weights.push_back(CycNum::parse(part, at));
    if (b.weights.size() != b.basis.size())
      throw parse_error(at, "weight count does not match basis size");
  }
  const int n = static_cast<int>(b.basis.size());
  while (true) {
    std::string head = rd.peek();
    if (head.rfind("matrix:", 0) != 0) break;
    std::size_t at = rd.offset();
    std::string m = rd.expect("matrix:");
    std::size_t colon = m.find(':');
    std::size_t prov = m.find(";provenance:");
    if (colon == std::string::npos || prov == std::string::npos ||
        colon > prov)
      throw parse_error(at, "expected matrix:<role>:<name>;provenance:<text>");
    BundleMatrix bm;
    bm.role = m.substr(0, colon);
    bm.name = m.substr(colon + 1, prov - colon - 1);
    bm.provenance = m.substr(prov + 12);
    if (bm.role != "curve" && bm.role != "push")
      throw parse_error(at, "unknown matrix role: " + bm.role);
    if (bm.name.empty()) throw parse_error(at, "empty matrix name");
    bm.mat = CycMatrix::identity(b.p, n);
    for (int i = 0; i < n; ++i) {
      std::size_t rowat = rd.offset();
      std::string row = rd.line();
      std::vector<std::string> cells = detail::split(row, ' ');
      if (static_cast<int>(cells.size()) != n)
        throw parse_error(rowat, "expected " + std::to_string(n) +
                              " entries in matrix row");
      std::size_t cellat = rowat;
      for (int j = 0; j < n; ++j) {
        bm.mat.at(i, j) = CycNum::parse(cells[static_cast<std::size_t>(j)],
                                        cellat);
        cellat += cells[static_cast<std::size_t>(j)].size() + 1;
      }
    }
    b.matrices.push_back(std::move(bm));
  }
  while (rd.peek().rfind("hint:", 0) == 0) b.hints.push_back(rd.expect("hint:"));
  rd.expect("end:qblocks-bundle");
  if (!rd.eof()) throw parse_error(rd.offset(), "trailing data after end marker");
  return b;
}

// ---------------------------------------------------------------------------
// residue reduction of a bundle

struct ResidueBundleMatrix {
  std::string role;
  std::string name;
  std::string provenance;
  RMat mat;
};

struct ResidueBundle {
  int p = 0;
  int t = 0;
  long q = 0;
  int f = 0;
  fq::Poly modulus;
  SurfaceSpec spec;
  std::vector<std::string> edges;
  std::vector<std::vector<int>> basis;
  std::vector<ResidueField::Elt> weights;
  std::vector<ResidueBundleMatrix> matrices;
  std::vector<std::string> hints;

  ResidueField field() const { return ResidueField(q, p, modulus); }
};

inline ResidueBundle reduce_bundle(const Bundle& b, const ResidueField& F) {
  if (F.p() != b.p)
    throw std::invalid_argument("field level does not match bundle");
  ResidueBundle r;
  r.p = b.p;
  r.t = b.t;
  r.q = F.q();
  r.f = F.f();
  r.modulus = F.modulus();
  r.spec = b.spec;
  r.edges = b.edges;
  r.basis = b.basis;
  for (const auto& w : b.weights) r.weights.push_back(reduce_mod(w, F));
  for (const auto& m : b.matrices) {
    if (!residue_unitary(F, m.mat, b.weights))
      throw std::runtime_error("reduced matrix loses form invariance: " +
                               m.name);
    r.matrices.push_back({m.role, m.name, m.provenance,
                          reduce_matrix(m.mat, F)});
  }
  r.hints = b.hints;
  return r;
}

namespace detail {

inline std::string join_poly(const fq::Poly& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(v[k]);
  }
  return s;
}

inline std::string elt_vals(const ResidueField::Elt& e) {
  std::string s;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(e[k]);
  }
  return s;
}

inline ResidueField::Elt parse_elt_vals(const std::string& s, int f, long q,
                                        std::size_t at) {
  ResidueField::Elt e;
  for (const std::string& part : split(s, ','))
    e.push_back(parse_long_strict(part, at));
  if (static_cast<int>(e.size()) != f)
    throw parse_error(at, "expected " + std::to_string(f) + " coefficients");
  for (long v : e)
    if (v < 0 || v >= q) throw parse_error(at, "coefficient out of range");
  return e;
}

}  // namespace detail

inline std::string serialize_residue_bundle(const ResidueBundle& b) {
  std::string s = "qblocks-residues:1\n";
  s += "p:" + std::to_string(b.p) + ";t:" + std::to_string(b.t) + "\n";
  s += "q:" + std::to_string(b.q) + ";f:" + std::to_string(b.f) +
       ";mod:" + detail::join_poly(b.modulus) + "\n";
  s += "spec:" + b.spec.name() + "\n";
  s += "edges:";
  for (std::size_t k = 0; k < b.edges.size(); ++k) {
    if (k) s += ',';
    s += b.edges[k];
  }
  s += "\nbasis:";
  for (std::size_t k = 0; k < b.basis.size(); ++k) {
    if (k) s += '|';
    s += detail::join_ints(b.basis[k], ',');
  }
  s += "\nweights:";
  for (std::size_t k = 0; k < b.weights.size(); ++k) {
    if (k) s += '|';
    s += detail::elt_vals(b.weights[k]);
  }
  s += '\n';
  const int f = b.f;
  for (const auto& m : b.matrices) {
    s += "matrix:" + m.role + ":" + m.name + ";provenance:" + m.provenance +
         "\n";
    const int n = m.mat.n;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j) s += ' ';
        std::size_t base = (static_cast<std::size_t>(i) * n + j) * f;
        for (int k = 0; k < f; ++k) {
          if (k) s += ',';
          s += std::to_string(m.mat.e[base + k]);
        }
      }
      s += '\n';
    }
  }
  for (const auto& h : b.hints) s += "hint:" + h + "\n";
  s += "end:qblocks-residues\n";
  return s;
}

inline ResidueBundle parse_residue_bundle(const std::string& text) {
  detail::LineReader rd{text};
  ResidueBundle b;
  rd.expect("qblocks-residues:1");
  {
    std::size_t at = rd.offset();
    std::string hdr = rd.expect("p:");
    std::size_t semi = hdr.find(";t:");
    if (semi == std::string::npos)
      throw parse_error(at, "expected p:<int>;t:<int>");
    b.p = static_cast<int>(detail::parse_long_strict(hdr.substr(0, semi), at));
    b.t = static_cast<int>(
        detail::parse_long_strict(hdr.substr(semi + 3), at));
  }
  {
    std::size_t at = rd.offset();
    std::string hdr = rd.expect("q:");
    std::size_t fpos = hdr.find(";f:");
    std::size_t mpos = hdr.find(";mod:");
    if (fpos == std::string::npos || mpos == std::string::npos || fpos > mpos)
      throw parse_error(at, "expected q:<int>;f:<int>;mod:<coeffs>");
    b.q = detail::parse_long_strict(hdr.substr(0, fpos), at);
    b.f = static_cast<int>(
        detail::parse_long_strict(hdr.substr(fpos + 3, mpos - fpos - 3), at));
    for (const std::string& part :
         detail::split(hdr.substr(mpos + 5), ','))
      b.modulus.push_back(detail::parse_long_strict(part, at));
    if (static_cast<int>(b.modulus.size()) != b.f + 1 || b.modulus.back() != 1)
      throw parse_error(at, "modulus must be monic of degree f");
    for (long v : b.modulus)
      if (v < 0 || v >= b.q)
        throw parse_error(at, "modulus coefficient out of range");
  }
  b.spec = SurfaceSpec::parse(rd.expect("spec:"));
  {
    std::string e = rd.expect("edges:");
    if (!e.empty()) b.edges = detail::split(e, ',');
  }
  {
    std::size_t at = rd.offset();
    std::string bs = rd.expect("basis:");
    if (!bs.empty())
      for (const std::string& part : detail::split(bs, '|'))
        b.basis.push_back(detail::parse_int_tuple(part, at));
  }
  {
    std::size_t at = rd.offset();
    std::string ws = rd.expect("weights:");
    if (!ws.empty())
      for (const std::string& part : detail::split(ws, '|'))
        b.weights.push_back(detail::parse_elt_vals(part, b.f, b.q, at));
    if (b.weights.size() != b.basis.size())
      throw parse_error(at, "weight count does not match basis size");
  }
  const int n = static_cast<int>(b.basis.size());
  ResidueField F = b.field();
  while (true) {
    std::string head = rd.peek();
    if (head.rfind("matrix:", 0) != 0) break;
    std::size_t at = rd.offset();
    std::string m = rd.expect("matrix:");
    std::size_t colon = m.find(':');
    std::size_t prov = m.find(";provenance:");
    if (colon == std::string::npos || prov == std::string::npos ||
        colon > prov)
      throw parse_error(at, "expected matrix:<role>:<name>;provenance:<text>");
    ResidueBundleMatrix bm;
    bm.role = m.substr(0, colon);
    bm.name = m.substr(colon + 1, prov - colon - 1);
    bm.provenance = m.substr(prov + 12);
    if (bm.role != "curve" && bm.role != "push")
      throw parse_error(at, "unknown matrix role: " + bm.role);
    bm.mat = rmat_zero(F, n);
    for (int i = 0; i < n; ++i) {
      std::size_t rowat = rd.offset();
      std::string row = rd.line();
      std::vector<std::string> cells = detail::split(row, ' ');
      if (static_cast<int>(cells.size()) != n)
        throw parse_error(rowat, "expected " + std::to_string(n) +
                              " entries in matrix row");
      std::size_t cellat = rowat;
      for (int j = 0; j < n; ++j) {
        rmat_set(F, bm.mat, i, j,
                 detail::parse_elt_vals(cells[static_cast<std::size_t>(j)],
                                        b.f, b.q, cellat));
        cellat += cells[static_cast<std::size_t>(j)].size() + 1;
      }
    }
    b.matrices.push_back(std::move(bm));
  }
  while (rd.peek().rfind("hint:", 0) == 0) b.hints.push_back(rd.expect("hint:"));
  rd.expect("end:qblocks-residues");
  if (!rd.eof()) throw parse_error(rd.offset(), "trailing data after end marker");
  return b;
}

// ---------------------------------------------------------------------------
// dimension tables

struct DimRow {
  int g = 0;
  int p = 0;
  std::vector<int> labels;
  mpz_class dim;
  std::string method;  // enumeration | recursion | closed-form | verlinde
};

struct DimTable {
  std::string timestamp_line;  // full "# ..." line, or empty when suppressed
  std::vector<DimRow> rows;
};

inline std::string labels_to_string(const std::vector<int>& labels) {
  return "(" + detail::join_ints(labels, ',') + ")";
}

inline std::vector<int> labels_from_string(const std::string& s,
                                           std::size_t at) {
  if (s.size() < 2 || s.front() != '(' || s.back() != ')')
    throw parse_error(at, "expected (labels)");
  std::string in = s.substr(1, s.size() - 2);
  if (in.empty()) return {};
  return detail::parse_int_tuple(in, at);
}

inline std::string serialize_dim_table(const DimTable& t) {
  std::string s;
  if (!t.timestamp_line.empty()) s += t.timestamp_line + "\n";
  s += "g\tp\tlabels\tdim\tmethod\n";
  for (const auto& r : t.rows)
    s += std::to_string(r.g) + "\t" + std::to_string(r.p) + "\t" +
         labels_to_string(r.labels) + "\t" + r.dim.get_str() + "\t" +
         r.method + "\n";
  return s;
}

inline DimTable parse_dim_table(const std::string& text) {
  detail::LineReader rd{text};
  DimTable t;
  if (!rd.eof() && rd.peek().rfind("# ", 0) == 0) t.timestamp_line = rd.line();
  std::size_t at = rd.offset();
  if (rd.line() != "g\tp\tlabels\tdim\tmethod")
    throw parse_error(at, "expected dimension table header");
  while (!rd.eof()) {
    std::size_t rowat = rd.offset();
    std::vector<std::string> cells = detail::split(rd.line(), '\t');
    if (cells.size() != 5)
      throw parse_error(rowat, "expected 5 tab-separated fields");
    DimRow r;
    r.g = static_cast<int>(detail::parse_long_strict(cells[0], rowat));
    r.p = static_cast<int>(detail::parse_long_strict(cells[1], rowat));
    r.labels = labels_from_string(cells[2], rowat);
    if (cells[3].empty() ||
        cells[3].find_first_not_of("0123456789") != std::string::npos)
      throw parse_error(rowat, "malformed dimension");
    r.dim = mpz_class(cells[3]);
    if (cells[4].empty()) throw parse_error(rowat, "empty method tag");
    r.method = cells[4];
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace qblocks
