#include "retard_oc/problem_file.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "retard_oc/errors.hpp"

namespace retard_oc {

double Polynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  Polynomial d;
  for (std::size_t k = 1; k < coeffs.size(); ++k) d.coeffs.push_back(static_cast<double>(k) * coeffs[k]);
  return d;
}

namespace {

struct Value {
  enum class Kind { number, poly, list, word } kind = Kind::number;
  std::string text;  // numbers and words
  Polynomial poly;   // numbers and polys
  std::vector<Value> items;
};

class ValueParser {
 public:
  ValueParser(std::string_view src, int line) : src_(src), line_(line) {}

  Value parse_all() {
    Value v = parse_value();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected trailing text '" + std::string(src_.substr(pos_)) + "'");
    return v;
  }

  // "box [..] [..]" is the only multi-token top-level form.
  Value parse_top() {
    skip_space();
    Value first = parse_value();
    skip_space();
    if (first.kind == Value::Kind::word && first.text == "box") {
      Value box;
      box.kind = Value::Kind::word;
      box.text = "box";
      box.items.push_back(parse_value());
      box.items.push_back(parse_value());
      skip_space();
      if (pos_ != src_.size()) fail("unexpected text after box bounds");
      return box;
    }
    if (pos_ != src_.size()) fail("unexpected trailing text '" + std::string(src_.substr(pos_)) + "'");
    return first;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Value parse_value() {
    skip_space();
    if (pos_ >= src_.size()) fail("missing value");
    const char c = src_[pos_];
    if (c == '[') {
      ++pos_;
      Value list;
      list.kind = Value::Kind::list;
      if (accept(']')) fail("empty list");
      do {
        list.items.push_back(parse_value());
      } while (accept(','));
      expect(']');
      return list;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
        ++end;
      Value w;
      w.kind = Value::Kind::word;
      w.text = std::string(src_.substr(pos_, end - pos_));
      pos_ = end;
      if (w.text == "poly") {
        expect('(');
        Value p;
        p.kind = Value::Kind::poly;
        do {
          p.poly.coeffs.push_back(parse_number().poly.coeffs.front());
        } while (accept(','));
        expect(')');
        return p;
      }
      return w;
    }
    return parse_number();
  }

  Value parse_number() {
    skip_space();
    std::size_t end = pos_;
    while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) ||
                                 src_[end] == '.' || src_[end] == '/' || src_[end] == '-' ||
                                 src_[end] == '+'))
      ++end;
    const std::string text(src_.substr(pos_, end - pos_));
    if (text.empty()) fail("expected a number");
    Value v;
    v.kind = Value::Kind::number;
    v.text = text;
    try {
      v.poly.coeffs.push_back(Rational::parse(text).to_double());
    } catch (const std::exception&) {
      double d = 0.0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), d);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        fail("malformed number '" + text + "'");
      v.poly.coeffs.push_back(d);
    }
    pos_ = end;
    return v;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_;
};

struct Entry {
  Value value;
  int line = 0;
};

std::map<std::string, Entry> read_entries(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    std::string key = raw.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key.empty()) throw ParseError(line, "missing key");
    if (entries.count(key)) throw ParseError(line, "duplicate key '" + key + "'");
    ValueParser parser(std::string_view(raw).substr(eq + 1), line);
    entries[key] = Entry{parser.parse_top(), line};
  }
  return entries;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries, int last_line)
      : entries_(std::move(entries)), last_line_(last_line) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const Entry& entry(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ParseError(last_line_, "missing required key '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  Rational rational(const std::string& key) {
    const Entry& e = entry(key);
    if (e.value.kind != Value::Kind::number) throw ParseError(e.line, key + " must be a number");
    try {
      return Rational::parse(e.value.text);
    } catch (const std::exception& ex) {
      throw ParseError(e.line, key + ": " + ex.what());
    }
  }

  int integer(const std::string& key) {
    const Rational q = rational(key);
    if (!q.is_integer() || q.num() < 1) throw ParseError(entry(key).line, key + " must be a positive integer");
    return static_cast<int>(q.num());
  }

  std::string word(const std::string& key) {
    const Entry& e = entry(key);
    if (e.value.kind != Value::Kind::word) throw ParseError(e.line, key + " must be a word");
    return e.value.text;
  }

  static Polynomial as_poly(const Value& v, int line, const std::string& key) {
    if (v.kind != Value::Kind::number && v.kind != Value::Kind::poly)
      throw ParseError(line, key + ": expected a number or poly(...)");
    return v.poly;
  }

  static std::vector<Polynomial> as_vector(const Value& v, int line, const std::string& key,
                                           int size) {
    if (v.kind != Value::Kind::list) throw ParseError(line, key + ": expected a vector");
    if (static_cast<int>(v.items.size()) != size)
      throw ParseError(line, key + ": expected " + std::to_string(size) + " entries");
    std::vector<Polynomial> out;
    for (const auto& item : v.items) out.push_back(as_poly(item, line, key));
    return out;
  }

  std::vector<Polynomial> poly_vector(const std::string& key, int size) {
    const Entry& e = entry(key);
    return as_vector(e.value, e.line, key, size);
  }

  Polynomial poly(const std::string& key) {
    const Entry& e = entry(key);
    return as_poly(e.value, e.line, key);
  }

  std::vector<std::vector<Polynomial>> poly_matrix(const std::string& key, int rows, int cols) {
    const Entry& e = entry(key);
    if (e.value.kind != Value::Kind::list || static_cast<int>(e.value.items.size()) != rows)
      throw ParseError(e.line, key + ": expected a matrix with " + std::to_string(rows) + " rows");
    std::vector<std::vector<Polynomial>> out;
    for (const auto& row : e.value.items) out.push_back(as_vector(row, e.line, key, cols));
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, e] : entries_)
      if (!used_.count(key)) throw ParseError(e.line, "unknown key '" + key + "'");
  }

 private:
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
  int last_line_;
};

using PolyMatrix = std::vector<std::vector<Polynomial>>;

Matrix eval_matrix(const PolyMatrix& pm, double t) {
  Matrix out(pm.size(), pm.empty() ? 0 : pm.front().size());
  for (std::size_t i = 0; i < pm.size(); ++i)
    for (std::size_t j = 0; j < pm[i].size(); ++j) out(i, j) = pm[i][j](t);
  return out;
}

Vector eval_vector(const std::vector<Polynomial>& pv, double t) {
  Vector out(pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) out[i] = pv[i](t);
  return out;
}

PolyMatrix zero_matrix(int rows, int cols) {
  return PolyMatrix(rows, std::vector<Polynomial>(cols, Polynomial{{0.0}}));
}

std::vector<Polynomial> zero_vector(int size) {
  return std::vector<Polynomial>(size, Polynomial{{0.0}});
}

/// q(t, p, w) = p'Qpp p + p'Qpw w + w'Qww w + lp.p + lw.w + c
struct QuadraticForm {
  PolyMatrix pp, pw, ww;
  std::vector<Polynomial> lp, lw;
  Polynomial c{{0.0}};

  double value(double t, const Vector& p, const Vector& w) const {
    return p.dot(eval_matrix(pp, t) * p) + p.dot(eval_matrix(pw, t) * w) +
           w.dot(eval_matrix(ww, t) * w) + eval_vector(lp, t).dot(p) + eval_vector(lw, t).dot(w) +
           c(t);
  }

  std::pair<Vector, Vector> gradient(double t, const Vector& p, const Vector& w) const {
    const Matrix Qpp = eval_matrix(pp, t), Qpw = eval_matrix(pw, t), Qww = eval_matrix(ww, t);
    Vector gp = (Qpp + Qpp.transpose()) * p + Qpw * w + eval_vector(lp, t);
    Vector gw = Qpw.transpose() * p + (Qww + Qww.transpose()) * w + eval_vector(lw, t);
    return {gp, gw};
  }
};

QuadraticForm read_form(Reader& rd, const std::string& p, const std::string& w, int dim,
                        bool with_const) {
  QuadraticForm q;
  auto mat = [&](const std::string& key) {
    return rd.has(key) ? rd.poly_matrix(key, dim, dim) : zero_matrix(dim, dim);
  };
  auto vec = [&](const std::string& key) {
    return rd.has(key) ? rd.poly_vector(key, dim) : zero_vector(dim);
  };
  q.pp = mat("cost." + p + p);
  q.pw = mat("cost." + p + w);
  q.ww = mat("cost." + w + w);
  q.lp = vec("cost." + p);
  q.lw = vec("cost." + w);
  if (with_const && rd.has("cost.const")) q.c = rd.poly("cost.const");
  return q;
}

/// g(t, u) = c(t) + B(t) u + (u' Q_k(t) u)_k
struct ControlMap {
  std::vector<Polynomial> c;
  PolyMatrix lin;
  std::vector<PolyMatrix> quad;  // empty entries mean no quadratic term

  Vector value(double t, const Vector& u) const {
    Vector out = eval_vector(c, t) + eval_matrix(lin, t) * u;
    for (std::size_t k = 0; k < quad.size(); ++k)
      if (!quad[k].empty()) out[k] += u.dot(eval_matrix(quad[k], t) * u);
    return out;
  }

  Matrix jacobian(double t, const Vector& u) const {
    Matrix J = eval_matrix(lin, t);
    for (std::size_t k = 0; k < quad.size(); ++k)
      if (!quad[k].empty()) {
        const Matrix Q = eval_matrix(quad[k], t);
        J.row(k) += ((Q + Q.transpose()) * u).transpose();
      }
    return J;
  }
};

ControlMap read_control_map(Reader& rd, const std::string& prefix, int n, int m) {
  ControlMap g;
  g.c = rd.has(prefix + ".const") ? rd.poly_vector(prefix + ".const", n) : zero_vector(n);
  g.lin = rd.has(prefix + ".lin") ? rd.poly_matrix(prefix + ".lin", n, m) : zero_matrix(n, m);
  g.quad.resize(n);
  for (int k = 0; k < n; ++k) {
    const std::string key = prefix + ".quad." + std::to_string(k + 1);
    if (rd.has(key)) g.quad[k] = rd.poly_matrix(key, m, m);
  }
  return g;
}

Trajectory poly_history(const Rational& start, const Rational& end,
                        const std::vector<Polynomial>& pv) {
  return Trajectory::function(static_cast<int>(pv.size()), start, end,
                              [pv](double t) { return eval_vector(pv, t); });
}

int count_lines(std::string_view text) {
  int lines = 1;
  for (char c : text)
    if (c == '\n') ++lines;
  return lines;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

StateLinearProblem parse_problem(std::string_view text) {
  Reader rd(read_entries(text), count_lines(text));
  StateLinearProblem p;
  p.name = rd.has("name") ? rd.word("name") : "file";
  p.a = rd.rational("a");
  p.b = rd.rational("b");
  p.r = rd.rational("r");
  p.s = rd.rational("s");
  const int line_b = rd.entry("b").line;
  try {
    (void)make_lattice(p.a, p.b, p.r, p.s);
  } catch (const std::exception& ex) {
    throw ParseError(line_b, ex.what());
  }
  const int n = p.n = rd.integer("n");
  const int m = p.m = rd.integer("m");

  const PolyMatrix A = rd.poly_matrix("A", n, n);
  const PolyMatrix AD = rd.has("A_D") ? rd.poly_matrix("A_D", n, n) : zero_matrix(n, n);
  p.A = [A](double t) { return eval_matrix(A, t); };
  p.A_D = [AD](double t) { return eval_matrix(AD, t); };

  const ControlMap g = read_control_map(rd, "g", n, m);
  const ControlMap gD = read_control_map(rd, "g_D", n, m);
  p.g = [g](double t, const Vector& u) { return g.value(t, u); };
  p.g_D = [gD](double t, const Vector& v) { return gD.value(t, v); };
  p.g_jacobian = [g](double t, const Vector& u) { return g.jacobian(t, u); };
  p.g_D_jacobian = [gD](double t, const Vector& v) { return gD.jacobian(t, v); };

  const QuadraticForm fx = read_form(rd, "x", "y", n, true);
  const QuadraticForm fu = read_form(rd, "u", "v", m, false);
  p.state_cost = [fx](double t, const Vector& x, const Vector& y) { return fx.value(t, x, y); };
  p.state_cost_gradient = [fx](double t, const Vector& x, const Vector& y) {
    return fx.gradient(t, x, y);
  };
  p.control_cost = [fu](double t, const Vector& u, const Vector& v) { return fu.value(t, u, v); };
  p.control_cost_gradient = [fu](double t, const Vector& u, const Vector& v) {
    return fu.gradient(t, u, v);
  };
  p.control_quadratic = true;

  p.state_history = poly_history(p.a - p.r, p.a, rd.poly_vector("phi", n));
  if (!p.s.is_zero())
    p.control_history = poly_history(p.a - p.s, p.a,
                                     rd.has("psi") ? rd.poly_vector("psi", m) : zero_vector(m));

  p.controls = ControlSet::free(m);
  if (rd.has("U")) {
    const Entry& e = rd.entry("U");
    const bool is_word = e.value.kind == Value::Kind::word;
    if (is_word && e.value.text == "box") {
      const auto lo = Reader::as_vector(e.value.items[0], e.line, "U lower", m);
      const auto hi = Reader::as_vector(e.value.items[1], e.line, "U upper", m);
      const Vector l = eval_vector(lo, 0.0), h = eval_vector(hi, 0.0);
      if ((l.array() > h.array()).any()) throw ParseError(e.line, "U: lower bound above upper");
      p.controls = ControlSet::box(l, h);
    } else if (!is_word || e.value.text != "free") {
      throw ParseError(e.line, "U must be 'free' or 'box [lower] [upper]'");
    }
  }
  rd.reject_unknown();
  return p;
}

StateLinearProblem load_problem_file(const std::string& path) { return parse_problem(slurp(path)); }

ValueFunctionCandidate parse_value_function(std::string_view text,
                                            const CommensurabilityLattice& lattice, int n) {
  Reader rd(read_entries(text), count_lines(text));
  std::vector<ValueFunctionPiece> pieces;
  for (std::int64_t i = 0; i < lattice.cells(); ++i) {
    const std::string idx = std::to_string(i);
    const std::vector<Polynomial> eta = rd.poly_vector("eta." + idx, n);
    const Polynomial c = rd.poly("c." + idx);
    const PolyMatrix P = rd.has("P." + idx) ? rd.poly_matrix("P." + idx, n, n) : zero_matrix(n, n);
    std::vector<Polynomial> eta_dot;
    for (const auto& e : eta) eta_dot.push_back(e.derivative());
    PolyMatrix P_dot = P;
    for (auto& row : P_dot)
      for (auto& e : row) e = e.derivative();
    const Polynomial c_dot = c.derivative();

    ValueFunctionPiece pc;
    pc.start = lattice.breakpoint(i);
    pc.end = lattice.breakpoint(i + 1);
    pc.S = [=](double t, const Vector& x) {
      return x.dot(eval_matrix(P, t) * x) + eval_vector(eta, t).dot(x) + c(t);
    };
    pc.dt = [=](double t, const Vector& x) {
      return x.dot(eval_matrix(P_dot, t) * x) + eval_vector(eta_dot, t).dot(x) + c_dot(t);
    };
    pc.dx = [=](double t, const Vector& x) {
      const Matrix Pt = eval_matrix(P, t);
      return Vector((Pt + Pt.transpose()) * x + eval_vector(eta, t));
    };
    pieces.push_back(std::move(pc));
  }
  rd.reject_unknown();
  return ValueFunctionCandidate(std::move(pieces));
}

ValueFunctionCandidate load_value_function_file(const std::string& path,
                                                const CommensurabilityLattice& lattice, int n) {
  return parse_value_function(slurp(path), lattice, n);
}

}  // namespace retard_oc
