#pragma once

// Semantics of the definition language: name resolution, dimension checks and
// execution of builders and checks.
//
// The same interpreter runs twice. In validation mode (inside parse) every
// declaration is constructed with the unchecked assemble_* constructors and
// checks only resolve their names; any error becomes a positioned DslError.
// In execution mode builders verify their input, and a rejection becomes a
// failed report entry; names depending on a rejected build are unavailable
// and every check touching them fails with the reason.

#include <jqn/dirac.hpp>
#include <jqn/dsl.hpp>

#include <map>
#include <set>
#include <variant>

namespace jqn::dsl {

struct RunOptions {
  int gen_degree = 2;
};

namespace detail {

struct ChartObj {
  std::vector<std::string> coords;
};
struct AlgebroidObj {
  JacobiAlgebroid J;
  bool has_cocycle = false;
};
struct ElementObj {  // bivector, form or multivector on a named algebroid
  std::string owner;
  Graded g;
};
struct EndoObj {
  std::string owner;
  EndomorphismField N;
};
struct QjbObj {
  QuasiJacobiBialgebroid Q;
};
struct JqnObj {
  JqnStructure T;
};
struct CourantObj {
  CourantJacobiStructure E;
};
struct SubObj {
  Submanifold P;
};
struct BundleObj {
  SupportedSubbundle F;
};
struct SplitObj {
  CourantJacobiStructure E;
  Submanifold P;
  std::vector<Graded> L, C;
};
struct MapObj {
  BundleMap psi;
  std::string source, target;
};
struct TwistedObj {
  TwistedPair tp;
  JacobiAlgebroid J;
  Graded psi;
};
struct Unavailable {
  std::string reason;
};

using Object = std::variant<ChartObj, AlgebroidObj, ElementObj, EndoObj, QjbObj, JqnObj, CourantObj, SubObj, BundleObj,
                            SplitObj, MapObj, TwistedObj, Unavailable>;

template <class T> constexpr const char* kind_of = "";
template <> constexpr const char* kind_of<ChartObj> = "chart";
template <> constexpr const char* kind_of<AlgebroidObj> = "algebroid";
template <> constexpr const char* kind_of<ElementObj> = "graded element";
template <> constexpr const char* kind_of<EndoObj> = "endomorphism";
template <> constexpr const char* kind_of<QjbObj> = "quasi-Jacobi bialgebroid";
template <> constexpr const char* kind_of<JqnObj> = "Jacobi quasi-Nijenhuis structure";
template <> constexpr const char* kind_of<CourantObj> = "Courant-Jacobi structure";
template <> constexpr const char* kind_of<SubObj> = "submanifold";
template <> constexpr const char* kind_of<BundleObj> = "supported subbundle";
template <> constexpr const char* kind_of<SplitObj> = "split subbundle";
template <> constexpr const char* kind_of<MapObj> = "bundle map";
template <> constexpr const char* kind_of<TwistedObj> = "twisted pair";
template <> constexpr const char* kind_of<Unavailable> = "unavailable";

inline const char* kind_name(const Object& o) {
  return std::visit([](const auto& x) { return kind_of<std::decay_t<decltype(x)>>; }, o);
}

/// Thrown when a statement touches a name whose build was rejected.
class UnavailableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int inversion_sign(std::vector<int>& idx) {
  int inv = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j)
      if (idx[i] > idx[j]) ++inv;
  std::sort(idx.begin(), idx.end());
  return inv % 2 ? -1 : 1;
}

}  // namespace detail

class Interpreter {
 public:
  Interpreter(bool execute, RunOptions opts) : exec_(execute), opts_(opts) {}

  void run(const Statement& s, CheckReport& rep) {
    const std::string& k = s.kind();
    std::string declared = declared_name(s);
    try {
      dispatch(s, rep);
    } catch (const DslError&) {
      if (!exec_) throw;
      mark_unavailable(declared, "invalid declaration");
      rep.add(k + ":" + declared, "statement", false, "invalid declaration");
    } catch (const std::exception& e) {
      if (!exec_) throw DslError(s.pos(), e.what());
      std::string why = e.what();
      mark_unavailable(declared, why);
      if (k == "build" && s.header.word(1) == "twisted") mark_members_unavailable(declared, why);
      if (k == "check") rep.add(check_prefix(s), "check " + s.header.word(1), false, why);
      else rep.add(k + ":" + declared, "construct " + k + " " + declared, false, why);
    }
  }

 private:
  bool exec_;
  RunOptions opts_;
  std::map<std::string, detail::Object> env_;

  using Obj = detail::Object;

  // ------------------------------------------------------------------
  // Statement helpers

  static std::string declared_name(const Statement& s) {
    const auto& k = s.kind();
    if (k == "check") return {};
    if (k == "build") return s.header.word(2);
    return s.header.word(1);
  }

  static std::string check_prefix(const Statement& s) {
    std::string p = s.header.word(1) + ":";
    for (std::size_t i = 2; i < s.header.head.size(); ++i) p += (i > 2 ? "," : "") + s.header.word(i);
    return p;
  }

  void mark_unavailable(const std::string& name, const std::string& why) {
    if (!name.empty()) env_.insert_or_assign(name, detail::Unavailable{why});
  }

  [[noreturn]] static void fail(const Pos& p, const std::string& msg) { throw DslError(p, msg); }

  /// Head must be exactly `words`, where "$" marks a name slot; returns the slot values.
  static std::vector<const Value*> shape(const Line& l, const std::vector<std::string>& words, const std::string& usage) {
    std::vector<const Value*> slots;
    if (l.head.size() != words.size()) fail(l.pos, "expected `" + usage + "`");
    for (std::size_t i = 0; i < words.size(); ++i) {
      const Value& v = l.head[i];
      if (words[i] == "()") {
        if (v.kind != Value::Kind::tuple) fail(v.pos, "expected a coordinate list like (x, y)");
        slots.push_back(&v);
      } else if (!v.is_name()) {
        fail(v.pos, "expected `" + usage + "`");
      } else if (words[i] == "$") {
        slots.push_back(&v);
      } else if (v.name != words[i]) {
        fail(v.pos, "expected '" + words[i] + "' in `" + usage + "`");
      }
    }
    return slots;
  }

  void define(const Value& name, Obj o) {
    if (env_.count(name.name)) fail(name.pos, "duplicate name '" + name.name + "'");
    if (name.name.find('.') != std::string::npos) fail(name.pos, "declared names may not contain '.'");
    env_.emplace(name.name, std::move(o));
  }

  const Obj& lookup(const Value& v) const {
    if (!v.is_name()) fail(v.pos, "expected a name");
    auto it = env_.find(v.name);
    if (it == env_.end()) fail(v.pos, "unknown identifier '" + v.name + "'");
    if (auto* u = std::get_if<detail::Unavailable>(&it->second))
      throw detail::UnavailableError("'" + v.name + "' is unavailable: " + u->reason);
    return it->second;
  }

  template <class T>
  const T& get(const Value& v) const {
    const Obj& o = lookup(v);
    if (auto* p = std::get_if<T>(&o)) return *p;
    fail(v.pos, "'" + v.name + "' is a " + detail::kind_name(o) + ", expected a " + detail::kind_of<T>);
  }

  /// Any quasi-Jacobi bialgebroid; an algebroid stands for its trivial one.
  QuasiJacobiBialgebroid get_qjb(const Value& v) const {
    const Obj& o = lookup(v);
    if (auto* q = std::get_if<detail::QjbObj>(&o)) return q->Q;
    if (auto* a = std::get_if<detail::AlgebroidObj>(&o)) return trivial_qjb(a->J);
    fail(v.pos, "'" + v.name + "' is a " + detail::kind_name(o) + ", expected a quasi-Jacobi bialgebroid");
  }

  std::vector<std::string> coords_of(const Value& v) const {
    const Obj& o = lookup(v);
    if (auto* c = std::get_if<detail::ChartObj>(&o)) return c->coords;
    if (auto* a = std::get_if<detail::AlgebroidObj>(&o)) return a->J.ctx()->coords;
    if (auto* q = std::get_if<detail::QjbObj>(&o)) return q->Q.ctx()->coords;
    if (auto* e = std::get_if<detail::CourantObj>(&o)) return e->E.coords();
    if (auto* s = std::get_if<detail::SubObj>(&o)) return s->P.coords;
    fail(v.pos, "'" + v.name + "' has no chart");
  }

  /// Body lines keyed by their first word; keys outside `allowed` are errors.
  static std::multimap<std::string, const Line*> fields(const Statement& s, const std::set<std::string>& allowed) {
    std::multimap<std::string, const Line*> out;
    if (!s.body) return out;
    for (const auto& l : *s.body) {
      std::string key = l.word(0);
      if (!allowed.count(key)) {
        std::string keys;
        for (const auto& a : allowed) keys += (keys.empty() ? "" : ", ") + a;
        fail(l.pos, "unknown field '" + key + "' (expected one of: " + keys + ")");
      }
      out.emplace(key, &l);
    }
    return out;
  }

  static const Line* single(const std::multimap<std::string, const Line*>& f, const std::string& key) {
    auto n = f.count(key);
    if (n == 0) return nullptr;
    auto it = f.find(key);
    if (n > 1) fail(std::next(it)->second->pos, "field '" + key + "' given twice");
    return it->second;
  }

  static const Value& rhs(const Line& l) {
    if (!l.value) fail(l.pos, "expected '= value'");
    return *l.value;
  }

  // ------------------------------------------------------------------
  // Values

  static Poly poly_of(const Value& v) {
    if (v.kind == Value::Kind::expr) return v.poly;
    if (v.is_name()) return Poly::var(v.name);
    fail(v.pos, "expected a polynomial");
  }

  static std::vector<Poly> poly_list(const Value& v, std::size_t n, const std::string& what) {
    if (v.kind != Value::Kind::list) fail(v.pos, what + " must be a list [..]");
    if (v.items.size() != n)
      fail(v.pos, "dimension mismatch: " + what + " needs " + std::to_string(n) + " entries, found " +
                      std::to_string(v.items.size()));
    std::vector<Poly> out;
    for (const auto& it : v.items) out.push_back(poly_of(it));
    return out;
  }

  static std::vector<std::vector<Poly>> poly_matrix(const Value& v, std::size_t rows, std::size_t cols,
                                                    const std::string& what) {
    if (v.kind != Value::Kind::list) fail(v.pos, what + " must be a list of rows");
    if (v.items.size() != rows)
      fail(v.pos, "dimension mismatch: " + what + " needs " + std::to_string(rows) + " rows, found " +
                      std::to_string(v.items.size()));
    std::vector<std::vector<Poly>> m;
    for (const auto& r : v.items) m.push_back(poly_list(r, cols, what + " row"));
    return m;
  }

  static Graded from_terms(const GradedTerms& terms, const Pos& pos, const ContextPtr& ctx, Variance var, int degree) {
    if (degree < 0) {
      if (terms.empty()) fail(pos, "cannot infer the degree of an empty literal; add `degree k`");
      degree = static_cast<int>(terms.front().first.size());
    }
    Graded g(ctx, var, degree);
    for (const auto& [key, c] : terms) {
      if (static_cast<int>(key.size()) != degree)
        fail(pos, "grading mismatch: expected degree " + std::to_string(degree) + ", found key of length " +
                      std::to_string(key.size()));
      std::vector<int> idx = key;
      for (int i : idx)
        if (i > ctx->rank)
          fail(pos, "index out of range: basis index " + std::to_string(i) + " in a rank-" + std::to_string(ctx->rank) +
                        " context");
      int sign = detail::inversion_sign(idx);
      if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) fail(pos, "repeated basis index in a key");
      Mask m = 0;
      for (int i : idx) m |= bit(i - 1);
      g.add(m, sign > 0 ? c : -c);
    }
    return g;
  }

  /// Σ c_a label_a from a polynomial linear in the basis labels.
  static Graded lincomb(const Value& v, const ContextPtr& ctx, Variance var) {
    Poly p = poly_of(v);
    Graded g(ctx, var, 1);
    std::map<std::string, Poly> zero;
    for (const auto& l : ctx->labels) zero.emplace(l, Poly());
    auto vars = p.variables();
    Poly rest = p;
    for (int a = 0; a < ctx->rank; ++a) {
      const std::string& l = ctx->labels[a];
      if (std::find(vars.begin(), vars.end(), l) == vars.end()) continue;
      Poly c = substitute(partial(p, l), zero);
      g.add(bit(a), c);
      rest -= Poly::var(l) * c;
    }
    if (!rest.is_zero()) fail(v.pos, "expected a linear combination of basis labels, found " + p.str());
    return g;
  }

  /// A graded element of the given shape: literal, named element, label combination
  /// (degree 1 with `labels`), or the constant 0.
  Graded element(const Value& v, const ContextPtr& ctx, Variance var, int degree, bool labels = false) const {
    Graded g = [&]() -> Graded {
      if (v.kind == Value::Kind::graded) return from_terms(v.terms, v.pos, ctx, var, degree);
      bool is_label = v.is_name() && std::find(ctx->labels.begin(), ctx->labels.end(), v.name) != ctx->labels.end();
      if (v.is_name() && !(labels && is_label)) {
        const auto& e = get<detail::ElementObj>(v);
        return e.g;
      }
      if (v.kind == Value::Kind::expr && v.poly.is_zero() && degree >= 0) return Graded(ctx, var, degree);
      if (labels && degree == 1) return lincomb(v, ctx, var);
      if (degree == 0) return Graded::scalar(ctx, var, poly_of(v));
      fail(v.pos, "expected a graded literal like { (1,2): x }");
    }();
    if (!same_context(g.context(), ctx)) fail(v.pos, "dimension mismatch: element lives on another bundle");
    if (g.variance() != var)
      fail(v.pos, std::string("grading mismatch: expected a ") + variance_name(var) + ", found a " +
                      variance_name(g.variance()));
    if (degree >= 0 && g.degree() != degree)
      fail(v.pos, "grading mismatch: expected degree " + std::to_string(degree) + ", found degree " +
                      std::to_string(g.degree()));
    return g;
  }

  DoubleSection section_of(const Value& v, const CourantJacobiStructure& E) const {
    if (v.kind != Value::Kind::section) fail(v.pos, "expected a section literal like { (1): 1 } | {}");
    Graded a = from_terms(v.terms, v.pos, E.ctx(), E.host_sections(), 1);
    Graded al = from_terms(v.terms2, v.pos, E.ctx(), opposite(E.host_sections()), 1);
    return E.make(a, al);
  }

  /// Basis index from a label or a 1-based integer.
  static int index_of(const Value& v, const ContextPtr& ctx) {
    if (!v.is_name()) fail(v.pos, "expected a basis label or index");
    const auto& L = ctx->labels;
    auto it = std::find(L.begin(), L.end(), v.name);
    if (it != L.end()) return static_cast<int>(it - L.begin());
    if (!v.name.empty() && std::all_of(v.name.begin(), v.name.end(), ::isdigit)) {
      int i = std::stoi(v.name);
      if (i < 1 || i > ctx->rank)
        fail(v.pos, "index out of range: " + v.name + " in a rank-" + std::to_string(ctx->rank) + " context");
      return i - 1;
    }
    fail(v.pos, "unknown basis label '" + v.name + "'");
  }

  // ------------------------------------------------------------------
  // Declarations

  void dispatch(const Statement& s, CheckReport& rep) {
    const std::string& k = s.kind();
    if (k == "chart") return chart(s);
    if (k == "algebroid") return algebroid(s);
    if (k == "tangent") return tangent(s);
    if (k == "cocycle" || k == "bivector" || k == "form" || k == "multivector") return element_decl(s);
    if (k == "endo") return endo(s);
    if (k == "quasidual") return quasidual(s);
    if (k == "jqn") return jqn(s);
    if (k == "jqn_manifold") return jqn_manifold(s);
    if (k == "build") return build(s, rep);
    if (k == "double") return double_decl(s, rep);
    if (k == "standard_e1") return standard_e1(s);
    if (k == "submanifold") return submanifold(s);
    if (k == "subbundle") return subbundle(s);
    if (k == "split") return split(s);
    if (k == "map") return map_decl(s);
    if (k == "morphism_graph") return morphism_graph(s, rep);
    if (k == "check") return check(s, rep);
    fail(s.header.head.front().pos, "unknown statement '" + k + "'");
  }

  void no_body(const Statement& s) {
    if (s.body) fail(s.pos(), "'" + s.kind() + "' takes no block");
  }

  void chart(const Statement& s) {
    auto v = shape(s.header, {"chart", "$", "()"}, "chart M (x, y)");
    no_body(s);
    if (s.header.value) fail(s.pos(), "chart takes no value");
    std::vector<std::string> cs;
    for (const auto& c : v[1]->items) {
      if (c.name == "u" || c.name == "exp" || c.name.find('.') != std::string::npos)
        fail(c.pos, "'" + c.name + "' cannot be a coordinate");
      if (std::find(cs.begin(), cs.end(), c.name) != cs.end()) fail(c.pos, "duplicate coordinate '" + c.name + "'");
      cs.push_back(c.name);
    }
    define(*v[0], detail::ChartObj{cs});
  }

  void algebroid(const Statement& s) {
    auto v = shape(s.header, {"algebroid", "$", "over", "$"}, "algebroid A over M { ... }");
    auto cs = coords_of(*v[1]);
    auto f = fields(s, {"basis", "anchor", "bracket"});
    const Line* b = single(f, "basis");
    if (!b) fail(s.pos(), "algebroid needs a `basis e1 e2 ...` line");
    if (b->value || b->head.size() < 2) fail(b->pos, "expected `basis e1 e2 ...`");
    std::vector<std::string> labels;
    for (std::size_t i = 1; i < b->head.size(); ++i) {
      const Value& l = b->head[i];
      if (!l.is_name() || std::isdigit(static_cast<unsigned char>(l.name[0])) || l.name.find('.') != std::string::npos)
        fail(l.pos, "basis labels must be identifiers");
      if (std::find(cs.begin(), cs.end(), l.name) != cs.end()) fail(l.pos, "basis label clashes with a coordinate");
      if (std::find(labels.begin(), labels.end(), l.name) != labels.end()) fail(l.pos, "duplicate basis label");
      labels.push_back(l.name);
    }
    ContextPtr ctx = make_context(cs, static_cast<int>(labels.size()), labels);
    LieAlgebroid A = LieAlgebroid::zero(ctx);
    std::set<int> anchored;
    for (auto [it, end] = f.equal_range("anchor"); it != end; ++it) {
      const Line& l = *it->second;
      if (l.head.size() != 2) fail(l.pos, "expected `anchor e1 = [components]`");
      int a = index_of(l.head[1], ctx);
      if (!anchored.insert(a).second) fail(l.pos, "anchor of " + labels[a] + " given twice");
      A.anchor[a] = poly_list(rhs(l), cs.size(), "anchor");
    }
    std::set<std::pair<int, int>> given;
    for (auto [it, end] = f.equal_range("bracket"); it != end; ++it) {
      const Line& l = *it->second;
      if (l.head.size() != 3) fail(l.pos, "expected `bracket e1 e2 = value`");
      int a = index_of(l.head[1], ctx), c = index_of(l.head[2], ctx);
      Graded val = element(rhs(l), ctx, Variance::multivector, 1, true);
      if (a == c) {
        if (!val.is_zero()) fail(l.pos, "structure functions must be antisymmetric: [" + labels[a] + "," + labels[a] + "] must be 0");
        continue;
      }
      if (given.count({c, a}) && !(A.bracket_basis(a, c) == val))
        fail(l.pos, "structure functions must be antisymmetric: [" + labels[a] + "," + labels[c] + "] disagrees with [" +
                        labels[c] + "," + labels[a] + "]");
      if (!given.insert({a, c}).second) fail(l.pos, "bracket given twice");
      A.set_bracket(a, c, val);
    }
    A.validate();
    define(*v[0], detail::AlgebroidObj{with_cocycle(A, Graded(ctx, A.forms(), 1)), false});
  }

  void tangent(const Statement& s) {
    auto v = shape(s.header, {"tangent", "$", "over", "$"}, "tangent T over M");
    no_body(s);
    define(*v[0], detail::AlgebroidObj{tangent_jacobi_algebroid(coords_of(*v[1])), true});
  }

  void element_decl(const Statement& s) {
    const std::string& k = s.kind();
    bool explicit_degree = s.header.head.size() == 6;
    auto v = explicit_degree ? shape(s.header, {k, "$", "on", "$", "degree", "$"}, k + " w on A degree 3 = value")
                             : shape(s.header, {k, "$", "on", "$"}, k + " w on A = value");
    no_body(s);
    int degree = k == "cocycle" ? 1 : k == "bivector" ? 2 : -1;
    if (explicit_degree) {
      if (k == "cocycle" || k == "bivector") fail(v[2]->pos, k + " has a fixed degree");
      const std::string& d = v[2]->name;
      if (d.empty() || !std::all_of(d.begin(), d.end(), ::isdigit)) fail(v[2]->pos, "degree must be an integer");
      degree = std::stoi(d);
    }
    const auto& A = get<detail::AlgebroidObj>(*v[1]);
    Variance var = (k == "cocycle" || k == "form") ? A.J.base.forms() : A.J.base.sections;
    if (!s.header.value) fail(s.pos(), "expected `= value`");
    Graded g = element(*s.header.value, A.J.ctx(), var, degree);
    if (g.degree() > A.J.rank()) fail(s.header.value->pos, "grading mismatch: degree exceeds the rank");
    if (k == "cocycle") {
      if (A.has_cocycle) fail(v[0]->pos, "algebroid '" + v[1]->name + "' already has a cocycle");
      auto& mut = std::get<detail::AlgebroidObj>(env_.at(v[1]->name));
      mut.J.phi = g;
      mut.has_cocycle = true;
    }
    define(*v[0], detail::ElementObj{v[1]->name, g});
  }

  void endo(const Statement& s) {
    auto v = shape(s.header, {"endo", "$", "on", "$"}, "endo N on A { e1 = image; ... }");
    const auto& A = get<detail::AlgebroidObj>(*v[1]);
    const ContextPtr& ctx = A.J.ctx();
    EndomorphismField N = EndomorphismField::zero(ctx);
    if (s.header.value) {
      if (!(s.header.value->is_name() && s.header.value->name == "identity") || s.body)
        fail(s.header.value->pos, "expected `= identity` or a block of images");
      N = EndomorphismField::identity(ctx);
    }
    std::set<int> seen;
    if (s.body)
      for (const auto& l : *s.body) {
        if (l.head.size() != 1) fail(l.pos, "expected `e1 = image`");
        int a = index_of(l.head[0], ctx);
        if (!seen.insert(a).second) fail(l.pos, "image of " + ctx->labels[a] + " given twice");
        Graded img = element(rhs(l), ctx, A.J.base.sections, 1, true);
        for (int b = 0; b < ctx->rank; ++b) N.m[b][a] = img.component(b);
      }
    define(*v[0], detail::EndoObj{v[1]->name, N});
  }

  void quasidual(const Statement& s) {
    auto v = shape(s.header, {"quasidual", "$", "over", "$"}, "quasidual Q over A { ... }");
    const auto& A = get<detail::AlgebroidObj>(*v[1]);
    QuasiJacobiBialgebroid Q = trivial_qjb(A.J);
    const ContextPtr& ctx = A.J.ctx();
    auto f = fields(s, {"anchor", "bracket", "W", "X"});
    for (auto [it, end] = f.equal_range("anchor"); it != end; ++it) {
      const Line& l = *it->second;
      if (l.head.size() != 2) fail(l.pos, "expected `anchor 1 = [components]`");
      Q.dual.anchor[index_of(l.head[1], ctx)] = poly_list(rhs(l), ctx->coords.size(), "anchor");
    }
    for (auto [it, end] = f.equal_range("bracket"); it != end; ++it) {
      const Line& l = *it->second;
      if (l.head.size() != 3) fail(l.pos, "expected `bracket 1 2 = value`");
      int a = index_of(l.head[1], ctx), b = index_of(l.head[2], ctx);
      Graded val = element(rhs(l), ctx, Q.dual.sections, 1);
      if (a == b && !val.is_zero()) fail(l.pos, "structure functions must be antisymmetric");
      if (a != b) Q.dual.set_bracket(a, b, val);
    }
    if (const Line* w = single(f, "W")) Q.W = element(rhs(*w), ctx, Q.sections(), 1);
    if (const Line* x = single(f, "X")) Q.X = element(rhs(*x), ctx, Q.sections(), 3);
    Q.validate();
    define(*v[0], detail::QjbObj{Q});
  }

  void jqn(const Statement& s) {
    auto v = shape(s.header, {"jqn", "$"}, "jqn T { algebroid = A; bivector = pi; endo = N; phi3 = w }");
    auto f = fields(s, {"algebroid", "bivector", "endo", "phi3"});
    const Line* al = single(f, "algebroid");
    if (!al) fail(s.pos(), "jqn needs `algebroid = A`");
    const Value& aname = rhs(*al);
    const auto& A = get<detail::AlgebroidObj>(aname);
    const ContextPtr& ctx = A.J.ctx();
    const Line* bv = single(f, "bivector");
    if (!bv) fail(s.pos(), "jqn needs `bivector = pi`");
    Graded pi = element(rhs(*bv), ctx, A.J.base.sections, 2);
    EndomorphismField N = EndomorphismField::identity(ctx);
    if (const Line* e = single(f, "endo")) {
      const auto& n = get<detail::EndoObj>(rhs(*e));
      if (n.owner != aname.name) fail(rhs(*e).pos, "endomorphism is declared on another algebroid");
      N = n.N;
    }
    Graded phi3(ctx, A.J.base.forms(), 3);
    if (const Line* p = single(f, "phi3")) phi3 = element(rhs(*p), ctx, A.J.base.forms(), 3);
    define(*v[0], detail::JqnObj{JqnStructure{A.J, pi, N, phi3}});
  }

  void jqn_manifold(const Statement& s) {
    auto v = shape(s.header, {"jqn_manifold", "$", "over", "$"}, "jqn_manifold T over M { ... }");
    auto cs = coords_of(*v[1]);
    const std::size_t n = cs.size();
    ContextPtr ctx = tangent_jacobi_algebroid(cs).ctx();
    auto f = fields(s, {"Lambda", "E", "N", "Y", "gamma", "g", "omega"});
    JqnManifoldData D{cs, Graded(ctx, Variance::multivector, 2), Graded(ctx, Variance::multivector, 1), {},
                      Graded(ctx, Variance::multivector, 1), Graded(ctx, Variance::form, 1), Poly(),
                      Graded(ctx, Variance::form, 2)};
    D.N.assign(n, std::vector<Poly>(n));
    auto vec = [&](const char* key, Variance var) {
      Graded g(ctx, var, 1);
      if (const Line* l = single(f, key)) {
        auto c = poly_list(rhs(*l), n, key);
        for (std::size_t i = 0; i < n; ++i) g.add(bit(static_cast<int>(i)), c[i]);
      }
      return g;
    };
    if (const Line* l = single(f, "Lambda")) D.Lambda = element(rhs(*l), ctx, Variance::multivector, 2);
    D.E = vec("E", Variance::multivector);
    if (const Line* l = single(f, "N")) D.N = poly_matrix(rhs(*l), n, n, "N");
    D.Y = vec("Y", Variance::multivector);
    D.gamma = vec("gamma", Variance::form);
    if (const Line* l = single(f, "g")) D.g = poly_of(rhs(*l));
    if (const Line* l = single(f, "omega")) D.omega = element(rhs(*l), ctx, Variance::form, 2);
    define(*v[0], detail::JqnObj{build_jqn_manifold(D)});
  }

  void build(const Statement& s, CheckReport& rep) {
    const std::string what = s.header.word(1);
    if (what == "qjb") {
      auto v = shape(s.header, {"build", "qjb", "$", "from", "$"}, "build qjb Q from T");
      no_body(s);
      const auto& T = get<detail::JqnObj>(*v[1]).T;
      auto Q = exec_ ? build_qjb_from_jqn(T) : assemble_qjb_from_jqn(T);
      define(*v[0], detail::QjbObj{Q});
      record(rep, "build:" + v[0]->name, "quasi-Jacobi bialgebroid from Jacobi quasi-Nijenhuis " + v[1]->name);
    } else if (what == "twisted") {
      auto v = shape(s.header, {"build", "twisted", "$", "from", "$"}, "build twisted W from T { psi = w }");
      auto f = fields(s, {"psi"});
      const auto& T = get<detail::JqnObj>(*v[1]).T;
      const Line* p = single(f, "psi");
      if (!p) fail(s.pos(), "twisted build needs `psi = w`");
      Graded psi = element(rhs(*p), T.J.ctx(), T.J.base.forms(), 3);
      auto tp = exec_ ? build_twisted_pair(T.J, T.pi, T.N, psi) : assemble_twisted_pair(T.J, T.pi, T.N, psi);
      const std::string& w = v[0]->name;
      define(*v[0], detail::TwistedObj{tp, T.J, psi});
      env_.insert_or_assign(w + ".twisted", detail::QjbObj{tp.twisted});
      env_.insert_or_assign(w + ".untwisted", detail::QjbObj{tp.untwisted});
      env_.insert_or_assign(w + ".nstar", detail::MapObj{tp.nstar, w + ".twisted", w + ".untwisted"});
      record(rep, "build:" + w, "twisted pair from " + v[1]->name);
    } else {
      fail(s.pos(), "expected `build qjb ...` or `build twisted ...`");
    }
  }

  void record(CheckReport& rep, const std::string& id, const std::string& desc) {
    if (exec_) rep.add(id, desc, true);
  }

  void mark_members_unavailable(const std::string& w, const std::string& why) {
    for (const char* m : {".twisted", ".untwisted", ".nstar"}) mark_unavailable(w + m, why);
  }

  void double_decl(const Statement& s, CheckReport& rep) {
    auto v = shape(s.header, {"double", "$", "of", "$"}, "double E of Q");
    no_body(s);
    auto Q = get_qjb(*v[1]);
    auto E = exec_ ? build_double(Q, opts_.gen_degree) : assemble_double(Q);
    define(*v[0], detail::CourantObj{E});
    record(rep, "double:" + v[0]->name, "double of " + v[1]->name);
  }

  void standard_e1(const Statement& s) {
    auto v = shape(s.header, {"standard_e1", "$", "over", "$"}, "standard_e1 E over M { twist = w }");
    auto cs = coords_of(*v[1]);
    auto f = fields(s, {"twist"});
    std::optional<Graded> omega;
    if (const Line* t = single(f, "twist"))
      omega = element(rhs(*t), tangent_jacobi_algebroid(cs).ctx(), Variance::form, 2);
    define(*v[0], detail::CourantObj{build_standard_e1(cs, omega)});
  }

  void submanifold(const Statement& s) {
    auto v = shape(s.header, {"submanifold", "$", "in", "$"}, "submanifold P in M { y = x^2 }");
    Submanifold P{coords_of(*v[1]), {}};
    if (s.body)
      for (const auto& l : *s.body) {
        if (l.head.size() != 1) fail(l.pos, "expected `coordinate = polynomial`");
        const std::string& x = l.word(0);
        if (std::find(P.coords.begin(), P.coords.end(), x) == P.coords.end())
          fail(l.pos, "unknown coordinate '" + x + "'");
        if (!P.rules.emplace(x, poly_of(rhs(l))).second) fail(l.pos, "rule for " + x + " given twice");
      }
    try {
      P.validate();
    } catch (const ContextError& e) {
      fail(s.pos(), e.what());
    }
    define(*v[0], detail::SubObj{P});
  }

  void subbundle(const Statement& s) {
    auto v = shape(s.header, {"subbundle", "$", "of", "$", "over", "$"}, "subbundle F of E over P { frame = ... }");
    const auto& E = get<detail::CourantObj>(*v[1]).E;
    const auto& P = get<detail::SubObj>(*v[2]).P;
    if (P.coords != E.coords()) fail(v[2]->pos, "dimension mismatch: submanifold chart differs from the structure's chart");
    auto f = fields(s, {"frame", "complement"});
    SupportedSubbundle F{E, P, {}, {}};
    for (auto [it, end] = f.equal_range("frame"); it != end; ++it) F.frame.push_back(section_of(rhs(*it->second), E));
    for (auto [it, end] = f.equal_range("complement"); it != end; ++it)
      F.complement.push_back(section_of(rhs(*it->second), E));
    if (F.complement.empty()) {
      auto c = complete_frame(E, P, F.frame);
      if (!c) fail(s.pos(), "frame drops rank over the support");
      F.complement = *c;
    }
    full_frame_inverse(E, P, F.frame, F.complement);
    define(*v[0], detail::BundleObj{F});
  }

  void split(const Statement& s) {
    auto v = shape(s.header, {"split", "$", "of", "$", "over", "$"}, "split S of E over P { L = ...; C = ... }");
    const auto& E = get<detail::CourantObj>(*v[1]).E;
    const auto& P = get<detail::SubObj>(*v[2]).P;
    if (P.coords != E.coords()) fail(v[2]->pos, "dimension mismatch: submanifold chart differs from the structure's chart");
    auto f = fields(s, {"L", "C"});
    detail::SplitObj S{E, P, {}, {}};
    for (auto [it, end] = f.equal_range("L"); it != end; ++it)
      S.L.push_back(element(rhs(*it->second), E.ctx(), E.host_sections(), 1));
    for (auto [it, end] = f.equal_range("C"); it != end; ++it)
      S.C.push_back(element(rhs(*it->second), E.ctx(), E.host_sections(), 1));
    split_subbundle(E, P, S.L, S.C);
    define(*v[0], S);
  }

  ContextPtr ctx_of_map_end(const Value& v) const {
    const Obj& o = lookup(v);
    if (auto* a = std::get_if<detail::AlgebroidObj>(&o)) return a->J.ctx();
    if (auto* q = std::get_if<detail::QjbObj>(&o)) return q->Q.ctx();
    fail(v.pos, "map endpoints must be algebroids or quasi-Jacobi bialgebroids");
  }

  void map_decl(const Statement& s) {
    auto v = shape(s.header, {"map", "$", "from", "$", "to", "$"}, "map Psi from A to B { base = [..]; fiber = [[..]] }");
    ContextPtr src = ctx_of_map_end(*v[1]), tgt = ctx_of_map_end(*v[2]);
    auto f = fields(s, {"base", "fiber"});
    BundleMap psi{src, tgt, PolyMap{src->coords, tgt->coords, {}}, {}};
    if (const Line* b = single(f, "base")) {
      psi.base.components = poly_list(rhs(*b), tgt->coords.size(), "base");
    } else {
      if (src->coords != tgt->coords) fail(s.pos(), "base map needed between different charts");
      psi.base = PolyMap::identity(src->coords);
    }
    if (const Line* fb = single(f, "fiber")) {
      psi.fiber = poly_matrix(rhs(*fb), tgt->rank, src->rank, "fiber");
    } else {
      if (src->rank != tgt->rank) fail(s.pos(), "fiber matrix needed between different ranks");
      psi.fiber = BundleMap::identity(src).fiber;
    }
    psi.validate();
    define(*v[0], detail::MapObj{psi, v[1]->name, v[2]->name});
  }

  void morphism_graph(const Statement& s, CheckReport& rep) {
    const std::string mode = s.header.word(2);
    if (mode == "of") {
      auto v = shape(s.header, {"morphism_graph", "$", "of", "$"}, "morphism_graph G of Psi");
      no_body(s);
      const auto& m = get<detail::MapObj>(*v[1]);
      auto QA = get_qjb(Value::make_name(m.source, v[1]->pos));
      auto QB = get_qjb(Value::make_name(m.target, v[1]->pos));
      auto G = exec_ ? graph_of_qjb_morphism(m.psi, QA, QB) : assemble_morphism_graph(m.psi, QA, QB);
      define(*v[0], detail::BundleObj{G.F});
      record(rep, "morphism_graph:" + v[0]->name, "graph of the morphism " + v[1]->name);
    } else if (mode == "standard") {
      auto v = shape(s.header, {"morphism_graph", "$", "standard", "from", "$", "to", "$"},
                     "morphism_graph G standard from M to M2 { map = [..] }");
      auto f = fields(s, {"map"});
      PolyMap psi{coords_of(*v[1]), coords_of(*v[2]), {}};
      if (const Line* l = single(f, "map")) psi.components = poly_list(rhs(*l), psi.target.size(), "map");
      else if (psi.source == psi.target) psi = PolyMap::identity(psi.source);
      else fail(s.pos(), "standard morphism needs `map = [..]`");
      psi.validate();
      define(*v[0], detail::BundleObj{standard_morphism(psi).F});
    } else if (mode == "diagonal") {
      auto v = shape(s.header, {"morphism_graph", "$", "diagonal", "of", "$"}, "morphism_graph G diagonal of E");
      no_body(s);
      define(*v[0], detail::BundleObj{diagonal_morphism(get<detail::CourantObj>(*v[1]).E).F});
    } else {
      fail(s.pos(), "expected `morphism_graph G of Psi`, `... standard from M to M2` or `... diagonal of E`");
    }
  }

  // ------------------------------------------------------------------
  // Checks

  void check(const Statement& s, CheckReport& rep) {
    no_body(s);
    if (s.header.value) fail(s.pos(), "check takes no value");
    const std::string what = s.header.word(1);
    auto args = [&](std::size_t n, const std::string& usage) {
      auto words = std::vector<std::string>{"check", what};
      for (std::size_t i = 0; i < n; ++i) words.push_back("$");
      return shape(s.header, words, usage);
    };
    std::string prefix = check_prefix(s);
    auto emit = [&](const CheckReport& r) {
      if (exec_) rep.merge(r, prefix);
    };
    if (what == "lie") {
      auto v = args(1, "check lie A");
      const auto& A = get<detail::AlgebroidObj>(*v[0]);
      if (exec_) emit(verify_lie_algebroid(A.J.base));
    } else if (what == "jacobi") {
      auto v = args(1, "check jacobi A");
      const auto& A = get<detail::AlgebroidObj>(*v[0]);
      if (exec_) emit(verify_jacobi_algebroid(A.J));
    } else if (what == "bivector") {
      auto v = args(1, "check bivector pi");
      const auto& e = get<detail::ElementObj>(*v[0]);
      const auto& A = get<detail::AlgebroidObj>(Value::make_name(e.owner, v[0]->pos));
      if (e.g.degree() != 2 || e.g.variance() != A.J.base.sections) fail(v[0]->pos, "expected a bivector");
      if (exec_) emit(is_jacobi_bivector(A.J, e.g));
    } else if (what == "compat") {
      auto v = args(2, "check compat pi N");
      const auto& e = get<detail::ElementObj>(*v[0]);
      const auto& n = get<detail::EndoObj>(*v[1]);
      if (n.owner != e.owner) fail(v[1]->pos, "bivector and endomorphism live on different algebroids");
      const auto& A = get<detail::AlgebroidObj>(Value::make_name(e.owner, v[0]->pos));
      if (exec_) emit(compat_and_concomitant(A.J, e.g, n.N));
    } else if (what == "jqn") {
      auto v = args(1, "check jqn T");
      const auto& T = get<detail::JqnObj>(*v[0]).T;
      if (exec_) emit(verify_jqn(T));
    } else if (what == "tnstar") {
      auto v = args(1, "check tnstar T");
      const auto& T = get<detail::JqnObj>(*v[0]).T;
      if (exec_) emit(check_tnstar_lemma(T));
    } else if (what == "qjb") {
      auto v = args(1, "check qjb Q");
      auto Q = get_qjb(*v[0]);
      if (exec_) emit(verify_quasi_jacobi_bialgebroid(Q, opts_.gen_degree));
    } else if (what == "courant") {
      auto v = args(1, "check courant E");
      const auto& E = get<detail::CourantObj>(*v[0]).E;
      if (exec_) emit(verify_courant_jacobi(E));
    } else if (what == "dirac") {
      auto v = args(1, "check dirac F");
      const auto& F = get<detail::BundleObj>(*v[0]).F;
      if (exec_) emit(verify_dirac_supported(F));
    } else if (what == "split") {
      auto v = args(1, "check split S");
      const auto& S = get<detail::SplitObj>(*v[0]);
      if (exec_) emit(verify_split_theorem(S.E, S.P, S.L, S.C));
    } else if (what == "jacobi_morphism") {
      auto v = args(1, "check jacobi_morphism Psi");
      const auto& m = get<detail::MapObj>(*v[0]);
      const auto& A = get<detail::AlgebroidObj>(Value::make_name(m.source, v[0]->pos));
      const auto& B = get<detail::AlgebroidObj>(Value::make_name(m.target, v[0]->pos));
      if (exec_) emit(jacobi_morphism_check(m.psi, A.J, B.J));
    } else if (what == "qjb_morphism") {
      auto v = args(1, "check qjb_morphism Psi");
      const auto& m = get<detail::MapObj>(*v[0]);
      auto QA = get_qjb(Value::make_name(m.source, v[0]->pos));
      auto QB = get_qjb(Value::make_name(m.target, v[0]->pos));
      if (exec_) emit(verify_qjb_morphism(m.psi, QA, QB));
    } else if (what == "twisted_bivector") {
      auto v = args(1, "check twisted_bivector W");
      const auto& w = get<detail::TwistedObj>(*v[0]);
      if (exec_) emit(check_twisted_bivector(w.J, w.tp.npi, w.psi));
    } else {
      fail(s.pos(), "unknown check '" + what +
                        "' (expected lie, jacobi, bivector, compat, jqn, tnstar, qjb, courant, dirac, split, "
                        "jacobi_morphism, qjb_morphism or twisted_bivector)");
    }
  }
};

/// Syntax plus full name and dimension validation.
inline Document parse(const std::string& text) {
  Document doc = parse_syntax(text);
  Interpreter check(false, RunOptions{});
  CheckReport scratch;
  for (const auto& s : doc.statements) check.run(s, scratch);
  return doc;
}

/// Executes the declarations in order; rejections become failed entries.
inline CheckReport run(const Document& doc, const RunOptions& opts = {}) {
  Interpreter in(true, opts);
  CheckReport rep;
  for (const auto& s : doc.statements) in.run(s, rep);
  return rep;
}

}  // namespace jqn::dsl
