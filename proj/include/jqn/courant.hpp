#pragma once

// Courant-Jacobi algebroids realized as doubles A ⊕ A* of quasi-Jacobi
// bialgebroids: the double bracket, pairing and anchor, both axiom sets,
// standard and twisted E¹(M), barred copies and products.
//
// Every structure here is stored as internal double data (a quasi-Jacobi
// bialgebroid) plus a sign per A-index. User sections e = a + α map to
// internal ones by multiplying the α-component of index k by bar[k]; barred
// factors carry bar = -1 and a negated dual, which makes e ↦ a - α an
// isometry onto the internal double.

#include <jqn/quasi.hpp>

#include <optional>

namespace jqn {

struct DoubleSection {
  Graded a;      // degree-1 section of the host A
  Graded alpha;  // degree-1 form of A, i.e. a section of A*

  DoubleSection& operator+=(const DoubleSection& o) {
    a += o.a;
    alpha += o.alpha;
    return *this;
  }
  DoubleSection& operator-=(const DoubleSection& o) {
    a -= o.a;
    alpha -= o.alpha;
    return *this;
  }
  friend DoubleSection operator+(DoubleSection x, const DoubleSection& y) { return x += y; }
  friend DoubleSection operator-(DoubleSection x, const DoubleSection& y) { return x -= y; }
  DoubleSection operator-() const { return DoubleSection{-a, -alpha}; }
  DoubleSection scaled(const Poly& f) const { return DoubleSection{a.scaled(f), alpha.scaled(f)}; }
  DoubleSection map_coeffs(const std::function<Poly(const Poly&)>& fn) const {
    return DoubleSection{a.map_coeffs(fn), alpha.map_coeffs(fn)};
  }
  bool is_zero() const { return a.is_zero() && alpha.is_zero(); }
  bool operator==(const DoubleSection& o) const { return a == o.a && alpha == o.alpha; }
  std::string str() const { return a.str() + " + " + alpha.str(); }
};

inline std::string witness_of(const DoubleSection& r) { return r.is_zero() ? std::string{} : r.str(); }

/// Image of the anchor in TM ⊕ ℝ, acting on functions by h ↦ vec(h) + scalar·h.
struct AnchorImage {
  std::vector<Poly> vec;
  Poly scalar;

  bool operator==(const AnchorImage& o) const { return vec == o.vec && scalar == o.scalar; }
  std::string str(const std::vector<std::string>& coords) const {
    std::string s = "(";
    bool first = true;
    for (std::size_t i = 0; i < vec.size(); ++i) {
      if (vec[i].is_zero()) continue;
      s += (first ? "" : " + ") + ("(" + vec[i].str() + ") d/d" + coords[i]);
      first = false;
    }
    return s + (first ? "0" : "") + ", " + scalar.str() + ")";
  }
};

struct CourantJacobiStructure {
  QuasiJacobiBialgebroid Q;
  std::vector<int> bar;  // per A-index, +1 or -1
  std::string kind;      // "double", "standard_e1", "twisted_e1", "product", ...

  const ContextPtr& ctx() const { return Q.ctx(); }
  int rank() const { return Q.rank(); }  // rank of A; E has rank 2 * rank()
  Variance host_sections() const { return Q.sections(); }
  const std::vector<std::string>& coords() const { return ctx()->coords; }

  DoubleSection zero() const {
    return DoubleSection{Graded(ctx(), host_sections(), 1), Graded(ctx(), opposite(host_sections()), 1)};
  }
  /// k < rank: e_k in A; k >= rank: ε^{k-rank} in A*.
  DoubleSection basis(int k, const Poly& c = Poly(1)) const {
    DoubleSection s = zero();
    if (k < rank()) s.a = Graded::basis(ctx(), host_sections(), k, c);
    else s.alpha = Graded::basis(ctx(), opposite(host_sections()), k - rank(), c);
    return s;
  }
  /// Places g and h into the A and A* slots according to their variance.
  DoubleSection section(const Graded& g, const Graded& h) const {
    if (g.variance() == host_sections()) return make(g, h);
    return make(h, g);
  }
  DoubleSection make(const Graded& a, const Graded& alpha) const {
    DoubleSection s{a, alpha};
    check(s);
    return s;
  }

  void check(const DoubleSection& s) const {
    if (!same_context(s.a.context(), ctx()) || !same_context(s.alpha.context(), ctx()))
      throw ContextError("double section lives on another context");
    if (s.a.degree() != 1 || s.alpha.degree() != 1) throw ContextError("double section parts must have degree 1");
    if (s.a.variance() != host_sections() || s.alpha.variance() != opposite(host_sections()))
      throw ContextError("double section parts have the wrong variance");
  }

  /// σ: user frame ↔ internal double; an involution.
  DoubleSection flip(const DoubleSection& s) const {
    check(s);
    if (std::all_of(bar.begin(), bar.end(), [](int b) { return b > 0; })) return s;
    DoubleSection r{s.a, s.alpha.zero_like(1)};
    for (const auto& [m, c] : s.alpha.terms()) r.alpha.add(m, bar[std::countr_zero(m)] > 0 ? c : -c);
    return r;
  }

  void validate() const {
    Q.validate();
    if (static_cast<int>(bar.size()) != rank()) throw ContextError("bar signs differ from rank");
    for (int b : bar)
      if (b != 1 && b != -1) throw ContextError("bar signs must be +1 or -1");
  }
};

inline std::vector<int> unbarred(int r) { return std::vector<int>(r, 1); }

namespace detail {

/// Double bracket on internal sections, in the compact form with L^φ, L̃_* and X_A.
inline DoubleSection double_bracket_compact(const QuasiJacobiBialgebroid& Q, const DoubleSection& e1,
                                            const DoubleSection& e2) {
  const JacobiAlgebroid& H = Q.host;
  const Graded &X = e1.a, &al = e1.alpha, &Y = e2.a, &be = e2.alpha;
  Graded a = schouten_jacobi(H, X, Y) + quasi_lie_derivative(Q, al, Y) -
             interior(be, apply_quasi_differential(Q, X)) + interior(wedge(al, be), Q.X);
  Graded f = bracket(Q.dual, al, be) + lie_derivative_phi(H, X, be) - interior(Y, phi_differential(H, al));
  return DoubleSection{a, f};
}

/// The same bracket written out in untwisted operators with explicit φ and W terms.
inline DoubleSection double_bracket_expanded(const QuasiJacobiBialgebroid& Q, const DoubleSection& e1,
                                             const DoubleSection& e2) {
  const LieAlgebroid& A = Q.host.base;
  const Graded& phi = Q.host.phi;
  const Graded &X = e1.a, &al = e1.alpha, &Y = e2.a, &be = e2.alpha;
  Poly aY = pair(al, Y), bX = pair(be, X);
  Graded a = bracket(A, X, Y) + interior(al, differential(Q.dual, Y)) - interior(be, differential(Q.dual, X)) +
             differential(Q.dual, Graded::scalar(Q.ctx(), A.sections, aY)) + interior(wedge(al, be), Q.X) +
             Y.scaled(pair(al, Q.W)) - X.scaled(pair(be, Q.W)) + Q.W.scaled(bX);
  Graded f = bracket(Q.dual, al, be) + lie_derivative(A, X, be) - interior(Y, differential(A, al)) +
             be.scaled(pair(phi, X)) - al.scaled(pair(phi, Y)) + phi.scaled(aY);
  return DoubleSection{a, f};
}

}  // namespace detail

/// e1 ∘ e2 in user coordinates.
inline DoubleSection cj_bracket(const CourantJacobiStructure& E, const DoubleSection& e1, const DoubleSection& e2) {
  return E.flip(detail::double_bracket_compact(E.Q, E.flip(e1), E.flip(e2)));
}

/// The expanded realization of the same bracket; agrees with cj_bracket exactly.
inline DoubleSection cj_bracket_expanded(const CourantJacobiStructure& E, const DoubleSection& e1,
                                         const DoubleSection& e2) {
  return E.flip(detail::double_bracket_expanded(E.Q, E.flip(e1), E.flip(e2)));
}

/// ⟦e1,e2⟧ = ½(e1∘e2 - e2∘e1).
inline DoubleSection skew_bracket(const CourantJacobiStructure& E, const DoubleSection& e1, const DoubleSection& e2) {
  return (cj_bracket(E, e1, e2) - cj_bracket(E, e2, e1)).scaled(Poly(Rat(1, 2)));
}

/// ⟨X+α, Y+β⟩ = ½(α(Y) + β(X)) on internal sections.
inline Poly cj_pairing(const CourantJacobiStructure& E, const DoubleSection& e1, const DoubleSection& e2) {
  DoubleSection x = E.flip(e1), y = E.flip(e2);
  return (pair(x.alpha, y.a) + pair(y.alpha, x.a)).scaled(Rat(1, 2));
}

/// ρ(X+α) = (ρ_A X + ρ_* α, <φ,X> + <α,W>).
inline AnchorImage cj_anchor(const CourantJacobiStructure& E, const DoubleSection& e) {
  DoubleSection x = E.flip(e);
  AnchorImage r{anchor_vector(E.Q.host.base, x.a), pair(E.Q.host.phi, x.a) + pair(x.alpha, E.Q.W)};
  auto v = anchor_vector(E.Q.dual, x.alpha);
  for (std::size_t i = 0; i < v.size(); ++i) r.vec[i] += v[i];
  return r;
}

/// Lie_{ρ(e)} h = X_e(h) + f_e h.
inline Poly lie_rho(const CourantJacobiStructure& E, const AnchorImage& r, const Poly& h) {
  Poly out = r.scalar * h;
  for (std::size_t i = 0; i < r.vec.size(); ++i)
    if (!r.vec[i].is_zero()) out += r.vec[i] * partial(h, E.coords()[i]);
  return out;
}

/// [(X,f),(Y,g)] = ([X,Y], X·g - Y·f).
inline AnchorImage anchor_bracket(const CourantJacobiStructure& E, const AnchorImage& p, const AnchorImage& q) {
  const auto& cs = E.coords();
  auto apply = [&](const std::vector<Poly>& v, const Poly& h) {
    Poly out;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!v[i].is_zero()) out += v[i] * partial(h, cs[i]);
    return out;
  };
  AnchorImage r{std::vector<Poly>(cs.size()), apply(p.vec, q.scalar) - apply(q.vec, p.scalar)};
  for (std::size_t i = 0; i < cs.size(); ++i) r.vec[i] = apply(p.vec, q.vec[i]) - apply(q.vec, p.vec[i]);
  return r;
}

/// ρ*ξ for ξ = Σ ξ_i dx_i + ξ_0 (the dual of the anchor): ⟨ρ*ξ, e⟩ = ½ ξ(ρ(e)).
inline DoubleSection anchor_transpose(const CourantJacobiStructure& E, const std::vector<Poly>& xi, const Poly& xi0) {
  if (xi.size() != E.coords().size()) throw ContextError("anchor transpose: covector has the wrong length");
  auto value = [&](const DoubleSection& e) {
    AnchorImage r = cj_anchor(E, e);
    Poly v = xi0 * r.scalar;
    for (std::size_t i = 0; i < xi.size(); ++i) v += xi[i] * r.vec[i];
    return v;
  };
  // In internal coordinates the basis e_k pairs with ε^k to ½, so ρ*ξ has
  // ε^k-component ξ(ρ e_k) and e_k-component ξ(ρ ε^k).
  DoubleSection internal = E.zero();
  for (int k = 0; k < E.rank(); ++k) {
    DoubleSection ek = E.flip(E.basis(k)), fk = E.flip(E.basis(E.rank() + k));
    internal.alpha += Graded::basis(E.ctx(), opposite(E.host_sections()), k, value(ek));
    internal.a += Graded::basis(E.ctx(), E.host_sections(), k, value(fk));
  }
  return E.flip(internal);
}

// ---------------------------------------------------------------------------
// Generator family and axioms

/// Basis double sections followed by their coordinate multiples.
inline std::vector<DoubleSection> double_family(const CourantJacobiStructure& E) {
  std::vector<DoubleSection> fam;
  for (int k = 0; k < 2 * E.rank(); ++k) fam.push_back(E.basis(k));
  for (int k = 0; k < 2 * E.rank(); ++k)
    for (const auto& x : E.coords()) fam.push_back(E.basis(k, Poly::var(x)));
  return fam;
}

inline bool is_scaled(const DoubleSection& s) { return is_scaled(s.a) || is_scaled(s.alpha); }

/// CJ1-CJ3, CJ'1-CJ'4 on the generator family, plus the verdict comparison.
/// Triples carry at most one coordinate-scaled element.
inline CheckReport verify_courant_jacobi(const CourantJacobiStructure& E) {
  E.validate();
  CheckReport rep;
  auto fam = double_family(E);
  const std::size_t n = fam.size();
  auto br = [&](const DoubleSection& x, const DoubleSection& y) { return cj_bracket(E, x, y); };
  auto pr = [&](const DoubleSection& x, const DoubleSection& y) { return cj_pairing(E, x, y); };
  auto lie = [&](const DoubleSection& x, const Poly& h) { return lie_rho(E, cj_anchor(E, x), h); };
  auto tag = [](std::size_t i, std::size_t j, std::size_t k) {
    return "(g" + std::to_string(i) + ",g" + std::to_string(j) + ",g" + std::to_string(k) + ") ";
  };
  auto triples = [&](auto&& fn) -> std::string {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          if (is_scaled(fam[i]) + is_scaled(fam[j]) + is_scaled(fam[k]) > 1) continue;
          std::string w = fn(fam[i], fam[j], fam[k]);
          if (!w.empty()) return tag(i, j, k) + w;
        }
    return {};
  };

  // Brackets of family pairs are reused by every axiom.
  std::vector<std::optional<DoubleSection>> cache(n * n);
  auto idx_of = [&](const DoubleSection* p) { return static_cast<std::size_t>(p - fam.data()); };
  auto fbr = [&](const DoubleSection& x, const DoubleSection& y) -> const DoubleSection& {
    std::size_t i = idx_of(&x), j = idx_of(&y);
    auto& slot = cache[i * n + j];
    if (!slot) slot = br(x, y);
    return *slot;
  };

  timed_check(rep, "BRACKET_FORMS", "compact and expanded double brackets agree", [&]() -> std::string {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        DoubleSection res = fbr(fam[i], fam[j]) - cj_bracket_expanded(E, fam[i], fam[j]);
        if (!res.is_zero()) return "(g" + std::to_string(i) + ",g" + std::to_string(j) + ") " + res.str();
      }
    return {};
  });
  auto jacobi = [&](const DoubleSection& a, const DoubleSection& b, const DoubleSection& c) {
    DoubleSection res = br(a, fbr(b, c)) - br(fbr(a, b), c) - br(b, fbr(a, c));
    return witness_of(res);
  };
  timed_check(rep, "CJ1", "e1∘(e2∘e3) = (e1∘e2)∘e3 + e2∘(e1∘e3)", [&] { return triples(jacobi); });
  timed_check(rep, "CJ2", "Lie_rho(e1) <e2,e3> = <e1, e2∘e3 + e3∘e2>", [&] {
    return triples([&](const DoubleSection& a, const DoubleSection& b, const DoubleSection& c) {
      return witness_of(lie(a, pr(b, c)) - pr(a, fbr(b, c) + fbr(c, b)));
    });
  });
  timed_check(rep, "CJ3", "Lie_rho(e1) <e2,e3> = <e1∘e2, e3> + <e2, e1∘e3>", [&] {
    return triples([&](const DoubleSection& a, const DoubleSection& b, const DoubleSection& c) {
      return witness_of(lie(a, pr(b, c)) - pr(fbr(a, b), c) - pr(b, fbr(a, c)));
    });
  });
  bool v1 = rep.passed("CJ1") && rep.passed("CJ2") && rep.passed("CJ3");

  timed_check(rep, "CJp1", "e1∘(e2∘e3) = (e1∘e2)∘e3 + e2∘(e1∘e3)", [&] { return triples(jacobi); });
  timed_check(rep, "CJp2", "rho(e1∘e2) = [rho(e1), rho(e2)]", [&]() -> std::string {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        AnchorImage lhs = cj_anchor(E, fbr(fam[i], fam[j]));
        AnchorImage rhs = anchor_bracket(E, cj_anchor(E, fam[i]), cj_anchor(E, fam[j]));
        if (!(lhs == rhs))
          return "(g" + std::to_string(i) + ",g" + std::to_string(j) + ") " + lhs.str(E.coords()) + " vs " +
                 rhs.str(E.coords());
      }
    return {};
  });
  // The quadratic conditions are polarized: e runs over generators and sums of two generators.
  auto quadratic = [&](auto&& fn) -> std::string {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        if (is_scaled(fam[i]) && is_scaled(fam[j])) continue;
        DoubleSection e = i == j ? fam[i] : fam[i] + fam[j];
        DoubleSection ee = i == j ? fbr(fam[i], fam[i])
                                  : fbr(fam[i], fam[i]) + fbr(fam[i], fam[j]) + fbr(fam[j], fam[i]) + fbr(fam[j], fam[j]);
        for (std::size_t k = 0; k < n; ++k) {
          if (is_scaled(fam[k]) && (is_scaled(fam[i]) || is_scaled(fam[j]))) continue;
          DoubleSection ke = i == j ? fbr(fam[k], fam[i]) : fbr(fam[k], fam[i]) + fbr(fam[k], fam[j]);
          std::string w = fn(fam[k], e, ke, ee);
          if (!w.empty()) return tag(k, i, j) + w;
        }
      }
    return {};
  };
  timed_check(rep, "CJp3", "<e1∘e, e> = <e1, e∘e>", [&] {
    return quadratic([&](const DoubleSection& e1, const DoubleSection& e, const DoubleSection& e1e,
                         const DoubleSection& ee) { return witness_of(pr(e1e, e) - pr(e1, ee)); });
  });
  timed_check(rep, "CJp4", "Lie_rho(e1) <e,e> = 2 <e1∘e, e>", [&] {
    return quadratic([&](const DoubleSection& e1, const DoubleSection& e, const DoubleSection& e1e,
                         const DoubleSection&) { return witness_of(lie(e1, pr(e, e)) - pr(e1e, e).scaled(Rat(2))); });
  });
  bool v2 = rep.passed("CJp1") && rep.passed("CJp2") && rep.passed("CJp3") && rep.passed("CJp4");
  rep.add("AGREE", "verdict(CJ1-CJ3) = verdict(CJ'1-CJ'4)", v1 == v2,
          v1 == v2 ? std::string{} : std::string("CJ1-3 ") + (v1 ? "pass" : "fail") + ", CJ'1-4 " + (v2 ? "pass" : "fail"));
  return rep;
}

// ---------------------------------------------------------------------------
// Constructors

/// Double of Q without verifying Q.
inline CourantJacobiStructure assemble_double(const QuasiJacobiBialgebroid& Q) {
  Q.validate();
  return CourantJacobiStructure{Q, unbarred(Q.rank()), "double"};
}

inline CourantJacobiStructure build_double(const QuasiJacobiBialgebroid& Q, int gen_degree = 2) {
  auto rep = verify_quasi_jacobi_bialgebroid(Q, gen_degree);
  if (!rep.passed()) throw RejectedInput("double: input is not a quasi-Jacobi bialgebroid: " + rep.first_failure());
  return assemble_double(Q);
}

/// (dω, ω) encoded as dω + ε0∧ω on TM×ℝ, ε0 being the last basis form.
inline Graded twist_form(const JacobiAlgebroid& T, const Graded& omega) {
  int e0 = T.rank() - 1;
  for (const auto& [m, c] : omega.terms())
    if (m & bit(e0)) throw ContextError("twist 2-form must not involve the e0 direction");
  return differential(T.base, omega) + wedge(T.base.coform(e0), omega);
}

/// E¹(M) = double of (TM×ℝ, (0,1), d~_* = 0); with ω, the double of the
/// null host T*M×ℝ with quasi differential d^{(0,1)} and X = (dω, ω).
inline CourantJacobiStructure build_standard_e1(const std::vector<std::string>& coords,
                                                const std::optional<Graded>& omega = std::nullopt) {
  JacobiAlgebroid T = tangent_jacobi_algebroid(coords);
  if (!omega) {
    QuasiJacobiBialgebroid Q = trivial_qjb(T);
    return CourantJacobiStructure{Q, unbarred(Q.rank()), "standard_e1"};
  }
  if (!same_context(omega->context(), T.ctx()) || omega->variance() != Variance::form || omega->degree() != 2)
    throw ContextError("twist must be a 2-form on TM x R");
  const ContextPtr& c = T.ctx();
  JacobiAlgebroid host{LieAlgebroid::zero(c, Variance::form), Graded(c, Variance::multivector, 1)};
  QuasiJacobiBialgebroid Q{host, T.base, T.phi, twist_form(T, *omega)};
  return CourantJacobiStructure{Q, unbarred(Q.rank()), "twisted_e1"};
}

/// Ē: same bracket and anchor, pairing negated.
inline CourantJacobiStructure barred(const CourantJacobiStructure& E) {
  CourantJacobiStructure B = E;
  for (auto& row : B.Q.dual.anchor)
    for (auto& c : row) c = -c;
  for (auto& s : B.Q.dual.structure) s = -s;
  B.Q.W = -B.Q.W;
  for (int& b : B.bar) b = -b;
  B.kind = "barred_" + E.kind;
  return B;
}

/// Where each factor of a product landed.
struct ProductLayout {
  CourantJacobiStructure E;
  std::vector<int> offsets;                           // first A-index of each factor
  std::vector<std::map<std::string, Poly>> renames;   // factor coordinate -> product coordinate
};

namespace detail {

inline Graded embed(const Graded& g, const ContextPtr& target, int offset, const std::map<std::string, Poly>& rn) {
  Graded r(target, g.variance(), g.degree());
  for (const auto& [m, c] : g.terms()) r.add(m << offset, substitute(c, rn));
  return r;
}

}  // namespace detail

/// Double of the product bialgebroid over the product chart, with cocycles,
/// W and X_A summed. Coordinates of later factors that clash with earlier
/// names get the suffix _k (k = factor position, from 1).
inline ProductLayout product(const std::vector<CourantJacobiStructure>& factors) {
  if (factors.empty()) throw ContextError("product of no factors");
  Variance v = factors.front().host_sections();
  std::vector<std::string> coords, labels;
  std::vector<int> offsets;
  std::vector<std::map<std::string, Poly>> renames;
  int rank = 0;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const auto& F = factors[f];
    if (F.host_sections() != v) throw ContextError("product: factors put A on different variances");
    std::map<std::string, Poly> rn;
    for (const auto& x : F.coords()) {
      std::string name = x;
      if (std::find(coords.begin(), coords.end(), name) != coords.end()) name = x + "_" + std::to_string(f + 1);
      if (std::find(coords.begin(), coords.end(), name) != coords.end())
        throw ContextError("product: cannot rename coordinate " + x);
      coords.push_back(name);
      rn.emplace(x, Poly::var(name));
    }
    for (int a = 0; a < F.rank(); ++a) {
      std::string l = a < static_cast<int>(F.ctx()->labels.size()) ? F.ctx()->labels[a] : "e" + std::to_string(a + 1);
      labels.push_back(factors.size() > 1 ? l + "_" + std::to_string(f + 1) : l);
    }
    offsets.push_back(rank);
    renames.push_back(rn);
    rank += F.rank();
  }
  ContextPtr ctx = make_context(coords, rank, labels);
  auto col = [&](const std::string& name) {
    return static_cast<int>(std::find(coords.begin(), coords.end(), name) - coords.begin());
  };
  LieAlgebroid H = LieAlgebroid::zero(ctx, v), D = LieAlgebroid::zero(ctx, opposite(v));
  Graded phi(ctx, opposite(v), 1), W(ctx, v, 1), X(ctx, v, 3);
  std::vector<int> bar;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const auto& F = factors[f];
    int off = offsets[f];
    const auto& rn = renames[f];
    auto fill = [&](const LieAlgebroid& src, LieAlgebroid& dst) {
      for (int a = 0; a < F.rank(); ++a) {
        for (int i = 0; i < F.ctx()->dim(); ++i) {
          int j = col(rn.at(F.coords()[i]).str());
          dst.anchor[off + a][j] = substitute(src.anchor[a][i], rn);
        }
        for (int b = 0; b < F.rank(); ++b)
          dst.structure[(off + a) * rank + off + b] = detail::embed(src.bracket_basis(a, b), ctx, off, rn);
      }
    };
    fill(F.Q.host.base, H);
    fill(F.Q.dual, D);
    phi += detail::embed(F.Q.host.phi, ctx, off, rn);
    W += detail::embed(F.Q.W, ctx, off, rn);
    X += detail::embed(F.Q.X, ctx, off, rn);
    bar.insert(bar.end(), F.bar.begin(), F.bar.end());
  }
  CourantJacobiStructure E{QuasiJacobiBialgebroid{JacobiAlgebroid{H, phi}, D, W, X}, bar, "product"};
  E.validate();
  return ProductLayout{E, offsets, renames};
}

/// Embeds a section of factor f into the product.
inline DoubleSection embed_section(const ProductLayout& P, std::size_t f, const DoubleSection& s) {
  return DoubleSection{detail::embed(s.a, P.E.ctx(), P.offsets[f], P.renames[f]),
                       detail::embed(s.alpha, P.E.ctx(), P.offsets[f], P.renames[f])};
}

}  // namespace jqn
