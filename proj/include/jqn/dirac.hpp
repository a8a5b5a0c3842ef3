#pragma once

// Dirac structures supported on graph-type submanifolds, the split criterion
// for doubles, and Courant-Jacobi morphisms as supported Dirac structures.
//
// A subbundle over P is given by a polynomial frame together with a
// complement; the full frame must have a nonzero constant determinant over P.
// Its inverse is then polynomial and is obtained by the Faddeev-LeVerrier
// recursion, which only divides by integers. Membership of a section in the
// frame span is "all complement coordinates vanish".

#include <jqn/courant.hpp>

namespace jqn {

using PolyMatrix = std::vector<std::vector<Poly>>;

inline PolyMatrix matmul(const PolyMatrix& A, const PolyMatrix& B) {
  std::size_t n = A.size(), m = B.empty() ? 0 : B[0].size(), k = B.size();
  PolyMatrix C(n, std::vector<Poly>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (A[i][l].is_zero()) continue;
      for (std::size_t j = 0; j < m; ++j)
        if (!B[l][j].is_zero()) C[i][j] += A[i][l] * B[l][j];
    }
  return C;
}

struct InverseResult {
  Poly det;
  std::optional<PolyMatrix> inverse;  // present iff det is a nonzero constant
};

/// det and, when det is a nonzero constant, the polynomial inverse.
inline InverseResult constant_det_inverse(const PolyMatrix& A) {
  const std::size_t n = A.size();
  if (n == 0) return {Poly(1), PolyMatrix{}};
  PolyMatrix M(n, std::vector<Poly>(n));
  for (std::size_t i = 0; i < n; ++i) M[i][i] = Poly(1);
  Poly c;  // c_{n-k} at step k
  for (std::size_t k = 1;; ++k) {
    PolyMatrix AM = matmul(A, M);
    Poly tr;
    for (std::size_t i = 0; i < n; ++i) tr += AM[i][i];
    c = tr.scaled(Rat(-1, static_cast<long>(k)));
    if (k == n) break;
    for (std::size_t i = 0; i < n; ++i) AM[i][i] += c;
    M = std::move(AM);
  }
  // c is now c_0 = (-1)^n det A, and A^{-1} = -M / c_0.
  Poly det = n % 2 ? -c : c;
  InverseResult out{det, std::nullopt};
  if (!c.is_constant() || c.is_zero()) return out;
  Rat s = -Rat(1) / c.constant_value();
  for (auto& row : M)
    for (auto& e : row) e = e.scaled(s);
  out.inverse = std::move(M);
  return out;
}

// ---------------------------------------------------------------------------
// Supports

/// P = {x_j = p_j(free coordinates)} inside a chart.
struct Submanifold {
  std::vector<std::string> coords;
  std::map<std::string, Poly> rules;

  static Submanifold whole(std::vector<std::string> coords) { return Submanifold{std::move(coords), {}}; }

  std::vector<std::string> free_coords() const {
    std::vector<std::string> out;
    for (const auto& x : coords)
      if (!rules.count(x)) out.push_back(x);
    return out;
  }

  /// Right-hand sides use free coordinates only, so the rules are acyclic.
  void validate() const {
    for (const auto& [x, p] : rules) {
      if (std::find(coords.begin(), coords.end(), x) == coords.end())
        throw ContextError("submanifold constrains unknown coordinate " + x);
      for (const auto& v : p.variables()) {
        if (std::find(coords.begin(), coords.end(), v) == coords.end())
          throw ContextError("submanifold rule uses unknown variable " + v);
        if (rules.count(v)) throw ContextError("submanifold rule for " + x + " uses constrained coordinate " + v);
      }
    }
  }

  Poly reduce(const Poly& f) const { return rules.empty() ? f : substitute(f, rules); }
  Graded reduce(const Graded& g) const {
    return rules.empty() ? g : g.map_coeffs([&](const Poly& c) { return reduce(c); });
  }
  DoubleSection reduce(const DoubleSection& s) const { return DoubleSection{reduce(s.a), reduce(s.alpha)}; }

  /// x_j - p_j for each constrained coordinate.
  std::vector<Poly> vanishing() const {
    std::vector<Poly> out;
    for (const auto& [x, p] : rules) out.push_back(Poly::var(x) - p);
    return out;
  }

  /// Empty iff the vector field is tangent to P along P.
  std::string tangency_defect(const std::vector<Poly>& v) const {
    for (const auto& [x, p] : rules) {
      std::size_t j = std::find(coords.begin(), coords.end(), x) - coords.begin();
      Poly d = v[j];
      for (std::size_t i = 0; i < coords.size(); ++i)
        if (!rules.count(coords[i])) d -= v[i] * partial(p, coords[i]);
      Poly r = reduce(d);
      if (!r.is_zero()) return "d/d" + x + ": " + r.str();
    }
    return {};
  }
};

struct SupportedSubbundle {
  CourantJacobiStructure E;
  Submanifold support;
  std::vector<DoubleSection> frame;
  std::vector<DoubleSection> complement;
};

/// Components of a double section in the user basis of E (A-part first).
inline std::vector<Poly> coordinates(const CourantJacobiStructure& E, const DoubleSection& s) {
  std::vector<Poly> v(2 * E.rank());
  for (int k = 0; k < E.rank(); ++k) {
    v[k] = s.a.coeff(bit(k));
    v[E.rank() + k] = s.alpha.coeff(bit(k));
  }
  return v;
}

inline DoubleSection from_coordinates(const CourantJacobiStructure& E, const std::vector<Poly>& v) {
  DoubleSection s = E.zero();
  for (int k = 0; k < E.rank(); ++k) {
    s.a.add(bit(k), v[k]);
    s.alpha.add(bit(k), v[E.rank() + k]);
  }
  return s;
}

/// Rows: frame then complement, reduced mod the support.
inline PolyMatrix frame_matrix(const CourantJacobiStructure& E, const Submanifold& P,
                               const std::vector<DoubleSection>& rows) {
  PolyMatrix M;
  for (const auto& s : rows) {
    auto v = coordinates(E, s);
    for (auto& c : v) c = P.reduce(c);
    M.push_back(std::move(v));
  }
  return M;
}

/// Inverse of the full frame over P, or a ContextError describing why it is malformed.
inline PolyMatrix full_frame_inverse(const CourantJacobiStructure& E, const Submanifold& P,
                                     const std::vector<DoubleSection>& frame, const std::vector<DoubleSection>& compl_) {
  if (static_cast<int>(frame.size() + compl_.size()) != 2 * E.rank())
    throw ContextError("frame and complement must have " + std::to_string(2 * E.rank()) + " elements in total");
  std::vector<DoubleSection> rows = frame;
  rows.insert(rows.end(), compl_.begin(), compl_.end());
  for (const auto& r : rows) E.check(r);
  auto inv = constant_det_inverse(frame_matrix(E, P, rows));
  if (!inv.inverse) throw ContextError("frame with complement has determinant " + inv.det.str() + " over the support");
  return *inv.inverse;
}

/// Coefficients c with s = Σ c_k row_k over P.
inline std::vector<Poly> solve_in_frame(const CourantJacobiStructure& E, const Submanifold& P, const PolyMatrix& inv,
                                        const DoubleSection& s) {
  auto v = coordinates(E, P.reduce(s));
  std::vector<Poly> c(inv.size());
  for (std::size_t k = 0; k < inv.size(); ++k)
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!v[i].is_zero() && !inv[i][k].is_zero()) c[k] += v[i] * inv[i][k];
  for (auto& x : c) x = P.reduce(x);
  return c;
}

/// Tries complements built from basis sections until one is unimodular over P.
inline std::optional<std::vector<DoubleSection>> complete_frame(const CourantJacobiStructure& E, const Submanifold& P,
                                                                const std::vector<DoubleSection>& frame) {
  int total = 2 * E.rank(), need = total - static_cast<int>(frame.size());
  if (need < 0) return std::nullopt;
  std::vector<int> pick(need);
  std::function<std::optional<std::vector<DoubleSection>>(int, int)> rec =
      [&](int pos, int start) -> std::optional<std::vector<DoubleSection>> {
    if (pos == need) {
      std::vector<DoubleSection> comp;
      for (int k : pick) comp.push_back(E.basis(k));
      std::vector<DoubleSection> rows = frame;
      rows.insert(rows.end(), comp.begin(), comp.end());
      if (constant_det_inverse(frame_matrix(E, P, rows)).inverse) return comp;
      return std::nullopt;
    }
    for (int k = start; k <= total - (need - pos); ++k) {
      pick[pos] = k;
      if (auto r = rec(pos + 1, k + 1)) return r;
    }
    return std::nullopt;
  };
  return rec(0, 0);
}

struct ComplementResult {
  std::vector<DoubleSection> perp;        // frame of L^⊥ over P
  std::vector<DoubleSection> complement;  // completes perp to a full frame
};

/// L^⊥ over P from the dual basis of the full frame [L; C] under the pairing.
inline ComplementResult orthogonal_complement(const CourantJacobiStructure& E, const Submanifold& P,
                                              const std::vector<DoubleSection>& L,
                                              std::optional<std::vector<DoubleSection>> C = std::nullopt) {
  P.validate();
  if (!C) C = complete_frame(E, P, L);
  if (!C) throw ContextError("orthogonal complement: frame drops rank over the support");
  std::vector<DoubleSection> rows = L;
  rows.insert(rows.end(), C->begin(), C->end());
  full_frame_inverse(E, P, L, *C);
  const std::size_t n = rows.size();
  PolyMatrix G(n, std::vector<Poly>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) G[i][j] = P.reduce(cj_pairing(E, rows[i], rows[j]));
  auto inv = constant_det_inverse(G);
  if (!inv.inverse) throw ContextError("orthogonal complement: Gram matrix is not unimodular over the support");
  auto dual = [&](std::size_t i) {
    DoubleSection d = E.zero();
    for (std::size_t k = 0; k < n; ++k) d += rows[k].scaled((*inv.inverse)[i][k]);
    return P.reduce(d);
  };
  ComplementResult out;
  for (std::size_t i = L.size(); i < n; ++i) out.perp.push_back(dual(i));
  for (std::size_t i = 0; i < L.size(); ++i) out.complement.push_back(dual(i));
  return out;
}

// ---------------------------------------------------------------------------
// D1-D3

namespace detail {

inline std::string frame_tag(std::size_t i, std::size_t j) {
  return "(f" + std::to_string(i + 1) + ",f" + std::to_string(j + 1) + ") ";
}

/// Empty iff e1∘e2 restricted to P lies in the frame span.
inline std::string closure_defect(const SupportedSubbundle& F, const PolyMatrix& inv, const DoubleSection& x,
                                  const DoubleSection& y) {
  auto c = solve_in_frame(F.E, F.support, inv, cj_bracket(F.E, x, y));
  for (std::size_t k = F.frame.size(); k < c.size(); ++k)
    if (!c[k].is_zero()) return "complement coefficient c" + std::to_string(k - F.frame.size() + 1) + " = " + c[k].str();
  return {};
}

}  // namespace detail

inline CheckReport verify_dirac_supported(const SupportedSubbundle& F, bool probes = true) {
  const auto& E = F.E;
  const auto& P = F.support;
  E.validate();
  P.validate();
  if (P.coords != E.coords()) throw ContextError("support chart differs from the structure's chart");
  PolyMatrix inv = full_frame_inverse(E, P, F.frame, F.complement);
  CheckReport rep;
  timed_check(rep, "D1", "F is maximal isotropic over P", [&]() -> std::string {
    if (static_cast<int>(F.frame.size()) != E.rank())
      return "frame has " + std::to_string(F.frame.size()) + " elements, maximal isotropic needs " +
             std::to_string(E.rank());
    for (std::size_t i = 0; i < F.frame.size(); ++i)
      for (std::size_t j = i; j < F.frame.size(); ++j) {
        Poly g = P.reduce(cj_pairing(E, F.frame[i], F.frame[j]));
        if (!g.is_zero()) return detail::frame_tag(i, j) + g.str();
      }
    return {};
  });
  timed_check(rep, "D2", "rho(F) lies in TP x R over P", [&]() -> std::string {
    for (std::size_t i = 0; i < F.frame.size(); ++i) {
      std::string d = P.tangency_defect(cj_anchor(E, F.frame[i]).vec);
      if (!d.empty()) return "f" + std::to_string(i + 1) + " " + d;
    }
    return {};
  });
  timed_check(rep, "D3", "(e1∘e2)|P in F for extensions of frame sections", [&]() -> std::string {
    for (std::size_t i = 0; i < F.frame.size(); ++i)
      for (std::size_t j = 0; j < F.frame.size(); ++j) {
        std::string d = detail::closure_defect(F, inv, F.frame[i], F.frame[j]);
        if (!d.empty()) return detail::frame_tag(i, j) + d;
      }
    return {};
  });
  if (probes && !P.rules.empty() && !F.complement.empty()) {
    // Perturb one frame section by (function vanishing on P)·(complement section).
    timed_check(rep, "D3_probe", "D3 is unchanged under perturbed extensions", [&]() -> std::string {
      auto hs = P.vanishing();
      for (std::size_t h = 0; h < hs.size(); ++h)
        for (std::size_t i = 0; i < F.frame.size(); ++i) {
          DoubleSection fi = F.frame[i] + F.complement[i % F.complement.size()].scaled(hs[h]);
          for (std::size_t j = 0; j < F.frame.size(); ++j) {
            for (int side = 0; side < 2; ++side) {
              std::string d = side ? detail::closure_defect(F, inv, F.frame[j], fi)
                                   : detail::closure_defect(F, inv, fi, F.frame[j]);
              if (!d.empty()) return "probe " + std::to_string(h + 1) + " " + detail::frame_tag(side ? j : i, side ? i : j) + d;
            }
          }
        }
      return {};
    });
  }
  return rep;
}

inline bool dirac_verdict(const CheckReport& r) { return r.passed("D1") && r.passed("D2") && r.passed("D3"); }

// ---------------------------------------------------------------------------
// Split criterion for doubles: F = L ⊕ L° with L ⊂ A over P

struct SplitData {
  SupportedSubbundle F;
  std::vector<Graded> L, Lann;  // frames of L ⊂ A and of its annihilator L° ⊂ A*
};

/// L° from the dual basis of the A-frame [L; C].
inline SplitData split_subbundle(const CourantJacobiStructure& E, const Submanifold& P, const std::vector<Graded>& L,
                                 const std::vector<Graded>& C) {
  P.validate();
  const int r = E.rank();
  if (static_cast<int>(L.size() + C.size()) != r) throw ContextError("split: L and its complement must span A");
  PolyMatrix B;
  for (const auto* part : {&L, &C})
    for (const auto& g : *part) {
      E.check(E.make(g, E.zero().alpha));
      std::vector<Poly> row(r);
      for (int k = 0; k < r; ++k) row[k] = P.reduce(g.coeff(bit(k)));
      B.push_back(row);
    }
  auto inv = constant_det_inverse(B);
  if (!inv.inverse) throw ContextError("split: L with complement has determinant " + inv.det.str() + " over the support");
  // Dual basis D_i = Σ_k (B^{-1})_{k i} ε^k satisfies D_i(B_j) = δ_ij.
  auto dual = [&](int i) {
    Graded d = E.zero().alpha;
    for (int k = 0; k < r; ++k) d.add(bit(k), (*inv.inverse)[k][i]);
    return d;
  };
  SplitData S{SupportedSubbundle{E, P, {}, {}}, L, {}};
  for (int i = static_cast<int>(L.size()); i < r; ++i) S.Lann.push_back(dual(i));
  for (const auto& l : L) S.F.frame.push_back(E.make(l, E.zero().alpha));
  for (const auto& a : S.Lann) S.F.frame.push_back(E.make(E.zero().a, a));
  for (const auto& c : C) S.F.complement.push_back(E.make(c, E.zero().alpha));
  for (int i = 0; i < static_cast<int>(L.size()); ++i) S.F.complement.push_back(E.make(E.zero().a, dual(i)));
  return S;
}

/// Conditions 1-4 evaluated directly and the supported-Dirac verdict on L ⊕ L°.
/// Condition 4 is X_A(λ, λ', λ'')|P = 0 for λ's in L°; this is what closure
/// of the X_A(α,β,-) term needs, and it is weaker than X_A|P ∈ Γ(∧³L).
inline CheckReport verify_split_theorem(const CourantJacobiStructure& E, const Submanifold& P, const std::vector<Graded>& L,
                                        const std::vector<Graded>& C) {
  if (std::any_of(E.bar.begin(), E.bar.end(), [](int b) { return b < 0; }))
    throw ContextError("split criterion applies to plain doubles");
  SplitData S = split_subbundle(E, P, L, C);
  const auto& Q = E.Q;
  CheckReport rep;
  auto ann_defect = [&](const Graded& x, const std::vector<Graded>& against) -> std::string {
    for (std::size_t k = 0; k < against.size(); ++k) {
      Poly v = P.reduce(pair(against[k], x));
      if (!v.is_zero()) return "pairing with #" + std::to_string(k + 1) + " = " + v.str();
    }
    return {};
  };
  timed_check(rep, "T1", "L is a Lie subalgebroid of A over P", [&]() -> std::string {
    for (std::size_t i = 0; i < L.size(); ++i) {
      std::string d = P.tangency_defect(anchor_vector(Q.host.base, L[i]));
      if (!d.empty()) return "anchor of l" + std::to_string(i + 1) + " " + d;
    }
    for (std::size_t i = 0; i < L.size(); ++i)
      for (std::size_t j = i + 1; j < L.size(); ++j) {
        std::string d = ann_defect(bracket(Q.host.base, L[i], L[j]), S.Lann);
        if (!d.empty()) return "[l" + std::to_string(i + 1) + ",l" + std::to_string(j + 1) + "] " + d;
      }
    return {};
  });
  timed_check(rep, "T2", "L° is closed for the bracket on A*", [&]() -> std::string {
    for (std::size_t i = 0; i < S.Lann.size(); ++i)
      for (std::size_t j = i + 1; j < S.Lann.size(); ++j) {
        std::string d = ann_defect(bracket(Q.dual, S.Lann[i], S.Lann[j]), L);
        if (!d.empty()) return "[m" + std::to_string(i + 1) + ",m" + std::to_string(j + 1) + "] " + d;
      }
    return {};
  });
  timed_check(rep, "T3", "rho_*(L°) lies in TP x R over P", [&]() -> std::string {
    for (std::size_t i = 0; i < S.Lann.size(); ++i) {
      std::string d = P.tangency_defect(anchor_vector(Q.dual, S.Lann[i]));
      if (!d.empty()) return "m" + std::to_string(i + 1) + " " + d;
    }
    return {};
  });
  timed_check(rep, "T4", "X_A(m, m', m'')|P = 0 on L°", [&]() -> std::string {
    const auto& M = S.Lann;
    for (std::size_t i = 0; i < M.size(); ++i)
      for (std::size_t j = i + 1; j < M.size(); ++j)
        for (std::size_t k = j + 1; k < M.size(); ++k) {
          Poly v = P.reduce(evaluate(Q.X, {M[i], M[j], M[k]}));
          if (!v.is_zero())
            return "(m" + std::to_string(i + 1) + ",m" + std::to_string(j + 1) + ",m" + std::to_string(k + 1) + ") " + v.str();
        }
    return {};
  });
  bool t = rep.passed();
  CheckReport d = verify_dirac_supported(S.F);
  rep.merge(d);
  bool dv = dirac_verdict(d);
  rep.add("AGREE", "verdict(T1-T4) = verdict(D1-D3)", t == dv,
          t == dv ? std::string{} : std::string("T ") + (t ? "pass" : "fail") + ", D " + (dv ? "pass" : "fail"));
  return rep;
}

/// X_A|P ∈ Γ(∧³L): every contraction of X_A with L° vanishes over P.
inline bool strict_trivector_condition(const CourantJacobiStructure& E, const Submanifold& P, const std::vector<Graded>& L,
                                       const std::vector<Graded>& C) {
  SplitData S = split_subbundle(E, P, L, C);
  for (const auto& m : S.Lann)
    if (!P.reduce(interior(m, E.Q.X)).is_zero()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Morphisms

struct MorphismGraph {
  ProductLayout layout;
  SupportedSubbundle F;
};

namespace detail {

inline Submanifold graph_support(const ProductLayout& lay, std::size_t f, const PolyMap& base) {
  Submanifold P{lay.E.coords(), {}};
  for (std::size_t j = 0; j < base.target.size(); ++j)
    P.rules.emplace(lay.renames[f].at(base.target[j]).str(), base.components[j]);
  return P;
}

/// Section of the product with A-components va and A*-components valpha, indices already global.
inline DoubleSection product_section(const CourantJacobiStructure& E, const std::vector<std::pair<int, Poly>>& va,
                                     const std::vector<std::pair<int, Poly>>& valpha) {
  DoubleSection s = E.zero();
  for (const auto& [k, c] : va) s.a.add(bit(k), c);
  for (const auto& [k, c] : valpha) s.alpha.add(bit(k), c);
  return s;
}

}  // namespace detail

/// F = {(a + Ψ*b*, Ψa + b*)} ⊂ E1 × Ē2 over the graph of the base map, Ψ unchecked.
/// Ψ's coefficients live on the source chart, whose names the product keeps.
inline MorphismGraph assemble_morphism_graph(const BundleMap& psi, const QuasiJacobiBialgebroid& QA,
                                             const QuasiJacobiBialgebroid& QB) {
  psi.validate();
  ProductLayout lay = product({assemble_double(QA), barred(assemble_double(QB))});
  const auto& E = lay.E;
  int ra = QA.rank(), rb = QB.rank(), ob = lay.offsets[1];
  SupportedSubbundle F{E, detail::graph_support(lay, 1, psi.base), {}, {}};
  for (int a = 0; a < ra; ++a) {
    std::vector<std::pair<int, Poly>> va{{a, Poly(1)}};
    for (int b = 0; b < rb; ++b) va.emplace_back(ob + b, psi.fiber[b][a]);
    F.frame.push_back(detail::product_section(E, va, {}));
  }
  for (int b = 0; b < rb; ++b) {
    std::vector<std::pair<int, Poly>> val{{ob + b, Poly(1)}};
    for (int a = 0; a < ra; ++a) val.emplace_back(a, psi.fiber[b][a]);
    F.frame.push_back(detail::product_section(E, {}, val));
  }
  for (int b = 0; b < rb; ++b) F.complement.push_back(detail::product_section(E, {{ob + b, Poly(1)}}, {}));
  for (int a = 0; a < ra; ++a) F.complement.push_back(detail::product_section(E, {}, {{a, Poly(1)}}));
  return MorphismGraph{lay, F};
}

inline MorphismGraph graph_of_qjb_morphism(const BundleMap& psi, const QuasiJacobiBialgebroid& QA,
                                           const QuasiJacobiBialgebroid& QB) {
  auto rep = verify_qjb_morphism(psi, QA, QB);
  if (!rep.passed()) throw RejectedInput("morphism graph: not a quasi-Jacobi bialgebroid morphism: " + rep.first_failure());
  return assemble_morphism_graph(psi, QA, QB);
}

/// L_ψ ⊂ E¹(M) × Ē¹(M') over the graph of ψ: M → M'.
inline MorphismGraph standard_morphism(const PolyMap& psi) {
  psi.validate();
  ProductLayout lay = product({build_standard_e1(psi.source), barred(build_standard_e1(psi.target))});
  const auto& E = lay.E;
  int n = static_cast<int>(psi.source.size()), m = static_cast<int>(psi.target.size());
  int o2 = lay.offsets[1];
  SupportedSubbundle F{E, detail::graph_support(lay, 1, psi), {}, {}};
  for (int i = 0; i < n; ++i) {  // (∂_i, ψ_* ∂_i)
    std::vector<std::pair<int, Poly>> va{{i, Poly(1)}};
    for (int j = 0; j < m; ++j) va.emplace_back(o2 + j, partial(psi.components[j], psi.source[i]));
    F.frame.push_back(detail::product_section(E, va, {}));
  }
  F.frame.push_back(detail::product_section(E, {{n, Poly(1)}, {o2 + m, Poly(1)}}, {}));
  for (int j = 0; j < m; ++j) {  // (ψ* dx'_j, dx'_j)
    std::vector<std::pair<int, Poly>> val{{o2 + j, Poly(1)}};
    for (int i = 0; i < n; ++i) val.emplace_back(i, partial(psi.components[j], psi.source[i]));
    F.frame.push_back(detail::product_section(E, {}, val));
  }
  F.frame.push_back(detail::product_section(E, {}, {{n, Poly(1)}, {o2 + m, Poly(1)}}));
  for (int j = 0; j <= m; ++j) F.complement.push_back(detail::product_section(E, {{o2 + j, Poly(1)}}, {}));
  for (int i = 0; i <= n; ++i) F.complement.push_back(detail::product_section(E, {}, {{i, Poly(1)}}));
  return MorphismGraph{lay, F};
}

/// {(X, X - ρ*(ξ), ρ(X) + ξ)} ⊂ E × Ē × Ē¹(M) over the graph of the diagonal.
inline MorphismGraph diagonal_morphism(const CourantJacobiStructure& E0) {
  const auto& cs = E0.coords();
  ProductLayout lay = product({E0, barred(E0), barred(build_standard_e1(cs))});
  const auto& E = lay.E;
  const int r = E0.rank(), n = static_cast<int>(cs.size()), o3 = lay.offsets[2];
  Submanifold P{E.coords(), {}};
  for (std::size_t f = 1; f < 3; ++f)
    for (const auto& x : cs) P.rules.emplace(lay.renames[f].at(x).str(), Poly::var(x));
  SupportedSubbundle F{E, P, {}, {}};
  auto e1_anchor_part = [&](const AnchorImage& img) {
    DoubleSection s = E.zero();
    for (int i = 0; i < n; ++i) s.a.add(bit(o3 + i), substitute(img.vec[i], lay.renames[2]));
    s.a.add(bit(o3 + n), substitute(img.scalar, lay.renames[2]));
    return s;
  };
  for (int k = 0; k < 2 * r; ++k) {
    DoubleSection X = E0.basis(k);
    F.frame.push_back(embed_section(lay, 0, X) + embed_section(lay, 1, X) + e1_anchor_part(cj_anchor(E0, X)));
  }
  for (int i = 0; i <= n; ++i) {
    std::vector<Poly> xi(n);
    Poly xi0;
    if (i < n) xi[i] = Poly(1);
    else xi0 = Poly(1);
    DoubleSection s = -embed_section(lay, 1, anchor_transpose(E0, xi, xi0));
    s.alpha.add(bit(o3 + i), Poly(1));
    F.frame.push_back(s);
  }
  for (int k = 0; k < 2 * r; ++k) F.complement.push_back(embed_section(lay, 1, E0.basis(k)));
  for (int i = 0; i <= n; ++i) F.complement.push_back(detail::product_section(E, {{o3 + i, Poly(1)}}, {}));
  return MorphismGraph{lay, F};
}

}  // namespace jqn
