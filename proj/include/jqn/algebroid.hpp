#pragma once

// Lie and Jacobi algebroid calculus over a trivialized bundle.
//
// A LieAlgebroid records the variance of its sections, so the dual of a
// Lie algebroid (sections = forms of the original context) reuses every
// operation below without transposing anything by hand.

#include <jqn/exterior.hpp>
#include <jqn/report.hpp>

namespace jqn {

struct LieAlgebroid {
  ContextPtr ctx;
  Variance sections = Variance::multivector;
  std::vector<std::vector<Poly>> anchor;  // anchor[a][i]: ∂_i-component of ρ(e_a)
  std::vector<Graded> structure;          // structure[a * rank + b] = [e_a, e_b]

  static LieAlgebroid zero(ContextPtr ctx, Variance sections = Variance::multivector) {
    LieAlgebroid A{ctx, sections, {}, {}};
    A.anchor.assign(ctx->rank, std::vector<Poly>(ctx->dim()));
    for (int i = 0; i < ctx->rank * ctx->rank; ++i) A.structure.emplace_back(ctx, sections, 1);
    return A;
  }

  int rank() const { return ctx->rank; }
  int dim() const { return ctx->dim(); }
  Variance forms() const { return opposite(sections); }

  const Graded& bracket_basis(int a, int b) const { return structure.at(a * rank() + b); }
  void set_bracket(int a, int b, const Graded& v) {
    structure.at(a * rank() + b) = v;
    structure.at(b * rank() + a) = -v;
  }

  Graded section(int a, const Poly& c = Poly(1)) const { return Graded::basis(ctx, sections, a, c); }
  Graded coform(int a, const Poly& c = Poly(1)) const { return Graded::basis(ctx, forms(), a, c); }
  Graded scalar_section(const Poly& f) const { return Graded::scalar(ctx, sections, f); }
  Graded scalar_form(const Poly& f) const { return Graded::scalar(ctx, forms(), f); }

  void validate() const {
    if (static_cast<int>(anchor.size()) != rank()) throw ContextError("anchor rows differ from rank");
    for (const auto& row : anchor)
      if (static_cast<int>(row.size()) != dim()) throw ContextError("anchor columns differ from chart dimension");
    if (static_cast<int>(structure.size()) != rank() * rank()) throw ContextError("structure table has wrong size");
    for (const auto& s : structure)
      if (s.degree() != 1 || s.variance() != sections || !same_context(s.context(), ctx))
        throw ContextError("structure entries must be degree-1 sections on the algebroid context");
  }
};

/// ρ(X) f.
inline Poly anchor_apply(const LieAlgebroid& A, const Graded& x, const Poly& f) {
  Poly out;
  if (f.is_zero()) return out;
  std::vector<Poly> grads(A.dim());
  for (int i = 0; i < A.dim(); ++i) grads[i] = partial(f, A.ctx->coords[i]);
  for (const auto& [m, c] : x.terms()) {
    int a = std::countr_zero(m);
    Poly acc;
    for (int i = 0; i < A.dim(); ++i)
      if (!A.anchor[a][i].is_zero() && !grads[i].is_zero()) acc += A.anchor[a][i] * grads[i];
    out += c * acc;
  }
  return out;
}

inline Poly anchor_basis(const LieAlgebroid& A, int a, const Poly& f) { return anchor_apply(A, A.section(a), f); }

/// Anchor of a degree-1 section as a vector field (components per coordinate).
inline std::vector<Poly> anchor_vector(const LieAlgebroid& A, const Graded& x) {
  std::vector<Poly> v(A.dim());
  for (const auto& [m, c] : x.terms()) {
    int a = std::countr_zero(m);
    for (int i = 0; i < A.dim(); ++i) v[i] += c * A.anchor[a][i];
  }
  return v;
}

/// df(e_a) = ρ(e_a) f.
inline Graded d_function(const LieAlgebroid& A, const Poly& f) {
  Graded r(A.ctx, A.forms(), 1);
  for (int a = 0; a < A.rank(); ++a) r.add(bit(a), anchor_basis(A, a, f));
  return r;
}

namespace detail {

inline Graded d_basis_form(const LieAlgebroid& A, Mask k) {
  Graded r(A.ctx, A.forms(), popcount(k) + 1);
  if (k == 0) return r;
  int c = std::countr_zero(k);
  Mask rest = k & ~bit(c);
  // d e^c = -Σ_{a<b} C^c_{ab} e^a ∧ e^b
  Graded dc(A.ctx, A.forms(), 2);
  for (int a = 0; a < A.rank(); ++a)
    for (int b = a + 1; b < A.rank(); ++b) {
      Poly coef = A.bracket_basis(a, b).component(c);
      if (!coef.is_zero()) dc.add(bit(a) | bit(b), -coef);
    }
  Graded restform = Graded::basis_mask(A.ctx, A.forms(), rest);
  r += wedge(dc, restform);
  if (rest) r -= wedge(A.coform(c), d_basis_form(A, rest));
  return r;
}

}  // namespace detail

/// Cartan differential of A on forms of any degree.
inline Graded differential(const LieAlgebroid& A, const Graded& w) {
  if (!same_context(w.context(), A.ctx)) throw ContextError("differential: context mismatch");
  if (w.variance() != A.forms()) throw ContextError("differential: element is not a form of this algebroid");
  Graded r(A.ctx, A.forms(), w.degree() + 1);
  if (w.degree() + 1 > A.rank()) return r;
  for (const auto& [k, c] : w.terms()) {
    r += wedge(d_function(A, c), Graded::basis_mask(A.ctx, A.forms(), k));
    if (k) r += detail::d_basis_form(A, k).scaled(c);
  }
  return r;
}

namespace detail {

inline int sgn(int e) { return e % 2 ? -1 : 1; }

// [e_a, e_J] = Σ_s e_{j1} ∧ .. ∧ [e_a, e_js] ∧ .. ∧ e_{jq}
inline Graded bracket_vec_basis(const LieAlgebroid& A, int a, Mask j) {
  Graded r(A.ctx, A.sections, popcount(j));
  auto idx = mask_indices(j);
  for (std::size_t s = 0; s < idx.size(); ++s) {
    const Graded& br = A.bracket_basis(a, idx[s]);
    if (br.is_zero()) continue;
    Mask before = 0, after = 0;
    for (std::size_t q = 0; q < idx.size(); ++q) {
      if (q < s) before |= bit(idx[q]);
      if (q > s) after |= bit(idx[q]);
    }
    Graded t = wedge(Graded::basis_mask(A.ctx, A.sections, before), br);
    r += wedge(t, Graded::basis_mask(A.ctx, A.sections, after));
  }
  return r;
}

// [e_I, e_J] by peeling the smallest index of I.
inline Graded bracket_basis_masks(const LieAlgebroid& A, Mask i, Mask j) {
  int deg = popcount(i) + popcount(j) - 1;
  if (i == 0 || deg < 0) return Graded(A.ctx, A.sections, std::max(deg, 0));
  int a = std::countr_zero(i);
  Mask rest = i & ~bit(a);
  Graded ea = A.section(a);
  Graded r(A.ctx, A.sections, deg);
  if (rest) r += wedge(ea, bracket_basis_masks(A, rest, j));
  int q = popcount(j);
  Graded t = wedge(bracket_vec_basis(A, a, j), Graded::basis_mask(A.ctx, A.sections, rest));
  r += sgn((q - 1) * popcount(rest)) > 0 ? t : -t;
  return r;
}

}  // namespace detail

/// Schouten bracket of multisections, built from the structure functions by the
/// biderivation rules; bracket with a function g is (-1)^{p-1} i_{dg}.
inline Graded bracket(const LieAlgebroid& A, const Graded& P, const Graded& Q) {
  if (!same_context(P.context(), A.ctx) || !same_context(Q.context(), A.ctx))
    throw ContextError("bracket: context mismatch");
  if (P.variance() != A.sections || Q.variance() != A.sections)
    throw ContextError("bracket: operands must be sections of the algebroid");
  int p = P.degree(), q = Q.degree();
  int deg = p + q - 1;
  if (deg < 0) return Graded(A.ctx, A.sections, 0);
  Graded r(A.ctx, A.sections, deg);
  if (deg > A.rank()) return r;
  for (const auto& [i, f] : P.terms())
    for (const auto& [j, g] : Q.terms()) {
      Graded ei = Graded::basis_mask(A.ctx, A.sections, i);
      Graded ej = Graded::basis_mask(A.ctx, A.sections, j);
      if (p >= 1 && !g.is_constant()) {
        // f (-1)^{p-1} i_{dg} e_I ∧ e_J
        Graded t = wedge(interior(d_function(A, g), ei), ej).scaled(f);
        r += detail::sgn(p - 1) > 0 ? t : -t;
      }
      if (p >= 1 && q >= 1) r += detail::bracket_basis_masks(A, i, j).scaled(f * g);
      if (q >= 1 && !f.is_constant()) {
        // -(-1)^{(q-1)p} g i_{df} e_J ∧ e_I
        Graded t = wedge(interior(d_function(A, f), ej), ei).scaled(g);
        r += detail::sgn((q - 1) * p) > 0 ? -t : t;
      }
    }
  return r;
}

inline std::string witness_of(const Graded& residual) {
  auto t = residual.first_term();
  if (!t) return {};
  return mask_str(t->first) + ": " + t->second.str();
}
inline std::string witness_of(const Poly& residual) { return residual.is_zero() ? std::string{} : residual.str(); }

/// Jacobi identity, anchor-bracket compatibility and antisymmetry of the
/// structure functions on basis sections.
inline CheckReport verify_lie_algebroid(const LieAlgebroid& A) {
  CheckReport rep;
  A.validate();
  int r = A.rank();
  timed_check(rep, "antisymmetry", "structure functions are antisymmetric", [&]() -> std::string {
    for (int a = 0; a < r; ++a)
      for (int b = a; b < r; ++b) {
        Graded s = A.bracket_basis(a, b) + A.bracket_basis(b, a);
        if (!s.is_zero()) return "[e" + std::to_string(a + 1) + ",e" + std::to_string(b + 1) + "] " + witness_of(s);
      }
    return {};
  });
  timed_check(rep, "jacobi", "Jacobi identity on basis triples", [&]() -> std::string {
    for (int a = 0; a < r; ++a)
      for (int b = a + 1; b < r; ++b)
        for (int c = b + 1; c < r; ++c) {
          Graded ea = A.section(a), eb = A.section(b), ec = A.section(c);
          Graded s = bracket(A, bracket(A, ea, eb), ec) + bracket(A, bracket(A, eb, ec), ea) +
                     bracket(A, bracket(A, ec, ea), eb);
          if (!s.is_zero())
            return "(e" + std::to_string(a + 1) + ",e" + std::to_string(b + 1) + ",e" + std::to_string(c + 1) + ") " +
                   witness_of(s);
        }
    return {};
  });
  timed_check(rep, "anchor", "anchor is a bracket morphism on basis pairs", [&]() -> std::string {
    for (int a = 0; a < r; ++a)
      for (int b = a + 1; b < r; ++b) {
        auto lhs = anchor_vector(A, A.bracket_basis(a, b));
        for (int i = 0; i < A.dim(); ++i) {
          Poly rhs = anchor_basis(A, a, A.anchor[b][i]) - anchor_basis(A, b, A.anchor[a][i]);
          Poly res = lhs[i] - rhs;
          if (!res.is_zero())
            return "(e" + std::to_string(a + 1) + ",e" + std::to_string(b + 1) + ") d/d" + A.ctx->coords[i] + ": " +
                   res.str();
        }
      }
    return {};
  });
  return rep;
}

struct JacobiAlgebroid {
  LieAlgebroid base;
  Graded phi;  // degree-1 form

  const ContextPtr& ctx() const { return base.ctx; }
  int rank() const { return base.rank(); }

  void validate() const {
    base.validate();
    if (phi.degree() != 1 || phi.variance() != base.forms() || !same_context(phi.context(), base.ctx))
      throw ContextError("cocycle must be a degree-1 form of the algebroid");
  }
};

inline JacobiAlgebroid with_cocycle(LieAlgebroid A, Graded phi) { return JacobiAlgebroid{std::move(A), std::move(phi)}; }

/// Lie algebroid axioms plus closedness of the cocycle.
inline CheckReport verify_jacobi_algebroid(const JacobiAlgebroid& J) {
  CheckReport rep = verify_lie_algebroid(J.base);
  timed_check(rep, "cocycle", "d phi = 0", [&] { return witness_of(differential(J.base, J.phi)); });
  return rep;
}

/// d^φ ω = dω + φ ∧ ω.
inline Graded phi_differential(const JacobiAlgebroid& J, const Graded& w) {
  return differential(J.base, w) + wedge(J.phi, w);
}

/// ρ^φ(X) f = ρ(X) f + f <φ, X>.
inline Poly rho_phi(const JacobiAlgebroid& J, const Graded& x, const Poly& f) {
  if (x.degree() != 1) throw ContextError("rho_phi: section must have degree 1");
  return anchor_apply(J.base, x, f) + f * pair(J.phi, x);
}

/// [P,Q]^φ = [P,Q] + (p-1) P ∧ i_φ Q - (-1)^{p-1} (q-1) i_φ P ∧ Q, for all p, q ≥ 0.
inline Graded schouten_jacobi(const JacobiAlgebroid& J, const Graded& P, const Graded& Q) {
  int p = P.degree(), q = Q.degree();
  Graded r = bracket(J.base, P, Q);
  if (p + q - 1 < 0) return r;
  if (p - 1 != 0 && q >= 1) r += wedge(P, interior(J.phi, Q)).scaled(Poly(p - 1));
  if (q - 1 != 0 && p >= 1) {
    Graded t = wedge(interior(J.phi, P), Q).scaled(Poly(q - 1));
    r += detail::sgn(p - 1) > 0 ? -t : t;
  }
  return r;
}

/// L^φ_X = i_X ∘ d^φ + d^φ ∘ i_X.
inline Graded lie_derivative_phi(const JacobiAlgebroid& J, const Graded& x, const Graded& w) {
  if (x.degree() != 1) throw ContextError("lie_derivative_phi: X must have degree 1");
  Graded r = interior(x, phi_differential(J, w));
  if (w.degree() >= 1) r += phi_differential(J, interior(x, w));
  return r;
}

/// Lie derivative of the untwisted algebroid.
inline Graded lie_derivative(const LieAlgebroid& A, const Graded& x, const Graded& w) {
  Graded r = interior(x, differential(A, w));
  if (w.degree() >= 1) r += differential(A, interior(x, w));
  return r;
}

// ---------------------------------------------------------------------------
// Nijenhuis deformation and torsion

/// [X,Y]_N = [NX,Y] + [X,NY] - N[X,Y].
inline Graded deformed_bracket(const LieAlgebroid& A, const EndomorphismField& N, const Graded& x, const Graded& y) {
  return bracket(A, apply(N, x), y) + bracket(A, x, apply(N, y)) - apply(N, bracket(A, x, y));
}

/// T_N(X,Y) = [NX,NY] - N[X,Y]_N.
inline Graded torsion_value(const LieAlgebroid& A, const EndomorphismField& N, const Graded& x, const Graded& y) {
  return bracket(A, apply(N, x), apply(N, y)) - apply(N, deformed_bracket(A, N, x, y));
}

/// Torsion on all basis pairs: table[a * rank + b] = T_N(e_a, e_b).
inline std::vector<Graded> torsion(const LieAlgebroid& A, const EndomorphismField& N) {
  N.validate();
  if (N.rank() != A.rank()) throw ContextError("torsion: rank mismatch");
  std::vector<Graded> table;
  for (int a = 0; a < A.rank(); ++a)
    for (int b = 0; b < A.rank(); ++b) table.push_back(torsion_value(A, N, A.section(a), A.section(b)));
  return table;
}

inline bool all_zero(const std::vector<Graded>& v) {
  return std::all_of(v.begin(), v.end(), [](const Graded& g) { return g.is_zero(); });
}

/// Endomorphism acting on the sections of A (transposed when A's sections are forms).
inline Graded apply_on_sections(const EndomorphismField& N, const Graded& x) { return apply(N, x); }

struct Deformation {
  LieAlgebroid deformed;  // (A, [.,.]_N, ρ∘N)
  Graded cocycle;         // N*φ
  bool nijenhuis = false; // T_N = 0
};

inline LieAlgebroid deform(const LieAlgebroid& A, const EndomorphismField& N) {
  LieAlgebroid D = LieAlgebroid::zero(A.ctx, A.sections);
  for (int a = 0; a < A.rank(); ++a) {
    Graded na = apply(N, A.section(a));
    D.anchor[a] = anchor_vector(A, na);
    for (int b = 0; b < A.rank(); ++b)
      D.structure[a * A.rank() + b] = deformed_bracket(A, N, A.section(a), A.section(b));
  }
  return D;
}

inline Deformation deform_algebroid(const JacobiAlgebroid& J, const EndomorphismField& N) {
  Deformation out{deform(J.base, N), apply_dual(N, J.phi), false};
  out.nijenhuis = all_zero(torsion(J.base, N));
  return out;
}

// ---------------------------------------------------------------------------
// Bivectors and the induced structure on the dual

/// π♯(α) = i_α π.
inline Graded sharp(const Graded& pi, const Graded& alpha) { return interior(alpha, pi); }

/// π(α, β) = i_β i_α π.
inline Poly bivector_pair(const Graded& pi, const Graded& alpha, const Graded& beta) {
  return interior(beta, interior(alpha, pi)).value();
}

inline CheckReport is_jacobi_bivector(const JacobiAlgebroid& J, const Graded& pi) {
  CheckReport rep;
  timed_check(rep, "jacobi_bivector", "[pi,pi]^phi = 0",
              [&] { return witness_of(schouten_jacobi(J, pi, pi)); });
  return rep;
}

/// [α,β]_π = L^φ_{π♯α} β - L^φ_{π♯β} α - d^φ(π(α,β)).
inline Graded dual_bracket(const JacobiAlgebroid& J, const Graded& pi, const Graded& alpha, const Graded& beta) {
  return lie_derivative_phi(J, sharp(pi, alpha), beta) - lie_derivative_phi(J, sharp(pi, beta), alpha) -
         phi_differential(J, J.base.scalar_form(bivector_pair(pi, alpha, beta)));
}

/// (A*, [.,.]_π, ρ∘π♯) as an algebroid whose sections are forms of A.
inline LieAlgebroid dual_structure(const JacobiAlgebroid& J, const Graded& pi, bool require_jacobi = true) {
  const LieAlgebroid& A = J.base;
  if (require_jacobi && !schouten_jacobi(J, pi, pi).is_zero())
    throw ContextError("dual_structure: bivector is not Jacobi");
  LieAlgebroid D = LieAlgebroid::zero(A.ctx, A.forms());
  for (int a = 0; a < A.rank(); ++a) {
    D.anchor[a] = anchor_vector(A, sharp(pi, A.coform(a)));
    for (int b = 0; b < A.rank(); ++b)
      D.structure[a * A.rank() + b] = dual_bracket(J, pi, A.coform(a), A.coform(b));
  }
  return D;
}

/// The bivector Nπ with (Nπ)♯ = N ∘ π♯ (antisymmetrized; exact when N is compatible with π).
inline Graded compose_bivector(const EndomorphismField& N, const Graded& pi) {
  Graded r = pi.zero_like(2);
  const auto& ctx = pi.context();
  Variance fv = opposite(pi.variance());
  int n = pi.rank();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Graded ea = Graded::basis(ctx, fv, a), eb = Graded::basis(ctx, fv, b);
      Poly ab = pair(eb, apply(N, sharp(pi, ea)));
      Poly ba = pair(ea, apply(N, sharp(pi, eb)));
      r.add(bit(a) | bit(b), (ab - ba).scaled(Rat(1, 2)));
    }
  return r;
}

/// Nπ♯ = π♯N* (as matrices) and vanishing Magri-Morosi concomitant on dual basis pairs.
inline CheckReport compat_and_concomitant(const JacobiAlgebroid& J, const Graded& pi, const EndomorphismField& N,
                                          bool require_jacobi = true) {
  if (require_jacobi && !schouten_jacobi(J, pi, pi).is_zero())
    throw ContextError("compat_and_concomitant: bivector is not Jacobi");
  CheckReport rep;
  const LieAlgebroid& A = J.base;
  timed_check(rep, "compat", "N pi# = pi# N*", [&]() -> std::string {
    for (int a = 0; a < A.rank(); ++a) {
      Graded alpha = A.coform(a);
      Graded res = apply(N, sharp(pi, alpha)) - sharp(pi, apply_dual(N, alpha));
      if (!res.is_zero()) return "e^" + std::to_string(a + 1) + " " + witness_of(res);
    }
    return {};
  });
  Graded npi = compose_bivector(N, pi);
  timed_check(rep, "concomitant", "Magri-Morosi concomitant C(pi,N) = 0", [&]() -> std::string {
    for (int a = 0; a < A.rank(); ++a)
      for (int b = a + 1; b < A.rank(); ++b) {
        Graded al = A.coform(a), be = A.coform(b);
        Graded lhs = dual_bracket(J, npi, al, be);
        Graded rhs = dual_bracket(J, pi, apply_dual(N, al), be) + dual_bracket(J, pi, al, apply_dual(N, be)) -
                     apply_dual(N, dual_bracket(J, pi, al, be));
        Graded res = lhs - rhs;
        if (!res.is_zero()) return "(e^" + std::to_string(a + 1) + ",e^" + std::to_string(b + 1) + ") " + witness_of(res);
      }
    return {};
  });
  return rep;
}

// ---------------------------------------------------------------------------
// Poissonization

/// Â over M × R: same structure functions, anchor ρ(X) + <φ,X> ∂/∂t.
inline LieAlgebroid poissonize(const JacobiAlgebroid& J) {
  const auto& coords = J.ctx()->coords;
  if (std::find(coords.begin(), coords.end(), kTime) != coords.end())
    throw ContextError("poissonize: chart already contains t");
  auto hat_coords = coords;
  hat_coords.push_back(kTime);
  ContextPtr hat = make_context(hat_coords, J.rank(), J.ctx()->labels);
  LieAlgebroid H = LieAlgebroid::zero(hat, J.base.sections);
  for (int a = 0; a < J.rank(); ++a) {
    for (int i = 0; i < J.base.dim(); ++i) H.anchor[a][i] = J.base.anchor[a][i];
    H.anchor[a][J.base.dim()] = J.phi.component(a);
    for (int b = 0; b < J.rank(); ++b) H.structure[a * J.rank() + b] = J.base.bracket_basis(a, b).rehost(hat);
  }
  return H;
}

inline ContextPtr hat_context(const ContextPtr& ctx) {
  auto c = ctx->coords;
  c.push_back(kTime);
  return make_context(c, ctx->rank, ctx->labels);
}

/// (Â, 0): the Poissonization as a Jacobi algebroid with zero cocycle.
inline JacobiAlgebroid poissonization(const JacobiAlgebroid& J) {
  LieAlgebroid H = poissonize(J);
  Graded zero(H.ctx, H.forms(), 1);
  return JacobiAlgebroid{std::move(H), std::move(zero)};
}

/// e^{k t} g, moved onto the hat chart.
inline Graded hat_lift(const Graded& g, const ContextPtr& hat, int u_power = 0) {
  return g.rehost(hat).scaled(Poly::exp_t(u_power));
}

/// π̃ = e^{-t} π.
inline Graded poisson_bivector(const Graded& pi, const ContextPtr& hat) { return hat_lift(pi, hat, -1); }

// ---------------------------------------------------------------------------
// Generator families

/// {1, coordinates, basis elements of degree 1..max_degree and their coordinate multiples}.
inline std::vector<Graded> generator_family(const ContextPtr& ctx, Variance v, int max_degree, bool with_scalars = true) {
  std::vector<Graded> fam;
  if (with_scalars) {
    fam.push_back(Graded::scalar(ctx, v, Poly(1)));
    for (const auto& x : ctx->coords) fam.push_back(Graded::scalar(ctx, v, Poly::var(x)));
  }
  int top = std::min(max_degree, ctx->rank);
  for (int k = 1; k <= top; ++k)
    for (Mask m = 1; m < bit(ctx->rank); ++m) {
      if (popcount(m) != k) continue;
      fam.push_back(Graded::basis_mask(ctx, v, m));
      for (const auto& x : ctx->coords) fam.push_back(Graded::basis_mask(ctx, v, m, Poly::var(x)));
    }
  return fam;
}

// ---------------------------------------------------------------------------
// Morphisms

/// Ψ* d_B = d_A Ψ* on target coordinates and dual basis forms, and Ψ*φ_B = φ_A.
inline CheckReport jacobi_morphism_check(const BundleMap& psi, const JacobiAlgebroid& JA, const JacobiAlgebroid& JB) {
  psi.validate();
  if (!same_context(psi.source, JA.ctx()) || !same_context(psi.target, JB.ctx()))
    throw ContextError("jacobi_morphism_check: map does not join these algebroids");
  CheckReport rep;
  timed_check(rep, "chain", "Psi* d_B = d_A Psi* on coordinates and dual basis", [&]() -> std::string {
    for (std::size_t j = 0; j < psi.target->coords.size(); ++j) {
      Poly y = Poly::var(psi.target->coords[j]);
      Graded lhs = pullback(psi, d_function(JB.base, y));
      Graded rhs = d_function(JA.base, psi.base.pull(y));
      Graded res = lhs - rhs;
      if (!res.is_zero()) return psi.target->coords[j] + " " + witness_of(res);
    }
    for (int b = 0; b < JB.rank(); ++b) {
      Graded eb = JB.base.coform(b);
      Graded res = pullback(psi, differential(JB.base, eb)) - differential(JA.base, pullback(psi, eb));
      if (!res.is_zero()) return "e^" + std::to_string(b + 1) + " " + witness_of(res);
    }
    return {};
  });
  timed_check(rep, "cocycle", "Psi* phi_B = phi_A", [&] { return witness_of(pullback(psi, JB.phi) - JA.phi); });
  return rep;
}

/// Direct check of Ψ* d^{φ_B} = d^{φ_A} Ψ* on the target generator family.
inline CheckReport phi_chain_map_check(const BundleMap& psi, const JacobiAlgebroid& JA, const JacobiAlgebroid& JB,
                                       int gen_degree = 2) {
  CheckReport rep;
  timed_check(rep, "phi_chain", "Psi* d^phi_B = d^phi_A Psi* on generators", [&]() -> std::string {
    for (const auto& w : generator_family(JB.ctx(), JB.base.forms(), gen_degree)) {
      Graded res = pullback(psi, phi_differential(JB, w)) - phi_differential(JA, pullback(psi, w));
      if (!res.is_zero()) return w.str() + " " + witness_of(res);
    }
    return {};
  });
  return rep;
}

}  // namespace jqn
