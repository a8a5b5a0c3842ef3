#pragma once

// Quasi-Jacobi bialgebroids and Jacobi quasi-Nijenhuis structures.
//
// A quasi-Jacobi bialgebroid is stored as finite data: the host Jacobi
// algebroid (A, φ), a pre-algebroid on the dual (anchor and structure
// functions, no Jacobi identity required), the section W = d̃_*1 and the
// degree-3 section X. The W-quasi differential is d̃_* P = d_* P + W ∧ P where
// d_* is the formal Cartan differential of the dual data.

#include <jqn/algebroid.hpp>

namespace jqn {

struct QuasiJacobiBialgebroid {
  JacobiAlgebroid host;
  LieAlgebroid dual;  // sections are forms of host
  Graded W;           // degree-1 section of host
  Graded X;           // degree-3 section of host

  const ContextPtr& ctx() const { return host.ctx(); }
  int rank() const { return host.rank(); }
  Variance sections() const { return host.base.sections; }

  void validate() const {
    host.validate();
    dual.validate();
    if (!same_context(dual.ctx, host.ctx())) throw ContextError("quasi dual lives on another context");
    if (dual.sections != host.base.forms()) throw ContextError("quasi dual sections must be forms of the host");
    if (W.degree() != 1 || W.variance() != sections() || !same_context(W.context(), ctx()))
      throw ContextError("W must be a degree-1 section of the host");
    if (X.degree() != 3 || X.variance() != sections() || !same_context(X.context(), ctx()))
      throw ContextError("X must be a degree-3 section of the host");
  }
};

/// Trivial quasi structure: abelian dual with zero anchor, W = 0, X = 0.
inline QuasiJacobiBialgebroid trivial_qjb(const JacobiAlgebroid& J) {
  return QuasiJacobiBialgebroid{J, LieAlgebroid::zero(J.ctx(), J.base.forms()), Graded(J.ctx(), J.base.sections, 1),
                                Graded(J.ctx(), J.base.sections, 3)};
}

/// d̃_* P = d_* P + W ∧ P.
inline Graded apply_quasi_differential(const QuasiJacobiBialgebroid& Q, const Graded& P) {
  if (!same_context(P.context(), Q.ctx()) || P.variance() != Q.sections())
    throw ContextError("quasi differential: element is not a section of the host");
  return differential(Q.dual, P) + wedge(Q.W, P);
}

/// The quasi-Lie derivative i_α ∘ d̃_* + d̃_* ∘ i_α.
inline Graded quasi_lie_derivative(const QuasiJacobiBialgebroid& Q, const Graded& alpha, const Graded& P) {
  Graded r = interior(alpha, apply_quasi_differential(Q, P));
  if (P.degree() >= 1) r += apply_quasi_differential(Q, interior(alpha, P));
  return r;
}

/// Dual anchor and brackets recovered from the operator d_* alone:
/// ρ_*(α)(f) = α(d_* f), [α,β](X) = ρ_*(α)β(X) - ρ_*(β)α(X) - d_*X(α,β).
inline LieAlgebroid reconstruct_dual(const QuasiJacobiBialgebroid& Q) {
  auto dstar = [&](const Graded& P) { return apply_quasi_differential(Q, P) - wedge(Q.W, P); };
  const ContextPtr& ctx = Q.ctx();
  LieAlgebroid D = LieAlgebroid::zero(ctx, Q.dual.sections);
  for (int i = 0; i < D.dim(); ++i) {
    Graded df = dstar(Graded::scalar(ctx, Q.sections(), Poly::var(ctx->coords[i])));
    for (int a = 0; a < D.rank(); ++a) D.anchor[a][i] = pair(D.section(a), df);
  }
  for (int a = 0; a < D.rank(); ++a)
    for (int b = 0; b < D.rank(); ++b) {
      Graded br(ctx, D.sections, 1);
      for (int c = 0; c < D.rank(); ++c) {
        Graded ec = Graded::basis(ctx, Q.sections(), c);
        br.add(bit(c), -evaluate(dstar(ec), {D.section(a), D.section(b)}));
      }
      D.structure[a * D.rank() + b] = br;
    }
  return D;
}

inline bool is_scaled(const Graded& g) {
  return std::any_of(g.terms().begin(), g.terms().end(), [](const auto& t) { return !t.second.is_constant(); });
}

/// Def-level axioms on the generator family: host is a Jacobi algebroid,
/// d̃_* is a derivation of [.,.]^φ, d̃_* X = 0 and d̃_*² = [X, -]^φ.
inline CheckReport verify_quasi_jacobi_bialgebroid(const QuasiJacobiBialgebroid& Q, int gen_degree = 2) {
  Q.validate();
  CheckReport rep;
  rep.merge(verify_jacobi_algebroid(Q.host), "host");
  auto fam = generator_family(Q.ctx(), Q.sections(), gen_degree);
  timed_check(rep, "unit", "d~_* 1 = W", [&] {
    return witness_of(apply_quasi_differential(Q, Graded::scalar(Q.ctx(), Q.sections(), Poly(1))) - Q.W);
  });
  timed_check(rep, "derivation", "d~_* is a derivation of the Schouten-Jacobi bracket", [&]() -> std::string {
    for (const auto& P : fam)
      for (const auto& R : fam) {
        if (is_scaled(P) && is_scaled(R)) continue;
        if (P.degree() + R.degree() - 1 < 0) continue;
        Graded lhs = apply_quasi_differential(Q, schouten_jacobi(Q.host, P, R));
        Graded rhs = schouten_jacobi(Q.host, apply_quasi_differential(Q, P), R);
        Graded t = schouten_jacobi(Q.host, P, apply_quasi_differential(Q, R));
        rhs += (P.degree() + 1) % 2 ? -t : t;
        Graded res = lhs - rhs;
        if (!res.is_zero()) return "(" + P.str() + ", " + R.str() + ") " + witness_of(res);
      }
    return {};
  });
  timed_check(rep, "closed", "d~_* X = 0", [&] { return witness_of(apply_quasi_differential(Q, Q.X)); });
  timed_check(rep, "square", "d~_*^2 = [X, -]^phi", [&]() -> std::string {
    for (const auto& P : fam) {
      Graded res = apply_quasi_differential(Q, apply_quasi_differential(Q, P)) - schouten_jacobi(Q.host, Q.X, P);
      if (!res.is_zero()) return P.str() + " " + witness_of(res);
    }
    return {};
  });
  return rep;
}

// ---------------------------------------------------------------------------
// Jacobi quasi-Nijenhuis structures

struct JqnStructure {
  JacobiAlgebroid J;
  Graded pi;             // bivector
  EndomorphismField N;
  Graded phi3;           // 3-form
};

/// Trivector (π♯)ψ with components ψ(π♯ε^a, π♯ε^b, π♯ε^c).
inline Graded sharp3(const Graded& pi, const Graded& psi) {
  const auto& ctx = pi.context();
  Variance fv = opposite(pi.variance());
  Graded r = pi.zero_like(3);
  int n = pi.rank();
  std::vector<Graded> s;
  for (int a = 0; a < n; ++a) s.push_back(sharp(pi, Graded::basis(ctx, fv, a)));
  for (Mask m = 1; m < bit(n); ++m) {
    if (popcount(m) != 3) continue;
    auto idx = mask_indices(m);
    r.add(m, evaluate(psi, {s[idx[0]], s[idx[1]], s[idx[2]]}));
  }
  return r;
}

/// (N*ψ)(X, Y, Z) = ψ(NX, NY, NZ).
inline Graded pull_form(const EndomorphismField& N, const Graded& w) { return pullback(BundleMap::from_endomorphism(N), w); }

inline CheckReport verify_jqn(const JqnStructure& T) {
  const JacobiAlgebroid& J = T.J;
  CheckReport rep;
  rep.merge(is_jacobi_bivector(J, T.pi));
  if (!rep.passed()) {
    rep.add("compat", "N pi# = pi# N*", false, "skipped: bivector is not Jacobi");
    rep.add("concomitant", "Magri-Morosi concomitant C(pi,N) = 0", false, "skipped: bivector is not Jacobi");
  } else {
    rep.merge(compat_and_concomitant(J, T.pi, T.N));
  }
  timed_check(rep, "closed", "d^phi phi3 = 0", [&] { return witness_of(phi_differential(J, T.phi3)); });
  // The pair contraction here is φ3(X, Y, -) = i_Y i_X φ3; the opposite sign
  // is incompatible with d~_*^2 = [φ3, -] for the assembled bialgebroid.
  timed_check(rep, "torsion", "T_N(X,Y) = pi#(phi3(X,Y,-))", [&]() -> std::string {
    for (int a = 0; a < J.rank(); ++a)
      for (int b = a + 1; b < J.rank(); ++b) {
        Graded ea = J.base.section(a), eb = J.base.section(b);
        Graded res = torsion_value(J.base, T.N, ea, eb) - sharp(T.pi, interior(wedge(ea, eb), T.phi3));
        if (!res.is_zero()) return "(e" + std::to_string(a + 1) + ",e" + std::to_string(b + 1) + ") " + witness_of(res);
      }
    return {};
  });
  timed_check(rep, "closed_iN", "d^phi(i_N phi3) = 0", [&] { return witness_of(phi_differential(J, i_N(T.N, T.phi3))); });
  return rep;
}

class RejectedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (A*_π, W = -π♯φ, d_N^{N*φ}, φ3) without verifying the input.
inline QuasiJacobiBialgebroid assemble_qjb_from_jqn(const JqnStructure& T) {
  const JacobiAlgebroid& J = T.J;
  JacobiAlgebroid host{dual_structure(J, T.pi, false), -sharp(T.pi, J.phi)};
  return QuasiJacobiBialgebroid{host, deform(J.base, T.N), apply_dual(T.N, J.phi), T.phi3};
}

inline QuasiJacobiBialgebroid build_qjb_from_jqn(const JqnStructure& T) {
  auto rep = verify_jqn(T);
  if (!rep.passed()) throw RejectedInput("input is not a Jacobi quasi-Nijenhuis structure: " + rep.first_failure());
  return assemble_qjb_from_jqn(T);
}

/// (TM × R, (0,1)): coordinates ∂_i followed by the unit e0, abelian, φ = ε0.
inline JacobiAlgebroid tangent_jacobi_algebroid(const std::vector<std::string>& coords) {
  int n = static_cast<int>(coords.size());
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back("e" + std::to_string(i + 1));
  labels.push_back("e0");
  ContextPtr ctx = make_context(coords, n + 1, labels);
  LieAlgebroid A = LieAlgebroid::zero(ctx);
  for (int i = 0; i < n; ++i) A.anchor[i][i] = Poly(1);
  return with_cocycle(A, A.coform(n));
}

struct JqnManifoldData {
  std::vector<std::string> coords;
  Graded Lambda;                        // bivector, e0-free, on the TM × R context
  Graded E;                             // vector field
  std::vector<std::vector<Poly>> N;     // n × n
  Graded Y;                             // vector field
  Graded gamma;                         // 1-form, ε0-free
  Poly g;
  Graded omega;                         // 2-form, ε0-free
};

/// π = Λ + e0 ∧ E, 𝒩(X,f) = (NX + fY, i_Xγ + fg), φ3 = dω + ε0 ∧ ω.
inline JqnStructure build_jqn_manifold(const JqnManifoldData& D) {
  JacobiAlgebroid J = tangent_jacobi_algebroid(D.coords);
  const ContextPtr& ctx = J.ctx();
  int n = static_cast<int>(D.coords.size());
  auto on_ctx = [&](const Graded& g, Variance v, int deg, const char* what) {
    if (g.degree() != deg || g.variance() != v) throw ContextError(std::string("jqn manifold: bad ") + what);
    if (g.rank() != n + 1) throw ContextError(std::string("jqn manifold: dimension mismatch in ") + what);
    Graded r = g.rehost(ctx);
    for (const auto& [m, c] : r.terms())
      if (m & bit(n)) throw ContextError(std::string("jqn manifold: ") + what + " must not involve the unit direction");
    return r;
  };
  Graded Lambda = on_ctx(D.Lambda, Variance::multivector, 2, "Lambda");
  Graded E = on_ctx(D.E, Variance::multivector, 1, "E");
  Graded Y = on_ctx(D.Y, Variance::multivector, 1, "Y");
  Graded gamma = on_ctx(D.gamma, Variance::form, 1, "gamma");
  Graded omega = on_ctx(D.omega, Variance::form, 2, "omega");
  if (static_cast<int>(D.N.size()) != n) throw ContextError("jqn manifold: N has wrong size");
  for (const auto& row : D.N)
    if (static_cast<int>(row.size()) != n) throw ContextError("jqn manifold: N has wrong size");

  Graded e0 = J.base.section(n);
  Graded pi = Lambda + wedge(e0, E);
  EndomorphismField NN = EndomorphismField::zero(ctx);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) NN.m[j][i] = D.N[j][i];
    NN.m[n][i] = gamma.component(i);
    NN.m[i][n] = Y.component(i);
  }
  NN.m[n][n] = D.g;
  Graded phi3 = differential(J.base, omega) + wedge(J.phi, omega);
  return JqnStructure{J, pi, NN, phi3};
}

// ---------------------------------------------------------------------------
// Morphisms

/// Conditions 1-5 for a quasi-Jacobi bialgebroid morphism Ψ between hosts.
inline CheckReport verify_qjb_morphism(const BundleMap& psi, const QuasiJacobiBialgebroid& QA,
                                       const QuasiJacobiBialgebroid& QB) {
  QA.validate();
  QB.validate();
  CheckReport rep;
  rep.merge(jacobi_morphism_check(psi, QA.host, QB.host), "1");
  timed_check(rep, "2.dual_bracket", "[Psi* a, Psi* b]_A* = Psi* [a,b]_B*", [&]() -> std::string {
    for (int a = 0; a < QB.rank(); ++a)
      for (int b = a + 1; b < QB.rank(); ++b) {
        Graded al = QB.dual.section(a), be = QB.dual.section(b);
        Graded res = bracket(QA.dual, pullback(psi, al), pullback(psi, be)) - pullback(psi, bracket(QB.dual, al, be));
        if (!res.is_zero()) return "(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ") " + witness_of(res);
      }
    return {};
  });
  timed_check(rep, "3.dual_anchor", "T psi o rho_A*(Psi* a) = rho_B*(a) o psi", [&]() -> std::string {
    const auto& tc = psi.target->coords;
    for (int a = 0; a < QB.rank(); ++a) {
      Graded al = QB.dual.section(a);
      Graded pa = pullback(psi, al);
      auto rhs = anchor_vector(QB.dual, al);
      for (std::size_t j = 0; j < tc.size(); ++j) {
        Poly lhs = anchor_apply(QA.dual, pa, psi.base.components[j]);
        Poly res = lhs - psi.base.pull(rhs[j]);
        if (!res.is_zero()) return std::to_string(a + 1) + " d/d" + tc[j] + ": " + res.str();
      }
    }
    return {};
  });
  auto along = [&](const Graded& g) { return g.map_coeffs([&](const Poly& c) { return psi.base.pull(c); }); };
  timed_check(rep, "4.X", "Psi X_A = X_B o psi", [&] { return witness_of(pushforward(psi, QA.X) - along(QB.X)); });
  timed_check(rep, "5.W", "Psi W_A = W_B o psi", [&] { return witness_of(pushforward(psi, QA.W) - along(QB.W)); });
  return rep;
}

struct TwistedPair {
  QuasiJacobiBialgebroid twisted;   // over A*^ψ_{Nπ}
  QuasiJacobiBialgebroid untwisted; // over A*_π
  BundleMap nstar;                  // N*: A*^ψ_{Nπ} → A*_π
  Graded npi;                       // Nπ
};

/// Host A*^ψ_{Nπ} and dual (A, [.,.]', ρ) of the twisted construction, input unchecked.
inline TwistedPair assemble_twisted_pair(const JacobiAlgebroid& J, const Graded& pi, const EndomorphismField& N,
                                         const Graded& psi) {
  const LieAlgebroid& A = J.base;
  Graded npi = compose_bivector(N, pi);
  LieAlgebroid host = LieAlgebroid::zero(A.ctx, A.forms());
  for (int a = 0; a < A.rank(); ++a) {
    host.anchor[a] = anchor_vector(A, sharp(npi, A.coform(a)));
    for (int b = 0; b < A.rank(); ++b) {
      Graded al = A.coform(a), be = A.coform(b);
      host.structure[a * A.rank() + b] =
          dual_bracket(J, npi, al, be) + interior(wedge(sharp(npi, al), sharp(npi, be)), psi);
    }
  }
  LieAlgebroid prime = LieAlgebroid::zero(A.ctx, A.sections);
  prime.anchor = A.anchor;
  for (int a = 0; a < A.rank(); ++a)
    for (int b = 0; b < A.rank(); ++b) {
      Graded ea = A.section(a), eb = A.section(b);
      prime.structure[a * A.rank() + b] = A.bracket_basis(a, b) - sharp(npi, interior(wedge(ea, eb), psi));
    }
  QuasiJacobiBialgebroid twisted{JacobiAlgebroid{host, -sharp(npi, J.phi)}, prime, J.phi, psi};
  QuasiJacobiBialgebroid untwisted = assemble_qjb_from_jqn(JqnStructure{J, pi, N, pull_form(N, psi)});
  BundleMap nstar = BundleMap::identity(A.ctx);
  nstar.fiber = N.transpose().m;
  return TwistedPair{twisted, untwisted, nstar, npi};
}

inline TwistedPair build_twisted_pair(const JacobiAlgebroid& J, const Graded& pi, const EndomorphismField& N,
                                      const Graded& psi) {
  if (!phi_differential(J, psi).is_zero()) throw RejectedInput("twist: psi is not d^phi-closed");
  auto rep = verify_jqn(JqnStructure{J, pi, N, pull_form(N, psi)});
  if (!rep.passed()) throw RejectedInput("twist: (J, pi, N, N*psi) is not Jacobi quasi-Nijenhuis: " + rep.first_failure());
  return assemble_twisted_pair(J, pi, N, psi);
}

/// [Nπ,Nπ]^φ against 2 (Nπ)♯ψ.
inline CheckReport check_twisted_bivector(const JacobiAlgebroid& J, const Graded& npi, const Graded& psi) {
  CheckReport rep;
  timed_check(rep, "twisted_jacobi", "[N pi, N pi]^phi = 2 (N pi)# psi", [&] {
    return witness_of(schouten_jacobi(J, npi, npi) - sharp3(npi, psi).scaled(Poly(2)));
  });
  return rep;
}

/// <T_{N*}(α,β), X> = φ3(π♯α, π♯β, X) and the intermediate <α, T_N(X, π♯β)>.
inline CheckReport check_tnstar_lemma(const JqnStructure& T) {
  const JacobiAlgebroid& J = T.J;
  LieAlgebroid D = dual_structure(J, T.pi);
  EndomorphismField nstar = T.N.transpose();
  CheckReport rep;
  int r = J.rank();
  std::vector<Graded> tn;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) tn.push_back(torsion_value(D, nstar, D.section(a), D.section(b)));
  timed_check(rep, "lemma", "<T_N*(a,b),X> = phi3(pi# a, pi# b, X)", [&]() -> std::string {
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b)
        for (int c = 0; c < r; ++c) {
          Graded x = J.base.section(c);
          Poly lhs = pair(tn[a * r + b], x);
          Poly rhs = evaluate(T.phi3, {sharp(T.pi, D.section(a)), sharp(T.pi, D.section(b)), x});
          if (lhs != rhs)
            return "(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "," + std::to_string(c + 1) +
                   ") " + (lhs - rhs).str();
        }
    return {};
  });
  timed_check(rep, "intermediate", "<T_N*(a,b),X> = <a, T_N(X, pi# b)>", [&]() -> std::string {
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b)
        for (int c = 0; c < r; ++c) {
          Graded x = J.base.section(c);
          Poly lhs = pair(tn[a * r + b], x);
          Poly rhs = pair(D.section(a), torsion_value(J.base, T.N, x, sharp(T.pi, D.section(b))));
          if (lhs != rhs)
            return "(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "," + std::to_string(c + 1) +
                   ") " + (lhs - rhs).str();
        }
    return {};
  });
  return rep;
}

/// (Â, e^{-t}π, N, e^t φ3) as a structure with zero cocycle.
inline JqnStructure poissonize_jqn(const JqnStructure& T) {
  JacobiAlgebroid H = poissonization(T.J);
  EndomorphismField N = T.N;
  N.ctx = H.ctx();
  return JqnStructure{H, poisson_bivector(T.pi, H.ctx()), N, hat_lift(T.phi3, H.ctx(), 1)};
}

}  // namespace jqn
