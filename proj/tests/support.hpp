#pragma once

#include <jqn/quasi.hpp>

#include <optional>
#include <random>
#include <stdexcept>

namespace jqn::testing {

inline Poly X() { return Poly::var("x"); }
inline Poly Y() { return Poly::var("y"); }

/// Chart (x), basis e1, e0; ρ(e1) = ∂x; abelian; φ = ε0.
inline JacobiAlgebroid s1() {
  auto ctx = make_context({"x"}, 2, {"e1", "e0"});
  LieAlgebroid A = LieAlgebroid::zero(ctx);
  A.anchor[0][0] = Poly(1);
  return with_cocycle(A, A.coform(1));
}

/// Chart (x, y), basis e1 = ∂x, e2 = ∂y, e0; abelian; φ = ε0.
inline JacobiAlgebroid s2() {
  auto ctx = make_context({"x", "y"}, 3, {"e1", "e2", "e0"});
  LieAlgebroid A = LieAlgebroid::zero(ctx);
  A.anchor[0][0] = Poly(1);
  A.anchor[1][1] = Poly(1);
  return with_cocycle(A, A.coform(2));
}

/// e1 ↦ e0, e0 ↦ x e1.
inline EndomorphismField s3_endo(const ContextPtr& ctx) {
  EndomorphismField n = EndomorphismField::zero(ctx);
  n.m[1][0] = Poly(1);
  n.m[0][1] = X();
  return n;
}

inline Graded mv(const ContextPtr& ctx, std::initializer_list<int> idx, const Poly& c = Poly(1)) {
  Mask m = 0;
  for (int i : idx) m |= bit(i);
  return Graded::basis_mask(ctx, Variance::multivector, m, c);
}
inline Graded fm(const ContextPtr& ctx, std::initializer_list<int> idx, const Poly& c = Poly(1)) {
  Mask m = 0;
  for (int i : idx) m |= bit(i);
  return Graded::basis_mask(ctx, Variance::form, m, c);
}

inline EndomorphismField matrix(const ContextPtr& ctx, const std::vector<std::vector<Poly>>& rows) {
  EndomorphismField n{ctx, rows};
  n.validate();
  return n;
}

/// S2 with π = 0, N = Id, φ3 = ε1∧ε2∧ε0.
inline JqnStructure jqn_s2() {
  auto J = s2();
  auto c = J.ctx();
  return JqnStructure{J, Graded(c, Variance::multivector, 2), EndomorphismField::identity(c), fm(c, {0, 1, 2})};
}

/// Jacobi-Nijenhuis: TR²×R, π = x e1∧e0, N = 3 Id, φ3 = 0.
inline JqnStructure jqn_jn() {
  JacobiAlgebroid J = tangent_jacobi_algebroid({"x", "y"});
  auto c = J.ctx();
  return JqnStructure{J, mv(c, {0, 2}, X()), EndomorphismField::identity(c).scaled(Poly(3)),
                      Graded(c, Variance::form, 3)};
}

/// TR²×R with π = x e1∧e0, N = π♯∘ω♭ for ω = -ε1∧ε0 - ε2∧ε0, φ3 = ε1∧ε2∧ε0; T_N ≠ 0.
inline JqnStructure jqn_r2() {
  JacobiAlgebroid J = tangent_jacobi_algebroid({"x", "y"});
  auto c = J.ctx();
  auto N = matrix(c, {{X(), X(), Poly()}, {Poly(), Poly(), Poly()}, {Poly(), Poly(), X()}});
  return JqnStructure{J, mv(c, {0, 2}, X()), N, fm(c, {0, 1, 2})};
}

/// heis ⊕ R over a point, φ = 0; T_N ≠ 0.
inline JqnStructure jqn_heis() {
  auto c = make_context({}, 4);
  LieAlgebroid A = LieAlgebroid::zero(c);
  A.set_bracket(0, 1, A.section(2));
  auto N = matrix(c, {{1, 1, 0, -1}, {0, 0, 0, 0}, {0, 0, 1, 1}, {0, 0, 0, 0}});
  return JqnStructure{JacobiAlgebroid{A, Graded(c, Variance::form, 1)}, mv(c, {0, 2}), N, fm(c, {0, 1, 3}, Poly(-1))};
}

/// heis ⊕ R over a point, φ = ε4; T_N ≠ 0.
inline JqnStructure jqn_heis_phi() {
  auto c = make_context({}, 4);
  LieAlgebroid A = LieAlgebroid::zero(c);
  A.set_bracket(0, 1, A.section(2));
  auto N = matrix(c, {{1, 1, 1, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 1, 0, 1}});
  return JqnStructure{with_cocycle(A, A.coform(3)), mv(c, {0, 3}), N, fm(c, {1, 2, 3}, Poly(-1))};
}

/// sl2 acting on R² by linear vector fields, cocycle d(xy).
inline JacobiAlgebroid sl2_action() {
  auto ctx = make_context({"x", "y"}, 3, {"h", "e", "f"});
  LieAlgebroid A = LieAlgebroid::zero(ctx);
  A.anchor[0] = {-X(), Y()};
  A.anchor[1] = {-Y(), Poly()};
  A.anchor[2] = {Poly(), -X()};
  A.set_bracket(0, 1, A.section(1, Poly(2)));
  A.set_bracket(0, 2, A.section(2, Poly(-2)));
  A.set_bracket(1, 2, A.section(0));
  return with_cocycle(A, d_function(A, X() * Y()));
}

/// Heisenberg algebra over a zero-anchor chart, cocycle ε¹ (closed since [.,.] lands in e3).
inline JacobiAlgebroid heisenberg() {
  auto ctx = make_context({"x"}, 3);
  LieAlgebroid A = LieAlgebroid::zero(ctx);
  A.set_bracket(0, 1, A.section(2));
  return with_cocycle(A, A.coform(0));
}

/// Contact-type structure on R³ × R.
inline JacobiAlgebroid r3_tangent() {
  auto ctx = make_context({"x", "y", "z"}, 4, {"e1", "e2", "e3", "e0"});
  LieAlgebroid A = LieAlgebroid::zero(ctx);
  for (int i = 0; i < 3; ++i) A.anchor[i][i] = Poly(1);
  return with_cocycle(A, A.coform(3));
}

inline JqnManifoldData trivial_manifold(const std::vector<std::string>& coords) {
  JacobiAlgebroid J = tangent_jacobi_algebroid(coords);
  auto c = J.ctx();
  int n = static_cast<int>(coords.size());
  JqnManifoldData D{coords,
                    Graded(c, Variance::multivector, 2),
                    Graded(c, Variance::multivector, 1),
                    std::vector<std::vector<Poly>>(n, std::vector<Poly>(n)),
                    Graded(c, Variance::multivector, 1),
                    Graded(c, Variance::form, 1),
                    Poly(1),
                    Graded(c, Variance::form, 2)};
  for (int i = 0; i < n; ++i) D.N[i][i] = Poly(1);
  return D;
}

/// The TR²×R quasi fixture written as manifold data.
inline JqnManifoldData r2_manifold() {
  JqnManifoldData D = trivial_manifold({"x", "y"});
  auto c = tangent_jacobi_algebroid({"x", "y"}).ctx();
  D.E = mv(c, {0}, -X());
  D.N = {{X(), X()}, {Poly(), Poly()}};
  D.g = X();
  D.omega = fm(c, {0, 1});
  return D;
}

inline std::vector<JqnStructure> jqn_fixtures() { return {jqn_s2(), jqn_jn(), jqn_r2(), jqn_heis(), jqn_heis_phi()}; }

/// Twisted pair of (π, M = N + Id, ψ) with M*ψ = φ3, for constant N; empty when d^φψ ≠ 0.
inline std::optional<std::pair<TwistedPair, Graded>> shifted_twisted_pair(const JqnStructure& T) {
  EndomorphismField M = T.N;
  for (int a = 0; a < M.rank(); ++a) M.m[a][a] += Poly(1);
  // invert the constant matrix by Gauss-Jordan over Q
  int r = M.rank();
  std::vector<std::vector<Rat>> a(r, std::vector<Rat>(2 * r));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) a[i][j] = M.m[i][j].constant_value();
    a[i][r + i] = 1;
  }
  for (int col = 0; col < r; ++col) {
    int piv = col;
    while (a[piv][col] == 0) ++piv;
    std::swap(a[piv], a[col]);
    Rat inv = 1 / a[col][col];
    for (auto& v : a[col]) v *= inv;
    for (int i = 0; i < r; ++i)
      if (i != col && a[i][col] != 0) {
        Rat f = a[i][col];
        for (int j = 0; j < 2 * r; ++j) a[i][j] -= f * a[col][j];
      }
  }
  EndomorphismField Minv = EndomorphismField::zero(T.J.ctx());
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) Minv.m[i][j] = Poly(a[i][r + j]);
  Graded psi = pull_form(Minv, T.phi3);
  if (pull_form(M, psi) != T.phi3) throw std::logic_error("shifted_twisted_pair: inverse is wrong");
  if (!phi_differential(T.J, psi).is_zero()) return std::nullopt;
  return std::make_pair(build_twisted_pair(T.J, T.pi, M, psi), psi);
}

struct Rng {
  std::mt19937 gen;
  explicit Rng(unsigned seed) : gen(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }

  Poly poly(const std::vector<std::string>& vars, int max_deg = 2, int max_terms = 3, bool with_u = false) {
    Poly p;
    int n = uniform(0, max_terms);
    for (int k = 0; k < n; ++k) {
      Poly t(Rat(uniform(-4, 4), uniform(1, 3)));
      for (const auto& v : vars) t *= pow(Poly::var(v), static_cast<unsigned>(uniform(0, max_deg)));
      if (with_u) t *= Poly::exp_t(uniform(-1, 1));
      p += t;
    }
    return p;
  }

  Graded graded(const ContextPtr& ctx, Variance v, int deg, int max_terms = 3) {
    Graded g(ctx, v, deg);
    if (deg > ctx->rank) return g;
    int n = uniform(1, max_terms);
    for (int k = 0; k < n; ++k) {
      Mask m = 0;
      while (popcount(m) < deg) m |= bit(uniform(0, ctx->rank - 1));
      g.add(m, poly(ctx->coords, 1, 2));
    }
    return g;
  }
};

}  // namespace jqn::testing
