#pragma once

// Brute-force reference implementations used only by tests. They expand
// everything into wedges of degree-1 factors and use textbook formulas, so
// they share no recursion with the library code they check.

#include "support.hpp"

namespace jqn::oracle {

inline Poly anchor_on(const LieAlgebroid& A, const std::vector<Poly>& x, const Poly& f) {
  Poly out;
  for (int a = 0; a < A.rank(); ++a)
    for (int i = 0; i < A.dim(); ++i) out += x[a] * A.anchor[a][i] * partial(f, A.ctx->coords[i]);
  return out;
}

/// A degree-1 section as a coefficient vector.
using Vec = std::vector<Poly>;

inline Vec vec_bracket(const LieAlgebroid& A, const Vec& x, const Vec& y) {
  int r = A.rank();
  Vec out(r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      if (x[a].is_zero() || y[b].is_zero()) continue;
      const Graded& c = A.bracket_basis(a, b);
      for (int k = 0; k < r; ++k) out[k] += x[a] * y[b] * c.component(k);
    }
  for (int b = 0; b < r; ++b) out[b] += anchor_on(A, x, y[b]);
  for (int a = 0; a < r; ++a) out[a] -= anchor_on(A, y, x[a]);
  return out;
}

inline Graded to_graded(const LieAlgebroid& A, const Vec& v) { return Graded::vector(A.ctx, A.sections, v); }

inline Graded wedge_list(const LieAlgebroid& A, const std::vector<Vec>& fs, int skip1 = -1, int skip2 = -1) {
  Graded r = Graded::scalar(A.ctx, A.sections, Poly(1));
  for (int i = 0; i < static_cast<int>(fs.size()); ++i)
    if (i != skip1 && i != skip2) r = wedge(r, to_graded(A, fs[i]));
  return r;
}

struct Decomposable {
  Poly scalar;          // used when the list is empty
  std::vector<Vec> fs;  // X1 ∧ .. ∧ Xp, the coefficient folded into X1
};

inline std::vector<Decomposable> decompose(const LieAlgebroid& A, const Graded& P) {
  std::vector<Decomposable> out;
  for (const auto& [m, c] : P.terms()) {
    Decomposable d{c, {}};
    bool first = true;
    for (int a : mask_indices(m)) {
      Vec v(A.rank());
      v[a] = first ? c : Poly(1);
      first = false;
      d.fs.push_back(v);
    }
    out.push_back(d);
  }
  return out;
}

/// [X1..Xp, g] = Σ_i (-1)^{p-i} ρ(Xi)g X1..X̂i..Xp (1-based i).
inline Graded bracket_with_function(const LieAlgebroid& A, const Decomposable& d, const Poly& g) {
  int p = static_cast<int>(d.fs.size());
  Graded r(A.ctx, A.sections, std::max(p - 1, 0));
  for (int i = 0; i < p; ++i) {
    Graded t = wedge_list(A, d.fs, i).scaled(anchor_on(A, d.fs[i], g));
    r += ((p - 1 - i) % 2) ? -t : t;
  }
  return r;
}

/// Naive Schouten bracket.
inline Graded schouten(const LieAlgebroid& A, const Graded& P, const Graded& Q) {
  int p = P.degree(), q = Q.degree();
  Graded r(A.ctx, A.sections, std::max(p + q - 1, 0));
  if (p + q - 1 > A.rank()) return r;
  for (const auto& dp : decompose(A, P))
    for (const auto& dq : decompose(A, Q)) {
      if (p == 0 && q == 0) continue;
      if (q == 0) {
        r += bracket_with_function(A, dp, dq.scalar);
        continue;
      }
      if (p == 0) {
        Graded t = bracket_with_function(A, dq, dp.scalar);
        r += ((q - 1) % 2) ? t : -t;
        continue;
      }
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) {
          Graded b = to_graded(A, vec_bracket(A, dp.fs[i], dq.fs[j]));
          Graded t = wedge(wedge(b, wedge_list(A, dp.fs, i)), wedge_list(A, dq.fs, j));
          r += ((i + j) % 2) ? -t : t;
        }
    }
  return r;
}

/// Koszul formula for dω on basis sections, assembled back into a form.
inline Graded koszul_differential(const LieAlgebroid& A, const Graded& w) {
  int k = w.degree();
  Graded r(A.ctx, A.forms(), k + 1);
  if (k + 1 > A.rank()) return r;
  for (Mask m = 1; m < bit(A.rank()); ++m) {
    if (popcount(m) != k + 1) continue;
    auto idx = mask_indices(m);
    std::vector<Graded> xs;
    for (int a : idx) xs.push_back(A.section(a));
    Poly val;
    for (int i = 0; i <= k; ++i) {
      std::vector<Graded> rest;
      for (int j = 0; j <= k; ++j)
        if (j != i) rest.push_back(xs[j]);
      Vec xi(A.rank());
      xi[idx[i]] = Poly(1);
      Poly t = anchor_on(A, xi, evaluate(w, rest));
      val += (i % 2) ? -t : t;
    }
    for (int i = 0; i <= k; ++i)
      for (int j = i + 1; j <= k; ++j) {
        std::vector<Graded> args{A.bracket_basis(idx[i], idx[j])};
        for (int l = 0; l <= k; ++l)
          if (l != i && l != j) args.push_back(xs[l]);
        Poly t = evaluate(w, args);
        val += ((i + j) % 2) ? -t : t;
      }
    r.add(m, val);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Standard E¹(M) written out with plain calculus on coefficient vectors

struct E1Section {
  Vec X;    // vector field components
  Poly f;
  Vec al;   // 1-form components
  Poly g;
};

inline Poly apply_field(const std::vector<std::string>& cs, const Vec& X, const Poly& h) {
  Poly out;
  for (std::size_t i = 0; i < cs.size(); ++i) out += X[i] * partial(h, cs[i]);
  return out;
}

inline E1Section e1_bracket(const std::vector<std::string>& cs, const E1Section& s1, const E1Section& s2) {
  std::size_t n = cs.size();
  E1Section r{Vec(n), {}, Vec(n), {}};
  for (std::size_t j = 0; j < n; ++j) r.X[j] = apply_field(cs, s1.X, s2.X[j]) - apply_field(cs, s2.X, s1.X[j]);
  r.f = apply_field(cs, s1.X, s2.f) - apply_field(cs, s2.X, s1.f);
  for (std::size_t j = 0; j < n; ++j) {
    Poly lie = apply_field(cs, s1.X, s2.al[j]);
    for (std::size_t i = 0; i < n; ++i) lie += s2.al[i] * partial(s1.X[i], cs[j]);
    Poly idal;
    for (std::size_t i = 0; i < n; ++i) idal += s2.X[i] * (partial(s1.al[j], cs[i]) - partial(s1.al[i], cs[j]));
    r.al[j] = lie - idal + s1.f * s2.al[j] - s2.f * s1.al[j] + s2.g * partial(s1.f, cs[j]) + s2.f * partial(s1.g, cs[j]);
  }
  Poly i21;
  for (std::size_t i = 0; i < n; ++i) i21 += s2.X[i] * s1.al[i];
  r.g = apply_field(cs, s1.X, s2.g) - apply_field(cs, s2.X, s1.g) + i21 + s1.f * s2.g;
  return r;
}

inline Poly e1_pairing(const E1Section& s1, const E1Section& s2) {
  Poly v = s1.f * s2.g + s2.f * s1.g;
  for (std::size_t i = 0; i < s1.X.size(); ++i) v += s2.X[i] * s1.al[i] + s1.X[i] * s2.al[i];
  return v.scaled(Rat(1, 2));
}

/// Cofactor expansion along the first row.
inline Poly laplace_det(const std::vector<std::vector<Poly>>& M) {
  std::size_t n = M.size();
  if (n == 0) return Poly(1);
  Poly out;
  for (std::size_t j = 0; j < n; ++j) {
    if (M[0][j].is_zero()) continue;
    std::vector<std::vector<Poly>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Poly> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(M[i][k]);
      minor.push_back(row);
    }
    Poly t = M[0][j] * laplace_det(minor);
    out += j % 2 ? -t : t;
  }
  return out;
}

}  // namespace jqn::oracle
