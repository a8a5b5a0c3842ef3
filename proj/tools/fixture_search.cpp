// Searches for Jacobi quasi-Nijenhuis structures with nonzero torsion using
// the ansatz N = π♯∘ω♭ for a constant 2-form ω, φ3 = λ d^φ(i_N ω).

#include <jqn/quasi.hpp>

#include <cstdlib>
#include <iostream>

using namespace jqn;

namespace {

struct Candidate {
  std::string name;
  JacobiAlgebroid J;
  std::vector<Graded> bivectors;
};

LieAlgebroid constant_algebra(const ContextPtr& ctx, const std::vector<std::tuple<int, int, int, int>>& br) {
  LieAlgebroid A = LieAlgebroid::zero(ctx);
  for (auto [a, b, c, k] : br) A.set_bracket(a, b, A.bracket_basis(a, b) + A.section(c, Poly(k)));
  return A;
}

std::vector<Graded> small_bivectors(const ContextPtr& ctx, const std::vector<Poly>& coeffs) {
  std::vector<Graded> out;
  int r = ctx->rank;
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b)
      for (const auto& c : coeffs) out.push_back(Graded::basis_mask(ctx, Variance::multivector, bit(a) | bit(b), c));
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b)
      for (int c = 0; c < r; ++c)
        for (int d = c + 1; d < r; ++d) {
          if ((bit(a) | bit(b)) >= (bit(c) | bit(d))) continue;
          out.push_back(Graded::basis_mask(ctx, Variance::multivector, bit(a) | bit(b)) +
                        Graded::basis_mask(ctx, Variance::multivector, bit(c) | bit(d)));
        }
  return out;
}

EndomorphismField sharp_flat(const Graded& pi, const Graded& omega) {
  const auto& ctx = pi.context();
  EndomorphismField N = EndomorphismField::zero(ctx);
  for (int a = 0; a < ctx->rank; ++a) {
    Graded img = sharp(pi, interior(Graded::basis(ctx, Variance::multivector, a), omega));
    for (int b = 0; b < ctx->rank; ++b) N.m[b][a] = img.component(b);
  }
  return N;
}

std::string matrix_str(const EndomorphismField& N) {
  std::string s;
  for (const auto& row : N.m) {
    s += "[";
    for (const auto& e : row) s += e.str() + " ";
    s += "]";
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  int limit = argc > 1 ? std::atoi(argv[1]) : 10;
  std::vector<Candidate> cands;
  {
    auto ctx = make_context({}, 3);
    for (auto& [name, br] : std::vector<std::pair<std::string, std::vector<std::tuple<int, int, int, int>>>>{
             {"heisenberg", {{0, 1, 2, 1}}},
             {"so3", {{0, 1, 2, 1}, {1, 2, 0, 1}, {2, 0, 1, 1}}},
             {"r3", {{0, 1, 1, 1}, {0, 2, 2, 1}}}}) {
      LieAlgebroid A = constant_algebra(ctx, br);
      cands.push_back({name + "/0", JacobiAlgebroid{A, Graded(ctx, Variance::form, 1)}, small_bivectors(ctx, {Poly(1)})});
    }
  }
  {
    auto ctx = make_context({}, 4);
    LieAlgebroid A = constant_algebra(ctx, {{0, 1, 2, 1}});
    cands.push_back({"heis+r/0", JacobiAlgebroid{A, Graded(ctx, Variance::form, 1)}, small_bivectors(ctx, {Poly(1)})});
    cands.push_back({"heis+r/e4", JacobiAlgebroid{A, A.coform(3)}, small_bivectors(ctx, {Poly(1)})});
  }
  {
    JacobiAlgebroid J = tangent_jacobi_algebroid({"x", "y"});
    cands.push_back({"TR2xR", J, small_bivectors(J.ctx(), {Poly(1), Poly::var("x"), Poly::var("y")})});
  }
  {
    JacobiAlgebroid J = tangent_jacobi_algebroid({"x", "y", "z"});
    JacobiAlgebroid P{J.base, Graded(J.ctx(), Variance::form, 1)};
    cands.push_back({"TR3xR/0", P, small_bivectors(J.ctx(), {Poly(1), Poly::var("x")})});
  }
  int found = 0;
  const char* only = std::getenv("JQN_SEARCH_ONLY");
  for (const auto& c : cands) {
    if (only && c.name != only) continue;
    const JacobiAlgebroid& J = c.J;
    auto ctx = J.ctx();
    int r = J.rank();
    std::vector<Mask> pairs;
    for (Mask m = 1; m < bit(r); ++m)
      if (popcount(m) == 2) pairs.push_back(m);
    std::size_t combos = 1;
    for (std::size_t i = 0; i < pairs.size(); ++i) combos *= 3;
    for (const auto& pi : c.bivectors) {
      if (!schouten_jacobi(J, pi, pi).is_zero()) continue;
      for (std::size_t code = 1; code < combos; ++code) {
        Graded omega(ctx, Variance::form, 2);
        std::size_t k = code;
        for (Mask m : pairs) {
          omega.add(m, Poly(static_cast<int>(k % 3) - 1));
          k /= 3;
        }
        EndomorphismField N = sharp_flat(pi, omega);
        auto tors = torsion(J.base, N);
        if (all_zero(tors)) continue;
        Graded base = phi_differential(J, i_N(N, omega));
        if (base.is_zero()) continue;
        for (Rat lambda : {Rat(1), Rat(-1), Rat(1, 2), Rat(-1, 2), Rat(2), Rat(-2), Rat(1, 4), Rat(-1, 4)}) {
          JqnStructure T{J, pi, N, base.scaled(Poly(lambda))};
          auto rep = verify_jqn(T);
          if (!rep.passed()) {
            if (std::getenv("JQN_SEARCH_DEBUG")) std::cerr << c.name << " " << rep.first_failure() << "\n";
            continue;
          }
          std::cout << c.name << " pi=" << pi.str() << " omega=" << omega.str() << " lambda=" << lambda.get_str()
                    << " N=" << matrix_str(N) << " phi3=" << T.phi3.str() << "\n";
          if (++found >= limit) break;
        }
      }
    }
  }
  std::cout << "found " << found << "\n";
  return 0;
}
