#pragma once

// Sparse exterior algebra of a trivialized bundle over a polynomial chart.
//
// Sign ledger (every bracket and differential is written against it):
//  * basis k-tuples are strictly increasing and stored as bit masks;
//  * i_a for a of degree 1 is a left derivation: it acts from the left and
//    picks up (-1)^p when moving past a degree-p factor;
//  * i_{a1 ∧ ... ∧ aj} = i_{aj} ∘ ... ∘ i_{a1};
//  * evaluate(w; X1..Xk) = i_{X1 ∧ ... ∧ Xk} w, so <e^I, e_I> = 1.

#include <jqn/ring.hpp>

#include <bit>
#include <cassert>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace jqn {

class ContextError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Mask = std::uint32_t;
inline constexpr int kMaxRank = 31;

inline int popcount(Mask m) { return std::popcount(m); }
inline Mask bit(int i) { return Mask{1} << i; }

/// Number of set bits of m strictly below position i.
inline int bits_below(Mask m, int i) { return popcount(m & (bit(i) - 1)); }

inline std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  while (m) {
    int i = std::countr_zero(m);
    out.push_back(i);
    m &= m - 1;
  }
  return out;
}

/// Sign of e_I ∧ e_J relative to e_{I∪J} (0 when they overlap).
inline int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int inversions = 0;
  for (int j : mask_indices(b)) inversions += popcount(a & ~((bit(j) << 1) - 1));
  return inversions % 2 ? -1 : 1;
}

struct BundleContext {
  std::vector<std::string> coords;
  int rank = 0;
  std::vector<std::string> labels;

  BundleContext(std::vector<std::string> c, int r, std::vector<std::string> l = {})
      : coords(std::move(c)), rank(r), labels(std::move(l)) {
    if (rank < 1 || rank > kMaxRank) throw ContextError("bundle rank must be in [1, 31]");
    if (labels.empty())
      for (int i = 0; i < rank; ++i) labels.push_back("e" + std::to_string(i + 1));
    if (static_cast<int>(labels.size()) != rank) throw ContextError("label count differs from rank");
    auto sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ContextError("duplicate basis labels");
    auto cs = coords;
    std::sort(cs.begin(), cs.end());
    if (std::adjacent_find(cs.begin(), cs.end()) != cs.end()) throw ContextError("duplicate chart coordinates");
  }
  int dim() const { return static_cast<int>(coords.size()); }
  bool operator==(const BundleContext& o) const { return rank == o.rank && coords == o.coords; }
};

using ContextPtr = std::shared_ptr<const BundleContext>;

inline ContextPtr make_context(std::vector<std::string> coords, int rank, std::vector<std::string> labels = {}) {
  return std::make_shared<const BundleContext>(std::move(coords), rank, std::move(labels));
}

enum class Variance { multivector, form };

inline Variance opposite(Variance v) { return v == Variance::multivector ? Variance::form : Variance::multivector; }
inline const char* variance_name(Variance v) { return v == Variance::multivector ? "multivector" : "form"; }

inline bool same_context(const ContextPtr& a, const ContextPtr& b) { return a == b || (a && b && *a == *b); }

/// Homogeneous element of ∧^k A or ∧^k A*.
class Graded {
 public:
  using TermMap = std::map<Mask, Poly>;

  Graded(ContextPtr ctx, Variance var, int degree) : ctx_(std::move(ctx)), var_(var), degree_(degree) {
    if (!ctx_) throw ContextError("null bundle context");
    if (degree_ < 0) throw ContextError("negative degree");
  }

  static Graded scalar(ContextPtr ctx, Variance var, const Poly& f) {
    Graded g(std::move(ctx), var, 0);
    g.add(0, f);
    return g;
  }
  static Graded basis(ContextPtr ctx, Variance var, int index, const Poly& coeff = Poly(1)) {
    if (index < 0 || index >= ctx->rank) throw ContextError("basis index out of range");
    Graded g(std::move(ctx), var, 1);
    g.add(bit(index), coeff);
    return g;
  }
  static Graded basis_mask(ContextPtr ctx, Variance var, Mask m, const Poly& coeff = Poly(1)) {
    Graded g(std::move(ctx), var, popcount(m));
    g.add(m, coeff);
    return g;
  }
  /// Degree-1 element from a coefficient vector.
  static Graded vector(ContextPtr ctx, Variance var, const std::vector<Poly>& coeffs) {
    if (static_cast<int>(coeffs.size()) != ctx->rank) throw ContextError("coefficient vector length differs from rank");
    Graded g(ctx, var, 1);
    for (int a = 0; a < ctx->rank; ++a) g.add(bit(a), coeffs[a]);
    return g;
  }

  const ContextPtr& context() const { return ctx_; }
  Variance variance() const { return var_; }
  int degree() const { return degree_; }
  int rank() const { return ctx_->rank; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Poly coeff(Mask m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Poly() : it->second;
  }
  Poly component(int a) const { return coeff(bit(a)); }
  /// Degree-0 value.
  Poly value() const { return coeff(0); }
  std::vector<Poly> components() const {
    std::vector<Poly> out(rank());
    for (int a = 0; a < rank(); ++a) out[a] = component(a);
    return out;
  }

  void add(Mask m, const Poly& c) {
    if (popcount(m) != degree_) throw ContextError("basis tuple length differs from degree");
    if (c.is_zero()) return;
    if (degree_ > rank() || (m >> rank()) != 0) throw ContextError("index out of range for bundle rank");
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Graded& operator+=(const Graded& o) {
    check_compatible(o, "add");
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  Graded& operator-=(const Graded& o) {
    check_compatible(o, "subtract");
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
  }
  friend Graded operator+(Graded a, const Graded& b) { return a += b; }
  friend Graded operator-(Graded a, const Graded& b) { return a -= b; }
  Graded operator-() const { return scaled(Poly(-1)); }
  Graded scaled(const Poly& f) const {
    Graded r(ctx_, var_, degree_);
    if (f.is_zero()) return r;
    for (const auto& [m, c] : terms_) r.add(m, c * f);
    return r;
  }
  friend Graded operator*(const Poly& f, const Graded& g) { return g.scaled(f); }

  bool operator==(const Graded& o) const {
    return same_context(ctx_, o.ctx_) && var_ == o.var_ && degree_ == o.degree_ && terms_ == o.terms_;
  }
  bool operator!=(const Graded& o) const { return !(*this == o); }

  Graded map_coeffs(const std::function<Poly(const Poly&)>& fn) const {
    Graded r(ctx_, var_, degree_);
    for (const auto& [m, c] : terms_) r.add(m, fn(c));
    return r;
  }
  /// Same coefficients on another context of equal rank.
  Graded rehost(ContextPtr ctx) const {
    if (ctx->rank != rank()) throw ContextError("rehost needs equal ranks");
    Graded r(std::move(ctx), var_, degree_);
    r.terms_ = terms_;
    return r;
  }
  Graded with_variance(Variance v) const {
    Graded r(ctx_, v, degree_);
    r.terms_ = terms_;
    return r;
  }

  Graded zero_like(int degree) const { return Graded(ctx_, var_, degree); }

  void check_compatible(const Graded& o, const char* what) const {
    if (!same_context(ctx_, o.ctx_)) throw ContextError(std::string(what) + ": context mismatch");
    if (var_ != o.var_) throw ContextError(std::string(what) + ": variance mismatch");
    if (degree_ != o.degree_) throw ContextError(std::string(what) + ": degree mismatch");
  }

  /// First nonzero coefficient, for report witnesses.
  std::optional<std::pair<Mask, Poly>> first_term() const {
    if (terms_.empty()) return std::nullopt;
    return *terms_.begin();
  }

  std::string str() const;

 private:
  ContextPtr ctx_;
  Variance var_;
  int degree_;
  TermMap terms_;
};

inline std::string mask_str(Mask m) {
  std::string s = "(";
  bool first = true;
  for (int i : mask_indices(m)) {
    s += (first ? "" : ",") + std::to_string(i + 1);
    first = false;
  }
  return s + ")";
}

inline std::string Graded::str() const {
  std::string s = "{";
  bool first = true;
  for (const auto& [m, c] : terms_) {
    s += (first ? " " : ", ") + mask_str(m) + ": " + c.str();
    first = false;
  }
  return s + (first ? "}" : " }");
}

inline std::ostream& operator<<(std::ostream& os, const Graded& g) { return os << g.str(); }

inline Graded wedge(const Graded& p, const Graded& q) {
  if (!same_context(p.context(), q.context())) throw ContextError("wedge: context mismatch");
  if (p.variance() != q.variance()) throw ContextError("wedge: variance mismatch");
  Graded r(p.context(), p.variance(), p.degree() + q.degree());
  if (r.degree() > r.rank()) return r;
  for (const auto& [a, ca] : p.terms())
    for (const auto& [b, cb] : q.terms()) {
      int s = wedge_sign(a, b);
      if (s == 0) continue;
      Poly c = ca * cb;
      r.add(a | b, s > 0 ? c : -c);
    }
  return r;
}

/// i_{e^J} e_K for basis masks; returns the sign and the remaining mask, or
/// sign 0 when J is not contained in K.
inline std::pair<int, Mask> basis_contract(Mask j, Mask k) {
  if ((j & k) != j) return {0, 0};
  int sign = 1;
  for (int idx : mask_indices(j)) {
    if (bits_below(k, idx) % 2) sign = -sign;
    k &= ~bit(idx);
  }
  return {sign, k};
}

/// Interior product of `a` (opposite variance, degree j) into `p` (degree k).
inline Graded interior(const Graded& a, const Graded& p) {
  if (!same_context(a.context(), p.context())) throw ContextError("interior: context mismatch");
  if (a.variance() == p.variance()) throw ContextError("interior: operands must have opposite variance");
  if (a.degree() > p.degree()) throw ContextError("interior: degree underflow");
  Graded r(p.context(), p.variance(), p.degree() - a.degree());
  for (const auto& [j, cj] : a.terms())
    for (const auto& [k, ck] : p.terms()) {
      auto [s, rest] = basis_contract(j, k);
      if (s == 0) continue;
      Poly c = cj * ck;
      r.add(rest, s > 0 ? c : -c);
    }
  return r;
}

/// Interior product that returns zero instead of rejecting degree underflow.
inline Graded interior_or_zero(const Graded& a, const Graded& p) {
  if (a.degree() > p.degree()) return Graded(p.context(), p.variance(), 0);
  return interior(a, p);
}

/// Full pairing of equal-degree elements of opposite variance.
inline Poly pair(const Graded& a, const Graded& p) {
  if (a.degree() != p.degree()) throw ContextError("pair: degree mismatch");
  return interior(a, p).value();
}

/// ω(X1, ..., Xk) for degree-1 arguments.
inline Poly evaluate(const Graded& w, const std::vector<Graded>& args) {
  if (static_cast<int>(args.size()) != w.degree()) throw ContextError("evaluate: arity mismatch");
  Graded cur = w;
  for (const auto& x : args) {
    if (x.degree() != 1) throw ContextError("evaluate: arguments must have degree 1");
    cur = interior(x, cur);
  }
  return cur.value();
}

/// Wedge product of a list of degree-1 elements (unit scalar for an empty list).
inline Graded wedge_all(const ContextPtr& ctx, Variance v, const std::vector<Graded>& factors) {
  Graded r = Graded::scalar(ctx, v, Poly(1));
  for (const auto& f : factors) r = wedge(r, f);
  return r;
}

/// Rank × rank matrix of polynomials; column a holds the image of e_a.
struct EndomorphismField {
  ContextPtr ctx;
  std::vector<std::vector<Poly>> m;  // m[row][col]

  static EndomorphismField identity(ContextPtr ctx) {
    EndomorphismField n{ctx, std::vector<std::vector<Poly>>(ctx->rank, std::vector<Poly>(ctx->rank))};
    for (int a = 0; a < ctx->rank; ++a) n.m[a][a] = Poly(1);
    return n;
  }
  static EndomorphismField zero(ContextPtr ctx) {
    return EndomorphismField{ctx, std::vector<std::vector<Poly>>(ctx->rank, std::vector<Poly>(ctx->rank))};
  }
  int rank() const { return static_cast<int>(m.size()); }

  void validate() const {
    if (rank() != ctx->rank) throw ContextError("endomorphism: rank mismatch");
    for (const auto& row : m)
      if (static_cast<int>(row.size()) != ctx->rank) throw ContextError("endomorphism: matrix not square");
  }

  EndomorphismField transpose() const {
    EndomorphismField t = zero(ctx);
    for (int i = 0; i < rank(); ++i)
      for (int j = 0; j < rank(); ++j) t.m[i][j] = m[j][i];
    return t;
  }
  EndomorphismField scaled(const Poly& f) const {
    EndomorphismField t = *this;
    for (auto& row : t.m)
      for (auto& c : row) c = c * f;
    return t;
  }
  bool operator==(const EndomorphismField& o) const { return m == o.m; }
};

/// N applied to a degree-1 element by matrix action (e_a ↦ Σ_b m[b][a] e_b).
inline Graded apply(const EndomorphismField& n, const Graded& x) {
  if (x.degree() != 1) throw ContextError("endomorphism applies to degree-1 elements");
  if (n.rank() != x.rank()) throw ContextError("endomorphism: rank mismatch");
  Graded r = x.zero_like(1);
  for (const auto& [ma, c] : x.terms()) {
    int a = std::countr_zero(ma);
    for (int b = 0; b < n.rank(); ++b)
      if (!n.m[b][a].is_zero()) r.add(bit(b), c * n.m[b][a]);
  }
  return r;
}

/// Transpose action N* on degree-1 elements of the dual variance:
/// (N* α)(X) = α(N X).
inline Graded apply_dual(const EndomorphismField& n, const Graded& alpha) { return apply(n.transpose(), alpha); }

/// Degree-zero derivation i_N on forms: (i_N ω)(X1..Xk) = Σ_i ω(.., N Xi, ..).
inline Graded i_N(const EndomorphismField& n, const Graded& w) {
  if (n.rank() != w.rank()) throw ContextError("i_N: rank mismatch");
  Graded r = w.zero_like(w.degree());
  const auto& ctx = w.context();
  for (const auto& [k, c] : w.terms()) {
    auto idx = mask_indices(k);
    for (std::size_t s = 0; s < idx.size(); ++s) {
      Graded before = Graded::scalar(ctx, w.variance(), c);
      for (std::size_t q = 0; q < s; ++q) before = wedge(before, Graded::basis(ctx, w.variance(), idx[q]));
      Graded image = apply_dual(n, Graded::basis(ctx, w.variance(), idx[s]));
      Graded term = wedge(before, image);
      for (std::size_t q = s + 1; q < idx.size(); ++q) term = wedge(term, Graded::basis(ctx, w.variance(), idx[q]));
      r += term;
    }
  }
  return r;
}

/// Vector bundle map Ψ: A → B over ψ: M → N. fiber[b][a] is the e_b-component
/// of Ψ(e_a), a polynomial over the source chart.
struct BundleMap {
  ContextPtr source;
  ContextPtr target;
  PolyMap base;
  std::vector<std::vector<Poly>> fiber;

  static BundleMap identity(ContextPtr ctx) {
    BundleMap m{ctx, ctx, PolyMap::identity(ctx->coords), {}};
    m.fiber.assign(ctx->rank, std::vector<Poly>(ctx->rank));
    for (int a = 0; a < ctx->rank; ++a) m.fiber[a][a] = Poly(1);
    return m;
  }
  static BundleMap from_endomorphism(const EndomorphismField& n) {
    BundleMap m{n.ctx, n.ctx, PolyMap::identity(n.ctx->coords), n.m};
    return m;
  }

  void validate() const {
    base.validate();
    if (base.source != source->coords || base.target != target->coords)
      throw ContextError("bundle map: base map charts differ from bundle charts");
    if (static_cast<int>(fiber.size()) != target->rank) throw ContextError("bundle map: fiber rows differ from target rank");
    for (const auto& row : fiber)
      if (static_cast<int>(row.size()) != source->rank) throw ContextError("bundle map: fiber columns differ from source rank");
  }

  BundleMap compose_after(const BundleMap& first) const;  // this ∘ first
};

/// Ψ*ω: coefficients composed with ψ and each e^b replaced by Σ_a fiber[b][a] e^a.
inline Graded pullback(const BundleMap& psi, const Graded& w) {
  if (!same_context(w.context(), psi.target)) throw ContextError("pullback: form does not live on the map's target");
  Graded r(psi.source, w.variance(), w.degree());
  std::vector<Graded> images;
  for (int b = 0; b < psi.target->rank; ++b) {
    std::vector<Poly> coeffs(psi.source->rank);
    for (int a = 0; a < psi.source->rank; ++a) coeffs[a] = psi.fiber[b][a];
    images.push_back(Graded::vector(psi.source, w.variance(), coeffs));
  }
  for (const auto& [k, c] : w.terms()) {
    std::vector<Graded> factors;
    for (int b : mask_indices(k)) factors.push_back(images[b]);
    r += wedge_all(psi.source, w.variance(), factors).scaled(psi.base.pull(c));
  }
  return r;
}

/// Fiberwise push-forward Ψ P of a source multivector; the result is
/// expressed in the target basis with coefficients still over the source chart.
inline Graded pushforward(const BundleMap& psi, const Graded& p) {
  if (!same_context(p.context(), psi.source)) throw ContextError("pushforward: element does not live on the map's source");
  Graded r(psi.target, p.variance(), p.degree());
  std::vector<Graded> images;
  for (int a = 0; a < psi.source->rank; ++a) {
    std::vector<Poly> coeffs(psi.target->rank);
    for (int b = 0; b < psi.target->rank; ++b) coeffs[b] = psi.fiber[b][a];
    images.push_back(Graded::vector(psi.target, p.variance(), coeffs));
  }
  for (const auto& [k, c] : p.terms()) {
    std::vector<Graded> factors;
    for (int a : mask_indices(k)) factors.push_back(images[a]);
    r += wedge_all(psi.target, p.variance(), factors).scaled(c);
  }
  return r;
}

inline BundleMap BundleMap::compose_after(const BundleMap& first) const {
  if (!same_context(first.target, source)) throw ContextError("compose: charts do not chain");
  BundleMap out{first.source, target, PolyMap{first.source->coords, target->coords, {}}, {}};
  for (const auto& comp : base.components) out.base.components.push_back(first.base.pull(comp));
  out.fiber.assign(target->rank, std::vector<Poly>(first.source->rank));
  for (int c = 0; c < target->rank; ++c)
    for (int a = 0; a < first.source->rank; ++a) {
      Poly acc;
      for (int b = 0; b < source->rank; ++b) acc += first.base.pull(fiber[c][b]) * first.fiber[b][a];
      out.fiber[c][a] = acc;
    }
  return out;
}

}  // namespace jqn
