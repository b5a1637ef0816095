// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#include "cba/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

#include "cba/errors.hpp"

namespace cba {
namespace {

constexpr double kTolPivot = 1e-11;
constexpr int kMaxSimplexIters = 20000;

struct Row {
  Vec a;
  double b;
};

// Unit-normal copy of the system; zero-normal rows are resolved immediately.
// Returns false when a zero-normal row is contradictory.
bool normalize_rows(int dim, const std::vector<Halfspace>& constraints, std::vector<Row>& out) {
  out.clear();
  out.reserve(constraints.size());
  for (const Halfspace& h : constraints) {
    if (static_cast<int>(h.normal.size()) != dim)
      throw InputError("lp: constraint dimension mismatch");
    double nn = norm(h.normal);
    if (nn <= kTolPivot) {
      if (h.offset < -kTolLP) return false;
      continue;
    }
    out.push_back({scale(h.normal, 1.0 / nn), h.offset / nn});
  }
  return true;
}

// Dense simplex over Az = b, z >= 0 with the tableau kept in canonical form.
// Bland's lowest-index rule on both the entering and the leaving choice.
class Simplex {
 public:
  Simplex(std::vector<std::vector<double>> A, std::vector<double> b, std::vector<int> basis)
      : A_(std::move(A)), b_(std::move(b)), basis_(std::move(basis)) {
    m_ = static_cast<int>(A_.size());
    ncols_ = m_ ? static_cast<int>(A_[0].size()) : 0;
  }

  // Minimizes c over the current basic feasible point. blocked[j] bars a
  // column from entering (used for artificials in phase II).
  // Returns false on unboundedness.
  bool minimize(const std::vector<double>& c, const std::vector<char>& blocked) {
    for (int iter = 0; iter < kMaxSimplexIters; ++iter) {
      int enter = -1;
      for (int j = 0; j < ncols_; ++j) {
        if (blocked[j]) continue;
        double cbar = c[j];
        for (int r = 0; r < m_; ++r) cbar -= c[basis_[r]] * A_[r][j];
        if (cbar < -kTolPivot) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = 0;
      for (int r = 0; r < m_; ++r) {
        if (A_[r][enter] > kTolPivot) {
          double ratio = b_[r] / A_[r][enter];
          if (leave < 0 || ratio < best_ratio - kTolPivot ||
              (std::fabs(ratio - best_ratio) <= kTolPivot && basis_[r] < basis_[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw NumericError("simplex: iteration limit reached");
  }

  void pivot(int r, int j) {
    double p = A_[r][j];
    for (int k = 0; k < ncols_; ++k) A_[r][k] /= p;
    b_[r] /= p;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double f = A_[i][j];
      if (f == 0.0) continue;
      for (int k = 0; k < ncols_; ++k) A_[i][k] -= f * A_[r][k];
      b_[i] -= f * b_[r];
    }
    basis_[r] = j;
  }

  double value_of(int col) const {
    for (int r = 0; r < m_; ++r)
      if (basis_[r] == col) return b_[r];
    return 0.0;
  }

  const std::vector<int>& basis() const { return basis_; }
  std::vector<std::vector<double>>& tableau() { return A_; }
  std::vector<double>& rhs() { return b_; }
  int rows() const { return m_; }
  int cols() const { return ncols_; }

 private:
  std::vector<std::vector<double>> A_;
  std::vector<double> b_;
  std::vector<int> basis_;
  int m_ = 0, ncols_ = 0;
};

// Solves the small symmetric system G y = rhs in place; false when singular.
bool solve_dense(std::vector<std::vector<double>> G, std::vector<double> rhs,
                 std::vector<double>& y, double tol = 1e-12) {
  const int k = static_cast<int>(G.size());
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  for (int col = 0; col < k; ++col) {
    int best = col;
    for (int i = col + 1; i < k; ++i)
      if (std::fabs(G[i][col]) > std::fabs(G[best][col])) best = i;
    if (std::fabs(G[best][col]) < tol) return false;
    std::swap(G[col], G[best]);
    std::swap(rhs[col], rhs[best]);
    for (int i = col + 1; i < k; ++i) {
      double f = G[i][col] / G[col][col];
      if (f == 0) continue;
      for (int j = col; j < k; ++j) G[i][j] -= f * G[col][j];
      rhs[i] -= f * rhs[col];
    }
  }
  y.assign(k, 0.0);
  for (int i = k - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int j = i + 1; j < k; ++j) s -= G[i][j] * y[j];
    y[i] = s / G[i][i];
  }
  return true;
}

void enumerate_subsets(int m, int max_size, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx;
  std::function<void(int)> rec = [&](int start) {
    fn(idx);
    if (static_cast<int>(idx.size()) >= max_size) return;
    for (int i = start; i < m; ++i) {
      idx.push_back(i);
      rec(i + 1);
      idx.pop_back();
    }
  };
  rec(0);
}

}  // namespace

ConeFG make_cone_fg(std::vector<Vec> rays) {
  ConeFG c;
  for (Vec& r : rays) {
    Vec u = normalized(r);
    if (is_zero(u)) continue;
    bool dup = false;
    for (const Vec& e : c.rays) dup = dup || dist(e, u) <= kRayDedupTol;
    if (!dup) c.rays.push_back(std::move(u));
  }
  return c;
}

ConeH make_cone_h(std::vector<Vec> normals) {
  ConeH c;
  for (Vec& a : normals) {
    Vec u = normalized(a);
    if (is_zero(u)) continue;
    bool dup = false;
    for (const Vec& e : c.normals) dup = dup || dist(e, u) <= kRayDedupTol;
    if (!dup) c.normals.push_back(std::move(u));
  }
  return c;
}

LPResult lp_solve(int dim, const std::vector<Halfspace>& constraints,
                  const std::optional<Vec>& objective, LPSense sense) {
  if (dim < 1) throw InputError("lp: dimension must be >= 1");
  if (objective && static_cast<int>(objective->size()) != dim)
    throw InputError("lp: objective dimension mismatch");

  std::vector<Row> rows;
  if (!normalize_rows(dim, constraints, rows)) return {LPStatus::Infeasible, std::nullopt, std::nullopt};

  const int m = static_cast<int>(rows.size());
  // Columns: u(dim) | v(dim) | slack(m) | artificial(as needed).
  const int u0 = 0, v0 = dim, s0 = 2 * dim;
  int ncols = 2 * dim + m;
  std::vector<int> art_col(m, -1);
  for (int i = 0; i < m; ++i)
    if (rows[i].b < 0) art_col[i] = ncols++;

  std::vector<std::vector<double>> A(m, std::vector<double>(ncols, 0.0));
  std::vector<double> b(m, 0.0);
  std::vector<int> basis(m, -1);
  for (int i = 0; i < m; ++i) {
    double sgn = rows[i].b < 0 ? -1.0 : 1.0;
    for (int j = 0; j < dim; ++j) {
      A[i][u0 + j] = sgn * rows[i].a[j];
      A[i][v0 + j] = -sgn * rows[i].a[j];
    }
    A[i][s0 + i] = sgn;
    b[i] = sgn * rows[i].b;
    if (art_col[i] >= 0) {
      A[i][art_col[i]] = 1.0;
      basis[i] = art_col[i];
    } else {
      basis[i] = s0 + i;
    }
  }

  Simplex sx(std::move(A), std::move(b), std::move(basis));
  std::vector<char> blocked(ncols, 0);
  std::vector<char> is_art(ncols, 0);
  for (int i = 0; i < m; ++i)
    if (art_col[i] >= 0) is_art[art_col[i]] = 1;

  bool has_art = 2 * dim + m < ncols;
  if (has_art) {
    std::vector<double> c1(ncols, 0.0);
    for (int j = 2 * dim + m; j < ncols; ++j) c1[j] = 1.0;
    if (!sx.minimize(c1, blocked)) throw NumericError("simplex: phase one unbounded");
    double art_sum = 0;
    for (int j = 2 * dim + m; j < ncols; ++j) art_sum += sx.value_of(j);
    if (art_sum > kTolLP) return {LPStatus::Infeasible, std::nullopt, std::nullopt};
    // Pivot lingering zero-level artificials out where possible; redundant
    // rows keep them basic at zero, barred from re-entering.
    for (int r = 0; r < sx.rows(); ++r) {
      if (!is_art[sx.basis()[r]]) continue;
      for (int j = 0; j < 2 * dim + m; ++j) {
        if (std::fabs(sx.tableau()[r][j]) > 1e-8) {
          sx.pivot(r, j);
          break;
        }
      }
    }
    for (int j = 2 * dim + m; j < ncols; ++j) blocked[j] = 1;
  }

  std::optional<double> obj_value;
  if (objective) {
    std::vector<double> c2(ncols, 0.0);
    double flip = sense == LPSense::Maximize ? -1.0 : 1.0;
    for (int j = 0; j < dim; ++j) {
      c2[u0 + j] = flip * (*objective)[j];
      c2[v0 + j] = -flip * (*objective)[j];
    }
    if (!sx.minimize(c2, blocked)) return {LPStatus::Unbounded, std::nullopt, std::nullopt};
  }

  Vec x(dim, 0.0);
  for (int j = 0; j < dim; ++j) x[j] = sx.value_of(u0 + j) - sx.value_of(v0 + j);
  if (objective) obj_value = dot(*objective, x);
  return {LPStatus::Feasible, x, obj_value};
}

std::optional<Vec> farkas_certificate(int dim, const std::vector<Halfspace>& constraints) {
  const int m = static_cast<int>(constraints.size());
  if (m == 0) return std::nullopt;
  std::vector<Halfspace> sys;
  for (int i = 0; i < dim; ++i) {
    Vec pos(m, 0.0), neg(m, 0.0);
    for (int j = 0; j < m; ++j) {
      if (static_cast<int>(constraints[j].normal.size()) != dim)
        throw InputError("farkas: dimension mismatch");
      pos[j] = constraints[j].normal[i];
      neg[j] = -constraints[j].normal[i];
    }
    sys.push_back({pos, 0.0});
    sys.push_back({neg, 0.0});
  }
  Vec offs(m, 0.0);
  for (int j = 0; j < m; ++j) offs[j] = constraints[j].offset;
  sys.push_back({offs, -1.0});
  for (int j = 0; j < m; ++j) {
    Vec e(m, 0.0);
    e[j] = -1.0;
    sys.push_back({e, 0.0});
  }
  LPResult r = lp_solve(m, sys);
  if (r.status != LPStatus::Feasible) return std::nullopt;
  return r.witness;
}

ConeH polar_fg(const ConeFG& c) { return make_cone_h(c.rays); }

ConeFG polar_h(const ConeH& c) { return make_cone_fg(c.normals); }

ConeFG rays_of(const ConeH& c, int dim) {
  if (c.normals.size() > 24)
    throw InputError("rays_of: too many normals for subset enumeration");
  const int m = static_cast<int>(c.normals.size());
  std::vector<Vec> lineality = null_space(c.normals, dim);
  std::vector<Vec> gens;
  for (const Vec& l : lineality) {
    gens.push_back(l);
    gens.push_back(scale(l, -1.0));
  }
  auto feasible = [&](const Vec& v) {
    for (const Vec& a : c.normals)
      if (dot(a, v) > 1e-9) return false;
    return true;
  };
  enumerate_subsets(m, std::min(dim, m), [&](const std::vector<int>& S) {
    std::vector<Vec> stacked;
    stacked.reserve(S.size() + lineality.size());
    for (int i : S) stacked.push_back(c.normals[i]);
    for (const Vec& l : lineality) stacked.push_back(l);
    std::vector<Vec> N = null_space(stacked, dim);
    if (N.size() != 1) return;
    for (double sgn : {1.0, -1.0}) {
      Vec v = scale(N[0], sgn);
      if (feasible(v)) gens.push_back(v);
    }
  });
  return make_cone_fg(std::move(gens));
}

ConeH facets_of(const ConeFG& c, int dim) {
  ConeFG polar_gens = rays_of(polar_fg(c), dim);
  return make_cone_h(polar_gens.rays);
}

bool cone_contains(const ConeH& c, const Vec& v, double tol) {
  if (norm(v) <= tol) return true;
  Vec u = normalized(v);
  for (const Vec& a : c.normals)
    if (dot(a, u) > tol) return false;
  return true;
}

bool cone_contains(const ConeFG& c, const Vec& v, double tol) {
  if (norm(v) <= tol) return true;
  Vec u = normalized(v);
  if (c.rays.empty()) return false;
  const int dim = static_cast<int>(u.size());
  const int k = static_cast<int>(c.rays.size());
  // min t subject to |sum_j mu_j r_j - u|_inf <= t, mu >= 0.
  std::vector<Halfspace> sys;
  for (int i = 0; i < dim; ++i) {
    Vec pos(k + 1, 0.0), neg(k + 1, 0.0);
    for (int j = 0; j < k; ++j) {
      pos[j] = c.rays[j][i];
      neg[j] = -c.rays[j][i];
    }
    pos[k] = -1.0;
    neg[k] = -1.0;
    sys.push_back({pos, u[i]});
    sys.push_back({neg, -u[i]});
  }
  for (int j = 0; j < k; ++j) {
    Vec e(k + 1, 0.0);
    e[j] = -1.0;
    sys.push_back({e, 0.0});
  }
  {
    Vec e(k + 1, 0.0);
    e[k] = -1.0;
    sys.push_back({e, 0.0});
  }
  Vec obj(k + 1, 0.0);
  obj[k] = 1.0;
  LPResult r = lp_solve(k + 1, sys, obj, LPSense::Minimize);
  if (r.status != LPStatus::Feasible) return false;
  return *r.objective <= tol;
}

namespace {

bool fg_in_h(const ConeFG& f, const ConeH& h, double tol) {
  for (const Vec& r : f.rays)
    for (const Vec& a : h.normals)
      if (dot(a, r) > tol) return false;
  return true;
}

bool fg_in_fg(const ConeFG& f, const ConeFG& g, double tol) {
  for (const Vec& r : f.rays)
    if (!cone_contains(g, r, tol)) return false;
  return true;
}

}  // namespace

bool cones_equal(const ConeFG& a, const ConeFG& b, int, double tol) {
  return fg_in_fg(a, b, tol) && fg_in_fg(b, a, tol);
}

bool cones_equal(const ConeFG& a, const ConeH& b, int dim, double tol) {
  return fg_in_h(a, b, tol) && fg_in_fg(rays_of(b, dim), a, tol);
}

bool cones_equal(const ConeH& a, const ConeFG& b, int dim, double tol) {
  return cones_equal(b, a, dim, tol);
}

bool cones_equal(const ConeH& a, const ConeH& b, int, double tol) {
  // H1 = H2 iff their polars cone(normals) coincide.
  ConeFG pa = polar_h(a), pb = polar_h(b);
  return fg_in_fg(pa, pb, tol) && fg_in_fg(pb, pa, tol);
}

bool polyhedron_contains(const Polyhedron& P, const Vec& x, double tol) {
  for (const Halfspace& h : P.halfspaces) {
    double nn = norm(h.normal);
    if (nn <= 0) continue;
    if ((dot(h.normal, x) - h.offset) / nn > tol) return false;
  }
  return true;
}

ConeFG normal_cone(const Polyhedron& P, const Vec& x, double tol) {
  std::vector<Vec> active;
  for (const Halfspace& h : P.halfspaces) {
    double nn = norm(h.normal);
    if (nn <= 0) continue;
    double margin = (dot(h.normal, x) - h.offset) / nn;
    if (margin > tol) throw InputError("normal_cone: point is infeasible");
    if (std::fabs(margin) <= tol) active.push_back(h.normal);
  }
  return make_cone_fg(std::move(active));
}

Vec project_polyhedron(const Polyhedron& P, const Vec& x) {
  const int n = static_cast<int>(x.size());
  if (P.halfspaces.empty()) return x;
  if (P.halfspaces.size() > 12)
    throw InputError("project_polyhedron: more than 12 halfspaces");
  std::vector<Row> rows;
  if (!normalize_rows(n, P.halfspaces, rows))
    throw InputError("project_polyhedron: empty polyhedron");
  if (lp_solve(n, P.halfspaces).status != LPStatus::Feasible)
    throw InputError("project_polyhedron: empty polyhedron");

  auto feasible = [&](const Vec& p) {
    for (const Row& r : rows)
      if (dot(r.a, p) > r.b + kTolProjection) return false;
    return true;
  };

  const int m = static_cast<int>(rows.size());
  std::optional<Vec> best;
  double best_d = 0;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) > n) continue;
    std::vector<int> S;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) S.push_back(i);
    const int k = static_cast<int>(S.size());
    Vec cand;
    if (k == 0) {
      cand = x;
    } else {
      // Equality projection onto {y : a_i y = b_i, i in S} via the normal
      // equations (A A^T) mu = A x - b; candidate x - A^T mu.
      std::vector<std::vector<double>> G(k, std::vector<double>(k, 0.0));
      std::vector<double> rhs(k, 0.0);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) G[i][j] = dot(rows[S[i]].a, rows[S[j]].a);
        rhs[i] = dot(rows[S[i]].a, x) - rows[S[i]].b;
      }
      std::vector<double> mu;
      if (!solve_dense(G, rhs, mu)) continue;
      bool nonneg = true;
      for (double v : mu) nonneg = nonneg && v >= -kTolProjection;
      if (!nonneg) continue;
      cand = x;
      for (int i = 0; i < k; ++i) cand = sub(cand, scale(rows[S[i]].a, mu[i]));
    }
    if (!feasible(cand)) continue;
    double d = dist(x, cand);
    if (!best || d < best_d) {
      best = cand;
      best_d = d;
    }
  }
  if (!best) throw NumericError("project_polyhedron: no valid active set found");
  return *best;
}

Vec project_cone_fg(const ConeFG& c, const Vec& w, int dim) {
  if (c.rays.size() > 24) throw InputError("project_cone_fg: too many rays");
  const int m = static_cast<int>(c.rays.size());
  Vec best(w.size(), 0.0);
  double best_d = norm(w);
  enumerate_subsets(m, std::min(dim, m), [&](const std::vector<int>& S) {
    if (S.empty()) return;
    const int k = static_cast<int>(S.size());
    std::vector<std::vector<double>> G(k, std::vector<double>(k, 0.0));
    std::vector<double> rhs(k, 0.0);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) G[i][j] = dot(c.rays[S[i]], c.rays[S[j]]);
      rhs[i] = dot(c.rays[S[i]], w);
    }
    std::vector<double> rho;
    if (!solve_dense(G, rhs, rho)) return;
    for (double v : rho)
      if (v < -1e-12) return;
    Vec p(w.size(), 0.0);
    for (int i = 0; i < k; ++i) p = add(p, scale(c.rays[S[i]], std::max(0.0, rho[i])));
    double d = dist(w, p);
    if (d < best_d) {
      best = p;
      best_d = d;
    }
  });
  return best;
}

ConeFG minkowski_sum_fg(const ConeFG& a, const ConeFG& b) {
  std::vector<Vec> all = a.rays;
  all.insert(all.end(), b.rays.begin(), b.rays.end());
  return make_cone_fg(std::move(all));
}

std::vector<Vec> null_space(const std::vector<Vec>& rows, int dim, double tol) {
  std::vector<Vec> M;
  for (const Vec& r : rows) {
    if (static_cast<int>(r.size()) != dim) throw InputError("null_space: dimension mismatch");
    M.push_back(normalized(r));
  }
  int r = 0;
  std::vector<int> pivot_col;
  for (int col = 0; col < dim && r < static_cast<int>(M.size()); ++col) {
    int best = -1;
    double bv = tol;
    for (int i = r; i < static_cast<int>(M.size()); ++i)
      if (std::fabs(M[i][col]) > bv) {
        bv = std::fabs(M[i][col]);
        best = i;
      }
    if (best < 0) continue;
    std::swap(M[r], M[best]);
    double p = M[r][col];
    for (int j = 0; j < dim; ++j) M[r][j] /= p;
    for (int i = 0; i < static_cast<int>(M.size()); ++i) {
      if (i == r) continue;
      double f = M[i][col];
      if (f == 0) continue;
      for (int j = 0; j < dim; ++j) M[i][j] -= f * M[r][j];
    }
    pivot_col.push_back(col);
    ++r;
  }
  std::vector<char> is_pivot(dim, 0);
  for (int c : pivot_col) is_pivot[c] = 1;
  std::vector<Vec> basis;
  for (int f = 0; f < dim; ++f) {
    if (is_pivot[f]) continue;
    Vec x(dim, 0.0);
    x[f] = 1.0;
    for (int kk = 0; kk < r; ++kk) x[pivot_col[kk]] = -M[kk][f];
    basis.push_back(normalized(x));
  }
  return basis;
}

}  // namespace cba
