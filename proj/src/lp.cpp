#include "bcpg/lp.hpp"

#include "bcpg/error.hpp"

namespace bcpg {

std::optional<RationalVector> find_feasible_point(const LinearSystem& sys) {
  const int n = sys.variables;
  if (static_cast<int>(sys.lower.size()) != n || static_cast<int>(sys.upper.size()) != n ||
      sys.rows.size() != sys.rhs.size())
    throw Error(ErrorCode::InvalidArgument, "inconsistent linear system dimensions");
  for (int j = 0; j < n; ++j)
    if (sys.lower[j] > sys.upper[j]) return std::nullopt;

  // Shift x = lower + z with z >= 0; upper bounds become rows z_j <= u_j - l_j.
  std::vector<RationalVector> a;
  RationalVector b;
  for (std::size_t r = 0; r < sys.rows.size(); ++r) {
    if (static_cast<int>(sys.rows[r].size()) != n) throw Error(ErrorCode::InvalidArgument, "row length mismatch");
    Rational shifted = sys.rhs[r];
    for (int j = 0; j < n; ++j) shifted -= sys.rows[r][j] * sys.lower[j];
    a.push_back(sys.rows[r]);
    b.push_back(shifted);
  }
  for (int j = 0; j < n; ++j) {
    RationalVector row(n, Rational(0));
    row[j] = 1;
    a.push_back(std::move(row));
    b.push_back(sys.upper[j] - sys.lower[j]);
  }
  const int m = static_cast<int>(a.size());

  // Columns: z (n), slacks (m), artificials (one per negative row).
  std::vector<int> artificial_row;
  for (int r = 0; r < m; ++r)
    if (b[r] < 0) artificial_row.push_back(r);
  const int n_art = static_cast<int>(artificial_row.size());
  const int cols = n + m + n_art;
  std::vector<RationalVector> t(m, RationalVector(cols + 1, Rational(0)));
  std::vector<int> basis(m);
  int next_art = 0;
  for (int r = 0; r < m; ++r) {
    const bool negate = b[r] < 0;
    for (int j = 0; j < n; ++j) t[r][j] = negate ? -a[r][j] : a[r][j];
    t[r][n + r] = negate ? -1 : 1;
    t[r][cols] = negate ? -b[r] : b[r];
    if (negate) {
      t[r][n + m + next_art] = 1;
      basis[r] = n + m + next_art;
      ++next_art;
    } else {
      basis[r] = n + r;
    }
  }
  if (n_art > 0) {
    // Reduced costs of minimizing the sum of artificials.
    RationalVector cost(cols + 1, Rational(0));
    for (int r : artificial_row)
      for (int c = 0; c <= cols; ++c)
        if (c < n + m) cost[c] -= t[r][c];
        else if (c == cols) cost[c] -= t[r][c];
    for (;;) {
      int enter = -1;
      for (int c = 0; c < cols; ++c) {
        if (cost[c] < 0) {
          enter = c;
          break;
        }
      }
      if (enter < 0) break;
      int leave = -1;
      Rational best;
      for (int r = 0; r < m; ++r) {
        if (t[r][enter] <= 0) continue;
        const Rational ratio = t[r][cols] / t[r][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis[r] < basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) break;  // unbounded cannot happen for a nonnegative objective
      const Rational piv = t[leave][enter];
      for (int c = 0; c <= cols; ++c) t[leave][c] /= piv;
      for (int r = 0; r < m; ++r) {
        if (r == leave || t[r][enter] == 0) continue;
        const Rational f = t[r][enter];
        for (int c = 0; c <= cols; ++c) t[r][c] -= f * t[leave][c];
      }
      if (cost[enter] != 0) {
        const Rational f = cost[enter];
        for (int c = 0; c <= cols; ++c) cost[c] -= f * t[leave][c];
      }
      basis[leave] = enter;
    }
    if (cost[cols] != 0) return std::nullopt;
  }
  RationalVector x(sys.lower);
  for (int r = 0; r < m; ++r)
    if (basis[r] < n) x[basis[r]] += t[r][cols];
  return x;
}

}  // namespace bcpg
