#pragma once

// Test-only oracles, shared between the unit suite and the acceptance
// binary. Kept independent of the production solvers.

#include "riesztool/measure.hpp"

#include <vector>

namespace riesz::oracles {

// Exhaustive-LP oracle: maximize sum c_i f_i subject to every pairwise
// Lipschitz row f_i - f_j <= |p_i - p_j| and the box |f_i| <= b_i, solved by
// a textbook tableau simplex with Bland's rule. All rows are materialized;
// f = -b is a basic feasible start since b is 1-Lipschitz.
double bl_oracle(const std::vector<Vec>& pts, const std::vector<double>& supply,
                 const std::vector<double>& bound) {
    const int m = static_cast<int>(pts.size());
    if (m == 0) return 0.0;
    // variables y_i = f_i + b_i >= 0
    std::vector<std::vector<double>> rows;  // each: coeffs over y, then rhs
    auto add_row = [&](const std::vector<double>& a, double rhs) {
        std::vector<double> r = a;
        r.push_back(rhs);
        rows.push_back(std::move(r));
    };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            std::vector<double> a(m, 0.0);
            a[i] = 1.0;
            a[j] = -1.0;
            add_row(a, (pts[i] - pts[j]).norm() + bound[i] - bound[j]);
        }
    for (int i = 0; i < m; ++i) {
        std::vector<double> a(m, 0.0);
        a[i] = 1.0;
        add_row(a, 2.0 * bound[i]);
    }
    const int nrows = static_cast<int>(rows.size());
    const int ncols = m + nrows;  // y then slacks
    std::vector<std::vector<double>> t(nrows + 1, std::vector<double>(ncols + 1, 0.0));
    for (int r = 0; r < nrows; ++r) {
        for (int c = 0; c < m; ++c) t[r][c] = rows[r][c];
        t[r][m + r] = 1.0;
        t[r][ncols] = rows[r][m];
    }
    for (int c = 0; c < m; ++c) t[nrows][c] = -supply[c];
    std::vector<int> basis(nrows);
    for (int r = 0; r < nrows; ++r) basis[r] = m + r;

    for (int iter = 0; iter < 50000; ++iter) {
        int pivot_col = -1;
        for (int c = 0; c < ncols; ++c)
            if (t[nrows][c] < -1e-11) { pivot_col = c; break; }  // Bland
        if (pivot_col < 0) break;
        int pivot_row = -1;
        double best = 0.0;
        for (int r = 0; r < nrows; ++r) {
            if (t[r][pivot_col] > 1e-11) {
                const double ratio = t[r][ncols] / t[r][pivot_col];
                if (pivot_row < 0 || ratio < best - 1e-13 ||
                    (ratio < best + 1e-13 && basis[r] < basis[pivot_row])) {
                    best = ratio;
                    pivot_row = r;
                }
            }
        }
        if (pivot_row < 0) throw std::logic_error("bl_oracle: unbounded");
        const double pv = t[pivot_row][pivot_col];
        for (int c = 0; c <= ncols; ++c) t[pivot_row][c] /= pv;
        for (int r = 0; r <= nrows; ++r) {
            if (r == pivot_row) continue;
            const double f = t[r][pivot_col];
            if (f == 0.0) continue;
            for (int c = 0; c <= ncols; ++c) t[r][c] -= f * t[pivot_row][c];
        }
        basis[pivot_row] = pivot_col;
    }
    double constant = 0.0;
    for (int i = 0; i < m; ++i) constant -= supply[i] * bound[i];
    return t[nrows][ncols] + constant;
}


}  // namespace riesz::oracles
