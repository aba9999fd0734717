#pragma once

#include <utility>
#include <vector>

namespace rieszgas {

// maximize c.x  s.t.  a_i.x <= b_i (b_i >= 0), x free.
//
// Dense single-phase primal simplex on the split variables x = x+ - x-;
// the all-slack basis is feasible because b >= 0. Dantzig pricing with a
// Bland fallback for anti-cycling.
struct LpRow {
    std::vector<std::pair<int, double>> coeffs;
    double b = 0.0;
};

enum class LpStatus { optimal, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::optimal;
    double value = 0.0;
    std::vector<double> x;
    int pivots = 0;
};

LpResult solve_lp_max(const std::vector<double>& objective, const std::vector<LpRow>& rows,
                      int max_pivots = 200000);

}  // namespace rieszgas
