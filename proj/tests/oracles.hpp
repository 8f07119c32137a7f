#pragma once

// Reference implementations used only by tests. They are deliberately naive:
// hard-coded item lists, explicit loops, no shared code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

struct Scores {
  int total, f1, f2;
  int stress, fac1, fac2;
};

// PSS-14 scored straight from the standard item lists.
inline Scores score_pss14(const std::array<int, 14>& raw, bool inclusive = false) {
  const bool reversed[15] = {false, false, false, false, true, true, true, true, false, true, true, false, false, true, false};
  const int f1_items[7] = {4, 5, 6, 8, 9, 10, 13};
  const int f2_items[7] = {1, 2, 3, 7, 11, 12, 14};
  int item[15] = {};
  for (int q = 1; q <= 14; ++q) item[q] = reversed[q] ? 4 - raw[q - 1] : raw[q - 1];
  Scores s{};
  for (int q = 1; q <= 14; ++q) s.total += item[q];
  for (int q : f1_items) s.f1 += item[q];
  for (int q : f2_items) s.f2 += item[q];
  if (inclusive) {
    s.stress = s.total >= 28;
    s.fac1 = s.f1 >= 14;
    s.fac2 = s.f2 >= 14;
  } else {
    s.stress = s.total > 28;
    s.fac1 = s.f1 > 14;
    s.fac2 = s.f2 > 14;
  }
  return s;
}

struct Macro {
  double precision, recall, f1;
};

// Macro metrics from raw label vectors, counting each class separately.
inline Macro macro_from_labels(const std::vector<int>& yt, const std::vector<int>& yp) {
  double p_sum = 0, r_sum = 0, f_sum = 0;
  for (int cls = 0; cls <= 1; ++cls) {
    int tp = 0, pred_pos = 0, true_pos = 0;
    for (std::size_t i = 0; i < yt.size(); ++i) {
      if (yp[i] == cls) ++pred_pos;
      if (yt[i] == cls) ++true_pos;
      if (yp[i] == cls && yt[i] == cls) ++tp;
    }
    const double p = pred_pos == 0 ? 0.0 : static_cast<double>(tp) / pred_pos;
    const double r = true_pos == 0 ? 0.0 : static_cast<double>(tp) / true_pos;
    const double f = (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    p_sum += p;
    r_sum += r;
    f_sum += f;
  }
  return {p_sum / 2, r_sum / 2, f_sum / 2};
}

inline double gini_of(double a, double b) {
  const double n = a + b;
  return 1.0 - (a / n) * (a / n) - (b / n) * (b / n);
}

struct BruteSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0;
  double gain = 0;
};

// Tries every integer cut of every feature and scores it as weighted impurity
// decrease relative to the node. Thresholds are reported as the midpoint
// between the largest level on the left and the smallest on the right.
inline BruteSplit brute_gini_split(const std::vector<std::vector<int>>& x, const std::vector<int>& y, int max_level) {
  BruteSplit best;
  const double n = static_cast<double>(y.size());
  double c1 = 0;
  for (int v : y) c1 += v;
  const double parent = gini_of(n - c1, c1);
  const int features = static_cast<int>(x.front().size());
  for (int f = 0; f < features; ++f) {
    for (int cut = 0; cut < max_level; ++cut) {
      double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
      int left_max = -1, right_min = max_level + 1;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (x[i][f] <= cut) {
          (y[i] ? l1 : l0) += 1;
          left_max = std::max(left_max, x[i][f]);
        } else {
          (y[i] ? r1 : r0) += 1;
          right_min = std::min(right_min, x[i][f]);
        }
      }
      if (l0 + l1 == 0 || r0 + r1 == 0) continue;
      if (left_max != cut) continue;  // same partition as a smaller cut
      const double child = ((l0 + l1) * gini_of(l0, l1) + (r0 + r1) * gini_of(r0, r1)) / n;
      const double gain = parent - child;
      if (gain > 1e-12 && (!best.found || gain > best.gain + 1e-12)) {
        best = {true, f, (left_max + right_min) / 2.0, gain};
      }
    }
  }
  return best;
}

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace oracle
