#pragma once

// Brute-force oracle for the 1-d equal-law projection: enumerate every way
// to assign each atom's members to the common law's slots, place the
// optimal slot values (the mean of the x's assigned to a slot), and return
// the minimum mean squared displacement. Feasibility = all atoms share one
// empirical law, which for equal atom sizes means one value per slot per
// atom.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace oracles {

/// values_per_atom: G atoms, each with exactly m values (any order).
/// Returns min over assignments of (1/N) sum_i (x_i - y_i)^2.
inline double brute_force_equal_law_cost(const std::vector<std::vector<double>>& values_per_atom) {
    const std::size_t groups = values_per_atom.size();
    const std::size_t m = values_per_atom.front().size();
    const std::size_t n = groups * m;

    std::vector<std::vector<std::size_t>> perms(groups);
    for (auto& p : perms) {
        p.resize(m);
        std::iota(p.begin(), p.end(), 0);
    }

    double best = std::numeric_limits<double>::infinity();
    // Odometer over the G per-atom permutations: perm[g][slot] = which of
    // atom g's values lands in that slot of the common law.
    std::vector<std::vector<std::size_t>> current = perms;
    const auto evaluate = [&]() {
        double total = 0.0;
        for (std::size_t slot = 0; slot < m; ++slot) {
            double mean = 0.0;
            for (std::size_t g = 0; g < groups; ++g) mean += values_per_atom[g][current[g][slot]];
            mean /= static_cast<double>(groups);
            for (std::size_t g = 0; g < groups; ++g) {
                const double diff = values_per_atom[g][current[g][slot]] - mean;
                total += diff * diff;
            }
        }
        best = std::min(best, total / static_cast<double>(n));
    };

    // Recursive enumeration of one permutation per atom.
    const auto recurse = [&](auto&& self, std::size_t g) -> void {
        if (g == groups) {
            evaluate();
            return;
        }
        std::sort(current[g].begin(), current[g].end());
        do {
            self(self, g + 1);
        } while (std::next_permutation(current[g].begin(), current[g].end()));
    };
    recurse(recurse, 0);
    return best;
}

}  // namespace oracles
