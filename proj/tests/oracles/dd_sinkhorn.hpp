#pragma once

// Entropic-transport fixed point iterated in double-double precision, plus
// the barycentric projection computed the same way. Independent of the
// library's log-domain path; used to pin down small instances.

#include <vector>

#include "fairtransport/matrix.hpp"
#include "oracles/dd.hpp"

namespace oracles {

struct DDProjection {
    std::vector<std::vector<DD>> coupling;  // N x G
    std::vector<std::vector<DD>> y;         // N x d
};

inline DD dd_lse(const std::vector<DD>& terms) {
    DD peak = terms.front();
    for (const DD& t : terms) {
        if (peak < t) peak = t;
    }
    DD sum{0.0};
    for (const DD& t : terms) sum = sum + dd_exp(t - peak);
    return peak + dd_log(sum);
}

/// Runs `sweeps` full Sinkhorn sweeps in double-double and returns the plan
/// and normalized barycentric image against the given target points mu.
inline DDProjection dd_sinkhorn_projection(const fairtransport::Matrix& cost,
                                           const fairtransport::Matrix& mu,
                                           const std::vector<double>& row_marginal,
                                           const std::vector<double>& col_marginal, double epsilon,
                                           std::size_t sweeps) {
    const std::size_t n = cost.rows;
    const std::size_t m = cost.cols;
    const DD eps{epsilon};

    std::vector<DD> f(n, DD{0.0}), g(m, DD{0.0});
    std::vector<DD> log_a(n), log_b(m);
    for (std::size_t i = 0; i < n; ++i) log_a[i] = dd_log(DD{row_marginal[i]});
    for (std::size_t j = 0; j < m; ++j) log_b[j] = dd_log(DD{col_marginal[j]});

    std::vector<DD> terms;
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) {
            terms.assign(m, DD{0.0});
            for (std::size_t j = 0; j < m; ++j) terms[j] = (g[j] - DD{cost.at(i, j)}) / eps;
            f[i] = eps * (log_a[i] - dd_lse(terms));
        }
        for (std::size_t j = 0; j < m; ++j) {
            terms.assign(n, DD{0.0});
            for (std::size_t i = 0; i < n; ++i) terms[i] = (f[i] - DD{cost.at(i, j)}) / eps;
            g[j] = eps * (log_b[j] - dd_lse(terms));
        }
    }

    DDProjection out;
    out.coupling.assign(n, std::vector<DD>(m));
    out.y.assign(n, std::vector<DD>(mu.cols));
    for (std::size_t i = 0; i < n; ++i) {
        DD mass{0.0};
        for (std::size_t j = 0; j < m; ++j) {
            out.coupling[i][j] = dd_exp((f[i] + g[j] - DD{cost.at(i, j)}) / eps);
            mass = mass + out.coupling[i][j];
        }
        for (std::size_t c = 0; c < mu.cols; ++c) {
            DD acc{0.0};
            for (std::size_t j = 0; j < m; ++j) acc = acc + out.coupling[i][j] * DD{mu.at(j, c)};
            out.y[i][c] = acc / mass;
        }
    }
    return out;
}

}  // namespace oracles
