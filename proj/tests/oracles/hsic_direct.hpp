#pragma once

// Direct-formula HSIC oracle: builds its own median bandwidth, Gaussian
// kernel, delta kernel, centering matrix, and trace, all in double-double
// arithmetic. Shares no evaluation code with the library's shortcut.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "fairtransport/matrix.hpp"
#include "oracles/dd.hpp"

namespace oracles {

inline double hsic_direct_dd(const fairtransport::Matrix& y,
                             const std::vector<std::uint32_t>& labels) {
    const std::size_t n = y.rows;

    std::vector<DD> distances;
    std::vector<std::vector<DD>> dist(n, std::vector<DD>(n, DD{0.0}));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            DD acc{0.0};
            for (std::size_t c = 0; c < y.cols; ++c) {
                const DD diff = DD{y.at(i, c)} - DD{y.at(j, c)};
                acc = acc + diff * diff;
            }
            dist[i][j] = dd_sqrt(acc);
            if (j > i) distances.push_back(dist[i][j]);
        }
    }
    std::sort(distances.begin(), distances.end());
    const std::size_t pairs = distances.size();
    DD bandwidth = (pairs % 2 == 1)
                       ? distances[pairs / 2]
                       : (distances[pairs / 2 - 1] + distances[pairs / 2]) * DD{0.5};
    if (!(bandwidth.value() > 0.0)) bandwidth = DD{1.0};

    const DD inv = DD{1.0} / (DD{2.0} * bandwidth * bandwidth);
    std::vector<std::vector<DD>> K(n, std::vector<DD>(n)), L(n, std::vector<DD>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            K[i][j] = dd_exp(-(dist[i][j] * dist[i][j] * inv));
            L[i][j] = DD{labels[i] == labels[j] ? 1.0 : 0.0};
        }
    }
    // H = I - 11^T/n; Kc = H K H; Lc = H L H; statistic = tr(Kc Lc)/n^2.
    std::vector<std::vector<DD>> H(n, std::vector<DD>(n));
    const DD inv_n = DD{1.0} / DD{static_cast<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            H[i][j] = (i == j ? DD{1.0} : DD{0.0}) - inv_n;
        }
    }
    const auto matmul = [&](const auto& a, const auto& b) {
        std::vector<std::vector<DD>> out(n, std::vector<DD>(n, DD{0.0}));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t j = 0; j < n; ++j) out[i][j] = out[i][j] + a[i][k] * b[k][j];
            }
        }
        return out;
    };
    const auto Kc = matmul(matmul(H, K), H);
    const auto Lc = matmul(matmul(H, L), H);
    DD trace{0.0};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) trace = trace + Kc[i][j] * Lc[j][i];
    }
    return (trace / DD{static_cast<double>(n * n)}).value();
}

}  // namespace oracles
