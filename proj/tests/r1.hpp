#pragma once

// Shared worked example: binomial tree of depth 2 with p = 1/2, rational
// kernel with alpha = beta = (1, 1/2, 1/4) and multiplicative martingale
// steps x1.2 / x0.8 from 1. All expected values below were frozen from an
// independent exact-rational path enumeration.
//
// Node ids: 0 root; 1 up, 2 down; 3 uu, 4 ud, 5 du, 6 dd.
// pi: 2; (1.1, 0.9); (0.61, 0.49, 0.49, 0.41).  r_1 = r_2 = 1, B = (1, 2, 4).
// rho: 2; (2.2, 1.8); (2.44, 1.96, 1.96, 1.64).
// P_01 = 0.5, P_02 = 0.25, P_12 = 0.5 on both nodes.  A_1 = 1, A_2 = (1.55, 1.45).
// FH row: m_01 = 1, m_02 = 0.5, residual 0.5.

#include <memory>

#include "pktree/kernel.hpp"
#include "pktree/models.hpp"

namespace pktree::testing {

struct R1 {
    TreePtr tree;
    Schedule alpha;
    Schedule beta;
    AdaptedProcess martingale;
    PricingKernel kernel;
};

inline R1 make_r1() {
    TreePtr tree = std::make_shared<const FiltrationTree>(make_binomial(2, 0.5));
    Schedule alpha = Schedule::geometric(1.0, 0.5, 2);
    Schedule beta = Schedule::geometric(1.0, 0.5, 2);
    AdaptedProcess martingale = binomial_martingale(tree, 1.2, 0.8, 0.5, 1.0);
    PricingKernel kernel = kernel_rational(tree, alpha, beta, martingale);
    return R1{std::move(tree), std::move(alpha), std::move(beta), std::move(martingale),
              std::move(kernel)};
}

} // namespace pktree::testing
