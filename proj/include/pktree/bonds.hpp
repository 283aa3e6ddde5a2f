#pragma once

#include <iosfwd>

#include "pktree/kernel.hpp"

namespace pktree {

/// Discount-bond surface P_ij = E_i[pi_j] / pi_i for 0 <= i < j <= H, stored
/// densely: one field (a value per depth-i node) per maturity pair. Every
/// entry lies strictly inside (0, 1) and is strictly decreasing in maturity.
class BondSurface {
public:
    int horizon() const { return horizon_; }
    const PricingKernel& kernel() const { return kernel_; }
    const FiltrationTree& tree() const { return kernel_.tree(); }

    /// P_ij at a depth-i node. Throws IndexOutOfRange unless 0 <= i < j <= H.
    double price(int i, int j, NodeId node) const;
    /// Per-period rate R_ij = 1/P_ij - 1, strictly positive.
    double rate(int i, int j, NodeId node) const;

    /// Whole field over depth-i nodes as a depth-i process.
    AdaptedProcess price_field(int i, int j) const;

private:
    friend BondSurface bond_surface(const PricingKernel&);
    BondSurface(PricingKernel kernel, int horizon) : kernel_(std::move(kernel)), horizon_(horizon) {}

    const std::vector<double>& field(int i, int j) const;

    PricingKernel kernel_;
    int horizon_;
    std::vector<std::vector<double>> fields_; // indexed via pair_index(i, j)
    std::size_t pair_index(int i, int j) const;
};

BondSurface bond_surface(const PricingKernel& kernel);

/// Per-period rate field R_ij over depth-i nodes.
AdaptedProcess per_period_rate(const BondSurface& surface, int i, int j);

/// Closed-form rational-model bond price (alpha_j + beta_j N_i)/(alpha_i + beta_i N_i)
/// as a depth-i field. Must agree node-wise with bond_surface(kernel_rational(...)).
AdaptedProcess rational_bond_closed_form(const Schedule& alpha, const Schedule& beta,
                                         const AdaptedProcess& martingale, int i, int j);

/// Family of positive martingale columns representing the bond surface:
/// column n (1 <= n <= H) holds m_{i,n} = E_i[pi_{n-1} - E_{n-1}[pi_n]] for
/// 0 <= i <= n-1; column H+1 is the terminal residual m_{i,H+1} = E_i[pi_H]
/// on [0, H]. Tail sums reproduce pi and every bond price exactly.
class FHFamily {
public:
    int horizon() const { return horizon_; }
    /// Valid n: 1..H for regular columns, H+1 for the residual column.
    const AdaptedProcess& column(int n) const;
    int column_count() const { return horizon_ + 1; }

private:
    friend FHFamily fh_extract(const PricingKernel&);
    FHFamily(int horizon, std::vector<AdaptedProcess> columns)
        : horizon_(horizon), columns_(std::move(columns)) {}

    int horizon_;
    std::vector<AdaptedProcess> columns_; // columns_[n-1] for n = 1..H+1
};

/// Extracts the positive-martingale representation from a kernel via the
/// one-step supermartingale increments. Positivity and the martingale
/// property of every column are asserted.
FHFamily fh_extract(const PricingKernel& kernel);

/// Reconstructs P_ij from the family: tail sum from j+1 over tail sum from
/// i+1 (both including the residual column), as a depth-i field.
AdaptedProcess fh_reconstruct(const FHFamily& family, int i, int j);

/// CSV rows `time_i,time_j,node,P,R` for all maturities j > i, depth-i nodes
/// in id order, LF line endings, 12 significant digits.
void write_curve_csv(std::ostream& out, const BondSurface& surface, int i);

} // namespace pktree
