#pragma once

#include <complex>
#include <vector>

#include "oscint/cutoffs.hpp"
#include "oscint/opnorm.hpp"

namespace oscint {

// Dense sub-block of an operator on a shared grid: rows [row0, row0+nrows)
// of the x grid, columns [col0, col0+ncols) of the theta grid, with the
// quadrature weights of that grid. Plain matrices use wx = wth = 1.
struct PieceOperator {
    int row0 = 0, col0 = 0;
    int nrows = 0, ncols = 0;
    std::vector<std::complex<double>> k;  // row-major
    double wx = 1.0, wth = 1.0;
    BlockIndex index;  // lattice label when produced by a decomposition

    std::complex<double> at(int i, int j) const {
        return k[static_cast<std::size_t>(i) * ncols + j];
    }
};

PieceOperator piece_from_matrix(int nrows, int ncols, std::vector<std::complex<double>> entries);

// L2 operator norm of a piece in the weighted grid spaces:
// sigma_max(k) * sqrt(wx * wth).
double piece_l2_norm(const PieceOperator& piece, double rel_tol = 1e-10);

// Superposition of the pieces on the full grid (same weights required).
PieceOperator assemble_pieces(const std::vector<PieceOperator>& family, int rows, int cols);

// Pairwise composition-norm tables: a(i,j) = ||T_i* T_j||, b(i,j) = ||T_i T_j*||,
// measured by power iteration on the dense compositions. Pairs whose kernels
// have disjoint x-supports contribute a = 0 (the inner integral of T_i* T_j
// runs over x); disjoint theta-supports give b = 0.
struct GramTables {
    int count = 0;
    std::vector<double> a;  // count x count, row-major
    std::vector<double> b;
    double A = 0.0;  // sup_i sum_j sqrt(a(i,j))
    double B = 0.0;
    double max_piece_norm = 0.0;  // max_i sqrt(a(i,i))

    double a_at(int i, int j) const { return a[static_cast<std::size_t>(i) * count + j]; }
    double b_at(int i, int j) const { return b[static_cast<std::size_t>(i) * count + j]; }
};

GramTables gram_tables(const std::vector<PieceOperator>& family, double rel_tol = 1e-8);

// sqrt(A * B): upper bound for the norm of the summed family.
double cotlar_bound(const GramTables& tables);

// Window-block decomposition of the (shell-localized, sign-restricted)
// discretized kernel: piece_{X,Theta} = kernel * rho_sigma * rho_varsigma *
// window_X(x) * window_Theta(theta). Restricted to n = 1 grids. The pieces
// sum back to the sign-restricted kernel pointwise.
struct BlockFamily {
    std::vector<PieceOperator> pieces;
    double hbar = 0.0;
    SignPattern sigma;     // right side
    SignPattern varsigma;  // left side
    int x_index_min = 0;   // span of active right-window indices
    int x_index_max = 0;
};

BlockFamily block_decompose(const DiscretizedOperator& op, const SignPattern& sigma,
                            const SignPattern& varsigma, std::size_t max_blocks = 8192);

// Empirical A/B profile of the full block family of a shell spec, aggregated
// over all sign-pattern pairs, with the generic piece scale tau and the
// regime predictions for A.
struct OrthoProfile {
    double lambda = 0.0;
    double hbar = 0.0;
    int l = 1, r = 1;
    double A = 0.0;
    double B = 0.0;
    double bound = 0.0;          // sqrt(A*B)
    double sum_norm = 0.0;       // measured norm of the reassembled family
    double shell_norm = 0.0;     // norm of the shell operator itself
    double tau = 0.0;            // min(lambda^-n hbar^-1, lambda^{-n+1} hbar^2)^{1/2}
    double max_piece_norm = 0.0;
    int piece_count = 0;
    int xn_span = 0;             // max - min active right-window index
    double pred_const = 1.0;               // A prediction, widest regime
    double pred_overlap = 0.0;             // (lambda hbar^3)^{-1}
    double pred_type = 0.0;                // hbar^{-1+1/r}
};

struct ProfileOptions {
    double points_per_wavelength = 8.0;
    GridBudget budget{};
    std::size_t max_blocks = 8192;
    double rel_tol = 1e-6;
};

OrthoProfile orthogonality_profile(const OperatorSpec& spec, double hbar, int l, int r,
                                   const ProfileOptions& opts = {});

}  // namespace oscint
