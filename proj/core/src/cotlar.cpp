#include "oscint/cotlar.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oscint/parallel.hpp"

namespace oscint {

PieceOperator piece_from_matrix(int nrows, int ncols, std::vector<std::complex<double>> entries) {
    if (static_cast<std::size_t>(nrows) * ncols != entries.size()) {
        throw PreconditionError("piece_from_matrix: entry count mismatch");
    }
    PieceOperator p;
    p.nrows = nrows;
    p.ncols = ncols;
    p.k = std::move(entries);
    return p;
}

namespace {

// Largest singular value of a dense row-major matrix by power iteration on
// M^H M, fixed seed. Small matrices only; tolerances are tight since the
// Gram tables feed a certified inequality.
double sigma_max(const std::complex<double>* m, int rows, int cols, double rel_tol,
                 int max_iter = 20000) {
    std::vector<std::complex<double>> u(static_cast<std::size_t>(cols));
    std::mt19937 rng(0x9e3779b9u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& z : u) z = {dist(rng), dist(rng)};
    std::vector<std::complex<double>> w(static_cast<std::size_t>(rows));
    std::vector<std::complex<double>> z(static_cast<std::size_t>(cols));
    double prev = -1.0;
    int stable = 0;
    double sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i < rows; ++i) {
            std::complex<double> acc{0.0, 0.0};
            const std::complex<double>* row = m + static_cast<std::size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) acc += row[j] * u[static_cast<std::size_t>(j)];
            w[static_cast<std::size_t>(i)] = acc;
        }
        double un2 = 0.0;
        for (const auto& v : u) un2 += std::norm(v);
        double wn2 = 0.0;
        for (const auto& v : w) wn2 += std::norm(v);
        if (wn2 == 0.0 || un2 == 0.0) return 0.0;
        sigma = std::sqrt(wn2 / un2);
        if (prev >= 0.0 && std::abs(sigma - prev) <= rel_tol * sigma) {
            if (++stable >= 2) return sigma;
        } else {
            stable = 0;
        }
        prev = sigma;
        for (int j = 0; j < cols; ++j) {
            std::complex<double> acc{0.0, 0.0};
            for (int i = 0; i < rows; ++i)
                acc += std::conj(m[static_cast<std::size_t>(i) * cols + j]) *
                       w[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(j)] = acc;
        }
        double zn = 0.0;
        for (const auto& v : z) zn += std::norm(v);
        zn = std::sqrt(zn);
        if (zn == 0.0) return 0.0;
        for (int j = 0; j < cols; ++j) u[static_cast<std::size_t>(j)] = z[static_cast<std::size_t>(j)] / zn;
    }
    throw IterationError("piece norm power iteration did not converge");
}

struct Range {
    int lo = 0, hi = 0;  // [lo, hi)
    int size() const { return hi - lo; }
};

Range intersect(int a0, int an, int b0, int bn) {
    Range r;
    r.lo = std::max(a0, b0);
    r.hi = std::min(a0 + an, b0 + bn);
    if (r.hi < r.lo) r.hi = r.lo;
    return r;
}

}  // namespace

double piece_l2_norm(const PieceOperator& piece, double rel_tol) {
    if (piece.k.empty()) return 0.0;
    return sigma_max(piece.k.data(), piece.nrows, piece.ncols, rel_tol) *
           std::sqrt(piece.wx * piece.wth);
}

PieceOperator assemble_pieces(const std::vector<PieceOperator>& family, int rows, int cols) {
    PieceOperator sum;
    sum.nrows = rows;
    sum.ncols = cols;
    sum.k.assign(static_cast<std::size_t>(rows) * cols, {0.0, 0.0});
    for (const PieceOperator& p : family) {
        sum.wx = p.wx;
        sum.wth = p.wth;
        for (int i = 0; i < p.nrows; ++i) {
            for (int j = 0; j < p.ncols; ++j) {
                sum.k[static_cast<std::size_t>(p.row0 + i) * cols + (p.col0 + j)] += p.at(i, j);
            }
        }
    }
    return sum;
}

GramTables gram_tables(const std::vector<PieceOperator>& family, double rel_tol) {
    const int m = static_cast<int>(family.size());
    GramTables t;
    t.count = m;
    t.a.assign(static_cast<std::size_t>(m) * m, 0.0);
    t.b.assign(static_cast<std::size_t>(m) * m, 0.0);
    if (m == 0) return t;
    const double wx = family[0].wx;
    const double wth = family[0].wth;
    for (const PieceOperator& p : family) {
        if (p.wx != wx || p.wth != wth) throw PreconditionError("pieces must share grid weights");
    }

    // Upper-triangular pair list; a(i,j) needs x-overlap, b(i,j) theta-overlap.
    struct Pair {
        int i, j;
        bool need_a, need_b;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            const bool xo = intersect(family[i].row0, family[i].nrows, family[j].row0,
                                      family[j].nrows)
                                .size() > 0;
            const bool to = intersect(family[i].col0, family[i].ncols, family[j].col0,
                                      family[j].ncols)
                                .size() > 0;
            if (xo || to) pairs.push_back({i, j, xo, to});
        }
    }

    parallel_for(pairs.size(), [&](std::size_t idx) {
        const auto [i, j, need_a, need_b] = pairs[idx];
        const PieceOperator& P = family[static_cast<std::size_t>(i)];
        const PieceOperator& Q = family[static_cast<std::size_t>(j)];
        if (need_a) {
            // (T_i^* T_j)(theta, theta~) = sum_x conj(K_i) K_j * wx, norm * wth
            const Range xr = intersect(P.row0, P.nrows, Q.row0, Q.nrows);
            std::vector<std::complex<double>> comp(
                static_cast<std::size_t>(P.ncols) * Q.ncols, {0.0, 0.0});
            for (int x = xr.lo; x < xr.hi; ++x) {
                const int pi = x - P.row0;
                const int qi = x - Q.row0;
                for (int a = 0; a < P.ncols; ++a) {
                    const std::complex<double> left = std::conj(P.at(pi, a));
                    if (left == std::complex<double>{0.0, 0.0}) continue;
                    for (int c = 0; c < Q.ncols; ++c) {
                        comp[static_cast<std::size_t>(a) * Q.ncols + c] += left * Q.at(qi, c);
                    }
                }
            }
            const double nrm = sigma_max(comp.data(), P.ncols, Q.ncols, rel_tol) * wx * wth;
            t.a[static_cast<std::size_t>(i) * m + j] = nrm;
            t.a[static_cast<std::size_t>(j) * m + i] = nrm;
        }
        if (need_b) {
            // (T_i T_j^*)(x, y) = sum_theta K_i conj(K_j) * wth, norm * wx
            const Range tr = intersect(P.col0, P.ncols, Q.col0, Q.ncols);
            std::vector<std::complex<double>> comp(
                static_cast<std::size_t>(P.nrows) * Q.nrows, {0.0, 0.0});
            for (int a = 0; a < P.nrows; ++a) {
                for (int c = 0; c < Q.nrows; ++c) {
                    std::complex<double> acc{0.0, 0.0};
                    for (int th = tr.lo; th < tr.hi; ++th) {
                        acc += P.at(a, th - P.col0) * std::conj(Q.at(c, th - Q.col0));
                    }
                    comp[static_cast<std::size_t>(a) * Q.nrows + c] = acc;
                }
            }
            const double nrm = sigma_max(comp.data(), P.nrows, Q.nrows, rel_tol) * wth * wx;
            t.b[static_cast<std::size_t>(i) * m + j] = nrm;
            t.b[static_cast<std::size_t>(j) * m + i] = nrm;
        }
    });

    // sup-sum reduction in fixed index order
    for (int i = 0; i < m; ++i) {
        double sa = 0.0, sb = 0.0;
        for (int j = 0; j < m; ++j) {
            sa += std::sqrt(t.a_at(i, j));
            sb += std::sqrt(t.b_at(i, j));
        }
        t.A = std::max(t.A, sa);
        t.B = std::max(t.B, sb);
        t.max_piece_norm = std::max(t.max_piece_norm, std::sqrt(t.a_at(i, i)));
    }
    return t;
}

double cotlar_bound(const GramTables& tables) { return std::sqrt(tables.A * tables.B); }

BlockFamily block_decompose(const DiscretizedOperator& op, const SignPattern& sigma,
                            const SignPattern& varsigma, std::size_t max_blocks) {
    if (op.dim() != 1) throw PreconditionError("block decomposition supports n = 1 grids");
    if (op.spec().loc.kind != LocKind::shell) {
        throw PreconditionError("block decomposition needs a shell-localized spec");
    }
    if (sigma.side != Side::right || varsigma.side != Side::left) {
        throw PreconditionError("sigma must be a right pattern, varsigma a left pattern");
    }
    const double hbar = op.spec().loc.hbar;
    const PhaseModel& model = op.spec().model;
    const int nr = op.rows();
    const int nc = op.cols();

    // Sign-restricted kernel, evaluated once per grid point.
    std::vector<std::complex<double>> base(static_cast<std::size_t>(nr) * nc);
    parallel_for_chunked(static_cast<std::size_t>(nr), 8, [&](std::size_t bgn, std::size_t end) {
        for (std::size_t i = bgn; i < end; ++i) {
            for (int j = 0; j < nc; ++j) {
                std::complex<double> v = op.kernel(static_cast<int>(i), j);
                if (v != std::complex<double>{0.0, 0.0} &&
                    (!sigma.signs.empty() || !varsigma.signs.empty())) {
                    const Point p = op.point(static_cast<int>(i), j);
                    v *= sign_weight(model, p, hbar, sigma) * sign_weight(model, p, hbar, varsigma);
                }
                base[i * nc + j] = v;
            }
        }
    });

    // 1-d window factors: right windows in x, left windows in theta.
    const Box& box = model.domain();
    const auto [x_lo, x_hi] = window_index_range(box.x[0].lo, box.x[0].hi, hbar);
    const auto [t_lo, t_hi] = window_index_range(box.theta[0].lo, box.theta[0].hi, hbar);

    auto window_profile = [&](int idx, bool is_x) {
        std::vector<double> w(static_cast<std::size_t>(is_x ? nr : nc));
        for (std::size_t g = 0; g < w.size(); ++g) {
            const double t = is_x ? op.x_coord(static_cast<int>(g))[0]
                                  : op.theta_coord(static_cast<int>(g))[0];
            w[g] = window_fn(t / hbar - idx);
        }
        return w;
    };

    BlockFamily fam;
    fam.hbar = hbar;
    fam.sigma = sigma;
    fam.varsigma = varsigma;
    fam.x_index_min = x_hi;
    fam.x_index_max = x_lo;

    for (int X = x_lo; X <= x_hi; ++X) {
        const auto wx_prof = window_profile(X, true);
        int i0 = nr, i1 = 0;
        for (int i = 0; i < nr; ++i) {
            if (wx_prof[static_cast<std::size_t>(i)] != 0.0) {
                i0 = std::min(i0, i);
                i1 = std::max(i1, i + 1);
            }
        }
        if (i0 >= i1) continue;
        for (int Th = t_lo; Th <= t_hi; ++Th) {
            const auto wt_prof = window_profile(Th, false);
            int j0 = nc, j1 = 0;
            for (int j = 0; j < nc; ++j) {
                if (wt_prof[static_cast<std::size_t>(j)] != 0.0) {
                    j0 = std::min(j0, j);
                    j1 = std::max(j1, j + 1);
                }
            }
            if (j0 >= j1) continue;
            PieceOperator piece;
            piece.row0 = i0;
            piece.col0 = j0;
            piece.nrows = i1 - i0;
            piece.ncols = j1 - j0;
            piece.wx = op.weight_x();
            piece.wth = op.weight_theta();
            piece.index.idx = {X, Th};
            piece.k.resize(static_cast<std::size_t>(piece.nrows) * piece.ncols);
            bool nonzero = false;
            for (int i = i0; i < i1; ++i) {
                for (int j = j0; j < j1; ++j) {
                    const std::complex<double> v = base[static_cast<std::size_t>(i) * nc + j] *
                                                   wx_prof[static_cast<std::size_t>(i)] *
                                                   wt_prof[static_cast<std::size_t>(j)];
                    piece.k[static_cast<std::size_t>(i - i0) * piece.ncols + (j - j0)] = v;
                    if (v != std::complex<double>{0.0, 0.0}) nonzero = true;
                }
            }
            if (!nonzero) continue;
            fam.x_index_min = std::min(fam.x_index_min, X);
            fam.x_index_max = std::max(fam.x_index_max, X);
            fam.pieces.push_back(std::move(piece));
            if (fam.pieces.size() > max_blocks) {
                std::ostringstream msg;
                msg << "block decomposition produced more than " << max_blocks
                    << " active blocks at hbar = " << hbar;
                throw BudgetError(msg.str());
            }
        }
    }
    return fam;
}

OrthoProfile orthogonality_profile(const OperatorSpec& spec, double hbar, int l, int r,
                                   const ProfileOptions& opts) {
    if (spec.model.dim() != 1) throw PreconditionError("profiles support n = 1 models");
    if (l < 1 || r < 1) throw PreconditionError("types must be >= 1");
    OperatorSpec shell = spec;
    shell.loc = Localization::shell(hbar, spec.loc.kind == LocKind::shell ? spec.loc.sign : +1);
    const DiscretizedOperator op = discretize(shell, opts.points_per_wavelength, opts.budget);

    OrthoProfile prof;
    prof.lambda = shell.lambda;
    prof.hbar = hbar;
    prof.l = l;
    prof.r = r;

    std::vector<PieceOperator> everything;
    int xmin = 1 << 30, xmax = -(1 << 30);
    for (const SignPattern& sg : all_sign_patterns(Side::right, r)) {
        for (const SignPattern& vs : all_sign_patterns(Side::left, l)) {
            BlockFamily fam = block_decompose(op, sg, vs, opts.max_blocks);
            if (fam.pieces.empty()) continue;
            GramTables t = gram_tables(fam.pieces, opts.rel_tol);
            prof.A = std::max(prof.A, t.A);
            prof.B = std::max(prof.B, t.B);
            prof.max_piece_norm = std::max(prof.max_piece_norm, t.max_piece_norm);
            xmin = std::min(xmin, fam.x_index_min);
            xmax = std::max(xmax, fam.x_index_max);
            prof.piece_count += static_cast<int>(fam.pieces.size());
            for (auto& p : fam.pieces) everything.push_back(std::move(p));
        }
    }
    prof.bound = std::sqrt(prof.A * prof.B);
    prof.xn_span = everything.empty() ? 0 : xmax - xmin;
    if (!everything.empty()) {
        PieceOperator sum = assemble_pieces(everything, op.rows(), op.cols());
        prof.sum_norm = piece_l2_norm(sum, opts.rel_tol);
    }
    prof.shell_norm = l2_norm(op, opts.rel_tol);
    const int n = spec.model.dim();
    prof.tau = std::sqrt(std::min(std::pow(shell.lambda, -n) / hbar,
                                  std::pow(shell.lambda, -n + 1) * hbar * hbar));
    prof.pred_const = 1.0;
    prof.pred_overlap = 1.0 / (shell.lambda * hbar * hbar * hbar);
    prof.pred_type = std::pow(hbar, -1.0 + 1.0 / r);
    return prof;
}

}  // namespace oscint
