// Command line front end for the oscillatory-integral laboratory.
//
// Exit codes: 0 = all configured targets passed, 1 = a target failed,
// 2 = usage, config or resource error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oscint/bounds.hpp"
#include "oscint/config.hpp"
#include "oscint/cotlar.hpp"
#include "oscint/lab.hpp"
#include "oscint/sublevel.hpp"

namespace {

using namespace oscint;

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const RunConfig cfg = load_config(config_path);
    const RunOutcome outcome = run_experiments(cfg, out_dir);
    for (const auto& f : outcome.fits) {
        std::printf("%-24s %-6s slope=%+.4f (target %+.4f +- %.3f) r2=%.4f %s\n",
                    f.experiment.c_str(), f.norm_kind.c_str(), f.slope, f.target, f.tol, f.r2,
                    f.pass ? "pass" : "FAIL");
    }
    for (const auto& c : outcome.checks) {
        std::printf("%-32s measured=%.6g target=%.6g tol=%.2g %s\n", c.name.c_str(), c.measured,
                    c.target, c.tol, c.pass ? "pass" : "FAIL");
    }
    std::printf("results: %s\nsummary: %s\n", outcome.csv_path.c_str(),
                outcome.summary_path.c_str());
    return outcome.pass() ? 0 : 1;
}

int cmd_bounds(int n, int l, int r, double lambda, double hbar, bool table) {
    if (table) {
        std::printf("regimes for n=%d, l=%d, r=%d (hbar ranges as powers of lambda):\n", n, l, r);
        for (const RegimeRow& row : regime_table(n, l, r)) {
            std::printf("  %-18s hbar in [lambda^-%s, lambda^-%s]  bound = lambda^%s * hbar^%s\n",
                        regime_name(row.regime).c_str(), row.q_max.str().c_str(),
                        row.q_min.str().c_str(), row.lambda_exp.str().c_str(),
                        row.hbar_exp.str().c_str());
        }
        if (l >= 1 && r >= 1) {
            std::printf("decay loss: %s (optimal profile %s)\n", decay_loss(l, r).str().c_str(),
                        decay_loss_optimal(l, r).str().c_str());
            const LpRange lp = one_sided_fold_lp_range(r);
            std::printf("nondegenerate Lp range (fold on the left): p < %s or p > %s, "
                        "interpolation exponent %s%s\n",
                        lp.p_low_end.str().c_str(), lp.p_high_end.str().c_str(),
                        lp.interp_exponent.str().c_str(),
                        lp.weak_endpoints ? " (log factor at the endpoints)" : "");
        }
    }
    if (lambda > 0.0 && hbar > 0.0) {
        const RegimeBound rb = shell_l2_bound(n, l, r, lambda, hbar);
        std::printf("shell L2 bound at lambda=%g, hbar=%g: %.6e  [%s, lambda^%s hbar^%s]\n",
                    lambda, hbar, rb.value, regime_name(rb.regime).c_str(),
                    rb.lambda_exp.str().c_str(), rb.hbar_exp.str().c_str());
        const auto [b1, binf] = shell_l1_linf_bound(l, r, hbar);
        std::printf("shell L1/Linf bound shapes: %.6e / %.6e\n", b1, binf);
    }
    return 0;
}

int cmd_sublevel(const std::string& coeffs_csv, int r, double hbar, double lo, double hi) {
    std::vector<double> coeffs;
    std::stringstream ss(coeffs_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) coeffs.push_back(std::stod(tok));
    if (coeffs.empty()) throw ConfigError("--coeffs needs at least one coefficient");
    const Poly1 poly(coeffs);
    const Interval I{lo, hi};
    const double kappa = certify_kappa(poly.fn(), I, r);
    if (kappa <= 0.0) {
        std::printf("|h^(%d)| could not be certified positive on [%g, %g]\n", r, lo, hi);
        return 1;
    }
    std::printf("certified kappa = %.6g on [%g, %g]\n", kappa, lo, hi);
    const SublevelResult res = sublevel_set(poly.fn(), I, hbar, r, kappa);
    const double bound = sublevel_bound(r, kappa, hbar);
    std::printf("{|h| < %g} splits into %zu interval(s), per-interval bound %.6g:\n", hbar,
                res.pieces.size(), bound);
    for (const auto& piece : res.pieces) {
        std::printf("  [%.12g, %.12g]  length %.6g  signs(", piece.interval.lo, piece.interval.hi,
                    piece.interval.length());
        for (int s : piece.signs) std::printf("%c", s > 0 ? '+' : '-');
        std::printf(")\n");
    }
    const double oracle = sublevel_measure_oracle(poly.fn(), I, hbar, 100000);
    std::printf("measure %.8g, dense-sampling oracle %.8g\n", res.measure(), oracle);
    const bool ok = res.max_length() <= bound &&
                    static_cast<int>(res.pieces.size()) <= (1 << (r - 1));
    std::printf("piece-count and length bounds: %s\n", ok ? "pass" : "FAIL");
    return ok ? 0 : 1;
}

int cmd_cotlar(const std::string& model_name, int l, int r, double lambda, double hbar,
               double ppw) {
    const PhaseModel model = PhaseModel::by_name(model_name, l, r, 1);
    OperatorSpec spec{model, lambda, Localization::shell(hbar, +1), false};
    ProfileOptions opts;
    opts.points_per_wavelength = ppw;
    const OrthoProfile prof = orthogonality_profile(spec, hbar, std::max(1, l), std::max(1, r), opts);
    std::printf("lambda=%g hbar=%g pieces=%d xn_span=%d\n", prof.lambda, prof.hbar,
                prof.piece_count, prof.xn_span);
    std::printf("A=%.6g B=%.6g sqrt(AB)=%.6g\n", prof.A, prof.B, prof.bound);
    std::printf("sum norm=%.6g shell norm=%.6g max piece=%.6g tau=%.6g\n", prof.sum_norm,
                prof.shell_norm, prof.max_piece_norm, prof.tau);
    std::printf("A predictions: const=%.6g overlap=%.6g type=%.6g\n", prof.pred_const,
                prof.pred_overlap, prof.pred_type);
    const bool ok = prof.bound >= prof.sum_norm - 1e-8;
    std::printf("dominance sqrt(AB) >= ||sum||: %s\n", ok ? "pass" : "FAIL");
    return ok ? 0 : 1;
}

int cmd_norm(const std::string& model_name, int l, int r, int n, double lambda,
             const std::string& loc, double hbar, const std::string& kind, bool damped,
             double ppw) {
    const PhaseModel model = PhaseModel::by_name(model_name, l, r, n);
    Localization L = Localization::full();
    if (loc == "shell+") L = Localization::shell(hbar, +1);
    else if (loc == "shell-") L = Localization::shell(hbar, -1);
    else if (loc == "bar") L = Localization::bar(hbar);
    else if (loc != "full") throw ConfigError("--loc must be full, shell+, shell- or bar");
    OperatorSpec spec{model, lambda, L, damped};
    const DiscretizedOperator op = discretize(spec, ppw);
    double value = 0.0;
    if (kind == "l2") value = l2_norm(op);
    else if (kind == "l1") value = l1_norm(op);
    else if (kind == "linf") value = linf_norm(op);
    else if (kind == "schur") value = schur_bound(op);
    else throw ConfigError("--norm must be l1, l2, linf or schur");
    std::printf("%s norm of %s (n=%d, lambda=%g, loc=%s%s) on a %dx%d grid: %.10g\n",
                kind.c_str(), model_name.c_str(), n, lambda, loc.c_str(),
                damped ? ", damped" : "", op.rows(), op.cols(), value);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oscint: numerical laboratory for oscillatory integral operator norm decay"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run configured experiments and write CSV/JSON results");
    std::string config_path, out_dir;
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides config 'output')");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "closed-form exponent tables and bound values");
    int b_n = 1, b_l = 1, b_r = 1;
    double b_lambda = 0.0, b_hbar = 0.0;
    bool b_table = false;
    bounds->add_option("--n", b_n, "dimension (1 or 2)")->default_val(1);
    bounds->add_option("--l", b_l, "left type")->required();
    bounds->add_option("--r", b_r, "right type")->required();
    bounds->add_option("--lambda", b_lambda, "evaluate the shell L2 bound at this lambda");
    bounds->add_option("--hbar", b_hbar, "evaluate the shell L2 bound at this hbar");
    bounds->add_flag("--table", b_table, "print the regime table");

    // sublevel
    auto* sub = app.add_subcommand("sublevel", "sublevel-set decomposition of a polynomial");
    std::string s_coeffs;
    int s_r = 1;
    double s_hbar = 0.125, s_lo = -1.0, s_hi = 1.0;
    sub->add_option("--coeffs", s_coeffs, "comma-separated coefficients, constant first")
        ->required();
    sub->add_option("--r", s_r, "derivative order with a certified lower bound")->required();
    sub->add_option("--hbar", s_hbar, "sublevel height")->default_val(0.125);
    sub->add_option("--lo", s_lo, "interval left end")->default_val(-1.0);
    sub->add_option("--hi", s_hi, "interval right end")->default_val(1.0);

    // cotlar
    auto* cot = app.add_subcommand("cotlar", "orthogonality profile of a shell decomposition");
    std::string c_model = "fold2";
    int c_l = 1, c_r = 1;
    double c_lambda = 64.0, c_hbar = 0.125, c_ppw = 8.0;
    cot->add_option("--model", c_model, "gallery model name")->default_val("fold2");
    cot->add_option("--l", c_l, "left type")->default_val(1);
    cot->add_option("--r", c_r, "right type")->default_val(1);
    cot->add_option("--lambda", c_lambda, "frequency parameter")->default_val(64.0);
    cot->add_option("--hbar", c_hbar, "shell height")->default_val(0.125);
    cot->add_option("--ppw", c_ppw, "points per wavelength")->default_val(8.0);

    // norm
    auto* nrm = app.add_subcommand("norm", "measure one operator norm");
    std::string n_model = "fold2", n_loc = "full", n_kind = "l2";
    int n_l = 1, n_r = 1, n_n = 1;
    double n_lambda = 64.0, n_hbar = 0.25, n_ppw = 8.0;
    bool n_damped = false;
    nrm->add_option("--model", n_model, "gallery model name")->default_val("fold2");
    nrm->add_option("--l", n_l, "left type parameter")->default_val(1);
    nrm->add_option("--r", n_r, "right type parameter")->default_val(1);
    nrm->add_option("--n", n_n, "dimension (1 or 2)")->default_val(1);
    nrm->add_option("--lambda", n_lambda, "frequency parameter")->default_val(64.0);
    nrm->add_option("--loc", n_loc, "localization: full, shell+, shell-, bar")->default_val("full");
    nrm->add_option("--hbar", n_hbar, "localization height")->default_val(0.25);
    nrm->add_option("--norm", n_kind, "norm kind: l1, l2, linf, schur")->default_val("l2");
    nrm->add_flag("--damped", n_damped, "multiply the amplitude by h");
    nrm->add_option("--ppw", n_ppw, "points per wavelength")->default_val(8.0);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir);
        if (bounds->parsed()) return cmd_bounds(b_n, b_l, b_r, b_lambda, b_hbar, b_table);
        if (sub->parsed()) return cmd_sublevel(s_coeffs, s_r, s_hbar, s_lo, s_hi);
        if (cot->parsed()) return cmd_cotlar(c_model, c_l, c_r, c_lambda, c_hbar, c_ppw);
        if (nrm->parsed())
            return cmd_norm(n_model, n_l, n_r, n_n, n_lambda, n_loc, n_hbar, n_kind, n_damped,
                            n_ppw);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ResolutionError& e) {
        std::cerr << "resolution error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
