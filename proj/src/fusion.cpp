#include "intrinsic/fusion.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace intrinsic {

namespace {

using Complex = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAlphaEps = 1e-9;

inline int slot_row(const PairOrderTable& t, size_t slot) {
    const size_t i = slot >> 1;
    return (slot & 1) ? t.nbhd.q[i] : t.nbhd.p[i];
}
inline int slot_other(const PairOrderTable& t, size_t slot) {
    const size_t i = slot >> 1;
    return (slot & 1) ? t.nbhd.p[i] : t.nbhd.q[i];
}
inline double slot_order(const PairOrderTable& t, size_t slot, int m) {
    const double o = t.order[m][slot >> 1];
    return (slot & 1) ? -o : o;
}
inline float slot_confidence(const PairOrderTable& t, size_t slot, int m) {
    return t.confidence[m][slot >> 1];
}

inline double slot_error(const FusionState& state, const PairOrderTable& t, size_t slot, int m) {
    const Complex zr = state.z[slot_row(t, slot)];
    const Complex zo = state.z[slot_other(t, slot)];
    return std::norm(zr - zo * std::polar(1.0, slot_order(t, slot, m)));
}

// --- complex vector helpers (serial loops keep reductions deterministic) ---

double cnorm2(const std::vector<Complex>& a) {
    double s = 0.0;
    for (const Complex& v : a) s += std::norm(v);
    return s;
}

Complex cdot(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    Complex s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

void caxpy(std::vector<Complex>& y, const Complex& alpha, const std::vector<Complex>& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void cscale(std::vector<Complex>& y, double s) {
    for (Complex& v : y) v *= s;
}

}  // namespace

FusionState initialize(const PairOrderTable& table, const CsfConfig& cfg) {
    const size_t pairs = table.pair_count();
    if (pairs == 0) throw EmptyGraph("no pairs in the order table");
    bool any_method = false;
    for (bool e : cfg.method_enabled) any_method = any_method || e;
    if (!any_method) throw InvalidSpec("at least one estimation method must stay enabled");

    FusionState state;
    state.pair_count = pairs;
    state.n_pixels = table.nbhd.width * table.nbhd.height;
    const size_t slots = pairs * 2;
    state.method.assign(slots, 0);
    state.weight.assign(slots, 1.0);
    state.sel_conf.assign(slots, 0.0f);
    state.degree.assign(state.n_pixels, 0.0);
    state.nu.assign(state.n_pixels, 0.0);
    state.lambda.assign(state.n_pixels, 2.0);
    state.alpha2 = cfg.alpha2_init;

    for (size_t i = 0; i < pairs; ++i) {
        int best = -1;
        float best_c = -1.0f;
        float max_c = 0.0f;
        for (int m = 0; m < kMethodCount; ++m) {
            if (!cfg.method_enabled[m]) continue;
            const float c = table.confidence[m][i];
            if (c > best_c) {
                best_c = c;
                best = m;
            }
            max_c = std::max(max_c, c);
        }
        state.method[2 * i] = state.method[2 * i + 1] = static_cast<uint8_t>(best);
        const float conf = cfg.equal_weight_mode ? 1.0f : best_c;
        state.sel_conf[2 * i] = state.sel_conf[2 * i + 1] = conf;
        const double deg = cfg.equal_weight_mode ? 1.0 : static_cast<double>(max_c);
        state.degree[table.nbhd.p[i]] += deg;
        state.degree[table.nbhd.q[i]] += deg;
    }

    // Row-incidence CSR over the directional slots.
    state.adj_offset.assign(state.n_pixels + 1, 0);
    for (size_t i = 0; i < pairs; ++i) {
        ++state.adj_offset[table.nbhd.p[i] + 1];
        ++state.adj_offset[table.nbhd.q[i] + 1];
    }
    for (int p = 0; p < state.n_pixels; ++p) state.adj_offset[p + 1] += state.adj_offset[p];
    state.adj_slot.assign(slots, 0);
    std::vector<int64_t> cursor(state.adj_offset.begin(), state.adj_offset.end() - 1);
    for (size_t i = 0; i < pairs; ++i) {
        state.adj_slot[cursor[table.nbhd.p[i]]++] = static_cast<int32_t>(2 * i);
        state.adj_slot[cursor[table.nbhd.q[i]]++] = static_cast<int32_t>(2 * i + 1);
    }
    return state;
}

namespace {

struct NormalizedOperator {
    // Active-pixel compaction and per-pair coefficients of
    // A = D^{-1/2} L D^{-1/2}; the diagonal of A is identically 1.
    std::vector<int32_t> active_index;  // per pixel, -1 when excluded
    std::vector<int32_t> pixels;        // active pixel per compact index
    std::vector<int32_t> ap, aq;        // compact endpoints per contributing pair
    std::vector<Complex> coef;          // off-diagonal magnitude, sign folded in

    void apply(const std::vector<Complex>& x, std::vector<Complex>& y) const {
        y = x;
        for (size_t i = 0; i < coef.size(); ++i) {
            y[ap[i]] -= coef[i] * x[aq[i]];
            y[aq[i]] -= std::conj(coef[i]) * x[ap[i]];
        }
    }
};

NormalizedOperator build_operator(const FusionState& state, const PairOrderTable& table) {
    NormalizedOperator op;
    op.active_index.assign(state.n_pixels, -1);
    for (int p = 0; p < state.n_pixels; ++p) {
        if (state.active(p)) {
            op.active_index[p] = static_cast<int32_t>(op.pixels.size());
            op.pixels.push_back(p);
        }
    }
    op.ap.reserve(state.pair_count);
    op.aq.reserve(state.pair_count);
    op.coef.reserve(state.pair_count);
    for (size_t i = 0; i < state.pair_count; ++i) {
        const int p = table.nbhd.p[i];
        const int q = table.nbhd.q[i];
        if (op.active_index[p] < 0 || op.active_index[q] < 0) continue;
        const size_t sf = 2 * i, sb = 2 * i + 1;
        const double cf = state.weight[sf] * state.sel_conf[sf];
        const double cb = state.weight[sb] * state.sel_conf[sb];
        if (cf == 0.0 && cb == 0.0) continue;
        // L_pq = -(C_pq e^{iO(p,q,M_pq)} + C_qp e^{iO(p,q,M_qp)}): both terms
        // carry the stored p<q order of their own selected method.
        Complex c(0.0, 0.0);
        if (cf != 0.0) c += cf * std::polar(1.0, table.order[state.method[sf]][i]);
        if (cb != 0.0) c += cb * std::polar(1.0, table.order[state.method[sb]][i]);
        c /= std::sqrt(state.degree[p] * state.degree[q]);
        op.ap.push_back(op.active_index[p]);
        op.aq.push_back(op.active_index[q]);
        op.coef.push_back(c);
    }
    return op;
}

}  // namespace

void solve_embedding(FusionState& state, const PairOrderTable& table, const CsfConfig& cfg) {
    const NormalizedOperator op = build_operator(state, table);
    const size_t n = op.pixels.size();
    if (n == 0) throw EmptyGraph("every pixel has zero degree");

    // Warm start: previous embedding, then the caller's angle hint, then flat.
    std::vector<Complex> x(n);
    if (state.z.size() == static_cast<size_t>(state.n_pixels)) {
        for (size_t a = 0; a < n; ++a)
            x[a] = state.z[op.pixels[a]] * std::sqrt(state.degree[op.pixels[a]]);
    } else if (state.initial_angle_hint.size() == static_cast<size_t>(state.n_pixels)) {
        for (size_t a = 0; a < n; ++a)
            x[a] = std::polar(std::sqrt(state.degree[op.pixels[a]]),
                              state.initial_angle_hint[op.pixels[a]]);
    } else {
        for (size_t a = 0; a < n; ++a) x[a] = std::sqrt(state.degree[op.pixels[a]]);
    }
    cscale(x, 1.0 / std::sqrt(cnorm2(x)));

    std::vector<Complex> ax(n), r(n), ar(n), d, ad, b2(n), ab2(n), b3, ab3, newx(n), newax(n);
    op.apply(x, ax);
    double lambda = std::real(cdot(x, ax));
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;

    // LOBPCG with a single vector: Rayleigh-Ritz over {x, residual, momentum}.
    for (; iterations < cfg.eig_max_iter; ++iterations) {
        r = ax;
        caxpy(r, -lambda, x);
        residual = std::sqrt(cnorm2(r));
        if (residual <= cfg.eig_tol) break;

        op.apply(r, ar);

        // Orthonormal basis: b1 = x, b2 from r, b3 from the momentum term.
        const Complex c_xr = cdot(x, r);
        b2 = r;
        caxpy(b2, -c_xr, x);
        const double n2 = std::sqrt(cnorm2(b2));
        if (n2 <= 1e-14 * residual) break;  // stagnated in the x direction
        cscale(b2, 1.0 / n2);
        ab2 = ar;
        caxpy(ab2, -c_xr, ax);
        cscale(ab2, 1.0 / n2);

        int k = 2;
        if (!d.empty()) {
            const Complex c_xd = cdot(x, d);
            const Complex c_2d = cdot(b2, d);
            b3 = d;
            caxpy(b3, -c_xd, x);
            caxpy(b3, -c_2d, b2);
            const double n3 = std::sqrt(cnorm2(b3));
            if (n3 > 1e-10 * std::sqrt(cnorm2(d))) {
                cscale(b3, 1.0 / n3);
                ab3 = ad;
                caxpy(ab3, -c_xd, ax);
                caxpy(ab3, -c_2d, ab2);
                cscale(ab3, 1.0 / n3);
                k = 3;
            }
        }

        Eigen::MatrixXcd h(k, k);
        const std::vector<Complex>* basis[3] = {&x, &b2, &b3};
        const std::vector<Complex>* abasis[3] = {&ax, &ab2, &ab3};
        for (int i = 0; i < k; ++i) {
            for (int j = i; j < k; ++j) {
                const Complex hij = cdot(*basis[i], *abasis[j]);
                h(i, j) = hij;
                h(j, i) = std::conj(hij);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        const Eigen::VectorXcd y = es.eigenvectors().col(0);

        std::fill(newx.begin(), newx.end(), Complex(0.0, 0.0));
        std::fill(newax.begin(), newax.end(), Complex(0.0, 0.0));
        for (int i = 0; i < k; ++i) {
            caxpy(newx, y[i], *basis[i]);
            caxpy(newax, y[i], *abasis[i]);
        }
        // Momentum: component of the step outside the previous iterate.
        d = newx;
        caxpy(d, -y[0], x);
        ad = newax;
        caxpy(ad, -y[0], ax);

        const double nn = std::sqrt(cnorm2(newx));
        x = newx;
        cscale(x, 1.0 / nn);
        ax = newax;
        cscale(ax, 1.0 / nn);
        lambda = std::real(cdot(x, ax));
    }

    if (residual > cfg.eig_tol) {
        // One final residual evaluation in case the cap landed mid-update.
        r = ax;
        caxpy(r, -lambda, x);
        residual = std::sqrt(cnorm2(r));
        if (residual > cfg.eig_tol)
            throw SolverDiverged("embedding residual " + std::to_string(residual) + " after " +
                                 std::to_string(iterations) + " iterations");
    }

    state.z.assign(state.n_pixels, Complex(1.0, 0.0));
    for (size_t a = 0; a < n; ++a) {
        const Complex za = x[a];
        const double mag = std::abs(za);
        state.z[op.pixels[a]] = mag > 0.0 ? za / mag : Complex(1.0, 0.0);
    }
    state.last_eig_iterations = iterations;
}

void choose_methods(FusionState& state, const PairOrderTable& table, const CsfConfig& cfg) {
    const size_t slots = state.pair_count * 2;
    for (int sweep = 0; sweep < cfg.choose_m_sweeps; ++sweep) {
        for (size_t s = 0; s < slots; ++s) {
            const int row = slot_row(table, s);
            if (!state.active(row)) continue;
            const double w = state.weight[s];
            const double nu_row = state.nu[row];
            int best = state.method[s];
            double best_obj = w * slot_confidence(table, s, best) *
                              (slot_error(state, table, s, best) - nu_row);
            for (int m = 0; m < kMethodCount; ++m) {
                if (!cfg.method_enabled[m] || m == best) continue;
                const double obj = w * slot_confidence(table, s, m) *
                                   (slot_error(state, table, s, m) - nu_row);
                if (obj < best_obj) {
                    best_obj = obj;
                    best = m;
                }
            }
            state.method[s] = static_cast<uint8_t>(best);
            state.sel_conf[s] = slot_confidence(table, s, best);
        }
        for (int p = 0; p < state.n_pixels; ++p) {
            if (!state.active(p)) continue;
            double mass = 0.0;
            for (int64_t a = state.adj_offset[p]; a < state.adj_offset[p + 1]; ++a) {
                const int32_t s = state.adj_slot[a];
                mass += state.weight[s] * state.sel_conf[s];
            }
            state.nu[p] += cfg.dual_step * (state.degree[p] - mass) / state.degree[p];
        }
    }
}

void update_weights(FusionState& state, const PairOrderTable& table, const CsfConfig& cfg) {
    const double alpha2 = state.alpha2;
    std::atomic<bool> diverged{false};
#ifdef _OPENMP
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
#endif
    for (int p = 0; p < state.n_pixels; ++p) {
        if (!state.active(p)) continue;
        const int64_t begin = state.adj_offset[p];
        const int64_t end = state.adj_offset[p + 1];
        const int m = static_cast<int>(end - begin);
        if (m == 0) continue;

        Eigen::VectorXd e(m), ct(m);
        for (int a = 0; a < m; ++a) {
            const int32_t s = state.adj_slot[begin + a];
            const double conf = state.sel_conf[s];
            ct[a] = conf;
            e[a] = conf * slot_error(state, table, s, state.method[s]);
        }
        const double d = state.degree[p];
        const double t_w = cfg.admm_weight_tol_scale * static_cast<double>(m);
        const double t_d = cfg.admm_degree_tol_scale * d;
        const double denom = alpha2 + 2.0 * cfg.rho;
        const double thresh = cfg.alpha1 / cfg.rho;
        // The dual step on the equality multiplier is capped at the loop's
        // stability bound; the cap binds only for very wide rows.
        const double ct2 = ct.squaredNorm();
        const double eta1 = std::min(cfg.eta1, denom / std::max(ct2, 1e-12));

        Eigen::VectorXd w = Eigen::VectorXd::Ones(m);
        Eigen::VectorXd xv = w, yv = w;
        Eigen::VectorXd u1 = Eigen::VectorXd::Ones(m), u2 = Eigen::VectorXd::Ones(m);
        double lambda = 2.0;
        double rw = 0.0, rd = 0.0;
        bool converged = false;
        for (int iter = 0; iter < cfg.admm_max_iter; ++iter) {
            w = (cfg.rho * (xv + yv - u1 - u2) - e + lambda * ct) / denom;
            for (int a = 0; a < m; ++a) {
                const double v = w[a] + u1[a];
                xv[a] = v > thresh ? v - thresh : (v < -thresh ? v + thresh : 0.0);
            }
            yv = (w + u2).cwiseMax(0.0);
            rd = d - ct.dot(w);
            lambda += eta1 * rd;
            u1 += cfg.eta2 * (w - xv);
            u2 += cfg.eta3 * (w - yv);
            rw = (w - xv).lpNorm<1>() + (w - yv).lpNorm<1>();
            if (rw < t_w && std::abs(rd) < t_d) {
                converged = true;
                break;
            }
        }
        if (!converged && (rw > 10.0 * t_w || std::abs(rd) > 10.0 * t_d)) diverged = true;

        // Consensus variable with exact zeros and exact nonnegativity.
        for (int a = 0; a < m; ++a)
            state.weight[state.adj_slot[begin + a]] = std::max(xv[a], 0.0);
        state.lambda[p] = lambda;
    }
    if (diverged)
        throw AdmmDiverged("weight subproblem residuals above 10x tolerance at the cap");
}

double embedding_energy(const FusionState& state, const PairOrderTable& table) {
    double energy = 0.0;
    const size_t slots = state.pair_count * 2;
    for (size_t s = 0; s < slots; ++s) {
        const double c = state.weight[s] * state.sel_conf[s];
        if (c == 0.0) continue;
        energy += c * slot_error(state, table, s, state.method[s]);
    }
    return energy;
}

namespace {

double weight_density(const FusionState& state) {
    size_t nonzero = 0;
    for (double w : state.weight)
        if (w > 0.0) ++nonzero;
    return static_cast<double>(nonzero) / static_cast<double>(state.weight.size());
}

FusionIterationStats collect_stats(const FusionState& state, const PairOrderTable& table,
                                   int iteration) {
    FusionIterationStats st;
    st.iteration = iteration;
    st.alpha2 = state.alpha2;
    st.energy = embedding_energy(state, table);
    st.weight_density = weight_density(state);
    st.eig_iterations = state.last_eig_iterations;
    for (uint8_t m : state.method) ++st.method_histogram[m];
    return st;
}

}  // namespace

FusionState run_csf(const PairOrderTable& table, const CsfConfig& cfg,
                    const std::vector<double>* initial_angle_hint) {
    FusionState state = initialize(table, cfg);
    if (initial_angle_hint) state.initial_angle_hint = *initial_angle_hint;

    if (cfg.equal_weight_mode) {
        solve_embedding(state, table, cfg);
        state.iterations.push_back(collect_stats(state, table, 0));
        return state;
    }

    int iteration = 0;
    while (state.alpha2 > kAlphaEps) {
        solve_embedding(state, table, cfg);
        choose_methods(state, table, cfg);
        state.alpha2 -= cfg.tau;
        if (state.alpha2 > kAlphaEps) update_weights(state, table, cfg);
        state.iterations.push_back(collect_stats(state, table, iteration++));
        if (state.iterations.back().weight_density < cfg.omega_min) break;
    }
    return state;
}

std::vector<double> decode_angles(const std::vector<Complex>& z, double scale, int bins,
                                  const std::vector<uint8_t>* valid) {
    if (z.empty()) throw EmptyGraph("nothing to decode");
    if (bins < 2) throw InvalidSpec("histogram needs at least two bins");
    if (!(scale > 0.0)) throw InvalidSpec("scale must be positive");
    const size_t n = z.size();
    const auto is_valid = [&](size_t p) { return !valid || (*valid)[p] != 0; };

    std::vector<double> angle(n, 0.0);
    std::vector<uint8_t> occupied(bins, 0);
    const double bin_width = kTwoPi / bins;
    size_t valid_count = 0;
    int first_occupied = -1;
    for (size_t p = 0; p < n; ++p) {
        if (!is_valid(p)) continue;
        double a = std::arg(z[p]);
        if (a < 0.0) a += kTwoPi;
        if (a >= kTwoPi) a = 0.0;
        angle[p] = a;
        const int bin = std::min(bins - 1, static_cast<int>(a / bin_width));
        occupied[bin] = 1;
        if (first_occupied < 0 || bin < first_occupied) first_occupied = bin;
        ++valid_count;
    }
    if (valid_count == 0) throw EmptyGraph("no valid pixels to decode");

    // Longest circular run of empty bins, scanned from the first occupied bin.
    int best_len = 0, best_start = -1;
    int run_len = 0, run_start = -1;
    for (int off = 1; off <= bins; ++off) {
        const int bin = (first_occupied + off) % bins;
        if (!occupied[bin]) {
            if (run_len == 0) run_start = bin;
            ++run_len;
        } else {
            if (run_len > best_len) {
                best_len = run_len;
                best_start = run_start;
            }
            run_len = 0;
        }
    }
    if (best_len == 0) throw NoGap("every angle histogram bin is occupied");

    // Pixels left of the gap wrap around by a full turn, then the darkest
    // pixel is anchored at zero.
    const int arc_start_bin = (best_start + best_len) % bins;
    const double threshold = arc_start_bin * bin_width;
    double min_angle = std::numeric_limits<double>::infinity();
    for (size_t p = 0; p < n; ++p) {
        if (!is_valid(p)) continue;
        if (angle[p] < threshold) angle[p] += kTwoPi;
        min_angle = std::min(min_angle, angle[p]);
    }

    std::vector<double> sb(n, 0.0);
    std::vector<double> decoded;
    decoded.reserve(valid_count);
    for (size_t p = 0; p < n; ++p) {
        if (!is_valid(p)) continue;
        sb[p] = (angle[p] - min_angle) / scale;
        decoded.push_back(sb[p]);
    }
    if (valid_count < n) {
        const double med = median_inplace(decoded);
        for (size_t p = 0; p < n; ++p)
            if (!is_valid(p)) sb[p] = med;
    }
    return sb;
}

}  // namespace intrinsic
