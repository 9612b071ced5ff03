#include "wpcn/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace wpcn {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kTauMin = 1e-12;     // s, hard interior floor on time variables
constexpr double kReportZero = 1e-9;  // s, smaller time values reported as 0

struct LinTerm {
    int idx;
    double coef;
};

// One inequality g(x) <= 0: a linear part plus an optional concave
// perspective-rate part, g(x) = lin'x + const - rate_scale * tau * log1p(c*a/tau).
struct Ineq {
    std::vector<LinTerm> lin;
    double constant = 0.0;
    int tau_idx = -1;
    int a_idx = -1;
    double c = 0.0;
    double rate_scale = 0.0;
    bool domain_hard = false;  // defines the barrier domain; exempt from phase-1 slack

    double value(const VectorXd& x) const {
        double v = constant;
        for (const auto& t : lin) v += t.coef * x[t.idx];
        if (rate_scale != 0.0) {
            const double tau = x[tau_idx];
            v -= rate_scale * tau * std::log1p(c * x[a_idx] / tau);
        }
        return v;
    }

    void gradient(const VectorXd& x, std::vector<LinTerm>& out) const {
        out = lin;
        if (rate_scale != 0.0) {
            const double tau = x[tau_idx];
            const double cu = c * x[a_idx] / tau;
            const double den = 1.0 + cu;
            out.push_back({tau_idx, -rate_scale * (std::log1p(cu) - cu / den)});
            out.push_back({a_idx, -rate_scale * c / den});
        }
    }
};

struct Program {
    int n = 0;
    VectorXd cost;
    std::vector<Ineq> cons;
    MatrixXd aeq;  // p x n
    VectorXd beq;
};

bool strictly_feasible(const Program& pr, const VectorXd& x) {
    for (const auto& g : pr.cons)
        if (!(g.value(x) < 0.0)) return false;
    return true;
}

double barrier_value(const Program& pr, double t, const VectorXd& x) {
    double f = t * pr.cost.dot(x);
    for (const auto& g : pr.cons) {
        const double v = g.value(x);
        if (!(v < 0.0)) return std::numeric_limits<double>::infinity();
        f -= std::log(-v);
    }
    return f;
}

struct CenterResult {
    bool converged = false;
    double decrement = 0.0;  // last Newton decrement lambda^2 / 2
    VectorXd nu;
};

// Newton centering of t*cost'x + barrier subject to aeq x = beq, starting from
// a strictly feasible x on the equality manifold.
CenterResult center(const Program& pr, double t, VectorXd& x) {
    const int n = pr.n;
    const int p = static_cast<int>(pr.aeq.rows());
    VectorXd grad(n);
    MatrixXd hess(n, n);
    MatrixXd kkt(n + p, n + p);
    VectorXd rhs(n + p);
    std::vector<LinTerm> gbuf;
    CenterResult res;
    res.nu = VectorXd::Zero(p);
    for (int step = 0; step < 120; ++step) {
        grad = t * pr.cost;
        hess.setZero();
        for (const auto& g : pr.cons) {
            const double v = g.value(x);
            const double inv = 1.0 / (-v);
            g.gradient(x, gbuf);
            for (const auto& a : gbuf) grad[a.idx] += inv * a.coef;
            for (const auto& a : gbuf)
                for (const auto& b : gbuf) hess(a.idx, b.idx) += inv * inv * a.coef * b.coef;
            if (g.rate_scale != 0.0) {
                const double tau = x[g.tau_idx];
                const double u = x[g.a_idx] / tau;
                const double den = 1.0 + g.c * u;
                const double s = inv * g.rate_scale * g.c * g.c / (tau * den * den);
                hess(g.tau_idx, g.tau_idx) += s * u * u;
                hess(g.tau_idx, g.a_idx) -= s * u;
                hess(g.a_idx, g.tau_idx) -= s * u;
                hess(g.a_idx, g.a_idx) += s;
            }
        }
        for (int i = 0; i < n; ++i) hess(i, i) += 1e-11;
        kkt.setZero();
        kkt.topLeftCorner(n, n) = hess;
        if (p > 0) {
            kkt.topRightCorner(n, p) = pr.aeq.transpose();
            kkt.bottomLeftCorner(p, n) = pr.aeq;
        }
        rhs.head(n) = -grad;
        rhs.tail(p).setZero();
        const VectorXd sol = kkt.partialPivLu().solve(rhs);
        const VectorXd dx = sol.head(n);
        res.nu = sol.tail(p);
        const double lambda2 = std::max(0.0, dx.dot(hess * dx));
        res.decrement = 0.5 * lambda2;
        if (res.decrement <= 1e-8) {
            res.converged = true;
            return res;
        }
        const double f0 = barrier_value(pr, t, x);
        const double slope = grad.dot(dx);
        double alpha = 1.0;
        int bt = 0;
        for (; bt < 50; ++bt) {
            if (barrier_value(pr, t, x + alpha * dx) <= f0 + 0.25 * alpha * slope) break;
            alpha *= 0.5;
        }
        if (bt >= 50) {
            // Progress limited by floating point near the boundary; accept the
            // point when the remaining decrement is already small.
            res.converged = res.decrement <= 1e-4;
            return res;
        }
        x += alpha * dx;
    }
    return res;
}

struct BarrierOut {
    VectorXd x;
    VectorXd nu;
    double t = 1.0;
    bool converged = false;
    double best_bound = -std::numeric_limits<double>::infinity();
};

// Outer barrier loop. Stops once m/t falls below
// gap_abs + gap_rel * |cost'x|, or when early_stop fires.
template <typename StopFn>
BarrierOut barrier_solve(const Program& pr, VectorXd x, double gap_abs, double gap_rel,
                         StopFn early_stop) {
    BarrierOut out;
    out.x = std::move(x);
    const double m = static_cast<double>(pr.cons.size());
    double t = 1.0;
    int stalls = 0;
    for (int outer = 0; outer < 80; ++outer) {
        const auto res = center(pr, t, out.x);
        out.nu = res.nu;
        out.t = t;
        if (res.converged) {
            out.best_bound =
                std::max(out.best_bound, pr.cost.dot(out.x) - m / t - 2.0 * res.decrement);
            stalls = 0;
        } else if (++stalls >= 3) {
            return out;
        }
        if (early_stop(out.x)) {
            out.converged = true;
            return out;
        }
        if (res.converged && m / t <= gap_abs + gap_rel * std::fabs(pr.cost.dot(out.x))) {
            out.converged = true;
            return out;
        }
        t *= 20.0;
    }
    return out;
}

// Drives the maximum slack over the non-domain constraints negative; returns a
// strictly feasible point or nullopt when the slack cannot go below zero.
std::optional<VectorXd> phase1(const Program& pr, const VectorXd& x0) {
    if (strictly_feasible(pr, x0)) return x0;
    Program p1;
    p1.n = pr.n + 1;
    const int si = pr.n;
    p1.cost = VectorXd::Zero(p1.n);
    p1.cost[si] = 1.0;
    p1.aeq.setZero(pr.aeq.rows(), p1.n);
    p1.aeq.leftCols(pr.n) = pr.aeq;
    p1.beq = pr.beq;
    p1.cons.reserve(pr.cons.size() + 1);
    for (const auto& g : pr.cons) {
        Ineq h = g;
        if (!g.domain_hard) h.lin.push_back({si, -1.0});
        p1.cons.push_back(std::move(h));
    }
    Ineq cap;  // keep the slack bounded below
    cap.lin = {{si, -1.0}};
    cap.constant = -2.0;
    p1.cons.push_back(cap);

    VectorXd x(p1.n);
    x.head(pr.n) = x0;
    double smax = 0.0;
    for (const auto& g : pr.cons)
        if (!g.domain_hard) smax = std::max(smax, g.value(x0));
    x[si] = smax + 1.0;

    const auto out =
        barrier_solve(p1, x, 1e-9, 0.0, [si](const VectorXd& y) { return y[si] < -1e-6; });
    VectorXd xf = out.x.head(pr.n);
    if (out.x[si] < 0.0 && strictly_feasible(pr, xf)) return xf;
    return std::nullopt;
}

struct BuiltProgram {
    Program pr;
    VectorXd x0;
    int n_time_vars = 0;
};

// Assembles the scaled program: times divided by tau_ub, energies by
// pmax*tau_ub, demands by their own magnitude. All constraints are O(1).
BuiltProgram build_program(const RelaxedModel& m) {
    const auto& p = m.params;
    const auto& ch = m.channels;
    const int n_src = p.num_sources;
    const int n_rel = p.num_relays;
    const double tub = m.tau_ub;
    const double pmax = p.max_ul_power;
    const double tau_min_s = kTauMin / tub;

    BuiltProgram bp;
    Program& pr = bp.pr;
    pr.n = m.n_vars;
    pr.cost = VectorXd::Zero(pr.n);
    VectorXd& x0 = bp.x0;
    x0 = VectorXd::Zero(pr.n);

    auto add_box = [&](int idx, bool time_var) {
        Ineq lo;  // x >= floor
        lo.lin = {{idx, -1.0}};
        lo.constant = time_var ? tau_min_s : 0.0;
        lo.domain_hard = true;
        pr.cons.push_back(lo);
        if (time_var) {
            Ineq hi;  // x <= 1 (scaled tau_ub)
            hi.lin = {{idx, 1.0}};
            hi.constant = -1.0;
            pr.cons.push_back(hi);
            ++bp.n_time_vars;
        }
    };

    pr.cost[m.idx_tau0] = 1.0;
    add_box(m.idx_tau0, true);
    x0[m.idx_tau0] = 0.5;

    for (int i = 0; i < n_src; ++i) {
        for (int j = 0; j <= n_rel; ++j) {
            if (m.idx_tau_sr[i][j] >= 0) {
                pr.cost[m.idx_tau_sr[i][j]] = 1.0;
                add_box(m.idx_tau_sr[i][j], true);
                x0[m.idx_tau_sr[i][j]] = 0.5;
            }
            if (m.idx_a_sr[i][j] >= 0) {
                add_box(m.idx_a_sr[i][j], false);
            }
            if (m.idx_b[i][j] >= 0) {
                add_box(m.idx_b[i][j], false);
                int present = 0;
                for (int jj = 0; jj <= n_rel; ++jj)
                    if (m.idx_b[i][jj] >= 0) ++present;
                x0[m.idx_b[i][j]] = 1.0 / present;
            }
        }
    }
    for (int j = 0; j < n_rel; ++j) {
        if (m.idx_tau_r[j] >= 0) {
            pr.cost[m.idx_tau_r[j]] = 1.0;
            add_box(m.idx_tau_r[j], true);
            x0[m.idx_tau_r[j]] = 0.5;
        }
        if (m.idx_a_r[j] >= 0) add_box(m.idx_a_r[j], false);
    }

    // Assignment rows for the free sources.
    const int p_eq = m.num_free_rows;
    pr.aeq.setZero(p_eq, pr.n);
    pr.beq = VectorXd::Ones(p_eq);
    {
        int row = 0;
        for (int i = 0; i < n_src; ++i) {
            if (m.fixed[i] >= 0) continue;
            for (int j = 0; j <= n_rel; ++j)
                if (m.idx_b[i][j] >= 0) pr.aeq(row, m.idx_b[i][j]) = 1.0;
            ++row;
        }
    }

    // Per-link constraints.
    for (int i = 0; i < n_src; ++i) {
        const double e_i = p.eh_efficiency_src[i] * p.ap_power_pa * ch.h_ap_src[i] / pmax;
        for (int j = 0; j <= n_rel; ++j) {
            const int it = m.idx_tau_sr[i][j];
            if (it < 0) continue;
            const int ia = m.idx_a_sr[i][j];
            const int ib = m.idx_b[i][j];
            const int iw = m.idx_w_sr[i][j];
            const double g_ul = (j == 0) ? ch.g_src_ap[i] : ch.g_src_rel[i][j - 1];

            // Harvested-energy cap: a <= e_i * tau0.
            Ineq en;
            en.lin = {{ia, 1.0}, {m.idx_tau0, -e_i}};
            pr.cons.push_back(en);

            if (iw >= 0) {
                // McCormick envelope of b * tau plus the power cap a <= w.
                Ineq w_lo1;
                w_lo1.lin = {{iw, -1.0}};
                pr.cons.push_back(w_lo1);
                Ineq w_lo2;
                w_lo2.lin = {{iw, -1.0}, {it, 1.0}, {ib, 1.0}};
                w_lo2.constant = -1.0;
                pr.cons.push_back(w_lo2);
                Ineq w_hi1;
                w_hi1.lin = {{iw, 1.0}, {ib, -1.0}};
                pr.cons.push_back(w_hi1);
                Ineq w_hi2;
                w_hi2.lin = {{iw, 1.0}, {it, -1.0}};
                pr.cons.push_back(w_hi2);
                Ineq pw;
                pw.lin = {{ia, 1.0}, {iw, -1.0}};
                pr.cons.push_back(pw);
            } else {
                // b fixed to 1: the envelope collapses to a <= tau.
                Ineq pw;
                pw.lin = {{ia, 1.0}, {it, -1.0}};
                pr.cons.push_back(pw);
            }

            // Demand: D*b <= delivered bits (perspective form), scaled by D.
            const double demand = p.demands_bits[i];
            if (demand > 0.0) {
                Ineq dm;
                if (ib >= 0)
                    dm.lin = {{ib, 1.0}};
                else
                    dm.constant = 1.0;
                dm.tau_idx = it;
                dm.a_idx = ia;
                dm.c = g_ul * pmax / (p.bandwidth_w * p.noise_psd_n0);
                dm.rate_scale = tub * p.bandwidth_w / (demand * std::log(2.0));
                pr.cons.push_back(dm);
            }
        }
    }

    // Per-relay constraints.
    double d_total = 0.0;
    for (double d : p.demands_bits) d_total += d;
    for (int j = 0; j < n_rel; ++j) {
        const int it = m.idx_tau_r[j];
        if (it < 0) continue;
        const int ia = m.idx_a_r[j];
        const int iw = m.idx_w_r[j];
        const double e_j = p.eh_efficiency_rel[j] * p.ap_power_pa * ch.h_ap_rel[j] / pmax;

        Ineq en;
        en.lin = {{ia, 1.0}, {m.idx_tau0, -e_j}};
        pr.cons.push_back(en);

        // First branch of the power-cap min: a <= tau.
        Ineq pw;
        pw.lin = {{ia, 1.0}, {it, -1.0}};
        pr.cons.push_back(pw);

        if (iw >= 0) {
            // Second branch via the envelope of (sum_i b[i][j]) * tau over
            // s in [0, F], tau in [0, 1], F = number of free rows.
            const double f_cnt = static_cast<double>(m.num_free_rows);
            Ineq w_lo1;
            w_lo1.lin = {{iw, -1.0}};
            pr.cons.push_back(w_lo1);
            Ineq w_lo2;
            w_lo2.lin = {{iw, -1.0}, {it, f_cnt}};
            w_lo2.constant = -f_cnt;
            for (int i = 0; i < n_src; ++i)
                if (m.idx_b[i][j + 1] >= 0) w_lo2.lin.push_back({m.idx_b[i][j + 1], 1.0});
            pr.cons.push_back(w_lo2);
            Ineq w_hi1;  // w <= s
            w_hi1.lin = {{iw, 1.0}};
            for (int i = 0; i < n_src; ++i)
                if (m.idx_b[i][j + 1] >= 0) w_hi1.lin.push_back({m.idx_b[i][j + 1], -1.0});
            pr.cons.push_back(w_hi1);
            Ineq w_hi2;  // w <= F * tau
            w_hi2.lin = {{iw, 1.0}, {it, -f_cnt}};
            pr.cons.push_back(w_hi2);
            Ineq pw2;
            pw2.lin = {{ia, 1.0}, {iw, -1.0}};
            pr.cons.push_back(pw2);
        }

        // Forwarding demand: sum of routed bits <= delivered bits.
        if (d_total > 0.0) {
            Ineq dm;
            dm.constant = m.relay_fixed_demand[j] / d_total;
            for (int i = 0; i < n_src; ++i)
                if (m.idx_b[i][j + 1] >= 0 && p.demands_bits[i] > 0.0)
                    dm.lin.push_back({m.idx_b[i][j + 1], p.demands_bits[i] / d_total});
            dm.tau_idx = it;
            dm.a_idx = ia;
            dm.c = ch.g_rel_ap[j] * pmax / (p.bandwidth_w * p.noise_psd_n0);
            dm.rate_scale = tub * p.bandwidth_w / (d_total * std::log(2.0));
            pr.cons.push_back(dm);
        }
    }

    // Remaining start values: envelopes at midpoints, energies inside every cap.
    for (int i = 0; i < n_src; ++i) {
        const double e_i = p.eh_efficiency_src[i] * p.ap_power_pa * ch.h_ap_src[i] / pmax;
        for (int j = 0; j <= n_rel; ++j) {
            const int it = m.idx_tau_sr[i][j];
            if (it < 0) continue;
            const int iw = m.idx_w_sr[i][j];
            double cap = std::min(e_i * x0[m.idx_tau0], x0[it]);
            if (iw >= 0) {
                x0[iw] = 0.5 * x0[m.idx_b[i][j]];
                cap = std::min(cap, x0[iw]);
            }
            x0[m.idx_a_sr[i][j]] = 0.5 * cap;
        }
    }
    for (int j = 0; j < n_rel; ++j) {
        const int it = m.idx_tau_r[j];
        if (it < 0) continue;
        const double e_j = p.eh_efficiency_rel[j] * p.ap_power_pa * ch.h_ap_rel[j] / pmax;
        double cap = std::min(e_j * x0[m.idx_tau0], x0[it]);
        const int iw = m.idx_w_r[j];
        if (iw >= 0) {
            double s = 0.0;
            for (int i = 0; i < n_src; ++i)
                if (m.idx_b[i][j + 1] >= 0) s += x0[m.idx_b[i][j + 1]];
            x0[iw] = 0.5 * s;
            cap = std::min(cap, x0[iw]);
        }
        x0[m.idx_a_r[j]] = 0.5 * cap;
    }
    return bp;
}

double snap_time(double v) { return v < kReportZero ? 0.0 : v; }

}  // namespace

double perspective_rate(double tau_s, double a_j, double g_ul, double w_hz, double n0) {
    if (tau_s < 0.0 || a_j < 0.0) throw std::invalid_argument("perspective_rate: negative input");
    if (tau_s == 0.0) return 0.0;
    return tau_s * w_hz * std::log2(1.0 + (a_j / tau_s) * g_ul / (w_hz * n0));
}

RelaxedModel build_relaxation(const NetworkInstance& instance, const FixedAssignments& fixed,
                              double tau_ub) {
    instance.validate();
    const int n_src = instance.params.num_sources;
    const int n_rel = instance.params.num_relays;
    if (static_cast<int>(fixed.size()) != n_src)
        throw std::invalid_argument("build_relaxation: fixed mask size mismatch");
    for (int f : fixed)
        if (f < -1 || f > n_rel)
            throw std::invalid_argument("build_relaxation: fixed entry out of range");
    if (!(tau_ub > 0.0)) throw std::invalid_argument("build_relaxation: tau_ub must be positive");

    RelaxedModel m;
    m.params = instance.params;
    m.channels = instance.channels;
    m.fixed = fixed;
    m.tau_ub = tau_ub;
    // With no relays every source can only go direct; pin the rows.
    if (n_rel == 0)
        for (auto& f : m.fixed) f = 0;

    m.idx_b.assign(n_src, std::vector<int>(n_rel + 1, -1));
    m.idx_tau_sr.assign(n_src, std::vector<int>(n_rel + 1, -1));
    m.idx_a_sr.assign(n_src, std::vector<int>(n_rel + 1, -1));
    m.idx_w_sr.assign(n_src, std::vector<int>(n_rel + 1, -1));
    m.idx_tau_r.assign(n_rel, -1);
    m.idx_a_r.assign(n_rel, -1);
    m.idx_w_r.assign(n_rel, -1);
    m.relay_active.assign(n_rel, 0);
    m.relay_fixed_demand.assign(n_rel, 0.0);
    m.relay_fixed_count.assign(n_rel, 0);

    for (int i = 0; i < n_src; ++i) {
        if (m.fixed[i] < 0)
            ++m.num_free_rows;
        else if (m.fixed[i] >= 1) {
            ++m.relay_fixed_count[m.fixed[i] - 1];
            m.relay_fixed_demand[m.fixed[i] - 1] += m.params.demands_bits[i];
        }
    }

    // A route is usable inside the envelope box only if its power-capped slot
    // times fit under tau_ub; other selection columns are pruned (their b is
    // identically 0), which also keeps the barrier interior non-empty.
    const auto& pp = m.params;
    auto link_fits = [&](int i, int j) {
        if (pp.demands_bits[i] <= 0.0) return true;
        const double g_ul = j == 0 ? m.channels.g_src_ap[i] : m.channels.g_src_rel[i][j - 1];
        const double r_sr = link_rate(pp.max_ul_power, g_ul, pp.bandwidth_w, pp.noise_psd_n0);
        if (!(pp.demands_bits[i] <= r_sr * tau_ub * (1.0 - 1e-9))) return false;
        if (j >= 1) {
            const double r_f = link_rate(pp.max_ul_power, m.channels.g_rel_ap[j - 1],
                                         pp.bandwidth_w, pp.noise_psd_n0);
            if (!(pp.demands_bits[i] <= r_f * tau_ub * (1.0 - 1e-9))) return false;
        }
        return true;
    };

    // A free row left with a single usable column degenerates (b pinned to 1);
    // treat it as pinned so the barrier keeps a non-empty interior.
    for (int i = 0; i < n_src; ++i) {
        if (m.fixed[i] >= 0) {
            if (!link_fits(i, m.fixed[i])) m.trivially_infeasible = true;
            continue;
        }
        int count = 0, only = -1;
        for (int j = 0; j <= n_rel; ++j)
            if (link_fits(i, j)) {
                ++count;
                only = j;
            }
        if (count == 0)
            m.trivially_infeasible = true;
        else if (count == 1)
            m.fixed[i] = only;
    }
    // Re-derive the row bookkeeping after the conversions above.
    m.num_free_rows = 0;
    std::fill(m.relay_fixed_count.begin(), m.relay_fixed_count.end(), 0);
    std::fill(m.relay_fixed_demand.begin(), m.relay_fixed_demand.end(), 0.0);
    for (int i = 0; i < n_src; ++i) {
        if (m.fixed[i] < 0)
            ++m.num_free_rows;
        else if (m.fixed[i] >= 1) {
            ++m.relay_fixed_count[m.fixed[i] - 1];
            m.relay_fixed_demand[m.fixed[i] - 1] += m.params.demands_bits[i];
        }
    }

    int next = 0;
    m.idx_tau0 = next++;
    for (int i = 0; i < n_src; ++i) {
        if (m.fixed[i] >= 0) {
            const int j = m.fixed[i];
            m.idx_tau_sr[i][j] = next++;
            m.idx_a_sr[i][j] = next++;
        } else {
            for (int j = 0; j <= n_rel; ++j) {
                if (!link_fits(i, j)) continue;
                m.idx_b[i][j] = next++;
                m.idx_tau_sr[i][j] = next++;
                m.idx_a_sr[i][j] = next++;
                m.idx_w_sr[i][j] = next++;
            }
        }
    }
    for (int j = 0; j < n_rel; ++j) {
        bool reachable = m.relay_fixed_count[j] >= 1;
        for (int i = 0; i < n_src && !reachable; ++i) reachable = m.idx_b[i][j + 1] >= 0;
        if (!reachable) continue;
        m.relay_active[j] = 1;
        m.idx_tau_r[j] = next++;
        m.idx_a_r[j] = next++;
        // When no source is pinned to the relay its load can vanish, so the
        // second branch of the power-cap min needs an envelope variable.
        if (m.relay_fixed_count[j] == 0) m.idx_w_r[j] = next++;
    }
    m.n_vars = next;
    return m;
}

RelaxedSolution solve_relaxation(const RelaxedModel& model, double tol) {
    const int n_src = model.params.num_sources;
    const int n_rel = model.params.num_relays;
    const double tub = model.tau_ub;

    auto bp = build_program(model);
    RelaxedSolution sol;
    sol.b.assign(n_src, std::vector<double>(n_rel + 1, 0.0));
    sol.tau_sr.assign(n_src, std::vector<double>(n_rel + 1, 0.0));
    sol.a_sr.assign(n_src, std::vector<double>(n_rel + 1, 0.0));
    sol.tau_r.assign(n_rel, 0.0);
    sol.a_r.assign(n_rel, 0.0);
    for (int i = 0; i < n_src; ++i)
        if (model.fixed[i] >= 0) sol.b[i][model.fixed[i]] = 1.0;

    if (model.trivially_infeasible) {
        sol.status = RelaxStatus::Infeasible;
        sol.lower_bound = std::numeric_limits<double>::infinity();
        return sol;
    }

    const auto feas = phase1(bp.pr, bp.x0);
    if (!feas) {
        sol.status = RelaxStatus::Infeasible;
        sol.lower_bound = std::numeric_limits<double>::infinity();
        return sol;
    }

    const auto out =
        barrier_solve(bp.pr, *feas, 1e-3 * tol, tol, [](const VectorXd&) { return false; });
    const VectorXd& x = out.x;

    sol.status = out.converged ? RelaxStatus::Optimal : RelaxStatus::MaxIter;
    sol.objective = tub * bp.pr.cost.dot(x);
    sol.lower_bound =
        std::max(0.0, tub * out.best_bound - bp.n_time_vars * kTauMin);

    // Scaled stationarity residual with barrier-implied multipliers.
    {
        VectorXd r = bp.pr.cost;
        std::vector<LinTerm> gbuf;
        for (const auto& g : bp.pr.cons) {
            const double lambda = 1.0 / (out.t * (-g.value(x)));
            g.gradient(x, gbuf);
            for (const auto& a : gbuf) r[a.idx] += lambda * a.coef;
        }
        if (bp.pr.aeq.rows() > 0) r += bp.pr.aeq.transpose() * (out.nu / out.t);
        sol.kkt_residual = r.lpNorm<Eigen::Infinity>();
    }

    const double e_scale = model.params.max_ul_power * tub;
    sol.tau0 = snap_time(tub * x[model.idx_tau0]);
    for (int i = 0; i < n_src; ++i) {
        for (int j = 0; j <= n_rel; ++j) {
            if (model.idx_b[i][j] >= 0)
                sol.b[i][j] = std::clamp(x[model.idx_b[i][j]], 0.0, 1.0);
            if (model.idx_tau_sr[i][j] >= 0) {
                sol.tau_sr[i][j] = snap_time(tub * x[model.idx_tau_sr[i][j]]);
                sol.a_sr[i][j] = e_scale * x[model.idx_a_sr[i][j]];
            }
        }
    }
    for (int j = 0; j < n_rel; ++j) {
        if (model.idx_tau_r[j] < 0) continue;
        sol.tau_r[j] = snap_time(tub * x[model.idx_tau_r[j]]);
        sol.a_r[j] = e_scale * x[model.idx_a_r[j]];
    }
    return sol;
}

std::string dump_model(const RelaxedModel& model) {
    const auto bp = build_program(model);
    std::ostringstream os;
    os << "relaxed model: " << model.n_vars << " variables, " << bp.pr.cons.size()
       << " inequalities, " << bp.pr.aeq.rows() << " assignment rows, tau_ub=" << model.tau_ub
       << " s\n";
    std::vector<std::string> names(model.n_vars);
    names[model.idx_tau0] = "tau0";
    auto label = [&](const std::vector<std::vector<int>>& idx, const char* base) {
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx[i].size(); ++j)
                if (idx[i][j] >= 0)
                    names[idx[i][j]] =
                        std::string(base) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
    };
    label(model.idx_b, "b");
    label(model.idx_tau_sr, "tau_sr");
    label(model.idx_a_sr, "a_sr");
    label(model.idx_w_sr, "w_sr");
    for (std::size_t j = 0; j < model.idx_tau_r.size(); ++j) {
        if (model.idx_tau_r[j] >= 0) names[model.idx_tau_r[j]] = "tau_r[" + std::to_string(j) + "]";
        if (model.idx_a_r[j] >= 0) names[model.idx_a_r[j]] = "a_r[" + std::to_string(j) + "]";
        if (model.idx_w_r[j] >= 0) names[model.idx_w_r[j]] = "w_r[" + std::to_string(j) + "]";
    }
    os << "minimize";
    for (int i = 0; i < model.n_vars; ++i)
        if (bp.pr.cost[i] != 0.0) os << " + " << names[i];
    os << "\n";
    for (const auto& g : bp.pr.cons) {
        os << "  ";
        bool first = true;
        for (const auto& t : g.lin) {
            os << (first ? "" : " + ") << t.coef << "*" << names[t.idx];
            first = false;
        }
        if (g.constant != 0.0) os << (first ? "" : " + ") << g.constant;
        if (g.rate_scale != 0.0)
            os << " - " << g.rate_scale << "*" << names[g.tau_idx] << "*log1p(" << g.c << "*"
               << names[g.a_idx] << "/" << names[g.tau_idx] << ")";
        os << " <= 0" << (g.domain_hard ? "  [domain]" : "") << "\n";
    }
    for (int r = 0; r < bp.pr.aeq.rows(); ++r) {
        os << "  ";
        bool first = true;
        for (int i = 0; i < model.n_vars; ++i)
            if (bp.pr.aeq(r, i) != 0.0) {
                os << (first ? "" : " + ") << names[i];
                first = false;
            }
        os << " = 1\n";
    }
    return os.str();
}

}  // namespace wpcn
