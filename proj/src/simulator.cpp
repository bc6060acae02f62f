#include "cdde/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cdde/error.hpp"
#include "cdde/stability.hpp"

namespace cdde {

namespace {

enum class Side { Left, Right };

// Jump times closer than this to a query are treated as the query itself.
constexpr double kSnapTolerance = 1e-10;
// y discontinuities smaller than this are not tracked.
constexpr double kJumpTolerance = 1e-13;
// Longest chain y(s) -> y(s - h2(s)) -> ... followed before falling back to
// interpolation of stored samples.
constexpr std::size_t kMaxChain = 4096;

// Method-of-steps solver.
//
// x is integrated with classical RK4 on the uniform grid. Every step is split
// at the instants where the delayed argument t - h1(t) crosses a known
// discontinuity of y, so each RK sub-step sees smooth data. Each node keeps
// one-sided derivatives, and x between nodes is the cubic Hermite
// interpolant.
//
// y is never interpolated: y(s) is evaluated from the difference relation
// y(s) = C x(s) + D y(s - h2(s)) + d(s), following the chain of delayed
// arguments back into the initial history. When h2(s) falls below the step,
// the chain ends in the algebraic branch (I - D) y = C x + d.
//
// Discontinuities of y start at t = 0 (history vs. difference relation) and
// propagate to the instants where t - h2(t) crosses an earlier one.
class DelaySolver {
public:
    explicit DelaySolver(const SimulationScenario& sc)
        : sc_(sc),
          A_(sc.spec.A),
          B_(sc.spec.B),
          C_(sc.spec.C),
          D_(sc.spec.D),
          n_(sc.spec.n()),
          m_(sc.spec.m()),
          h_(sc.step) {
        if (is_nonnegative(D_) && is_schur_nonneg(D_)) {
            algebraic_.emplace(Matrix::identity(m_) - D_);
        }
    }

    Trajectory run();

private:
    struct Stage {
        double t;
        const double* x;
    };

    // ---- signals ----
    double h1(double t) const noexcept { return sc_.h1.scalar(t); }
    double h2(double t) const noexcept { return sc_.h2.scalar(t); }
    double g1(double t) const noexcept { return t - h1(t); }
    double g2(double t) const noexcept { return t - h2(t); }

    static double slope(double (DelaySolver::*g)(double) const noexcept, const DelaySolver* self,
                        double t) noexcept {
        constexpr double eps = 1e-7;
        return (self->*g)(t + eps) - (self->*g)(t - eps);
    }

    // ---- history ----
    std::size_t node_count() const noexcept { return node_t_.size(); }
    const double* node_x(std::size_t i) const noexcept { return &node_x_[i * n_]; }
    const double* node_fl(std::size_t i) const noexcept { return &node_fl_[i * n_]; }
    const double* node_fr(std::size_t i) const noexcept { return &node_fr_[i * n_]; }

    void push_node(double t, const double* x, const double* fl, const double* fr) {
        node_t_.push_back(t);
        node_x_.insert(node_x_.end(), x, x + n_);
        node_fl_.insert(node_fl_.end(), fl, fl + n_);
        node_fr_.insert(node_fr_.end(), fr, fr + n_);
    }

    void x_at(double s, const Stage* stage, double* out) const;
    std::optional<double> snap(double s) const noexcept;
    void y_at(double s, Side side, const Stage* stage, double* out);
    void y_fallback(double s, double* out) const;
    void rhs(double t, const double* x, Side time_side, const Stage* stage, double* out);
    double crossing(double (DelaySolver::*g)(double) const noexcept, double lo, double hi,
                    double level) const noexcept;
    void register_y_jumps(double a, double b);

    const SimulationScenario& sc_;
    const Matrix& A_;
    const Matrix& B_;
    const Matrix& C_;
    const Matrix& D_;
    std::size_t n_;
    std::size_t m_;
    double h_;
    std::optional<LuFactorization> algebraic_;  // (I - D), present when D is Schur

    std::vector<double> node_t_;
    std::vector<double> node_x_;
    std::vector<double> node_fl_;
    std::vector<double> node_fr_;
    std::vector<double> jumps_;        // sorted
    std::vector<double> grid_y_;       // y at grid points computed so far
    std::size_t grid_count_ = 0;

    // scratch for y_at
    std::vector<double> chain_s_;
    std::vector<double> xs_;
    std::vector<double> ds_;
    std::vector<double> terminal_;
    std::vector<double> next_;
    std::vector<double> yd_;
};

void DelaySolver::x_at(double s, const Stage* stage, double* out) const {
    const std::size_t count = node_count();
    const double last = node_t_.back();
    if (s > last) {
        const double* xl = node_x(count - 1);
        if (stage && stage->t > last && s <= stage->t + 1e-14) {
            const double w = (s - last) / (stage->t - last);
            for (std::size_t i = 0; i < n_; ++i) out[i] = (1.0 - w) * xl[i] + w * stage->x[i];
        } else {
            const double* f = node_fr(count - 1);
            for (std::size_t i = 0; i < n_; ++i) out[i] = xl[i] + (s - last) * f[i];
        }
        return;
    }
    if (count == 1 || s <= node_t_.front()) {
        std::copy_n(node_x(0), n_, out);
        return;
    }
    auto it = std::upper_bound(node_t_.begin(), node_t_.end(), s);
    std::size_t i1 = std::min<std::size_t>(static_cast<std::size_t>(it - node_t_.begin()), count - 1);
    const std::size_t i0 = i1 - 1;
    const double t0 = node_t_[i0];
    const double dt = node_t_[i1] - t0;
    const double th = (s - t0) / dt;
    const double th2 = th * th;
    const double th3 = th2 * th;
    const double h00 = 2 * th3 - 3 * th2 + 1;
    const double h10 = (th3 - 2 * th2 + th) * dt;
    const double h01 = -2 * th3 + 3 * th2;
    const double h11 = (th3 - th2) * dt;
    const double* x0 = node_x(i0);
    const double* x1 = node_x(i1);
    const double* f0 = node_fr(i0);
    const double* f1 = node_fl(i1);
    for (std::size_t i = 0; i < n_; ++i) out[i] = h00 * x0[i] + h10 * f0[i] + h01 * x1[i] + h11 * f1[i];
}

std::optional<double> DelaySolver::snap(double s) const noexcept {
    if (jumps_.empty()) return std::nullopt;
    auto it = std::lower_bound(jumps_.begin(), jumps_.end(), s - kSnapTolerance);
    if (it != jumps_.end() && std::abs(*it - s) <= kSnapTolerance) return *it;
    return std::nullopt;
}

void DelaySolver::y_fallback(double s, double* out) const {
    const std::size_t last = grid_count_ - 1;
    const double pos = std::clamp(s / h_, 0.0, static_cast<double>(last));
    const auto j = std::min(static_cast<std::size_t>(pos), last);
    if (j == last) {
        std::copy_n(&grid_y_[last * m_], m_, out);
        return;
    }
    const double w = pos - static_cast<double>(j);
    for (std::size_t k = 0; k < m_; ++k)
        out[k] = (1.0 - w) * grid_y_[j * m_ + k] + w * grid_y_[(j + 1) * m_ + k];
}

void DelaySolver::y_at(double s, Side side, const Stage* stage, double* out) {
    chain_s_.clear();
    double cur = s;
    Side sd = side;
    std::vector<double>& terminal = terminal_;
    for (;;) {
        const auto jump = snap(cur);
        if (jump) {
            cur = *jump;
            if (cur == 0.0 && sd == Side::Left) {
                sc_.phi.evaluate(0.0, terminal);
                break;
            }
        }
        if (cur < 0.0) {
            sc_.phi.evaluate(cur, terminal);
            break;
        }
        const double delay = h2(cur);
        if (delay < h_) {
            // algebraic branch: (I - D) y = C x + d
            if (!algebraic_) {
                throw Error(ErrorCode::InvalidScenario, "zero-delay branch needs D to be Schur");
            }
            std::fill(terminal.begin(), terminal.end(), 0.0);
            x_at(cur, stage, xs_.data());
            gemv_accumulate(C_, xs_, terminal);
            sc_.d.evaluate(cur, ds_);
            for (std::size_t k = 0; k < m_; ++k) terminal[k] += ds_[k];
            algebraic_->solve_in_place(terminal);
            break;
        }
        if (chain_s_.size() >= kMaxChain) {
            y_fallback(cur, terminal.data());
            break;
        }
        chain_s_.push_back(cur);
        if (jump && slope(&DelaySolver::g2, this, cur) < 0.0) {
            sd = sd == Side::Left ? Side::Right : Side::Left;
        }
        cur -= delay;
    }

    // Fold the chain back: v <- C x(s_l) + D v + d(s_l).
    std::vector<double>& v = terminal_;
    for (std::size_t l = chain_s_.size(); l-- > 0;) {
        const double sl = chain_s_[l];
        x_at(sl, stage, xs_.data());
        sc_.d.evaluate(sl, next_);
        gemv_accumulate(C_, xs_, next_);
        gemv_accumulate(D_, v, next_);
        v.swap(next_);
    }
    std::copy_n(v.data(), m_, out);
}

void DelaySolver::rhs(double t, const double* x, Side time_side, const Stage* stage, double* out) {
    const double s = g1(t);
    Side side = Side::Right;
    if (snap(s)) {
        const bool rising = slope(&DelaySolver::g1, this, t) >= 0.0;
        side = (rising == (time_side == Side::Right)) ? Side::Right : Side::Left;
    }
    y_at(s, side, stage, yd_.data());
    sc_.omega.evaluate(t, std::span<double>(out, n_));
    gemv_accumulate(A_, std::span<const double>(x, n_), std::span<double>(out, n_));
    gemv_accumulate(B_, yd_, std::span<double>(out, n_));
}

double DelaySolver::crossing(double (DelaySolver::*g)(double) const noexcept, double lo, double hi,
                             double level) const noexcept {
    const bool rising = (this->*g)(lo) < level;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (((this->*g)(mid) < level) == rising) lo = mid;
        else hi = mid;
    }
    return hi;
}

void DelaySolver::register_y_jumps(double a, double b) {
    const double ga = g2(a);
    const double gb = g2(b);
    const double lo = std::min(ga, gb);
    const double hi = std::max(ga, gb);
    std::vector<double> found;
    for (double J : jumps_) {
        if (!(J > lo && J <= hi) || ga == gb) continue;
        const double tc = crossing(&DelaySolver::g2, a, b, J);
        if (h2(tc) < h_) continue;
        std::vector<double> left(m_), right(m_), diff(m_, 0.0);
        y_at(J, Side::Left, nullptr, left.data());
        y_at(J, Side::Right, nullptr, right.data());
        for (std::size_t k = 0; k < m_; ++k) left[k] = right[k] - left[k];
        gemv_accumulate(D_, left, diff);
        double mag = 0.0;
        for (double v : diff) mag = std::max(mag, std::abs(v));
        if (mag > kJumpTolerance) found.push_back(tc);
    }
    for (double tc : found) {
        jumps_.insert(std::upper_bound(jumps_.begin(), jumps_.end(), tc), tc);
    }
}

Trajectory DelaySolver::run() {
    const auto steps = static_cast<std::size_t>(std::floor(sc_.t_end / h_ + 1e-9));
    xs_.assign(n_, 0.0);
    ds_.assign(m_, 0.0);
    terminal_.assign(m_, 0.0);
    next_.assign(m_, 0.0);
    yd_.assign(m_, 0.0);
    node_t_.reserve(steps + 64);
    node_x_.reserve((steps + 64) * n_);
    node_fl_.reserve((steps + 64) * n_);
    node_fr_.reserve((steps + 64) * n_);
    grid_y_.reserve((steps + 1) * m_);

    Trajectory traj;
    traj.step = h_;
    traj.times.reserve(steps + 1);
    traj.x.reserve(steps + 1);
    traj.y.reserve(steps + 1);

    // Initial node; its derivative is filled in once y(0) is known.
    const std::vector<double> x0(sc_.psi.begin(), sc_.psi.end());
    std::vector<double> zero(n_, 0.0);
    push_node(0.0, x0.data(), zero.data(), zero.data());

    std::vector<double> y0(m_), phi0(m_);
    y_at(0.0, Side::Right, nullptr, y0.data());
    sc_.phi.evaluate(0.0, phi0);
    double jump0 = 0.0;
    for (std::size_t k = 0; k < m_; ++k) jump0 = std::max(jump0, std::abs(y0[k] - phi0[k]));
    if (jump0 > kJumpTolerance && h2(0.0) >= h_) jumps_.push_back(0.0);
    grid_y_.insert(grid_y_.end(), y0.begin(), y0.end());
    grid_count_ = 1;

    std::vector<double> f0(n_);
    rhs(0.0, x0.data(), Side::Right, nullptr, f0.data());
    std::copy(f0.begin(), f0.end(), node_fr_.begin());
    std::copy(f0.begin(), f0.end(), node_fl_.begin());

    traj.times.push_back(0.0);
    traj.x.emplace_back(sc_.psi);
    traj.y.emplace_back(std::vector<double>(y0));

    std::vector<double> k1(n_), k2(n_), k3(n_), k4(n_), tmp(n_), xn(n_), fl(n_), fr(n_);
    std::vector<double> cuts;
    for (std::size_t k = 0; k < steps; ++k) {
        const double a = static_cast<double>(k) * h_;
        const double b = static_cast<double>(k + 1) * h_;

        // Split at crossings of t - h1(t) over known y discontinuities.
        cuts.clear();
        const double ga = g1(a);
        const double gb = g1(b);
        if (ga != gb) {
            const double lo = std::min(ga, gb);
            const double hi = std::max(ga, gb);
            for (double J : jumps_) {
                if (J > lo && J < hi) {
                    const double tc = crossing(&DelaySolver::g1, a, b, J);
                    if (tc - a > 1e-12 && b - tc > 1e-12) cuts.push_back(tc);
                }
            }
            std::sort(cuts.begin(), cuts.end());
        }
        cuts.push_back(b);

        double u = a;
        for (double w : cuts) {
            const double dt = w - u;
            const std::size_t last = node_count() - 1;
            const double* xu = node_x(last);
            std::copy_n(node_fr(last), n_, k1.data());

            const double tm = u + 0.5 * dt;
            for (std::size_t i = 0; i < n_; ++i) tmp[i] = xu[i] + 0.5 * dt * k1[i];
            Stage s2{tm, tmp.data()};
            rhs(tm, tmp.data(), Side::Right, &s2, k2.data());
            for (std::size_t i = 0; i < n_; ++i) tmp[i] = xu[i] + 0.5 * dt * k2[i];
            Stage s3{tm, tmp.data()};
            rhs(tm, tmp.data(), Side::Right, &s3, k3.data());
            for (std::size_t i = 0; i < n_; ++i) tmp[i] = xu[i] + dt * k3[i];
            Stage s4{w, tmp.data()};
            rhs(w, tmp.data(), Side::Left, &s4, k4.data());
            for (std::size_t i = 0; i < n_; ++i)
                xn[i] = xu[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

            for (double v : xn) {
                if (!std::isfinite(v) || std::abs(v) > kBlowupMagnitude) {
                    std::ostringstream msg;
                    msg << "state magnitude exceeded " << kBlowupMagnitude << " at t = " << w;
                    throw Error(ErrorCode::UnstableStep, msg.str());
                }
            }

            Stage sn{w, xn.data()};
            rhs(w, xn.data(), Side::Left, &sn, fl.data());
            if (snap(g1(w))) rhs(w, xn.data(), Side::Right, &sn, fr.data());
            else fr = fl;
            push_node(w, xn.data(), fl.data(), fr.data());
            u = w;
        }

        register_y_jumps(a, b);

        std::vector<double> yb(m_);
        y_at(b, Side::Right, nullptr, yb.data());
        for (double v : yb) {
            if (!std::isfinite(v) || std::abs(v) > kBlowupMagnitude) {
                std::ostringstream msg;
                msg << "output magnitude exceeded " << kBlowupMagnitude << " at t = " << b;
                throw Error(ErrorCode::UnstableStep, msg.str());
            }
        }
        grid_y_.insert(grid_y_.end(), yb.begin(), yb.end());
        ++grid_count_;

        traj.times.push_back(b);
        traj.x.emplace_back(std::vector<double>(xn));
        traj.y.emplace_back(std::move(yb));
    }
    return traj;
}

}  // namespace

Trajectory simulate(const SimulationScenario& scenario) {
    const ValidationReport report = validate_scenario(scenario);
    if (!report.ok()) {
        std::string msg;
        for (const auto& f : report.findings) msg += (msg.empty() ? "" : "; ") + f;
        throw Error(ErrorCode::InvalidScenario, msg);
    }
    DelaySolver solver(scenario);
    return solver.run();
}

}  // namespace cdde
