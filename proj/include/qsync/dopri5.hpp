// dopri5.hpp: adaptive Dormand–Prince 5(4) stepper with quartic dense output
//
// Works on any Eigen dense type (here: complex density matrices). Step-size
// control follows the usual mixed absolute/relative RMS error norm with the
// 4th-order embedded estimate; output at requested times uses the Shampine
// continuous extension, so sample times never constrain the step size.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>

namespace qsync {

class StepSizeUnderflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Dopri5Options {
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 0.0;  // 0 → automatic
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

struct Dopri5Stats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
    double last_step = 0.0;
};

namespace detail {
// Butcher tableau
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th minus 4th order weights
inline constexpr double e1 = -71.0 / 57600, e3 = 71.0 / 16695, e4 = -71.0 / 1920,
                        e5 = 17253.0 / 339200, e6 = -22.0 / 525, e7 = 1.0 / 40;
// Continuous extension: y(t0 + th) = y0 + h * sum_i k_i * (P_i1 th + P_i2 th^2 + P_i3 th^3 + P_i4 th^4)
inline constexpr double P[7][4] = {
    {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799},
    {0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072},
    {0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632},
    {0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
    {0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423},
};
}  // namespace detail

/// Integrates y' = f(y) (autonomous) from t0 to t_end, calling `on_sample(t, y)`
/// for each entry of `sample_times` (ascending, within [t0, t_end]).
/// Returns the state at t_end.
template <typename State>
State dopri5_integrate(const std::function<void(const State&, State&)>& rhs, State y, double t0, double t_end,
                       std::span<const double> sample_times,
                       const std::function<void(double, const State&)>& on_sample, const Dopri5Options& opt,
                       Dopri5Stats* stats = nullptr) {
    using namespace detail;
    Dopri5Stats local;
    Dopri5Stats& st = stats ? *stats : local;

    auto err_norm = [&](const State& err, const State& y_old, const State& y_new) {
        const auto scale = (opt.atol + opt.rtol * y_old.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array());
        return std::sqrt((err.cwiseAbs().array() / scale).square().mean());
    };

    std::size_t next_sample = 0;
    auto emit_until = [&](double t_limit, auto&& value_at) {
        while (next_sample < sample_times.size() && sample_times[next_sample] <= t_limit) {
            const double ts = sample_times[next_sample++];
            on_sample(ts, value_at(ts));
        }
    };

    State k1, k2, k3, k4, k5, k6, k7, tmp, y_new;
    rhs(y, k1);
    ++st.rhs_evals;

    emit_until(t0, [&](double) -> const State& { return y; });
    if (t_end <= t0) return y;

    double h = opt.initial_step;
    if (h <= 0.0) {
        // Hairer's starting-step heuristic
        const auto sc = (opt.atol + opt.rtol * y.cwiseAbs().array());
        const double d0 = std::sqrt((y.cwiseAbs().array() / sc).square().mean());
        const double d1 = std::sqrt((k1.cwiseAbs().array() / sc).square().mean());
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, t_end - t0);
    }
    h = std::min(h, opt.max_step);

    double t = t0;
    constexpr double safety = 0.9, min_factor = 0.2, max_factor = 10.0;
    while (t < t_end) {
        if (st.accepted + st.rejected >= opt.max_steps) throw StepSizeUnderflow("dopri5: max_steps exceeded");
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw StepSizeUnderflow("dopri5: step size underflow at t = " + std::to_string(t));
        const bool last = t + h >= t_end;
        if (last) h = t_end - t;

        tmp = y + h * (a21 * k1);
        rhs(tmp, k2);
        tmp = y + h * (a31 * k1 + a32 * k2);
        rhs(tmp, k3);
        tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(tmp, k4);
        tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(tmp, k5);
        tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(tmp, k6);
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(y_new, k7);
        st.rhs_evals += 6;

        tmp = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = err_norm(tmp, y, y_new);

        if (err <= 1.0) {  // false for NaN
            const double t_new = last ? t_end : t + h;
            emit_until(t_new, [&](double ts) {
                const double th = (ts - t) / h;
                double q[7];
                for (int i = 0; i < 7; ++i)
                    q[i] = th * (P[i][0] + th * (P[i][1] + th * (P[i][2] + th * P[i][3])));
                State out = y + h * (q[0] * k1 + q[2] * k3 + q[3] * k4 + q[4] * k5 + q[5] * k6 + q[6] * k7);
                return out;
            });
            t = t_new;
            y.swap(y_new);
            k1.swap(k7);
            ++st.accepted;
            st.last_step = h;
            const double factor = err == 0.0 ? max_factor
                                             : std::clamp(safety * std::pow(err, -0.2), min_factor, max_factor);
            h = std::min(h * factor, opt.max_step);
        } else {
            ++st.rejected;
            const double factor = std::isfinite(err) ? std::max(min_factor, safety * std::pow(err, -0.2)) : min_factor;
            h *= factor;
        }
    }
    return y;
}

}  // namespace qsync
