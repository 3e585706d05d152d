#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "faultrank/errors.hpp"
#include "faultrank/rng.hpp"
#include "faultrank/signal_store.hpp"

namespace faultrank {

struct PiSettings {
    double gain = 1.0;
    double integral_time_h = 1.0;
    double output_nominal = 0.0;
    double output_low = 0.0;
    double output_high = 1.0;
};

/// Mixing-tank benchmark: two feed streams blended in a level-controlled
/// tank. The level loop throttles the outlet valve, the composition loop
/// trims stream A. Noise on stream B runs over the first schedule interval
/// and random composition set-point steps over the second.
struct MixingConfig {
    double tank_area_m2 = 2.0;
    double feed_fraction_a = 0.8;
    double feed_fraction_b = 0.2;
    double valve_coefficient = 4.0;  // F_out = valve * Cv * sqrt(h)

    double flow_a_nominal = 1.0;  // m^3/h
    double flow_b_nominal = 1.0;
    double level_setpoint_m = 1.0;
    double composition_setpoint = 0.5;

    PiSettings level_controller{10.0, 0.2, 0.5, 0.02, 1.0};     // valve fraction per m
    PiSettings composition_controller{2.0, 0.5, 1.0, 0.0, 3.0};  // m^3/h per unit x

    double fb_noise_std = 0.15;        // m^3/h
    double fb_noise_tau_h = 0.1;       // first-order filter time constant
    double fb_noise_from_h = 0.0;
    double fb_noise_to_h = 20.0;
    double xsp_step_fraction = 0.05;   // of the x_sp limit span
    double xsp_step_period_h = 2.0;
    double xsp_steps_from_h = 20.0;
    double xsp_steps_to_h = 40.0;

    double duration_h = 40.0;
    double integrator_step_s = 1.0;
    double noise_grid_s = 1.0;  // noise path is defined on its own fixed grid
    double sample_period_s = 30.0;
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (!(tank_area_m2 > 0.0 && valve_coefficient > 0.0))
            throw ParamError("mixing: physical parameters must be positive");
        if (!(feed_fraction_a >= 0.0 && feed_fraction_a <= 1.0 &&
              feed_fraction_b >= 0.0 && feed_fraction_b <= 1.0))
            throw ParamError("mixing: feed fractions must lie in [0, 1]");
        if (!(duration_h > 0.0 && integrator_step_s > 0.0 && sample_period_s > 0.0))
            throw ParamError("mixing: durations must be positive");
        if (!(fb_noise_from_h >= 0.0 && fb_noise_to_h <= duration_h &&
              xsp_steps_from_h >= 0.0 && xsp_steps_to_h <= duration_h))
            throw ParamError("mixing: disturbance intervals must lie within the run");
        if (std::fmod(sample_period_s, integrator_step_s) > 1e-9)
            throw ParamError("mixing: sample period must be a multiple of the integrator step");
        if (integrator_step_s > noise_grid_s + 1e-12)
            throw ParamError("mixing: integrator step must not exceed the noise grid");
    }
};

namespace detail {

struct MixingState {
    double h = 1.0;
    double x = 0.5;
    double level_integral = 0.0;
    double comp_integral = 0.0;
};

struct MixingOutputs {
    double flow_a = 0.0;
    double flow_b = 0.0;
    double flow_out = 0.0;
};

inline double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

/// Algebraic controller + balance evaluation at one instant. The integral
/// states freeze while the matching output is saturated in the error
/// direction (conditional anti-windup).
inline MixingState mixing_derivative(const MixingConfig& cfg, const MixingState& s,
                                     double flow_b, double x_sp, MixingOutputs* outputs) {
    const double level_error = s.h - cfg.level_setpoint_m;
    const PiSettings& lc = cfg.level_controller;
    const double valve_raw = lc.output_nominal + lc.gain * level_error + s.level_integral;
    const double valve = clamp(valve_raw, lc.output_low, lc.output_high);
    double d_level_integral = (lc.gain / lc.integral_time_h) * level_error;
    if ((valve_raw > lc.output_high && level_error > 0.0) ||
        (valve_raw < lc.output_low && level_error < 0.0))
        d_level_integral = 0.0;

    const double comp_error = x_sp - s.x;
    const PiSettings& cc = cfg.composition_controller;
    const double flow_a_raw = cc.output_nominal + cc.gain * comp_error + s.comp_integral;
    const double flow_a = clamp(flow_a_raw, cc.output_low, cc.output_high);
    double d_comp_integral = (cc.gain / cc.integral_time_h) * comp_error;
    if ((flow_a_raw > cc.output_high && comp_error > 0.0) ||
        (flow_a_raw < cc.output_low && comp_error < 0.0))
        d_comp_integral = 0.0;

    const double flow_out = valve * cfg.valve_coefficient * std::sqrt(std::max(s.h, 0.0));
    if (outputs) {
        outputs->flow_a = flow_a;
        outputs->flow_b = flow_b;
        outputs->flow_out = flow_out;
    }

    MixingState d;
    d.h = (flow_a + flow_b - flow_out) / cfg.tank_area_m2;
    d.x = (flow_a * (cfg.feed_fraction_a - s.x) + flow_b * (cfg.feed_fraction_b - s.x)) /
          (cfg.tank_area_m2 * std::max(s.h, 1e-9));
    d.level_integral = d_level_integral;
    d.comp_integral = d_comp_integral;
    return d;
}

inline MixingState axpy(const MixingState& s, const MixingState& d, double dt) {
    MixingState out;
    out.h = s.h + dt * d.h;
    out.x = s.x + dt * d.x;
    out.level_integral = s.level_integral + dt * d.level_integral;
    out.comp_integral = s.comp_integral + dt * d.comp_integral;
    return out;
}

}  // namespace detail

inline std::vector<TagMeta> mixing_tag_metadata(const MixingConfig& cfg) {
    const auto tag = [](std::string name, std::string description, TagKind kind,
                        double nominal, double low, double high) {
        TagMeta meta{std::move(name), std::move(description), kind, nominal, low, high, true};
        meta.validate();
        return meta;
    };
    return {
        tag("F_A", "stream A flow (composition MV)", TagKind::MV,
            cfg.flow_a_nominal, cfg.composition_controller.output_low,
            cfg.composition_controller.output_high),
        tag("F_B", "stream B flow (disturbance)", TagKind::DV, cfg.flow_b_nominal, 0.3, 1.7),
        tag("F_out", "outlet flow (level MV)", TagKind::MV,
            cfg.flow_a_nominal + cfg.flow_b_nominal, 0.0,
            2.0 * (cfg.flow_a_nominal + cfg.flow_b_nominal)),
        tag("h", "tank level", TagKind::CV, cfg.level_setpoint_m, 0.5, 1.5),
        tag("x", "outlet composition", TagKind::CV, cfg.composition_setpoint, 0.3, 0.7),
        tag("x_sp", "composition set-point", TagKind::SP, cfg.composition_setpoint, 0.3, 0.7),
        tag("h_sp", "level set-point", TagKind::SP, cfg.level_setpoint_m, 0.5, 1.5),
    };
}

/// Integrates the mixing process with fixed-step RK4 and returns the sampled
/// tag matrix. The disturbance paths live on their own fixed time grid, so
/// refining the integrator step does not change the scenario. Deterministic
/// per seed.
inline TimeSeriesSet simulate_mixing(const MixingConfig& cfg) {
    cfg.validate();
    const double dt_h = cfg.integrator_step_s / 3600.0;
    const auto n_steps = static_cast<std::size_t>(
        std::llround(cfg.duration_h / dt_h));
    const auto sample_every = static_cast<std::size_t>(
        std::llround(cfg.sample_period_s / cfg.integrator_step_s));

    // Pre-drawn disturbance paths.
    Rng rng(cfg.rng_seed);
    const double noise_dt_h = cfg.noise_grid_s / 3600.0;
    const auto n_noise = static_cast<std::size_t>(
        std::llround(cfg.duration_h / noise_dt_h)) + 2;
    std::vector<double> fb_noise(n_noise, 0.0);
    const double alpha = std::exp(-noise_dt_h / cfg.fb_noise_tau_h);
    const double drive = std::sqrt(1.0 - alpha * alpha) * cfg.fb_noise_std;
    for (std::size_t k = 1; k < n_noise; ++k)
        fb_noise[k] = alpha * fb_noise[k - 1] + drive * rng.normal();

    const auto metas = mixing_tag_metadata(cfg);
    const double xsp_span = metas[5].high_limit - metas[5].low_limit;
    const auto n_xsp_steps = static_cast<std::size_t>(std::ceil(
                                 (cfg.xsp_steps_to_h - cfg.xsp_steps_from_h) /
                                 cfg.xsp_step_period_h)) + 1;
    std::vector<double> xsp_steps(n_xsp_steps);
    for (auto& step : xsp_steps)
        step = rng.uniform(-1.0, 1.0) * cfg.xsp_step_fraction * xsp_span;

    const auto flow_b_at = [&](double t_h) {
        double flow = cfg.flow_b_nominal;
        if (t_h >= cfg.fb_noise_from_h && t_h < cfg.fb_noise_to_h) {
            const auto k = static_cast<std::size_t>(t_h / noise_dt_h);
            flow += fb_noise[std::min(k, n_noise - 1)];
        }
        return std::max(flow, 0.0);
    };
    const auto xsp_at = [&](double t_h) {
        if (t_h < cfg.xsp_steps_from_h || t_h > cfg.xsp_steps_to_h)
            return cfg.composition_setpoint;
        const auto j = static_cast<std::size_t>(
            (t_h - cfg.xsp_steps_from_h) / cfg.xsp_step_period_h);
        return cfg.composition_setpoint + xsp_steps[std::min(j, n_xsp_steps - 1)];
    };

    detail::MixingState state;
    state.h = cfg.level_setpoint_m;
    state.x = cfg.composition_setpoint;

    const std::size_t n_samples = n_steps / sample_every;
    Matrix values(n_samples, 7);
    std::size_t row = 0;
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t_h = static_cast<double>(step) * dt_h;
        const double flow_b = flow_b_at(t_h);
        const double x_sp = xsp_at(t_h);

        if (step % sample_every == 0 && row < n_samples) {
            detail::MixingOutputs outputs;
            detail::mixing_derivative(cfg, state, flow_b, x_sp, &outputs);
            values(row, 0) = outputs.flow_a;
            values(row, 1) = outputs.flow_b;
            values(row, 2) = outputs.flow_out;
            values(row, 3) = state.h;
            values(row, 4) = state.x;
            values(row, 5) = x_sp;
            values(row, 6) = cfg.level_setpoint_m;
            ++row;
        }

        // Classic RK4; disturbances held on their own grid within the step.
        const double mid_flow_b = flow_b_at(t_h + 0.5 * dt_h);
        const double mid_xsp = xsp_at(t_h + 0.5 * dt_h);
        const double end_flow_b = flow_b_at(t_h + dt_h);
        const double end_xsp = xsp_at(t_h + dt_h);
        const auto k1 = detail::mixing_derivative(cfg, state, flow_b, x_sp, nullptr);
        const auto k2 = detail::mixing_derivative(cfg, detail::axpy(state, k1, 0.5 * dt_h),
                                                  mid_flow_b, mid_xsp, nullptr);
        const auto k3 = detail::mixing_derivative(cfg, detail::axpy(state, k2, 0.5 * dt_h),
                                                  mid_flow_b, mid_xsp, nullptr);
        const auto k4 = detail::mixing_derivative(cfg, detail::axpy(state, k3, dt_h),
                                                  end_flow_b, end_xsp, nullptr);
        detail::MixingState increment;
        increment.h = (k1.h + 2.0 * k2.h + 2.0 * k3.h + k4.h) / 6.0;
        increment.x = (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x) / 6.0;
        increment.level_integral = (k1.level_integral + 2.0 * k2.level_integral +
                                    2.0 * k3.level_integral + k4.level_integral) / 6.0;
        increment.comp_integral = (k1.comp_integral + 2.0 * k2.comp_integral +
                                   2.0 * k3.comp_integral + k4.comp_integral) / 6.0;
        state = detail::axpy(state, increment, dt_h);

        if (!(state.h > 0.0) || !std::isfinite(state.h) || !std::isfinite(state.x))
            throw SimulationError("mixing: state left the physical region at t = " +
                                  std::to_string(t_h) + " h");
    }

    TimeSeriesSet ts;
    ts.tags = metas;
    ts.sample_period = cfg.sample_period_s;
    ts.start_time = 0.0;
    ts.values = std::move(values);
    ts.scaling_state = ScalingState::raw;
    return ts;
}

/// Directed coupling `coeff * source[t - delay]` feeding a target equation.
struct Coupling {
    std::size_t from = 0;
    std::size_t to = 0;
    double coeff = 0.0;
    int delay = 1;
};

struct ARConfig {
    std::vector<std::vector<double>> self_coefficients;  // per variable, lag 1..p
    double noise_std = 1.0;
    std::size_t length = 2000;
    std::size_t burn_in = 1000;
    std::uint64_t rng_seed = 1;
    std::vector<std::string> names;  // optional; defaults to x1, x2, ...
};

/// Coupled autoregressive benchmark generator. Burn-in samples are discarded;
/// the output is deterministic per seed.
inline TimeSeriesSet simulate_var(const ARConfig& cfg, const std::vector<Coupling>& couplings) {
    const std::size_t v = cfg.self_coefficients.size();
    if (v == 0) throw ParamError("simulate_var: need at least one variable");
    if (cfg.length < 2) throw ParamError("simulate_var: length must be >= 2");

    int max_lag = 1;
    for (const auto& coeffs : cfg.self_coefficients) {
        double total = 0.0;
        for (double c : coeffs) total += std::abs(c);
        if (total >= 1.0)
            throw ParamError("simulate_var: self coefficients must sum below 1 in magnitude");
        max_lag = std::max(max_lag, static_cast<int>(coeffs.size()));
    }
    // Cycles would need a full companion-matrix stability analysis; the
    // benchmark structures used here are feed-forward.
    std::vector<std::vector<std::size_t>> adjacency(v);
    for (const auto& c : couplings) {
        if (c.from >= v || c.to >= v) throw ParamError("simulate_var: coupling index out of range");
        if (c.delay < 1) throw ParamError("simulate_var: coupling delay must be >= 1");
        if (c.from == c.to) throw ParamError("simulate_var: self couplings belong in self_coefficients");
        adjacency[c.from].push_back(c.to);
        max_lag = std::max(max_lag, c.delay);
    }
    std::vector<int> mark(v, 0);
    const std::function<void(std::size_t)> visit = [&](std::size_t node) {
        mark[node] = 1;
        for (std::size_t next : adjacency[node]) {
            if (mark[next] == 1) throw ParamError("simulate_var: coupling structure has a cycle");
            if (mark[next] == 0) visit(next);
        }
        mark[node] = 2;
    };
    for (std::size_t i = 0; i < v; ++i)
        if (mark[i] == 0) visit(i);

    const std::size_t total = cfg.burn_in + cfg.length + static_cast<std::size_t>(max_lag);
    Matrix buffer(total, v, 0.0);
    Rng rng(cfg.rng_seed);
    for (std::size_t t = static_cast<std::size_t>(max_lag); t < total; ++t) {
        for (std::size_t i = 0; i < v; ++i) {
            double value = cfg.noise_std * rng.normal();
            const auto& coeffs = cfg.self_coefficients[i];
            for (std::size_t j = 0; j < coeffs.size(); ++j)
                value += coeffs[j] * buffer(t - 1 - j, i);
            for (const auto& c : couplings)
                if (c.to == i)
                    value += c.coeff * buffer(t - static_cast<std::size_t>(c.delay), c.from);
            buffer(t, i) = value;
        }
    }

    TimeSeriesSet ts;
    for (std::size_t i = 0; i < v; ++i) {
        TagMeta meta;
        meta.name = i < cfg.names.size() ? cfg.names[i] : "x" + std::to_string(i + 1);
        meta.kind = TagKind::PV;
        ts.tags.push_back(std::move(meta));
    }
    ts.sample_period = 1.0;
    ts.start_time = 0.0;
    ts.values = Matrix(cfg.length, v);
    const std::size_t offset = total - cfg.length;
    for (std::size_t r = 0; r < cfg.length; ++r)
        for (std::size_t c = 0; c < v; ++c)
            ts.values(r, c) = buffer(offset + r, c);
    ts.scaling_state = ScalingState::raw;
    return ts;
}

/// The two-variable benchmark used across the estimator tests:
/// x autonomous AR(1), y driven by x with a five-sample lag.
inline TimeSeriesSet ar_benchmark(std::size_t length, std::uint64_t seed,
                                  double coupling = 0.5, int delay = 5) {
    ARConfig cfg;
    cfg.self_coefficients = {{0.5}, {0.5}};
    cfg.noise_std = 1.0;
    cfg.length = length;
    cfg.rng_seed = seed;
    cfg.names = {"x", "y"};
    return simulate_var(cfg, {{0, 1, coupling, delay}});
}

}  // namespace faultrank
