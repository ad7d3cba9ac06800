#include "roughbsde/drivers.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <map>

namespace roughbsde {

namespace {

const std::map<std::string_view, DriverKind> kKinds = {
    {"step", DriverKind::Step},
    {"zigzag", DriverKind::Zigzag},
    {"fbm", DriverKind::Fbm},
    {"compound-poisson", DriverKind::CompoundPoisson},
    {"levy-truncated", DriverKind::LevyTruncated},
    {"two-point", DriverKind::TwoPoint},
    {"sum", DriverKind::Sum},
};

}  // namespace

GridPath pure_jump(double T, std::vector<std::pair<double, double>> jumps) {
    std::sort(jumps.begin(), jumps.end());
    std::vector<double> times{0.0};
    for (auto [t, size] : jumps) {
        (void)size;
        if (t < 0.0 || t >= T) throw std::invalid_argument("driver: jump time outside [0, T)");
        if (t > times.back()) times.push_back(t);
    }
    times.push_back(T);
    // cell[i] is the value on (t_i, t_{i+1}]: every jump at or before t_i.
    std::vector<Vec> cell(times.size() - 1);
    double acc = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        while (k < jumps.size() && jumps[k].first <= times[i]) acc += jumps[k++].second;
        cell[i] = scalar_vec(acc);
    }
    return GridPath::caglad_steps(std::move(times), scalar_vec(0.0), std::move(cell));
}

std::string_view to_string(DriverKind kind) {
    for (const auto& [name, k] : kKinds)
        if (k == kind) return name;
    return "?";
}

DriverKind parse_driver_kind(std::string_view text) {
    auto it = kKinds.find(text);
    if (it == kKinds.end()) throw std::invalid_argument("unknown driver kind: " + std::string(text));
    return it->second;
}

void DriverSpec::validate() const {
    if (!(horizon > 0.0)) throw std::invalid_argument("driver: horizon must be positive");
    if (!(declared_q >= 1.0 && declared_q < 2.0)) throw std::invalid_argument("driver: declared q must lie in [1, 2)");
    switch (kind) {
        case DriverKind::Step:
            if (jump_times.size() != jump_sizes.size()) throw std::invalid_argument("driver: step needs one size per time");
            break;
        case DriverKind::Zigzag:
            if (zigzag_values.size() < 2) throw std::invalid_argument("driver: zigzag needs >= 2 values");
            break;
        case DriverKind::Fbm:
            if (!(hurst > 0.5 && hurst < 1.0)) throw std::invalid_argument("driver: fbm needs H in (1/2, 1)");
            if (n_samples < 1 || n_samples > 4096) throw std::invalid_argument("driver: fbm needs 1 <= n <= 4096");
            if (!(declared_q > 1.0 / hurst)) throw std::invalid_argument("driver: fbm needs declared q > 1/H");
            break;
        case DriverKind::CompoundPoisson:
            if (!(rate >= 0.0) || !(jump_std >= 0.0)) throw std::invalid_argument("driver: bad compound-poisson rate");
            break;
        case DriverKind::LevyTruncated:
            if (!(beta > 0.0 && beta < 2.0)) throw std::invalid_argument("driver: levy needs beta in (0, 2)");
            if (!(truncation > 0.0) || !(levy_scale > 0.0)) throw std::invalid_argument("driver: levy truncation");
            if (!(declared_q > beta)) throw std::invalid_argument("driver: levy needs declared q > beta");
            break;
        case DriverKind::TwoPoint:
            if (!(two_point_time > 0.0 && two_point_time < horizon))
                throw std::invalid_argument("driver: two-point time must lie in (0, T)");
            break;
        case DriverKind::Sum:
            if (parts.empty()) throw std::invalid_argument("driver: sum needs parts");
            for (const auto& p : parts) {
                if (p.horizon != horizon) throw std::invalid_argument("driver: sum parts must share the horizon");
                p.validate();
            }
            break;
    }
}

FbmSampler::FbmSampler(double hurst, int n, double horizon) : hurst_(hurst), n_(n), horizon_(horizon) {
    if (!(hurst > 0.0 && hurst < 1.0) || n < 1 || !(horizon > 0.0)) throw std::invalid_argument("fbm sampler");
    Mat C(n, n);
    const double h2 = 2.0 * hurst;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double s = horizon * (i + 1) / n, t = horizon * (j + 1) / n;
            C(i, j) = 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
        }
    for (int round = 0; round < 20; ++round) {
        Eigen::LLT<Mat> llt(C);
        if (llt.info() == Eigen::Success) {
            factor_ = llt.matrixL();
            return;
        }
        const double add = round == 0 ? 1e-12 : jitter_;
        C.diagonal().array() += add;
        jitter_ += add;
    }
    throw std::runtime_error("fbm covariance is not positive definite after jitter");
}

GridPath FbmSampler::sample(std::mt19937_64& rng, double scale) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec z(n_);
    for (int i = 0; i < n_; ++i) z(i) = normal(rng);
    const Vec x = factor_ * z;
    std::vector<double> t{0.0};
    std::vector<double> v{0.0};
    for (int i = 0; i < n_; ++i) {
        t.push_back(i + 1 == n_ ? horizon_ : horizon_ * (i + 1) / n_);
        v.push_back(scale * x(i));
    }
    return GridPath::continuous_scalar(std::move(t), v);
}

GridPath generate(const DriverSpec& spec, DriverReport* report) {
    spec.validate();
    const double T = spec.horizon;
    std::mt19937_64 rng(spec.seed);
    DriverReport local;
    GridPath out;
    switch (spec.kind) {
        case DriverKind::Step: {
            std::vector<std::pair<double, double>> jumps;
            for (std::size_t i = 0; i < spec.jump_times.size(); ++i) jumps.emplace_back(spec.jump_times[i], spec.jump_sizes[i]);
            local.jumps = jumps.size();
            out = pure_jump(T, std::move(jumps));
            break;
        }
        case DriverKind::Zigzag: {
            const std::size_t n = spec.zigzag_values.size();
            std::vector<double> t;
            for (std::size_t i = 0; i < n; ++i) t.push_back(i + 1 == n ? T : T * static_cast<double>(i) / (n - 1));
            out = GridPath::continuous_scalar(std::move(t), spec.zigzag_values);
            break;
        }
        case DriverKind::Fbm: {
            FbmSampler sampler(spec.hurst, spec.n_samples, T);
            local.jitter = sampler.jitter();
            out = sampler.sample(rng, spec.scale);
            break;
        }
        case DriverKind::CompoundPoisson: {
            std::poisson_distribution<int> count(spec.rate * T > 0.0 ? spec.rate * T : 1.0);
            std::uniform_real_distribution<double> when(0.0, T);
            std::normal_distribution<double> size(spec.jump_mean, spec.jump_std);
            const int n = spec.rate * T > 0.0 ? count(rng) : 0;
            std::vector<std::pair<double, double>> jumps;
            for (int i = 0; i < n; ++i) {
                const double t = when(rng);
                jumps.emplace_back(t, size(rng));
            }
            local.jumps = jumps.size();
            out = pure_jump(T, std::move(jumps));
            break;
        }
        case DriverKind::LevyTruncated: {
            const double intensity = spec.levy_scale * std::pow(spec.truncation, -spec.beta);
            std::poisson_distribution<int> count(intensity * T);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const int n = count(rng);
            std::vector<std::pair<double, double>> jumps;
            for (int i = 0; i < n; ++i) {
                const double t = T * unit(rng);
                double u = unit(rng);
                while (u <= 0.0) u = unit(rng);
                const double mag = spec.truncation * std::pow(u, -1.0 / spec.beta);
                jumps.emplace_back(t, unit(rng) < 0.5 ? -mag : mag);
            }
            local.jumps = jumps.size();
            out = pure_jump(T, std::move(jumps));
            break;
        }
        case DriverKind::TwoPoint: {
            bool up;
            if (spec.antithetic) {
                up = spec.seed % 2 == 0;
            } else {
                std::bernoulli_distribution coin(0.5);
                up = coin(rng);
            }
            local.jumps = 1;
            out = pure_jump(T, {{spec.two_point_time, up ? spec.two_point_size : -spec.two_point_size}});
            break;
        }
        case DriverKind::Sum: {
            for (std::size_t i = 0; i < spec.parts.size(); ++i) {
                DriverSpec part = spec.parts[i];
                part.seed = spec.seed + i;
                DriverReport r;
                GridPath x = generate(part, &r);
                local.jumps += r.jumps;
                local.jitter = std::max(local.jitter, r.jitter);
                out = i == 0 ? x : combine(out, 1.0, x, 1.0);
            }
            break;
        }
    }
    if (report) *report = local;
    return out;
}

GridPath wong_zakai(const GridPath& W, double mesh) {
    if (!(mesh > 0.0)) throw std::invalid_argument("wong_zakai: mesh must be positive");
    const double T = W.horizon();
    std::vector<double> t;
    for (long k = 0;; ++k) {
        double s = static_cast<double>(k) * mesh;
        if (s >= T - 1e-12 * std::max(1.0, T)) break;
        // Snap to W's grid so that a jump at a mesh point is not misplaced by rounding.
        const std::size_t i = W.find_time(s);
        if (i == GridPath::npos) {
            auto it = std::lower_bound(W.times().begin(), W.times().end(), s);
            if (it != W.times().end() && std::abs(*it - s) <= 1e-9 * mesh) s = *it;
            if (it != W.times().begin() && std::abs(*(it - 1) - s) <= 1e-9 * mesh) s = *(it - 1);
        } else {
            s = W.time(i);
        }
        t.push_back(s);
    }
    t.push_back(T);
    std::vector<Vec> v;
    for (std::size_t k = 0; k < t.size(); ++k) v.push_back(k == 0 ? W.eval_right(0.0) : W.eval(t[k]));
    // A jump at 0 is spread over the first cell: the smoothing starts at W(0).
    v.front() = W.at(0);
    return GridPath::continuous(std::move(t), std::move(v));
}

}  // namespace roughbsde
