#include "roughbsde/config.hpp"

#include "roughbsde/csv_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace roughbsde {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw std::invalid_argument("config: " + key + " is not a number: '" + v + "'");
    return out;
}

Vec to_vec(const std::vector<double>& v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

Mat to_mat(const std::string& key, const std::vector<double>& v, int rows, int cols) {
    if (v.size() != static_cast<std::size_t>(rows * cols))
        throw std::invalid_argument("config: " + key + " needs " + std::to_string(rows * cols) + " entries");
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = v[static_cast<std::size_t>(r * cols + c)];
    return m;
}

Vec sized(const Config& cfg, const std::string& key, int dim, double fallback) {
    std::vector<double> v = cfg.get_list(key, std::vector<double>(static_cast<std::size_t>(dim), fallback));
    if (v.size() == 1 && dim > 1) v.assign(static_cast<std::size_t>(dim), v[0]);
    if (v.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("config: " + key + " needs " + std::to_string(dim) + " entries");
    return to_vec(v);
}

}  // namespace

Config Config::parse(std::string_view text, std::string base_dir) {
    Config cfg;
    cfg.base_dir_ = std::move(base_dir);
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        if (cfg.values_.count(key))
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key " + key);
        cfg.values_[key] = trim(std::string_view(body).substr(eq + 1));
    }
    return cfg;
}

Config Config::load(const std::string& file) {
    std::ifstream is(file);
    if (!is) throw std::invalid_argument("config: cannot read " + file);
    std::stringstream ss;
    ss << is.rdbuf();
    const auto dir = std::filesystem::path(file).parent_path();
    return parse(ss.str(), dir.empty() ? "." : dir.string());
}

const std::string* Config::find(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    read_.insert(key);
    return &it->second;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get(const std::string& key) const {
    if (const auto* v = find(key)) return *v;
    throw std::invalid_argument("config: missing key " + key);
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    const auto* v = find(key);
    return v ? *v : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto* v = find(key);
    return v ? to_double(key, *v) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    int out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size())
        throw std::invalid_argument("config: " + key + " is not an integer: '" + *v + "'");
    return out;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size())
        throw std::invalid_argument("config: " + key + " is not an unsigned integer: '" + *v + "'");
    return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw std::invalid_argument("config: " + key + " is not a boolean: '" + *v + "'");
}

std::vector<double> Config::get_list(const std::string& key, std::vector<double> fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    std::vector<double> out;
    std::string item;
    std::istringstream in(*v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

std::string Config::get_path(const std::string& key) const {
    const std::filesystem::path p(get(key));
    if (p.is_absolute()) return p.string();
    return (std::filesystem::path(base_dir_) / p).string();
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::vector<std::string> Config::unused() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!read_.count(k)) out.push_back(k);
    return out;
}

DriverSpec driver_spec_from(const Config& cfg, const std::string& prefix) {
    DriverSpec d;
    auto key = [&](const char* k) { return prefix + k; };
    d.kind = parse_driver_kind(cfg.get(key("kind"), "step"));
    d.horizon = cfg.get_double(key("horizon"), cfg.get_double("horizon", 1.0));
    d.seed = cfg.get_u64(key("seed"), cfg.get_u64("seed", 0));
    d.declared_q = cfg.get_double(key("declared_q"), d.declared_q);
    d.jump_times = cfg.get_list(key("jump_times"));
    d.jump_sizes = cfg.get_list(key("jump_sizes"));
    d.zigzag_values = cfg.get_list(key("zigzag_values"));
    d.hurst = cfg.get_double(key("hurst"), d.hurst);
    d.n_samples = cfg.get_int(key("n_samples"), d.n_samples);
    d.scale = cfg.get_double(key("scale"), d.scale);
    d.rate = cfg.get_double(key("rate"), d.rate);
    d.jump_mean = cfg.get_double(key("jump_mean"), d.jump_mean);
    d.jump_std = cfg.get_double(key("jump_std"), d.jump_std);
    d.beta = cfg.get_double(key("beta"), d.beta);
    d.truncation = cfg.get_double(key("truncation"), d.truncation);
    d.levy_scale = cfg.get_double(key("levy_scale"), d.levy_scale);
    d.two_point_size = cfg.get_double(key("two_point_size"), d.two_point_size);
    d.two_point_time = cfg.get_double(key("two_point_time"), d.two_point_time);
    d.antithetic = cfg.get_bool(key("antithetic"), d.antithetic);
    const int parts = cfg.get_int(key("parts"), 0);
    for (int i = 0; i < parts; ++i) {
        DriverSpec part = driver_spec_from(cfg, prefix + "part" + std::to_string(i) + ".");
        part.horizon = d.horizon;
        d.parts.push_back(std::move(part));
    }
    d.validate();
    return d;
}

GridPath driver_from(const Config& cfg, double horizon) {
    if (cfg.has("driver.file")) return load_path(cfg.get_path("driver.file"));
    if (cfg.has("driver.kind")) {
        DriverSpec spec = driver_spec_from(cfg);
        if (!cfg.has("driver.horizon")) spec.horizon = horizon;
        return generate(spec);
    }
    return GridPath::constant(horizon, Vec::Zero(cfg.get_int("g.e", 1)));
}

Problem problem_from(const Config& cfg) {
    Problem pr;
    pr.horizon = cfg.get_double("horizon", 1.0);
    pr.mode = parse_jump_mode(cfg.get("mode", "marcus"));
    pr.p = cfg.get_double("p", pr.p);
    pr.q = cfg.get_double("q", pr.q);
    pr.declared_cf = cfg.get_double("cf", -1.0);
    pr.declared_cg = cfg.get_double("cg", -1.0);

    const int h = cfg.get_int("h", 1);
    const int e = cfg.get_int("g.e", 1);
    const std::string xf = cfg.get("xi.family", "constant");
    const Vec xa = sized(cfg, "xi.a", h, 0.0);
    if (xf == "constant") {
        pr.xi = Terminal::constant(xa);
    } else if (xf == "affine") {
        pr.xi = Terminal::affine(xa, sized(cfg, "xi.b", h, 0.0));
    } else if (xf == "sine") {
        pr.xi = Terminal::sine(xa, sized(cfg, "xi.b", h, 0.0));
    } else {
        throw std::invalid_argument("config: unknown xi.family " + xf);
    }

    const std::string ff = cfg.get("f.family", "zero");
    if (ff == "zero") {
        pr.f = Generator::zero();
    } else if (ff == "linear") {
        pr.f = Generator::linear(cfg.get_double("f.k", 0.0));
    } else if (ff == "affine") {
        pr.f = Generator::affine(sized(cfg, "f.a", h, 0.0), cfg.get_double("f.b", 0.0), cfg.get_double("f.c", 0.0));
    } else {
        throw std::invalid_argument("config: unknown f.family " + ff);
    }

    const std::string gf = cfg.get("g.family", "zero");
    if (gf == "zero") {
        pr.g = VectorField::zero(h, e);
    } else if (gf == "constant") {
        pr.g = VectorField::constant(to_mat("g.matrix", cfg.get_list("g.matrix"), h, e));
    } else if (gf == "linear") {
        const auto v = cfg.get_list("g.b");
        if (v.size() != static_cast<std::size_t>(e * h * h))
            throw std::invalid_argument("config: g.b needs e·h·h entries");
        std::vector<Mat> B;
        for (int k = 0; k < e; ++k)
            B.push_back(to_mat("g.b", std::vector<double>(v.begin() + k * h * h, v.begin() + (k + 1) * h * h), h, h));
        pr.g = VectorField::linear(std::move(B));
    } else if (gf == "smooth") {
        pr.g = VectorField::smooth_bounded(to_mat("g.amplitude", cfg.get_list("g.amplitude"), h, e),
                                           to_mat("g.phase", cfg.get_list("g.phase", std::vector<double>(
                                                                                         static_cast<std::size_t>(h * e), 0.0)),
                                                  h, e));
    } else {
        throw std::invalid_argument("config: unknown g.family " + gf);
    }
    if (cfg.has("g.mod.amplitude") || cfg.has("g.mod.frequency"))
        pr.g = pr.g.with_modulation({cfg.get_double("g.mod.amplitude", 0.0), cfg.get_double("g.mod.frequency", 0.0)});

    pr.W = driver_from(cfg, pr.horizon);
    if (cfg.has("clock.file")) pr.clock = load_path(cfg.get_path("clock.file"));
    validate_problem(pr);
    return pr;
}

TreeConfig tree_config_from(const Config& cfg) {
    TreeConfig tc;
    tc.steps = cfg.get_int("tree.steps", tc.steps);
    tc.snap_tolerance = cfg.get_double("tree.snap_tolerance", tc.snap_tolerance);
    tc.excursion_substeps = cfg.get_int("tree.excursion_substeps", tc.excursion_substeps);
    return tc;
}

SolverOptions solver_options_from(const Config& cfg) {
    SolverOptions o;
    o.tol = cfg.get_double("solver.tol", o.tol);
    o.max_iter = cfg.get_int("solver.max_iter", o.max_iter);
    o.max_shrinks = cfg.get_int("solver.max_shrinks", o.max_shrinks);
    o.residual_factor = cfg.get_double("solver.residual_factor", o.residual_factor);
    o.check_residual = cfg.get_bool("solver.check_residual", o.check_residual);
    o.exact_norm_depth = cfg.get_int("solver.exact_norm_depth", o.exact_norm_depth);
    return o;
}

StabilityConfig stability_from(const Config& cfg) {
    StabilityConfig s;
    s.limit = problem_from(cfg);
    s.meshes = cfg.get_list("stability.meshes", s.meshes);
    for (std::size_t i = 1; i < s.meshes.size(); ++i)
        if (!(s.meshes[i] < s.meshes[i - 1])) throw std::invalid_argument("config: stability.meshes must strictly decrease");
    s.steps = cfg.get_int("tree.steps", s.steps);
    s.n_path_samples = cfg.get_int("stability.n_path_samples", s.n_path_samples);
    s.p = cfg.get_double("stability.p", s.p);
    s.q = cfg.get_double("stability.q", s.q);
    s.delta_schedule = cfg.get_list("stability.delta_schedule", s.delta_schedule);
    s.seed = cfg.get_u64("stability.seed", cfg.get_u64("seed", s.seed));
    s.excursion_samples = cfg.get_int("stability.excursion_samples", s.excursion_samples);
    s.alpha.beam = cfg.get_int("stability.alpha_beam", s.alpha.beam);
    s.alpha.refine = cfg.get_int("stability.alpha_refine", s.alpha.refine);
    s.alpha.bands = cfg.get_int("stability.alpha_bands", s.alpha.bands);
    s.solver = solver_options_from(cfg);
    return s;
}

BdsdeRun bdsde_from(const Config& cfg) {
    BdsdeRun run;
    run.problem = problem_from(cfg);
    run.sampler = driver_spec_from(cfg);
    if (!cfg.has("driver.horizon")) run.sampler.horizon = run.problem.horizon;
    run.n_outer = cfg.get_int("bdsde.n_outer", run.n_outer);
    run.base_seed = cfg.get_u64("bdsde.base_seed", cfg.get_u64("seed", run.base_seed));
    run.q_bound = cfg.get_double("bdsde.q_bound", run.q_bound);
    run.tree = tree_config_from(cfg);
    run.options = solver_options_from(cfg);
    return run;
}

}  // namespace roughbsde
