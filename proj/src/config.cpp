#include "sgflow/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace sgflow {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& value, const std::string& key) {
    const std::string v = trim(value);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ValidationError(key, "not a number: '" + v + "'");
    return out;
}

long parse_long(const std::string& value, const std::string& key) {
    const std::string v = trim(value);
    long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ValidationError(key, "not an integer: '" + v + "'");
    return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
    const std::string v = trim(value);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError(key, "not a boolean: '" + v + "'");
}

std::vector<double> parse_comma_list(const std::string& value, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(item, key));
    return out;
}

struct RawConfig {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    const std::string& get(const std::string& key) const { return kv.at(key); }
};

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(lineno, "expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(lineno, "empty key");
        if (raw.kv.count(key)) throw ParseError(lineno, "duplicate key '" + key + "'");
        raw.kv[key] = value;
    }
    return raw;
}

const char* const kKnownKeys[] = {
    "dimension",      "drift",          "epsilon",        "tau",
    "horizon",        "alpha0.file",    "alpha0.ball_radius",
    "alpha0.count",   "alpha0.seed",    "mu0.file",       "mu0.ball_radius",
    "mu0.count",      "mu0.seed",       "sinkhorn.tol",   "sinkhorn.max_iter",
    "warm_start",     "snapshot_stride"};

MeasureSpec parse_measure_spec(const RawConfig& raw, const std::string& prefix, int dim) {
    MeasureSpec spec;
    const bool has_file = raw.has(prefix + ".file");
    const bool has_ball = raw.has(prefix + ".ball_radius") || raw.has(prefix + ".count");
    if (has_file && has_ball)
        throw ValidationError(prefix, "give either a file or a ball spec, not both");
    if (has_file) {
        spec.source_file = raw.get(prefix + ".file");
        spec.explicit_measure = load_measure(spec.source_file, dim);
        return spec;
    }
    if (!raw.has(prefix + ".ball_radius") || !raw.has(prefix + ".count"))
        throw ValidationError(prefix, "needs " + prefix + ".file or both " + prefix +
                                          ".ball_radius and " + prefix + ".count");
    spec.ball = BallSpec{parse_double(raw.get(prefix + ".ball_radius"),
                                      prefix + ".ball_radius"),
                         dim};
    spec.count = static_cast<int>(parse_long(raw.get(prefix + ".count"), prefix + ".count"));
    if (spec.count < 1) throw ValidationError(prefix + ".count", "must be >= 1");
    if (raw.has(prefix + ".seed"))
        spec.seed = static_cast<std::uint64_t>(
            parse_long(raw.get(prefix + ".seed"), prefix + ".seed"));
    return spec;
}

} // namespace

SimulationConfig parse_config(const std::string& text) {
    const RawConfig raw = tokenize(text);
    for (const auto& [key, value] : raw.kv) {
        bool known = false;
        for (const char* k : kKnownKeys)
            if (key == k) known = true;
        if (!known) throw UnknownKey(key);
    }
    for (const char* required : {"dimension", "drift", "epsilon", "tau", "horizon"})
        if (!raw.has(required))
            throw ValidationError(required, "missing required key");

    SimulationConfig config;
    config.dimension = static_cast<int>(parse_long(raw.get("dimension"), "dimension"));
    if (config.dimension < 1) throw ValidationError("dimension", "must be >= 1");

    const std::string drift = trim(raw.get("drift"));
    if (drift == "J") {
        if (config.dimension != 3)
            throw ValidationError("drift", "\"J\" requires dimension 3");
        config.drift = make_J();
    } else {
        const std::vector<double> entries = parse_comma_list(drift, "drift");
        const long d = config.dimension;
        if (static_cast<long>(entries.size()) != d * d)
            throw ValidationError("drift", "expected " + std::to_string(d * d) +
                                               " row-major entries");
        Eigen::MatrixXd A(d, d);
        for (long r = 0; r < d; ++r)
            for (long c = 0; c < d; ++c)
                A(r, c) = entries[static_cast<std::size_t>(r * d + c)];
        config.drift = make_drift(std::move(A));
    }

    config.epsilon = parse_double(raw.get("epsilon"), "epsilon");
    config.tau = parse_double(raw.get("tau"), "tau");
    config.horizon = parse_double(raw.get("horizon"), "horizon");
    config.alpha0 = parse_measure_spec(raw, "alpha0", config.dimension);
    config.mu0 = parse_measure_spec(raw, "mu0", config.dimension);
    if (raw.has("sinkhorn.tol"))
        config.sinkhorn_tol = parse_double(raw.get("sinkhorn.tol"), "sinkhorn.tol");
    if (raw.has("sinkhorn.max_iter"))
        config.sinkhorn_max_iter =
            parse_long(raw.get("sinkhorn.max_iter"), "sinkhorn.max_iter");
    if (raw.has("warm_start"))
        config.warm_start = parse_bool(raw.get("warm_start"), "warm_start");
    if (raw.has("snapshot_stride"))
        config.snapshot_stride =
            parse_long(raw.get("snapshot_stride"), "snapshot_stride");

    config.validate();
    return config;
}

SimulationConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void override_seeds(SimulationConfig& config, std::uint64_t seed) {
    if (config.alpha0.ball) config.alpha0.seed = seed;
    if (config.mu0.ball) config.mu0.seed = seed + 1;
}

DiscreteMeasure load_measure(const std::string& path, int expected_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open measure file: " + path);
    std::vector<Point> points;
    std::vector<double> weights;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<double> values;
        double v = 0.0;
        while (ss >> v) values.push_back(v);
        if (!ss.eof())
            throw ParseError(lineno, "malformed number in measure file " + path);
        if (static_cast<int>(values.size()) != expected_dim + 1)
            throw ParseError(lineno, "expected " + std::to_string(expected_dim) +
                                         " coordinates and a weight");
        Point p(expected_dim);
        for (int k = 0; k < expected_dim; ++k) p[k] = values[static_cast<std::size_t>(k)];
        points.push_back(std::move(p));
        weights.push_back(values.back());
    }
    if (points.empty()) throw IoError("measure file has no atoms: " + path);
    return make_discrete(points, weights);
}

} // namespace sgflow
