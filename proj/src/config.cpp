#include "config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "util.hpp"

namespace mlqmc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    if (out.empty()) out.push_back("");
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE ||
        !std::isfinite(v))
        fail(ErrorKind::config, key + ": expected a finite number, got '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (value.empty() || value[0] == '-' || end != value.c_str() + value.size() ||
        errno == ERANGE)
        fail(ErrorKind::config,
             key + ": expected a non-negative integer, got '" + value + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& value, long min,
              long max) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE ||
        v < min || v > max)
        fail(ErrorKind::config, key + ": expected an integer in [" +
                                    std::to_string(min) + ", " +
                                    std::to_string(max) + "], got '" + value + "'");
    return static_cast<int>(v);
}

void require_file(const std::string& key, const std::string& path) {
    if (!std::filesystem::exists(path))
        fail(ErrorKind::config, key + ": file not found: " + path);
}

// Shared by file parsing and CLI overrides; file parsing tracks the field
// blocks itself because their presence is what the invariant constrains.
void set_key(Config& c, const std::string& key, const std::string& value) {
    if (key == "mesh") {
        c.mesh = value;
        if (value != "builtin") require_file(key, value);
    } else if (key == "approach") {
        if (value != "nna" && value != "gna" && value != "lna" && value != "all")
            fail(ErrorKind::config, "approach: use nna, gna, lna or all, got '" +
                                        value + "'");
        c.approach = value;
    } else if (key == "eps") {
        c.eps.clear();
        for (const std::string& item : split_list(value)) {
            const double e = parse_double(key, item);
            if (!(e > 0.0)) fail(ErrorKind::config, "eps: tolerances must be > 0");
            c.eps.push_back(e);
        }
    } else if (key == "max_level") {
        c.max_level = parse_int(key, value, 0, kMaxLevel);
    } else if (key == "initial_n") {
        c.initial_n.clear();
        for (const std::string& item : split_list(value)) {
            const std::uint64_t n = parse_u64(key, item);
            if (n < 1) fail(ErrorKind::config, "initial_n: counts must be >= 1");
            c.initial_n.push_back(n);
        }
    } else if (key == "shifts") {
        c.shifts = parse_int(key, value, 2, 1000000);
    } else if (key == "growth_factor") {
        c.growth_factor = parse_double(key, value);
        if (!(c.growth_factor > 1.0))
            fail(ErrorKind::config, "growth_factor must exceed 1");
    } else if (key == "seed") {
        c.seed = parse_u64(key, value);
    } else if (key == "s") {
        c.s = parse_int(key, value, 1, 1000000);
    } else if (key == "threads") {
        c.threads = parse_int(key, value, 0, 4096);
    } else if (key == "genvec") {
        c.genvec = value;
        if (!value.empty()) require_file(key, value);
    } else if (key == "out") {
        c.out = value;
    } else if (key == "matern_nu") {
        c.matern_nu = parse_double(key, value);
    } else if (key == "matern_lambda") {
        c.matern_lambda = parse_double(key, value);
    } else if (key == "matern_sigma2") {
        c.matern_sigma2 = parse_double(key, value);
        c.has_matern_sigma2 = true;
    } else if (key == "lognormal_mean") {
        c.lognormal_mean = parse_double(key, value);
    } else if (key == "lognormal_stddev") {
        c.lognormal_stddev = parse_double(key, value);
    } else if (key == "gaussian_mean") {
        c.gaussian_mean = parse_double(key, value);
    } else if (key == "young") {
        c.young = parse_double(key, value);
    } else if (key == "poisson") {
        c.poisson = parse_double(key, value);
    } else if (key == "density") {
        c.density = parse_double(key, value);
    } else if (key == "gravity") {
        c.gravity = parse_double(key, value);
    } else {
        fail(ErrorKind::config, "unknown key '" + key + "'");
    }
}

} // namespace

Config parse_config_text(const std::string& text) {
    Config c;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::parse,
                 "line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            fail(ErrorKind::parse, "line " + std::to_string(lineno) + ": empty key");
        if (!seen.insert(key).second)
            fail(ErrorKind::config,
                 "line " + std::to_string(lineno) + ": repeated key '" + key + "'");
        try {
            set_key(c, key, value);
        } catch (const Error& e) {
            fail(e.kind(), "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    const bool block_a =
        seen.count("lognormal_mean") > 0 || seen.count("lognormal_stddev") > 0;
    const bool block_b = seen.count("gaussian_mean") > 0;
    if (block_a && block_b)
        fail(ErrorKind::config,
             "give either the lognormal moments or gaussian_mean, not both");
    if (!block_a && !block_b)
        fail(ErrorKind::config,
             "config must set one field block: lognormal_mean and "
             "lognormal_stddev, or gaussian_mean");
    if (block_a && (seen.count("lognormal_mean") == 0 ||
                    seen.count("lognormal_stddev") == 0))
        fail(ErrorKind::config,
             "lognormal_mean and lognormal_stddev must be given together");
    c.has_lognormal_block = block_a;
    c.has_gaussian_block = block_b;
    return c;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const Error& e) {
        fail(e.kind(), path + ": " + e.what());
    }
}

void apply_option(Config& config, const std::string& key,
                  const std::string& value) {
    set_key(config, key, value);
    if (key == "lognormal_mean" || key == "lognormal_stddev") {
        config.has_lognormal_block = true;
        config.has_gaussian_block = false;
    } else if (key == "gaussian_mean") {
        config.has_gaussian_block = true;
        config.has_lognormal_block = false;
    }
}

std::string echo_config(const Config& c) {
    std::ostringstream out;
    out << "mesh=" << c.mesh << "\n";
    out << "approach=" << c.approach << "\n";
    if (!c.eps.empty()) {
        out << "eps=";
        for (std::size_t i = 0; i < c.eps.size(); ++i)
            out << (i ? "," : "") << format_double(c.eps[i]);
        out << "\n";
    }
    out << "max_level=" << c.max_level << "\n";
    out << "initial_n=";
    for (std::size_t i = 0; i < c.initial_n.size(); ++i)
        out << (i ? "," : "") << c.initial_n[i];
    out << "\n";
    out << "shifts=" << c.shifts << "\n";
    out << "growth_factor=" << format_double(c.growth_factor) << "\n";
    out << "seed=" << c.seed << "\n";
    out << "s=" << c.s << "\n";
    out << "threads=" << c.threads << "\n";
    if (!c.genvec.empty()) out << "genvec=" << c.genvec << "\n";
    out << "out=" << c.out << "\n";
    out << "matern_nu=" << format_double(c.matern_nu) << "\n";
    out << "matern_lambda=" << format_double(c.matern_lambda) << "\n";
    if (c.has_matern_sigma2)
        out << "matern_sigma2=" << format_double(c.matern_sigma2) << "\n";
    if (c.has_lognormal_block) {
        out << "lognormal_mean=" << format_double(c.lognormal_mean) << "\n";
        out << "lognormal_stddev=" << format_double(c.lognormal_stddev) << "\n";
    } else {
        out << "gaussian_mean=" << format_double(c.gaussian_mean) << "\n";
    }
    out << "young=" << format_double(c.young) << "\n";
    out << "poisson=" << format_double(c.poisson) << "\n";
    out << "density=" << format_double(c.density) << "\n";
    out << "gravity=" << format_double(c.gravity) << "\n";
    return out.str();
}

Material material_of(const Config& c) {
    Material m;
    m.young = c.young;
    m.poisson = c.poisson;
    m.density = c.density;
    m.gravity = c.gravity;
    if (!(m.young > 0.0)) fail(ErrorKind::config, "young must be > 0");
    if (!(m.poisson > -1.0 && m.poisson < 0.5))
        fail(ErrorKind::config, "poisson must lie in (-1, 0.5)");
    if (!(m.density >= 0.0)) fail(ErrorKind::config, "density must be >= 0");
    return m;
}

FieldModel field_model_of(const Config& c) {
    FieldModel f;
    f.kernel.nu = c.matern_nu;
    f.kernel.lambda = c.matern_lambda;
    f.s = c.s;
    if (c.has_lognormal_block) {
        const GaussianMoments g =
            lognormal_moments_to_gaussian(c.lognormal_mean, c.lognormal_stddev);
        f.mean = g.mean;
        f.kernel.sigma2 = c.has_matern_sigma2 ? c.matern_sigma2 : g.sigma2;
    } else {
        f.mean = c.gaussian_mean;
        f.kernel.sigma2 = c.has_matern_sigma2 ? c.matern_sigma2 : 1.0;
    }
    return f;
}

Mesh mesh_of(const Config& c) {
    if (c.mesh == "builtin") return builtin_slope_mesh();
    return load_mesh(c.mesh);
}

std::vector<std::uint64_t> genvec_of(const Config& c) {
    if (c.genvec.empty()) return default_generating_vector();
    return load_generating_vector(c.genvec);
}

std::vector<Approach> approaches_of(const Config& c) {
    if (c.approach == "all")
        return {Approach::nna, Approach::gna, Approach::lna};
    return {approach_from_name(c.approach)};
}

EstimatorConfig estimator_config_of(const Config& c, double eps) {
    EstimatorConfig e;
    e.eps = eps;
    e.max_level = c.max_level;
    e.initial_n = c.initial_n;
    e.shifts = c.shifts;
    e.growth_factor = c.growth_factor;
    e.threads = c.threads;
    return e;
}

} // namespace mlqmc
