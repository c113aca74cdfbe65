#include "roadfield/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "roadfield/errors.hpp"

namespace roadfield {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing junk");
        if (!std::isfinite(x)) throw std::invalid_argument("not finite");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("cli", "parse_config", "key '" + key + "' needs a number, got '" + v + "'",
                          line);
    }
}

long long parse_int(const std::string& key, const std::string& v, int line) {
    long long x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw ConfigError("cli", "parse_config",
                          "key '" + key + "' needs an integer, got '" + v + "'", line);
    }
    return x;
}

void require_positive(const std::string& key, double v, int line) {
    if (!(v > 0.0)) {
        throw ConfigError("cli", "parse_config",
                          "key '" + key + "' must be positive, got " + std::to_string(v), line);
    }
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    std::set<std::string> seen;
    const std::set<std::string> sections = {"domain", "network", "params", "mesh",
                                            "eigen",  "evolve",  "output"};
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ConfigError("cli", "parse_config", "unterminated section header", line);
            }
            section = trim(s.substr(1, s.size() - 2));
            if (!sections.count(section)) {
                throw ConfigError("cli", "parse_config", "unknown section '" + section + "'",
                                  line);
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("cli", "parse_config", "expected 'key = value'", line);
        }
        if (section.empty()) {
            throw ConfigError("cli", "parse_config", "key outside any section", line);
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("cli", "parse_config", "empty key", line);
        }
        const std::string qual = section + "." + key;
        if (!seen.insert(qual).second) {
            throw ConfigError("cli", "parse_config", "duplicate key '" + qual + "'", line);
        }

        if (qual == "domain.file") {
            cfg.domain_file = value;
        } else if (qual == "network.file") {
            cfg.network_file = value;
        } else if (qual == "params.a") {
            cfg.params.a = parse_double(key, value, line);
            require_positive(qual, cfg.params.a, line);
        } else if (qual == "params.b") {
            cfg.params.b = parse_double(key, value, line);
            require_positive(qual, cfg.params.b, line);
        } else if (qual == "params.mu") {
            cfg.params.mu = parse_double(key, value, line);
            require_positive(qual, cfg.params.mu, line);
        } else if (qual == "params.nu") {
            cfg.params.nu = parse_double(key, value, line);
            require_positive(qual, cfg.params.nu, line);
        } else if (qual == "params.seed") {
            const long long v = parse_int(key, value, line);
            if (v < 0) {
                throw ConfigError("cli", "parse_config", "seed must be nonnegative", line);
            }
            cfg.seed = static_cast<std::uint64_t>(v);
        } else if (qual == "params.band") {
            cfg.band = parse_double(key, value, line);
            if (cfg.band < 0.0) {
                throw ConfigError("cli", "parse_config", "band must be nonnegative", line);
            }
        } else if (qual == "mesh.h") {
            cfg.h = parse_double(key, value, line);
            require_positive(qual, cfg.h, line);
        } else if (qual == "mesh.min_angle") {
            cfg.min_angle = parse_double(key, value, line);
            if (cfg.min_angle < 0.0 || cfg.min_angle >= 60.0) {
                throw ConfigError("cli", "parse_config", "min_angle must lie in [0, 60)", line);
            }
        } else if (qual == "eigen.k") {
            const long long v = parse_int(key, value, line);
            if (v < 1) throw ConfigError("cli", "parse_config", "k must be at least 1", line);
            cfg.k = static_cast<int>(v);
        } else if (qual == "eigen.tol") {
            cfg.tol = parse_double(key, value, line);
            require_positive(qual, cfg.tol, line);
        } else if (qual == "evolve.dt") {
            cfg.dt = parse_double(key, value, line);
            require_positive(qual, cfg.dt, line);
        } else if (qual == "evolve.T") {
            cfg.t_end = parse_double(key, value, line);
            require_positive(qual, cfg.t_end, line);
        } else if (qual == "evolve.snapshot_every") {
            const long long v = parse_int(key, value, line);
            if (v < 0) {
                throw ConfigError("cli", "parse_config", "snapshot_every must be nonnegative",
                                  line);
            }
            cfg.snapshot_every = static_cast<int>(v);
        } else if (qual == "evolve.initial") {
            if (value != "bump" && value.rfind("file ", 0) != 0) {
                throw ConfigError("cli", "parse_config",
                                  "initial must be 'bump' or 'file <path>'", line);
            }
            cfg.initial = value;
        } else if (qual == "output.dir") {
            cfg.output_dir = value;
        } else if (qual == "output.prefix") {
            cfg.output_prefix = value;
        } else {
            throw ConfigError("cli", "parse_config", "unknown key '" + qual + "'", line);
        }
    }
    if (cfg.t_end < cfg.dt) {
        throw ConfigError("cli", "parse_config", "evolve.T must be at least evolve.dt");
    }
    return cfg;
}

std::string serialize(const RunConfig& c) {
    std::ostringstream out;
    out << "[domain]\n";
    out << "file = " << c.domain_file << "\n";
    out << "\n[network]\n";
    out << "file = " << c.network_file << "\n";
    out << "\n[params]\n";
    out << "a = " << format_g17(c.params.a) << "\n";
    out << "b = " << format_g17(c.params.b) << "\n";
    out << "mu = " << format_g17(c.params.mu) << "\n";
    out << "nu = " << format_g17(c.params.nu) << "\n";
    out << "seed = " << c.seed << "\n";
    out << "band = " << format_g17(c.band) << "\n";
    out << "\n[mesh]\n";
    out << "h = " << format_g17(c.h) << "\n";
    out << "min_angle = " << format_g17(c.min_angle) << "\n";
    out << "\n[eigen]\n";
    out << "k = " << c.k << "\n";
    out << "tol = " << format_g17(c.tol) << "\n";
    out << "\n[evolve]\n";
    out << "dt = " << format_g17(c.dt) << "\n";
    out << "T = " << format_g17(c.t_end) << "\n";
    out << "snapshot_every = " << c.snapshot_every << "\n";
    out << "initial = " << c.initial << "\n";
    out << "\n[output]\n";
    out << "dir = " << c.output_dir << "\n";
    out << "prefix = " << c.output_prefix << "\n";
    return out.str();
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cli", "load_config", "cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace roadfield
