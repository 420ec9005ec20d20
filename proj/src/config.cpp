#include "thinframe/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace thinframe {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
    double x = 0.0;
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || p != end || !std::isfinite(x))
        throw ConfigError(key + ": expected a finite number, got '" + v + "'");
    return x;
}

int to_int(const std::string& v, const std::string& key) {
    int x = 0;
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || p != end) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return x;
}

std::string num(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"framework", [](RunConfig& c, const std::string&, const std::string& v) { c.framework = v; }},
        {"theta", [](RunConfig& c, const std::string& k, const std::string& v) { c.theta = to_double(v, k); }},
        {"lame0", [](RunConfig& c, const std::string& k, const std::string& v) { c.lame0 = to_double(v, k); }},
        {"shear0", [](RunConfig& c, const std::string& k, const std::string& v) { c.shear0 = to_double(v, k); }},
        {"lame1", [](RunConfig& c, const std::string& k, const std::string& v) { c.lame1 = to_double(v, k); }},
        {"shear1", [](RunConfig& c, const std::string& k, const std::string& v) { c.shear1 = to_double(v, k); }},
        {"n", [](RunConfig& c, const std::string& k, const std::string& v) { c.n = to_int(v, k); }},
        {"modes", [](RunConfig& c, const std::string& k, const std::string& v) { c.modes = to_int(v, k); }},
        {"macro_n", [](RunConfig& c, const std::string& k, const std::string& v) { c.macro_n = to_int(v, k); }},
        {"macro_k", [](RunConfig& c, const std::string& k, const std::string& v) { c.macro_k = to_int(v, k); }},
        {"ladder",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.ladder.clear();
             std::stringstream ss(v);
             std::string item;
             while (std::getline(ss, item, ',')) c.ladder.push_back(parse_inverse(trim(item), k));
         }},
        {"eps", [](RunConfig& c, const std::string& k, const std::string& v) { c.eps = parse_inverse(v, k); }},
        {"n_fine", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_fine = to_int(v, k); }},
        {"boundary",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             try {
                 c.boundary = parse_boundary_mode(v);
             } catch (const std::invalid_argument& e) {
                 throw ConfigError(k + ": " + e.what());
             }
         }},
        {"direct_modes",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.direct_modes = to_int(v, k); }},
        {"macro_spectrum", [](RunConfig& c, const std::string&, const std::string& v) { c.macro_spectrum = v; }},
        {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; }},
    };
    return table;
}

}  // namespace

int parse_inverse(const std::string& text, const std::string& field) {
    std::string t = trim(text);
    if (t.rfind("1/", 0) == 0) t = t.substr(2);
    int k = 0;
    const auto* end = t.data() + t.size();
    auto [p, ec] = std::from_chars(t.data(), end, k);
    if (t.empty() || ec != std::errc() || p != end || k < 1)
        throw ConfigError(field + ": expected 1/k with k a positive integer, got '" + text + "'");
    return k;
}

std::string inverse_string(int k) { return "1/" + std::to_string(k); }

void set_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, key, trim(value));
}

void read_config(std::istream& in, RunConfig& cfg) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        set_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

void load_config(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    read_config(in, cfg);
}

void validate(const RunConfig& cfg) {
    auto positive = [](double v, const char* key) {
        if (!(v > 0.0)) throw ConfigError(std::string(key) + ": must be positive");
    };
    if (cfg.framework.empty()) throw ConfigError("framework: must name a preset or a file");
    positive(cfg.theta, "theta");
    positive(cfg.shear0, "shear0");
    positive(cfg.shear1, "shear1");
    if (!(cfg.lame0 + cfg.shear0 > 0.0)) throw ConfigError("lame0: lame0 + shear0 must be positive");
    if (!(cfg.lame1 + cfg.shear1 > 0.0)) throw ConfigError("lame1: lame1 + shear1 must be positive");
    if (cfg.n < 2 || cfg.n % 2) throw ConfigError("n: must be even and at least 2");
    if (cfg.modes < 0) throw ConfigError("modes: must be non-negative");
    if (cfg.macro_n < 2) throw ConfigError("macro_n: must be at least 2");
    if (cfg.macro_k < 0) throw ConfigError("macro_k: must be non-negative");
    if (cfg.ladder.empty()) throw ConfigError("ladder: needs at least one entry");
    if (cfg.n_fine < 0 || cfg.n_fine % 2) throw ConfigError("n_fine: must be even (0 for automatic)");
    if (cfg.direct_modes < 1) throw ConfigError("direct_modes: must be at least 1");
    if (cfg.out.empty()) throw ConfigError("out: must be a directory");
}

std::string echo(const RunConfig& cfg) {
    std::ostringstream o;
    o << "framework = " << cfg.framework << '\n'
      << "theta = " << num(cfg.theta) << '\n'
      << "lame0 = " << num(cfg.lame0) << '\n'
      << "shear0 = " << num(cfg.shear0) << '\n'
      << "lame1 = " << num(cfg.lame1) << '\n'
      << "shear1 = " << num(cfg.shear1) << '\n'
      << "n = " << cfg.n << '\n'
      << "modes = " << cfg.modes << '\n'
      << "macro_n = " << cfg.macro_n << '\n'
      << "macro_k = " << cfg.macro_k << '\n'
      << "ladder = ";
    for (std::size_t i = 0; i < cfg.ladder.size(); ++i) o << (i ? "," : "") << inverse_string(cfg.ladder[i]);
    o << '\n'
      << "eps = " << inverse_string(cfg.eps) << '\n'
      << "n_fine = " << cfg.n_fine << '\n'
      << "boundary = " << to_string(cfg.boundary) << '\n'
      << "direct_modes = " << cfg.direct_modes << '\n';
    if (!cfg.macro_spectrum.empty()) o << "macro_spectrum = " << cfg.macro_spectrum << '\n';
    o << "out = " << cfg.out << '\n';
    return o.str();
}

std::vector<double> load_spectrum_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("macro_spectrum: cannot open '" + path + "'");
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            const double v = to_double(tok, "macro_spectrum");
            if (!(v > 0.0)) throw ConfigError("macro_spectrum: values must be positive");
            out.push_back(v);
        }
    }
    if (out.empty()) throw ConfigError("macro_spectrum: file holds no values");
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace thinframe
