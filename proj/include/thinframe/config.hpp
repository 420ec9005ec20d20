#pragma once

#include "thinframe/direct_solver.hpp"
#include "thinframe/materials.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace thinframe {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Flat run configuration. Text form is `key = value` per line, `#` comments.
struct RunConfig {
    std::string framework = "grid-diag";
    double theta = 0.5;
    double lame0 = 0.0, shear0 = 0.1;
    double lame1 = 1.0, shear1 = 1.0;
    int n = 32;                  // cell mesh
    int modes = 20;              // micro modes N
    int macro_n = 64;            // macro mesh
    int macro_k = 12;            // macro eigenvalues K
    std::vector<int> ladder{4, 8};     // 1/eps values; 1/2 needs theta < 0.5 on grid-diag
    int eps = 8;                 // 1/eps for `direct`
    int n_fine = 0;              // 0 = automatic
    BoundaryMode boundary = BoundaryMode::stiff;
    int direct_modes = 6;
    std::string macro_spectrum;  // optional file of Lambda values
    std::string out = ".";

    ElasticTensor a0() const { return {lame0, shear0}; }
    ElasticTensor a1() const { return {lame1, shear1}; }
};

/// Parses "1/k" (or "k" with k >= 1 an integer) and returns k.
int parse_inverse(const std::string& text, const std::string& field);
std::string inverse_string(int k);

/// Sets one key; throws ConfigError naming the key on bad input.
void set_value(RunConfig& cfg, const std::string& key, const std::string& value);
void read_config(std::istream& in, RunConfig& cfg);
void load_config(const std::string& path, RunConfig& cfg);
/// Range checks across fields.
void validate(const RunConfig& cfg);
/// key = value text that reproduces cfg through read_config.
std::string echo(const RunConfig& cfg);

/// Lambda values, whitespace separated, `#` comments.
std::vector<double> load_spectrum_file(const std::string& path);

}  // namespace thinframe
