#pragma once

#include "thinframe/limit_spectrum.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <filesystem>
#include <string>

namespace thinframe {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

Json to_json(const Eigen::MatrixXd& m);
Json to_json(const Eigen::VectorXd& v);

/// Throws NumericalError naming the first non-finite entry.
void require_finite(const Json& j, const std::string& what);

/// Pretty JSON text after the finiteness check.
std::string dump_checked(const Json& j, const std::string& what);

/// s-axis band diagram: shaded bands, hatched gaps, ticks at delta_n and alpha_n.
std::string band_svg(const BandStructure& bs);

void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace thinframe
