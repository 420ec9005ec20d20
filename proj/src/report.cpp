#include "thinframe/report.hpp"

#include "thinframe/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace thinframe {

Json to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

namespace {

void walk(const Json& j, const std::string& path, const std::string& what) {
    if (j.is_number_float()) {
        if (!std::isfinite(j.get<double>())) throw NumericalError(what + ": non-finite value at " + path);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) walk(j[i], path + "[" + std::to_string(i) + "]", what);
    } else if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) walk(it.value(), path + "." + it.key(), what);
    }
}

std::string fmt(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

}  // namespace

void require_finite(const Json& j, const std::string& what) { walk(j, "$", what); }

std::string dump_checked(const Json& j, const std::string& what) {
    require_finite(j, what);
    return j.dump(2) + "\n";
}

std::string band_svg(const BandStructure& bs) {
    double top = 1.0;
    for (const Band& b : bs.bands) top = std::max(top, b.hi);
    for (double d : bs.delta) top = std::max(top, d);
    for (double a : bs.alpha) top = std::max(top, a);
    top *= 1.05;

    const double width = 900.0, left = 40.0, right = 20.0, axis = 110.0;
    const double span = width - left - right;
    auto x = [&](double s) { return fmt(left + span * s / top, 2); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"170\" viewBox=\"0 0 900 170\">\n"
      << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#888\" "
         "stroke-width=\"1.5\"/></pattern></defs>\n"
      << "<rect width=\"900\" height=\"170\" fill=\"white\"/>\n";
    for (const auto& [lo, hi] : bs.gaps) {
        o << "<rect class=\"gap\" x=\"" << x(lo) << "\" y=\"" << fmt(axis, 2) << "\" width=\""
          << fmt(span * (hi - lo) / top, 2) << "\" height=\"24\" fill=\"url(#hatch)\" stroke=\"#888\"/>\n";
    }
    for (const Band& b : bs.bands) {
        o << "<rect class=\"band\" x=\"" << x(b.lo) << "\" y=\"" << fmt(axis - 30.0, 2) << "\" width=\""
          << fmt(std::max(span * (b.hi - b.lo) / top, 1.0), 2)
          << "\" height=\"30\" fill=\"#3b6fb6\" fill-opacity=\"0.6\"/>\n";
        for (double p : b.points)
            o << "<line class=\"point\" x1=\"" << x(p) << "\" y1=\"" << fmt(axis - 30.0, 2) << "\" x2=\"" << x(p)
              << "\" y2=\"" << fmt(axis, 2) << "\" stroke=\"#123\" stroke-width=\"0.8\"/>\n";
    }
    o << "<line x1=\"" << fmt(left, 2) << "\" y1=\"" << fmt(axis, 2) << "\" x2=\"" << fmt(width - right, 2)
      << "\" y2=\"" << fmt(axis, 2) << "\" stroke=\"black\"/>\n";
    for (double d : bs.delta)
        o << "<line class=\"delta\" x1=\"" << x(d) << "\" y1=\"" << fmt(axis - 40.0, 2) << "\" x2=\"" << x(d)
          << "\" y2=\"" << fmt(axis + 30.0, 2) << "\" stroke=\"#c0392b\"/>\n"
          << "<text x=\"" << x(d) << "\" y=\"" << fmt(axis + 44.0, 2)
          << "\" font-size=\"9\" text-anchor=\"middle\" fill=\"#c0392b\">" << fmt(d, 3) << "</text>\n";
    for (double a : bs.alpha)
        o << "<line class=\"alpha\" x1=\"" << x(a) << "\" y1=\"" << fmt(axis - 40.0, 2) << "\" x2=\"" << x(a)
          << "\" y2=\"" << fmt(axis + 30.0, 2) << "\" stroke=\"#27ae60\" stroke-dasharray=\"3,2\"/>\n"
          << "<text x=\"" << x(a) << "\" y=\"" << fmt(axis - 44.0, 2)
          << "\" font-size=\"9\" text-anchor=\"middle\" fill=\"#27ae60\">" << fmt(a, 3) << "</text>\n";
    o << "<text x=\"" << fmt(width - right, 2) << "\" y=\"" << fmt(axis + 60.0, 2)
      << "\" font-size=\"11\" text-anchor=\"end\">s</text>\n"
      << "</svg>\n";
    return o.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace thinframe
