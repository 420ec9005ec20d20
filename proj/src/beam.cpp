#include "thinframe/beam.hpp"

namespace thinframe {

Matrix4 hermite_stiffness(double len, double coeff) {
    const double l = len, l2 = len * len;
    Matrix4 k;
    k << 12, 6 * l, -12, 6 * l,
         6 * l, 4 * l2, -6 * l, 2 * l2,
         -12, -6 * l, 12, -6 * l,
         6 * l, 2 * l2, -6 * l, 4 * l2;
    return k * (coeff / (l2 * l));
}

Matrix4 hermite_mass(double len, double coeff) {
    const double l = len, l2 = len * len;
    Matrix4 m;
    m << 156, 22 * l, 54, -13 * l,
         22 * l, 4 * l2, 13 * l, -3 * l2,
         54, 13 * l, 156, -22 * l,
         -13 * l, -3 * l2, -22 * l, 4 * l2;
    return m * (coeff * l / 420.0);
}

Eigen::Vector4d hermite_load(double len) {
    return {len / 2.0, len * len / 12.0, len / 2.0, -len * len / 12.0};
}

}  // namespace thinframe
