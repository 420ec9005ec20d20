#pragma once

#include <Eigen/Core>

namespace thinframe {

using Matrix4 = Eigen::Matrix4d;

/// Hermite cubic Euler-Bernoulli element on a segment of length `len`, DOF
/// order (w_a, w'_a, w_b, w'_b). Bending stiffness: coeff * int w'' v''.
Matrix4 hermite_stiffness(double len, double coeff);

/// Consistent mass: coeff * int w v.
Matrix4 hermite_mass(double len, double coeff);

/// Integrals of the four shape functions over the element.
Eigen::Vector4d hermite_load(double len);

}  // namespace thinframe
